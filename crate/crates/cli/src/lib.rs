//! The `isomoment` command line: shape files in, verification reports out.
//!
//! Exit codes: `0` when every verdict holds, `2` when some inequality is
//! violated (a bug in the mathematics or the code, never in the input), `1`
//! for unreadable or invalid input.

pub mod commands;
pub mod document;
pub mod report;
pub mod tabular;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isomoment::stekloff::{DEFAULT_MAX_DEGREE, DEFAULT_TOLERANCE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn message(&self) -> String {
        self.to_string()
    }
}

impl From<isomoment::Error> for CliError {
    fn from(e: isomoment::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "isomoment", version, about = "Moments of inertia, isoperimetric inequalities and Steklov bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact volume and boundary moments of each shape.
    Moments {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate isoperimetric inequalities.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Comma-separated inequality ids, or `all`.
        #[arg(long, default_value = "all")]
        ids: String,
        #[command(flatten)]
        output: Output,
    },
    /// Parallel-body expansion and concavity scans for convex polygons.
    OffsetScan {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Steklov eigenvalue upper bounds and the spectral product chain.
    Stekloff {
        #[command(flatten)]
        input: Input,
        /// Highest harmonic degree of the trial space.
        #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
        degree: usize,
        /// Relative change between consecutive degrees that ends the sweep.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Minimise I_1·I_2 at area π over Fourier boundaries.
    Optimize {
        /// Starting boundaries (Fourier curves or planar ellipses); random
        /// perturbed circles when absent.
        #[arg(long)]
        shape: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Radial perturbation bound of the random starts.
        #[arg(long, default_value_t = 0.2)]
        amplitude: f64,
        /// Number of Fourier modes.
        #[arg(long, default_value_t = 8)]
        degree: usize,
        /// Gradient-norm tolerance of the inner iteration.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Write seeded random shapes as a shape file.
    Random {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        generator: GeneratorArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Shapes from a file, or generated on the fly.
#[derive(Debug, Args)]
pub struct Input {
    #[arg(long, required_unless_present = "kind")]
    pub shape: Option<PathBuf>,
    /// Generate shapes instead: convex-polygon, star-fourier or
    /// simplicial-box-perturbation (needs --seed).
    #[arg(long, conflicts_with = "shape", requires = "seed")]
    pub kind: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

/// Generator parameters; unset values take the library defaults.
#[derive(Debug, Args)]
pub struct GeneratorArgs {
    #[arg(long)]
    pub mode_cap: Option<usize>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Keep only convex (`true`) or nonconvex (`false`) star curves.
    #[arg(long)]
    pub convex: Option<bool>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub perturbation: Option<f64>,
    /// Rescale each shape to area (volume) π.
    #[arg(long)]
    pub normalize_area: bool,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Report)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// JSON run report.
    Report,
    /// Comma-separated plot data.
    Tabular,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli.command, echo) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn execute(command: Command, echo: Vec<String>) -> Result<i32, CliError> {
    let start = Instant::now();
    let (outcome, output) = match command {
        Command::Random { kind, seed, count, generator, out } => {
            let text = commands::random(&kind, seed, count, &generator)?;
            write_output(out.as_deref(), &text)?;
            return Ok(EXIT_OK);
        }
        Command::Moments { input, output } => (commands::moments(&commands::load(&input)?), output),
        Command::Verify { input, ids, output } => (commands::verify(&commands::load(&input)?, &ids)?, output),
        Command::OffsetScan { input, output } => (commands::offset_scan(&commands::load(&input)?), output),
        Command::Stekloff { input, degree, tol, output } => {
            (commands::stekloff(&commands::load(&input)?, degree, tol)?, output)
        }
        Command::Optimize { shape, seed, count, amplitude, degree, tol, output } => {
            let starts = commands::optimizer_starts(shape.as_deref(), seed, count, amplitude, degree)?;
            (commands::optimize(starts, degree, tol)?, output)
        }
    };
    let text = match output.format {
        Format::Tabular => outcome.table.to_csv()?,
        Format::Report => report::to_precise_json(&report::RunReport {
            tool: "isomoment",
            version: env!("CARGO_PKG_VERSION"),
            report_version: report::REPORT_VERSION,
            command: echo,
            items: outcome.items,
            summary: outcome.summary,
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        }),
    };
    write_output(output.out.as_deref(), &text)?;
    Ok(exit_code(&outcome.summary))
}

pub fn exit_code(summary: &report::Summary) -> i32 {
    if summary.violations > 0 {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
