use std::io::{self, Write};

use isomoment::inequality::InequalityReport;
use isomoment::optimizer::{StationarityReport, Verdict};
use isomoment::parallel::{ConcavityReport, ExpansionFit};
use isomoment::stekloff::{SpectralChainReport, StekloffBounds};
use isomoment::MomentSummary;
use serde::ser::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::document::Payload;

pub const REPORT_VERSION: u32 = 1;

/// Pretty JSON whose floats carry 17 significant digits, so every value
/// parses back to the same `f64`.
pub struct PreciseFormatter<'a>(PrettyFormatter<'a>);

impl Default for PreciseFormatter<'_> {
    fn default() -> Self {
        Self(PrettyFormatter::with_indent(b"  "))
    }
}

impl Formatter for PreciseFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{:.16e}", f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn to_precise_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PreciseFormatter::default());
    value.serialize(&mut ser).expect("report types serialize infallibly");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub report_version: u32,
    pub command: Vec<String>,
    pub items: Vec<Item>,
    pub summary: Summary,
    /// The only field that varies between identical runs.
    pub wall_clock_seconds: f64,
}

/// Counts over a command's verdicts. `skipped` items had no verdict: the
/// shape was outside the hypothesis of the check or of the wrong kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct Summary {
    pub total: usize,
    pub holds: usize,
    pub violations: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
#[serde(untagged)]
pub enum Item {
    Moments(MomentsItem),
    Verify(VerifyItem),
    OffsetScan(OffsetScanItem),
    Stekloff(StekloffItem),
    Optimize(OptimizeItem),
    Skipped(SkippedItem),
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MomentsItem {
    pub index: usize,
    pub name: String,
    pub kind: &'static str,
    pub moments: MomentSummary,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyItem {
    pub index: usize,
    pub name: String,
    pub id: isomoment::inequality::InequalityId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<InequalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct OffsetScanItem {
    pub index: usize,
    pub name: String,
    /// Translation applied to put the boundary centroid at the origin.
    pub translation: Vec<f64>,
    pub fits: Vec<ExpansionFit>,
    pub concavity: Vec<ConcavityReport>,
    pub holds: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct StekloffItem {
    pub index: usize,
    pub name: String,
    pub coordinate_bounds: StekloffBounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<StekloffBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<SpectralChainReport>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct OptimizeItem {
    pub index: usize,
    pub name: String,
    pub verdict: Verdict,
    pub iterations: usize,
    pub objective: f64,
    /// `I_1 I_2` over its value for the disc of the target area.
    pub objective_over_disc: f64,
    pub area: f64,
    pub lambda: f64,
    pub radius_std: f64,
    pub final_boundary: Payload,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationarity: Option<StationarityReport>,
    /// Lowest ratio over all iterates, each rescaled to the target area.
    pub min_normalized_over_disc: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SkippedItem {
    pub index: usize,
    pub name: String,
    pub skipped: String,
}
