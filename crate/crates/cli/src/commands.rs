use std::f64::consts::PI;
use std::path::Path;

use isomoment::geometry::{canonical_placement, PlacementMode};
use isomoment::inequality::{batch_verify, InequalityId};
use isomoment::optimizer::{
    multi_start, perturbed_circle, stationarity_report, OptimizationProblem, OptimizationTrace,
};
use isomoment::parallel::{concavity_scan, default_grid, fit_expansion, ConcavityReport, ExpansionFit, Functional};
use isomoment::random::{generate, rng_from_seed, RandomKind, RandomParams};
use isomoment::stekloff::{converge_spectrum, coordinate_bounds, spectral_chain_check};
use isomoment::{FourierBoundary, Polygon, Shape};
use rayon::prelude::*;

use crate::document::{documents_to_string, fourier_payload, load_shapes, ShapeDocument};
use crate::report::{Item, MomentsItem, OffsetScanItem, OptimizeItem, SkippedItem, StekloffItem, Summary, VerifyItem};
use crate::tabular::{num, Table};
use crate::{CliError, GeneratorArgs, Input};

/// Report items, their summary, and the same results as plot data.
pub struct Outcome {
    pub items: Vec<Item>,
    pub summary: Summary,
    pub table: Table,
}

/// Relative slack below the disc value before an optimizer iterate counts
/// as a counterexample to the boundary-product inequality.
const LOWER_BOUND_SLACK: f64 = 1e-9;

fn random_params(g: &GeneratorArgs) -> RandomParams {
    let d = RandomParams::default();
    RandomParams {
        normalize_area: g.normalize_area,
        mode_cap: g.mode_cap.unwrap_or(d.mode_cap),
        amplitude: g.amplitude.unwrap_or(d.amplitude),
        convex: g.convex.or(d.convex),
        dim: g.dim.unwrap_or(d.dim),
        perturbation: g.perturbation.unwrap_or(d.perturbation),
    }
}

fn generated(kind: &str, seed: u64, count: usize, g: &GeneratorArgs) -> Result<Vec<(String, Shape)>, CliError> {
    let parsed: RandomKind = kind.parse()?;
    let shapes = generate(parsed, seed, count, &random_params(g))?;
    Ok(shapes.into_iter().enumerate().map(|(i, s)| (format!("{kind}-{seed}-{i}"), s)).collect())
}

pub fn load(input: &Input) -> Result<Vec<(String, Shape)>, CliError> {
    match (&input.shape, &input.kind) {
        (Some(path), _) => load_shapes(path),
        (None, Some(kind)) => {
            let seed = input.seed.ok_or_else(|| CliError::Input("--kind requires --seed".into()))?;
            generated(kind, seed, input.count, &input.generator)
        }
        (None, None) => Err(CliError::Input("either --shape or --kind is required".into())),
    }
}

pub fn random(kind: &str, seed: u64, count: usize, g: &GeneratorArgs) -> Result<String, CliError> {
    let docs: Vec<ShapeDocument> = generated(kind, seed, count, g)?
        .iter()
        .map(|(name, s)| ShapeDocument::from_shape(s, Some(name.clone())))
        .collect();
    Ok(documents_to_string(&docs))
}

fn skipped(index: usize, name: &str, reason: impl Into<String>) -> Item {
    Item::Skipped(SkippedItem { index, name: name.to_string(), skipped: reason.into() })
}

pub fn moments(shapes: &[(String, Shape)]) -> Outcome {
    let results: Vec<_> = shapes.par_iter().map(|(_, s)| s.moments()).collect();
    let width = shapes.iter().map(|(_, s)| s.dim()).max().unwrap_or(0);
    let mut header: Vec<String> = ["index", "name", "kind", "dim", "volume", "surface"].map(String::from).to_vec();
    header.extend((1..=width).map(|k| format!("j_{k}")));
    header.extend((1..=width).map(|k| format!("i_{k}")));
    let mut table = Table::new(header);
    let mut summary = Summary { total: shapes.len(), ..Default::default() };
    let mut items = Vec::new();
    for (index, ((name, shape), result)) in shapes.iter().zip(results).enumerate() {
        match result {
            Ok(m) => {
                summary.holds += 1;
                let mut row = vec![index.to_string(), name.clone(), shape.kind().into(), m.dim.to_string()];
                row.extend([num(m.volume), num(m.surface)]);
                row.extend((0..width).map(|k| m.j.get(k).map_or(String::new(), |x| num(*x))));
                row.extend((0..width).map(|k| m.i.get(k).map_or(String::new(), |x| num(*x))));
                table.push(row);
                items.push(Item::Moments(MomentsItem { index, name: name.clone(), kind: shape.kind(), moments: m }));
            }
            Err(e) => {
                summary.skipped += 1;
                items.push(skipped(index, name, e.to_string()));
            }
        }
    }
    Outcome { items, summary, table }
}

pub fn verify(shapes: &[(String, Shape)], ids: &str) -> Result<Outcome, CliError> {
    let ids = InequalityId::parse_list(ids)?;
    let plain: Vec<Shape> = shapes.iter().map(|(_, s)| s.clone()).collect();
    let batch = batch_verify(&plain, &ids);
    let mut table = Table::new(["index", "name", "id", "lhs", "rhs", "margin", "relative_margin", "holds", "equality"]);
    let summary = Summary {
        total: batch.summary.total,
        holds: batch.summary.holds,
        violations: batch.summary.violations,
        skipped: batch.summary.errors,
    };
    let items = batch
        .items
        .into_iter()
        .map(|b| {
            let name = shapes[b.shape_index].0.clone();
            let mut row = vec![b.shape_index.to_string(), name.clone(), b.id.to_string()];
            if let Some(r) = &b.report {
                row.extend([num(r.lhs), num(r.rhs), num(r.margin), num(r.relative_margin)]);
                row.extend([r.holds.to_string(), r.equality.to_string()]);
            }
            table.push(row);
            Item::Verify(VerifyItem { index: b.shape_index, name, id: b.id, report: b.report, error: b.error })
        })
        .collect();
    Ok(Outcome { items, summary, table })
}

type Scan = (Vec<f64>, Vec<ExpansionFit>, Vec<ConcavityReport>);

/// Fits and concavity scans with the base moved to its boundary centroid.
fn scan_polygon(p: &Polygon) -> Result<Scan, isomoment::Error> {
    let (placed, placement) = canonical_placement(&Shape::Polygon(p.clone()), PlacementMode::BOUNDARY)?;
    let Shape::Polygon(base) = placed else { unreachable!("placement preserves the shape kind") };
    let grid = default_grid();
    let fits = (0..2).map(|k| fit_expansion(&base, k, &grid)).collect::<Result<Vec<_>, _>>()?;
    let concavity = [Functional::AxisMoment(0), Functional::AxisMoment(1), Functional::Volume]
        .into_iter()
        .map(|f| concavity_scan(&base, f, &grid))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((placement.translation.iter().copied().collect(), fits, concavity))
}

pub fn offset_scan(shapes: &[(String, Shape)]) -> Outcome {
    let results: Vec<_> = shapes
        .par_iter()
        .map(|(_, s)| match s {
            Shape::Polygon(p) if p.is_convex() => Some(scan_polygon(p)),
            _ => None,
        })
        .collect();
    let mut table = Table::new(["index", "name", "h", "j_1", "j_2", "g_1", "g_2", "g_volume"]);
    let mut summary = Summary { total: shapes.len(), ..Default::default() };
    let mut items = Vec::new();
    for (index, ((name, _), result)) in shapes.iter().zip(results).enumerate() {
        match result {
            None => {
                summary.skipped += 1;
                items.push(skipped(index, name, "parallel bodies are computed for convex polygons"));
            }
            Some(Err(e)) => {
                summary.skipped += 1;
                items.push(skipped(index, name, e.to_string()));
            }
            Some(Ok((translation, fits, concavity))) => {
                let holds = concavity.iter().all(|c| c.concave && c.derivative_bound_holds != Some(false));
                if holds {
                    summary.holds += 1;
                } else {
                    summary.violations += 1;
                }
                for (j, h) in fits[0].h.iter().enumerate() {
                    let mut row = vec![index.to_string(), name.clone(), num(*h)];
                    row.extend(fits.iter().map(|f| num(f.samples[j])));
                    row.extend(concavity.iter().map(|c| num(c.g[j])));
                    table.push(row);
                }
                items.push(Item::OffsetScan(OffsetScanItem {
                    index,
                    name: name.clone(),
                    translation,
                    fits,
                    concavity,
                    holds,
                }));
            }
        }
    }
    Outcome { items, summary, table }
}

fn stekloff_item(
    index: usize,
    name: &str,
    shape: &Shape,
    degree: usize,
    tol: f64,
) -> Result<StekloffItem, isomoment::Error> {
    let coordinate_bounds = coordinate_bounds(shape)?;
    let (spectrum, chain) = if shape.is_convex()? {
        let mut chain = spectral_chain_check(shape, degree, tol)?;
        (chain.spectrum.take(), Some(chain))
    } else if shape.dim() == 2 {
        (Some(converge_spectrum(shape, degree, tol)?), None)
    } else {
        (None, None)
    };
    Ok(StekloffItem { index, name: name.to_string(), coordinate_bounds, spectrum, chain })
}

pub fn stekloff(shapes: &[(String, Shape)], degree: usize, tol: f64) -> Result<Outcome, CliError> {
    if degree == 0 {
        return Err(CliError::Input("--degree must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(CliError::Input(format!("--tol must be positive, got {tol}")));
    }
    let results: Vec<_> =
        shapes.par_iter().enumerate().map(|(i, (name, s))| stekloff_item(i, name, s, degree, tol)).collect();
    let mut table = Table::new(["index", "name", "degree", "p_2", "p_3"]);
    let mut summary = Summary { total: shapes.len(), ..Default::default() };
    let mut items = Vec::new();
    for (index, ((name, _), result)) in shapes.iter().zip(results).enumerate() {
        match result {
            Err(e) => {
                summary.skipped += 1;
                items.push(skipped(index, name, e.to_string()));
            }
            Ok(item) => {
                match &item.chain {
                    Some(c) if c.holds => summary.holds += 1,
                    Some(_) => summary.violations += 1,
                    None => summary.skipped += 1,
                }
                let steps = item.spectrum.as_ref().map(|s| s.history.clone()).unwrap_or_default();
                for step in steps {
                    let mut row = vec![index.to_string(), name.clone(), step.degree.to_string()];
                    row.extend(step.bounds.iter().take(2).map(|p| num(*p)));
                    table.push(row);
                }
                if item.spectrum.is_none() {
                    let mut row = vec![index.to_string(), name.clone(), "coordinates".to_string()];
                    row.extend(item.coordinate_bounds.bounds.iter().take(2).map(|p| num(*p)));
                    table.push(row);
                }
                items.push(Item::Stekloff(item));
            }
        }
    }
    Ok(Outcome { items, summary, table })
}

/// Starting boundaries of the requested order: planar shapes from a file
/// (Fourier curves, or ellipses converted exactly), otherwise seeded
/// perturbed circles of area π.
pub fn optimizer_starts(
    shape: Option<&Path>,
    seed: u64,
    count: usize,
    amplitude: f64,
    order: usize,
) -> Result<Vec<(String, FourierBoundary)>, CliError> {
    if order < 2 {
        return Err(CliError::Input(format!("--degree must be at least 2, got {order}")));
    }
    match shape {
        Some(path) => load_shapes(path)?
            .into_iter()
            .map(|(name, s)| {
                let fb = match s {
                    Shape::Fourier(fb) => fb,
                    Shape::Ellipsoid(e) if e.dim() == 2 => e.to_fourier()?,
                    other => {
                        return Err(CliError::Input(format!(
                            "{name}: the optimizer starts from Fourier curves or planar ellipses, not a {}",
                            other.kind()
                        )))
                    }
                };
                Ok((name, fb.with_order(order)))
            })
            .collect(),
        None => {
            if !(0.0..1.0).contains(&amplitude) {
                return Err(CliError::Input(format!("--amplitude must lie in [0, 1), got {amplitude}")));
            }
            let mut rng = rng_from_seed(seed);
            (0..count)
                .map(|i| {
                    let fb = perturbed_circle(&mut rng, order, amplitude)?;
                    let s = (PI / fb.signed_area().abs()).sqrt();
                    Ok((format!("perturbed-circle-{seed}-{i}"), fb.scaled_axes(s, s)))
                })
                .collect()
        }
    }
}

/// `disc` is `I_1 I_2` of the disc with the target area.
fn optimize_item(index: usize, name: &str, trace: &OptimizationTrace, disc: f64) -> OptimizeItem {
    let min_normalized = trace.records.iter().map(|r| r.normalized_objective).fold(f64::INFINITY, f64::min);
    OptimizeItem {
        index,
        name: name.to_string(),
        verdict: trace.verdict.clone(),
        iterations: trace.records.len(),
        objective: trace.objective,
        objective_over_disc: trace.objective / disc,
        area: trace.area,
        lambda: trace.lambda,
        radius_std: trace.radius_std,
        final_boundary: fourier_payload(&trace.final_boundary),
        stationarity: if trace.converged() { stationarity_report(&trace.final_boundary).ok() } else { None },
        min_normalized_over_disc: min_normalized / disc,
    }
}

pub fn optimize(starts: Vec<(String, FourierBoundary)>, order: usize, tol: f64) -> Result<Outcome, CliError> {
    if !(tol > 0.0) {
        return Err(CliError::Input(format!("--tol must be positive, got {tol}")));
    }
    let problem = OptimizationProblem { gradient_tolerance: tol, ..OptimizationProblem::with_order(order) };
    let initials: Vec<FourierBoundary> = starts.iter().map(|(_, fb)| fb.clone()).collect();
    let traces = multi_start(&initials, &problem);
    let mut table = Table::new([
        "run",
        "name",
        "iteration",
        "outer",
        "objective",
        "normalized_objective",
        "augmented",
        "area_residual",
        "gradient_norm",
    ]);
    let mut summary = Summary { total: starts.len(), ..Default::default() };
    let mut items = Vec::new();
    // a disc of area A has I_k = π R³ with R² = A/π
    let disc_value = (problem.target_area / PI).powi(3) * PI * PI;
    for (index, ((name, _), trace)) in starts.iter().zip(traces).enumerate() {
        match trace {
            Err(e) => {
                summary.skipped += 1;
                items.push(skipped(index, name, e.to_string()));
            }
            Ok(trace) => {
                let item = optimize_item(index, name, &trace, disc_value);
                if item.min_normalized_over_disc < 1.0 - LOWER_BOUND_SLACK {
                    summary.violations += 1;
                } else if trace.converged() {
                    summary.holds += 1;
                } else {
                    summary.skipped += 1;
                }
                for r in &trace.records {
                    table.push(vec![
                        index.to_string(),
                        name.clone(),
                        r.iteration.to_string(),
                        r.outer.to_string(),
                        num(r.objective),
                        num(r.normalized_objective),
                        num(r.augmented),
                        num(r.area_residual),
                        num(r.gradient_norm),
                    ]);
                }
                items.push(Item::Optimize(item));
            }
        }
    }
    Ok(Outcome { items, summary, table })
}
