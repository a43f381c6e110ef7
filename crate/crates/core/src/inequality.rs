//! The isoperimetric inequalities for moments of inertia, evaluated as
//! `(lhs, rhs, margin)` records against the ball of equal volume.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{canonical_placement, Centering, PlacementMode, Shape};
use crate::special::{equivalent_radius, unit_ball_volume};

/// Relative margin below which a report is flagged as an equality case.
pub const EQUALITY_TOLERANCE: f64 = 1e-9;
/// Relative slack that separates roundoff from a violation.
pub const VIOLATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InequalityId {
    /// `J_0(Ω) ≥ J_0(Ω*)`, volume-centred.
    PolarVolume,
    /// `I_0(Ω) ≥ I_0(Ω*)`, boundary-centred.
    PolarBoundary,
    /// `J(Ω) ≥ J(Ω*)`: ellipsoids are equality cases.
    JProduct,
    /// `I(Ω) ≥ I(Ω*)`: convex bodies, or any planar domain.
    IProduct,
    /// `det M(Ω) ≥ det M(Ω*)`.
    Det,
    /// `|∂Ω|^N ≥ N^N ω_N |Ω|^{N-1}`.
    ClassicalIso,
    /// `I_k^{N+2} ≥ (N+2)^{N+1} ω_N J_k^{N+1}` on the worst axis.
    PerAxis,
}

impl InequalityId {
    pub const ALL: [InequalityId; 7] = [
        InequalityId::PolarVolume,
        InequalityId::PolarBoundary,
        InequalityId::JProduct,
        InequalityId::IProduct,
        InequalityId::Det,
        InequalityId::ClassicalIso,
        InequalityId::PerAxis,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InequalityId::PolarVolume => "POLAR_VOLUME",
            InequalityId::PolarBoundary => "POLAR_BOUNDARY",
            InequalityId::JProduct => "J_PRODUCT",
            InequalityId::IProduct => "I_PRODUCT",
            InequalityId::Det => "DET",
            InequalityId::ClassicalIso => "CLASSICAL_ISO",
            InequalityId::PerAxis => "PER_AXIS",
        }
    }

    /// The centroid moved to the origin before evaluation.
    pub fn centering(&self) -> Centering {
        match self {
            InequalityId::PolarBoundary | InequalityId::IProduct | InequalityId::PerAxis => Centering::Boundary,
            _ => Centering::Volume,
        }
    }

    /// Whether the inequality is only known for convex bodies in `N ≥ 3`.
    pub fn requires_convexity(&self, dim: usize) -> bool {
        dim >= 3 && matches!(self, InequalityId::IProduct | InequalityId::PerAxis)
    }

    /// Parses a comma-separated list, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<InequalityId>> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Self::ALL.to_vec());
        }
        s.split(',').map(|p| p.trim().parse()).collect()
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|id| id.name() == key)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown inequality id '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub id: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; non-negative when the inequality holds.
    pub margin: f64,
    /// `margin / max(|lhs|, |rhs|)`.
    pub relative_margin: f64,
    pub holds: bool,
    pub equality: bool,
    pub centering: Centering,
    /// The axis attaining the smallest relative margin, for per-axis checks.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub worst_axis: Option<usize>,
}

impl InequalityReport {
    fn new(id: InequalityId, lhs: f64, rhs: f64, worst_axis: Option<usize>) -> Self {
        let margin = lhs - rhs;
        let scale = lhs.abs().max(rhs.abs());
        let relative_margin = if scale > 0.0 { margin / scale } else { 0.0 };
        let holds = margin >= -VIOLATION_TOLERANCE * scale;
        Self {
            id,
            lhs,
            rhs,
            margin,
            relative_margin,
            holds,
            equality: holds && relative_margin.abs() < EQUALITY_TOLERANCE,
            centering: id.centering(),
            worst_axis,
        }
    }
}

/// Places `shape` canonically for `id` and compares it with the ball of the
/// same volume.
pub fn evaluate_inequality(id: InequalityId, shape: &Shape) -> Result<InequalityReport> {
    let n = shape.dim();
    if id.requires_convexity(n) && !shape.is_convex()? {
        return Err(Error::HypothesisViolation(format!("{id} is only established for convex bodies when N >= 3")));
    }
    let mode = PlacementMode { centering: id.centering(), rotate: false };
    let (placed, _) = canonical_placement(shape, mode)?;
    let nf = n as f64;
    let omega = unit_ball_volume(n);

    // Only the functionals each inequality needs are computed, so volume-only
    // checks stay available for bodies without boundary moments.
    let interior = placed.interior_integrals()?;
    let volume = interior.measure;
    let r = equivalent_radius(n, volume);
    let ball_j = omega * r.powi(n as i32 + 2) / (nf + 2.0);
    let ball_i = omega * r.powi(n as i32 + 1);
    let j: Vec<f64> = (0..n).map(|k| interior.second[(k, k)]).collect();

    let report = match id {
        InequalityId::PolarVolume => InequalityReport::new(id, j.iter().sum(), nf * ball_j, None),
        InequalityId::JProduct => InequalityReport::new(id, j.iter().product(), ball_j.powi(n as i32), None),
        InequalityId::Det => InequalityReport::new(id, interior.second.determinant(), ball_j.powi(n as i32), None),
        InequalityId::PolarBoundary | InequalityId::IProduct | InequalityId::ClassicalIso | InequalityId::PerAxis => {
            let boundary = placed.boundary_integrals()?;
            let i: Vec<f64> = (0..n).map(|k| boundary.second[(k, k)]).collect();
            match id {
                InequalityId::PolarBoundary => InequalityReport::new(id, i.iter().sum(), nf * ball_i, None),
                InequalityId::IProduct => InequalityReport::new(id, i.iter().product(), ball_i.powi(n as i32), None),
                InequalityId::ClassicalIso => InequalityReport::new(
                    id,
                    boundary.measure.powi(n as i32),
                    nf.powi(n as i32) * omega * volume.powi(n as i32 - 1),
                    None,
                ),
                _ => (0..n)
                    .map(|k| {
                        let lhs = i[k].powi(n as i32 + 2);
                        let rhs = (nf + 2.0).powi(n as i32 + 1) * omega * j[k].powi(n as i32 + 1);
                        InequalityReport::new(id, lhs, rhs, Some(k))
                    })
                    .min_by(|a, b| a.relative_margin.total_cmp(&b.relative_margin))
                    .expect("dimension is at least 2"),
            }
        }
    };
    Ok(report)
}

/// One `(shape, id)` evaluation of a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchItem {
    pub shape_index: usize,
    pub id: InequalityId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<InequalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    pub total: usize,
    pub holds: usize,
    pub equalities: usize,
    pub violations: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    pub items: Vec<BatchItem>,
    pub summary: BatchSummary,
}

/// Evaluates every id on every shape, in parallel over shapes. Items are
/// ordered by shape index, then by the order of `ids`; failures are recorded
/// per item.
pub fn batch_verify(shapes: &[Shape], ids: &[InequalityId]) -> BatchReport {
    let items: Vec<BatchItem> = shapes
        .par_iter()
        .enumerate()
        .flat_map_iter(|(shape_index, shape)| {
            ids.iter().map(move |&id| match evaluate_inequality(id, shape) {
                Ok(r) => BatchItem { shape_index, id, report: Some(r), error: None },
                Err(e) => BatchItem { shape_index, id, report: None, error: Some(e.to_string()) },
            })
        })
        .collect();
    let mut summary = BatchSummary { total: items.len(), ..Default::default() };
    for item in &items {
        match &item.report {
            Some(r) if r.holds => {
                summary.holds += 1;
                summary.equalities += usize::from(r.equality);
            }
            Some(_) => summary.violations += 1,
            None => summary.errors += 1,
        }
    }
    BatchReport { items, summary }
}

/// Relative margins along a one-parameter family of shapes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCurve {
    pub id: InequalityId,
    pub parameters: Vec<f64>,
    pub relative_margins: Vec<f64>,
    /// Margins never decrease (beyond `1e-10`) as the parameter increases.
    pub monotone: bool,
}

pub fn equality_gap_scan<F>(family: F, parameters: &[f64], id: InequalityId) -> Result<GapCurve>
where
    F: Fn(f64) -> Result<Shape> + Sync,
{
    let relative_margins = parameters
        .par_iter()
        .map(|&p| Ok(evaluate_inequality(id, &family(p)?)?.relative_margin))
        .collect::<Result<Vec<f64>>>()?;
    let monotone = relative_margins.windows(2).all(|w| w[1] >= w[0] - 1e-10);
    Ok(GapCurve { id, parameters: parameters.to_vec(), relative_margins, monotone })
}

/// Ellipse of area `π` with eccentricity `e ∈ [0, 1)`.
pub fn fixed_area_ellipse(e: f64) -> Result<Shape> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::InvalidArgument(format!("eccentricity must lie in [0, 1), got {e}")));
    }
    let q = (1.0 - e * e).sqrt();
    Ok(crate::geometry::Ellipsoid::new(vec![0.0, 0.0], vec![q.powf(-0.5), q.sqrt()])?.into())
}

/// Regular `n`-gon of area `π`, centred at the origin.
pub fn fixed_area_regular_polygon(n: usize) -> Result<Shape> {
    let nf = n as f64;
    let unit_area = 0.5 * nf * (2.0 * std::f64::consts::PI / nf).sin();
    Ok(crate::geometry::Polygon::regular(n, (std::f64::consts::PI / unit_area).sqrt())?.into())
}
