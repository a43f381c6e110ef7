//! Parallel bodies `Ω_h = Ω + B_h` of convex polygons.
//!
//! For a convex polygon the offset region splits exactly into the polygon,
//! one rectangle of width `h` on every edge and one circular sector of
//! radius `h` at every vertex, so every moment of `Ω_h` is a polynomial of
//! degree four in `h` with closed-form coefficients.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Integrals, MomentSummary, Polygon};
use crate::linalg::condition_estimate;
use crate::special::unit_ball_volume;

/// Relative fit residual that certifies the polynomial degree.
pub const FIT_RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Largest concavity defect attributed to roundoff.
pub const CONCAVITY_TOLERANCE: f64 = 1e-10;
const MAX_FIT_CONDITION: f64 = 1e12;

/// A circular arc of the offset boundary: center, radius and the angle
/// interval `[start, start + sweep]` of outward normals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexSector {
    pub center: [f64; 2],
    pub start: f64,
    pub sweep: f64,
}

/// The exact decomposition of `Ω_h` for a convex polygon `Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetBody {
    base: Polygon,
    h: f64,
    /// Outward unit normal of edge `i` (from vertex `i` to `i + 1`).
    normals: Vec<[f64; 2]>,
    sectors: Vec<VertexSector>,
}

impl OffsetBody {
    pub fn new(base: &Polygon, h: f64) -> Result<Self> {
        if !base.is_convex() {
            return Err(Error::InvalidShape("parallel bodies require a convex polygon".into()));
        }
        if !(h >= 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!("offset radius must be >= 0, got {h}")));
        }
        let v = base.vertices();
        let n = v.len();
        let normals: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len = dx.hypot(dy);
                [dy / len, -dx / len]
            })
            .collect();
        let sectors: Vec<VertexSector> = (0..n)
            .map(|i| {
                let prev = normals[(i + n - 1) % n];
                let next = normals[i];
                let cross = prev[0] * next[1] - prev[1] * next[0];
                let dot = prev[0] * next[0] + prev[1] * next[1];
                VertexSector { center: v[i], start: prev[1].atan2(prev[0]), sweep: cross.atan2(dot) }
            })
            .collect();
        let total: f64 = sectors.iter().map(|s| s.sweep).sum();
        if (total - 2.0 * PI).abs() > 1e-12 {
            return Err(Error::InvalidShape(format!("exterior angles sum to {total}, not 2π")));
        }
        Ok(Self { base: base.clone(), h, normals, sectors })
    }

    pub fn base(&self) -> &Polygon {
        &self.base
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn sectors(&self) -> &[VertexSector] {
        &self.sectors
    }

    pub fn edge_normals(&self) -> &[[f64; 2]] {
        &self.normals
    }

    /// The offset edges `(v_i + h n_i, v_{i+1} + h n_i)`.
    pub fn offset_edges(&self) -> Vec<([f64; 2], [f64; 2])> {
        let v = self.base.vertices();
        let n = v.len();
        (0..n)
            .map(|i| {
                let nm = self.normals[i];
                let shift = |p: [f64; 2]| [p[0] + self.h * nm[0], p[1] + self.h * nm[1]];
                (shift(v[i]), shift(v[(i + 1) % n]))
            })
            .collect()
    }

    pub fn interior_integrals(&self) -> Integrals {
        let mut acc = self.base.interior_integrals();
        if self.h == 0.0 {
            return acc;
        }
        let v = self.base.vertices();
        for (i, (p, q)) in self.offset_edges().into_iter().enumerate() {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            acc.accumulate(&quad_integrals([a, p, q, b]));
        }
        for s in &self.sectors {
            acc.accumulate(&sector_integrals(s, self.h));
        }
        acc
    }

    pub fn boundary_integrals(&self) -> Integrals {
        if self.h == 0.0 {
            return self.base.boundary_integrals();
        }
        let mut acc = Integrals::zeros(2);
        for (p, q) in self.offset_edges() {
            acc.accumulate(&segment_integrals(p, q));
        }
        for s in &self.sectors {
            acc.accumulate(&arc_integrals(s, self.h));
        }
        acc
    }

    pub fn moments(&self) -> MomentSummary {
        MomentSummary::from_integrals(&self.interior_integrals(), &self.boundary_integrals())
    }

    /// Distance-based containment: a point lies in `Ω_h` when it is within
    /// `h` of the base polygon.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.base.contains(p) || distance_to_boundary(&self.base, p) <= self.h
    }
}

/// Moments of `Ω_h`. At `h = 0` these are exactly the polygon moments.
pub fn offset_moments(base: &Polygon, h: f64) -> Result<MomentSummary> {
    Ok(OffsetBody::new(base, h)?.moments())
}

fn distance_to_boundary(poly: &Polygon, p: [f64; 2]) -> f64 {
    poly.edges()
        .map(|(a, b)| {
            let d = [b[0] - a[0], b[1] - a[1]];
            let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])).clamp(0.0, 1.0);
            (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
        })
        .fold(f64::INFINITY, f64::min)
}

/// Area moments of a counterclockwise quadrilateral by Green's theorem.
fn quad_integrals(pts: [[f64; 2]; 4]) -> Integrals {
    let (mut a, mut mx, mut my, mut mxx, mut myy, mut mxy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..4 {
        let [x0, y0] = pts[i];
        let [x1, y1] = pts[(i + 1) % 4];
        let c = x0 * y1 - x1 * y0;
        a += c;
        mx += (x0 + x1) * c;
        my += (y0 + y1) * c;
        mxx += (x0 * x0 + x0 * x1 + x1 * x1) * c;
        myy += (y0 * y0 + y0 * y1 + y1 * y1) * c;
        mxy += (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) * c;
    }
    Integrals {
        measure: a / 2.0,
        first: DVector::from_vec(vec![mx / 6.0, my / 6.0]),
        second: DMatrix::from_row_slice(2, 2, &[mxx / 12.0, mxy / 24.0, mxy / 24.0, myy / 12.0]),
    }
}

fn segment_integrals(p: [f64; 2], q: [f64; 2]) -> Integrals {
    let len = (q[0] - p[0]).hypot(q[1] - p[1]);
    let m = |i: usize, j: usize| len * ((p[i] * p[j] + q[i] * q[j]) / 3.0 + (p[i] * q[j] + q[i] * p[j]) / 6.0);
    Integrals {
        measure: len,
        first: DVector::from_vec(vec![len * (p[0] + q[0]) / 2.0, len * (p[1] + q[1]) / 2.0]),
        second: DMatrix::from_row_slice(2, 2, &[m(0, 0), m(0, 1), m(1, 0), m(1, 1)]),
    }
}

/// `∫ (cos φ, sin φ)` and `∫ e eᵀ` over `φ ∈ [φ_0, φ_1]`.
fn angular_moments(s: &VertexSector) -> ([f64; 2], [f64; 3]) {
    let (p0, p1) = (s.start, s.start + s.sweep);
    let first = [p1.sin() - p0.sin(), p0.cos() - p1.cos()];
    let sweep = s.sweep;
    let cc = 0.5 * sweep + 0.25 * ((2.0 * p1).sin() - (2.0 * p0).sin());
    let ss = 0.5 * sweep - 0.25 * ((2.0 * p1).sin() - (2.0 * p0).sin());
    let cs = 0.5 * (p1.sin().powi(2) - p0.sin().powi(2));
    (first, [cc, cs, ss])
}

/// Moments of a measure with local moments `(m, f, S)` about `c`, moved to `c`.
fn shifted(c: [f64; 2], measure: f64, f: [f64; 2], s: [f64; 3]) -> Integrals {
    let local = Integrals {
        measure,
        first: DVector::from_vec(f.to_vec()),
        second: DMatrix::from_row_slice(2, 2, &[s[0], s[1], s[1], s[2]]),
    };
    local.translated(&DVector::from_vec(c.to_vec()))
}

fn sector_integrals(s: &VertexSector, h: f64) -> Integrals {
    let (f, e) = angular_moments(s);
    let r3 = h.powi(3) / 3.0;
    let r4 = h.powi(4) / 4.0;
    shifted(s.center, 0.5 * s.sweep * h * h, [r3 * f[0], r3 * f[1]], [r4 * e[0], r4 * e[1], r4 * e[2]])
}

fn arc_integrals(s: &VertexSector, h: f64) -> Integrals {
    let (f, e) = angular_moments(s);
    let (h2, h3) = (h * h, h * h * h);
    shifted(s.center, s.sweep * h, [h2 * f[0], h2 * f[1]], [h3 * e[0], h3 * e[1], h3 * e[2]])
}

/// `n` Chebyshev–Lobatto points on `[0, 1]`, increasing from 0 to 1.
pub fn chebyshev_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "a Chebyshev–Lobatto grid needs at least two points");
    (0..n).map(|j| 0.5 * (1.0 - (PI * j as f64 / (n - 1) as f64).cos())).collect()
}

/// The default grid: 12 Chebyshev–Lobatto points on `[0, 1]`.
pub fn default_grid() -> Vec<f64> {
    chebyshev_grid(12)
}

/// Least-squares polynomial of degree `N + 2` fitted to `h ↦ J_k(Ω_h)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionFit {
    pub axis: usize,
    pub h: Vec<f64>,
    pub samples: Vec<f64>,
    /// `ĉ_0, …, ĉ_{N+2}` in increasing powers of `h`.
    pub coefficients: Vec<f64>,
    /// `max |fit − sample| / max |sample|`.
    pub residual: f64,
}

impl ExpansionFit {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn evaluate(&self, h: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * h + c)
    }
}

pub fn fit_expansion(base: &Polygon, axis: usize, h_grid: &[f64]) -> Result<ExpansionFit> {
    const DIM: usize = 2;
    if axis >= DIM {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range for a planar body")));
    }
    let degree = DIM + 2;
    let mut sorted = h_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if sorted.len() != h_grid.len() || h_grid.len() < DIM + 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} distinct grid points, got {} distinct of {}",
            DIM + 4,
            sorted.len(),
            h_grid.len()
        )));
    }
    if h_grid.iter().any(|h| !(0.0..=1.0).contains(h)) {
        return Err(Error::InvalidArgument("grid points must lie in [0, 1]".into()));
    }
    let samples = h_grid
        .iter()
        .map(|&h| Ok(OffsetBody::new(base, h)?.interior_integrals().second[(axis, axis)]))
        .collect::<Result<Vec<f64>>>()?;

    let vander = DMatrix::from_fn(h_grid.len(), degree + 1, |r, c| h_grid[r].powi(c as i32));
    let scale = DVector::from_fn(degree + 1, |c, _| 1.0 / vander.column(c).norm());
    let scaled = &vander * DMatrix::from_diagonal(&scale);
    let normal = scaled.transpose() * &scaled;
    let condition = condition_estimate(&normal);
    if !(condition < MAX_FIT_CONDITION) {
        return Err(Error::IllConditioned { what: "expansion fit normal equations".into(), condition });
    }
    let rhs = scaled.transpose() * DVector::from_column_slice(&samples);
    let z = normal
        .cholesky()
        .ok_or_else(|| Error::IllConditioned { what: "expansion fit normal equations".into(), condition })?
        .solve(&rhs);
    let coefficients: Vec<f64> = z.component_mul(&scale).iter().copied().collect();

    let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut fit = ExpansionFit { axis, h: h_grid.to_vec(), samples, coefficients, residual: 0.0 };
    fit.residual =
        fit.h.iter().zip(&fit.samples).map(|(&h, &s)| (fit.evaluate(h) - s).abs()).fold(0.0, f64::max) / peak;
    Ok(fit)
}

/// Coefficients of `h ↦ J_k(B_{R+h}) = ω_N (R+h)^{N+2} / (N+2)` in
/// increasing powers of `h`.
pub fn ball_expansion(dim: usize, radius: f64) -> Vec<f64> {
    let n = dim + 2;
    let lead = unit_ball_volume(dim) / n as f64;
    let mut binom = 1.0;
    (0..=n)
        .map(|j| {
            let c = lead * binom * radius.powi((n - j) as i32);
            binom = binom * (n - j) as f64 / (j + 1) as f64;
            c
        })
        .collect()
}

/// The concavity constant `C = (ω_N / (N+2))^{1/(N+2)}`: the slope of
/// `h ↦ J_k(B_h)^{1/(N+2)}`.
pub fn derivative_constant(dim: usize) -> f64 {
    (unit_ball_volume(dim) / (dim + 2) as f64).powf(1.0 / (dim + 2) as f64)
}

/// Which functional of `Ω_h` a concavity scan examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `J_k(Ω_h)^{1/(N+2)}`.
    AxisMoment(usize),
    /// `|Ω_h|^{1/N}`.
    Volume,
}

impl Functional {
    pub fn exponent(&self, dim: usize) -> f64 {
        match self {
            Functional::AxisMoment(_) => 1.0 / (dim + 2) as f64,
            Functional::Volume => 1.0 / dim as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub functional: Functional,
    pub exponent: f64,
    pub h: Vec<f64>,
    pub g: Vec<f64>,
    /// Second differences at interior grid points, normalised so that on a
    /// uniform grid they equal `g_{j-1} − 2 g_j + g_{j+1}`.
    pub second_differences: Vec<f64>,
    pub max_second_difference: f64,
    pub concave: bool,
    /// `(g(h_1) − g(h_0)) / (h_1 − h_0)`.
    pub forward_difference: f64,
    /// `C` for the axis-moment functional.
    pub derivative_constant: Option<f64>,
    pub derivative_bound_holds: Option<bool>,
}

/// Samples `g(h)` on the grid with `Ω` as given. The moment functional is
/// concave when the origin is the boundary centroid; elsewhere it need not
/// be (a rectangle beside the origin already fails), so callers place the
/// base first.
pub fn concavity_scan(base: &Polygon, functional: Functional, h_grid: &[f64]) -> Result<ConcavityReport> {
    const DIM: usize = 2;
    if h_grid.len() < 3 {
        return Err(Error::InvalidArgument("concavity scan needs at least three grid points".into()));
    }
    if h_grid.windows(2).any(|w| !(w[1] > w[0])) || h_grid[0] < 0.0 {
        return Err(Error::InvalidArgument("grid must be strictly increasing and non-negative".into()));
    }
    if let Functional::AxisMoment(k) = functional {
        if k >= DIM {
            return Err(Error::InvalidArgument(format!("axis {k} out of range for a planar body")));
        }
    }
    let exponent = functional.exponent(DIM);
    let g = h_grid
        .iter()
        .map(|&h| {
            let body = OffsetBody::new(base, h)?;
            let interior = body.interior_integrals();
            let value = match functional {
                Functional::AxisMoment(k) => interior.second[(k, k)],
                Functional::Volume => interior.measure,
            };
            Ok(value.powf(exponent))
        })
        .collect::<Result<Vec<f64>>>()?;
    let second_differences: Vec<f64> = (1..h_grid.len() - 1)
        .map(|j| {
            let (h0, h1, h2) = (h_grid[j - 1], h_grid[j], h_grid[j + 1]);
            let chord = (g[j - 1] * (h2 - h1) + g[j + 1] * (h1 - h0)) / (h2 - h0);
            2.0 * (chord - g[j])
        })
        .collect();
    let max_second_difference = second_differences.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let forward_difference = (g[1] - g[0]) / (h_grid[1] - h_grid[0]);
    let (constant, bound) = match functional {
        Functional::AxisMoment(_) => {
            let c = derivative_constant(DIM);
            (Some(c), Some(forward_difference >= c - CONCAVITY_TOLERANCE))
        }
        Functional::Volume => (None, None),
    };
    Ok(ConcavityReport {
        functional,
        exponent,
        h: h_grid.to_vec(),
        g,
        concave: max_second_difference <= CONCAVITY_TOLERANCE,
        second_differences,
        max_second_difference,
        forward_difference,
        derivative_constant: constant,
        derivative_bound_holds: bound,
    })
}
