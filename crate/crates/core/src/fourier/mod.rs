//! Closed planar curves given by truncated Fourier series
//!
//! ```text
//! x(σ) = a_0/2 + Σ_k (a_k cos kσ + a'_k sin kσ)
//! y(σ) = b_0/2 + Σ_k (b_k cos kσ + b'_k sin kσ)
//! ```
//!
//! with quadrature moments valid in any parametrization, the Parseval
//! identities valid in the constant-speed one, and the formulas describing
//! stationary points of `I_1 I_2` at fixed area.

mod moments;
mod parseval;
mod reparam;
mod stationarity;

pub use moments::{quadrature_integrals, quadrature_moments, MAX_PANELS};
pub use parseval::{constant_speed_residual, parseval_quantities, ParsevalSummary, PARSEVAL_SPEED_TOLERANCE};
pub use reparam::{reparametrize_constant_speed, Reparametrization, REPARAM_TOLERANCE};
pub use stationarity::{
    lagrange_f, lagrange_system, two_mode_speed_coefficients, LagrangeResiduals, TwoModeSpeedCoefficients,
    LAGRANGE_SPEED_TOLERANCE,
};

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Coefficients of one harmonic `k`: `(a_k, a'_k, b_k, b'_k)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct FourierMode {
    pub x_cos: f64,
    pub x_sin: f64,
    pub y_cos: f64,
    pub y_sin: f64,
}

impl FourierMode {
    pub fn amplitude_squared(&self) -> f64 {
        self.x_cos * self.x_cos + self.x_sin * self.x_sin + self.y_cos * self.y_cos + self.y_sin * self.y_sin
    }
}

/// A truncated Fourier boundary; `modes[k - 1]` holds harmonic `k`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FourierBoundary {
    /// Twice the mean of `x(σ)`.
    pub a0: f64,
    /// Twice the mean of `y(σ)`.
    pub b0: f64,
    pub modes: Vec<FourierMode>,
}

/// Point, first and second derivative samples on the uniform grid.
#[derive(Debug, Clone)]
pub struct CurveSamples {
    pub sigma: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub ddx: Vec<f64>,
    pub ddy: Vec<f64>,
}

impl CurveSamples {
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn speed_squared(&self, j: usize) -> f64 {
        self.dx[j] * self.dx[j] + self.dy[j] * self.dy[j]
    }
}

impl FourierBoundary {
    pub fn new(a0: f64, b0: f64, modes: Vec<FourierMode>) -> Result<Self> {
        let fb = Self { a0, b0, modes };
        fb.validate()?;
        Ok(fb)
    }

    /// All coefficients zero up to `order`.
    pub fn zeros(order: usize) -> Self {
        Self { a0: 0.0, b0: 0.0, modes: vec![FourierMode::default(); order] }
    }

    pub fn circle(radius: f64) -> Self {
        Self::ellipse(radius, radius)
    }

    /// `(a cos σ, b sin σ)`.
    pub fn ellipse(a: f64, b: f64) -> Self {
        let mut fb = Self::zeros(1);
        fb.modes[0].x_cos = a;
        fb.modes[0].y_sin = b;
        fb
    }

    /// Least-squares (DFT) fit of `order` harmonics to points sampled at
    /// equally spaced parameter values.
    pub fn from_samples(points: &[[f64; 2]], order: usize) -> Result<Self> {
        let n = points.len();
        if n < 2 * order + 1 {
            return Err(Error::InvalidArgument(format!("{n} samples cannot resolve {order} harmonics")));
        }
        let mut fb = Self::zeros(order);
        let scale = 2.0 / n as f64;
        fb.a0 = scale * points.iter().map(|p| p[0]).sum::<f64>();
        fb.b0 = scale * points.iter().map(|p| p[1]).sum::<f64>();
        for k in 1..=order {
            let mode = &mut fb.modes[k - 1];
            for (j, p) in points.iter().enumerate() {
                let (s, c) = (2.0 * PI * ((k * j) % n) as f64 / n as f64).sin_cos();
                mode.x_cos += p[0] * c;
                mode.x_sin += p[0] * s;
                mode.y_cos += p[1] * c;
                mode.y_sin += p[1] * s;
            }
            mode.x_cos *= scale;
            mode.x_sin *= scale;
            mode.y_cos *= scale;
            mode.y_sin *= scale;
        }
        Ok(fb)
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.modes.len()
    }

    /// Order after dropping trailing all-zero modes.
    pub fn effective_order(&self) -> usize {
        self.modes.iter().rposition(|m| m.amplitude_squared() > 0.0).map_or(0, |i| i + 1)
    }

    /// Point and tangent `(x, y), (dx/dσ, dy/dσ)` by direct summation.
    pub fn evaluate(&self, sigma: f64) -> ([f64; 2], [f64; 2]) {
        let mut p = [self.a0 / 2.0, self.b0 / 2.0];
        let mut t = [0.0, 0.0];
        for (i, m) in self.modes.iter().enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * sigma).sin_cos();
            p[0] += m.x_cos * c + m.x_sin * s;
            p[1] += m.y_cos * c + m.y_sin * s;
            t[0] += k * (m.x_sin * c - m.x_cos * s);
            t[1] += k * (m.y_sin * c - m.y_cos * s);
        }
        (p, t)
    }

    /// Samples on `σ_j = 2πj/n`.
    pub fn sample(&self, n: usize) -> CurveSamples {
        let mut out = CurveSamples {
            sigma: crate::quadrature::periodic_grid(n),
            x: vec![self.a0 / 2.0; n],
            y: vec![self.b0 / 2.0; n],
            dx: vec![0.0; n],
            dy: vec![0.0; n],
            ddx: vec![0.0; n],
            ddy: vec![0.0; n],
        };
        for (i, m) in self.modes.iter().enumerate() {
            if m.amplitude_squared() == 0.0 {
                continue;
            }
            let k = i + 1;
            let kf = k as f64;
            for j in 0..n {
                // reduce kj mod n so the angle stays exact on the grid
                let (s, c) = (2.0 * PI * ((k * j) % n) as f64 / n as f64).sin_cos();
                out.x[j] += m.x_cos * c + m.x_sin * s;
                out.y[j] += m.y_cos * c + m.y_sin * s;
                out.dx[j] += kf * (m.x_sin * c - m.x_cos * s);
                out.dy[j] += kf * (m.y_sin * c - m.y_cos * s);
                out.ddx[j] -= kf * kf * (m.x_cos * c + m.x_sin * s);
                out.ddy[j] -= kf * kf * (m.y_cos * c + m.y_sin * s);
            }
        }
        out
    }

    /// Grid size used for simplicity and convexity scans.
    pub fn scan_points(&self) -> usize {
        (16 * self.order()).max(128)
    }

    /// Closed, simple and cusp-free on the scan grid.
    ///
    /// Simplicity is a segment-intersection scan of the sampled polygon, so
    /// loops smaller than the grid spacing can go unnoticed.
    pub fn validate(&self) -> Result<()> {
        let all =
            [self.a0, self.b0].into_iter().chain(self.modes.iter().flat_map(|m| [m.x_cos, m.x_sin, m.y_cos, m.y_sin]));
        if all.into_iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidShape("non-finite Fourier coefficient".into()));
        }
        if self.effective_order() == 0 {
            return Err(Error::Degenerate("curve is a single point".into()));
        }
        let s = self.sample(self.scan_points());
        let speeds: Vec<f64> = (0..s.len()).map(|j| s.speed_squared(j).sqrt()).collect();
        let max_speed = speeds.iter().cloned().fold(0.0, f64::max);
        if speeds.iter().any(|v| *v <= 1e-8 * max_speed) {
            return Err(Error::InvalidShape("curve has a cusp (vanishing speed)".into()));
        }
        let pts: Vec<[f64; 2]> = (0..s.len()).map(|j| [s.x[j], s.y[j]]).collect();
        let area = polygon_signed_area(&pts);
        let diam = max_speed * 2.0 * PI;
        if area.abs() <= 1e-12 * diam * diam {
            return Err(Error::Degenerate("curve encloses no area".into()));
        }
        if let Some((i, j)) = first_self_intersection(&pts) {
            return Err(Error::InvalidShape(format!(
                "curve self-intersects near σ = {:.4} and σ = {:.4}",
                s.sigma[i], s.sigma[j]
            )));
        }
        Ok(())
    }

    pub fn is_simple(&self) -> bool {
        self.validate().is_ok()
    }

    /// Signed area by the shoelace integral; positive for counterclockwise
    /// curves. Exact for any parametrization.
    pub fn signed_area(&self) -> f64 {
        PI * self
            .modes
            .iter()
            .enumerate()
            .map(|(i, m)| (i + 1) as f64 * (m.x_cos * m.y_sin - m.x_sin * m.y_cos))
            .sum::<f64>()
    }

    /// Copy traversed counterclockwise.
    pub fn counterclockwise(&self) -> Self {
        if self.signed_area() < 0.0 {
            self.reversed()
        } else {
            self.clone()
        }
    }

    /// `σ ↦ -σ`.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        for m in &mut out.modes {
            m.x_sin = -m.x_sin;
            m.y_sin = -m.y_sin;
        }
        out
    }

    /// Simple with curvature of one sign.
    pub fn is_convex(&self) -> bool {
        if !self.is_simple() {
            return false;
        }
        let orient = self.signed_area().signum();
        let s = self.sample(self.scan_points().max(256));
        let curv: Vec<f64> = (0..s.len()).map(|j| orient * (s.dx[j] * s.ddy[j] - s.dy[j] * s.ddx[j])).collect();
        let scale = curv.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        curv.iter().all(|c| *c >= -1e-10 * scale)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        let mut out = self.clone();
        out.a0 += 2.0 * dx;
        out.b0 += 2.0 * dy;
        out
    }

    /// Image under the linear map `r` (row-major 2×2).
    pub fn rotated(&self, r: [[f64; 2]; 2]) -> Self {
        let apply = |x: f64, y: f64| (r[0][0] * x + r[0][1] * y, r[1][0] * x + r[1][1] * y);
        let (a0, b0) = apply(self.a0, self.b0);
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let (x_cos, y_cos) = apply(m.x_cos, m.y_cos);
                let (x_sin, y_sin) = apply(m.x_sin, m.y_sin);
                FourierMode { x_cos, x_sin, y_cos, y_sin }
            })
            .collect();
        Self { a0, b0, modes }
    }

    pub fn scaled_axes(&self, tx: f64, ty: f64) -> Self {
        self.rotated([[tx, 0.0], [0.0, ty]])
    }

    /// Reparametrization `σ ↦ σ + φ`; the point set is unchanged.
    pub fn phase_shifted(&self, phi: f64) -> Self {
        let mut out = self.clone();
        for (i, m) in out.modes.iter_mut().enumerate() {
            let (s, c) = ((i + 1) as f64 * phi).sin_cos();
            let rot = |cc: f64, ss: f64| (cc * c + ss * s, -cc * s + ss * c);
            (m.x_cos, m.x_sin) = rot(m.x_cos, m.x_sin);
            (m.y_cos, m.y_sin) = rot(m.y_cos, m.y_sin);
        }
        out
    }

    /// Same curve with `order` modes (zero padded or truncated).
    pub fn with_order(&self, order: usize) -> Self {
        let mut out = self.clone();
        out.modes.resize(order, FourierMode::default());
        out
    }

    /// Flat coefficient vector `[a_0, b_0, (a_k, a'_k, b_k, b'_k) for k = 1..K]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.a0, self.b0];
        for m in &self.modes {
            v.extend_from_slice(&[m.x_cos, m.x_sin, m.y_cos, m.y_sin]);
        }
        v
    }

    /// Inverse of [`FourierBoundary::to_vec`].
    pub fn from_vec(v: &[f64]) -> Result<Self> {
        if v.len() < 2 || (v.len() - 2) % 4 != 0 {
            return Err(Error::InvalidArgument(format!("coefficient vector of length {}", v.len())));
        }
        let modes =
            v[2..].chunks(4).map(|c| FourierMode { x_cos: c[0], x_sin: c[1], y_cos: c[2], y_sin: c[3] }).collect();
        Ok(Self { a0: v[0], b0: v[1], modes })
    }

    /// Winding-number containment against a fine polygonal approximation.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let s = self.sample((64 * self.order()).max(1024));
        let mut inside = false;
        let n = s.len();
        for i in 0..n {
            let (ax, ay) = (s.x[i], s.y[i]);
            let (bx, by) = (s.x[(i + 1) % n], s.y[(i + 1) % n]);
            if (ay > p[1]) != (by > p[1]) {
                let x = ax + (p[1] - ay) * (bx - ax) / (by - ay);
                if x > p[0] {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Largest distance of a sampled boundary point from `center`.
    pub fn max_radius_about(&self, center: [f64; 2]) -> f64 {
        let s = self.sample(self.scan_points());
        (0..s.len()).map(|j| (s.x[j] - center[0]).hypot(s.y[j] - center[1])).fold(0.0, f64::max)
    }
}

fn polygon_signed_area(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1]).sum::<f64>() / 2.0
}

fn first_self_intersection(pts: &[[f64; 2]]) -> Option<(usize, usize)> {
    let n = pts.len();
    let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let (lo_x, hi_x) = (a[0].min(b[0]), a[0].max(b[0]));
        let (lo_y, hi_y) = (a[1].min(b[1]), a[1].max(b[1]));
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            if c[0].max(d[0]) < lo_x || c[0].min(d[0]) > hi_x || c[1].max(d[1]) < lo_y || c[1].min(d[1]) > hi_y {
                continue;
            }
            let d1 = orient(a, b, c);
            let d2 = orient(a, b, d);
            let d3 = orient(c, d, a);
            let d4 = orient(c, d, b);
            if (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) {
                return Some((i, j));
            }
        }
    }
    None
}
