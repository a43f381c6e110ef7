//! Minimisation of `I(Ω) = I_1 I_2` over Fourier boundaries of fixed area.
//!
//! The coefficients are optimised in the general parametrization by an
//! augmented Lagrangian
//!
//! ```text
//! Φ = I_1 I_2 + w_s P_speed + w_c |c_∂Ω|² − ν (|Ω| − A) + (ρ/2)(|Ω| − A)²
//! ```
//!
//! whose inner problems are solved by BFGS. `P_speed` penalises a
//! non-constant speed (it removes the reparametrization null space) and the
//! centroid term pins the boundary centroid at the origin. The gauge
//! `a_0 = b_0 = a'_1 = b_1 = 0` removes rigid motions and phase shifts.

mod gradient;
mod stationarity;

pub use gradient::{boundary_product, default_panels, objective_gradient, projected_gradient};
pub use stationarity::{stationarity_report, StationarityReport};

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierBoundary;
use crate::random::{star_fourier, RandomParams};
use gradient::{dot, Tables};

/// Coordinates of `a_0, b_0, a'_1, b_1` in [`FourierBoundary::to_vec`].
pub const GAUGE_INDICES: [usize; 4] = [0, 1, 3, 4];

/// Relative change of the augmented objective treated as roundoff.
const NOISE_FLOOR: f64 = 1e-14;
const ARMIJO: f64 = 1e-4;
const MIN_FLAT_STEP: f64 = 0.125;
/// A stalled line search still counts as converged below this multiple of
/// the gradient tolerance.
const STALL_ALLOWANCE: f64 = 100.0;
const MAX_BACKTRACKS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationProblem {
    /// Number of harmonics `K ≥ 2`.
    pub order: usize,
    pub target_area: f64,
    pub speed_weight: f64,
    pub centroid_weight: f64,
    /// Initial quadratic penalty `ρ`.
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub max_penalty: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Bound on the Lagrangian gradient norm.
    pub gradient_tolerance: f64,
    /// Bound on `| |Ω| − A | / A`.
    pub area_tolerance: f64,
}

impl Default for OptimizationProblem {
    fn default() -> Self {
        Self {
            order: 8,
            target_area: PI,
            speed_weight: 1.0,
            centroid_weight: 1.0,
            initial_penalty: 10.0,
            penalty_growth: 10.0,
            max_penalty: 1e8,
            max_outer: 40,
            max_inner: 3000,
            gradient_tolerance: 1e-8,
            area_tolerance: 1e-10,
        }
    }
}

impl OptimizationProblem {
    pub fn with_order(order: usize) -> Self {
        Self { order, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::InvalidArgument(format!("order must be at least 2, got {}", self.order)));
        }
        if !(self.target_area > 0.0) {
            return Err(Error::InvalidArgument(format!("target area must be positive, got {}", self.target_area)));
        }
        if !(self.initial_penalty > 0.0) || !(self.penalty_growth >= 1.0) {
            return Err(Error::InvalidArgument("penalty schedule must be positive and non-decreasing".into()));
        }
        Ok(())
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub outer: usize,
    /// `I_1 I_2`.
    pub objective: f64,
    /// `I_1 I_2 (A / |Ω|)³`, the objective of the rescaled shape of area `A`.
    pub normalized_objective: f64,
    /// The augmented Lagrangian at the current multiplier and penalty.
    pub augmented: f64,
    /// `(|Ω| − A) / A`.
    pub area_residual: f64,
    pub speed_penalty: f64,
    /// Norm of the Lagrangian gradient over the free coefficients.
    pub gradient_norm: f64,
    /// Multiplier in the normalisation `4I + (λ/π)|Ω|`, i.e. `λ = 4πν`.
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "reason")]
pub enum Verdict {
    Converged,
    MaxIterations,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationTrace {
    pub records: Vec<TraceRecord>,
    pub final_boundary: FourierBoundary,
    pub verdict: Verdict,
    pub objective: f64,
    pub area: f64,
    pub lambda: f64,
    /// Standard deviation of `|x(σ)|` relative to its mean.
    pub radius_std: f64,
}

impl OptimizationTrace {
    pub fn converged(&self) -> bool {
        self.verdict == Verdict::Converged
    }
}

/// Rotates, reorients and phase-shifts `fb` so that `a'_1 = b_1 = 0`,
/// `a_1 > 0`, and translates it so that `a_0 = b_0 = 0`.
pub fn apply_gauge(fb: &FourierBoundary) -> Result<FourierBoundary> {
    let mut fb = fb.counterclockwise();
    fb.a0 = 0.0;
    fb.b0 = 0.0;
    let m = fb.modes.first().copied().unwrap_or_default();
    let mat = Matrix2::new(m.x_cos, m.x_sin, m.y_cos, m.y_sin);
    let svd = mat.svd(true, true);
    let (mut u, mut v) = (svd.u.expect("requested"), svd.v_t.expect("requested").transpose());
    if svd.singular_values[0] <= 0.0 {
        return Err(Error::Degenerate("first harmonic vanishes; rotation gauge undefined".into()));
    }
    // make both factors proper rotations; this may flip the sign of b'_1
    if v.determinant() < 0.0 {
        v.set_column(1, &(-v.column(1)));
        u.set_column(1, &(-u.column(1)));
    }
    if u.determinant() < 0.0 {
        u.set_column(1, &(-u.column(1)));
    }
    let r = u.transpose();
    let rotated = fb.rotated([[r[(0, 0)], r[(0, 1)]], [r[(1, 0)], r[(1, 1)]]]);
    // σ ↦ σ + φ multiplies the mode-1 matrix on the right by [[c, −s], [s, c]]
    let phi = v[(1, 0)].atan2(v[(0, 0)]);
    let mut out = rotated.phase_shifted(phi);
    out.modes[0].x_sin = 0.0;
    out.modes[0].y_cos = 0.0;
    Ok(out)
}

/// A circle of radius one plus a random radial perturbation with
/// `|r − 1| ≤ amplitude`, as a boundary of the given order.
pub fn perturbed_circle<R: Rng>(rng: &mut R, order: usize, amplitude: f64) -> Result<FourierBoundary> {
    let params = RandomParams { mode_cap: order.saturating_sub(1), amplitude: amplitude / 2.0, ..Default::default() };
    Ok(star_fourier(rng, &params)?.with_order(order))
}

struct Augmented<'a> {
    tables: &'a Tables,
    problem: &'a OptimizationProblem,
    free: Vec<usize>,
    template: Vec<f64>,
}

struct Point {
    x: DVector<f64>,
    value: f64,
    grad: DVector<f64>,
    eval: gradient::Evaluation,
}

impl Augmented<'_> {
    fn full(&self, x: &DVector<f64>) -> Vec<f64> {
        let mut v = self.template.clone();
        for (i, &idx) in self.free.iter().enumerate() {
            v[idx] = x[i];
        }
        v
    }

    fn smooth_part(&self, e: &gradient::Evaluation) -> (f64, Vec<f64>) {
        let p = self.problem;
        let value = e.product() + p.speed_weight * e.speed_penalty + p.centroid_weight * e.centroid_penalty;
        let gp = e.grad_product();
        let grad = (0..gp.len())
            .map(|i| gp[i] + p.speed_weight * e.grad_speed[i] + p.centroid_weight * e.grad_centroid[i])
            .collect();
        (value, grad)
    }

    /// `None` when the coefficients do not describe a simple curve.
    fn point(&self, x: DVector<f64>, nu: f64, rho: f64) -> Option<Point> {
        let v = self.full(&x);
        let fb = FourierBoundary::from_vec(&v).ok()?;
        if fb.validate().is_err() || fb.signed_area() <= 0.0 {
            return None;
        }
        let eval = self.tables.evaluate(&v);
        let (smooth, grad) = self.smooth_part(&eval);
        let c = eval.area - self.problem.target_area;
        let value = smooth - nu * c + 0.5 * rho * c * c;
        let factor = rho * c - nu;
        let grad =
            DVector::from_iterator(self.free.len(), self.free.iter().map(|&i| grad[i] + factor * eval.grad_area[i]));
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return None;
        }
        Some(Point { x, value, grad, eval })
    }

    fn least_squares_multiplier(&self, e: &gradient::Evaluation) -> f64 {
        let (_, grad) = self.smooth_part(e);
        let g: Vec<f64> = self.free.iter().map(|&i| grad[i]).collect();
        let a: Vec<f64> = self.free.iter().map(|&i| e.grad_area[i]).collect();
        dot(&g, &a) / dot(&a, &a)
    }
}

enum InnerOutcome {
    Converged,
    Stalled,
    MaxIterations,
}

/// Minimises `I_1 I_2` at fixed area from `initial`, which is first
/// truncated or padded to the problem's order, gauged, and rescaled to the
/// target area.
pub fn minimize_i(initial: &FourierBoundary, problem: &OptimizationProblem) -> Result<OptimizationTrace> {
    problem.validate()?;
    initial.validate()?;
    let start = apply_gauge(&initial.with_order(problem.order))?;
    start.validate()?;
    let scale = (problem.target_area / start.signed_area()).sqrt();
    let start = start.scaled_axes(scale, scale);

    let tables = Tables::new(problem.order, default_panels(problem.order));
    let template = start.to_vec();
    let free: Vec<usize> = (0..template.len()).filter(|i| !GAUGE_INDICES.contains(i)).collect();
    let aug = Augmented { tables: &tables, problem, free, template };
    let x0 = DVector::from_iterator(aug.free.len(), aug.free.iter().map(|&i| aug.template[i]));

    let first = tables.evaluate(&aug.template);
    let mut nu = aug.least_squares_multiplier(&first);
    let mut rho = problem.initial_penalty;
    let mut current = aug
        .point(x0, nu, rho)
        .ok_or_else(|| Error::InvalidShape("initial curve is not simple after gauging".into()))?;
    let mut records = Vec::new();
    let mut iteration = 0;
    let mut record = |p: &Point, outer: usize, nu: f64, iteration: usize| {
        let e = &p.eval;
        records.push(TraceRecord {
            iteration,
            outer,
            objective: e.product(),
            normalized_objective: e.product() * (problem.target_area / e.area).powi(3),
            augmented: p.value,
            area_residual: (e.area - problem.target_area) / problem.target_area,
            speed_penalty: e.speed_penalty,
            gradient_norm: p.grad.norm(),
            lambda: 4.0 * PI * nu,
        });
    };
    record(&current, 0, nu, iteration);

    let mut verdict = Verdict::MaxIterations;
    let mut prev_violation = f64::INFINITY;
    let mut idle_rounds = 0;
    for outer in 0..problem.max_outer {
        let before = iteration;
        let outcome = bfgs(&aug, &mut current, nu, rho, problem, &mut |p| {
            iteration += 1;
            record(p, outer, nu, iteration);
        });
        let c = current.eval.area - problem.target_area;
        let violation = c.abs() / problem.target_area;
        let grad_ok = match outcome {
            InnerOutcome::Converged => true,
            InnerOutcome::Stalled => current.grad.norm() <= STALL_ALLOWANCE * problem.gradient_tolerance,
            InnerOutcome::MaxIterations => false,
        };
        if violation <= problem.area_tolerance && grad_ok {
            verdict = Verdict::Converged;
            break;
        }
        idle_rounds = if iteration == before { idle_rounds + 1 } else { 0 };
        let stalled = matches!(outcome, InnerOutcome::Stalled) && !grad_ok;
        if stalled && (violation <= problem.area_tolerance || idle_rounds >= 2) {
            verdict = Verdict::Failed(format!("line search stalled at gradient norm {:.3e}", current.grad.norm()));
            break;
        }
        nu -= rho * c;
        // once the constraint holds to tolerance the residual is roundoff;
        // a larger penalty would only amplify it in the gradient
        if violation > problem.area_tolerance && violation > 0.25 * prev_violation {
            rho = (rho * problem.penalty_growth).min(problem.max_penalty);
        }
        prev_violation = violation;
        current = aug.point(current.x.clone(), nu, rho).expect("current iterate stays admissible");
        record(&current, outer + 1, nu, iteration);
    }

    let final_boundary = FourierBoundary::from_vec(&aug.full(&current.x))?;
    Ok(OptimizationTrace {
        objective: current.eval.product(),
        area: current.eval.area,
        lambda: 4.0 * PI * nu,
        radius_std: radius_std(&final_boundary),
        final_boundary,
        verdict,
        records,
    })
}

/// BFGS on the augmented Lagrangian at fixed `(ν, ρ)`, with backtracking
/// that rejects non-simple curves.
fn bfgs(
    aug: &Augmented<'_>,
    current: &mut Point,
    nu: f64,
    rho: f64,
    problem: &OptimizationProblem,
    on_accept: &mut impl FnMut(&Point),
) -> InnerOutcome {
    let n = current.x.len();
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut scaled = false;
    for _ in 0..problem.max_inner {
        if current.grad.norm() <= problem.gradient_tolerance {
            return InnerOutcome::Converged;
        }
        let mut dir = -(&h * &current.grad);
        let mut slope = dir.dot(&current.grad);
        if slope >= 0.0 {
            h = DMatrix::identity(n, n);
            dir = -current.grad.clone();
            slope = dir.dot(&current.grad);
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            if let Some(trial) = aug.point(&current.x + &dir * t, nu, rho) {
                let armijo = trial.value <= current.value + ARMIJO * t * slope;
                // at roundoff level Armijo is unreliable: accept a reasonably
                // long step that changes the value only within roundoff and
                // along which the objective is still descending (approximate
                // Wolfe)
                let flat = t >= MIN_FLAT_STEP
                    && trial.value <= current.value + NOISE_FLOOR * current.value.abs()
                    && trial.grad.dot(&dir) <= -0.1 * slope;
                if armijo || flat {
                    accepted = Some(trial);
                    break;
                }
            }
            t *= 0.5;
        }
        let Some(next) = accepted else {
            return InnerOutcome::Stalled;
        };
        let s = &next.x - &current.x;
        let y = &next.grad - &current.grad;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if !scaled {
                h = DMatrix::identity(n, n) * (sy / y.dot(&y));
                scaled = true;
            }
            let r = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // H ← (I − r s yᵀ) H (I − r y sᵀ) + r s sᵀ
            h += (&s * s.transpose()) * (r * r * yhy + r) - (&hy * s.transpose() + &s * hy.transpose()) * r;
        }
        *current = next;
        on_accept(current);
    }
    InnerOutcome::MaxIterations
}

/// Relative standard deviation of `|x(σ)|` on a uniform grid.
pub fn radius_std(fb: &FourierBoundary) -> f64 {
    let s = fb.sample(fb.scan_points().max(512));
    let r: Vec<f64> = (0..s.len()).map(|j| s.x[j].hypot(s.y[j])).collect();
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    let var = r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / r.len() as f64;
    var.sqrt() / mean
}

/// Independent runs from several starting curves, in parallel; results keep
/// the order of `initials`.
pub fn multi_start(initials: &[FourierBoundary], problem: &OptimizationProblem) -> Vec<Result<OptimizationTrace>> {
    initials.par_iter().map(|fb| minimize_i(fb, problem)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng_from_seed;

    #[test]
    fn gauge_zeroes_the_pinned_coefficients() {
        let fb = FourierBoundary::ellipse(1.5, 0.7)
            .with_order(3)
            .rotated([[0.6, -0.8], [0.8, 0.6]])
            .phase_shifted(0.4)
            .translated(0.3, -0.2);
        let g = apply_gauge(&fb).unwrap();
        for i in GAUGE_INDICES {
            assert_eq!(g.to_vec()[i], 0.0);
        }
        assert!((g.modes[0].x_cos - 1.5).abs() < 1e-12);
        assert!((g.modes[0].y_sin - 0.7).abs() < 1e-12);
        assert!((g.signed_area() - fb.signed_area()).abs() < 1e-12);
    }

    #[test]
    fn circle_is_a_fixed_point() {
        let trace = minimize_i(&FourierBoundary::circle(1.0), &OptimizationProblem::default()).unwrap();
        assert!(trace.converged());
        assert!(trace.records[0].gradient_norm < 1e-6);
        assert!((trace.objective - PI * PI).abs() < 1e-6);
        assert!((trace.lambda - 12.0 * PI * PI).abs() < 1e-6 * 12.0 * PI * PI);
    }

    #[test]
    fn second_harmonic_perturbation_relaxes_to_the_disc() {
        let mut fb = FourierBoundary::circle(1.0).with_order(8);
        fb.modes[1].x_cos = 0.1;
        let trace = minimize_i(&fb, &OptimizationProblem::default()).unwrap();
        assert!(trace.converged(), "{:?}", trace.verdict);
        assert!(trace.objective <= PI * PI * (1.0 + 1e-3));
        assert!(trace.radius_std < 1e-3);
        assert!(((trace.area - PI) / PI).abs() < 1e-8);
    }

    #[test]
    fn perturbed_circles_are_simple() {
        let mut rng = rng_from_seed(9);
        for _ in 0..5 {
            let fb = perturbed_circle(&mut rng, 8, 0.2).unwrap();
            assert_eq!(fb.order(), 8);
            assert!(fb.is_simple());
        }
    }
}
