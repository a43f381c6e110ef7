//! Stationarity conditions of `4 I_1 I_2` at fixed area in the
//! constant-speed parametrization, and the expansion of the squared speed
//! of a two-harmonic curve.

use std::f64::consts::PI;

use super::{constant_speed_residual, FourierBoundary, FourierMode};
use crate::error::{Error, Result};

/// Speed residual allowed when evaluating the Lagrange system.
pub const LAGRANGE_SPEED_TOLERANCE: f64 = 1e-6;

/// Coefficients of
///
/// ```text
/// |x'(σ)|² = c_0 + c_1 cos 2k_1σ + c_2 sin 2k_1σ + c_3 cos 2k_2σ + c_4 sin 2k_2σ
///          + c_5 cos (k_1-k_2)σ + c_6 cos (k_1+k_2)σ
///          + c_7 sin (k_1-k_2)σ + c_8 sin (k_1+k_2)σ
/// ```
/// for a curve made of harmonics `k_1` and `k_2` only.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TwoModeSpeedCoefficients {
    pub k1: usize,
    pub k2: usize,
    pub c: [f64; 9],
}

impl TwoModeSpeedCoefficients {
    /// Reconstructs `|x'(σ)|²` from the coefficients.
    pub fn speed_squared(&self, sigma: f64) -> f64 {
        let (k1, k2) = (self.k1 as f64, self.k2 as f64);
        let c = &self.c;
        c[0] + c[1] * (2.0 * k1 * sigma).cos()
            + c[2] * (2.0 * k1 * sigma).sin()
            + c[3] * (2.0 * k2 * sigma).cos()
            + c[4] * (2.0 * k2 * sigma).sin()
            + c[5] * ((k1 - k2) * sigma).cos()
            + c[6] * ((k1 + k2) * sigma).cos()
            + c[7] * ((k1 - k2) * sigma).sin()
            + c[8] * ((k1 + k2) * sigma).sin()
    }
}

pub fn two_mode_speed_coefficients(
    k1: usize,
    first: FourierMode,
    k2: usize,
    second: FourierMode,
) -> TwoModeSpeedCoefficients {
    let (p, q) = (k1 as f64, k2 as f64);
    let (a1, a1s, b1, b1s) = (first.x_cos, first.x_sin, first.y_cos, first.y_sin);
    let (a2, a2s, b2, b2s) = (second.x_cos, second.x_sin, second.y_cos, second.y_sin);
    let c = [
        0.5 * p * p * (a1 * a1 + a1s * a1s + b1 * b1 + b1s * b1s)
            + 0.5 * q * q * (a2 * a2 + a2s * a2s + b2 * b2 + b2s * b2s),
        0.5 * p * p * (a1s * a1s + b1s * b1s - a1 * a1 - b1 * b1),
        -p * p * (a1 * a1s + b1 * b1s),
        0.5 * q * q * (b2s * b2s + a2s * a2s - b2 * b2 - a2 * a2),
        -q * q * (a2 * a2s + b2 * b2s),
        p * q * (a1 * a2 + b1 * b2 + a1s * a2s + b1s * b2s),
        p * q * (-a1 * a2 - b1 * b2 + a1s * a2s + b1s * b2s),
        p * q * (a1s * a2 + b1s * b2 - a1 * a2s - b1 * b2s),
        -p * q * (a1 * a2s + b1 * b2s + a1s * a2 + b1s * b2),
    ];
    TwoModeSpeedCoefficients { k1, k2, c }
}

/// `f(t) = (2π² t a² + L²)(2π² t b² + L²) / t`.
pub fn lagrange_f(t: f64, x_energy: f64, y_energy: f64, perimeter: f64) -> f64 {
    let l2 = perimeter * perimeter;
    (2.0 * PI * PI * t * x_energy + l2) * (2.0 * PI * PI * t * y_energy + l2) / t
}

/// Left-hand sides of the stationarity system of
/// `F = L² a² b² - λ Σ k (a_k b'_k - a'_k b_k)` for every harmonic.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LagrangeResiduals {
    pub lambda: f64,
    pub perimeter: f64,
    pub x_energy: f64,
    pub y_energy: f64,
    /// Per harmonic `k = 1..K`: `∂F/∂a_k, ∂F/∂a'_k, ∂F/∂b_k, ∂F/∂b'_k`.
    pub per_mode: Vec<[f64; 4]>,
    /// `M_k = 4a²b²(2π²k²a² + L²)(2π²k²b² + L²) - k²λ²`.
    pub m: Vec<f64>,
    /// `(t, f(t))` for `t = 1..=K²`.
    pub f_samples: Vec<(f64, f64)>,
    /// Euclidean norm of all `per_mode` entries.
    pub norm: f64,
}

impl LagrangeResiduals {
    /// Positive second differences of `f` on consecutive integer samples.
    pub fn f_second_differences(&self) -> Vec<f64> {
        self.f_samples.windows(3).map(|w| w[0].1 - 2.0 * w[1].1 + w[2].1).collect()
    }
}

/// Evaluates the stationarity system with `L, a², b²` taken from the
/// Parseval identities (hence the constant-speed precondition).
pub fn lagrange_system(fb: &FourierBoundary, lambda: f64) -> Result<LagrangeResiduals> {
    let residual = constant_speed_residual(fb);
    if !(residual < LAGRANGE_SPEED_TOLERANCE) {
        return Err(Error::ConstantSpeedRequired { residual, tolerance: LAGRANGE_SPEED_TOLERANCE });
    }
    let weighted: f64 =
        fb.modes.iter().enumerate().map(|(i, m)| ((i + 1) * (i + 1)) as f64 * m.amplitude_squared()).sum();
    let l2 = 2.0 * PI * PI * weighted;
    let perimeter = l2.sqrt();
    let a2: f64 = fb.modes.iter().map(|m| m.x_cos * m.x_cos + m.x_sin * m.x_sin).sum();
    let b2: f64 = fb.modes.iter().map(|m| m.y_cos * m.y_cos + m.y_sin * m.y_sin).sum();

    let mut per_mode = Vec::with_capacity(fb.order());
    let mut m_values = Vec::with_capacity(fb.order());
    for (i, md) in fb.modes.iter().enumerate() {
        let k = (i + 1) as f64;
        let common = 4.0 * PI * PI * k * k * a2 * b2;
        let gx = common + 2.0 * l2 * b2;
        let gy = common + 2.0 * l2 * a2;
        per_mode.push([
            gx * md.x_cos - lambda * k * md.y_sin,
            gx * md.x_sin + lambda * k * md.y_cos,
            gy * md.y_cos + lambda * k * md.x_sin,
            gy * md.y_sin - lambda * k * md.x_cos,
        ]);
        m_values.push(
            4.0 * a2 * b2 * (2.0 * PI * PI * k * k * a2 + l2) * (2.0 * PI * PI * k * k * b2 + l2)
                - k * k * lambda * lambda,
        );
    }
    let norm = per_mode.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let kmax = fb.order().max(2);
    let f_samples = (1..=kmax * kmax).map(|t| (t as f64, lagrange_f(t as f64, a2, b2, perimeter))).collect();
    Ok(LagrangeResiduals { lambda, perimeter, x_energy: a2, y_energy: b2, per_mode, m: m_values, f_samples, norm })
}
