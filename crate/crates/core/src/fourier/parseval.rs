use std::f64::consts::PI;

use super::FourierBoundary;
use crate::error::{Error, Result};

/// Largest speed residual for which the Parseval identities are applied.
pub const PARSEVAL_SPEED_TOLERANCE: f64 = 1e-8;

/// Perimeter, area and boundary moments from the coefficients alone.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ParsevalSummary {
    pub perimeter: f64,
    pub area: f64,
    pub i1: f64,
    pub i2: f64,
    /// `Σ (a_k² + a'_k²)`.
    pub x_energy: f64,
    /// `Σ (b_k² + b'_k²)`.
    pub y_energy: f64,
}

/// `max_σ | |x'(σ)|² - mean | / mean` over a `16K`-point grid.
pub fn constant_speed_residual(fb: &FourierBoundary) -> f64 {
    let s = fb.sample((16 * fb.order()).max(64));
    let q: Vec<f64> = (0..s.len()).map(|j| s.speed_squared(j)).collect();
    let mean = q.iter().sum::<f64>() / q.len() as f64;
    q.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean
}

/// Parseval identities of a constant-speed curve:
///
/// ```text
/// L² = 2π² Σ k² (a_k² + a'_k² + b_k² + b'_k²)
/// |Ω| = π Σ k (a_k b'_k - a'_k b_k)
/// I_1 = (L/2)(a_0²/2 + a²),   I_2 = (L/2)(b_0²/2 + b²)
/// ```
pub fn parseval_quantities(fb: &FourierBoundary) -> Result<ParsevalSummary> {
    let residual = constant_speed_residual(fb);
    if !(residual < PARSEVAL_SPEED_TOLERANCE) {
        return Err(Error::ConstantSpeedRequired { residual, tolerance: PARSEVAL_SPEED_TOLERANCE });
    }
    let weighted: f64 =
        fb.modes.iter().enumerate().map(|(i, m)| ((i + 1) * (i + 1)) as f64 * m.amplitude_squared()).sum();
    let perimeter = (2.0 * PI * PI * weighted).sqrt();
    let x_energy: f64 = fb.modes.iter().map(|m| m.x_cos * m.x_cos + m.x_sin * m.x_sin).sum();
    let y_energy: f64 = fb.modes.iter().map(|m| m.y_cos * m.y_cos + m.y_sin * m.y_sin).sum();
    Ok(ParsevalSummary {
        perimeter,
        area: fb.signed_area(),
        i1: perimeter / 2.0 * (fb.a0 * fb.a0 / 2.0 + x_energy),
        i2: perimeter / 2.0 * (fb.b0 * fb.b0 / 2.0 + y_energy),
        x_energy,
        y_energy,
    })
}
