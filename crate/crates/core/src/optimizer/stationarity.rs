//! Post-hoc check of the Lagrange conditions at a constant-speed curve.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{lagrange_system, FourierBoundary, LagrangeResiduals};

/// `|M_k| ≤ ZERO_M_TOLERANCE · k²λ²` counts as `M_k = 0`.
pub const ZERO_M_TOLERANCE: f64 = 1e-6;
/// Harmonics below this fraction of the largest amplitude are inactive.
pub const ACTIVE_MODE_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityReport {
    /// Least-squares multiplier in the `4I + (λ/π)|Ω|` normalisation.
    pub lambda: f64,
    pub residuals: LagrangeResiduals,
    /// Harmonics with non-negligible amplitude.
    pub active_modes: Vec<usize>,
    /// Harmonics with `M_k = 0`.
    pub zero_m_modes: Vec<usize>,
    /// At most two indices satisfy `M_k = 0` and every active mode is among them.
    pub consistent: bool,
}

pub fn stationarity_report(fb: &FourierBoundary) -> Result<StationarityReport> {
    if fb.modes.iter().all(|m| m.amplitude_squared() == 0.0) {
        return Err(Error::Degenerate("all harmonics vanish".into()));
    }
    // the residuals are affine in λ: r(λ) = g − λ h
    let g = lagrange_system(fb, 0.0)?;
    let one = lagrange_system(fb, 1.0)?;
    let (mut gh, mut hh) = (0.0, 0.0);
    for (a, b) in g.per_mode.iter().flatten().zip(one.per_mode.iter().flatten()) {
        let h = a - b;
        gh += a * h;
        hh += h * h;
    }
    let lambda = gh / hh;
    let residuals = lagrange_system(fb, lambda)?;

    let amplitudes: Vec<f64> = fb.modes.iter().map(|m| m.amplitude_squared().sqrt()).collect();
    let largest = amplitudes.iter().cloned().fold(0.0, f64::max);
    let active_modes: Vec<usize> =
        (1..=fb.order()).filter(|&k| amplitudes[k - 1] > ACTIVE_MODE_THRESHOLD * largest).collect();
    let zero_m_modes: Vec<usize> = residuals
        .m
        .iter()
        .enumerate()
        .filter(|(i, m)| {
            let k = (i + 1) as f64;
            m.abs() <= ZERO_M_TOLERANCE * k * k * lambda * lambda
        })
        .map(|(i, _)| i + 1)
        .collect();
    let consistent = zero_m_modes.len() <= 2 && active_modes.iter().all(|k| zero_m_modes.contains(k));
    Ok(StationarityReport { lambda, residuals, active_modes, zero_m_modes, consistent })
}
