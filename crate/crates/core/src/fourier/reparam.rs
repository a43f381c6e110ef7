use std::f64::consts::PI;

use super::{constant_speed_residual, FourierBoundary};
use crate::error::{Error, Result};

/// Residual a reparametrization must reach to count as constant speed.
pub const REPARAM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Reparametrization {
    pub boundary: FourierBoundary,
    /// [`constant_speed_residual`] of `boundary`.
    pub residual: f64,
}

impl Reparametrization {
    pub fn converged(&self) -> bool {
        self.residual < REPARAM_TOLERANCE
    }

    /// The boundary, or an error carrying the achieved residual.
    pub fn into_result(self) -> Result<FourierBoundary> {
        if self.converged() {
            Ok(self.boundary)
        } else {
            Err(Error::NotConverged {
                what: format!("constant-speed reparametrization with {} modes", self.boundary.order()),
                achieved: self.residual,
            })
        }
    }
}

/// Resamples the curve at equal arc length and projects onto `order`
/// harmonics, so that `σ` becomes proportional to arc length.
///
/// The arc-length function is integrated spectrally from the speed's
/// Fourier series and inverted by safeguarded Newton iteration. The result
/// is returned even when the truncated series misses
/// [`REPARAM_TOLERANCE`]; check [`Reparametrization::converged`].
pub fn reparametrize_constant_speed(fb: &FourierBoundary, order: usize) -> Result<Reparametrization> {
    if order == 0 {
        return Err(Error::InvalidArgument("reparametrization needs at least one mode".into()));
    }
    fb.validate()?;
    let n = (32 * fb.order()).max(16 * order).max(2048);
    let samples = fb.sample(n);
    let speed: Vec<f64> = (0..n).map(|j| samples.speed_squared(j).sqrt()).collect();

    // speed(σ) = c_0/2 + Σ (c_m cos mσ + d_m sin mσ)
    let mean = speed.iter().sum::<f64>() / n as f64;
    let mut cos_c = Vec::new();
    let mut sin_c = Vec::new();
    for m in 1..n / 2 {
        let (mut c, mut d) = (0.0, 0.0);
        for (j, v) in speed.iter().enumerate() {
            let (s, co) = (2.0 * PI * ((m * j) % n) as f64 / n as f64).sin_cos();
            c += v * co;
            d += v * s;
        }
        cos_c.push(2.0 * c / n as f64);
        sin_c.push(2.0 * d / n as f64);
    }
    let significant =
        cos_c.iter().zip(&sin_c).rposition(|(c, d)| c.abs().max(d.abs()) > 1e-17 * mean).map_or(0, |i| i + 1);
    cos_c.truncate(significant);
    sin_c.truncate(significant);
    let length = 2.0 * PI * mean;

    let arc = |sigma: f64| -> f64 {
        let mut s = mean * sigma;
        for (i, (c, d)) in cos_c.iter().zip(&sin_c).enumerate() {
            let m = (i + 1) as f64;
            let (sn, cs) = (m * sigma).sin_cos();
            s += (c * sn + d * (1.0 - cs)) / m;
        }
        s
    };
    let speed_at = |sigma: f64| -> f64 {
        let (_, t) = fb.evaluate(sigma);
        t[0].hypot(t[1])
    };

    let mut points = Vec::with_capacity(n);
    let mut lower = 0.0;
    for j in 0..n {
        let target = length * j as f64 / n as f64;
        let (mut lo, mut hi) = (lower, 2.0 * PI);
        let mut sigma = 2.0 * PI * j as f64 / n as f64;
        sigma = sigma.clamp(lo, hi);
        for _ in 0..60 {
            let f = arc(sigma) - target;
            if f > 0.0 {
                hi = sigma;
            } else {
                lo = sigma;
            }
            let mut next = sigma - f / speed_at(sigma);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - sigma).abs();
            sigma = next;
            if step < 1e-15 {
                break;
            }
        }
        lower = sigma;
        points.push(fb.evaluate(sigma).0);
    }

    let boundary = FourierBoundary::from_samples(&points, order)?;
    let residual = constant_speed_residual(&boundary);
    Ok(Reparametrization { boundary, residual })
}
