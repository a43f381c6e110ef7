//! Unit-ball constants.

use std::f64::consts::PI;

/// Gamma function (Lanczos approximation).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Volume of the unit ball in `R^n`, `π^{n/2} / Γ(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    PI.powf(half) / gamma(half + 1.0)
}

/// Surface measure of the unit sphere in `R^n`, `n ω_n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Radius of the ball with the given `n`-volume.
pub fn equivalent_radius(n: usize, volume: f64) -> f64 {
    (volume / unit_ball_volume(n)).powf(1.0 / n as f64)
}
