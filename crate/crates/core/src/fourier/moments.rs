use nalgebra::{DMatrix, DVector};

use super::FourierBoundary;
use crate::error::{Error, Result};
use crate::geometry::{Integrals, MomentSummary};

/// Panel cap for the doubling loop.
pub const MAX_PANELS: usize = 1 << 17;

const RELATIVE_CHANGE: f64 = 1e-12;

/// Interior and boundary integrals of the region bounded by `fb`, by the
/// periodic trapezoidal rule with `panels` nodes (no refinement).
///
/// Interior moments use the line-integral forms
/// `∫x² dA = ∮ x³/3 dy`, `∫y² dA = -∮ y³/3 dx`, `∫xy dA = ∮ x²y/2 dy`;
/// boundary moments integrate against `|x'(σ)| dσ`. Orientation is handled
/// by the sign of the enclosed area.
pub fn fixed_panel_integrals(fb: &FourierBoundary, panels: usize) -> (Integrals, Integrals) {
    let s = fb.sample(panels);
    let h = 2.0 * std::f64::consts::PI / panels as f64;
    let mut v = [0.0f64; 6];
    let mut b = [0.0f64; 6];
    for j in 0..panels {
        let (x, y, dx, dy) = (s.x[j], s.y[j], s.dx[j], s.dy[j]);
        v[0] += 0.5 * (x * dy - y * dx);
        v[1] += 0.5 * x * x * dy;
        v[2] += -0.5 * y * y * dx;
        v[3] += x * x * x * dy / 3.0;
        v[4] += 0.5 * x * x * y * dy;
        v[5] += -y * y * y * dx / 3.0;
        let speed = dx.hypot(dy);
        b[0] += speed;
        b[1] += x * speed;
        b[2] += y * speed;
        b[3] += x * x * speed;
        b[4] += x * y * speed;
        b[5] += y * y * speed;
    }
    let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
    let pack = |m: [f64; 6], factor: f64| Integrals {
        measure: factor * m[0],
        first: DVector::from_vec(vec![factor * m[1], factor * m[2]]),
        second: DMatrix::from_row_slice(2, 2, &[factor * m[3], factor * m[4], factor * m[4], factor * m[5]]),
    };
    (pack(v, sign * h), pack(b, h))
}

/// [`fixed_panel_integrals`] with panel doubling until every moment changes
/// by less than 1e-12 relative to its natural scale.
pub fn quadrature_integrals(fb: &FourierBoundary, panels: usize) -> Result<(Integrals, Integrals)> {
    fb.validate()?;
    let mut n = panels.max(8 * fb.order()).max(8);
    let mut prev = fixed_panel_integrals(fb, n);
    loop {
        let next_n = 2 * n;
        if next_n > MAX_PANELS {
            let change = relative_change(&prev, &fixed_panel_integrals(fb, n / 2));
            return Err(Error::NotConverged { what: format!("boundary quadrature at {n} panels"), achieved: change });
        }
        let next = fixed_panel_integrals(fb, next_n);
        let change = relative_change(&prev, &next);
        n = next_n;
        prev = next;
        if change < RELATIVE_CHANGE {
            return Ok(prev);
        }
    }
}

fn relative_change(a: &(Integrals, Integrals), b: &(Integrals, Integrals)) -> f64 {
    let one = |p: &Integrals, q: &Integrals| {
        let m = p.measure.abs().max(f64::MIN_POSITIVE);
        let r = (p.second.trace().abs() / m).sqrt().max(p.centroid().norm()).max(f64::MIN_POSITIVE);
        let d0 = (p.measure - q.measure).abs() / m;
        let d1 = (&p.first - &q.first).amax() / (m * r);
        let d2 = (&p.second - &q.second).amax() / (m * r * r);
        d0.max(d1).max(d2)
    };
    one(&a.0, &b.0).max(one(&a.1, &b.1))
}

/// Moment summary of the region bounded by a Fourier curve.
pub fn quadrature_moments(fb: &FourierBoundary, panels: usize) -> Result<MomentSummary> {
    let (interior, boundary) = quadrature_integrals(fb, panels)?;
    Ok(MomentSummary::from_integrals(&interior, &boundary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_circle() {
        let m = quadrature_moments(&FourierBoundary::circle(1.0), 8).unwrap();
        assert!((m.volume - PI).abs() < 1e-13);
        assert!((m.surface - 2.0 * PI).abs() < 1e-13);
        for k in 0..2 {
            assert!((m.i[k] - PI).abs() < 1e-13);
            assert!((m.j[k] - PI / 4.0).abs() < 1e-13);
        }
    }

    #[test]
    fn ellipse() {
        let m = quadrature_moments(&FourierBoundary::ellipse(2.0, 0.5), 8).unwrap();
        assert!((m.volume - PI).abs() < 1e-13);
        assert!((m.j[0] - PI).abs() < 1e-13);
        assert!((m.j[1] - PI / 16.0).abs() < 1e-14);
    }

    #[test]
    fn translated_circle_obeys_parallel_axis() {
        let m = quadrature_moments(&FourierBoundary::circle(1.0).translated(2.0, 0.0), 8).unwrap();
        assert!((m.volume - PI).abs() < 1e-13);
        assert!((m.j[0] - (PI / 4.0 + 4.0 * PI)).abs() < 1e-12);
        assert!((m.volume_centroid[0] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn clockwise_curve_gives_positive_area() {
        let m = quadrature_moments(&FourierBoundary::circle(1.0).reversed(), 8).unwrap();
        assert!((m.volume - PI).abs() < 1e-13);
        assert!((m.j[0] - PI / 4.0).abs() < 1e-13);
    }

    #[test]
    fn shoelace_area_is_parametrization_free() {
        let mut fb = FourierBoundary::ellipse(1.3, 0.9).with_order(4);
        fb.modes[1].x_sin = 0.07;
        fb.modes[3].y_cos = -0.03;
        let m = quadrature_moments(&fb, 8).unwrap();
        assert!((m.volume - fb.signed_area()).abs() < 1e-10 * m.volume);
    }

    #[test]
    fn self_intersecting_curve_is_rejected() {
        let mut fb = FourierBoundary::zeros(2);
        fb.modes[0].x_sin = 1.0;
        fb.modes[1].y_sin = 0.5;
        assert!(quadrature_moments(&fb, 8).is_err());
    }
}
