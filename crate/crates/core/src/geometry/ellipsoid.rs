use nalgebra::{DMatrix, DVector};

use super::{Integrals, MomentSummary};
use crate::error::{Error, Result};
use crate::fourier::FourierBoundary;
use crate::special::{unit_ball_volume, unit_sphere_area};

/// Axis-aligned ellipsoid `Σ ((x_k - c_k)/a_k)² ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: Vec<f64>,
    semi_axes: Vec<f64>,
}

impl Ellipsoid {
    pub fn new(center: Vec<f64>, semi_axes: Vec<f64>) -> Result<Self> {
        if semi_axes.len() < 2 || center.len() != semi_axes.len() {
            return Err(Error::InvalidShape(format!(
                "ellipsoid needs matching center and semi-axes of length >= 2 (got {} and {})",
                center.len(),
                semi_axes.len()
            )));
        }
        if semi_axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidShape("semi-axes must be finite and positive".into()));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidShape("center must be finite".into()));
        }
        Ok(Self { center, semi_axes })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::new(vec![0.0; dim], vec![radius; dim])
    }

    pub fn dim(&self) -> usize {
        self.semi_axes.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.semi_axes
    }

    /// All semi-axes equal to relative 1e-14.
    pub fn is_ball(&self) -> bool {
        let a0 = self.semi_axes[0];
        self.semi_axes.iter().all(|a| (a - a0).abs() <= 1e-14 * a0)
    }

    /// Volume moments: `|E| = ω_N Π a_i` and `∫ (x_k - c_k)² = |E| a_k² / (N+2)`
    /// about the center, then shifted to the origin.
    pub fn interior_integrals(&self) -> Integrals {
        let n = self.dim();
        let volume = unit_ball_volume(n) * self.semi_axes.iter().product::<f64>();
        let diag = DVector::from_iterator(n, self.semi_axes.iter().map(|a| volume * a * a / (n as f64 + 2.0)));
        let centered = Integrals { measure: volume, first: DVector::zeros(n), second: DMatrix::from_diagonal(&diag) };
        centered.translated(&DVector::from_column_slice(&self.center))
    }

    /// Surface moments. Closed form for balls (`I_k = ω_N R^{N+1}` about the
    /// center); planar ellipses go through Fourier quadrature; other
    /// ellipsoids have no supported surface formula.
    pub fn boundary_integrals(&self) -> Result<Integrals> {
        let n = self.dim();
        if self.is_ball() {
            let r = self.semi_axes[0];
            let surface = unit_sphere_area(n) * r.powi(n as i32 - 1);
            let centered = Integrals {
                measure: surface,
                first: DVector::zeros(n),
                second: DMatrix::identity(n, n) * (unit_ball_volume(n) * r.powi(n as i32 + 1)),
            };
            return Ok(centered.translated(&DVector::from_column_slice(&self.center)));
        }
        if n == 2 {
            let (_, boundary) = crate::fourier::quadrature_integrals(&self.to_fourier()?, 64)?;
            return Ok(boundary);
        }
        Err(Error::Unsupported(format!("surface moments of a non-spherical ellipsoid in dimension {n}")))
    }

    pub fn moments(&self) -> Result<MomentSummary> {
        Ok(MomentSummary::from_integrals(&self.interior_integrals(), &self.boundary_integrals()?))
    }

    /// The planar ellipse as `(c_x + a cos σ, c_y + b sin σ)`.
    pub fn to_fourier(&self) -> Result<FourierBoundary> {
        if self.dim() != 2 {
            return Err(Error::Unsupported("only planar ellipses have a Fourier boundary".into()));
        }
        let mut fb = FourierBoundary::ellipse(self.semi_axes[0], self.semi_axes[1]);
        fb.a0 = 2.0 * self.center[0];
        fb.b0 = 2.0 * self.center[1];
        Ok(fb)
    }

    pub fn translated(&self, t: &[f64]) -> Self {
        Self { center: self.center.iter().zip(t).map(|(c, d)| c + d).collect(), semi_axes: self.semi_axes.clone() }
    }

    /// Image under `x ↦ (t_1 x_1, …, t_N x_N)` with positive `t`.
    pub fn scaled_axes(&self, t: &[f64]) -> Result<Self> {
        Self::new(
            self.center.iter().zip(t).map(|(c, s)| c * s).collect(),
            self.semi_axes.iter().zip(t).map(|(a, s)| a * s).collect(),
        )
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(&self.center).zip(&self.semi_axes).map(|((x, c), a)| ((x - c) / a).powi(2)).sum::<f64>() <= 1.0
    }
}
