//! Exact shape representations and their moment functionals.

mod ellipsoid;
mod placement;
mod polygon;
mod shape;
mod simplicial;

pub use ellipsoid::Ellipsoid;
pub use placement::{apply_affinity, canonical_placement, normalize_j, Centering, Placement, PlacementMode};
pub use polygon::Polygon;
pub use shape::Shape;
pub use simplicial::SimplicialBody;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Zeroth, first and second moments of a measure on `R^n`:
/// `∫ dμ`, `∫ x dμ` and `∫ x xᵀ dμ`.
///
/// Used both for the volume measure of a body and for the surface measure of
/// its boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrals {
    pub measure: f64,
    pub first: DVector<f64>,
    pub second: DMatrix<f64>,
}

impl Integrals {
    pub fn zeros(dim: usize) -> Self {
        Self { measure: 0.0, first: DVector::zeros(dim), second: DMatrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    pub fn accumulate(&mut self, other: &Integrals) {
        self.measure += other.measure;
        self.first += &other.first;
        self.second += &other.second;
    }

    pub fn centroid(&self) -> DVector<f64> {
        &self.first / self.measure
    }

    /// Moments of the measure pushed forward by `x ↦ x + t`.
    pub fn translated(&self, t: &DVector<f64>) -> Self {
        let second =
            &self.second + &self.first * t.transpose() + t * self.first.transpose() + t * t.transpose() * self.measure;
        Self { measure: self.measure, first: &self.first + t * self.measure, second }
    }

    /// Moments of the measure pushed forward by `x ↦ R x` with `R` orthogonal.
    pub fn rotated(&self, r: &DMatrix<f64>) -> Self {
        Self { measure: self.measure, first: r * &self.first, second: r * &self.second * r.transpose() }
    }
}

/// All scalar moment functionals of a body.
///
/// `j` holds `J_k = ∫_Ω x_k²`, `i` holds `I_k = ∫_∂Ω x_k² ds`; `inertia` is
/// the volume matrix `∫_Ω x_i x_j` whose diagonal is `j`, and
/// `boundary_inertia` its surface counterpart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub dim: usize,
    pub volume: f64,
    pub surface: f64,
    pub volume_centroid: Vec<f64>,
    pub boundary_centroid: Vec<f64>,
    pub j: Vec<f64>,
    pub i: Vec<f64>,
    pub j0: f64,
    pub i0: f64,
    pub j_product: f64,
    pub i_product: f64,
    pub inertia: Vec<Vec<f64>>,
    pub boundary_inertia: Vec<Vec<f64>>,
    pub det: f64,
}

impl MomentSummary {
    pub fn from_integrals(interior: &Integrals, boundary: &Integrals) -> Self {
        let dim = interior.dim();
        let j: Vec<f64> = (0..dim).map(|k| interior.second[(k, k)]).collect();
        let i: Vec<f64> = (0..dim).map(|k| boundary.second[(k, k)]).collect();
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..dim).map(|r| (0..dim).map(|c| 0.5 * (m[(r, c)] + m[(c, r)])).collect()).collect()
        };
        Self {
            dim,
            volume: interior.measure,
            surface: boundary.measure,
            volume_centroid: interior.centroid().iter().copied().collect(),
            boundary_centroid: boundary.centroid().iter().copied().collect(),
            j0: j.iter().sum(),
            i0: i.iter().sum(),
            j_product: j.iter().product(),
            i_product: i.iter().product(),
            det: interior.second.determinant(),
            inertia: rows(&interior.second),
            boundary_inertia: rows(&boundary.second),
            j,
            i,
        }
    }

    pub fn inertia_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.inertia[r][c])
    }

    pub fn boundary_inertia_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.boundary_inertia[r][c])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_of_integrals_matches_parallel_axis_rule() {
        let mut base = Integrals::zeros(2);
        base.measure = 2.0;
        base.second[(0, 0)] = 1.0;
        base.second[(1, 1)] = 3.0;
        let t = DVector::from_vec(vec![1.0, -2.0]);
        let moved = base.translated(&t);
        assert_eq!(moved.first, DVector::from_vec(vec![2.0, -4.0]));
        assert_eq!(moved.second[(0, 0)], 3.0);
        assert_eq!(moved.second[(1, 1)], 11.0);
        assert_eq!(moved.second[(0, 1)], -4.0);
    }

    #[test]
    fn summary_invariants_hold() {
        let mut v = Integrals::zeros(2);
        v.measure = 1.0;
        v.second = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 3.0]);
        let mut b = Integrals::zeros(2);
        b.measure = 4.0;
        b.second = DMatrix::from_row_slice(2, 2, &[5.0, 0.0, 0.0, 7.0]);
        let s = MomentSummary::from_integrals(&v, &b);
        assert_eq!(s.j, vec![2.0, 3.0]);
        assert_eq!(s.j0, 5.0);
        assert_eq!(s.i_product, 35.0);
        assert!((s.det - 5.75).abs() < 1e-14);
        assert_eq!(s.inertia[0][1], s.inertia[1][0]);
    }
}
