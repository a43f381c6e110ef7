use nalgebra::{DMatrix, DVector};

use super::Shape;
use crate::error::{Error, Result};
use crate::linalg::closest_diagonalizing_rotation;

/// Which centroid is moved to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// `∫_Ω x dx = 0`.
    Volume,
    /// `∫_∂Ω x ds = 0`.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacementMode {
    pub centering: Centering,
    /// Also rotate so the boundary second-moment matrix becomes diagonal.
    pub rotate: bool,
}

impl PlacementMode {
    pub const VOLUME: Self = Self { centering: Centering::Volume, rotate: false };
    pub const BOUNDARY: Self = Self { centering: Centering::Boundary, rotate: false };
    pub const BOUNDARY_PRINCIPAL: Self = Self { centering: Centering::Boundary, rotate: true };
}

/// The rigid motion `x ↦ R (x + t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub translation: DVector<f64>,
    pub rotation: DMatrix<f64>,
}

impl Placement {
    pub fn identity(dim: usize) -> Self {
        Self { translation: DVector::zeros(dim), rotation: DMatrix::identity(dim, dim) }
    }

    pub fn apply(&self, shape: &Shape) -> Result<Shape> {
        shape.translated(&self.translation)?.rotated(&self.rotation)
    }

    pub fn apply_point(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.rotation * (x + &self.translation)
    }
}

/// Moves the chosen centroid to the origin and, if requested, rotates the
/// body so that `∫_∂Ω x_k x_j ds = 0` for `k ≠ j`.
///
/// Among the diagonalizing rotations the one closest to the identity is
/// returned, which makes the result deterministic for symmetric bodies.
pub fn canonical_placement(shape: &Shape, mode: PlacementMode) -> Result<(Shape, Placement)> {
    let centroid = match mode.centering {
        Centering::Volume => shape.volume_centroid()?,
        Centering::Boundary => shape.boundary_centroid()?,
    };
    let translation = -centroid;
    let centered = shape.translated(&translation)?;
    let n = shape.dim();
    let rotation = if mode.rotate {
        let second = centered.boundary_second_moment()?;
        closest_diagonalizing_rotation(&second)
    } else {
        DMatrix::identity(n, n)
    };
    let placed = centered.rotated(&rotation)?;
    Ok((placed, Placement { translation, rotation }))
}

/// The diagonal affinity `x_k ↦ t_k x_k`. Moments transform as
/// `J_k ↦ t_k² (Π t_j) J_k`.
pub fn apply_affinity(shape: &Shape, t: &[f64]) -> Result<Shape> {
    shape.scaled_axes(t)
}

/// Volume-preserving affinity that equalizes the axis moments:
/// `t_k² = J^{1/N} / J_k`. Returns the scale factors and the image.
pub fn normalize_j(shape: &Shape) -> Result<(Vec<f64>, Shape)> {
    let interior = shape.interior_integrals()?;
    let n = shape.dim();
    let j: Vec<f64> = (0..n).map(|k| interior.second[(k, k)]).collect();
    if j.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Degenerate("an axis moment vanishes".into()));
    }
    // geometric mean in log space keeps the product of t exactly balanced
    let log_mean = j.iter().map(|v| v.ln()).sum::<f64>() / n as f64;
    let t: Vec<f64> = j.iter().map(|v| (0.5 * (log_mean - v.ln())).exp()).collect();
    let image = shape.scaled_axes(&t)?;
    Ok((t, image))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ellipsoid, Polygon};
    use std::f64::consts::PI;

    fn square() -> Shape {
        Polygon::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap().into()
    }

    #[test]
    fn translated_square_is_recentered() {
        let moved = square().translated(&DVector::from_vec(vec![5.0, 7.0])).unwrap();
        let (placed, p) = canonical_placement(&moved, PlacementMode::BOUNDARY_PRINCIPAL).unwrap();
        assert!((p.translation[0] + 5.0).abs() < 1e-12);
        assert!((p.translation[1] + 7.0).abs() < 1e-12);
        assert!((p.rotation.clone() - DMatrix::identity(2, 2)).norm() < 1e-12);
        let c = placed.boundary_centroid().unwrap();
        assert!(c.norm() < 1e-12 * 2.0);
    }

    #[test]
    fn rotated_rectangle_is_realigned() {
        let th = PI / 6.0;
        let (s, c) = th.sin_cos();
        let rect = Polygon::rectangle(-2.0, 2.0, -0.5, 0.5)
            .unwrap()
            .map_points(|[x, y]| [c * x - s * y + 0.3, s * x + c * y - 1.1])
            .unwrap();
        let (placed, p) = canonical_placement(&rect.into(), PlacementMode::BOUNDARY_PRINCIPAL).unwrap();
        let m = placed.moments().unwrap();
        assert!(m.boundary_inertia[0][1].abs() < 1e-10 * m.i0);
        assert!((p.rotation.determinant() - 1.0).abs() < 1e-12);
        // long axis back on x
        assert!(m.i[0] > m.i[1]);
    }

    #[test]
    fn disc_placement_uses_identity_rotation() {
        let disc: Shape = Ellipsoid::new(vec![3.0, -2.0], vec![1.0, 1.0]).unwrap().into();
        let (_, p) = canonical_placement(&disc, PlacementMode::BOUNDARY_PRINCIPAL).unwrap();
        assert!((p.rotation - DMatrix::identity(2, 2)).norm() < 1e-12);
        assert_eq!(p.translation, DVector::from_vec(vec![-3.0, 2.0]));
    }

    #[test]
    fn placement_reproduces_transform() {
        let tri: Shape = Polygon::new(vec![[0.0, 0.0], [3.0, 0.5], [1.0, 2.0]]).unwrap().into();
        let (placed, p) = canonical_placement(&tri, PlacementMode::BOUNDARY_PRINCIPAL).unwrap();
        let again = p.apply(&tri).unwrap();
        assert_eq!(placed, again);
    }

    #[test]
    fn affinity_of_square() {
        let rect = apply_affinity(&square(), &[2.0, 0.5]).unwrap();
        let m = rect.moments().unwrap();
        assert!((m.j[0] - 16.0 / 3.0).abs() < 1e-13);
        assert!((m.j[1] - 1.0 / 3.0).abs() < 1e-14);
        assert!((m.j_product - 16.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn unit_affinity_is_identity() {
        assert_eq!(apply_affinity(&square(), &[1.0, 1.0]).unwrap(), square());
    }

    #[test]
    fn nonpositive_scale_is_rejected() {
        assert!(apply_affinity(&square(), &[1.0, 0.0]).is_err());
        assert!(apply_affinity(&square(), &[-1.0, -1.0]).is_err());
    }

    #[test]
    fn normalize_rectangle_to_square() {
        let rect = apply_affinity(&square(), &[2.0, 0.5]).unwrap();
        let (t, image) = normalize_j(&rect).unwrap();
        assert!((t[0] - 0.5).abs() < 1e-14 && (t[1] - 2.0).abs() < 1e-14);
        let m = image.moments().unwrap();
        assert!((m.j[0] - 4.0 / 3.0).abs() < 1e-13);
        assert!((m.j[1] - 4.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn normalize_ellipse_to_disc() {
        let e: Shape = Ellipsoid::new(vec![0.0, 0.0], vec![2.0, 0.5]).unwrap().into();
        let (t, image) = normalize_j(&e).unwrap();
        assert!((t[0] - 0.5).abs() < 1e-14 && (t[1] - 2.0).abs() < 1e-14);
        match image {
            Shape::Ellipsoid(d) => assert!(d.is_ball()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn normalize_ball_is_trivial() {
        let b: Shape = Ellipsoid::ball(3, 1.3).unwrap().into();
        let (t, _) = normalize_j(&b).unwrap();
        assert!(t.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }
}
