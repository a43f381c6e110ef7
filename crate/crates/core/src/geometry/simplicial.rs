use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::{Integrals, MomentSummary};
use crate::error::{Error, Result};

/// A body in `R^N` given as a union of `N`-simplices, with its boundary as
/// outward-oriented `(N-1)`-simplices.
///
/// A facet `(v_0, …, v_{N-1})` is outward when `det[v_0 - o, …, v_{N-1} - o]`
/// is positive for the opposite vertex `o` of its adjacent simplex, so the
/// facet cones from any interior point carry positive volume.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialBody {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Vec<usize>>,
    facets: Vec<Vec<usize>>,
}

impl SimplicialBody {
    /// Validates a mesh whose facets are already oriented.
    pub fn new(vertices: Vec<Vec<f64>>, simplices: Vec<Vec<usize>>, facets: Vec<Vec<usize>>) -> Result<Self> {
        let body = Self::unchecked(vertices, simplices, facets)?;
        body.validate()?;
        Ok(body)
    }

    /// Builds the body from its simplices alone. Boundary facets are the
    /// faces used by exactly one simplex; they are oriented outward.
    pub fn from_simplices(vertices: Vec<Vec<f64>>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen: HashMap<Vec<usize>, (usize, Vec<usize>, usize)> = HashMap::new();
        for (s_idx, s) in simplices.iter().enumerate() {
            for omit in 0..s.len() {
                let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != omit).map(|(_, &v)| v).collect();
                let mut key = face.clone();
                key.sort_unstable();
                seen.entry(key).and_modify(|e| e.0 += 1).or_insert((1, face, s_idx));
            }
        }
        let mut boundary: Vec<(Vec<usize>, Vec<usize>)> =
            seen.into_iter().filter(|(_, (count, _, _))| *count == 1).map(|(key, (_, face, _))| (key, face)).collect();
        boundary.sort();
        let facets = boundary.into_iter().map(|(_, f)| f).collect();
        let mut body = Self::unchecked(vertices, simplices, facets)?;
        for f in 0..body.facets.len() {
            let (_, opposite) = body.adjacent_simplex(f)?;
            if body.facet_orientation(f, opposite) < 0.0 {
                body.facets[f].swap(0, 1);
            }
        }
        body.validate()?;
        Ok(body)
    }

    /// `[0,1]^3` split into six tetrahedra along the main diagonal.
    pub fn unit_cube() -> Self {
        let vertices: Vec<Vec<f64>> =
            (0..8).map(|i| vec![(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]).collect();
        let mut simplices = Vec::new();
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let mut idx = 0usize;
            let mut s = vec![0];
            for axis in perm {
                idx |= 1 << axis;
                s.push(idx);
            }
            simplices.push(s);
        }
        Self::from_simplices(vertices, simplices).expect("cube mesh is valid")
    }

    /// The simplex with vertices `0, e_1, …, e_N`.
    pub fn standard_simplex(dim: usize) -> Self {
        let mut vertices = vec![vec![0.0; dim]];
        for k in 0..dim {
            let mut v = vec![0.0; dim];
            v[k] = 1.0;
            vertices.push(v);
        }
        Self::from_simplices(vertices, vec![(0..=dim).collect()]).expect("standard simplex is valid")
    }

    fn unchecked(vertices: Vec<Vec<f64>>, simplices: Vec<Vec<usize>>, facets: Vec<Vec<usize>>) -> Result<Self> {
        let dim = vertices.first().map(Vec::len).unwrap_or(0);
        if dim < 2 {
            return Err(Error::InvalidShape("simplicial body needs dimension >= 2".into()));
        }
        if vertices.iter().any(|v| v.len() != dim || v.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidShape("vertex coordinates are ragged or non-finite".into()));
        }
        if simplices.is_empty() {
            return Err(Error::InvalidShape("simplicial body has no simplices".into()));
        }
        let nv = vertices.len();
        for s in &simplices {
            if s.len() != dim + 1 || s.iter().any(|&i| i >= nv) {
                return Err(Error::InvalidShape(format!("bad simplex {s:?}")));
            }
        }
        for f in &facets {
            if f.len() != dim || f.iter().any(|&i| i >= nv) {
                return Err(Error::InvalidShape(format!("bad facet {f:?}")));
            }
        }
        Ok(Self { dim, vertices, simplices, facets })
    }

    fn validate(&self) -> Result<()> {
        let scale = self.scale();
        let vol_tol = 1e-13 * scale.powi(self.dim as i32);
        let mut total = 0.0;
        for (idx, s) in self.simplices.iter().enumerate() {
            let v = self.signed_simplex_volume(s);
            if v.abs() <= vol_tol {
                return Err(Error::Degenerate(format!("simplex {idx} has zero volume")));
            }
            total += v.abs();
        }
        if self.facets.is_empty() {
            return Err(Error::InvalidShape("simplicial body has no boundary facets".into()));
        }
        let mut ridges: std::collections::BTreeMap<Vec<usize>, usize> = Default::default();
        for f in &self.facets {
            for skip in 0..f.len() {
                let mut r: Vec<usize> = f.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &v)| v).collect();
                r.sort_unstable();
                *ridges.entry(r).or_default() += 1;
            }
        }
        if let Some((r, n)) = ridges.iter().find(|(_, &n)| n != 2) {
            return Err(Error::InvalidShape(format!("boundary is not closed: ridge {r:?} bounds {n} facets")));
        }
        let mut surface = 0.0;
        let mut cone = 0.0;
        for f in 0..self.facets.len() {
            let (_, opposite) = self.adjacent_simplex(f)?;
            if self.facet_orientation(f, opposite) <= 0.0 {
                return Err(Error::InvalidShape(format!("facet {f} is not oriented outward")));
            }
            surface += self.facet_measure(&self.facets[f]);
            cone += self.origin_cone_volume(&self.facets[f]);
        }
        if surface <= 0.0 {
            return Err(Error::Degenerate("boundary has zero measure".into()));
        }
        if (cone - total).abs() > 1e-9 * total.max(vol_tol) {
            return Err(Error::InvalidShape(format!(
                "boundary does not enclose the simplices (cone volume {cone}, simplex volume {total})"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    fn scale(&self) -> f64 {
        self.vertices.iter().flatten().fold(0.0f64, |a, c| a.max(c.abs())).max(f64::MIN_POSITIVE)
    }

    fn point(&self, i: usize) -> DVector<f64> {
        DVector::from_column_slice(&self.vertices[i])
    }

    fn signed_simplex_volume(&self, s: &[usize]) -> f64 {
        let v0 = self.point(s[0]);
        let m = DMatrix::from_fn(self.dim, self.dim, |r, c| self.vertices[s[c + 1]][r] - v0[r]);
        m.determinant() / factorial(self.dim)
    }

    fn origin_cone_volume(&self, f: &[usize]) -> f64 {
        let m = DMatrix::from_fn(self.dim, self.dim, |r, c| self.vertices[f[c]][r]);
        m.determinant() / factorial(self.dim)
    }

    fn facet_measure(&self, f: &[usize]) -> f64 {
        let n = self.dim - 1;
        let v0 = self.point(f[0]);
        let e = DMatrix::from_fn(self.dim, n, |r, c| self.vertices[f[c + 1]][r] - v0[r]);
        let gram = e.transpose() * &e;
        gram.determinant().max(0.0).sqrt() / factorial(n)
    }

    /// The simplex containing facet `f` and its vertex not on `f`.
    fn adjacent_simplex(&self, f: usize) -> Result<(usize, usize)> {
        let face = &self.facets[f];
        for (si, s) in self.simplices.iter().enumerate() {
            if face.iter().all(|v| s.contains(v)) {
                let opposite = *s.iter().find(|v| !face.contains(v)).expect("simplex has N+1 vertices");
                return Ok((si, opposite));
            }
        }
        Err(Error::InvalidShape(format!("facet {f} does not bound any simplex")))
    }

    fn facet_orientation(&self, f: usize, opposite: usize) -> f64 {
        let o = self.point(opposite);
        let face = &self.facets[f];
        let m = DMatrix::from_fn(self.dim, self.dim, |r, c| self.vertices[face[c]][r] - o[r]);
        m.determinant()
    }

    /// Exact moments of a simplex of intrinsic dimension `n` with measure
    /// `measure`: `∫ x x_ᵀ = measure/((n+1)(n+2)) (Σ v vᵀ + S Sᵀ)` with
    /// `S = Σ v`.
    fn simplex_integrals(&self, idx: &[usize], measure: f64) -> Integrals {
        let n = idx.len() - 1;
        let mut sum = DVector::zeros(self.dim);
        let mut outer = DMatrix::zeros(self.dim, self.dim);
        for &i in idx {
            let v = self.point(i);
            outer += &v * v.transpose();
            sum += v;
        }
        let second = (outer + &sum * sum.transpose()) * (measure / ((n + 1) * (n + 2)) as f64);
        Integrals { measure, first: sum * (measure / (n + 1) as f64), second }
    }

    pub fn interior_integrals(&self) -> Integrals {
        let mut acc = Integrals::zeros(self.dim);
        for s in &self.simplices {
            let vol = self.signed_simplex_volume(s).abs();
            acc.accumulate(&self.simplex_integrals(s, vol));
        }
        acc
    }

    pub fn boundary_integrals(&self) -> Integrals {
        let mut acc = Integrals::zeros(self.dim);
        for f in &self.facets {
            let m = self.facet_measure(f);
            acc.accumulate(&self.simplex_integrals(f, m));
        }
        acc
    }

    pub fn moments(&self) -> MomentSummary {
        MomentSummary::from_integrals(&self.interior_integrals(), &self.boundary_integrals())
    }

    /// Applies `x ↦ A x + b`. Orientation is restored when `det A < 0`.
    pub fn map_affine(&self, a: &DMatrix<f64>, b: &DVector<f64>) -> Result<Self> {
        let vertices =
            self.vertices.iter().map(|v| (a * DVector::from_column_slice(v) + b).iter().copied().collect()).collect();
        let mut simplices = self.simplices.clone();
        let mut facets = self.facets.clone();
        if a.determinant() < 0.0 {
            for s in &mut simplices {
                s.swap(0, 1);
            }
            for f in &mut facets {
                f.swap(0, 1);
            }
        }
        Self::new(vertices, simplices, facets)
    }

    /// Every vertex lies on the inner side of every facet hyperplane.
    pub fn is_convex(&self) -> bool {
        let tol = 1e-10 * self.scale();
        for (fi, f) in self.facets.iter().enumerate() {
            let Some(normal) = self.outward_normal(fi) else { return false };
            let p0 = self.point(f[0]);
            for v in &self.vertices {
                let d = (DVector::from_column_slice(v) - &p0).dot(&normal);
                if d > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Unit outward normal of facet `f` (cofactor expansion).
    fn outward_normal(&self, f: usize) -> Option<DVector<f64>> {
        let face = &self.facets[f];
        let n = self.dim;
        let p0 = self.point(face[0]);
        let e = DMatrix::from_fn(n, n - 1, |r, c| self.vertices[face[c + 1]][r] - p0[r]);
        let mut normal = DVector::zeros(n);
        for i in 0..n {
            let minor = e.clone().remove_row(i);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            normal[i] = sign * minor.determinant();
        }
        let len = normal.norm();
        if len == 0.0 {
            return None;
        }
        normal /= len;
        let (_, opposite) = self.adjacent_simplex(f).ok()?;
        if (self.point(opposite) - p0).dot(&normal) > 0.0 {
            normal = -normal;
        }
        Some(normal)
    }

    /// Point containment by barycentric test against every simplex.
    pub fn contains(&self, p: &[f64]) -> bool {
        let x = DVector::from_column_slice(p);
        self.simplices.iter().any(|s| {
            let v0 = self.point(s[0]);
            let m = DMatrix::from_fn(self.dim, self.dim, |r, c| self.vertices[s[c + 1]][r] - v0[r]);
            match m.lu().solve(&(&x - v0)) {
                Some(lambda) => {
                    let sum: f64 = lambda.iter().sum();
                    lambda.iter().all(|&l| l >= 0.0) && sum <= 1.0
                }
                None => false,
            }
        })
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for v in &self.vertices {
            for k in 0..self.dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_tetrahedron() {
        let m = SimplicialBody::standard_simplex(3).moments();
        assert!((m.volume - 1.0 / 6.0).abs() < 1e-15);
        assert!((m.j[0] - 1.0 / 60.0).abs() < 1e-15);
        // three unit right triangles and one equilateral of side √2
        let surface = 1.5 + 3f64.sqrt() / 2.0;
        assert!((m.surface - surface).abs() < 1e-14);
    }

    #[test]
    fn unit_cube_from_six_tetrahedra() {
        let cube = SimplicialBody::unit_cube();
        assert_eq!(cube.facets().len(), 12);
        let m = cube.moments();
        assert!((m.volume - 1.0).abs() < 1e-14);
        for k in 0..3 {
            assert!((m.j[k] - 1.0 / 3.0).abs() < 1e-14);
        }
        assert!((m.surface - 6.0).abs() < 1e-14);
        // two faces contribute ∫x² = 0 and 1, four faces contribute 1/3 each
        assert!((m.i[0] - (1.0 + 4.0 / 3.0)).abs() < 1e-14);
        assert!(cube.is_convex());
    }

    #[test]
    fn mirror_image_has_equal_moments() {
        let cube = SimplicialBody::unit_cube();
        let mut a = DMatrix::identity(3, 3);
        a[(0, 0)] = -1.0;
        let mirrored = cube.map_affine(&a, &DVector::zeros(3)).unwrap();
        let (m1, m2) = (cube.moments(), mirrored.moments());
        assert!((m1.volume - m2.volume).abs() < 1e-15);
        for k in 0..3 {
            assert!((m1.j[k] - m2.j[k]).abs() < 1e-15);
            assert!((m1.i[k] - m2.i[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_simplex_is_rejected() {
        let vertices = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        assert!(matches!(SimplicialBody::from_simplices(vertices, vec![vec![0, 1, 2]]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn inward_facet_is_rejected() {
        let body = SimplicialBody::standard_simplex(2);
        let mut facets = body.facets().to_vec();
        facets[0].swap(0, 1);
        let err = SimplicialBody::new(body.vertices().to_vec(), body.simplices().to_vec(), facets);
        assert!(matches!(err, Err(Error::InvalidShape(_))));
    }

    #[test]
    fn open_boundary_is_rejected() {
        let body = SimplicialBody::standard_simplex(3);
        let facets = body.facets()[1..].to_vec();
        let err = SimplicialBody::new(body.vertices().to_vec(), body.simplices().to_vec(), facets);
        assert!(err.is_err());
    }

    #[test]
    fn two_dimensional_triangle_matches_polygon_formula() {
        let m = SimplicialBody::standard_simplex(2).moments();
        assert!((m.volume - 0.5).abs() < 1e-15);
        assert!((m.j[0] - 1.0 / 12.0).abs() < 1e-15);
        assert!((m.surface - (2.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn containment() {
        let cube = SimplicialBody::unit_cube();
        assert!(cube.contains(&[0.2, 0.7, 0.4]));
        assert!(!cube.contains(&[1.2, 0.5, 0.5]));
    }
}
