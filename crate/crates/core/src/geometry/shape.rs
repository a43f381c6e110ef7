use nalgebra::{DMatrix, DVector};

use super::{Ellipsoid, Integrals, MomentSummary, Polygon, SimplicialBody};
use crate::error::{Error, Result};
use crate::fourier::{self, FourierBoundary};

/// Any body the library can measure.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Polygon(Polygon),
    Simplicial(SimplicialBody),
    Ellipsoid(Ellipsoid),
    Fourier(FourierBoundary),
}

/// Starting panel count for Fourier quadrature inside [`Shape`]; doubled
/// until converged.
const FOURIER_PANELS: usize = 64;

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Polygon(_) | Shape::Fourier(_) => 2,
            Shape::Simplicial(b) => b.dim(),
            Shape::Ellipsoid(e) => e.dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Shape::Polygon(_) => "polygon",
            Shape::Simplicial(_) => "simplicial",
            Shape::Ellipsoid(_) => "ellipsoid",
            Shape::Fourier(_) => "fourier",
        }
    }

    pub fn interior_integrals(&self) -> Result<Integrals> {
        match self {
            Shape::Polygon(p) => Ok(p.interior_integrals()),
            Shape::Simplicial(b) => Ok(b.interior_integrals()),
            Shape::Ellipsoid(e) => Ok(e.interior_integrals()),
            Shape::Fourier(f) => Ok(fourier::quadrature_integrals(f, FOURIER_PANELS)?.0),
        }
    }

    pub fn boundary_integrals(&self) -> Result<Integrals> {
        match self {
            Shape::Polygon(p) => Ok(p.boundary_integrals()),
            Shape::Simplicial(b) => Ok(b.boundary_integrals()),
            Shape::Ellipsoid(e) => e.boundary_integrals(),
            Shape::Fourier(f) => Ok(fourier::quadrature_integrals(f, FOURIER_PANELS)?.1),
        }
    }

    pub fn moments(&self) -> Result<MomentSummary> {
        match self {
            Shape::Fourier(f) => fourier::quadrature_moments(f, FOURIER_PANELS),
            _ => Ok(MomentSummary::from_integrals(&self.interior_integrals()?, &self.boundary_integrals()?)),
        }
    }

    /// Volume centroid.
    pub fn volume_centroid(&self) -> Result<DVector<f64>> {
        match self {
            Shape::Ellipsoid(e) => Ok(DVector::from_column_slice(e.center())),
            _ => Ok(self.interior_integrals()?.centroid()),
        }
    }

    /// Centroid of the boundary surface measure.
    pub fn boundary_centroid(&self) -> Result<DVector<f64>> {
        match self {
            Shape::Ellipsoid(e) => Ok(DVector::from_column_slice(e.center())),
            _ => Ok(self.boundary_integrals()?.centroid()),
        }
    }

    /// Second moment of the boundary measure, `∫_∂Ω x xᵀ ds`.
    ///
    /// For ellipsoids this is only needed for its eigenvectors, which are
    /// the coordinate axes; a diagonal placeholder is returned when the
    /// surface integrals themselves are unavailable.
    pub fn boundary_second_moment(&self) -> Result<DMatrix<f64>> {
        match self {
            Shape::Ellipsoid(e) => match e.boundary_integrals() {
                Ok(b) => Ok(b.second),
                Err(Error::Unsupported(_)) => {
                    let c = DVector::from_column_slice(e.center());
                    if c.iter().any(|x| *x != 0.0) {
                        return Err(Error::Unsupported("surface second moment of an off-center ellipsoid".into()));
                    }
                    Ok(DMatrix::from_diagonal(&DVector::from_iterator(e.dim(), e.semi_axes().iter().map(|a| a * a))))
                }
                Err(err) => Err(err),
            },
            _ => Ok(self.boundary_integrals()?.second),
        }
    }

    pub fn translated(&self, t: &DVector<f64>) -> Result<Self> {
        if t.len() != self.dim() {
            return Err(Error::InvalidArgument("translation has wrong dimension".into()));
        }
        Ok(match self {
            Shape::Polygon(p) => Shape::Polygon(p.map_points(|[x, y]| [x + t[0], y + t[1]])?),
            Shape::Simplicial(b) => Shape::Simplicial(b.map_affine(&DMatrix::identity(b.dim(), b.dim()), t)?),
            Shape::Ellipsoid(e) => Shape::Ellipsoid(e.translated(t.as_slice())),
            Shape::Fourier(f) => Shape::Fourier(f.translated(t[0], t[1])),
        })
    }

    /// Image under `x ↦ R x`. Ellipsoids stay axis-aligned, so only the
    /// identity is accepted for them.
    pub fn rotated(&self, r: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim();
        if r.nrows() != n || r.ncols() != n {
            return Err(Error::InvalidArgument("rotation has wrong dimension".into()));
        }
        Ok(match self {
            Shape::Polygon(p) => {
                Shape::Polygon(p.map_points(|[x, y]| [r[(0, 0)] * x + r[(0, 1)] * y, r[(1, 0)] * x + r[(1, 1)] * y])?)
            }
            Shape::Simplicial(b) => Shape::Simplicial(b.map_affine(r, &DVector::zeros(n))?),
            Shape::Ellipsoid(e) => {
                if (r - DMatrix::identity(n, n)).norm() > 1e-12 {
                    return Err(Error::Unsupported("rotating an axis-aligned ellipsoid".into()));
                }
                Shape::Ellipsoid(e.clone())
            }
            Shape::Fourier(f) => Shape::Fourier(f.rotated([[r[(0, 0)], r[(0, 1)]], [r[(1, 0)], r[(1, 1)]]])),
        })
    }

    /// Image under the diagonal map `x_k ↦ t_k x_k`, all `t_k > 0`.
    pub fn scaled_axes(&self, t: &[f64]) -> Result<Self> {
        if t.len() != self.dim() {
            return Err(Error::InvalidArgument("scale vector has wrong dimension".into()));
        }
        if t.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidArgument("scale factors must be positive".into()));
        }
        Ok(match self {
            Shape::Polygon(p) => Shape::Polygon(p.map_points(|[x, y]| [t[0] * x, t[1] * y])?),
            Shape::Simplicial(b) => Shape::Simplicial(
                b.map_affine(&DMatrix::from_diagonal(&DVector::from_column_slice(t)), &DVector::zeros(t.len()))?,
            ),
            Shape::Ellipsoid(e) => Shape::Ellipsoid(e.scaled_axes(t)?),
            Shape::Fourier(f) => Shape::Fourier(f.scaled_axes(t[0], t[1])),
        })
    }

    /// Uniform dilation about the origin.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        self.scaled_axes(&vec![s; self.dim()])
    }

    pub fn is_convex(&self) -> Result<bool> {
        match self {
            Shape::Polygon(p) => Ok(p.is_convex()),
            Shape::Simplicial(b) => Ok(b.is_convex()),
            Shape::Ellipsoid(_) => Ok(true),
            Shape::Fourier(f) => Ok(f.is_convex()),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Shape::Polygon(poly) => poly.contains([p[0], p[1]]),
            Shape::Simplicial(b) => b.contains(p),
            Shape::Ellipsoid(e) => e.contains(p),
            Shape::Fourier(f) => f.contains([p[0], p[1]]),
        }
    }
}

impl From<Polygon> for Shape {
    fn from(p: Polygon) -> Self {
        Shape::Polygon(p)
    }
}

impl From<SimplicialBody> for Shape {
    fn from(b: SimplicialBody) -> Self {
        Shape::Simplicial(b)
    }
}

impl From<Ellipsoid> for Shape {
    fn from(e: Ellipsoid) -> Self {
        Shape::Ellipsoid(e)
    }
}

impl From<FourierBoundary> for Shape {
    fn from(f: FourierBoundary) -> Self {
        Shape::Fourier(f)
    }
}
