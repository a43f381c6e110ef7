use nalgebra::{DMatrix, DVector};

use super::{Integrals, MomentSummary};
use crate::error::{Error, Result};

/// A simple polygon, stored counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
}

impl Polygon {
    /// Validates the vertex list and reorders it counterclockwise.
    ///
    /// Simplicity is assumed, not checked.
    pub fn new(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidShape(format!("polygon needs at least 3 vertices, got {}", vertices.len())));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidShape("polygon has a non-finite coordinate".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::InvalidShape(format!("consecutive vertices {i} and {} coincide", (i + 1) % n)));
            }
        }
        let area = signed_area(&vertices);
        let scale = vertices.iter().flatten().fold(0.0f64, |acc, c| acc.max(c.abs())).max(f64::MIN_POSITIVE);
        if area.abs() <= 1e-14 * scale * scale {
            return Err(Error::Degenerate("polygon has zero signed area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(p, q)| (q[0] - p[0]).hypot(q[1] - p[1])).sum()
    }

    /// Regular `n`-gon with the given circumradius, first vertex on the
    /// positive x-axis.
    pub fn regular(n: usize, circumradius: f64) -> Result<Self> {
        let verts = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                [circumradius * t.cos(), circumradius * t.sin()]
            })
            .collect();
        Self::new(verts)
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Self::new(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    /// Convex when every turn is a left turn or straight, with at least one
    /// strict left turn.
    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        let scale = self.perimeter();
        let mut strict = 0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if cross < -1e-12 * scale * scale {
                return false;
            }
            if cross > 1e-12 * scale * scale {
                strict += 1;
            }
        }
        strict > 0
    }

    pub fn map_points(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> Result<Self> {
        Self::new(self.vertices.iter().map(|&p| f(p)).collect())
    }

    /// Area moments by Green's theorem, edge by edge.
    pub fn interior_integrals(&self) -> Integrals {
        let (mut a, mut mx, mut my, mut mxx, mut myy, mut mxy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for ([x0, y0], [x1, y1]) in self.edges() {
            let c = x0 * y1 - x1 * y0;
            a += c;
            mx += (x0 + x1) * c;
            my += (y0 + y1) * c;
            mxx += (x0 * x0 + x0 * x1 + x1 * x1) * c;
            myy += (y0 * y0 + y0 * y1 + y1 * y1) * c;
            mxy += (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) * c;
        }
        Integrals {
            measure: a / 2.0,
            first: DVector::from_vec(vec![mx / 6.0, my / 6.0]),
            second: DMatrix::from_row_slice(2, 2, &[mxx / 12.0, mxy / 24.0, mxy / 24.0, myy / 12.0]),
        }
    }

    /// Arc-length moments of the boundary; each is exact on a segment.
    pub fn boundary_integrals(&self) -> Integrals {
        let (mut s, mut mx, mut my, mut mxx, mut myy, mut mxy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for ([x0, y0], [x1, y1]) in self.edges() {
            let len = (x1 - x0).hypot(y1 - y0);
            s += len;
            mx += len * (x0 + x1) / 2.0;
            my += len * (y0 + y1) / 2.0;
            mxx += len * (x0 * x0 + x0 * x1 + x1 * x1) / 3.0;
            myy += len * (y0 * y0 + y0 * y1 + y1 * y1) / 3.0;
            mxy += len * (2.0 * x0 * y0 + x0 * y1 + x1 * y0 + 2.0 * x1 * y1) / 6.0;
        }
        Integrals {
            measure: s,
            first: DVector::from_vec(vec![mx, my]),
            second: DMatrix::from_row_slice(2, 2, &[mxx, mxy, mxy, myy]),
        }
    }

    pub fn moments(&self) -> MomentSummary {
        MomentSummary::from_integrals(&self.interior_integrals(), &self.boundary_integrals())
    }

    /// Even-odd point containment.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if x > p[0] {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        / 2.0
}
