//! Seeded generators of test bodies.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{FourierBoundary, FourierMode};
use crate::geometry::{Polygon, Shape, SimplicialBody};

/// Attempts per shape before a generator gives up.
pub const RETRY_CAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomKind {
    /// Convex hull of 6–40 uniform points in the unit disc.
    ConvexPolygon,
    /// `r(θ) = 1 + Σ_{m=2}^{cap} (α_m cos mθ + β_m sin mθ)`.
    StarFourier,
    /// Kuhn triangulation of the unit cube with jittered vertices.
    SimplicialBoxPerturbation,
}

impl std::str::FromStr for RandomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convex-polygon" => Ok(Self::ConvexPolygon),
            "star-fourier" => Ok(Self::StarFourier),
            "simplicial-box-perturbation" => Ok(Self::SimplicialBoxPerturbation),
            _ => Err(Error::InvalidArgument(format!("unknown random shape kind '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    /// Rescale every shape to area (volume) `π`.
    pub normalize_area: bool,
    /// Star-fourier: highest radial harmonic.
    pub mode_cap: usize,
    /// Star-fourier: each `α_m, β_m` is uniform in `±amplitude / (cap − 1)`,
    /// so `|r − 1| ≤ 2·amplitude`.
    pub amplitude: f64,
    /// Star-fourier: keep only convex (`Some(true)`) or nonconvex
    /// (`Some(false)`) curves.
    pub convex: Option<bool>,
    /// Simplicial box: dimension of the cube.
    pub dim: usize,
    /// Simplicial box: per-coordinate vertex jitter.
    pub perturbation: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self { normalize_area: false, mode_cap: 6, amplitude: 0.3, convex: None, dim: 3, perturbation: 0.05 }
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` shapes of one kind; identical for identical seeds.
pub fn generate(kind: RandomKind, seed: u64, count: usize, params: &RandomParams) -> Result<Vec<Shape>> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| -> Result<Shape> {
            let shape: Shape = match kind {
                RandomKind::ConvexPolygon => convex_polygon(&mut rng)?.into(),
                RandomKind::StarFourier => star_fourier(&mut rng, params)?.into(),
                RandomKind::SimplicialBoxPerturbation => {
                    simplicial_box(&mut rng, params.dim, params.perturbation)?.into()
                }
            };
            if params.normalize_area {
                let volume = shape.interior_integrals()?.measure;
                shape.scaled((PI / volume).powf(1.0 / shape.dim() as f64))
            } else {
                Ok(shape)
            }
        })
        .collect()
}

/// Andrew's monotone chain; returns the hull counterclockwise without
/// collinear points.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

pub fn convex_polygon<R: Rng>(rng: &mut R) -> Result<Polygon> {
    for _ in 0..RETRY_CAP {
        let n = rng.gen_range(6..=40);
        let points: Vec<[f64; 2]> = (0..n)
            .map(|_| {
                let r = rng.gen::<f64>().sqrt();
                let t = rng.gen_range(0.0..2.0 * PI);
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        let hull = convex_hull(&points);
        if hull.len() < 3 {
            continue;
        }
        if let Ok(p) = Polygon::new(hull) {
            if p.is_convex() && p.area() > 1e-3 {
                return Ok(p);
            }
        }
    }
    Err(Error::InvalidShape(format!("no valid convex polygon after {RETRY_CAP} attempts")))
}

/// Cartesian Fourier coefficients of the polar curve
/// `r(θ) = 1 + Σ_m (α_m cos mθ + β_m sin mθ)`, exactly.
pub fn polar_to_fourier(alpha: &[f64], beta: &[f64]) -> FourierBoundary {
    // alpha[i], beta[i] belong to harmonic m = i + 2
    let cap = alpha.len() + 1;
    let mut fb = FourierBoundary::circle(1.0).with_order(cap + 1);
    for (i, (&a, &b)) in alpha.iter().zip(beta).enumerate() {
        let m = i + 2;
        // r cos θ: cos mθ cos θ = ½[cos(m+1)θ + cos(m−1)θ], sin mθ cos θ = ½[sin(m+1)θ + sin(m−1)θ]
        // r sin θ: cos mθ sin θ = ½[sin(m+1)θ − sin(m−1)θ], sin mθ sin θ = ½[cos(m−1)θ − cos(m+1)θ]
        let up: &mut FourierMode = &mut fb.modes[m];
        up.x_cos += 0.5 * a;
        up.x_sin += 0.5 * b;
        up.y_sin += 0.5 * a;
        up.y_cos -= 0.5 * b;
        let down = &mut fb.modes[m - 2];
        down.x_cos += 0.5 * a;
        down.x_sin += 0.5 * b;
        down.y_sin -= 0.5 * a;
        down.y_cos += 0.5 * b;
    }
    fb
}

pub fn star_fourier<R: Rng>(rng: &mut R, params: &RandomParams) -> Result<FourierBoundary> {
    if params.mode_cap < 2 {
        return Ok(FourierBoundary::circle(1.0));
    }
    if !(0.0..0.5).contains(&params.amplitude) {
        return Err(Error::InvalidArgument(format!("amplitude must lie in [0, 0.5), got {}", params.amplitude)));
    }
    let count = params.mode_cap - 1;
    let bound = params.amplitude / count as f64;
    for _ in 0..RETRY_CAP {
        let alpha: Vec<f64> = (0..count).map(|_| rng.gen_range(-bound..=bound)).collect();
        let beta: Vec<f64> = (0..count).map(|_| rng.gen_range(-bound..=bound)).collect();
        let fb = polar_to_fourier(&alpha, &beta);
        if fb.validate().is_err() {
            continue;
        }
        match params.convex {
            Some(want) if fb.is_convex() != want => continue,
            _ => return Ok(fb),
        }
    }
    Err(Error::InvalidShape(format!("no admissible star-shaped curve after {RETRY_CAP} attempts")))
}

/// The Kuhn triangulation of `[0,1]^N`: one simplex per permutation.
pub fn kuhn_cube(dim: usize) -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
    let vertices = (0..1usize << dim).map(|i| (0..dim).map(|k| ((i >> k) & 1) as f64).collect()).collect();
    let mut simplices = Vec::new();
    let mut perm: Vec<usize> = (0..dim).collect();
    permutations(&mut perm, 0, &mut |p| {
        let mut idx = 0usize;
        let mut s = vec![0];
        for &axis in p {
            idx |= 1 << axis;
            s.push(idx);
        }
        simplices.push(s);
    });
    (vertices, simplices)
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, visit);
        p.swap(k, i);
    }
}

pub fn simplicial_box<R: Rng>(rng: &mut R, dim: usize, perturbation: f64) -> Result<SimplicialBody> {
    if !(2..=6).contains(&dim) {
        return Err(Error::InvalidArgument(format!("box dimension must be 2..=6, got {dim}")));
    }
    let (base, simplices) = kuhn_cube(dim);
    for _ in 0..RETRY_CAP {
        let vertices: Vec<Vec<f64>> =
            base.iter().map(|v| v.iter().map(|c| c + rng.gen_range(-perturbation..=perturbation)).collect()).collect();
        if let Ok(body) = SimplicialBody::from_simplices(vertices, simplices.clone()) {
            return Ok(body);
        }
    }
    Err(Error::InvalidShape(format!("no valid perturbed box after {RETRY_CAP} attempts")))
}
