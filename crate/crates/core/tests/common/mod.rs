//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the library's moment code: containment, boundary
//! sampling and quadrature are reimplemented from the raw shape data.
#![allow(dead_code)]

use std::f64::consts::PI;

use isomoment::geometry::{Ellipsoid, Polygon, SimplicialBody};
use isomoment::FourierBoundary;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `ω_N` by the recurrence `ω_N = 2π/N · ω_{N−2}`.
pub fn ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * ball_volume(n - 2),
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// `|value − exact| ≤ k·se`, with a relative floor for zero-variance
    /// estimators.
    pub fn agrees(&self, exact: f64, k: f64) -> bool {
        (self.value - exact).abs() <= k * self.se + 1e-12 * exact.abs().max(1e-300)
    }
}

struct Accumulator {
    sum: f64,
    sum_sq: f64,
}

impl Accumulator {
    fn new() -> Self {
        Self { sum: 0.0, sum_sq: 0.0 }
    }

    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn finish(&self, n: usize, scale: f64) -> Estimate {
        let nf = n as f64;
        let mean = self.sum / nf;
        let var = (self.sum_sq / nf - mean * mean).max(0.0);
        Estimate { value: scale * mean, se: scale * (var / nf).sqrt() }
    }
}

/// Monte Carlo estimates of `|Ω|` and `J_k` (interior) or `|∂Ω|` and `I_k`
/// (boundary).
#[derive(Debug, Clone)]
pub struct MomentEstimates {
    pub measure: Estimate,
    pub second: Vec<Estimate>,
}

/// Hit-or-miss integration over the box `[lo, hi]`.
pub fn mc_interior(
    rng: &mut ChaCha8Rng,
    lo: &[f64],
    hi: &[f64],
    samples: usize,
    contains: impl Fn(&[f64]) -> bool,
) -> MomentEstimates {
    let n = lo.len();
    let box_volume: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let mut measure = Accumulator::new();
    let mut second: Vec<Accumulator> = (0..n).map(|_| Accumulator::new()).collect();
    let mut p = vec![0.0; n];
    for _ in 0..samples {
        for k in 0..n {
            p[k] = rng.gen_range(lo[k]..hi[k]);
        }
        let hit = contains(&p);
        measure.push(f64::from(u8::from(hit)));
        for k in 0..n {
            second[k].push(if hit { p[k] * p[k] } else { 0.0 });
        }
    }
    MomentEstimates {
        measure: measure.finish(samples, box_volume),
        second: second.iter().map(|a| a.finish(samples, box_volume)).collect(),
    }
}

/// Crossing-number containment with edges bucketed by height, so a query
/// only visits the edges that straddle its horizontal line.
pub struct BucketedPolygon {
    y0: f64,
    dy: f64,
    buckets: Vec<Vec<([f64; 2], [f64; 2])>>,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl BucketedPolygon {
    pub fn new(points: &[[f64; 2]]) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let count = (points.len() / 2).max(16);
        let dy = (hi[1] - lo[1]) / count as f64;
        let mut buckets = vec![Vec::new(); count];
        for i in 0..points.len() {
            let (a, b) = (points[i], points[(i + 1) % points.len()]);
            let (ya, yb) = (a[1].min(b[1]), a[1].max(b[1]));
            let first = (((ya - lo[1]) / dy).floor() as usize).min(count - 1);
            let last = (((yb - lo[1]) / dy).floor() as usize).min(count - 1);
            for bucket in &mut buckets[first..=last] {
                bucket.push((a, b));
            }
        }
        Self { y0: lo[1], dy, buckets, lo, hi }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if p[1] < self.lo[1] || p[1] >= self.hi[1] {
            return false;
        }
        let idx = (((p[1] - self.y0) / self.dy).floor() as usize).min(self.buckets.len() - 1);
        let mut inside = false;
        for &(a, b) in &self.buckets[idx] {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if x > p[0] {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

pub fn polygon_points(p: &Polygon) -> Vec<[f64; 2]> {
    p.vertices().to_vec()
}

/// Fine polygonal approximation of a Fourier curve, for containment only.
pub fn fourier_points(fb: &FourierBoundary, n: usize) -> Vec<[f64; 2]> {
    (0..n).map(|j| fb.evaluate(2.0 * PI * j as f64 / n as f64).0).collect()
}

/// Random edge, uniform point on it: `|∂Ω| = E·E[len]`, `I_k = E·E[len x_k²]`.
pub fn mc_polygon_boundary(rng: &mut ChaCha8Rng, points: &[[f64; 2]], samples: usize) -> MomentEstimates {
    let e = points.len();
    let mut measure = Accumulator::new();
    let mut second = [Accumulator::new(), Accumulator::new()];
    for _ in 0..samples {
        let i = rng.gen_range(0..e);
        let (a, b) = (points[i], points[(i + 1) % e]);
        let t: f64 = rng.gen();
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        measure.push(len);
        for k in 0..2 {
            let x = a[k] + t * (b[k] - a[k]);
            second[k].push(len * x * x);
        }
    }
    MomentEstimates {
        measure: measure.finish(samples, e as f64),
        second: second.iter().map(|a| a.finish(samples, e as f64)).collect(),
    }
}

/// Uniform parameter: `|∂Ω| = 2π E[|x'|]`, `I_k = 2π E[x_k² |x'|]`.
pub fn mc_fourier_boundary(rng: &mut ChaCha8Rng, fb: &FourierBoundary, samples: usize) -> MomentEstimates {
    let mut measure = Accumulator::new();
    let mut second = [Accumulator::new(), Accumulator::new()];
    for _ in 0..samples {
        let (p, d) = fb.evaluate(rng.gen_range(0.0..2.0 * PI));
        let speed = d[0].hypot(d[1]);
        measure.push(speed);
        for k in 0..2 {
            second[k].push(speed * p[k] * p[k]);
        }
    }
    MomentEstimates {
        measure: measure.finish(samples, 2.0 * PI),
        second: second.iter().map(|a| a.finish(samples, 2.0 * PI)).collect(),
    }
}

/// Barycentric containment in a union of simplices.
pub struct SimplexUnion {
    /// Per simplex: inverse of `[v_1 − v_0, …, v_N − v_0]` and `v_0`.
    maps: Vec<(DMatrix<f64>, DVector<f64>)>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SimplexUnion {
    pub fn new(body: &SimplicialBody) -> Self {
        let n = body.dim();
        let v = body.vertices();
        let maps = body
            .simplices()
            .iter()
            .map(|s| {
                let v0 = DVector::from_column_slice(&v[s[0]]);
                let m = DMatrix::from_fn(n, n, |r, c| v[s[c + 1]][r] - v[s[0]][r]);
                (m.try_inverse().expect("non-degenerate simplex"), v0)
            })
            .collect();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for p in v {
            for k in 0..n {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Self { maps, lo, hi }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let x = DVector::from_column_slice(p);
        self.maps.iter().any(|(inv, v0)| {
            let l = inv * (&x - v0);
            l.iter().all(|c| *c >= 0.0) && l.sum() <= 1.0
        })
    }
}

/// `(N−1)`-volume of the simplex spanned by `points` (Gram determinant).
pub fn facet_volume(points: &[&[f64]]) -> f64 {
    let n = points[0].len();
    let m = points.len() - 1;
    let e = DMatrix::from_fn(n, m, |r, c| points[c + 1][r] - points[0][r]);
    let gram = e.transpose() * &e;
    let fact: f64 = (1..=m).map(|i| i as f64).product();
    gram.determinant().max(0.0).sqrt() / fact
}

/// Uniform point in a simplex via normalized exponentials.
fn simplex_point(rng: &mut ChaCha8Rng, points: &[&[f64]]) -> Vec<f64> {
    let w: Vec<f64> = points.iter().map(|_| -rng.gen_range(f64::EPSILON..1.0f64).ln()).collect();
    let total: f64 = w.iter().sum();
    let n = points[0].len();
    (0..n).map(|k| points.iter().zip(&w).map(|(p, wi)| p[k] * wi / total).sum()).collect()
}

/// Random facet, uniform point in it.
pub fn mc_simplicial_boundary(rng: &mut ChaCha8Rng, body: &SimplicialBody, samples: usize) -> MomentEstimates {
    let n = body.dim();
    let v = body.vertices();
    let facets: Vec<Vec<&[f64]>> = body.facets().iter().map(|f| f.iter().map(|&i| v[i].as_slice()).collect()).collect();
    let areas: Vec<f64> = facets.iter().map(|f| facet_volume(f)).collect();
    let mut measure = Accumulator::new();
    let mut second: Vec<Accumulator> = (0..n).map(|_| Accumulator::new()).collect();
    for _ in 0..samples {
        let i = rng.gen_range(0..facets.len());
        let p = simplex_point(rng, &facets[i]);
        measure.push(areas[i]);
        for k in 0..n {
            second[k].push(areas[i] * p[k] * p[k]);
        }
    }
    let f = facets.len() as f64;
    MomentEstimates {
        measure: measure.finish(samples, f),
        second: second.iter().map(|a| a.finish(samples, f)).collect(),
    }
}

/// Sphere parametrization `x = c + a∘u`, `dS = Π a · |u ⊘ a| dω`.
pub fn mc_ellipsoid_boundary(rng: &mut ChaCha8Rng, e: &Ellipsoid, samples: usize) -> MomentEstimates {
    use rand_distr_free::standard_normal;
    let n = e.dim();
    let (c, a) = (e.center(), e.semi_axes());
    let sphere = n as f64 * ball_volume(n);
    let prod: f64 = a.iter().product();
    let mut measure = Accumulator::new();
    let mut second: Vec<Accumulator> = (0..n).map(|_| Accumulator::new()).collect();
    for _ in 0..samples {
        let g: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u: Vec<f64> = g.iter().map(|x| x / norm).collect();
        let jac = prod * u.iter().zip(a).map(|(ui, ai)| (ui / ai).powi(2)).sum::<f64>().sqrt();
        measure.push(jac);
        for k in 0..n {
            let x = c[k] + a[k] * u[k];
            second[k].push(jac * x * x);
        }
    }
    MomentEstimates {
        measure: measure.finish(samples, sphere),
        second: second.iter().map(|acc| acc.finish(samples, sphere)).collect(),
    }
}

mod rand_distr_free {
    use rand::Rng;

    /// Box–Muller.
    pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Measure and diagonal second moments computed by fixed rules.
#[derive(Debug, Clone)]
pub struct Exact {
    pub measure: f64,
    pub second: Vec<f64>,
}

/// Fan triangulation with the edge-midpoint rule (exact for quadratics),
/// and two-point Gauss on each edge.
pub fn polygon_by_quadrature(points: &[[f64; 2]]) -> (Exact, Exact) {
    let mut interior = Exact { measure: 0.0, second: vec![0.0; 2] };
    let p0 = points[0];
    for i in 1..points.len() - 1 {
        let (a, b) = (points[i], points[i + 1]);
        let area = 0.5 * ((a[0] - p0[0]) * (b[1] - p0[1]) - (a[1] - p0[1]) * (b[0] - p0[0]));
        interior.measure += area;
        for k in 0..2 {
            let mids = [(p0[k] + a[k]) / 2.0, (a[k] + b[k]) / 2.0, (b[k] + p0[k]) / 2.0];
            interior.second[k] += area / 3.0 * mids.iter().map(|m| m * m).sum::<f64>();
        }
    }
    let mut boundary = Exact { measure: 0.0, second: vec![0.0; 2] };
    let g = 0.5 / 3f64.sqrt();
    for i in 0..points.len() {
        let (a, b) = (points[i], points[(i + 1) % points.len()]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        boundary.measure += len;
        for k in 0..2 {
            let x1 = a[k] + (0.5 - g) * (b[k] - a[k]);
            let x2 = a[k] + (0.5 + g) * (b[k] - a[k]);
            boundary.second[k] += len / 2.0 * (x1 * x1 + x2 * x2);
        }
    }
    (interior, boundary)
}

/// Degree-2 exact rules on each simplex (midpoint rule in 2D, the symmetric
/// four-point rule in 3D) and on each facet.
pub fn simplicial_by_quadrature(body: &SimplicialBody) -> (Exact, Exact) {
    let n = body.dim();
    assert!(n == 2 || n == 3, "quadrature oracle covers N = 2, 3");
    let v = body.vertices();
    let mut interior = Exact { measure: 0.0, second: vec![0.0; n] };
    for s in body.simplices() {
        let pts: Vec<&[f64]> = s.iter().map(|&i| v[i].as_slice()).collect();
        let vol = simplex_volume(&pts);
        interior.measure += vol;
        for (node, w) in simplex_rule(&pts) {
            for k in 0..n {
                interior.second[k] += vol * w * node[k] * node[k];
            }
        }
    }
    let mut boundary = Exact { measure: 0.0, second: vec![0.0; n] };
    for f in body.facets() {
        let pts: Vec<&[f64]> = f.iter().map(|&i| v[i].as_slice()).collect();
        let area = facet_volume(&pts);
        boundary.measure += area;
        for (node, w) in simplex_rule(&pts) {
            for k in 0..n {
                boundary.second[k] += area * w * node[k] * node[k];
            }
        }
    }
    (interior, boundary)
}

fn simplex_volume(pts: &[&[f64]]) -> f64 {
    let n = pts[0].len();
    let m = DMatrix::from_fn(n, n, |r, c| pts[c + 1][r] - pts[0][r]);
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    m.determinant().abs() / fact
}

/// Nodes and weights (summing to one) exact for quadratics on a simplex
/// with 2, 3 or 4 vertices.
fn simplex_rule(pts: &[&[f64]]) -> Vec<(Vec<f64>, f64)> {
    let n = pts[0].len();
    let combo = |w: &[f64]| -> Vec<f64> { (0..n).map(|k| pts.iter().zip(w).map(|(p, wi)| p[k] * wi).sum()).collect() };
    match pts.len() {
        2 => {
            let g = 0.5 / 3f64.sqrt();
            vec![(combo(&[0.5 + g, 0.5 - g]), 0.5), (combo(&[0.5 - g, 0.5 + g]), 0.5)]
        }
        3 => vec![
            (combo(&[0.5, 0.5, 0.0]), 1.0 / 3.0),
            (combo(&[0.0, 0.5, 0.5]), 1.0 / 3.0),
            (combo(&[0.5, 0.0, 0.5]), 1.0 / 3.0),
        ],
        4 => {
            let (a, b) = (0.585_410_196_624_968_5, 0.138_196_601_125_010_5);
            (0..4)
                .map(|i| {
                    let mut w = [b; 4];
                    w[i] = a;
                    (combo(&w), 0.25)
                })
                .collect()
        }
        m => panic!("no rule for a simplex with {m} vertices"),
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    (p0, p1) = (p1, ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf);
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Gauss–Legendre in `σ` (a rule the library does not use) applied to
/// `|Ω| = ∮ x dy`, `J_1 = ∮ x³/3 dy`, `J_2 = −∮ y³/3 dx`, and the
/// boundary integrals.
pub fn fourier_by_quadrature(fb: &FourierBoundary, panels: usize) -> (Exact, Exact) {
    let rule = gauss_legendre(16);
    let mut interior = Exact { measure: 0.0, second: vec![0.0; 2] };
    let mut boundary = Exact { measure: 0.0, second: vec![0.0; 2] };
    let h = 2.0 * PI / panels as f64;
    for p in 0..panels {
        for &(t, w) in &rule {
            let sigma = h * (p as f64 + 0.5 * (t + 1.0));
            let wt = 0.5 * h * w;
            let ([x, y], [dx, dy]) = fb.evaluate(sigma);
            interior.measure += wt * x * dy;
            interior.second[0] += wt * x * x * x / 3.0 * dy;
            interior.second[1] -= wt * y * y * y / 3.0 * dx;
            let speed = dx.hypot(dy);
            boundary.measure += wt * speed;
            boundary.second[0] += wt * x * x * speed;
            boundary.second[1] += wt * y * y * speed;
        }
    }
    (interior, boundary)
}

/// `Ω_h ∩ {y}` for a convex polygon: the horizontal extent of the union of
/// the polygon, the vertex discs and the edge rectangles.
fn offset_chord(points: &[[f64; 2]], h: f64, y: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut seg = |a: [f64; 2], b: [f64; 2]| {
        let (ya, yb) = (a[1].min(b[1]), a[1].max(b[1]));
        if y < ya || y > yb {
            return;
        }
        if yb - ya < 1e-300 {
            for x in [a[0], b[0]] {
                lo = lo.min(x);
                hi = hi.max(x);
            }
            return;
        }
        let x = a[0] + (y - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
        lo = lo.min(x);
        hi = hi.max(x);
    };
    let m = points.len();
    for i in 0..m {
        let (a, b) = (points[i], points[(i + 1) % m]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let nrm = [h * (b[1] - a[1]) / len, -h * (b[0] - a[0]) / len];
        let (ah, bh) = ([a[0] + nrm[0], a[1] + nrm[1]], [b[0] + nrm[0], b[1] + nrm[1]]);
        seg(a, b);
        seg(ah, bh);
        seg(a, ah);
        seg(b, bh);
    }
    for v in points {
        let d = y - v[1];
        if d.abs() <= h {
            let w = (h * h - d * d).sqrt();
            lo = lo.min(v[0] - w);
            hi = hi.max(v[0] + w);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// `(|Ω_h|, J_1, J_2)` of the parallel body of a convex counterclockwise
/// polygon, by Gauss quadrature over horizontal chords. The `y` range is
/// split at every height where the chord endpoints change formula, and
/// `y = c + r sin u` smooths the square-root behaviour at disc caps.
pub fn offset_by_chords(points: &[[f64; 2]], h: f64) -> [f64; 3] {
    let mut breaks: Vec<f64> = Vec::new();
    let m = points.len();
    for i in 0..m {
        let (a, b) = (points[i], points[(i + 1) % m]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let nrm = [h * (b[1] - a[1]) / len, -h * (b[0] - a[0]) / len];
        breaks.extend([a[1], a[1] + nrm[1], b[1] + nrm[1], a[1] - h, a[1] + h]);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let rule = gauss_legendre(40);
    let mut out = [0.0; 3];
    for w in breaks.windows(2) {
        let (c, r) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        if r <= 0.0 {
            continue;
        }
        for &(t, wt) in &rule {
            let u = 0.5 * PI * t;
            let y = c + r * u.sin();
            let jac = 0.5 * PI * wt * r * u.cos();
            if let Some((lo, hi)) = offset_chord(points, h, y) {
                out[0] += jac * (hi - lo);
                out[1] += jac * (hi.powi(3) - lo.powi(3)) / 3.0;
                out[2] += jac * y * y * (hi - lo);
            }
        }
    }
    out
}

/// `d/dh` of a quartic in `h` by the five-point stencil, exact for degree
/// four.
pub fn five_point_derivative(f: impl Fn(f64) -> f64, h: f64, step: f64) -> f64 {
    (f(h - 2.0 * step) - 8.0 * f(h - step) + 8.0 * f(h + step) - f(h + 2.0 * step)) / (12.0 * step)
}
