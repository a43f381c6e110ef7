//! Upper bounds for Steklov eigenvalues `Δu = 0` in `Ω`, `∂u/∂n = p u` on
//! `∂Ω`, from the Rayleigh–Ritz (Poincaré) principle.
//!
//! For `n` harmonic trial functions with zero boundary mean, the roots of
//! `det(A − pB) = 0` with `a_ij = ∫_Ω ∇v_i·∇v_j` and `b_ij = ∮ v_i v_j ds`
//! bound `p_2, …, p_{n+1}` from above. Harmonicity turns `a_ij` into the
//! boundary integral `∮ v_i ∂_n v_j ds`, so only boundary quadrature is
//! needed.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierBoundary;
use crate::geometry::{canonical_placement, PlacementMode, Polygon, Shape};
use crate::linalg::generalized_symmetric_eigenvalues;
use crate::quadrature::gauss_legendre;
use crate::special::unit_ball_volume;

pub const DEFAULT_MAX_DEGREE: usize = 24;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Slack on each link of the spectral chain `p_2 ⋯ p_{N+1} ≤ |Ω|^N / I ≤ ω_N / |Ω|`.
pub const CHAIN_TOLERANCE: f64 = 1e-9;
const GAUSS_POINTS: usize = 16;

/// Which part of `((z − c)/R)^m` a trial function is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Real,
    Imag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HarmonicTerm {
    pub degree: usize,
    pub part: Part,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialSpace {
    /// The coordinate functions `x − c_x, y − c_y`.
    Coordinates,
    /// All harmonic polynomials of degree `1..=M`, as `2M` functions.
    Harmonic(usize),
    /// An explicit list of `Re`/`Im` parts of scaled monomials.
    Terms(Vec<HarmonicTerm>),
}

/// The pencil `(A, B)` of a trial space and its ordered roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RayleighPair {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// `p'_2 ≤ … ≤ p'_{n+1}`.
    pub roots: Vec<f64>,
}

impl RayleighPair {
    pub fn n(&self) -> usize {
        self.roots.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BoundMethod {
    Coordinates,
    Harmonic { degree: usize },
}

/// Bounds of one trial space in a degree sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeStep {
    pub degree: usize,
    pub bounds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StekloffBounds {
    pub shape_kind: String,
    pub dim: usize,
    pub volume: f64,
    pub method: BoundMethod,
    /// Upper bounds `p'_2, p'_3, …`, ascending.
    pub bounds: Vec<f64>,
    /// Product of the first `N` bounds.
    pub product: f64,
    pub history: Vec<DegreeStep>,
    pub converged: bool,
    /// Largest relative change of the first `N + 1` bounds at the last step.
    pub achieved_tolerance: f64,
}

/// Quadrature for `∮ f ds` with outward unit normals.
#[derive(Debug, Clone)]
struct BoundaryRule {
    points: Vec<[f64; 2]>,
    normals: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl BoundaryRule {
    fn for_shape(shape: &Shape, degree: usize) -> Result<Self> {
        match shape {
            Shape::Polygon(p) => Ok(Self::polygon(p, degree)),
            Shape::Fourier(fb) => Self::fourier(fb, degree),
            Shape::Ellipsoid(e) if e.dim() == 2 => Self::fourier(&e.to_fourier()?, degree),
            _ => Err(Error::Unsupported(format!(
                "harmonic trial spaces need a planar boundary, got a {}-dimensional {}",
                shape.dim(),
                shape.kind()
            ))),
        }
    }

    /// Gauss–Legendre per edge, with enough panels to integrate products of
    /// degree-`degree` polynomials exactly.
    fn polygon(p: &Polygon, degree: usize) -> Self {
        let (nodes, weights) = gauss_legendre(GAUSS_POINTS);
        let panels = 1 + (2 * degree) / (2 * GAUSS_POINTS);
        let mut rule = Self { points: Vec::new(), normals: Vec::new(), weights: Vec::new() };
        for (a, b) in p.edges() {
            let d = [b[0] - a[0], b[1] - a[1]];
            let len = d[0].hypot(d[1]);
            let normal = [d[1] / len, -d[0] / len];
            for panel in 0..panels {
                for (t, w) in nodes.iter().zip(&weights) {
                    let s = (panel as f64 + 0.5 * (t + 1.0)) / panels as f64;
                    rule.points.push([a[0] + s * d[0], a[1] + s * d[1]]);
                    rule.normals.push(normal);
                    rule.weights.push(0.5 * w * len / panels as f64);
                }
            }
        }
        rule
    }

    /// Periodic trapezoid on a grid fine enough for the curve and the
    /// trial degree.
    fn fourier(fb: &FourierBoundary, degree: usize) -> Result<Self> {
        fb.validate()?;
        let fb = fb.counterclockwise();
        let n = 2048usize.max(64 * (degree + fb.effective_order()));
        let s = fb.sample(n);
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let mut rule =
            Self { points: Vec::with_capacity(n), normals: Vec::with_capacity(n), weights: Vec::with_capacity(n) };
        for j in 0..n {
            let speed = s.dx[j].hypot(s.dy[j]);
            rule.points.push([s.x[j], s.y[j]]);
            rule.normals.push([s.dy[j] / speed, -s.dx[j] / speed]);
            rule.weights.push(speed * h);
        }
        Ok(rule)
    }

    fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.weights.iter().enumerate().map(|(j, w)| w * f(j)).sum()
    }

    fn centroid(&self) -> [f64; 2] {
        let len: f64 = self.weights.iter().sum();
        [self.integrate(|j| self.points[j][0]) / len, self.integrate(|j| self.points[j][1]) / len]
    }

    fn max_radius(&self, c: [f64; 2]) -> f64 {
        self.points.iter().map(|p| (p[0] - c[0]).hypot(p[1] - c[1])).fold(0.0, f64::max)
    }

    /// `A` and `B` for trial functions given by values and gradients at the
    /// nodes, after removing each function's boundary mean.
    fn pencil(&self, values: &DMatrix<f64>, normal_derivs: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let len: f64 = self.weights.iter().sum();
        let mut v = values.clone();
        for mut col in v.column_iter_mut() {
            let mean: f64 = col.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>() / len;
            col.add_scalar_mut(-mean);
        }
        let mut wv = v.clone();
        for (j, w) in self.weights.iter().enumerate() {
            wv.row_mut(j).scale_mut(*w);
        }
        let a = wv.transpose() * normal_derivs;
        let a = (&a + a.transpose()) * 0.5;
        let b = wv.transpose() * &v;
        let b = (&b + b.transpose()) * 0.5;
        (a, b)
    }
}

/// Values and normal derivatives of `Re`/`Im` of a holomorphic `f` given
/// `f` and `f'` at a node.
fn harmonic_parts(f: Complex<f64>, df: Complex<f64>, n: [f64; 2]) -> [(f64, f64); 2] {
    // ∇Re f = (Re f', −Im f'),  ∇Im f = (Im f', Re f')
    [(f.re, df.re * n[0] - df.im * n[1]), (f.im, df.im * n[0] + df.re * n[1])]
}

fn monomial_pencil(rule: &BoundaryRule, terms: &[HarmonicTerm]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if let Some(t) = terms.iter().find(|t| t.degree == 0) {
        return Err(Error::InvalidArgument(format!(
            "trial function {:?} z^0 is constant and vanishes under the zero-mean projection",
            t.part
        )));
    }
    if terms.is_empty() {
        return Err(Error::InvalidArgument("trial space is empty".into()));
    }
    let c = rule.centroid();
    let r = rule.max_radius(c);
    let nodes = rule.points.len();
    let mut values = DMatrix::zeros(nodes, terms.len());
    let mut derivs = DMatrix::zeros(nodes, terms.len());
    for j in 0..nodes {
        let w = Complex::new((rule.points[j][0] - c[0]) / r, (rule.points[j][1] - c[1]) / r);
        for (col, t) in terms.iter().enumerate() {
            let f = w.powu(t.degree as u32);
            let df = w.powu(t.degree as u32 - 1) * (t.degree as f64 / r);
            let parts = harmonic_parts(f, df, rule.normals[j]);
            let (v, d) = parts[usize::from(t.part == Part::Imag)];
            values[(j, col)] = v;
            derivs[(j, col)] = d;
        }
    }
    Ok(rule.pencil(&values, &derivs))
}

/// Harmonic polynomials of degree `1..=degree` from an Arnoldi
/// orthogonalisation of `w^m`, `w = (z − c)/R`, in the boundary inner
/// product. Column pairs `(2m − 2, 2m − 1)` hold `Re q_m, Im q_m`; the first
/// `2M` columns span the harmonic polynomials of degree at most `M` modulo
/// constants, and each `q_m` has zero boundary mean.
fn arnoldi_pencil(rule: &BoundaryRule, degree: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let c = rule.centroid();
    let r = rule.max_radius(c);
    let nodes = rule.points.len();
    let w: Vec<Complex<f64>> = rule.points.iter().map(|p| Complex::new((p[0] - c[0]) / r, (p[1] - c[1]) / r)).collect();
    let inner = |a: &[Complex<f64>], b: &[Complex<f64>]| -> Complex<f64> {
        (0..nodes).map(|j| a[j] * b[j].conj() * rule.weights[j]).sum()
    };
    let len: f64 = rule.weights.iter().sum();
    let mut q: Vec<Vec<Complex<f64>>> = vec![vec![Complex::new(1.0 / len.sqrt(), 0.0); nodes]];
    let mut dq: Vec<Vec<Complex<f64>>> = vec![vec![Complex::new(0.0, 0.0); nodes]];
    for m in 1..=degree {
        let mut v: Vec<Complex<f64>> = (0..nodes).map(|j| w[j] * q[m - 1][j]).collect();
        let mut dv: Vec<Complex<f64>> = (0..nodes).map(|j| q[m - 1][j] / r + w[j] * dq[m - 1][j]).collect();
        for _ in 0..2 {
            for i in 0..m {
                let h = inner(&v, &q[i]);
                for j in 0..nodes {
                    v[j] -= h * q[i][j];
                    dv[j] -= h * dq[i][j];
                }
            }
        }
        let norm = inner(&v, &v).re.sqrt();
        q.push(v.into_iter().map(|x| x / norm).collect());
        dq.push(dv.into_iter().map(|x| x / norm).collect());
    }
    let mut values = DMatrix::zeros(nodes, 2 * degree);
    let mut derivs = DMatrix::zeros(nodes, 2 * degree);
    for m in 1..=degree {
        for j in 0..nodes {
            let parts = harmonic_parts(q[m][j], dq[m][j], rule.normals[j]);
            for (p, (v, d)) in parts.into_iter().enumerate() {
                values[(j, 2 * m - 2 + p)] = v;
                derivs[(j, 2 * m - 2 + p)] = d;
            }
        }
    }
    rule.pencil(&values, &derivs)
}

fn solve_pencil(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<RayleighPair> {
    let roots = generalized_symmetric_eigenvalues(&a, &b)?;
    Ok(RayleighPair { a, b, roots })
}

/// Assembles and solves the Rayleigh–Ritz pencil of a planar shape.
pub fn rayleigh_pair(shape: &Shape, space: &TrialSpace) -> Result<RayleighPair> {
    let (a, b) = match space {
        TrialSpace::Coordinates => {
            let rule = BoundaryRule::for_shape(shape, 1)?;
            let terms = [Part::Real, Part::Imag].map(|part| HarmonicTerm { degree: 1, part });
            monomial_pencil(&rule, &terms)?
        }
        TrialSpace::Harmonic(degree) => {
            if *degree == 0 {
                return Err(Error::InvalidArgument("harmonic degree must be at least 1".into()));
            }
            let rule = BoundaryRule::for_shape(shape, *degree)?;
            arnoldi_pencil(&rule, *degree)
        }
        TrialSpace::Terms(terms) => {
            let degree = terms.iter().map(|t| t.degree).max().unwrap_or(0);
            let rule = BoundaryRule::for_shape(shape, degree)?;
            monomial_pencil(&rule, terms)?
        }
    };
    solve_pencil(a, b)
}

/// Bounds of the nested harmonic spaces of degree `1..=max_degree`. The
/// sweep stops early if a space becomes numerically degenerate.
pub fn harmonic_sweep(shape: &Shape, max_degree: usize) -> Result<Vec<DegreeStep>> {
    if max_degree == 0 {
        return Err(Error::InvalidArgument("maximum degree must be at least 1".into()));
    }
    let rule = BoundaryRule::for_shape(shape, max_degree)?;
    let (a, b) = arnoldi_pencil(&rule, max_degree);
    let mut steps = Vec::with_capacity(max_degree);
    for m in 1..=max_degree {
        let n = 2 * m;
        let sub_a = a.view((0, 0), (n, n)).into_owned();
        let sub_b = b.view((0, 0), (n, n)).into_owned();
        match generalized_symmetric_eigenvalues(&sub_a, &sub_b) {
            Ok(bounds) => steps.push(DegreeStep { degree: m, bounds }),
            Err(e) if steps.is_empty() => return Err(e),
            Err(_) => break,
        }
    }
    Ok(steps)
}

fn relative_change(prev: &[f64], next: &[f64], count: usize) -> f64 {
    prev.iter().zip(next).take(count).map(|(p, q)| (p - q).abs() / q.abs()).fold(0.0, f64::max)
}

/// Raises the harmonic degree until the first three bounds change by less
/// than `tol` (relative) between consecutive degrees.
pub fn converge_spectrum(shape: &Shape, max_degree: usize, tol: f64) -> Result<StekloffBounds> {
    let volume = shape.interior_integrals()?.measure;
    let dim = shape.dim();
    let watched = dim + 1;
    let mut history: Vec<DegreeStep> = Vec::new();
    let mut achieved = f64::INFINITY;
    let mut converged = false;
    for step in harmonic_sweep(shape, max_degree)? {
        if let Some(prev) = history.last() {
            if prev.bounds.len() >= watched {
                achieved = relative_change(&prev.bounds, &step.bounds, watched);
            }
        }
        history.push(step);
        if achieved < tol {
            converged = true;
            break;
        }
    }
    let last = history.last().expect("sweep returns at least one degree");
    Ok(StekloffBounds {
        shape_kind: shape.kind().to_string(),
        dim,
        volume,
        method: BoundMethod::Harmonic { degree: last.degree },
        product: last.bounds.iter().take(dim).product(),
        bounds: last.bounds.clone(),
        history,
        converged,
        achieved_tolerance: achieved,
    })
}

/// `p'_k = |Ω| / I_k` from the coordinate functions, after moving the
/// boundary centroid to the origin and the boundary axes onto the
/// coordinate axes.
pub fn coordinate_bounds(shape: &Shape) -> Result<StekloffBounds> {
    let (placed, _) = canonical_placement(shape, PlacementMode::BOUNDARY_PRINCIPAL)?;
    let m = placed.moments()?;
    if m.i.iter().any(|v| !(*v > 0.0)) || !(m.volume > 0.0) {
        return Err(Error::Degenerate("coordinate bounds need positive volume and boundary moments".into()));
    }
    let mut bounds: Vec<f64> = m.i.iter().map(|ik| m.volume / ik).collect();
    bounds.sort_by(f64::total_cmp);
    Ok(StekloffBounds {
        shape_kind: shape.kind().to_string(),
        dim: m.dim,
        volume: m.volume,
        method: BoundMethod::Coordinates,
        product: m.volume.powi(m.dim as i32) / m.i_product,
        history: vec![DegreeStep { degree: 1, bounds: bounds.clone() }],
        bounds,
        converged: true,
        achieved_tolerance: 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallSpectrum {
    pub dim: usize,
    pub radius: f64,
    /// `0, 1/R, …, n/R, …` repeated by multiplicity, ascending.
    pub eigenvalues: Vec<f64>,
}

/// Dimension of the degree-`n` spherical harmonics in `R^N`.
pub fn harmonic_multiplicity(dim: usize, n: usize) -> usize {
    let binom = |a: usize, b: usize| -> usize { (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1)) };
    let total = binom(n + dim - 1, dim - 1);
    if n >= 2 {
        total - binom(n + dim - 3, dim - 1)
    } else {
        total
    }
}

/// The first `count` Steklov eigenvalues of the ball `B_R ⊂ R^N`.
pub fn ball_spectrum(dim: usize, radius: f64, count: usize) -> Result<BallSpectrum> {
    if dim < 2 || !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("need N >= 2 and R > 0, got N={dim}, R={radius}")));
    }
    let mut eigenvalues = Vec::with_capacity(count);
    let mut n = 0;
    while eigenvalues.len() < count {
        let mult = harmonic_multiplicity(dim, n);
        eigenvalues.extend(std::iter::repeat(n as f64 / radius).take(mult.min(count - eigenvalues.len())));
        n += 1;
    }
    Ok(BallSpectrum { dim, radius, eigenvalues })
}

/// One inequality `lhs ≤ rhs` of the spectral chain `p_2 ⋯ p_{N+1} ≤ |Ω|^N / I ≤ ω_N / |Ω|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLink {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs − lhs) / rhs`.
    pub relative_margin: f64,
    pub holds: bool,
}

impl ChainLink {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        let relative_margin = (rhs - lhs) / rhs.abs();
        Self { name: name.into(), lhs, rhs, relative_margin, holds: relative_margin >= -CHAIN_TOLERANCE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralChainReport {
    pub dim: usize,
    pub volume: f64,
    /// `∏ p_k` over the first `N` converged eigenvalues (planar shapes).
    pub spectral_product: Option<f64>,
    /// `|Ω|^N / I(Ω)`.
    pub bound_product: f64,
    /// `ω_N / |Ω|`, the ball value.
    pub ball_product: f64,
    pub links: Vec<ChainLink>,
    /// `Σ 1/p_k ≥ N R*`, written as `N R* ≤ Σ 1/p_k`.
    pub brock: Option<ChainLink>,
    pub spectrum: Option<StekloffBounds>,
    pub holds: bool,
}

/// Checks `∏ p_k ≤ |Ω|^N / I(Ω) ≤ ω_N / |Ω|` and, in the plane, Brock's
/// `Σ 1/p_k ≥ N R*` with the converged spectrum standing in for `p_k`.
pub fn spectral_chain_check(shape: &Shape, max_degree: usize, tol: f64) -> Result<SpectralChainReport> {
    if !shape.is_convex()? {
        return Err(Error::HypothesisViolation("the Steklov product bound is established for convex bodies".into()));
    }
    let coords = coordinate_bounds(shape)?;
    let dim = coords.dim;
    let volume = coords.volume;
    let ball_product = unit_ball_volume(dim) / volume;
    let mut links = Vec::new();
    let (spectral_product, brock, spectrum) = if dim == 2 {
        let spec = converge_spectrum(shape, max_degree, tol)?;
        let product = spec.product;
        links.push(ChainLink::new("spectral <= coordinate bound", product, coords.product));
        let r_star = (volume / unit_ball_volume(dim)).powf(1.0 / dim as f64);
        let reciprocal: f64 = spec.bounds.iter().take(dim).map(|p| 1.0 / p).sum();
        let brock = ChainLink::new("N R* <= sum 1/p_k", dim as f64 * r_star, reciprocal);
        (Some(product), Some(brock), Some(spec))
    } else {
        (None, None, None)
    };
    links.push(ChainLink::new("coordinate bound <= ball", coords.product, ball_product));
    let holds = links.iter().all(|l| l.holds) && brock.as_ref().map_or(true, |b| b.holds);
    Ok(SpectralChainReport {
        dim,
        volume,
        spectral_product,
        bound_product: coords.product,
        ball_product,
        links,
        brock,
        spectrum,
        holds,
    })
}
