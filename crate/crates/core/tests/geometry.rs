mod common;

use common::*;
use isomoment::geometry::{apply_affinity, canonical_placement, normalize_j, PlacementMode};
use isomoment::random::{generate, rng_from_seed, RandomKind, RandomParams};
use isomoment::{Ellipsoid, Polygon, Shape, SimplicialBody};
use nalgebra::DVector;
use proptest::prelude::*;

const SAMPLES: usize = 1_000_000;

fn check_mc(label: &str, exact_measure: f64, exact_second: &[f64], est: &MomentEstimates) {
    assert!(est.measure.agrees(exact_measure, 4.0), "{label}: measure {exact_measure} vs {:?}", est.measure);
    for (k, (e, x)) in est.second.iter().zip(exact_second).enumerate() {
        assert!(e.agrees(*x, 4.0), "{label}: axis {k}: {x} vs {e:?}");
    }
}

#[test]
fn random_polygons_agree_with_monte_carlo_and_quadrature() {
    let shapes = generate(RandomKind::ConvexPolygon, 11, 5, &RandomParams::default()).unwrap();
    let mut rng = rng_from_seed(1011);
    for (i, s) in shapes.iter().enumerate() {
        let Shape::Polygon(p) = s else { unreachable!() };
        let m = p.moments();
        let pts = polygon_points(p);
        let grid = BucketedPolygon::new(&pts);
        let est = mc_interior(&mut rng, &grid.lo, &grid.hi, SAMPLES, |q| grid.contains(q));
        check_mc(&format!("polygon {i} interior"), m.volume, &m.j, &est);
        let est = mc_polygon_boundary(&mut rng, &pts, SAMPLES);
        check_mc(&format!("polygon {i} boundary"), m.surface, &m.i, &est);

        let (interior, boundary) = polygon_by_quadrature(&pts);
        assert!(rel(m.volume, interior.measure) < 1e-12);
        assert!(rel(m.surface, boundary.measure) < 1e-12);
        for k in 0..2 {
            assert!(rel(m.j[k], interior.second[k]) < 1e-10);
            assert!(rel(m.i[k], boundary.second[k]) < 1e-10);
        }
    }
}

#[test]
fn random_star_curves_agree_with_monte_carlo_and_gauss_quadrature() {
    let shapes = generate(RandomKind::StarFourier, 12, 4, &RandomParams::default()).unwrap();
    let mut rng = rng_from_seed(1012);
    for (i, s) in shapes.iter().enumerate() {
        let Shape::Fourier(fb) = s else { unreachable!() };
        let m = s.moments().unwrap();
        let grid = BucketedPolygon::new(&fourier_points(fb, 1 << 14));
        let est = mc_interior(&mut rng, &grid.lo, &grid.hi, SAMPLES, |q| grid.contains(q));
        check_mc(&format!("star {i} interior"), m.volume, &m.j, &est);
        let est = mc_fourier_boundary(&mut rng, fb, SAMPLES);
        check_mc(&format!("star {i} boundary"), m.surface, &m.i, &est);

        let (interior, boundary) = fourier_by_quadrature(fb, 64);
        assert!(rel(m.volume, interior.measure) < 1e-10);
        assert!(rel(m.surface, boundary.measure) < 1e-10);
        for k in 0..2 {
            assert!(rel(m.j[k], interior.second[k]) < 1e-10, "{} {}", m.j[k], interior.second[k]);
            assert!(rel(m.i[k], boundary.second[k]) < 1e-10);
        }
    }
}

#[test]
fn perturbed_boxes_agree_with_monte_carlo_and_simplex_rules() {
    for dim in [2, 3] {
        let params = RandomParams { dim, perturbation: 0.1, ..Default::default() };
        let shapes = generate(RandomKind::SimplicialBoxPerturbation, 13, 3, &params).unwrap();
        let mut rng = rng_from_seed(1013);
        for (i, s) in shapes.iter().enumerate() {
            let Shape::Simplicial(b) = s else { unreachable!() };
            let m = b.moments();
            let union = SimplexUnion::new(b);
            let est = mc_interior(&mut rng, &union.lo, &union.hi, SAMPLES / 2, |q| union.contains(q));
            check_mc(&format!("box {dim}d {i} interior"), m.volume, &m.j, &est);
            let est = mc_simplicial_boundary(&mut rng, b, SAMPLES / 2);
            check_mc(&format!("box {dim}d {i} boundary"), m.surface, &m.i, &est);

            let (interior, boundary) = simplicial_by_quadrature(b);
            assert!(rel(m.volume, interior.measure) < 1e-12);
            assert!(rel(m.surface, boundary.measure) < 1e-12);
            for k in 0..dim {
                assert!(rel(m.j[k], interior.second[k]) < 1e-10);
                assert!(rel(m.i[k], boundary.second[k]) < 1e-10);
            }
        }
    }
}

#[test]
fn ellipsoids_agree_with_monte_carlo() {
    let mut rng = rng_from_seed(1014);
    let cases = [
        Ellipsoid::new(vec![0.3, -0.2], vec![1.7, 0.6]).unwrap(),
        Ellipsoid::new(vec![0.1, 0.2, -0.4], vec![1.2, 0.8, 0.5]).unwrap(),
        Ellipsoid::new(vec![0.5, 0.0, 0.0, 0.0], vec![0.9, 0.9, 0.9, 0.9]).unwrap(),
    ];
    for e in &cases {
        let n = e.dim();
        let interior = e.interior_integrals();
        let j: Vec<f64> = (0..n).map(|k| interior.second[(k, k)]).collect();
        let lo: Vec<f64> = e.center().iter().zip(e.semi_axes()).map(|(c, a)| c - a).collect();
        let hi: Vec<f64> = e.center().iter().zip(e.semi_axes()).map(|(c, a)| c + a).collect();
        let est = mc_interior(&mut rng, &lo, &hi, SAMPLES / 2, |p| {
            p.iter().zip(e.center()).zip(e.semi_axes()).map(|((x, c), a)| ((x - c) / a).powi(2)).sum::<f64>() <= 1.0
        });
        check_mc(&format!("ellipsoid {n}d interior"), interior.measure, &j, &est);
        if let Ok(boundary) = e.boundary_integrals() {
            let i: Vec<f64> = (0..n).map(|k| boundary.second[(k, k)]).collect();
            let est = mc_ellipsoid_boundary(&mut rng, e, SAMPLES / 2);
            check_mc(&format!("ellipsoid {n}d boundary"), boundary.measure, &i, &est);
        }
    }
}

#[test]
fn ball_closed_forms() {
    for n in 2..=4 {
        for r in [0.5, 1.0, 2.0] {
            let m = Ellipsoid::ball(n, r).unwrap().moments().unwrap();
            let omega = ball_volume(n);
            for k in 0..n {
                assert!(rel(m.j[k], omega * r.powi(n as i32 + 2) / (n as f64 + 2.0)) < 1e-12);
                assert!(rel(m.i[k], omega * r.powi(n as i32 + 1)) < 1e-12);
            }
            assert!(rel(m.volume, omega * r.powi(n as i32)) < 1e-12);
            assert!(rel(m.surface, n as f64 * omega * r.powi(n as i32 - 1)) < 1e-12);
        }
    }
}

#[test]
fn unit_square_and_cube() {
    let sq = Polygon::rectangle(0.0, 1.0, 0.0, 1.0).unwrap().moments();
    assert!(rel(sq.j[0], 1.0 / 3.0) < 1e-15);
    // ∂[0,1]²: two vertical sides contribute 0 and 1, two horizontal 1/3 each
    assert!(rel(sq.i[0], 5.0 / 3.0) < 1e-15);
    let cube = SimplicialBody::unit_cube().moments();
    assert!(rel(cube.volume, 1.0) < 1e-14);
    assert!(rel(cube.j[2], 1.0 / 3.0) < 1e-14);
    assert!(rel(cube.surface, 6.0) < 1e-14);
}

#[test]
fn matrix_diagonal_and_determinant() {
    let shapes = generate(RandomKind::SimplicialBoxPerturbation, 3, 5, &RandomParams::default()).unwrap();
    for s in shapes {
        let m = s.moments().unwrap();
        let mat = m.inertia_matrix();
        for k in 0..m.dim {
            assert_eq!(mat[(k, k)], m.j[k]);
        }
        let eig: f64 = mat.symmetric_eigenvalues().iter().product();
        assert!(rel(m.det, eig) < 1e-12);
    }
}

#[test]
fn normalize_j_equalizes_random_shapes() {
    let mut shapes = generate(RandomKind::ConvexPolygon, 21, 20, &RandomParams::default()).unwrap();
    shapes.extend(generate(RandomKind::SimplicialBoxPerturbation, 22, 10, &RandomParams::default()).unwrap());
    for s in shapes {
        let (t, image) = normalize_j(&s).unwrap();
        assert!((t.iter().product::<f64>() - 1.0).abs() < 1e-14);
        let m = image.moments().unwrap();
        let target = m.j_product.powf(1.0 / m.dim as f64);
        for jk in &m.j {
            assert!(rel(*jk, target) < 1e-10);
        }
        assert!(rel(m.j_product, s.moments().unwrap().j_product) < 1e-10);
    }
}

#[test]
fn canonical_placement_diagonalizes_boundary_moments() {
    let shapes = generate(RandomKind::StarFourier, 5, 5, &RandomParams::default()).unwrap();
    for s in shapes {
        let (placed, _) = canonical_placement(&s, PlacementMode::BOUNDARY_PRINCIPAL).unwrap();
        let m = placed.moments().unwrap();
        assert!(m.boundary_centroid.iter().all(|c| c.abs() < 1e-12));
        assert!(m.boundary_inertia[0][1].abs() < 1e-12 * m.i0);
    }
}

fn polygon_strategy() -> impl Strategy<Value = Shape> {
    any::<u64>()
        .prop_map(|seed| generate(RandomKind::ConvexPolygon, seed, 1, &RandomParams::default()).unwrap().remove(0))
}

fn body_strategy() -> impl Strategy<Value = Shape> {
    (any::<u64>(), 0usize..3).prop_map(|(seed, kind)| {
        let kind = [RandomKind::ConvexPolygon, RandomKind::StarFourier, RandomKind::SimplicialBoxPerturbation][kind];
        generate(kind, seed, 1, &RandomParams::default()).unwrap().remove(0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn j_product_is_invariant_under_unimodular_affinities(s in body_strategy(), logs in prop::collection::vec(-1.0f64..1.0, 3)) {
        let n = s.dim();
        let mut t: Vec<f64> = logs[..n].iter().map(|l| l.exp()).collect();
        let correction = t.iter().product::<f64>().powf(-1.0 / n as f64);
        t.iter_mut().for_each(|x| *x *= correction);
        let before = s.moments().unwrap().j_product;
        let after = apply_affinity(&s, &t).unwrap().moments().unwrap().j_product;
        prop_assert!(rel(after, before) < 1e-10);
    }

    #[test]
    fn polar_moment_is_smallest_at_the_centroid(s in body_strategy(), v in prop::collection::vec(-1.0f64..1.0, 3)) {
        let (centered, _) = canonical_placement(&s, PlacementMode::VOLUME).unwrap();
        let j0 = centered.moments().unwrap().j0;
        let shift = DVector::from_column_slice(&v[..s.dim()]);
        let moved = centered.translated(&shift).unwrap().moments().unwrap().j0;
        prop_assert!(j0 <= moved * (1.0 + 1e-14));
    }

    #[test]
    fn moments_scale_homogeneously(s in polygon_strategy(), scale in 0.2f64..5.0) {
        let a = s.moments().unwrap();
        let b = s.scaled(scale).unwrap().moments().unwrap();
        prop_assert!(rel(b.volume, a.volume * scale.powi(2)) < 1e-12);
        prop_assert!(rel(b.j[0], a.j[0] * scale.powi(4)) < 1e-12);
        prop_assert!(rel(b.i[1], a.i[1] * scale.powi(3)) < 1e-12);
    }
}
