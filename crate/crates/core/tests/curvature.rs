mod common;

use std::sync::Arc;

use kahler_core::geometry::{self, curvature, sectional, ChartPoint};
use kahler_core::hermitian::j_in_frame;
use kahler_core::models::{load_model, make_model, ModelManifold, ModelSpec};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{gaussian, matvec, unit};

const MODELS: [&str; 6] = ["cp2", "ch2", "cp1xcp1", "conformal_cp1xcp1", "s4", "torus4_twisted"];

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn algebraic_symmetries_and_first_bianchi() {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (k, name) in MODELS.iter().enumerate() {
        let m = load_model(name).unwrap();
        let per = if k < 4 { 17 } else { 16 };
        for p in m.sample_points(per, 11 + k as u64) {
            let r = curvature(&m, &p, 0).unwrap().riemann;
            let n = r.shape()[0];
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let v = r[[a, b, c, d]];
                            worst = worst
                                .max((v + r[[b, a, c, d]]).abs())
                                .max((v + r[[a, b, d, c]]).abs())
                                .max((v - r[[c, d, a, b]]).abs())
                                .max((v + r[[a, c, d, b]] + r[[a, d, b, c]]).abs());
                        }
                    }
                }
            }
            count += 1;
        }
    }
    assert_eq!(count, 100);
    assert!(worst < 1e-10, "worst symmetry defect {worst:e}");
}

#[test]
fn second_bianchi_on_conformal_model() {
    let m = load_model("conformal_cp1xcp1").unwrap();
    let mut largest = 0.0f64;
    for p in m.sample_points(5, 3) {
        let c = curvature(&m, &p, 1).unwrap();
        let dr = c.d_riemann.unwrap();
        largest = largest.max(max_abs(dr.iter().copied()));
        let n = 4;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        for e in 0..n {
                            let s = dr[[a, b, cc, d, e]] + dr[[a, b, d, e, cc]] + dr[[a, b, e, cc, d]];
                            worst = worst.max(s.abs());
                        }
                    }
                }
            }
        }
        assert!(worst < 1e-9, "second Bianchi defect {worst:e}");
    }
    // the check is vacuous on a symmetric space
    assert!(largest > 1e-2, "max |dR| = {largest:e}");
}

#[test]
fn sectional_is_gl2_invariant() {
    let m = load_model("conformal_cp1xcp1").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in m.sample_points(4, 9) {
        let c = curvature(&m, &p, 0).unwrap();
        for _ in 0..25 {
            let x = gaussian(&mut rng, 4);
            let y = gaussian(&mut rng, 4);
            let (a, b, cc, d) = (1.3, -0.4, 0.7, 2.1);
            let u: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
            let v: Vec<f64> = x.iter().zip(&y).map(|(p, q)| cc * p + d * q).collect();
            let s0 = sectional(&c, &x, &y).unwrap();
            let s1 = sectional(&c, &u, &v).unwrap();
            assert!((s0 - s1).abs() < 1e-10 * s0.abs().max(1.0));
        }
    }
}

#[test]
fn parallel_vectors_are_rejected() {
    let m = load_model("cp2").unwrap();
    let c = curvature(&m, &ChartPoint::origin(4), 0).unwrap();
    let x = [1.0, 2.0, 0.0, 0.0];
    let y = [2.0, 4.0, 0.0, 0.0];
    assert!(sectional(&c, &x, &y).is_err());
}

#[test]
fn kahler_curvature_is_j_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for name in ["cp2", "ch2", "cp1xcp1", "cp3"] {
        let m = load_model(name).unwrap();
        let n = m.dim();
        for p in m.sample_points(3, 2) {
            let c = curvature(&m, &p, 0).unwrap();
            let j = j_in_frame(&m, &p, &c.frame).unwrap().unwrap();
            for _ in 0..20 {
                let v: Vec<Vec<f64>> = (0..4).map(|_| gaussian(&mut rng, n)).collect();
                let a = c.r(&v[0], &v[1], &v[2], &v[3]);
                let b = c.r(&matvec(&j, &v[0]), &matvec(&j, &v[1]), &v[2], &v[3]);
                assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "{name}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn symmetric_spaces_have_parallel_curvature() {
    for name in ["cp2", "ch2", "cp1xcp1", "s4"] {
        let m = load_model(name).unwrap();
        for p in m.sample_points(3, 4) {
            let c = curvature(&m, &p, 2).unwrap();
            let d1 = max_abs(c.d_riemann.unwrap().iter().copied());
            let d2 = max_abs(c.d2_riemann.unwrap().iter().copied());
            assert!(d1 < 1e-9 && d2 < 1e-8, "{name}: |dR| = {d1:e}, |d2R| = {d2:e}");
        }
    }
}

#[test]
fn invariants_agree_across_charts() {
    let m = load_model("cp1").unwrap();
    assert!(m.chart_count() >= 2);
    for coords in [vec![0.3, -0.2], vec![1.5, 0.4]] {
        let c = curvature(&m, &ChartPoint::new(1, coords), 1).unwrap();
        assert!((c.scalar - 2.0).abs() < 1e-10, "scalar {}", c.scalar);
        assert!((c.riemann[[0, 1, 0, 1]] - 1.0).abs() < 1e-10);
        assert!(max_abs(c.d_riemann.unwrap().iter().copied()) < 1e-10);
    }
}

fn black_box_sphere() -> ModelManifold {
    // stereographic unit 3-sphere, metric given only as values
    let metric = Arc::new(|x: &[f64]| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let f = 4.0 / (1.0 + r2).powi(2);
        Array2::from_diag(&ndarray::Array1::from_elem(x.len(), f))
    });
    ModelManifold::from_black_box("bb_s3", 3, 1.0, metric)
}

#[test]
fn black_box_metric_reproduces_closed_form() {
    let m = black_box_sphere();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for p in [vec![0.0, 0.0, 0.0], vec![0.2, -0.1, 0.3]] {
        let c = curvature(&m, &ChartPoint::new(0, p), 0).unwrap();
        assert!((c.scalar - 6.0).abs() < 1e-5, "scalar {}", c.scalar);
        for _ in 0..10 {
            let x = unit(&mut rng, 3);
            let y = unit(&mut rng, 3);
            assert!((sectional(&c, &x, &y).unwrap() - 1.0).abs() < 1e-5);
        }
    }
}

#[test]
fn complex_hyperbolic_is_negated_fubini_study_at_origin() {
    let o = ChartPoint::origin(4);
    let cp = curvature(&load_model("cp2").unwrap(), &o, 0).unwrap();
    let ch = curvature(&load_model("ch2").unwrap(), &o, 0).unwrap();
    let dev = max_abs(cp.riemann.iter().zip(ch.riemann.iter()).map(|(a, b)| a + b));
    assert!(dev < 1e-12, "{dev:e}");
}

#[test]
fn curvature_scales_inversely_with_metric() {
    let base = make_model(&ModelSpec::fubini_study(2, 1.0)).unwrap();
    let scaled = make_model(&ModelSpec::scaled(2.0, ModelSpec::fubini_study(2, 1.0))).unwrap();
    let p = ChartPoint::new(0, vec![0.3, -0.1, 0.2, 0.4]);
    let a = curvature(&base, &p, 0).unwrap();
    let b = curvature(&scaled, &p, 0).unwrap();
    // same conformal frame up to a factor, so frame components scale by 1/λ²
    let dev = max_abs(a.riemann.iter().zip(b.riemann.iter()).map(|(x, y)| x / 4.0 - y));
    assert!(dev < 1e-12, "{dev:e}");
    assert!((a.scalar / 4.0 - b.scalar).abs() < 1e-12);
}

#[test]
fn einstein_constant_detects_non_einstein() {
    let m = load_model("conformal_cp1xcp1").unwrap();
    assert!(geometry::einstein_constant(&m, 4, 1e-8).is_err());
    let lam = geometry::einstein_constant(&load_model("cp2").unwrap(), 4, 1e-8).unwrap();
    assert!((lam - 1.5).abs() < 1e-10);
}

#[test]
fn points_outside_the_chart_are_rejected() {
    let m = load_model("ch2").unwrap();
    assert!(curvature(&m, &ChartPoint::new(0, vec![0.9, 0.5, 0.0, 0.0]), 0).is_err());
    assert!(curvature(&m, &ChartPoint::new(0, vec![0.1, 0.0]), 0).is_err());
}
