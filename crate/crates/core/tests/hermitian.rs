mod common;

use kahler_core::geometry::{curvature, curvature_with_seed, metric_jet, ChartPoint};
use kahler_core::hermitian::{
    bisectional, complex_structure, holomorphic_sec, j_in_frame, nabla_j, quartic_form, star_curvature,
    validate_hermitian, PointData,
};
use kahler_core::models::{load_model, ModelManifold};
use ndarray::{Array2, Array3};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{gaussian, matvec, random_unitary_real, unit};

fn point_data(name: &str, idx: usize) -> (ModelManifold, PointData) {
    let m = load_model(name).unwrap();
    let p = m.sample_points(idx + 1, 21).remove(idx);
    let pd = PointData::new(&m, &p, 0).unwrap();
    (m, pd)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn holomorphic_curvature_symmetries(model in prop::sample::select(vec!["cp2", "cp1xcp1", "conformal_cp1xcp1", "cp3"]),
                                        idx in 0usize..4, seed in any::<u64>()) {
        let (_, pd) = point_data(model, idx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = unit(&mut rng, pd.dim());
        let jx = matvec(&pd.j, &x);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let h = holomorphic_sec(&pd.curv, &pd.j, &x).unwrap();
        prop_assert!((h - holomorphic_sec(&pd.curv, &pd.j, &jx).unwrap()).abs() < 1e-10);
        prop_assert!((h - holomorphic_sec(&pd.curv, &pd.j, &neg).unwrap()).abs() < 1e-10);
        prop_assert!((h - bisectional(&pd.curv, &pd.j, &x, &x).unwrap()).abs() < 1e-10);
        let q = quartic_form(&pd.curv, &pd.j).unwrap();
        prop_assert!((q.eval(&x) - h).abs() < 1e-10);
    }

    #[test]
    fn bisectional_is_symmetric_on_kahler(seed in any::<u64>()) {
        let (_, pd) = point_data("cp2", 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = unit(&mut rng, 4);
        let y = unit(&mut rng, 4);
        let a = bisectional(&pd.curv, &pd.j, &x, &y).unwrap();
        let b = bisectional(&pd.curv, &pd.j, &y, &x).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn non_unit_input_is_rejected() {
    let (_, pd) = point_data("cp2", 0);
    assert!(holomorphic_sec(&pd.curv, &pd.j, &[1.0, 1.0, 0.0, 0.0]).is_err());
    assert!(bisectional(&pd.curv, &pd.j, &[1.0, 0.0, 0.0, 0.0], &[0.5, 0.0, 0.0, 0.0]).is_err());
}

#[test]
fn quartic_form_matches_direct_evaluation() {
    for name in ["cp2", "conformal_cp1xcp1", "cp3", "torus4_twisted"] {
        let (_, pd) = point_data(name, 2);
        let q = quartic_form(&pd.curv, &pd.j).unwrap();
        let dev = q.max_deviation(
            |v| {
                let jv = matvec(&pd.j, v);
                pd.curv.r(v, &jv, v, &jv)
            },
            1000,
            99,
        );
        assert!(dev < 1e-12, "{name}: {dev:e}");
    }
}

#[test]
fn star_ricci_is_einstein_on_kahler_einstein_models() {
    for name in ["cp1", "cp2", "cp3", "ch2", "cp1xcp1", "cp2_c2"] {
        let m = load_model(name).unwrap();
        let lambda = m.metadata().einstein.unwrap();
        for p in m.sample_points(3, 6) {
            let pd = PointData::new(&m, &p, 0).unwrap();
            let st = star_curvature(&pd.curv, &pd.j).unwrap();
            let n = pd.dim();
            for a in 0..n {
                for b in 0..n {
                    let want = if a == b { lambda } else { 0.0 };
                    assert!((st.star_ricci[[a, b]] - want).abs() < 1e-10, "{name}");
                }
            }
            assert!((st.star_scalar - pd.curv.scalar).abs() < 1e-10);
        }
    }
}

#[test]
fn scalar_and_star_scalar_do_not_depend_on_the_frame() {
    let m = load_model("conformal_cp1xcp1").unwrap();
    let p = m.sample_points(1, 4).remove(0);
    let base = PointData::new(&m, &p, 0).unwrap();
    let s0 = star_curvature(&base.curv, &base.j).unwrap().star_scalar;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let seed = gaussian(&mut rng, 4);
        let c = curvature_with_seed(&m, &p, 0, Some(&seed)).unwrap();
        let j = j_in_frame(&m, &p, &c.frame).unwrap().unwrap();
        assert!((c.scalar - base.curv.scalar).abs() < 1e-10);
        assert!((star_curvature(&c, &j).unwrap().star_scalar - s0).abs() < 1e-10);
        // unitary change of an adapted frame keeps it adapted
        let q = random_unitary_real(&mut rng, 4);
        let rc = base.curv.rotated(&q, true);
        let rj = j_in_frame(&m, &p, &rc.frame).unwrap().unwrap();
        assert!((star_curvature(&rc, &rj).unwrap().star_scalar - s0).abs() < 1e-10);
    }
}

/// `(∇_k J)^i_j = ∂_k J^i_j + Γ^i_{kl} J^l_j − Γ^l_{kj} J^i_l`, from central
/// differences of J and metric jets of order one.
fn nabla_j_oracle(m: &ModelManifold, p: &ChartPoint) -> Array3<f64> {
    let n = m.dim();
    let g = metric_jet(m, p, 1).unwrap();
    let gv = g.values();
    let ginv = {
        let a = nalgebra::DMatrix::from_fn(n, n, |i, j| gv[[i, j]]);
        let inv = a.try_inverse().unwrap();
        Array2::from_shape_fn((n, n), |(i, j)| inv[(i, j)])
    };
    let dg = |i: usize, j: usize, k: usize| {
        let mut alpha = vec![0u8; n];
        alpha[k] = 1;
        g.partial(i, j, &alpha)
    };
    let gamma = |i: usize, k: usize, l: usize| {
        (0..n)
            .map(|m_| 0.5 * ginv[[i, m_]] * (dg(m_, k, l) + dg(m_, l, k) - dg(k, l, m_)))
            .sum::<f64>()
    };
    let h = 1e-5;
    let j0 = complex_structure(m, p).unwrap().unwrap();
    let dj: Vec<Array2<f64>> = (0..n)
        .map(|k| {
            let mut up = p.coords.clone();
            let mut dn = p.coords.clone();
            up[k] += h;
            dn[k] -= h;
            let ju = complex_structure(m, &ChartPoint::new(p.chart, up)).unwrap().unwrap();
            let jd = complex_structure(m, &ChartPoint::new(p.chart, dn)).unwrap().unwrap();
            (ju - jd) / (2.0 * h)
        })
        .collect();
    Array3::from_shape_fn((n, n, n), |(k, i, j)| {
        let mut v = dj[k][[i, j]];
        for l in 0..n {
            v += gamma(i, k, l) * j0[[l, j]] - gamma(l, k, j) * j0[[i, l]];
        }
        v
    })
}

#[test]
fn nabla_j_matches_finite_difference_oracle() {
    for name in ["conformal_cp1xcp1", "torus4_twisted", "cp2"] {
        let m = load_model(name).unwrap();
        for p in m.sample_points(3, 13) {
            let curv = curvature(&m, &p, 0).unwrap();
            let lib = nabla_j(&m, &curv).unwrap();
            let chart = nabla_j_oracle(&m, &p);
            let g = metric_jet(&m, &p, 0).unwrap().values();
            let e = &curv.frame.vectors;
            let n = m.dim();
            let mut worst = 0.0f64;
            // frame layout: [c, a, b] = g((∇_{e_c} J) e_b, e_a)
            for c in 0..n {
                let mut dj = Array2::<f64>::zeros((n, n));
                for k in 0..n {
                    dj = dj + chart.index_axis(ndarray::Axis(0), k).to_owned() * e[[k, c]];
                }
                let f = e.t().dot(&g).dot(&dj).dot(e);
                for a in 0..n {
                    for b in 0..n {
                        worst = worst.max((f[[a, b]] - lib[[c, a, b]]).abs());
                    }
                }
            }
            assert!(worst < 1e-6, "{name}: {worst:e}");
        }
    }
}

#[test]
fn hermitian_structures_validate() {
    for name in ["cp2", "conformal_cp1xcp1", "torus4_twisted"] {
        let m = load_model(name).unwrap();
        let p = m.sample_points(1, 2).remove(0);
        let d = validate_hermitian(&m, &p).unwrap();
        assert!(d.j_squared < 1e-12 && d.compatibility < 1e-12, "{name}: {d:?}");
        if m.metadata().kahler {
            assert!(d.nabla_j < 1e-10, "{name}: {d:?}");
        }
    }
    let conf = load_model("conformal_cp1xcp1").unwrap();
    // du vanishes at the bump centre, so probe off-centre
    let mut off = conf.sampling_center();
    off[0] += 0.2;
    assert!(validate_hermitian(&conf, &ChartPoint::new(0, off)).unwrap().nabla_j > 1e-3);
    assert!(validate_hermitian(&load_model("s4").unwrap(), &ChartPoint::origin(4)).is_err());
}
