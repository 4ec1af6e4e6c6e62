//! Almost-complex structures in frame indices, holomorphic and bisectional
//! curvature, the quartic form `v ↦ R(v, Jv, v, Jv)`, star-Ricci and ∇J.

use ndarray::{Array2, Array3, Array4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, ChartPoint, CurvatureData, Frame};
use crate::linalg::{dot, matvec, norm};
use crate::models::ModelManifold;
use crate::poly::Poly;

const UNIT_TOL: f64 = 1e-10;

/// J in chart components at `point`.
pub fn complex_structure(model: &ModelManifold, point: &ChartPoint) -> Result<Option<Array2<f64>>> {
    Ok(model.complex_structure_jets(point, 0)?.map(|j| j.values()))
}

/// `Jf[a, b] = g(J e_b, e_a)`, the frame matrix of J.
pub fn j_in_frame(model: &ModelManifold, point: &ChartPoint, frame: &Frame) -> Result<Option<Array2<f64>>> {
    let Some(j) = complex_structure(model, point)? else {
        return Ok(None);
    };
    let g = model.metric_jets(point, 0)?.values();
    let e = &frame.vectors;
    Ok(Some(e.t().dot(&g).dot(&j).dot(e)))
}

fn check_unit(x: &[f64]) -> Result<()> {
    let nx = norm(x);
    if (nx - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit(nx));
    }
    Ok(())
}

fn check_dims(curv: &CurvatureData, j: &Array2<f64>) -> Result<()> {
    if j.nrows() != curv.dim() || j.ncols() != curv.dim() {
        return Err(Error::DimensionMismatch {
            expected: curv.dim(),
            got: j.nrows(),
        });
    }
    Ok(())
}

/// `H(x) = R(x, Jx, x, Jx)` for a unit frame vector `x`.
pub fn holomorphic_sec(curv: &CurvatureData, j: &Array2<f64>, x: &[f64]) -> Result<f64> {
    check_dims(curv, j)?;
    check_unit(x)?;
    let jx = matvec(j, x);
    Ok(curv.r(x, &jx, x, &jx))
}

/// `B(x, y) = R(x, Jx, y, Jy)` for unit frame vectors.
pub fn bisectional(curv: &CurvatureData, j: &Array2<f64>, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(curv, j)?;
    check_unit(x)?;
    check_unit(y)?;
    let jx = matvec(j, x);
    let jy = matvec(j, y);
    Ok(curv.r(x, &jx, y, &jy))
}

/// Fully symmetric quartic `F(v) = Σ W_ijkl v_i v_j v_k v_l`.
#[derive(Clone, Debug, Serialize)]
pub struct QuarticForm {
    pub coeffs: Array4<f64>,
}

const PERMS4: [[usize; 4]; 24] = [
    [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
    [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
    [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
    [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
];

impl QuarticForm {
    /// Symmetrizes an arbitrary rank-4 coefficient array.
    pub fn symmetrize(t: &Array4<f64>) -> Self {
        let n = t.shape()[0];
        let coeffs = Array4::from_shape_fn((n, n, n, n), |(a, b, c, d)| {
            let idx = [a, b, c, d];
            PERMS4
                .iter()
                .map(|p| t[[idx[p[0]], idx[p[1]], idx[p[2]], idx[p[3]]]])
                .sum::<f64>()
                / 24.0
        });
        QuarticForm { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.shape()[0]
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        geometry::multilinear(&self.coeffs, v, v, v, v)
    }

    /// `∇F(v) = 4 W(·, v, v, v)`.
    pub fn gradient(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut g = vec![0.0; n];
        for (a, ga) in g.iter_mut().enumerate() {
            let mut s = 0.0;
            for b in 0..n {
                for c in 0..n {
                    let vbc = v[b] * v[c];
                    for d in 0..n {
                        s += self.coeffs[[a, b, c, d]] * vbc * v[d];
                    }
                }
            }
            *ga = 4.0 * s;
        }
        g
    }

    /// `Hess F(v) = 12 W(·, ·, v, v)`.
    pub fn hessian(&self, v: &[f64]) -> Array2<f64> {
        let n = self.dim();
        Array2::from_shape_fn((n, n), |(a, b)| {
            let mut s = 0.0;
            for c in 0..n {
                for d in 0..n {
                    s += self.coeffs[[a, b, c, d]] * v[c] * v[d];
                }
            }
            12.0 * s
        })
    }

    pub fn to_poly(&self) -> Poly {
        quartic_poly(&self.coeffs)
    }

    /// Largest deviation between `eval` and `reference` over `count`
    /// seeded Gaussian vectors, relative to `‖v‖⁴`.
    pub fn max_deviation(&self, reference: impl Fn(&[f64]) -> f64, count: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim();
        (0..count)
            .map(|_| {
                let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let s = dot(&v, &v).powi(2);
                (self.eval(&v) - reference(&v)).abs() / s.max(1e-300)
            })
            .fold(0.0, f64::max)
    }
}

/// `Σ t_abcd v_a v_b v_c v_d` as a polynomial.
pub fn quartic_poly(t: &Array4<f64>) -> Poly {
    let n = t.shape()[0];
    let mut p = Poly::zero(n);
    for ((a, b, c, d), &w) in t.indexed_iter() {
        if w != 0.0 {
            let mut e = vec![0u8; n];
            e[a] += 1;
            e[b] += 1;
            e[c] += 1;
            e[d] += 1;
            p.add_term(e, w);
        }
    }
    p
}

/// Coefficients of `v ↦ T(v, Jv, v, Jv)` before symmetrization.
pub(crate) fn j_twisted(t: &Array4<f64>, j: &Array2<f64>) -> Array4<f64> {
    twisted(t, j, j)
}

/// `out[a,b,c,d] = Σ t[a,b',c,d'] m1[b',b] m2[d',d]`, the coefficients of
/// `v ↦ T(v, M1 v, v, M2 v)`.
pub(crate) fn twisted(t: &Array4<f64>, m1: &Array2<f64>, m2: &Array2<f64>) -> Array4<f64> {
    let n = t.shape()[0];
    let mut half = Array4::<f64>::zeros((n, n, n, n));
    for ((a, bp, c, d), &v) in t.indexed_iter() {
        if v == 0.0 {
            continue;
        }
        for b in 0..n {
            let w = m1[[bp, b]];
            if w != 0.0 {
                half[[a, b, c, d]] += v * w;
            }
        }
    }
    let mut out = Array4::<f64>::zeros((n, n, n, n));
    for ((a, b, c, dp), &v) in half.indexed_iter() {
        if v == 0.0 {
            continue;
        }
        for d in 0..n {
            let w = m2[[dp, d]];
            if w != 0.0 {
                out[[a, b, c, d]] += v * w;
            }
        }
    }
    out
}

pub fn quartic_form(curv: &CurvatureData, j: &Array2<f64>) -> Result<QuarticForm> {
    check_dims(curv, j)?;
    let q = QuarticForm::symmetrize(&j_twisted(&curv.riemann, j));
    let scale = curv.riemann.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let dev = q.max_deviation(
        |v| {
            let jv = matvec(j, v);
            curv.r(v, &jv, v, &jv)
        },
        8,
        0x4f,
    );
    debug_assert!(dev <= 1e-10 * scale, "quartic form deviates by {dev:e}");
    Ok(q)
}

#[derive(Clone, Debug, Serialize)]
pub struct StarCurvature {
    pub star_ricci: Array2<f64>,
    pub star_scalar: f64,
}

/// `R*_ij = Σ_a R(e_a, Je_i, e_j, Je_a)` and its trace.
pub fn star_curvature(curv: &CurvatureData, j: &Array2<f64>) -> Result<StarCurvature> {
    check_dims(curv, j)?;
    if !curv.frame.adapted {
        return Err(Error::FrameNotAdapted);
    }
    let n = curv.dim();
    let col = |i: usize| j.column(i).to_vec();
    let basis = |i: usize| {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    };
    let star_ricci = Array2::from_shape_fn((n, n), |(i, jj)| {
        (0..n)
            .map(|a| curv.r(&basis(a), &col(i), &basis(jj), &col(a)))
            .sum()
    });
    let star_scalar = (0..n).map(|i| star_ricci[[i, i]]).sum();
    Ok(StarCurvature {
        star_ricci,
        star_scalar,
    })
}

/// `(∇J)` in frame indices: `[c, a, b] = g((∇_{e_c} J) e_b, e_a)`.
pub fn nabla_j(model: &ModelManifold, curv: &CurvatureData) -> Result<Array3<f64>> {
    let point = &curv.point;
    let jj = model
        .complex_structure_jets(point, 1)?
        .ok_or(Error::NoComplexStructure)?;
    if jj.order() < 1 {
        return Err(Error::InsufficientJet { have: 0, need: 1 });
    }
    let n = curv.dim();
    let gam = &curv.coordinates.christoffel;
    let g = &curv.coordinates.metric;
    let j0 = jj.values();
    // (∇_k J)^i_j = ∂_k J^i_j + Γ^i_km J^m_j − Γ^m_kj J^i_m
    let mut unit = vec![0u8; n];
    let mut cov = Array3::<f64>::zeros((n, n, n));
    for k in 0..n {
        unit.iter_mut().for_each(|u| *u = 0);
        unit[k] = 1;
        for i in 0..n {
            for jx in 0..n {
                let mut v = jj.get(i, jx).partial(&unit);
                for m in 0..n {
                    v += gam[[i, k, m]] * j0[[m, jx]] - gam[[m, k, jx]] * j0[[i, m]];
                }
                cov[[k, i, jx]] = v;
            }
        }
    }
    let e = &curv.frame.vectors;
    let ge = g.dot(e);
    let mut out = Array3::<f64>::zeros((n, n, n));
    for c in 0..n {
        // Σ_k e[k,c] ∇_k J, then sandwich with frame
        let mut dk = Array2::<f64>::zeros((n, n));
        for k in 0..n {
            let w = e[[k, c]];
            if w != 0.0 {
                dk.scaled_add(w, &cov.index_axis(ndarray::Axis(0), k));
            }
        }
        let m = ge.t().dot(&dk).dot(e);
        out.index_axis_mut(ndarray::Axis(0), c).assign(&m);
    }
    Ok(out)
}

/// Pointwise defects of the Hermitian structure.
#[derive(Clone, Debug, Serialize)]
pub struct HermitianDiagnostics {
    pub j_squared: f64,
    pub compatibility: f64,
    pub nabla_j: f64,
}

pub fn validate_hermitian(model: &ModelManifold, point: &ChartPoint) -> Result<HermitianDiagnostics> {
    let j = complex_structure(model, point)?.ok_or(Error::NoComplexStructure)?;
    let g = model.metric_jets(point, 0)?.values();
    let n = g.nrows();
    let j2 = j.dot(&j);
    let jtgj = j.t().dot(&g).dot(&j);
    let mut j_squared: f64 = 0.0;
    let mut compatibility: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let id = if a == b { 1.0 } else { 0.0 };
            j_squared = j_squared.max((j2[[a, b]] + id).abs());
            compatibility = compatibility.max((jtgj[[a, b]] - g[[a, b]]).abs());
        }
    }
    let nabla = match geometry::curvature(model, point, 0) {
        Ok(curv) => nabla_j(model, &curv)?.iter().map(|v| v * v).sum::<f64>().sqrt(),
        Err(Error::IncompatibleStructure(_)) => f64::NAN,
        Err(e) => return Err(e),
    };
    Ok(HermitianDiagnostics {
        j_squared,
        compatibility,
        nabla_j: nabla,
    })
}

/// Curvature, J and ∇J at one point, all in the same adapted frame.
#[derive(Clone, Debug)]
pub struct PointData {
    pub curv: CurvatureData,
    pub j: Array2<f64>,
    pub nabla_j: Array3<f64>,
}

impl PointData {
    pub fn new(model: &ModelManifold, point: &ChartPoint, deriv_order: usize) -> Result<Self> {
        let curv = geometry::curvature(model, point, deriv_order)?;
        let j = j_in_frame(model, point, &curv.frame)?.ok_or(Error::NoComplexStructure)?;
        let nabla_j = nabla_j(model, &curv)?;
        Ok(PointData { curv, j, nabla_j })
    }

    pub fn dim(&self) -> usize {
        self.curv.dim()
    }

    pub fn quartic(&self) -> Result<QuarticForm> {
        quartic_form(&self.curv, &self.j)
    }
}

/// Orthonormal frame-component basis `(x, Jx, w, Jw, …)`, columns in order.
pub fn adapted_basis(x: &[f64], j: &Array2<f64>) -> Result<Array2<f64>> {
    check_unit(x)?;
    let n = x.len();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let push_pair = |cols: &mut Vec<Vec<f64>>, w: Vec<f64>| -> Result<bool> {
        let mut w = w;
        for _ in 0..2 {
            for u in cols.iter() {
                let c = dot(&w, u);
                w.iter_mut().zip(u).for_each(|(wi, ui)| *wi -= c * ui);
            }
        }
        let nw = norm(&w);
        if nw < 1e-8 {
            return Ok(false);
        }
        w.iter_mut().for_each(|v| *v /= nw);
        let mut jw = matvec(j, &w);
        for _ in 0..2 {
            for u in cols.iter().chain(std::iter::once(&w)) {
                let c = dot(&jw, u);
                jw.iter_mut().zip(u).for_each(|(wi, ui)| *wi -= c * ui);
            }
        }
        let njw = norm(&jw);
        if njw < 1e-8 {
            return Err(Error::FrameNotAdapted);
        }
        jw.iter_mut().for_each(|v| *v /= njw);
        cols.push(w);
        cols.push(jw);
        Ok(true)
    };
    push_pair(&mut cols, x.to_vec())?;
    for a in 0..n {
        if cols.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[a] = 1.0;
        push_pair(&mut cols, e)?;
    }
    Ok(Array2::from_shape_fn((n, n), |(i, a)| cols[a][i]))
}
