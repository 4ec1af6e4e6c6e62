//! Horizontal and vertical gradients of `H` on the unit sphere bundle,
//! the operator `L`, and the four-dimensional identities.
//!
//! All vectors are frame components at the base point. `L` is evaluated
//! invariantly:
//!
//! ```text
//! L(Φ)(x) = Σ_e (∇²_{e e} Φ)(x) + ½ Σ_{i,j≥2} h_ij(x) (Hess Φ − kΦ δ)_ij
//! ```
//!
//! with `h_ij = R(e_i, x, e_j, x)` and `k` the degree of `Φ`. Since
//! `h(x, ·) = 0`, the `i, j ≥ 2` sum equals the full contraction minus
//! `kΦ Ric(x, x)`. The horizontal part assumes `∇J = 0`.

use std::time::Instant;

use ndarray::{s, Array2, Array4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiber::{self, fiber_average};
use crate::geometry::{multilinear, ChartPoint, CurvatureData};
use crate::hermitian::{self, adapted_basis, PointData};
use crate::linalg::{dot, matvec, norm};
use crate::models::ModelManifold;
use crate::poly::Poly;
use crate::report::VerificationReport;

/// A point of the unit sphere bundle.
#[derive(Clone, Debug, Serialize)]
pub struct UnitTangent {
    pub base: ChartPoint,
    /// Frame components, unit length.
    pub x: Vec<f64>,
}

impl UnitTangent {
    pub fn new(base: ChartPoint, x: Vec<f64>) -> Result<Self> {
        let nx = norm(&x);
        if (nx - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnit(nx));
        }
        Ok(UnitTangent { base, x })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftedGradient {
    pub horizontal: Vec<f64>,
    pub vertical: Vec<f64>,
}

/// `grad^v H = 4 Σ_{i≥2} R(x, Jx, x, J e_i) e_i` in a basis with `e_1 = x`.
pub fn grad_v_h(curv: &CurvatureData, j: &Array2<f64>, x: &[f64]) -> Result<Vec<f64>> {
    let q = adapted_basis(x, j)?;
    let n = x.len();
    let jx = matvec(j, x);
    let mut out = vec![0.0; n];
    for i in 1..n {
        let ei = q.column(i).to_vec();
        let jei = matvec(j, &ei);
        let c = 4.0 * curv.r(x, &jx, x, &jei);
        out.iter_mut().zip(&ei).for_each(|(o, e)| *o += c * e);
    }
    Ok(out)
}

/// Component `e`: `(∇_e R)(x, Jx, x, Jx) + 2 R(x, (∇_e J)x, x, Jx)`.
pub fn grad_h_h(curv: &CurvatureData, j: &Array2<f64>, nabla_j: &ndarray::Array3<f64>, x: &[f64]) -> Result<Vec<f64>> {
    let dr = curv.d_riemann.as_ref().ok_or(Error::MissingDerivative(1))?;
    let n = x.len();
    let jx = matvec(j, x);
    Ok((0..n)
        .map(|e| {
            let dre: Array4<f64> = dr.slice(s![.., .., .., .., e]).to_owned();
            let djx = matvec(&nabla_j.index_axis(ndarray::Axis(0), e).to_owned(), x);
            multilinear(&dre, x, &jx, x, &jx) + 2.0 * curv.r(x, &djx, x, &jx)
        })
        .collect())
}

pub fn lifted_gradient(pd: &PointData, x: &[f64]) -> Result<LiftedGradient> {
    Ok(LiftedGradient {
        horizontal: grad_h_h(&pd.curv, &pd.j, &pd.nabla_j, x)?,
        vertical: grad_v_h(&pd.curv, &pd.j, x)?,
    })
}

/// `Σ_e ∇²_{ee} R` as a rank-4 array.
fn rough_laplacian_r(curv: &CurvatureData) -> Result<Array4<f64>> {
    let d2 = curv.d2_riemann.as_ref().ok_or(Error::MissingDerivative(2))?;
    let n = curv.dim();
    let mut out = Array4::<f64>::zeros((n, n, n, n));
    for e in 0..n {
        out += &d2.slice(s![.., .., .., .., e, e]);
    }
    Ok(out)
}

/// `Δ^h H(x) = Σ_e (∇²_{ee} R)(x, Jx, x, Jx)`.
pub fn horizontal_laplacian_h(curv: &CurvatureData, j: &Array2<f64>, x: &[f64]) -> Result<f64> {
    let lap = rough_laplacian_r(curv)?;
    let jx = matvec(j, x);
    Ok(multilinear(&lap, x, &jx, x, &jx))
}

fn check_unit(x: &[f64]) -> Result<()> {
    let nx = norm(x);
    if (nx - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit(nx));
    }
    Ok(())
}

/// `Σ_ab h_ab(x) M_ab − k Φ(x) Ric(x, x)`, halved.
fn vertical_part(curv: &CurvatureData, x: &[f64], hess: &Array2<f64>, k: f64, phi: f64) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for a in 0..n {
        let mut ea = vec![0.0; n];
        ea[a] = 1.0;
        for b in 0..n {
            let mut eb = vec![0.0; n];
            eb[b] = 1.0;
            s += curv.r(&ea, x, &eb, x) * hess[[a, b]];
        }
    }
    let ric_xx = dot(x, &matvec(&curv.ricci, x));
    0.5 * (s - k * phi * ric_xx)
}

/// `L(H)` at `x`.
pub fn l_apply_h(curv: &CurvatureData, j: &Array2<f64>, x: &[f64]) -> Result<f64> {
    check_unit(x)?;
    let q = hermitian::quartic_form(curv, j)?;
    let dh = horizontal_laplacian_h(curv, j, x)?;
    Ok(dh + vertical_part(curv, x, &q.hessian(x), 4.0, q.eval(x)))
}

/// `L(H²)` at `x`, with `Δ^h(H²) = 2HΔ^hH + 2‖grad^h H‖²`.
pub fn l_apply_h_squared(curv: &CurvatureData, j: &Array2<f64>, x: &[f64]) -> Result<f64> {
    check_unit(x)?;
    let q = hermitian::quartic_form(curv, j)?;
    let f = q.eval(x);
    let dh = horizontal_laplacian_h(curv, j, x)?;
    let n = x.len();
    let gh = grad_h_h(curv, j, &ndarray::Array3::zeros((n, n, n)), x)?;
    let horizontal = 2.0 * f * dh + 2.0 * dot(&gh, &gh);
    let g = q.gradient(x);
    let hf = q.hessian(x);
    let hess = Array2::from_shape_fn((n, n), |(a, b)| 2.0 * g[a] * g[b] + 2.0 * f * hf[[a, b]]);
    Ok(horizontal + vertical_part(curv, x, &hess, 8.0, f * f))
}

/// `L(H²) = 2‖grad^h H‖² + R(x, G, x, G)` with `G = grad^v H`.
pub fn lemma23_check(curv: &CurvatureData, j: &Array2<f64>, x: &[f64], tol: f64) -> Result<VerificationReport> {
    let started = Instant::now();
    let lhs = l_apply_h_squared(curv, j, x)?;
    let n = x.len();
    let gh = grad_h_h(curv, j, &ndarray::Array3::zeros((n, n, n)), x)?;
    let g = grad_v_h(curv, j, x)?;
    let r_xgxg = curv.r(x, &g, x, &g);
    let rhs = 2.0 * dot(&gh, &gh) + r_xgxg;
    let gg = dot(&g, &g);
    let den = dot(x, x) * gg - dot(x, &g).powi(2);
    let sec_form = if den > 1e-24 { r_xgxg / den * gg } else { 0.0 };
    let mut report = VerificationReport::eq("lemma23_pointwise", lhs, rhs, tol)
        .with_note(format!("R(x,G,x,G) = {r_xgxg:e}, sec(x,G)|G|^2 = {sec_form:e}"));
    if (sec_form - r_xgxg).abs() > tol {
        report = report.fail_with(format!(
            "curvature term forms disagree: R(x,G,x,G) = {r_xgxg:e}, sec(x,G)|G|^2 = {sec_form:e}"
        ));
    }
    Ok(report.with_point(&curv.point.coords).with_runtime(started))
}

fn quadratic_poly(m: &Array2<f64>) -> Poly {
    let n = m.nrows();
    let mut p = Poly::zero(n);
    for ((a, b), &w) in m.indexed_iter() {
        if w != 0.0 {
            let mut e = vec![0u8; n];
            e[a] += 1;
            e[b] += 1;
            p.add_term(e, w);
        }
    }
    p
}

/// `L(H²)` as a polynomial on the fiber (valid on the unit sphere).
pub fn l_h_squared_poly(pd: &PointData) -> Result<Poly> {
    let curv = &pd.curv;
    let n = pd.dim();
    let f = pd.quartic()?.to_poly();
    let dh = hermitian::quartic_poly(&hermitian::j_twisted(&rough_laplacian_r(curv)?, &pd.j));
    let mut horizontal = (&f * &dh).scale(2.0);
    let kahler_pd = PointData {
        curv: pd.curv.clone(),
        j: pd.j.clone(),
        nabla_j: ndarray::Array3::zeros((n, n, n)),
    };
    horizontal = &horizontal + &fiber::gradh_sq_poly(&kahler_pd)?.scale(2.0);
    let f2 = &f * &f;
    let mut contraction = Poly::zero(n);
    for a in 0..n {
        let fa = f2.partial(a);
        for b in 0..n {
            let h_ab = quadratic_poly(&curv.riemann.slice(s![a, .., b, ..]).to_owned());
            if h_ab.is_empty() {
                continue;
            }
            contraction = &contraction + &(&h_ab * &fa.partial(b));
        }
    }
    let ric = quadratic_poly(&curv.ricci);
    let vertical = (&contraction - &(&f2 * &ric).scale(8.0)).scale(0.5);
    Ok(&horizontal + &vertical)
}

/// Fiber integral of `L(H²)` vanishes on a homogeneous model.
pub fn lemma23_integral_check(model: &ModelManifold, tol: f64) -> Result<VerificationReport> {
    let started = Instant::now();
    fiber::einstein_lambda(model)?;
    let v = fiber::homogeneous_value(model, |p| {
        let pd = PointData::new(model, p, 2)?;
        Ok(vec![fiber_average(&l_h_squared_poly(&pd)?)])
    })?;
    Ok(VerificationReport::eq("lemma23_integral", v[0], 0.0, tol)
        .with_model(model.name())
        .with_runtime(started))
}

/// Checks on a Kähler–Einstein surface at `x`: the trace identity, the
/// second-variation expression against `Δ^h H`, and (given `zeta`, in a
/// factor-aligned frame) the quartic expansion on a product of curves.
pub fn surface_identities(
    curv: &CurvatureData,
    j: &Array2<f64>,
    x: &[f64],
    zeta: Option<&[f64]>,
    tol: f64,
) -> Result<Vec<VerificationReport>> {
    if curv.dim() != 4 {
        return Err(Error::WrongDimension {
            expected: 4,
            got: curv.dim(),
        });
    }
    let started = Instant::now();
    let q = adapted_basis(x, j)?;
    let e: Vec<Vec<f64>> = (0..4).map(|a| q.column(a).to_vec()).collect();
    let r = |a: usize, b: usize, c: usize, d: usize| curv.r(&e[a], &e[b], &e[c], &e[d]);
    let h1 = r(0, 1, 0, 1);
    let b12 = r(0, 1, 2, 3);
    let lambda = curv.scalar / 4.0;
    let mut out = vec![VerificationReport::eq("surface_trace", h1 + b12, lambda, tol)];

    let expr = (h1 - b12) * b12 - 4.0 * r(0, 2, 0, 2) * r(0, 3, 0, 3) + 4.0 * r(0, 2, 0, 3).powi(2);
    let dh = horizontal_laplacian_h(curv, j, x)?;
    out.push(
        VerificationReport::eq("surface_second_variation", dh, expr, tol)
            .with_note(format!("H1 = {h1}, B12 = {b12}")),
    );

    if let Some(z) = zeta {
        let mixed = (0..2)
            .flat_map(|a| (2..4).map(move |b| (a, b)))
            .map(|(a, b)| j[[a, b]].abs().max(j[[b, a]].abs()))
            .fold(0.0, f64::max);
        if mixed > 1e-12 {
            return Err(Error::FrameNotAdapted);
        }
        let unit = |k: usize| {
            let mut v = vec![0.0; 4];
            v[k] = 1.0;
            v
        };
        let h_1 = hermitian::holomorphic_sec(curv, j, &unit(0))?;
        let h_2 = hermitian::holomorphic_sec(curv, j, &unit(2))?;
        let nz = norm(z);
        let a: Vec<f64> = z.iter().map(|v| v / nz).collect();
        let direct = hermitian::holomorphic_sec(curv, j, &a)?;
        let corrected = (a[0] * a[0] + a[1] * a[1]).powi(2) * h_1 + (a[2] * a[2] + a[3] * a[3]).powi(2) * h_2;
        let literal = (a[0].powi(4) + a[1].powi(4)) * h_1 + (a[2].powi(4) + a[3].powi(4)) * h_2;
        out.push(
            VerificationReport::eq("surface_polarization", direct, corrected, tol).with_note(format!(
                "fourth-power form without the cross term deviates by {:e}",
                (direct - literal).abs()
            )),
        );
    }
    Ok(out
        .into_iter()
        .map(|r| r.with_point(&curv.point.coords).with_runtime(started))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_model, ModelSpec};

    fn cp1xcp1() -> ModelManifold {
        make_model(&ModelSpec::product(vec![
            ModelSpec::fubini_study(1, 1.0),
            ModelSpec::fubini_study(1, 1.0),
        ]))
        .unwrap()
    }

    #[test]
    fn l_vanishes_on_product() {
        let m = cp1xcp1();
        let pd = PointData::new(&m, &ChartPoint::new(0, vec![0.2, 0.1, -0.4, 0.3]), 2).unwrap();
        let x = [0.5, -0.5, 0.5, 0.5];
        assert!(l_apply_h(&pd.curv, &pd.j, &x).unwrap().abs() < 1e-9);
    }

    #[test]
    fn vertical_gradient_vanishes_at_pure_direction() {
        let m = cp1xcp1();
        let pd = PointData::new(&m, &ChartPoint::origin(4), 0).unwrap();
        let g = grad_v_h(&pd.curv, &pd.j, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(norm(&g) < 1e-12);
        let g = grad_v_h(&pd.curv, &pd.j, &[0.5, 0.0, 0.75f64.sqrt(), 0.0]).unwrap();
        assert!(norm(&g) > 0.1);
        assert!(dot(&g, &[0.5, 0.0, 0.75f64.sqrt(), 0.0]).abs() < 1e-12);
    }

    #[test]
    fn surface_needs_dimension_four() {
        let m = make_model(&ModelSpec::fubini_study(3, 1.0)).unwrap();
        let pd = PointData::new(&m, &ChartPoint::origin(6), 2).unwrap();
        let mut x = vec![0.0; 6];
        x[0] = 1.0;
        assert!(matches!(
            surface_identities(&pd.curv, &pd.j, &x, None, 1e-9),
            Err(Error::WrongDimension { .. })
        ));
    }
}
