//! Exact integrals over the unit-sphere fiber `S_p M`.
//!
//! Every fiber integrand used here is a polynomial in the frame components
//! of the unit vector, so integrals reduce to monomial moments. Values are
//! reported per unit measure (divided by `Vol(S^{n-1})`) unless the name
//! says otherwise.

mod moments;

use std::time::Instant;

use ndarray::{s, Array2, Array4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, ChartPoint, CurvatureData};
use crate::hermitian::{self, PointData, QuarticForm};
use crate::linalg::{dot, norm};
use crate::models::ModelManifold;
use crate::poly::Poly;
use crate::report::VerificationReport;

pub use moments::{monomial_moment, sphere_volume, MomentTable};

pub const FIBER_RESTARTS: usize = 32;
const FIBER_GRAD_TOL: f64 = 1e-10;
const FIBER_ITERATION_CAP: usize = 20_000;
const HOMOGENEITY_SAMPLES: usize = 5;
const HOMOGENEITY_SPREAD: f64 = 1e-8;

/// `∫_{S^{n-1}} p`, exact.
pub fn integrate_fiber(p: &Poly) -> f64 {
    let table = MomentTable::for_dim(p.nvars());
    p.terms().map(|(e, c)| c * table.get(e)).sum()
}

/// `∫ p / Vol(S^{n-1})`.
pub fn fiber_average(p: &Poly) -> f64 {
    integrate_fiber(p) / sphere_volume(p.nvars())
}

/// `∫ Δp = r(n + r − 2) ∫ p` for `p` homogeneous of degree `r`.
pub fn homogeneous_lap_identity(p: &Poly, r: usize, tol: f64) -> Result<VerificationReport> {
    let started = Instant::now();
    if !p.is_empty() && p.homogeneous_degree() != Some(r) {
        return Err(Error::NotHomogeneous);
    }
    let n = p.nvars();
    let lhs = integrate_fiber(&p.laplacian());
    let rhs = (r * (n + r - 2)) as f64 * integrate_fiber(p);
    Ok(VerificationReport::eq("prop31_laplacian", lhs, rhs, tol)
        .with_model(&format!("poly(n={n},r={r})"))
        .with_runtime(started))
}

/// Cubic `U_k(v) = 4 R(v, Jv, v, J f_k)` for each frame direction `f_k`.
fn gradv_components(curv: &CurvatureData, j: &Array2<f64>) -> Vec<Poly> {
    let n = curv.dim();
    let t = hermitian::j_twisted(&curv.riemann, j);
    (0..n)
        .map(|k| {
            let mut p = Poly::zero(n);
            for ((a, b, c), &w) in t.slice(s![.., .., .., k]).indexed_iter() {
                if w != 0.0 {
                    let mut e = vec![0u8; n];
                    e[a] += 1;
                    e[b] += 1;
                    e[c] += 1;
                    p.add_term(e, 4.0 * w);
                }
            }
            p
        })
        .collect()
}

/// `‖grad^v H‖²` on the unit sphere: `Σ_k U_k² − 16 F²`.
pub fn gradv_sq_poly(curv: &CurvatureData, j: &Array2<f64>, f: &Poly) -> Poly {
    let mut acc = Poly::zero(curv.dim());
    for u in gradv_components(curv, j) {
        acc = &acc + &(&u * &u);
    }
    &acc - &(f * f).scale(16.0)
}

/// Quartic `P_e(v)`, the `e`-th component of `grad^h H`.
pub fn gradh_components(pd: &PointData) -> Result<Vec<Poly>> {
    let dr = pd.curv.d_riemann.as_ref().ok_or(Error::MissingDerivative(1))?;
    let n = pd.dim();
    (0..n)
        .map(|e| {
            let dre: Array4<f64> = dr.slice(s![.., .., .., .., e]).to_owned();
            let nje = pd.nabla_j.index_axis(ndarray::Axis(0), e).to_owned();
            let mut t = hermitian::j_twisted(&dre, &pd.j);
            t.scaled_add(2.0, &hermitian::twisted(&pd.curv.riemann, &nje, &pd.j));
            Ok(hermitian::quartic_poly(&t))
        })
        .collect()
}

pub fn gradh_sq_poly(pd: &PointData) -> Result<Poly> {
    let mut acc = Poly::zero(pd.dim());
    for p in gradh_components(pd)? {
        acc = &acc + &(&p * &p);
    }
    Ok(acc)
}

/// Fiber statistics of `H` at one point.
#[derive(Clone, Debug, Serialize)]
pub struct FiberStats {
    pub h_av: f64,
    pub h_max: f64,
    pub argmax: Vec<f64>,
    pub variance: f64,
    /// `∫‖grad^v H‖² / Vol`.
    pub gradv_sq_integral: f64,
    /// Fiber average of the ambient Laplacian `𝔻H`.
    pub laplacian_h: f64,
    /// `max |𝔻H − laplacian_h|` over the fiber.
    pub laplacian_spread: f64,
}

fn stats_of(pd: &PointData) -> Result<FiberStats> {
    let q = pd.quartic()?;
    let f = q.to_poly();
    let h_av = fiber_average(&f);
    let variance = (fiber_average(&(&f * &f)) - h_av * h_av).max(0.0);
    let gradv_sq_integral = fiber_average(&gradv_sq_poly(&pd.curv, &pd.j, &f));
    let (h_max, argmax) = fiber_max_h(&q, FIBER_RESTARTS)?;
    // 𝔻F is a quadratic form; its spread on the sphere is its eigenvalue spread,
    // bounded here by the Gershgorin radius around the mean
    let lap = f.laplacian();
    let n = pd.dim();
    let mut m = Array2::<f64>::zeros((n, n));
    for (e, c) in lap.terms() {
        let idx: Vec<usize> = e
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat(i).take(usize::from(k)))
            .collect();
        if idx.len() == 2 {
            if idx[0] == idx[1] {
                m[[idx[0], idx[0]]] += c;
            } else {
                m[[idx[0], idx[1]]] += 0.5 * c;
                m[[idx[1], idx[0]]] += 0.5 * c;
            }
        }
    }
    let laplacian_h = fiber_average(&lap);
    let laplacian_spread = (0..n)
        .map(|a| {
            (m[[a, a]] - laplacian_h).abs()
                + (0..n).filter(|&b| b != a).map(|b| m[[a, b]].abs()).sum::<f64>()
        })
        .fold(0.0, f64::max);
    Ok(FiberStats {
        h_av,
        h_max,
        argmax,
        variance,
        gradv_sq_integral,
        laplacian_h,
        laplacian_spread,
    })
}

pub fn h_stats(model: &ModelManifold, point: &ChartPoint) -> Result<FiberStats> {
    stats_of(&PointData::new(model, point, 0)?)
}

/// Einstein constant from metadata, else from sampling.
pub fn einstein_lambda(model: &ModelManifold) -> Result<f64> {
    match model.metadata().einstein {
        Some(l) => Ok(l),
        None => geometry::einstein_constant(model, HOMOGENEITY_SAMPLES, 1e-8),
    }
}

/// Fiber average of `H` against the general and Kähler formulas.
pub fn berger_check(model: &ModelManifold, point: &ChartPoint, tol: f64) -> Result<VerificationReport> {
    let started = Instant::now();
    let pd = PointData::new(model, point, 0)?;
    let n = pd.dim();
    let nn = (n / 2) as f64;
    let avg = fiber_average(&pd.quartic()?.to_poly());
    let star = hermitian::star_curvature(&pd.curv, &pd.j)?;
    let s = pd.curv.scalar;
    let general = (3.0 * star.star_scalar + s) / (4.0 * nn * (nn + 1.0));
    let report = if model.metadata().kahler {
        let kahler = s / (nn * (nn + 1.0));
        let r = VerificationReport::eq("berger_average", avg, kahler, tol);
        let dev = (avg - general).abs();
        if dev > tol && dev > tol * general.abs() {
            r.fail_with(format!("general formula (3s*+s)/(4N(N+1)) = {general} disagrees"))
        } else {
            r
        }
    } else {
        VerificationReport::eq("berger_average_star", avg, general, tol)
            .with_note(format!("s = {s}, s* = {}", star.star_scalar))
    };
    Ok(report
        .with_model(model.name())
        .with_point(&point.coords)
        .with_runtime(started))
}

/// `s* ≥ s` gap report: passes when `|s − s*|` exceeds `min_gap`, so that
/// the star formula is exercised non-trivially.
pub fn star_gap(model: &ModelManifold, point: &ChartPoint, min_gap: f64) -> Result<VerificationReport> {
    let started = Instant::now();
    let pd = PointData::new(model, point, 0)?;
    let star = hermitian::star_curvature(&pd.curv, &pd.j)?;
    let gap = (pd.curv.scalar - star.star_scalar).abs();
    Ok(VerificationReport::ge("star_scalar_gap", gap, min_gap, 0.0)
        .with_note(format!("s = {}, s* = {}", pd.curv.scalar, star.star_scalar))
        .with_model(model.name())
        .with_point(&point.coords)
        .with_runtime(started))
}

/// `H_av = 4Λ/(n+2)` and `𝔻H = 16Λ` on a Kähler–Einstein model.
pub fn ke_stat_reports(model: &ModelManifold, point: &ChartPoint, tol: f64) -> Result<Vec<VerificationReport>> {
    let started = Instant::now();
    let lambda = einstein_lambda(model)?;
    let st = h_stats(model, point)?;
    let n = model.dim() as f64;
    let h_av = VerificationReport::eq("h_average", st.h_av, 4.0 * lambda / (n + 2.0), tol);
    let mut lap = VerificationReport::eq("ambient_laplacian_h", st.laplacian_h, 16.0 * lambda, tol);
    if st.laplacian_spread > tol {
        lap = lap.fail_with(format!("𝔻H varies on the fiber by {:e}", st.laplacian_spread));
    }
    Ok([h_av, lap]
        .into_iter()
        .map(|r| r.with_model(model.name()).with_point(&point.coords).with_runtime(started))
        .collect())
}

/// `∫(H − H_av)² = 1/(4(n+2)) ∫‖grad^v H‖²`.
pub fn variance_identity_check(model: &ModelManifold, point: &ChartPoint, tol: f64) -> Result<VerificationReport> {
    let started = Instant::now();
    einstein_lambda(model)?;
    let st = h_stats(model, point)?;
    let n = model.dim() as f64;
    Ok(VerificationReport::eq(
        "variance_identity",
        st.variance,
        st.gradv_sq_integral / (4.0 * (n + 2.0)),
        tol,
    )
    .with_model(model.name())
    .with_point(&point.coords)
    .with_runtime(started))
}

/// Samples `value` at the model's first few sample points and requires the
/// spread to stay below the homogeneity threshold.
pub(crate) fn homogeneous_value(
    model: &ModelManifold,
    value: impl Fn(&ChartPoint) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    let points = model.sample_points(HOMOGENEITY_SAMPLES, 0x40e0);
    let values = points.iter().map(value).collect::<Result<Vec<_>>>()?;
    let first = values[0].clone();
    let spread = values
        .iter()
        .flat_map(|v| v.iter().zip(&first).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    if !model.metadata().homogeneous || spread > HOMOGENEITY_SPREAD {
        return Err(Error::NotHomogeneousModel(spread));
    }
    Ok(first)
}

/// Outcome of the Rayleigh-quotient check.
#[derive(Clone, Debug, Serialize)]
pub struct RayleighOutcome {
    pub quotient: f64,
    pub gradh_sq: f64,
    pub gradv_sq: f64,
    pub variance: f64,
    pub max_abs_sec: f64,
    pub reports: Vec<VerificationReport>,
}

/// Rayleigh quotient of `H − H_av` on the unit sphere bundle of a
/// homogeneous, normalized Kähler–Einstein model.
pub fn rayleigh_check(model: &ModelManifold, tol: f64) -> Result<RayleighOutcome> {
    let started = Instant::now();
    einstein_lambda(model)?;
    let center = ChartPoint::new(0, model.sampling_center());
    let st = h_stats(model, &center)?;
    if st.variance < 1e-14 {
        return Err(Error::ConstantH);
    }
    let max_sec = geometry::max_abs_sec(model, geometry::DEFAULT_RESTARTS)?;
    if (max_sec - 1.0).abs() > 1e-4 {
        return Err(Error::NotNormalized(max_sec));
    }
    let vals = homogeneous_value(model, |p| {
        let pd = PointData::new(model, p, 1)?;
        let f = pd.quartic()?.to_poly();
        let h_av = fiber_average(&f);
        Ok(vec![
            fiber_average(&gradh_sq_poly(&pd)?),
            fiber_average(&gradv_sq_poly(&pd.curv, &pd.j, &f)),
            fiber_average(&(&f * &f)) - h_av * h_av,
        ])
    })?;
    let (gh, gv, var) = (vals[0], vals[1], vals[2]);
    let n = model.dim() as f64;
    let quotient = (gh + gv) / var;
    let name = model.name();
    let reports = vec![
        VerificationReport::le("rayleigh_step_a", gh, 0.5 * max_sec * gv, tol),
        VerificationReport::eq("rayleigh_vertical_quotient", gv / var, 4.0 * (n + 2.0), tol),
        VerificationReport::le("rayleigh_bound", quotient, 6.0 * (n + 2.0), tol),
    ]
    .into_iter()
    .map(|r| r.with_model(name).with_runtime(started))
    .collect();
    Ok(RayleighOutcome {
        quotient,
        gradh_sq: gh,
        gradv_sq: gv,
        variance: var,
        max_abs_sec: max_sec,
        reports,
    })
}

/// Maximum of `F` over the unit sphere and a maximizer, by multi-start
/// projected gradient ascent. Restart `i` always draws the same start.
pub fn fiber_max_h(q: &QuarticForm, restarts: usize) -> Result<(f64, Vec<f64>)> {
    let n = q.dim();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut any_converged = false;
    for i in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(0xf1be_0000 + i as u64);
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let (f, x, ok) = ascend_sphere(q, v);
        any_converged |= ok;
        if f > best.0 {
            best = (f, x);
        }
    }
    if !any_converged {
        return Err(Error::NonConvergence(FIBER_ITERATION_CAP));
    }
    Ok(best)
}

fn ascend_sphere(q: &QuarticForm, mut v: Vec<f64>) -> (f64, Vec<f64>, bool) {
    let mut f = q.eval(&v);
    let mut step = 0.1;
    for _ in 0..FIBER_ITERATION_CAP {
        let mut g = q.gradient(&v);
        let c = dot(&g, &v);
        g.iter_mut().zip(&v).for_each(|(gi, vi)| *gi -= c * vi);
        if norm(&g) < FIBER_GRAD_TOL {
            return (f, v, true);
        }
        loop {
            let mut w: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let nw = norm(&w);
            w.iter_mut().for_each(|x| *x /= nw);
            let fw = q.eval(&w);
            if fw > f {
                v = w;
                f = fw;
                step = (step * 2.0).min(10.0);
                break;
            }
            step *= 0.5;
            if step < 1e-16 {
                return (f, v, true);
            }
        }
    }
    (f, v, false)
}

/// `H_av / H_max = 2/3` at each point of a Kähler–Einstein surface.
pub fn theorem4_ratio(model: &ModelManifold, points: &[ChartPoint], tol: f64) -> Result<Vec<VerificationReport>> {
    if model.dim() != 4 {
        return Err(Error::WrongDimension {
            expected: 4,
            got: model.dim(),
        });
    }
    points
        .iter()
        .map(|p| {
            let started = Instant::now();
            let st = h_stats(model, p)?;
            if st.h_max.abs() < 1e-12 {
                return Err(Error::DegenerateRatio);
            }
            Ok(
                VerificationReport::eq("h_average_over_max", st.h_av / st.h_max, 2.0 / 3.0, tol)
                    .with_model(model.name())
                    .with_point(&p.coords)
                    .with_runtime(started),
            )
        })
        .collect()
}
