//! Named verification suites over catalog models.
//!
//! Random inputs for a run are drawn up front from one generator seeded by
//! the caller, then evaluated in parallel; output order is fixed by input
//! order.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fiber::{self, homogeneous_lap_identity};
use crate::geometry::ChartPoint;
use crate::gray;
use crate::hermitian::PointData;
use crate::models::{load_model, ModelManifold};
use crate::poly::Poly;
use crate::report::VerificationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Berger,
    Prop31,
    #[value(name = "gray-L", alias = "gray-l")]
    GrayL,
    Lemma23,
    Variance,
    Rayleigh,
    Theorem4,
    Surface,
    All,
}

impl Suite {
    /// Execution order of `all`: algebraic suites first, d2R suites last.
    pub const ORDER: [Suite; 8] = [
        Suite::Prop31,
        Suite::Berger,
        Suite::Variance,
        Suite::Theorem4,
        Suite::Rayleigh,
        Suite::GrayL,
        Suite::Lemma23,
        Suite::Surface,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Berger => "berger",
            Suite::Prop31 => "prop31",
            Suite::GrayL => "gray-L",
            Suite::Lemma23 => "lemma23",
            Suite::Variance => "variance",
            Suite::Rayleigh => "rayleigh",
            Suite::Theorem4 => "theorem4",
            Suite::Surface => "surface",
            Suite::All => "all",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Suite::GrayL | Suite::Lemma23 | Suite::Surface => 1e-6,
            Suite::Prop31 => 1e-9,
            _ => 1e-8,
        }
    }

    /// Catalog models run when no model is named.
    pub fn default_models(self) -> &'static [&'static str] {
        match self {
            Suite::Berger => &["cp1", "cp2", "cp3", "ch2", "cp1xcp1", "conformal_cp1xcp1"],
            Suite::Prop31 | Suite::All => &[],
            Suite::GrayL => &["cp2", "cp1xcp1", "ch2", "torus4"],
            Suite::Lemma23 => &["cp2", "cp1xcp1", "ch2"],
            Suite::Variance => &["cp1", "cp2", "cp3", "ch2", "cp1xcp1", "cp2_c2"],
            Suite::Rayleigh => &["cp1xcp1"],
            Suite::Theorem4 => &["cp1xcp1"],
            Suite::Surface => &["cp2", "cp1xcp1"],
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub points: Option<usize>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            points: None,
            tol: None,
            seed: 0,
            timing: true,
        }
    }
}

fn error_report(suite: Suite, model: &str, err: &Error) -> VerificationReport {
    VerificationReport::diagnostic(suite.name(), err.to_string()).with_model(model)
}

/// Passes when `result` fails with the expected error.
fn expect_rejection<T>(identity: &str, model: &str, result: Result<T>, expected: fn(&Error) -> bool) -> VerificationReport {
    match result {
        Err(e) if expected(&e) => VerificationReport::eq(identity, 1.0, 1.0, 0.0)
            .with_model(model)
            .with_note(format!("rejected as expected: {e}")),
        Err(e) => VerificationReport::diagnostic(identity, format!("unexpected error: {e}")).with_model(model),
        Ok(_) => VerificationReport::diagnostic(identity, "model was not rejected").with_model(model),
    }
}

fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let nv = crate::linalg::norm(&v);
    v.into_iter().map(|x| x / nv).collect()
}

struct Draw {
    point: ChartPoint,
    x: Vec<f64>,
    zeta: Vec<f64>,
}

fn draws(model: &ModelManifold, count: usize, rng: &mut ChaCha8Rng) -> Vec<Draw> {
    let n = model.dim();
    let mut out = Vec::with_capacity(count);
    let center = model.sampling_center();
    for i in 0..count {
        let point = if i == 0 {
            ChartPoint::new(0, center.clone())
        } else {
            model.random_points(1, rng).remove(0)
        };
        let x = random_unit(rng, n);
        let zeta = random_unit(rng, n);
        out.push(Draw { point, x, zeta });
    }
    out
}

fn flatten(results: Vec<Result<Vec<VerificationReport>>>, suite: Suite, model: &str) -> Vec<VerificationReport> {
    results
        .into_iter()
        .flat_map(|r| match r {
            Ok(v) => v,
            Err(e) => vec![error_report(suite, model, &e)],
        })
        .collect()
}

fn random_homogeneous<R: Rng>(rng: &mut R, n: usize, r: usize) -> Poly {
    fn rec(prefix: &mut Vec<u8>, left: usize, slots: usize, out: &mut Vec<Vec<u8>>) {
        if slots == 1 {
            prefix.push(left as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k as u8);
            rec(prefix, left - k, slots - 1, out);
            prefix.pop();
        }
    }
    let mut monos = Vec::new();
    rec(&mut Vec::new(), r, n, &mut monos);
    let mut p = Poly::zero(n);
    for e in monos {
        p.add_term(e, rng.sample(StandardNormal));
    }
    p
}

/// Laplacian identity on random homogeneous polynomials, `per_case` per
/// degree `r ∈ 1..=6` and `n ∈ {2, 4, 6}`.
pub fn prop31_reports(per_case: usize, seed: u64, tol: f64) -> Vec<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut polys = Vec::new();
    for n in [2usize, 4, 6] {
        for r in 1..=6usize {
            for _ in 0..per_case {
                polys.push((random_homogeneous(&mut rng, n, r), r));
            }
        }
    }
    polys
        .par_iter()
        .map(|(p, r)| {
            homogeneous_lap_identity(p, *r, tol)
                .unwrap_or_else(|e| VerificationReport::diagnostic("prop31_laplacian", e.to_string()))
        })
        .collect()
}

/// Runs one suite on one model.
pub fn run_on_model(suite: Suite, model: &ModelManifold, cfg: &SuiteConfig) -> Vec<VerificationReport> {
    let tol = cfg.tol.unwrap_or(suite.default_tol());
    let count = cfg.points.unwrap_or(1).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let name = model.name();
    let ds = draws(model, count, &mut rng);
    let kahler = model.metadata().kahler;
    let mut reports = match suite {
        Suite::All => run_all_on_model(model, cfg),
        Suite::Prop31 => prop31_reports(cfg.points.unwrap_or(50), cfg.seed, tol),
        Suite::Berger => {
            let mut out: Vec<Result<Vec<VerificationReport>>> = ds
                .par_iter()
                .map(|d| fiber::berger_check(model, &d.point, tol).map(|r| vec![r]))
                .collect();
            if !kahler {
                out.extend(
                    ds.par_iter()
                        .map(|d| fiber::star_gap(model, &d.point, 1e-6).map(|r| vec![r]))
                        .collect::<Vec<_>>(),
                );
            }
            flatten(out, suite, name)
        }
        Suite::Variance => flatten(
            ds.par_iter()
                .map(|d| {
                    let mut v = fiber::ke_stat_reports(model, &d.point, tol)?;
                    v.push(fiber::variance_identity_check(model, &d.point, tol)?);
                    Ok(v)
                })
                .collect(),
            suite,
            name,
        ),
        Suite::Theorem4 => {
            let pts: Vec<ChartPoint> = ds.iter().map(|d| d.point.clone()).collect();
            match fiber::theorem4_ratio(model, &pts, tol) {
                Ok(v) => v,
                Err(e) => vec![error_report(suite, name, &e)],
            }
        }
        Suite::Rayleigh => match fiber::rayleigh_check(model, tol) {
            Ok(o) => o.reports,
            Err(e) => vec![error_report(suite, name, &e)],
        },
        Suite::GrayL => flatten(
            ds.par_iter()
                .map(|d| {
                    require_kahler_einstein(model)?;
                    let started = Instant::now();
                    let pd = PointData::new(model, &d.point, 2)?;
                    let l = gray::l_apply_h(&pd.curv, &pd.j, &d.x)?;
                    Ok(vec![VerificationReport::eq("gray_L_of_H", l, 0.0, tol)
                        .with_point(&d.point.coords)
                        .with_runtime(started)])
                })
                .collect(),
            suite,
            name,
        ),
        Suite::Lemma23 => {
            let mut out = flatten(
                ds.par_iter()
                    .map(|d| {
                        require_kahler_einstein(model)?;
                        let pd = PointData::new(model, &d.point, 2)?;
                        Ok(vec![gray::lemma23_check(&pd.curv, &pd.j, &d.x, tol)?])
                    })
                    .collect(),
                suite,
                name,
            );
            out.push(
                gray::lemma23_integral_check(model, tol).unwrap_or_else(|e| error_report(suite, name, &e)),
            );
            out
        }
        Suite::Surface => {
            let product = model.metadata().factors.as_deref() == Some(&[2, 2][..]);
            flatten(
                ds.par_iter()
                    .map(|d| {
                        require_kahler_einstein(model)?;
                        let pd = PointData::new(model, &d.point, 2)?;
                        let (_, argmax) = fiber::fiber_max_h(&pd.quartic()?, fiber::FIBER_RESTARTS)?;
                        let zeta = product.then_some(d.zeta.as_slice());
                        gray::surface_identities(&pd.curv, &pd.j, &argmax, zeta, tol)
                    })
                    .collect(),
                suite,
                name,
            )
        }
    };
    for r in &mut reports {
        if r.model.is_empty() && suite != Suite::Prop31 {
            r.model = name.to_string();
        }
        if !cfg.timing {
            r.runtime_ms = 0.0;
        }
    }
    reports
}

fn require_kahler_einstein(model: &ModelManifold) -> Result<f64> {
    let lambda = fiber::einstein_lambda(model)?;
    if !model.metadata().kahler {
        return Err(Error::InvalidSpec(format!(
            "{} is not flagged Kähler; the identity needs a Kähler–Einstein model",
            model.name()
        )));
    }
    Ok(lambda)
}

fn run_all_on_model(model: &ModelManifold, cfg: &SuiteConfig) -> Vec<VerificationReport> {
    Suite::ORDER
        .iter()
        .filter(|s| **s != Suite::Prop31)
        .flat_map(|s| run_on_model(*s, model, cfg))
        .collect()
}

/// Runs a suite on its default catalog models, including the expected
/// rejections of the Rayleigh and ratio checks.
pub fn run_defaults(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    if suite == Suite::All {
        let mut out = Vec::new();
        for s in Suite::ORDER {
            out.extend(run_defaults(s, cfg)?);
        }
        return Ok(out);
    }
    if suite == Suite::Prop31 {
        return Ok(run_on_model_free(suite, cfg));
    }
    let mut out = Vec::new();
    for name in suite.default_models() {
        let model = load_model(name)?;
        out.extend(run_on_model(suite, &model, cfg));
    }
    match suite {
        Suite::Rayleigh => {
            let cp2 = load_model("cp2")?;
            out.push(expect_rejection(
                "rayleigh_space_form_rejected",
                cp2.name(),
                fiber::rayleigh_check(&cp2, 1e-8),
                |e| matches!(e, Error::ConstantH),
            ));
            let big = load_model("cp1xcp1_c2")?;
            out.push(expect_rejection(
                "rayleigh_unnormalized_rejected",
                big.name(),
                fiber::rayleigh_check(&big, 1e-8),
                |e| matches!(e, Error::NotNormalized(_)),
            ));
        }
        Suite::Theorem4 => {
            let cp2 = load_model("cp2")?;
            let tol = cfg.tol.unwrap_or(suite.default_tol());
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let pts: Vec<ChartPoint> = draws(&cp2, cfg.points.unwrap_or(1).max(1), &mut rng)
                .into_iter()
                .map(|d| d.point)
                .collect();
            for p in &pts {
                let st = fiber::h_stats(&cp2, p);
                out.push(match st {
                    Ok(st) => VerificationReport::eq("h_average_over_max_space_form", st.h_av / st.h_max, 1.0, tol)
                        .with_model(cp2.name())
                        .with_point(&p.coords),
                    Err(e) => error_report(suite, cp2.name(), &e),
                });
            }
        }
        _ => {}
    }
    if !cfg.timing {
        out.iter_mut().for_each(|r| r.runtime_ms = 0.0);
    }
    Ok(out)
}

fn run_on_model_free(suite: Suite, cfg: &SuiteConfig) -> Vec<VerificationReport> {
    let tol = cfg.tol.unwrap_or(suite.default_tol());
    let mut v = prop31_reports(cfg.points.unwrap_or(50), cfg.seed, tol);
    if !cfg.timing {
        v.iter_mut().for_each(|r| r.runtime_ms = 0.0);
    }
    v
}
