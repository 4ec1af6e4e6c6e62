//! Catalog of explicit model manifolds.
//!
//! Every model is a chart-based metric written over [`Jet`] so that curvature
//! and its covariant derivatives come out exactly. The catalog covers the
//! complex space forms (Fubini–Study and its ball-model dual), round spheres,
//! flat tori, and the combinators product / constant rescale / conformal
//! bump rescale. A black-box metric closure is also accepted; its jets are
//! built by Richardson-extrapolated finite differences.

mod catalog;
mod source;
mod spec;

use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{self, ChartPoint};
use crate::jet::{self, Jet, JetMatrix};

pub use catalog::{catalog, catalog_names, CatalogEntry};
pub use source::{standard_j, uniform_in_ball, Bump};
pub use spec::ModelSpec;

use source::Source;

pub type MetricFn = dyn Fn(&[f64]) -> Array2<f64> + Send + Sync;

#[derive(Clone)]
enum Evaluator {
    Closed(Source),
    BlackBox {
        dim: usize,
        radius: f64,
        metric: Arc<MetricFn>,
        step: f64,
    },
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluator::Closed(s) => f.debug_tuple("Closed").field(s).finish(),
            Evaluator::BlackBox { dim, radius, .. } => f
                .debug_struct("BlackBox")
                .field("dim", dim)
                .field("radius", radius)
                .finish(),
        }
    }
}

/// Facts about a model known in closed form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metadata {
    /// Einstein constant Λ with Ric = Λ g.
    pub einstein: Option<f64>,
    /// Constant holomorphic sectional curvature.
    pub holomorphic: Option<f64>,
    pub homogeneous: bool,
    pub kahler: bool,
    /// Real dimensions of product factors, in chart order.
    pub factors: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct ModelManifold {
    name: String,
    spec: Option<ModelSpec>,
    evaluator: Evaluator,
    metadata: Metadata,
}

impl ModelManifold {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn spec(&self) -> Option<&ModelSpec> {
        self.spec.as_ref()
    }

    pub fn dim(&self) -> usize {
        match &self.evaluator {
            Evaluator::Closed(s) => s.dim(),
            Evaluator::BlackBox { dim, .. } => *dim,
        }
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn has_complex_structure(&self) -> bool {
        match &self.evaluator {
            Evaluator::Closed(s) => s.has_complex_structure(),
            Evaluator::BlackBox { .. } => false,
        }
    }

    pub fn chart_count(&self) -> usize {
        match &self.evaluator {
            Evaluator::Closed(s) => 1 + s.extra_charts(),
            Evaluator::BlackBox { .. } => 1,
        }
    }

    /// Chart-0 coordinates of a point given in any chart.
    pub fn primary_coords(&self, point: &ChartPoint) -> Option<Vec<f64>> {
        match &self.evaluator {
            Evaluator::Closed(s) => s.primary_point(point.chart, &point.coords),
            Evaluator::BlackBox { .. } => (point.chart == 0).then(|| point.coords.clone()),
        }
    }

    pub fn check_point(&self, point: &ChartPoint) -> Result<()> {
        if point.coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.coords.len(),
            });
        }
        if point.chart >= self.chart_count() {
            return Err(Error::UnknownChart(point.chart));
        }
        let inside = match (&self.evaluator, self.primary_coords(point)) {
            (_, None) => false,
            (Evaluator::Closed(s), Some(p)) => s.contains(&p),
            (Evaluator::BlackBox { radius, .. }, Some(p)) => {
                p.iter().map(|v| v * v).sum::<f64>() < radius * radius
            }
        };
        if !inside || point.coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutsideChart {
                chart: point.chart,
                coords: point.coords.clone(),
            });
        }
        Ok(())
    }

    fn coordinate_jets(point: &ChartPoint, order: usize) -> Vec<Jet> {
        let l = jet::layout(point.coords.len(), order);
        point
            .coords
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(&l, i, v))
            .collect()
    }

    /// Metric components as jets of the given order around `point`.
    pub(crate) fn metric_jets(&self, point: &ChartPoint, order: usize) -> Result<JetMatrix> {
        self.check_point(point)?;
        match &self.evaluator {
            Evaluator::BlackBox {
                metric, step, dim, ..
            } => Ok(geometry::finite_difference_jet(
                metric.as_ref(),
                &point.coords,
                *dim,
                order,
                *step,
            )),
            Evaluator::Closed(s) if point.chart == 0 => {
                Ok(s.metric(&Self::coordinate_jets(point, order)))
            }
            Evaluator::Closed(s) => {
                let (d, y) = transition(s, point, order);
                let g0 = s.metric(&y);
                Ok(d.transpose().matmul(&g0).matmul(&d))
            }
        }
    }

    /// Almost-complex structure as jets around `point`, in the point's chart.
    pub(crate) fn complex_structure_jets(
        &self,
        point: &ChartPoint,
        order: usize,
    ) -> Result<Option<JetMatrix>> {
        self.check_point(point)?;
        match &self.evaluator {
            Evaluator::BlackBox { .. } => Ok(None),
            Evaluator::Closed(s) if point.chart == 0 => {
                Ok(s.complex_structure(&Self::coordinate_jets(point, order)))
            }
            Evaluator::Closed(s) => {
                let (d, y) = transition(s, point, order);
                let Some(j0) = s.complex_structure(&y) else {
                    return Ok(None);
                };
                let dinv = d.inverse().ok_or(Error::DegenerateMetric)?;
                Ok(Some(dinv.matmul(&j0).matmul(&d)))
            }
        }
    }

    /// Deterministic sample points: the sampling center first, then uniform
    /// draws from the model's sampling region.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<ChartPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_points_with(count, &mut rng)
    }

    pub fn random_points<R: rand::Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<ChartPoint> {
        (0..count)
            .map(|_| ChartPoint::new(0, self.random_coords(rng)))
            .collect()
    }

    fn sample_points_with(&self, count: usize, rng: &mut ChaCha8Rng) -> Vec<ChartPoint> {
        let mut out = Vec::with_capacity(count);
        if count > 0 {
            out.push(ChartPoint::new(0, self.sampling_center()));
        }
        while out.len() < count {
            out.push(ChartPoint::new(0, self.random_coords(rng)));
        }
        out
    }

    pub fn sampling_center(&self) -> Vec<f64> {
        match &self.evaluator {
            Evaluator::Closed(s) => s.sampling_ball().0,
            Evaluator::BlackBox { dim, .. } => vec![0.0; *dim],
        }
    }

    fn random_coords<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.evaluator {
            Evaluator::Closed(s) => s.sample(rng),
            Evaluator::BlackBox { dim, radius, .. } => {
                uniform_in_ball(rng, &vec![0.0; *dim], 0.5 * radius)
            }
        }
    }

    /// A model from a black-box metric; derivatives come from finite
    /// differences with Richardson extrapolation.
    pub fn from_black_box(
        name: impl Into<String>,
        dim: usize,
        radius: f64,
        metric: Arc<MetricFn>,
    ) -> Self {
        ModelManifold {
            name: name.into(),
            spec: None,
            evaluator: Evaluator::BlackBox {
                dim,
                radius,
                metric,
                step: 1e-3,
            },
            metadata: Metadata::default(),
        }
    }
}

/// Jacobian `∂y/∂w` and chart-0 coordinates `y(w)`, both at `order`.
fn transition(s: &Source, point: &ChartPoint, order: usize) -> (JetMatrix, Vec<Jet>) {
    let w = ModelManifold::coordinate_jets(point, order + 1);
    let y = s.to_primary(point.chart, &w);
    let n = y.len();
    let d = JetMatrix::from_fn(n, |i, j| y[i].derivative(j));
    let y = y.iter().map(|v| v.truncate(order)).collect();
    (d, y)
}

fn build_source(spec: &ModelSpec) -> Source {
    match spec {
        ModelSpec::RoundSphere { dim, radius } => Source::Sphere {
            dim: *dim,
            radius: *radius,
        },
        ModelSpec::FlatTorus { dim, twist } => Source::Torus {
            dim: *dim,
            twist: *twist,
        },
        ModelSpec::FubiniStudy { complex_dim, c } | ModelSpec::ComplexHyperbolic { complex_dim, c } => {
            Source::SpaceForm {
                complex_dim: *complex_dim,
                c: *c,
            }
        }
        ModelSpec::Product { factors } => Source::Product(factors.iter().map(build_source).collect()),
        ModelSpec::Scaled { lambda, model } => Source::Scaled {
            lambda: *lambda,
            inner: Box::new(build_source(model)),
        },
        ModelSpec::Conformal {
            amplitude,
            width,
            center,
            model,
        } => Source::Conformal {
            bump: Bump {
                amplitude: *amplitude,
                width: *width,
                center: center.clone().unwrap_or_else(|| vec![0.0; model.dim()]),
            },
            inner: Box::new(build_source(model)),
        },
    }
}

fn metadata_of(spec: &ModelSpec) -> Metadata {
    match spec {
        ModelSpec::RoundSphere { dim, radius } => Metadata {
            einstein: Some((*dim as f64 - 1.0) / (radius * radius)),
            holomorphic: None,
            homogeneous: true,
            kahler: false,
            factors: None,
        },
        ModelSpec::FlatTorus { dim, twist } => Metadata {
            einstein: Some(0.0),
            holomorphic: (dim % 2 == 0).then_some(0.0),
            homogeneous: true,
            kahler: dim % 2 == 0 && *twist == 0.0,
            factors: None,
        },
        ModelSpec::FubiniStudy { complex_dim, c } | ModelSpec::ComplexHyperbolic { complex_dim, c } => {
            Metadata {
                einstein: Some((*complex_dim as f64 + 1.0) * c / 2.0),
                holomorphic: Some(*c),
                homogeneous: true,
                kahler: true,
                factors: None,
            }
        }
        ModelSpec::Product { factors } => {
            let metas: Vec<Metadata> = factors.iter().map(metadata_of).collect();
            let first = metas[0].einstein;
            let einstein = match first {
                Some(l) if metas.iter().all(|m| m.einstein.is_some_and(|v| (v - l).abs() < 1e-14)) => {
                    Some(l)
                }
                _ => None,
            };
            let flat = metas.iter().all(|m| m.holomorphic == Some(0.0));
            Metadata {
                einstein,
                holomorphic: flat.then_some(0.0),
                homogeneous: metas.iter().all(|m| m.homogeneous),
                kahler: metas.iter().all(|m| m.kahler),
                factors: Some(factors.iter().map(ModelSpec::dim).collect()),
            }
        }
        ModelSpec::Scaled { lambda, model } => {
            let mut m = metadata_of(model);
            let s = lambda * lambda;
            m.einstein = m.einstein.map(|l| l / s);
            m.holomorphic = m.holomorphic.map(|h| h / s);
            m
        }
        ModelSpec::Conformal {
            amplitude, model, ..
        } => {
            if *amplitude == 0.0 {
                metadata_of(model)
            } else {
                Metadata {
                    einstein: None,
                    holomorphic: None,
                    homogeneous: false,
                    kahler: false,
                    factors: None,
                }
            }
        }
    }
}

fn default_name(spec: &ModelSpec) -> String {
    match spec {
        ModelSpec::RoundSphere { dim, radius } => format!("S{dim}(r={radius})"),
        ModelSpec::FlatTorus { dim, twist } if *twist != 0.0 => format!("T{dim}(twist={twist})"),
        ModelSpec::FlatTorus { dim, .. } => format!("T{dim}"),
        ModelSpec::FubiniStudy { complex_dim, c } => format!("CP{complex_dim}(c={c})"),
        ModelSpec::ComplexHyperbolic { complex_dim, c } => format!("CH{complex_dim}(c={c})"),
        ModelSpec::Product { factors } => factors
            .iter()
            .map(default_name)
            .collect::<Vec<_>>()
            .join("x"),
        ModelSpec::Scaled { lambda, model } => format!("{lambda}*{}", default_name(model)),
        ModelSpec::Conformal { model, .. } => format!("conformal({})", default_name(model)),
    }
}

/// Builds a model from its specification and verifies its closed-form
/// metadata at a few sample points.
pub fn make_model(spec: &ModelSpec) -> Result<ModelManifold> {
    spec.validate()?;
    let source = build_source(spec);
    if let (ModelSpec::Conformal { .. }, Source::Conformal { bump, inner }) = (spec, &source) {
        let probe: Vec<Vec<f64>> = (0..bump.center.len())
            .flat_map(|i| {
                [1.0, -1.0].map(|s| {
                    let mut p = bump.center.clone();
                    p[i] += s * bump.width;
                    p
                })
            })
            .collect();
        if !probe.iter().all(|p| inner.contains(p)) {
            return Err(Error::InvalidSpec(
                "conformal bump exceeds the chart validity region".into(),
            ));
        }
    }
    let model = ModelManifold {
        name: default_name(spec),
        spec: Some(spec.clone()),
        evaluator: Evaluator::Closed(source),
        metadata: metadata_of(spec),
    };
    verify_metadata(&model)?;
    Ok(model)
}

fn verify_metadata(model: &ModelManifold) -> Result<()> {
    let meta = model.metadata();
    if meta.einstein.is_none() && meta.holomorphic.is_none() {
        return Ok(());
    }
    let n = model.dim();
    for point in model.sample_points(3, 0x5eed) {
        let curv = geometry::curvature(model, &point, 0)?;
        if let Some(lambda) = meta.einstein {
            let dev = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .map(|(a, b)| {
                    let target = if a == b { lambda } else { 0.0 };
                    (curv.ricci[[a, b]] - target).abs()
                })
                .fold(0.0, f64::max);
            if dev > 1e-8 {
                return Err(Error::MetadataMismatch(format!(
                    "Einstein deviation {dev:e} at {:?}",
                    point.coords
                )));
            }
        }
        if let Some(h) = meta.holomorphic {
            let j = crate::hermitian::j_in_frame(model, &point, &curv.frame)?
                .ok_or(Error::NoComplexStructure)?;
            for a in 0..n {
                let mut x = vec![0.0; n];
                x[a] = 1.0;
                let hx = crate::hermitian::holomorphic_sec(&curv, &j, &x)?;
                if (hx - h).abs() > 1e-8 {
                    return Err(Error::MetadataMismatch(format!(
                        "holomorphic curvature {hx} ≠ {h} at {:?}",
                        point.coords
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Rescales the model so that max |sec| = 1.
pub fn normalize(model: &ModelManifold) -> Result<ModelManifold> {
    let max = geometry::max_abs_sec(model, geometry::DEFAULT_RESTARTS)?;
    if max < 1e-10 {
        return Err(Error::FlatModel);
    }
    let spec = model
        .spec()
        .ok_or_else(|| Error::InvalidSpec("black-box models cannot be rescaled".into()))?;
    if (max - 1.0).abs() <= 1e-12 {
        return Ok(model.clone());
    }
    let scaled = ModelSpec::scaled(max.sqrt(), spec.clone());
    Ok(make_model(&scaled)?.with_name(format!("normalized({})", model.name())))
}

/// Resolves a catalog name or a path to a TOML specification.
pub fn load_model(name_or_path: &str) -> Result<ModelManifold> {
    if let Some(entry) = catalog().into_iter().find(|e| e.name == name_or_path) {
        return make_model(&entry.spec).map(|m| m.with_name(entry.name));
    }
    let path = std::path::Path::new(name_or_path);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?;
        let spec = ModelSpec::from_toml(&text)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| default_name(&spec));
        return make_model(&spec).map(|m| m.with_name(stem));
    }
    Err(Error::InvalidSpec(format!(
        "unknown model '{name_or_path}' (not a catalog name or readable file)"
    )))
}
