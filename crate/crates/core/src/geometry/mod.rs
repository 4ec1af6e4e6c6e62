//! Metric jets, orthonormal frames and frame-indexed curvature.
//!
//! Curvature and its covariant derivatives are assembled in chart
//! coordinates (see [`tensor`]) and then projected onto an orthonormal frame.
//! When the model carries an almost-complex structure the frame is adapted:
//! `e_{2k} = J e_{2k-1}` (zero-based: `e[2k+1] = J e[2k]`).

mod extremal;
mod finite_difference;
mod tensor;

use ndarray::{Array2, Array4, Array5, Array6, ArrayD, Axis, IxDyn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::JetMatrix;
use crate::linalg::{dot, inner, matvec};
use crate::models::ModelManifold;

pub use extremal::{extremal_sectional, max_abs_sectional, ITERATION_CAP};
pub(crate) use finite_difference::finite_difference_jet;
pub use tensor::CoordinateCurvature;

pub const DEFAULT_RESTARTS: usize = 64;
const MAX_SEC_SEED: u64 = 0x5ec7;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartPoint {
    pub chart: usize,
    pub coords: Vec<f64>,
}

impl ChartPoint {
    pub fn new(chart: usize, coords: Vec<f64>) -> Self {
        ChartPoint { chart, coords }
    }

    pub fn origin(dim: usize) -> Self {
        ChartPoint::new(0, vec![0.0; dim])
    }
}

/// Metric components and their partial derivatives at a point.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub order: usize,
    components: JetMatrix,
}

impl MetricJet {
    pub fn dim(&self) -> usize {
        self.components.dim()
    }

    pub fn values(&self) -> Array2<f64> {
        self.components.values()
    }

    /// `∂^α g_ij` at the base point.
    pub fn partial(&self, i: usize, j: usize, alpha: &[u8]) -> f64 {
        self.components.get(i, j).partial(alpha)
    }

    pub(crate) fn jets(&self) -> &JetMatrix {
        &self.components
    }
}

pub fn metric_jet(model: &ModelManifold, point: &ChartPoint, order: usize) -> Result<MetricJet> {
    if order > 4 {
        return Err(Error::OrderUnsupported(order));
    }
    Ok(MetricJet {
        order,
        components: model.metric_jets(point, order)?,
    })
}

/// Orthonormal frame; column `a` holds the chart components of `e_a`.
#[derive(Clone, Debug, Serialize)]
pub struct Frame {
    pub vectors: Array2<f64>,
    pub adapted: bool,
}

impl Frame {
    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    /// Chart components of the vector with frame components `v`.
    pub fn to_chart(&self, v: &[f64]) -> Vec<f64> {
        matvec(&self.vectors, v)
    }

    /// Frame components of a chart vector.
    pub fn to_frame(&self, g: &Array2<f64>, v: &[f64]) -> Vec<f64> {
        let gv = matvec(g, v);
        (0..self.dim())
            .map(|a| dot(&self.vectors.column(a).to_vec(), &gv))
            .collect()
    }
}

fn g_orthogonalize(g: &Array2<f64>, w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for u in basis {
            let c = inner(g, w, u);
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= c * ui;
            }
        }
    }
}

fn g_normalize(g: &Array2<f64>, w: &mut [f64]) -> f64 {
    let nw = inner(g, w, w).max(0.0).sqrt();
    if nw > 0.0 {
        w.iter_mut().for_each(|x| *x /= nw);
    }
    nw
}

/// Gram–Schmidt in the metric over (seed, chart directions); with `j` the
/// frame is completed in pairs `(e, Je)`.
pub(crate) fn frame_from(
    g: &Array2<f64>,
    j: Option<&Array2<f64>>,
    seed: Option<&[f64]>,
) -> Result<Frame> {
    let n = g.nrows();
    if crate::linalg::inverse(g).is_none() || (0..n).any(|i| g[[i, i]] <= 0.0) {
        return Err(Error::DegenerateMetric);
    }
    if let Some(j) = j {
        let defect = structure_defect(g, j);
        if defect > 1e-8 {
            return Err(Error::IncompatibleStructure(defect));
        }
    }
    let mut candidates: Vec<(Vec<f64>, bool)> = Vec::with_capacity(n + 1);
    if let Some(s) = seed {
        if inner(g, s, s).sqrt() < 1e-12 {
            return Err(Error::ZeroSeed);
        }
        candidates.push((s.to_vec(), true));
    }
    for a in 0..n {
        let mut e = vec![0.0; n];
        e[a] = 1.0;
        candidates.push((e, false));
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (c, forced) in candidates {
        if basis.len() == n {
            break;
        }
        let mut w = c.clone();
        g_orthogonalize(g, &mut w, &basis);
        let scale = inner(g, &c, &c).sqrt();
        let nw = g_normalize(g, &mut w);
        if nw <= 1e-9 * scale {
            if forced {
                return Err(Error::ZeroSeed);
            }
            continue;
        }
        basis.push(w.clone());
        if let Some(j) = j {
            let mut jw = matvec(j, &w);
            g_orthogonalize(g, &mut jw, &basis);
            if g_normalize(g, &mut jw) < 1e-9 {
                return Err(Error::FrameNotAdapted);
            }
            basis.push(jw);
        }
    }
    if basis.len() != n {
        return Err(Error::DegenerateMetric);
    }
    let vectors = Array2::from_shape_fn((n, n), |(i, a)| basis[a][i]);
    let adapted = j.is_some_and(|j| {
        (0..n / 2).all(|k| {
            let je = matvec(j, &basis[2 * k]);
            je.iter()
                .zip(&basis[2 * k + 1])
                .all(|(a, b)| (a - b).abs() < 1e-8 * (1.0 + a.abs()))
        })
    });
    Ok(Frame { vectors, adapted })
}

/// `max(‖J² + I‖, max |g(Je_a, Je_b) − g_ab|)` over chart directions.
pub(crate) fn structure_defect(g: &Array2<f64>, j: &Array2<f64>) -> f64 {
    let n = g.nrows();
    let j2 = j.dot(j);
    let jtgj = j.t().dot(g).dot(j);
    let mut d: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let id = if a == b { 1.0 } else { 0.0 };
            d = d.max((j2[[a, b]] + id).abs());
            d = d.max((jtgj[[a, b]] - g[[a, b]]).abs());
        }
    }
    d
}

pub fn build_frame(model: &ModelManifold, point: &ChartPoint, seed: Option<&[f64]>) -> Result<Frame> {
    let g = model.metric_jets(point, 0)?.values();
    let j = model.complex_structure_jets(point, 0)?.map(|j| j.values());
    if let Some(s) = seed {
        if s.len() != g.nrows() {
            return Err(Error::DimensionMismatch {
                expected: g.nrows(),
                got: s.len(),
            });
        }
    }
    frame_from(&g, j.as_ref(), seed)
}

/// Frame-indexed curvature at a point.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureData {
    pub point: ChartPoint,
    pub frame: Frame,
    /// `R_abcd`, with `R_abab = sec(e_a, e_b)`.
    pub riemann: Array4<f64>,
    /// `(∇_e R)_abcd` at `[a, b, c, d, e]`.
    pub d_riemann: Option<Array5<f64>>,
    /// `(∇²_{e f} R)_abcd` at `[a, b, c, d, e, f]`.
    pub d2_riemann: Option<Array6<f64>>,
    pub ricci: Array2<f64>,
    pub scalar: f64,
    #[serde(skip)]
    pub coordinates: CoordinateCurvature,
}

impl CurvatureData {
    pub fn dim(&self) -> usize {
        self.riemann.shape()[0]
    }

    /// Same data expressed in the frame `E·q` for an orthogonal `q`.
    pub fn rotated(&self, q: &Array2<f64>, adapted: bool) -> CurvatureData {
        CurvatureData {
            point: self.point.clone(),
            frame: Frame {
                vectors: self.frame.vectors.dot(q),
                adapted,
            },
            riemann: project(&self.riemann.clone().into_dyn(), q)
                .into_dimensionality()
                .expect("rank 4"),
            d_riemann: self
                .d_riemann
                .as_ref()
                .map(|d| project(&d.clone().into_dyn(), q).into_dimensionality().expect("rank 5")),
            d2_riemann: self
                .d2_riemann
                .as_ref()
                .map(|d| project(&d.clone().into_dyn(), q).into_dimensionality().expect("rank 6")),
            ricci: q.t().dot(&self.ricci).dot(q),
            scalar: self.scalar,
            coordinates: self.coordinates.clone(),
        }
    }

    /// `R(x, y, z, w)` for frame-component vectors.
    pub fn r(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        multilinear(&self.riemann, x, y, z, w)
    }
}

pub(crate) fn multilinear(r: &Array4<f64>, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for a in 0..n {
        if x[a] == 0.0 {
            continue;
        }
        for b in 0..n {
            let xy = x[a] * y[b];
            if xy == 0.0 {
                continue;
            }
            for c in 0..n {
                let xyz = xy * z[c];
                if xyz == 0.0 {
                    continue;
                }
                for d in 0..n {
                    s += r[[a, b, c, d]] * xyz * w[d];
                }
            }
        }
    }
    s
}

// Contracts every axis with `e`: out[a..] = Σ t[i..] e[i,a]…
fn project(t: &ArrayD<f64>, e: &Array2<f64>) -> ArrayD<f64> {
    let mut cur = t.clone();
    let n = e.nrows();
    let et = e.t().to_owned();
    for ax in 0..cur.ndim() {
        let mut next = ArrayD::<f64>::zeros(IxDyn(cur.shape()));
        for (lane_in, mut lane_out) in cur.lanes(Axis(ax)).into_iter().zip(next.lanes_mut(Axis(ax))) {
            let v: Vec<f64> = lane_in.to_vec();
            for a in 0..n {
                lane_out[a] = (0..n).map(|i| et[[a, i]] * v[i]).sum();
            }
        }
        cur = next;
    }
    cur
}

fn curvature_in_frame(
    coords: CoordinateCurvature,
    point: &ChartPoint,
    frame: Frame,
) -> CurvatureData {
    let e = &frame.vectors;
    let n = e.nrows();
    let riemann: Array4<f64> = project(&coords.riemann.clone().into_dyn(), e)
        .into_dimensionality()
        .expect("rank 4");
    let d_riemann = coords
        .d_riemann
        .as_ref()
        .map(|d| project(&d.clone().into_dyn(), e).into_dimensionality().expect("rank 5"));
    let d2_riemann = coords
        .d2_riemann
        .as_ref()
        .map(|d| project(&d.clone().into_dyn(), e).into_dimensionality().expect("rank 6"));
    // Ric(b, d) = Σ_a R(e_a, e_b, e_a, e_d)
    let ricci = Array2::from_shape_fn((n, n), |(b, d)| (0..n).map(|a| riemann[[a, b, a, d]]).sum());
    let scalar = (0..n).map(|a| ricci[[a, a]]).sum();
    CurvatureData {
        point: point.clone(),
        frame,
        riemann,
        d_riemann,
        d2_riemann,
        ricci,
        scalar,
        coordinates: coords,
    }
}

/// Curvature at `point` with covariant derivatives up to `deriv_order`, in
/// the seedless frame.
pub fn curvature(model: &ModelManifold, point: &ChartPoint, deriv_order: usize) -> Result<CurvatureData> {
    curvature_with_seed(model, point, deriv_order, None)
}

/// As [`curvature`], with `e_1` along `seed` (chart components).
pub fn curvature_with_seed(
    model: &ModelManifold,
    point: &ChartPoint,
    deriv_order: usize,
    seed: Option<&[f64]>,
) -> Result<CurvatureData> {
    if deriv_order > 2 {
        return Err(Error::OrderUnsupported(deriv_order + 2));
    }
    let g = metric_jet(model, point, deriv_order + 2)?;
    let coords = tensor::coordinate_curvature(g.jets(), deriv_order)?;
    let j = model.complex_structure_jets(point, 0)?.map(|j| j.values());
    let frame = frame_from(&coords.metric, j.as_ref(), seed)?;
    Ok(curvature_in_frame(coords, point, frame))
}

/// Sectional curvature of span{x, y}, frame components.
pub fn sectional(curv: &CurvatureData, x: &[f64], y: &[f64]) -> Result<f64> {
    let xx = dot(x, x);
    let yy = dot(y, y);
    let xy = dot(x, y);
    let den = xx * yy - xy * xy;
    if den <= 1e-12 * xx * yy || den <= 0.0 {
        return Err(Error::ParallelVectors);
    }
    Ok(curv.r(x, y, x, y) / den)
}

/// Einstein constant Λ as the mean of `s/n` over sample points; errors when
/// `Ric − Λg` exceeds `tol` anywhere.
pub fn einstein_constant(model: &ModelManifold, sample_count: usize, tol: f64) -> Result<f64> {
    let points = model.sample_points(sample_count.max(1), 0);
    let n = model.dim() as f64;
    let curvs = points
        .iter()
        .map(|p| curvature(model, p, 0))
        .collect::<Result<Vec<_>>>()?;
    let lambda = curvs.iter().map(|c| c.scalar / n).sum::<f64>() / curvs.len() as f64;
    let mut worst = (0.0, Vec::new());
    for c in &curvs {
        let dev = c
            .ricci
            .indexed_iter()
            .map(|((a, b), v)| (v - if a == b { lambda } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        if dev > worst.0 {
            worst = (dev, c.point.coords.clone());
        }
    }
    if worst.0 > tol {
        return Err(Error::NotEinstein {
            deviation: worst.0,
            witness: worst.1,
        });
    }
    Ok(lambda)
}

/// Estimate of max |sec| over the model. Homogeneous models are probed at
/// the sampling center only.
pub fn max_abs_sec(model: &ModelManifold, restarts: usize) -> Result<f64> {
    let count = if model.metadata().homogeneous { 1 } else { 8 };
    let mut best: f64 = 0.0;
    for p in model.sample_points(count, MAX_SEC_SEED) {
        let c = curvature(model, &p, 0)?;
        best = best.max(max_abs_sectional(&c.riemann, restarts, MAX_SEC_SEED)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_model, ModelSpec};

    #[test]
    fn torus_frame_is_identity() {
        let m = make_model(&ModelSpec::flat_torus(4)).unwrap();
        let f = build_frame(&m, &ChartPoint::origin(4), Some(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(f.adapted);
        for i in 0..4 {
            for a in 0..4 {
                let t = if i == a { 1.0 } else { 0.0 };
                assert!((f.vectors[[i, a]] - t).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sphere_anchor() {
        let m = make_model(&ModelSpec::round_sphere(2, 1.0)).unwrap();
        let c = curvature(&m, &ChartPoint::new(0, vec![0.3, -0.2]), 0).unwrap();
        assert!((c.riemann[[0, 1, 0, 1]] - 1.0).abs() < 1e-12);
        assert!((c.scalar - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_seed_rejected() {
        let m = make_model(&ModelSpec::fubini_study(2, 1.0)).unwrap();
        let err = build_frame(&m, &ChartPoint::origin(4), Some(&[0.0; 4])).unwrap_err();
        assert_eq!(err, Error::ZeroSeed);
    }

    #[test]
    fn order_cap() {
        let m = make_model(&ModelSpec::flat_torus(2)).unwrap();
        assert_eq!(
            metric_jet(&m, &ChartPoint::origin(2), 5).unwrap_err(),
            Error::OrderUnsupported(5)
        );
    }

    #[test]
    fn parallel_vectors() {
        let m = make_model(&ModelSpec::round_sphere(2, 1.0)).unwrap();
        let c = curvature(&m, &ChartPoint::origin(2), 0).unwrap();
        assert!(sectional(&c, &[1.0, 0.0], &[2.0, 0.0]).is_err());
    }
}
