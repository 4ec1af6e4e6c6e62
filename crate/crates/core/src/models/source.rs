//! Closed-form chart metrics and complex structures, written over [`Jet`].

use std::sync::Arc;

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::jet::{Jet, JetMatrix, Layout};

/// Compactly supported bump `A·exp(1/(|x−x₀|²/ρ² − 1))` on `|x−x₀| < ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub width: f64,
    pub center: Vec<f64>,
}

impl Bump {
    /// Returns `None` where the bump vanishes identically (outside its ball).
    pub fn eval(&self, x: &[Jet]) -> Option<Jet> {
        if self.amplitude == 0.0 {
            return None;
        }
        let l = Arc::clone(x[0].layout());
        let mut s = Jet::zero(&l);
        for (xi, ci) in x.iter().zip(&self.center) {
            let d = xi + (-ci);
            s.add_mul(&d, &d);
        }
        let s = s.scale(1.0 / (self.width * self.width));
        if s.value() >= 1.0 {
            return None;
        }
        let q = (&s + -1.0).recip();
        Some(q.exp().scale(self.amplitude))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let s: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / (self.width * self.width);
        if self.amplitude == 0.0 || s >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 / (s - 1.0)).exp()
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Source {
    /// Stereographic chart of the round sphere of the given radius.
    Sphere { dim: usize, radius: f64 },
    /// Identity metric; standard J rotated by angle `twist·sin(x₀)` in the (e₁, e₂) plane.
    Torus { dim: usize, twist: f64 },
    /// Affine chart (c > 0, Fubini–Study) or ball model (c < 0) of the
    /// complex space form of constant holomorphic curvature `c`.
    SpaceForm { complex_dim: usize, c: f64 },
    Product(Vec<Source>),
    Scaled { lambda: f64, inner: Box<Source> },
    Conformal { bump: Bump, inner: Box<Source> },
}

/// Standard complex structure: J ∂x_k = ∂y_k, J ∂y_k = −∂x_k.
pub fn standard_j(n: usize) -> Array2<f64> {
    let mut j = Array2::zeros((n, n));
    for k in 0..n / 2 {
        j[[2 * k + 1, 2 * k]] = 1.0;
        j[[2 * k, 2 * k + 1]] = -1.0;
    }
    j
}

fn lay(x: &[Jet]) -> Arc<Layout> {
    Arc::clone(x[0].layout())
}

impl Source {
    pub fn dim(&self) -> usize {
        match self {
            Source::Sphere { dim, .. } | Source::Torus { dim, .. } => *dim,
            Source::SpaceForm { complex_dim, .. } => 2 * complex_dim,
            Source::Product(f) => f.iter().map(Source::dim).sum(),
            Source::Scaled { inner, .. } | Source::Conformal { inner, .. } => inner.dim(),
        }
    }

    pub fn has_complex_structure(&self) -> bool {
        match self {
            Source::Sphere { .. } => false,
            Source::Torus { dim, .. } => dim % 2 == 0,
            Source::SpaceForm { .. } => true,
            Source::Product(f) => f.iter().all(Source::has_complex_structure),
            Source::Scaled { inner, .. } | Source::Conformal { inner, .. } => {
                inner.has_complex_structure()
            }
        }
    }

    pub fn metric(&self, x: &[Jet]) -> JetMatrix {
        let n = self.dim();
        let l = lay(x);
        match self {
            Source::Sphere { radius, .. } => {
                let mut r2 = Jet::constant(&l, 1.0);
                for xi in x {
                    r2.add_mul(xi, xi);
                }
                let f = r2.powf(-2.0).scale(4.0 * radius * radius);
                JetMatrix::from_fn(n, |i, j| if i == j { f.clone() } else { Jet::zero(&l) })
            }
            Source::Torus { .. } => JetMatrix::from_fn(n, |i, j| {
                Jet::constant(&l, if i == j { 1.0 } else { 0.0 })
            }),
            Source::SpaceForm { c, .. } => {
                let s = c.signum();
                let mut r2 = Jet::zero(&l);
                for xi in x {
                    r2.add_mul(xi, xi);
                }
                // w = J x
                let w: Vec<Jet> = (0..n)
                    .map(|a| if a % 2 == 0 { -&x[a + 1] } else { x[a - 1].clone() })
                    .collect();
                let q = r2.scale(s) + 1.0;
                let pref = q.powf(-2.0).scale(4.0 / c.abs());
                JetMatrix::from_fn(n, |a, b| {
                    let mut m = if a == b { q.clone() } else { Jet::zero(&l) };
                    let mut cross = &x[a] * &x[b];
                    cross.add_mul(&w[a], &w[b]);
                    m -= &cross.scale(s);
                    &pref * &m
                })
            }
            Source::Product(factors) => {
                let mut out = JetMatrix::from_fn(n, |_, _| Jet::zero(&l));
                let mut off = 0;
                for f in factors {
                    let d = f.dim();
                    let block = f.metric(&x[off..off + d]);
                    for i in 0..d {
                        for j in 0..d {
                            out.set(off + i, off + j, block.get(i, j).clone());
                        }
                    }
                    off += d;
                }
                out
            }
            Source::Scaled { lambda, inner } => {
                inner.metric(x).map(|j| j.scale(lambda * lambda))
            }
            Source::Conformal { bump, inner } => {
                let g = inner.metric(x);
                match bump.eval(x) {
                    None => g,
                    Some(u) => {
                        let factor = u.scale(2.0).exp();
                        g.map(|j| &factor * j)
                    }
                }
            }
        }
    }

    pub fn complex_structure(&self, x: &[Jet]) -> Option<JetMatrix> {
        let n = self.dim();
        let l = lay(x);
        match self {
            Source::Sphere { .. } => None,
            Source::Torus { twist, .. } => {
                if n % 2 != 0 {
                    return None;
                }
                let j0 = JetMatrix::constant(&l, &standard_j(n));
                if *twist == 0.0 || n < 4 {
                    return Some(j0);
                }
                // R = rotation by φ in the (1, 2) coordinate plane; J = R J₀ Rᵀ
                let phi = x[0].sin().scale(*twist);
                let (cs, sn) = (phi.cos(), phi.sin());
                let rot = JetMatrix::from_fn(n, |i, j| match (i, j) {
                    (1, 1) | (2, 2) => cs.clone(),
                    (1, 2) => -&sn,
                    (2, 1) => sn.clone(),
                    _ => Jet::constant(&l, if i == j { 1.0 } else { 0.0 }),
                });
                Some(rot.matmul(&j0).matmul(&rot.transpose()))
            }
            Source::SpaceForm { .. } => Some(JetMatrix::constant(&l, &standard_j(n))),
            Source::Product(factors) => {
                let mut out = JetMatrix::from_fn(n, |_, _| Jet::zero(&l));
                let mut off = 0;
                for f in factors {
                    let d = f.dim();
                    let block = f.complex_structure(&x[off..off + d])?;
                    for i in 0..d {
                        for j in 0..d {
                            out.set(off + i, off + j, block.get(i, j).clone());
                        }
                    }
                    off += d;
                }
                Some(out)
            }
            Source::Scaled { inner, .. } | Source::Conformal { inner, .. } => {
                inner.complex_structure(x)
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            Source::Sphere { .. } => r2 < 100.0,
            Source::Torus { .. } => x.iter().all(|v| v.abs() < 1e3),
            Source::SpaceForm { c, .. } => {
                if *c > 0.0 {
                    r2 < 100.0
                } else {
                    r2 < 0.95 * 0.95
                }
            }
            Source::Product(factors) => {
                let mut off = 0;
                factors.iter().all(|f| {
                    let d = f.dim();
                    let ok = f.contains(&x[off..off + d]);
                    off += d;
                    ok
                })
            }
            Source::Scaled { inner, .. } | Source::Conformal { inner, .. } => inner.contains(x),
        }
    }

    /// Number of charts beyond the primary one.
    pub fn extra_charts(&self) -> usize {
        match self {
            Source::SpaceForm { complex_dim: 1, c } if *c > 0.0 => 1,
            Source::Sphere { dim: 2, .. } => 1,
            Source::Scaled { inner, .. } | Source::Conformal { inner, .. } => inner.extra_charts(),
            _ => 0,
        }
    }

    /// Transition map from chart `chart ≥ 1` into primary chart coordinates.
    pub fn to_primary(&self, chart: usize, w: &[Jet]) -> Vec<Jet> {
        match self {
            Source::Scaled { inner, .. } | Source::Conformal { inner, .. } => {
                inner.to_primary(chart, w)
            }
            _ => {
                debug_assert_eq!(chart, 1);
                // z = 1/w in complex notation: (a, b) ↦ (a, −b)/(a² + b²)
                let mut r2 = &w[0] * &w[0];
                r2.add_mul(&w[1], &w[1]);
                let inv = r2.recip();
                vec![&w[0] * &inv, -(&w[1] * &inv)]
            }
        }
    }

    pub fn primary_point(&self, chart: usize, w: &[f64]) -> Option<Vec<f64>> {
        if chart == 0 {
            return Some(w.to_vec());
        }
        if chart > self.extra_charts() {
            return None;
        }
        let r2 = w[0] * w[0] + w[1] * w[1];
        if r2 < 1e-2 {
            return None;
        }
        Some(vec![w[0] / r2, -w[1] / r2])
    }

    pub fn sampling_ball(&self) -> (Vec<f64>, f64) {
        let n = self.dim();
        match self {
            Source::SpaceForm { c, .. } if *c < 0.0 => (vec![0.0; n], 0.5),
            Source::Scaled { inner, .. } => inner.sampling_ball(),
            Source::Conformal { bump, .. } if bump.amplitude != 0.0 => {
                (bump.center.clone(), 0.9 * bump.width)
            }
            Source::Conformal { inner, .. } => inner.sampling_ball(),
            _ => (vec![0.0; n], 1.0),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Source::Product(factors) => factors.iter().flat_map(|f| f.sample(rng)).collect(),
            Source::Scaled { inner, .. } => inner.sample(rng),
            Source::Conformal { bump, inner } if bump.amplitude == 0.0 => inner.sample(rng),
            _ => {
                let (center, radius) = self.sampling_ball();
                uniform_in_ball(rng, &center, radius)
            }
        }
    }
}

pub fn uniform_in_ball<R: Rng + ?Sized>(rng: &mut R, center: &[f64], radius: f64) -> Vec<f64> {
    let n = center.len();
    let dir: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let r = radius * rng.gen::<f64>().powf(1.0 / n as f64);
    center
        .iter()
        .zip(&dir)
        .map(|(c, d)| c + r * d / norm)
        .collect()
}
