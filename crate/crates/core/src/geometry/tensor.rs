//! Christoffel symbols, Riemann tensor and its covariant derivatives in
//! chart coordinates, assembled from metric jets.
//!
//! Sign convention: `R_ijkl = g(R(∂_i, ∂_j)∂_l, ∂_k)` with
//! `R(X, Y) = [∇_X, ∇_Y] − ∇_[X,Y]`, which gives `R(x, y, x, y) > 0` on the
//! round sphere.

use ndarray::{Array2, Array3, Array4, Array5, Array6};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetMatrix};

/// Curvature data in chart coordinates at one point.
#[derive(Clone, Debug, Serialize)]
pub struct CoordinateCurvature {
    pub metric: Array2<f64>,
    pub inverse_metric: Array2<f64>,
    /// `Γ^k_ij` stored at `[k, i, j]`.
    pub christoffel: Array3<f64>,
    pub riemann: Array4<f64>,
    /// `(∇_e R)_ijkl` at `[i, j, k, l, e]`.
    pub d_riemann: Option<Array5<f64>>,
    /// `(∇_f ∇R)_ijkl;e` at `[i, j, k, l, e, f]`.
    pub d2_riemann: Option<Array6<f64>>,
}

pub(crate) fn coordinate_curvature(g: &JetMatrix, deriv_order: usize) -> Result<CoordinateCurvature> {
    let n = g.dim();
    let k = g.order();
    if k < deriv_order + 2 {
        return Err(Error::InsufficientJet {
            have: k,
            need: deriv_order + 2,
        });
    }
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    let i3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let i4 = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;

    // dg[a,b,c] = ∂_a g_bc
    let mut dg = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                dg.push(g.get(b, c).derivative(a));
            }
        }
    }

    // Γ^m_ij = ½ g^{ml} (∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let mut first_kind = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let s = &(&dg[i3(i, j, l)] + &dg[i3(j, i, l)]) - &dg[i3(l, i, j)];
                first_kind.push(s.scale(0.5));
            }
        }
    }
    let lay = std::sync::Arc::clone(first_kind[0].layout());
    let mut gamma = Vec::with_capacity(n * n * n);
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = Jet::zero(&lay);
                for l in 0..n {
                    acc.add_mul(ginv.get(m, l), &first_kind[i3(l, i, j)]);
                }
                gamma.push(acc);
            }
        }
    }

    // ∂_a Γ^m_ij at [a, m, i, j]
    let mut dgamma = Vec::with_capacity(n * n * n * n);
    for a in 0..n {
        for idx in 0..n * n * n {
            dgamma.push(gamma[idx].derivative(a));
        }
    }
    let dgam = |a: usize, m: usize, i: usize, j: usize| &dgamma[a * n * n * n + i3(m, i, j)];

    // standard R^l_kij = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik
    let mut rstd: Vec<Option<Jet>> = vec![None; n * n * n * n];
    for l in 0..n {
        for kk in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    if j < i {
                        let other = rstd[i4(l, kk, j, i)].as_ref().expect("filled").scale(-1.0);
                        rstd[i4(l, kk, i, j)] = Some(other);
                        continue;
                    }
                    let mut acc = dgam(i, l, j, kk) - dgam(j, l, i, kk);
                    for m in 0..n {
                        acc.add_mul(&gamma[i3(l, i, m)], &gamma[i3(m, j, kk)]);
                        acc.sub_mul(&gamma[i3(l, j, m)], &gamma[i3(m, i, kk)]);
                    }
                    rstd[i4(l, kk, i, j)] = Some(acc);
                }
            }
        }
    }
    let zero_d = Jet::zero(&crate::jet::layout(n, deriv_order));

    // R_ijkl = g_km R^m_lij
    let mut riemann = Vec::with_capacity(n * n * n * n);
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                for l in 0..n {
                    let mut acc = zero_d.clone();
                    if i != j {
                        for m in 0..n {
                            acc.add_mul(g.get(kk, m), rstd[i4(m, l, i, j)].as_ref().expect("filled"));
                        }
                    }
                    riemann.push(acc);
                }
            }
        }
    }

    let metric = g.values();
    let inverse_metric = ginv.values();
    let christoffel = Array3::from_shape_fn((n, n, n), |(m, i, j)| gamma[i3(m, i, j)].value());
    let riemann_vals = Array4::from_shape_fn((n, n, n, n), |(i, j, kk, l)| riemann[i4(i, j, kk, l)].value());

    let mut out = CoordinateCurvature {
        metric,
        inverse_metric,
        christoffel,
        riemann: riemann_vals,
        d_riemann: None,
        d2_riemann: None,
    };
    if deriv_order == 0 {
        return Ok(out);
    }

    // (∇_e R)_ijkl = ∂_e R_ijkl − Γ^m_ei R_mjkl − Γ^m_ej R_imkl − Γ^m_ek R_ijml − Γ^m_el R_ijkm
    let i5 = |a: usize, b: usize, c: usize, d: usize, e: usize| i4(a, b, c, d) * n + e;
    let mut dr = Vec::with_capacity(n.pow(5));
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                for l in 0..n {
                    for e in 0..n {
                        let mut acc = riemann[i4(i, j, kk, l)].derivative(e);
                        for m in 0..n {
                            acc.sub_mul(&gamma[i3(m, e, i)], &riemann[i4(m, j, kk, l)]);
                            acc.sub_mul(&gamma[i3(m, e, j)], &riemann[i4(i, m, kk, l)]);
                            acc.sub_mul(&gamma[i3(m, e, kk)], &riemann[i4(i, j, m, l)]);
                            acc.sub_mul(&gamma[i3(m, e, l)], &riemann[i4(i, j, kk, m)]);
                        }
                        dr.push(acc);
                    }
                }
            }
        }
    }
    out.d_riemann = Some(Array5::from_shape_fn((n, n, n, n, n), |(i, j, kk, l, e)| {
        dr[i5(i, j, kk, l, e)].value()
    }));
    if deriv_order == 1 {
        return Ok(out);
    }

    let gam = &out.christoffel;
    let drv = out.d_riemann.as_ref().expect("computed above");
    let mut d2 = Array6::<f64>::zeros((n, n, n, n, n, n));
    let mut unit = vec![0u8; n];
    for f in 0..n {
        unit.iter_mut().for_each(|u| *u = 0);
        unit[f] = 1;
        for i in 0..n {
            for j in 0..n {
                for kk in 0..n {
                    for l in 0..n {
                        for e in 0..n {
                            let mut v = dr[i5(i, j, kk, l, e)].coeff(&unit);
                            for m in 0..n {
                                v -= gam[[m, f, i]] * drv[[m, j, kk, l, e]]
                                    + gam[[m, f, j]] * drv[[i, m, kk, l, e]]
                                    + gam[[m, f, kk]] * drv[[i, j, m, l, e]]
                                    + gam[[m, f, l]] * drv[[i, j, kk, m, e]]
                                    + gam[[m, f, e]] * drv[[i, j, kk, l, m]];
                            }
                            d2[[i, j, kk, l, e, f]] = v;
                        }
                    }
                }
            }
        }
    }
    out.d2_riemann = Some(d2);
    Ok(out)
}
