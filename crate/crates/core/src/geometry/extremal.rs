//! Extremal sectional curvature over the Grassmannian of 2-planes by
//! alternating exact maximization: with `x` fixed, `y ↦ R(x,y,x,y)` is a
//! quadratic form on `x⊥`, maximized by its top eigenvector.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{dot, orthonormal_columns};

pub const ITERATION_CAP: usize = 20_000;
const GRAD_TOL: f64 = 1e-8;
const STALL_TOL: f64 = 1e-15;

fn quad(r: &Array4<f64>, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            let xy = x[a] * y[b];
            if xy == 0.0 {
                continue;
            }
            for c in 0..n {
                for d in 0..n {
                    s += r[[a, b, c, d]] * xy * x[c] * y[d];
                }
            }
        }
    }
    s
}

/// `M[b, d] = sign · R(x, e_b, x, e_d)`.
fn pencil(r: &Array4<f64>, sign: f64, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut m = DMatrix::zeros(n, n);
    for a in 0..n {
        for c in 0..n {
            let w = x[a] * x[c];
            if w == 0.0 {
                continue;
            }
            for b in 0..n {
                for d in 0..n {
                    m[(b, d)] += sign * w * r[[a, b, c, d]];
                }
            }
        }
    }
    m
}

/// Top eigenpair of `M` restricted to `x⊥`.
fn best_partner(r: &Array4<f64>, sign: f64, x: &[f64]) -> (f64, Vec<f64>) {
    let n = x.len();
    let m = pencil(r, sign, x);
    let xv = nalgebra::DVector::from_column_slice(x);
    let p = DMatrix::identity(n, n) - &xv * xv.transpose();
    let shift = m.abs().max() * 4.0 + 1.0;
    let b = &p * m * &p - shift * &xv * xv.transpose();
    let eig = SymmetricEigen::new(b);
    let (k, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    (val, eig.eigenvectors.column(k).iter().copied().collect())
}

/// Norm of the Grassmannian gradient of `sign · R(x,y,x,y)`.
fn gradient_norm(r: &Array4<f64>, sign: f64, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut gx = vec![0.0; n];
    let mut gy = vec![0.0; n];
    for ((a, b, c, d), &v) in r.indexed_iter() {
        if v != 0.0 {
            gx[a] += 2.0 * sign * v * y[b] * x[c] * y[d];
            gy[b] += 2.0 * sign * v * x[a] * x[c] * y[d];
        }
    }
    for g in [&mut gx, &mut gy] {
        let cx = dot(g, x);
        let cy = dot(g, y);
        for i in 0..n {
            g[i] -= cx * x[i] + cy * y[i];
        }
    }
    (dot(&gx, &gx) + dot(&gy, &gy)).sqrt()
}

/// Maximizes `sign · R(x,y,x,y)` over orthonormal pairs from one start.
/// Returns the best value and whether a stopping test was met.
fn ascend(r: &Array4<f64>, sign: f64, x: Vec<f64>, y: Vec<f64>) -> (f64, bool) {
    let scale = r.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let (mut x, mut y) = (x, y);
    let mut f = sign * quad(r, &x, &y);
    for _ in 0..ITERATION_CAP {
        let (fy, ny) = best_partner(r, sign, &x);
        let (fx, nx) = best_partner(r, sign, &ny);
        let gained = fx - f;
        if fx >= f {
            y = ny;
            x = nx;
            f = fx;
        } else if fy > f {
            y = ny;
            f = fy;
        }
        if gradient_norm(r, sign, &x, &y) < GRAD_TOL * scale || gained.abs() <= STALL_TOL * scale {
            return (f, true);
        }
    }
    (f, false)
}

fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// max over 2-planes of `sign · sec`. Restart `i` always draws the same start
/// so the estimate is monotone in `restarts`.
pub fn extremal_sectional(r: &Array4<f64>, sign: f64, restarts: usize, seed: u64) -> Result<f64> {
    let n = r.shape()[0];
    if n < 2 {
        return Ok(0.0);
    }
    let mut best = f64::NEG_INFINITY;
    let mut any_converged = false;
    for i in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let on = loop {
            let on = orthonormal_columns(&[random_unit(&mut rng, n), random_unit(&mut rng, n)]);
            if on.len() == 2 {
                break on;
            }
        };
        let (f, ok) = ascend(r, sign, on[0].clone(), on[1].clone());
        any_converged |= ok;
        best = best.max(f);
    }
    if !any_converged {
        return Err(Error::NonConvergence(ITERATION_CAP));
    }
    Ok(best)
}

/// max |sec| over 2-planes for a frame-indexed curvature tensor.
pub fn max_abs_sectional(r: &Array4<f64>, restarts: usize, seed: u64) -> Result<f64> {
    let hi = extremal_sectional(r, 1.0, restarts, seed)?;
    let lo = extremal_sectional(r, -1.0, restarts, seed)?;
    Ok(hi.max(lo).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    // unit round sphere: R_abcd = δ_ac δ_bd − δ_ad δ_bc
    fn sphere(n: usize) -> Array4<f64> {
        Array4::from_shape_fn((n, n, n, n), |(a, b, c, d)| {
            f64::from(u8::from(a == c && b == d)) - f64::from(u8::from(a == d && b == c))
        })
    }

    #[test]
    fn sphere_extremes() {
        let r = sphere(4);
        assert!((extremal_sectional(&r, 1.0, 4, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((extremal_sectional(&r, -1.0, 4, 1).unwrap() + 1.0).abs() < 1e-12);
    }
}
