#![allow(dead_code)]

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn unit<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let v = gaussian(rng, n);
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / nv).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn matvec(m: &Array2<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[[i, j]] * v[j]).sum()).collect()
}

/// Unit vector orthogonal to `x` (Euclidean components).
pub fn unit_orthogonal<R: Rng>(rng: &mut R, x: &[f64]) -> Vec<f64> {
    let mut v = gaussian(rng, x.len());
    let c = dot(&v, x);
    v.iter_mut().zip(x).for_each(|(a, b)| *a -= c * b);
    let nv = dot(&v, &v).sqrt();
    v.into_iter().map(|a| a / nv).collect()
}

/// Haar-ish random orthogonal matrix by Gram-Schmidt on Gaussian columns.
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Array2<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < n {
        let mut v = gaussian(rng, n);
        for c in &cols {
            let p = dot(&v, c);
            v.iter_mut().zip(c).for_each(|(a, b)| *a -= p * b);
        }
        let nv = dot(&v, &v).sqrt();
        if nv > 1e-8 {
            cols.push(v.into_iter().map(|a| a / nv).collect());
        }
    }
    Array2::from_shape_fn((n, n), |(i, j)| cols[j][i])
}

/// Realification of a random unitary matrix in `U(n/2)`, in the
/// convention `e_{2k+1} = J e_{2k}`; commutes with the standard J.
pub fn random_unitary_real<R: Rng>(rng: &mut R, n: usize) -> Array2<f64> {
    let m = n / 2;
    // complex Gram-Schmidt on columns (re, im)
    let mut cols: Vec<Vec<(f64, f64)>> = Vec::new();
    while cols.len() < m {
        let mut v: Vec<(f64, f64)> = (0..m).map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        for c in &cols {
            // <c, v> = Σ conj(c) v
            let (mut pr, mut pi) = (0.0, 0.0);
            for (a, b) in c.iter().zip(&v) {
                pr += a.0 * b.0 + a.1 * b.1;
                pi += a.0 * b.1 - a.1 * b.0;
            }
            for (a, b) in c.iter().zip(v.iter_mut()) {
                b.0 -= pr * a.0 - pi * a.1;
                b.1 -= pr * a.1 + pi * a.0;
            }
        }
        let nv = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        if nv > 1e-8 {
            cols.push(v.into_iter().map(|(a, b)| (a / nv, b / nv)).collect());
        }
    }
    let mut q = Array2::zeros((n, n));
    for (k, col) in cols.iter().enumerate() {
        for (i, &(re, im)) in col.iter().enumerate() {
            q[[2 * i, 2 * k]] = re;
            q[[2 * i + 1, 2 * k]] = im;
            q[[2 * i, 2 * k + 1]] = -im;
            q[[2 * i + 1, 2 * k + 1]] = re;
        }
    }
    q
}
