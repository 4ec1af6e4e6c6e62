//! Small dense helpers for the n ≤ 8 matrices that appear at a point.

use ndarray::{Array1, Array2};

/// Gauss–Jordan inverse with partial pivoting. `None` if singular.
pub fn inverse(m: &Array2<f64>) -> Option<Array2<f64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let mut a = m.clone();
    let mut inv = Array2::<f64>::eye(n);
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[[i, col]].abs().total_cmp(&a[[j, col]].abs()))
            .unwrap();
        if a[[pivot, col]].abs() <= 1e-14 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap([pivot, k], [col, k]);
                inv.swap([pivot, k], [col, k]);
            }
        }
        let p = a[[col, col]];
        for k in 0..n {
            a[[col, k]] /= p;
            inv[[col, k]] /= p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[[row, col]];
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                a[[row, k]] -= f * a[[col, k]];
                inv[[row, k]] -= f * inv[[col, k]];
            }
        }
    }
    Some(inv)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn matvec(m: &Array2<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[[i, j]] * v[j]).sum())
        .collect()
}

/// `g(a, b)` for a symmetric bilinear form given as a matrix.
pub fn inner(g: &Array2<f64>, a: &[f64], b: &[f64]) -> f64 {
    dot(a, &matvec(g, b))
}

/// Orthonormalizes the columns of `basis` with the Euclidean inner product,
/// in order. Columns that are (numerically) dependent are dropped.
pub fn orthonormal_columns(basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in basis {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = dot(&w, u);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let nw = norm(&w);
        if nw > 1e-10 * norm(v).max(1e-300) {
            out.push(w.iter().map(|x| x / nw).collect());
        }
    }
    out
}

pub fn to_array(v: &[f64]) -> Array1<f64> {
    Array1::from(v.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn inverse_roundtrip() {
        let m = array![[4.0, 1.0, 0.0], [1.0, 3.0, 0.5], [0.0, 0.5, 2.0]];
        let inv = inverse(&m).unwrap();
        let id = m.dot(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let t = if i == j { 1.0 } else { 0.0 };
                assert!((id[[i, j]] - t).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_is_none() {
        let m = array![[1.0, 2.0], [2.0, 4.0]];
        assert!(inverse(&m).is_none());
    }
}
