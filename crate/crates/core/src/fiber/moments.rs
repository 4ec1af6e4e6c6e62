//! Exact monomial integrals over the unit sphere `S^{n-1} ⊂ ℝ^n`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

/// `Vol(S^{n-1})`, by the recursion `V_{k+1} = 2π/k · V_{k-1}` on `S^k`.
pub fn sphere_volume(n: usize) -> f64 {
    assert!(n >= 1, "ambient dimension must be positive");
    // volume of S^k with k = n - 1
    let k = n - 1;
    let (mut v, mut m) = if k % 2 == 0 { (2.0, 0) } else { (2.0 * PI, 1) };
    while m < k {
        v *= 2.0 * PI / (m as f64 + 1.0);
        m += 2;
    }
    v
}

fn double_factorial_odd(k: u32) -> f64 {
    // (k-1)!! for even k
    (1..k).step_by(2).map(f64::from).product()
}

/// `∫_{S^{n-1}} v^α`; zero when any exponent is odd.
pub fn monomial_moment(n: usize, alpha: &[u8]) -> f64 {
    assert!(n >= 2, "moments need n >= 2");
    assert_eq!(alpha.len(), n, "multi-index length");
    if alpha.iter().any(|&a| a % 2 == 1) {
        return 0.0;
    }
    let num: f64 = alpha.iter().map(|&a| double_factorial_odd(u32::from(a))).product();
    let half: usize = alpha.iter().map(|&a| usize::from(a)).sum::<usize>() / 2;
    let den: f64 = (1..=half).map(|m| (n + 2 * m - 2) as f64).product();
    sphere_volume(n) * num / den
}

/// Per-dimension cache of moments.
#[derive(Debug)]
pub struct MomentTable {
    n: usize,
    volume: f64,
    cache: RwLock<HashMap<Vec<u8>, f64>>,
}

impl MomentTable {
    /// Shared table for dimension `n`.
    pub fn for_dim(n: usize) -> Arc<MomentTable> {
        static TABLES: OnceLock<RwLock<HashMap<usize, Arc<MomentTable>>>> = OnceLock::new();
        let tables = TABLES.get_or_init(Default::default);
        if let Some(t) = tables.read().expect("moment tables poisoned").get(&n) {
            return Arc::clone(t);
        }
        let mut w = tables.write().expect("moment tables poisoned");
        Arc::clone(w.entry(n).or_insert_with(|| {
            Arc::new(MomentTable {
                n,
                volume: sphere_volume(n),
                cache: RwLock::new(HashMap::new()),
            })
        }))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn get(&self, alpha: &[u8]) -> f64 {
        if alpha.iter().any(|&a| a % 2 == 1) {
            return 0.0;
        }
        if let Some(&v) = self.cache.read().expect("moment cache poisoned").get(alpha) {
            return v;
        }
        let v = monomial_moment(self.n, alpha);
        self.cache
            .write()
            .expect("moment cache poisoned")
            .insert(alpha.to_vec(), v);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn volumes() {
        assert_relative_eq!(sphere_volume(2), 2.0 * PI);
        assert_relative_eq!(sphere_volume(3), 4.0 * PI);
        assert_relative_eq!(sphere_volume(4), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(6), PI.powi(3), max_relative = 1e-15);
    }

    #[test]
    fn small_moments() {
        assert_eq!(monomial_moment(4, &[1, 1, 0, 0]), 0.0);
        assert_relative_eq!(monomial_moment(4, &[2, 0, 0, 0]), PI * PI / 2.0, max_relative = 1e-15);
        assert_relative_eq!(monomial_moment(4, &[2, 2, 0, 0]), PI * PI / 12.0, max_relative = 1e-15);
        let t = MomentTable::for_dim(4);
        assert_eq!(t.get(&[4, 0, 0, 0]), monomial_moment(4, &[4, 0, 0, 0]));
    }
}
