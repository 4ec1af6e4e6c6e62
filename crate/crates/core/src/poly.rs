//! Sparse real polynomials in `n` variables, keyed by exponent vectors.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u8>, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(e, 1.0)
    }

    pub fn monomial(exponents: Vec<u8>, c: f64) -> Self {
        let mut p = Poly::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, exponents: Vec<u8>, c: f64) {
        assert_eq!(exponents.len(), self.nvars, "exponent length");
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(exponents).or_insert(0.0);
        *slot += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, f64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.values().all(|&c| c == 0.0)
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut p = self.clone();
        p.terms.values_mut().for_each(|c| *c *= s);
        p
    }

    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, &c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * f64::from(e[i]));
            }
        }
        out
    }

    /// Flat Laplacian `Σ_i ∂_i²`.
    pub fn laplacian(&self) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, &c) in &self.terms {
            for i in 0..self.nvars {
                if e[i] >= 2 {
                    let mut e2 = e.clone();
                    e2[i] -= 2;
                    out.add_term(e2, c * f64::from(e[i]) * f64::from(e[i] - 1));
                }
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| {
                c * e
                    .iter()
                    .zip(x)
                    .map(|(&k, &v)| v.powi(i32::from(k)))
                    .product::<f64>()
            })
            .sum()
    }

    /// Highest total degree among nonzero terms, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms
            .iter()
            .filter(|(_, &c)| c != 0.0)
            .map(|(e, _)| e.iter().map(|&k| usize::from(k)).sum())
            .max()
    }

    /// The common degree if all nonzero terms share one.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degs = self
            .terms
            .iter()
            .filter(|(_, &c)| c != 0.0)
            .map(|(e, _)| e.iter().map(|&k| usize::from(k)).sum::<usize>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_empty() || self.homogeneous_degree().is_some()
    }

    pub fn has_odd_terms(&self) -> bool {
        self.terms
            .iter()
            .any(|(e, &c)| c != 0.0 && e.iter().any(|&k| k % 2 == 1))
    }

    /// `p(Qᵀv)` for a square matrix `q`, i.e. `p` in rotated coordinates.
    pub fn substitute_linear(&self, q: &ndarray::Array2<f64>) -> Poly {
        let n = self.nvars;
        // y_i = Σ_j q[j, i] v_j
        let lin: Vec<Poly> = (0..n)
            .map(|i| {
                let mut p = Poly::zero(n);
                for jv in 0..n {
                    let mut e = vec![0; n];
                    e[jv] = 1;
                    p.add_term(e, q[[jv, i]]);
                }
                p
            })
            .collect();
        let mut out = Poly::zero(n);
        for (e, &c) in &self.terms {
            let mut t = Poly::constant(n, c);
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = &t * &lin[i];
                }
            }
            out = &out + &t;
        }
        out
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}
