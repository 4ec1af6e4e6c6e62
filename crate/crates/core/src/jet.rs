//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] holds the Taylor coefficients of a function of `nvars` real
//! variables around a base point, truncated at total degree `order`.
//! Arithmetic on jets propagates derivatives exactly up to the truncation
//! order, so a metric written once over [`Jet`] yields its partial
//! derivatives without finite differences.
//!
//! Monomials are stored degree by degree in an order that does not depend on
//! the truncation order, so the coefficient vector of a lower-order jet is a
//! prefix of the higher-order one. Truncation is a slice.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock, RwLock};

/// Highest truncation order a layout may be built for.
pub const MAX_ORDER: usize = 6;

/// Monomial bookkeeping shared by all jets of one `(nvars, order)` shape.
pub struct Layout {
    nvars: usize,
    order: usize,
    monomials: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    degree_start: Vec<usize>,
    // (a, b, a+b) for every pair with deg(a) + deg(b) <= order
    products: Vec<(u32, u32, u32)>,
    // per variable: (source index here, target index in the order-1 layout, factor)
    derivatives: Vec<Vec<(u32, u32, f64)>>,
}

impl fmt::Debug for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Layout")
            .field("nvars", &self.nvars)
            .field("order", &self.order)
            .field("len", &self.monomials.len())
            .finish()
    }
}

fn monomials_of_degree(nvars: usize, degree: usize) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, remaining: usize, slots: usize, out: &mut Vec<Vec<u8>>) {
        if slots == 1 {
            prefix.push(remaining as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k as u8);
            rec(prefix, remaining - k, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(&mut Vec::with_capacity(nvars), degree, nvars, &mut out);
    out
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Self {
        let mut monomials = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for d in 0..=order {
            degree_start.push(monomials.len());
            monomials.extend(monomials_of_degree(nvars, d));
        }
        degree_start.push(monomials.len());
        let index: HashMap<Vec<u8>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let degree = |m: &[u8]| m.iter().map(|&e| e as usize).sum::<usize>();

        let mut products = Vec::new();
        for (ia, a) in monomials.iter().enumerate() {
            let da = degree(a);
            for (ib, b) in monomials.iter().enumerate() {
                if da + degree(b) > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((ia as u32, ib as u32, index[&sum] as u32));
            }
        }

        let mut derivatives = vec![Vec::new(); nvars];
        if order > 0 {
            for (var, table) in derivatives.iter_mut().enumerate() {
                // targets live in the order-1 prefix
                for (target, m) in monomials[..degree_start[order]].iter().enumerate() {
                    let mut src = m.clone();
                    src[var] += 1;
                    table.push((index[&src] as u32, target as u32, f64::from(src[var])));
                }
            }
        }

        Layout {
            nvars,
            order,
            monomials,
            index,
            degree_start,
            products,
            derivatives,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Vec<u8>] {
        &self.monomials
    }

    pub fn index_of(&self, exponents: &[u8]) -> Option<usize> {
        self.index.get(exponents).copied()
    }

    /// Number of coefficients of total degree `<= degree`.
    pub fn prefix_len(&self, degree: usize) -> usize {
        self.degree_start[(degree + 1).min(self.order + 1)]
    }
}

type LayoutCache = RwLock<HashMap<(usize, usize), Arc<Layout>>>;

fn cache() -> &'static LayoutCache {
    static CACHE: OnceLock<LayoutCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared layout for jets in `nvars` variables truncated at `order`.
pub fn layout(nvars: usize, order: usize) -> Arc<Layout> {
    assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
    if let Some(l) = cache().read().expect("layout cache poisoned").get(&(nvars, order)) {
        return Arc::clone(l);
    }
    let built = Arc::new(Layout::build(nvars, order));
    let mut w = cache().write().expect("layout cache poisoned");
    Arc::clone(w.entry((nvars, order)).or_insert(built))
}

/// Truncated Taylor polynomial in several variables.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.layout.nvars)
            .field("order", &self.layout.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.layout.nvars == other.layout.nvars
            && self.layout.order == other.layout.order
            && self.coeffs == other.coeffs
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl Jet {
    pub fn zero(layout: &Arc<Layout>) -> Self {
        Jet {
            layout: Arc::clone(layout),
            coeffs: vec![0.0; layout.len()],
        }
    }

    pub fn constant(layout: &Arc<Layout>, value: f64) -> Self {
        let mut j = Self::zero(layout);
        j.coeffs[0] = value;
        j
    }

    /// The coordinate function `value + h_var`.
    pub fn variable(layout: &Arc<Layout>, var: usize, value: f64) -> Self {
        assert!(var < layout.nvars);
        let mut j = Self::constant(layout, value);
        if layout.order > 0 {
            let mut e = vec![0u8; layout.nvars];
            e[var] = 1;
            j.coeffs[layout.index[&e]] = 1.0;
        }
        j
    }

    /// Builds a jet from a map of partial derivatives `∂^α f` keyed by the
    /// exponent vector `α`. Missing entries are zero.
    pub fn from_partials(layout: &Arc<Layout>, partials: &HashMap<Vec<u8>, f64>) -> Self {
        let mut j = Self::zero(layout);
        for (i, m) in layout.monomials.iter().enumerate() {
            if let Some(&d) = partials.get(m) {
                let alpha_fact: f64 = m.iter().map(|&e| factorial(e as usize)).product();
                j.coeffs[i] = d / alpha_fact;
            }
        }
        j
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Taylor coefficient of the monomial with exponents `exponents`.
    pub fn coeff(&self, exponents: &[u8]) -> f64 {
        self.layout
            .index_of(exponents)
            .map_or(0.0, |i| self.coeffs[i])
    }

    /// Partial derivative `∂^α f` at the base point.
    pub fn partial(&self, exponents: &[u8]) -> f64 {
        let alpha_fact: f64 = exponents.iter().map(|&e| factorial(e as usize)).product();
        self.coeff(exponents) * alpha_fact
    }

    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.layout.order {
            return self.clone();
        }
        let l = layout(self.layout.nvars, order);
        let n = l.len();
        Jet {
            layout: l,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    /// `∂f/∂x_var` as a jet of one lower order.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.layout.order > 0, "cannot differentiate an order-0 jet");
        let l = layout(self.layout.nvars, self.layout.order - 1);
        let mut coeffs = vec![0.0; l.len()];
        for &(src, dst, factor) in &self.layout.derivatives[var] {
            coeffs[dst as usize] = factor * self.coeffs[src as usize];
        }
        Jet { layout: l, coeffs }
    }

    fn common(&self, other: &Jet) -> Arc<Layout> {
        debug_assert_eq!(self.layout.nvars, other.layout.nvars);
        if self.layout.order <= other.layout.order {
            Arc::clone(&self.layout)
        } else {
            Arc::clone(&other.layout)
        }
    }

    /// `self += a * b`, truncating to the lowest order involved.
    pub fn add_mul(&mut self, a: &Jet, b: &Jet) {
        self.fused(a, b, 1.0);
    }

    /// `self -= a * b`.
    pub fn sub_mul(&mut self, a: &Jet, b: &Jet) {
        self.fused(a, b, -1.0);
    }

    fn fused(&mut self, a: &Jet, b: &Jet, sign: f64) {
        debug_assert_eq!(a.layout.nvars, b.layout.nvars);
        let target = self.order().min(a.order()).min(b.order());
        if self.order() > target {
            *self = self.truncate(target);
        }
        let l = Arc::clone(&self.layout);
        for &(i, k, s) in &l.products {
            self.coeffs[s as usize] += sign * a.coeffs[i as usize] * b.coeffs[k as usize];
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            layout: Arc::clone(&self.layout),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `Σ_k derivs[k]/k! · (self − value)^k`, i.e. the composition `g ∘ self`
    /// for a scalar function `g` whose derivatives at `self.value()` are `derivs`.
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        let order = self.layout.order;
        assert!(derivs.len() > order, "need {} derivatives", order + 1);
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut acc = Jet::constant(&self.layout, derivs[order] / factorial(order));
        for k in (0..order).rev() {
            let mut next = Jet::constant(&self.layout, derivs[k] / factorial(k));
            next.add_mul(&acc, &delta);
            acc = next;
        }
        acc
    }

    pub fn recip(&self) -> Jet {
        let x = self.value();
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut c = 1.0;
        for k in 0..=self.order() {
            d.push(c / x.powi(k as i32 + 1));
            c *= -((k + 1) as f64);
        }
        self.compose(&d)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&vec![e; self.order() + 1])
    }

    pub fn ln(&self) -> Jet {
        let x = self.value();
        let mut d = vec![x.ln()];
        let mut c = 1.0;
        for k in 1..=self.order() {
            d.push(c / x.powi(k as i32));
            c *= -(k as f64);
        }
        self.compose(&d)
    }

    pub fn powf(&self, a: f64) -> Jet {
        let x = self.value();
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut c = 1.0;
        for k in 0..=self.order() {
            d.push(c * x.powf(a - k as f64));
            c *= a - k as f64;
        }
        self.compose(&d)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let d: Vec<f64> = (0..=self.order()).map(|k| cycle[k % 4]).collect();
        self.compose(&d)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let d: Vec<f64> = (0..=self.order()).map(|k| cycle[k % 4]).collect();
        self.compose(&d)
    }
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let l = self.common(rhs);
        let coeffs = (0..l.len()).map(|i| self.coeffs[i] + rhs.coeffs[i]).collect();
        Jet { layout: l, coeffs }
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let l = self.common(rhs);
        let coeffs = (0..l.len()).map(|i| self.coeffs[i] - rhs.coeffs[i]).collect();
        Jet { layout: l, coeffs }
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let l = self.common(rhs);
        let mut out = Jet::zero(&l);
        out.add_mul(self, rhs);
        out
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        if rhs.layout.order < self.layout.order {
            *self = self.truncate(rhs.layout.order);
        }
        let n = self.layout.len();
        for (c, r) in self.coeffs.iter_mut().zip(&rhs.coeffs[..n]) {
            *c += r;
        }
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        if rhs.layout.order < self.layout.order {
            *self = self.truncate(rhs.layout.order);
        }
        let n = self.layout.len();
        for (c, r) in self.coeffs.iter_mut().zip(&rhs.coeffs[..n]) {
            *c -= r;
        }
    }
}

/// Dense square matrix of jets, row-major.
#[derive(Clone, Debug)]
pub struct JetMatrix {
    n: usize,
    data: Vec<Jet>,
}

impl JetMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Jet) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        JetMatrix { n, data }
    }

    pub fn constant(layout: &Arc<Layout>, values: &ndarray::Array2<f64>) -> Self {
        let n = values.nrows();
        Self::from_fn(n, |i, j| Jet::constant(layout, values[[i, j]]))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Jet) {
        self.data[i * self.n + j] = v;
    }

    pub fn order(&self) -> usize {
        self.data.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn values(&self) -> ndarray::Array2<f64> {
        ndarray::Array2::from_shape_fn((self.n, self.n), |(i, j)| self.get(i, j).value())
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> Self {
        JetMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|j| j.truncate(order))
    }

    pub fn matmul(&self, other: &JetMatrix) -> JetMatrix {
        let n = self.n;
        let l = self.get(0, 0).common(other.get(0, 0));
        Self::from_fn(n, |i, j| {
            let mut acc = Jet::zero(&l);
            for k in 0..n {
                acc.add_mul(self.get(i, k), other.get(k, j));
            }
            acc
        })
    }

    pub fn transpose(&self) -> JetMatrix {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Inverse through the Neumann series around the base-point value, exact
    /// to the truncation order. `None` when the base value is singular.
    pub fn inverse(&self) -> Option<JetMatrix> {
        let l = Arc::clone(self.get(0, 0).layout());
        let order = self.order();
        let base = crate::linalg::inverse(&self.values())?;
        let b = JetMatrix::constant(&l, &base);
        let nilpotent = self.map(|j| {
            let mut d = j.clone();
            d.coeffs[0] = 0.0;
            d
        });
        let step = b.matmul(&nilpotent).map(|j| -j);
        let mut term = b.clone();
        let mut acc = b;
        for _ in 0..order {
            term = step.matmul(&term);
            for (a, t) in acc.data.iter_mut().zip(&term.data) {
                *a += t;
            }
        }
        Some(acc)
    }
}
