//! Jets of a black-box metric from central differences, Richardson
//! extrapolated over two step levels (h and h/2).

use std::collections::HashMap;

use ndarray::Array2;

use crate::jet::{self, Jet, JetMatrix};

// Central stencils (offset, weight) for the m-th derivative, O(h²) accurate.
fn stencil(m: u8) -> &'static [(i32, f64)] {
    match m {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => panic!("derivative order {m} unsupported"),
    }
}

struct Sampler<'a> {
    f: &'a (dyn Fn(&[f64]) -> Array2<f64> + Send + Sync),
    x0: &'a [f64],
    h: f64,
    cache: HashMap<Vec<i32>, Array2<f64>>,
}

impl Sampler<'_> {
    fn at(&mut self, offset: &[i32]) -> Array2<f64> {
        if let Some(v) = self.cache.get(offset) {
            return v.clone();
        }
        let x: Vec<f64> = self
            .x0
            .iter()
            .zip(offset)
            .map(|(x, &o)| x + f64::from(o) * self.h)
            .collect();
        let v = (self.f)(&x);
        self.cache.insert(offset.to_vec(), v.clone());
        v
    }

    fn partial(&mut self, alpha: &[u8]) -> Array2<f64> {
        let n = alpha.len();
        let mut total: Option<Array2<f64>> = None;
        let mut rec_stack: Vec<(Vec<i32>, f64)> = vec![(Vec::new(), 1.0)];
        for &a in alpha {
            let mut next = Vec::new();
            for (off, w) in &rec_stack {
                for &(o, sw) in stencil(a) {
                    let mut off2 = off.clone();
                    off2.push(o);
                    next.push((off2, w * sw));
                }
            }
            rec_stack = next;
        }
        debug_assert!(rec_stack.iter().all(|(o, _)| o.len() == n));
        for (off, w) in rec_stack {
            let v = self.at(&off) * w;
            total = Some(match total {
                None => v,
                Some(t) => t + v,
            });
        }
        let deg: i32 = alpha.iter().map(|&a| i32::from(a)).sum();
        total.expect("non-empty stencil") / self.h.powi(deg)
    }
}

pub(crate) fn finite_difference_jet(
    f: &(dyn Fn(&[f64]) -> Array2<f64> + Send + Sync),
    x0: &[f64],
    n: usize,
    order: usize,
    step: f64,
) -> JetMatrix {
    let lay = jet::layout(n, order);
    let mut coarse = Sampler {
        f,
        x0,
        h: step,
        cache: HashMap::new(),
    };
    let mut fine = Sampler {
        f,
        x0,
        h: step / 2.0,
        cache: HashMap::new(),
    };
    let mut partials: Vec<HashMap<Vec<u8>, f64>> = vec![HashMap::new(); n * n];
    for alpha in lay.monomials() {
        let d = if alpha.iter().all(|&a| a == 0) {
            coarse.at(&vec![0; n])
        } else {
            let dc = coarse.partial(alpha);
            let df = fine.partial(alpha);
            (df * 4.0 - dc) / 3.0
        };
        for i in 0..n {
            for j in 0..n {
                // symmetrize to suppress round-off asymmetry
                partials[i * n + j].insert(alpha.clone(), 0.5 * (d[[i, j]] + d[[j, i]]));
            }
        }
    }
    JetMatrix::from_fn(n, |i, j| Jet::from_partials(&lay, &partials[i * n + j]))
}
