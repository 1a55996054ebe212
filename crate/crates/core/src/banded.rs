//! Banded LU factorization with partial pivoting.

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals. Storage keeps
/// room for the `kl` extra super-diagonals created by row pivoting.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    a: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            width,
            a: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku {
            return 0.0;
        }
        self.a[self.idx(i, j)]
    }

    /// Adds `v` at `(i, j)`; entries outside the declared band are an error.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "({i},{j}) outside band"
        );
        let k = self.idx(i, j);
        self.a[k] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let reach = ku + kl;
        let mut piv = vec![0usize; n];
        let mut mult = vec![0.0; n * kl.max(1)];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let p = (k..=last)
                .max_by(|&i, &j| {
                    self.a[self.idx(i, k)]
                        .abs()
                        .total_cmp(&self.a[self.idx(j, k)].abs())
                })
                .expect("nonempty pivot range");
            let pv = self.a[self.idx(p, k)];
            if pv == 0.0 || !pv.is_finite() {
                return Err(Error::Degenerate(format!(
                    "singular band matrix at column {k}"
                )));
            }
            piv[k] = p;
            let jmax = (k + reach).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let (ik, ip) = (self.idx(k, j), self.idx(p, j));
                    self.a.swap(ik, ip);
                }
            }
            let d = self.a[self.idx(k, k)];
            for i in k + 1..=last {
                let l = self.a[self.idx(i, k)] / d;
                mult[k * kl + (i - k - 1)] = l;
                if l != 0.0 {
                    for j in k..=jmax {
                        let (ik, kk) = (self.idx(i, j), self.idx(k, j));
                        self.a[ik] -= l * self.a[kk];
                    }
                }
            }
        }
        Ok(BandLu { m: self, piv, mult })
    }
}

/// Factorization produced by [`BandMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    piv: Vec<usize>,
    mult: Vec<f64>,
}

impl BandLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let m = &self.m;
        let (n, kl) = (m.n, m.kl);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let last = (k + kl).min(n - 1);
            for i in k + 1..=last {
                x[i] -= self.mult[k * kl + (i - k - 1)] * x[k];
            }
        }
        let reach = m.ku + m.kl;
        for k in (0..n).rev() {
            let jmax = (k + reach).min(n - 1);
            let mut s = x[k];
            for j in k + 1..=jmax {
                s -= m.a[m.idx(k, j)] * x[j];
            }
            x[k] = s / m.a[m.idx(k, k)];
        }
        x
    }
}
