//! The truncated exponential `Φ_{α,j₀}(s) = exp(α|s|^q) − Σ_{j<j₀} α^j|s|^{qj}/j!`.

use crate::error::{invalid, Error, Result};

/// Largest exponent argument accepted before [`Error::Overflow`].
pub const MAX_EXP_ARG: f64 = 709.0;

/// Below this value of `α|s|^q` the tail series is summed directly.
const SERIES_SWITCH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoungParams {
    pub alpha: f64,
    pub j0: usize,
    pub q_exp: f64,
}

impl YoungParams {
    pub fn new(alpha: f64, j0: usize, q_exp: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return invalid(format!("α = {alpha} must be positive"));
        }
        if j0 < 1 {
            return invalid("j0 must be at least 1");
        }
        if !(q_exp > 1.0) {
            return invalid(format!("exponent q = {q_exp} must exceed 1"));
        }
        Ok(YoungParams { alpha, j0, q_exp })
    }

    /// `q = n/(n−2)`.
    pub fn for_dim(n: usize, alpha: f64, j0: usize) -> Result<Self> {
        if n < 3 {
            return invalid(format!("n = {n} too small"));
        }
        let nf = n as f64;
        Self::new(alpha, j0, nf / (nf - 2.0))
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        YoungParams { alpha, ..self }
    }

    /// `x = α|s|^q`.
    pub fn arg(&self, s: f64) -> f64 {
        self.alpha * s.abs().powf(self.q_exp)
    }
}

/// `Σ_{j ≥ j0} x^j / j!` for `0 ≤ x` small.
fn tail_series(x: f64, j0: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    for j in 1..=j0 {
        term *= x / j as f64;
    }
    let mut sum = 0.0;
    let mut j = j0;
    while term > sum * 1e-18 && j < j0 + 200 {
        sum += term;
        j += 1;
        term *= x / j as f64;
    }
    sum
}

/// `ln Σ_{j ≥ j0} x^j / j!` for `0 < x < SERIES_SWITCH`, free of underflow in `x^{j0}`.
fn ln_tail_series(x: f64, j0: usize) -> f64 {
    // Σ_{j≥j0} x^j/j! = x^{j0}/j0! · Σ_{i≥0} x^i j0!/(j0+i)!
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut i = 0;
    while term > sum * 1e-18 && i < 200 {
        sum += term;
        i += 1;
        term *= x / (j0 + i) as f64;
    }
    let ln_fact: f64 = (1..=j0).map(|j| (j as f64).ln()).sum();
    j0 as f64 * x.ln() - ln_fact + sum.ln()
}

fn truncated_poly(x: f64, j0: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for j in 0..j0 {
        sum += term;
        term *= x / (j + 1) as f64;
    }
    sum
}

/// Evaluate `Φ_{α,j₀}` at the precomputed argument `x = α|s|^q`.
pub fn phi_of_arg(x: f64, j0: usize) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Overflow { arg: x });
    }
    if x < SERIES_SWITCH {
        Ok(tail_series(x, j0))
    } else if x > MAX_EXP_ARG {
        Err(Error::Overflow { arg: x })
    } else {
        Ok((x.exp() - truncated_poly(x, j0)).max(0.0))
    }
}

/// `Φ_{α,j₀}(s)`; errors with [`Error::Overflow`] when `α|s|^q` leaves the `f64` range.
pub fn phi(s: f64, params: &YoungParams) -> Result<f64> {
    if !s.is_finite() {
        return invalid("s must be finite");
    }
    phi_of_arg(params.arg(s), params.j0)
}

/// `ln Φ` at argument `x`; never overflows (`-inf` at `x = 0`).
pub fn ln_phi_of_arg(x: f64, j0: usize) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x < SERIES_SWITCH {
        ln_tail_series(x, j0)
    } else if x < 40.0 {
        (x.exp() - truncated_poly(x, j0)).ln()
    } else {
        // exp(x)(1 − P(x)e^{−x}); P(x)e^{−x} is tiny here
        let ln_p = truncated_poly(x, j0).ln();
        x + (-(ln_p - x).exp()).ln_1p()
    }
}

pub fn ln_phi(s: f64, params: &YoungParams) -> f64 {
    ln_phi_of_arg(params.arg(s), params.j0)
}

/// `C_η = (1 − (1+η)^{−1/(℘−1)})^{1−℘}` so that `(a+b)^℘ ≤ (1+η)a^℘ + C_η b^℘`.
pub fn split_constant(eta: f64, wp: f64) -> Result<f64> {
    if !(wp > 1.0) {
        return invalid(format!("℘ = {wp} must exceed 1"));
    }
    if !(eta > 0.0) {
        return invalid(format!("η = {eta} must be positive"));
    }
    Ok((1.0 - (1.0 + eta).powf(-1.0 / (wp - 1.0))).powf(1.0 - wp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p4(alpha: f64) -> YoungParams {
        YoungParams::for_dim(4, alpha, 3).unwrap()
    }

    #[test]
    fn zero_and_unit() {
        assert_eq!(phi(0.0, &p4(1.0)).unwrap(), 0.0);
        let v = phi(1.0, &p4(1.0)).unwrap();
        assert!((v - (std::f64::consts::E - 2.5)).abs() < 1e-15);
    }

    #[test]
    fn overflow_is_signalled() {
        assert!(matches!(phi(30.0, &p4(1.0)), Err(Error::Overflow { .. })));
        assert!((ln_phi(30.0, &p4(1.0)) - 900.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(YoungParams::new(0.0, 3, 2.0).is_err());
        assert!(YoungParams::new(1.0, 0, 2.0).is_err());
        assert!(YoungParams::new(1.0, 3, 1.0).is_err());
        assert!(split_constant(1.0, 1.0).is_err());
    }

    #[test]
    fn split_constant_quadratic() {
        assert!((split_constant(1.0, 2.0).unwrap() - 2.0).abs() < 1e-14);
        for eta in [0.01, 0.3, 5.0] {
            let c = split_constant(eta, 2.0).unwrap();
            assert!((c - (1.0 + eta) / eta).abs() < 1e-12 * c);
        }
    }

    #[test]
    fn ln_phi_matches_phi() {
        for &s in &[1e-4, 0.3, 0.7, 1.0, 2.0, 4.0, 6.0] {
            let p = p4(1.3);
            let a = phi(s, &p).unwrap().ln();
            let b = ln_phi(s, &p);
            assert!(
                (a - b).abs() < 1e-12 * a.abs().max(1.0),
                "s={s}: {a} vs {b}"
            );
        }
    }

    proptest! {
        #[test]
        fn even_and_increasing(s in 0.001f64..5.0, ds in 0.001f64..1.0, a in 0.05f64..3.0) {
            let p = p4(a);
            let v = phi(s, &p).unwrap();
            prop_assert_eq!(v, phi(-s, &p).unwrap());
            prop_assert!(phi(s + ds, &p).unwrap() > v);
            prop_assert!(phi(s, &p.with_alpha(a * 1.1)).unwrap() >= v);
            prop_assert!(v >= 0.0);
        }

        #[test]
        fn series_and_direct_agree(x in 0.5f64..3.0, j0 in 1usize..5) {
            // above the switch point the direct formula is stable
            let direct = x.exp() - truncated_poly(x, j0);
            let series = tail_series(x, j0);
            prop_assert!((direct - series).abs() <= 1e-12 * series);
        }
    }
}
