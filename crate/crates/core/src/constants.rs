//! Dimensional constants: sphere measures, the sharp Adams exponent and the
//! mountain-pass level bound.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};

/// `(ω_{n-1}, σ_n)`: surface measure of the unit sphere and volume of the unit ball.
pub fn measures(n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return invalid(format!("dimension n = {n} must be at least 2"));
    }
    let nf = n as f64;
    let omega = 2.0 * PI.powf(nf / 2.0) / gamma(nf / 2.0);
    Ok((omega, omega / nf))
}

/// `β(n,2) = n[(n−2)ω_{n-1}^{2/n}]^{n/(n−2)}`.
pub fn beta_n2(n: usize) -> Result<f64> {
    if n < 3 {
        return invalid(format!("β(n,2) needs n ≥ 3, got {n}"));
    }
    let nf = n as f64;
    let (omega, _) = measures(n)?;
    Ok(nf * ((nf - 2.0) * omega.powf(2.0 / nf)).powf(nf / (nf - 2.0)))
}

/// Critical Sobolev exponent `p* = np/(n−2p)`.
pub fn p_star(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    nf * p / (nf - 2.0 * p)
}

/// Truncation index `j₀ = ⌈p*(n−2)/n⌉`.
pub fn j0(n: usize, p: f64) -> usize {
    let nf = n as f64;
    let x = p_star(n, p) * (nf - 2.0) / nf;
    // guard against x = 3.0000000000000004 style round-off
    let r = x.round();
    if (x - r).abs() < 1e-12 * x.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Validate `(n, p, γ)` against `n ≥ 4`, `1 < p < n/2`, `0 ≤ γ < n`.
pub fn check_npg(n: usize, p: f64, gamma: f64) -> Result<()> {
    if n < 4 {
        return invalid(format!("n = {n} must be at least 4"));
    }
    let nf = n as f64;
    if !(p > 1.0 && p < nf / 2.0) {
        return invalid(format!("p = {p} must satisfy 1 < p < n/2 = {}", nf / 2.0));
    }
    if !(gamma >= 0.0 && gamma < nf) {
        return invalid(format!("γ = {gamma} must satisfy 0 ≤ γ < n"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantSet {
    pub n: usize,
    pub p: f64,
    pub gamma: f64,
    pub p_star: f64,
    pub j0: usize,
    pub omega: f64,
    pub sigma: f64,
    pub beta_n2: f64,
    pub beta_gamma: f64,
    pub alpha_n2: f64,
    /// Level bound; present when `(μ, α₀)` were supplied.
    pub c0: Option<f64>,
    pub mu: Option<f64>,
    pub alpha0: Option<f64>,
}

impl ConstantSet {
    pub fn new(n: usize, p: f64, gamma: f64) -> Result<Self> {
        check_npg(n, p, gamma)?;
        let (omega, sigma) = measures(n)?;
        let nf = n as f64;
        let b = beta_n2(n)?;
        Ok(ConstantSet {
            n,
            p,
            gamma,
            p_star: p_star(n, p),
            j0: j0(n, p),
            omega,
            sigma,
            beta_n2: b,
            beta_gamma: (1.0 - gamma / nf) * b,
            alpha_n2: omega * (nf - 2.0),
            c0: None,
            mu: None,
            alpha0: None,
        })
    }

    /// Full set including `c₀` for the Ambrosetti–Rabinowitz constant `μ` and growth `α₀`.
    pub fn with_level(n: usize, p: f64, gamma: f64, mu: f64, alpha0: f64) -> Result<Self> {
        let mut c = Self::new(n, p, gamma)?;
        let nf = n as f64;
        if !(mu > nf / 2.0) {
            return invalid(format!("μ = {mu} must exceed n/2"));
        }
        if !(alpha0 > 0.0) {
            return invalid(format!("α₀ = {alpha0} must be positive"));
        }
        let (t1, t2) = c0_terms(n, p, c.beta_gamma, mu, alpha0);
        c.c0 = Some(t1.min(t2));
        c.mu = Some(mu);
        c.alpha0 = Some(alpha0);
        Ok(c)
    }

    pub fn q_exp(&self) -> f64 {
        let nf = self.n as f64;
        nf / (nf - 2.0)
    }

    /// Ordered `(name, value)` pairs for tabular output.
    pub fn rows(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![
            ("n", self.n as f64),
            ("p", self.p),
            ("gamma", self.gamma),
            ("p_star", self.p_star),
            ("j0", self.j0 as f64),
            ("omega", self.omega),
            ("sigma", self.sigma),
            ("beta_n2", self.beta_n2),
            ("beta_gamma", self.beta_gamma),
            ("alpha_n2", self.alpha_n2),
        ];
        if let (Some(mu), Some(a0), Some(c0)) = (self.mu, self.alpha0, self.c0) {
            v.push(("mu", mu));
            v.push(("alpha0", a0));
            v.push(("c0", c0));
        }
        v
    }
}

/// The two bracketed candidates whose minimum is `c₀`.
pub fn c0_terms(n: usize, p: f64, beta_gamma: f64, mu: f64, alpha0: f64) -> (f64, f64) {
    let nf = n as f64;
    let m = (2.0 * mu - nf) / (nf * mu);
    let r = beta_gamma / alpha0;
    let t1 = 2f64.powf(-nf / 2.0) * m.powf(nf / (2.0 * p)) * r.powf((nf - 2.0) / 2.0);
    let t2 = 2f64.powf(-p) * m * r.powf((nf - 2.0) * p / nf);
    (t1, t2)
}
