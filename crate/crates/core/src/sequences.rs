//! Closed-form piecewise radial profiles: the Moser–Adams sequence `ξ_k`, the
//! truncated-logarithm profile and the concentration–compactness family.
//!
//! Profiles are stored in `t = ln r` with every piece either a polynomial in
//! `r/ρ` or a polynomial in `ln(1/r)`, so both the value and the exact
//! Laplacian are available and `k` can be passed as `L = ln k` far beyond the
//! range of `f64`.

use crate::constants::{beta_n2, measures};
use crate::error::{invalid, Error, Result};
use crate::functionals::e_norm;
use crate::grid::{GridRef, RadialFunction};
use crate::poly;
use crate::profile::{Radial, Samples};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// `Σ c_j (r/ρ)^j` with `ρ = e^{ln_rho}`.
    Power { coeffs: Vec<f64>, ln_rho: f64 },
    /// `Σ c_j y^j` with `y = (ln(1/r) − shift)/width`.
    Log {
        coeffs: Vec<f64>,
        shift: f64,
        width: f64,
    },
}

impl Term {
    /// `(u, r²Δu)` at `t = ln r`.
    fn eval(&self, t: f64, n: usize) -> (f64, f64) {
        let nf = n as f64;
        match self {
            Term::Power { coeffs, ln_rho } => {
                let x = (t - ln_rho).exp();
                let mut u = 0.0;
                let mut l = 0.0;
                let mut xj = 1.0;
                for (j, &c) in coeffs.iter().enumerate() {
                    let jf = j as f64;
                    u += c * xj;
                    l += c * jf * (jf + nf - 2.0) * xj;
                    xj *= x;
                }
                (u, l)
            }
            Term::Log {
                coeffs,
                shift,
                width,
            } => {
                let y = (-t - shift) / width;
                let d1 = poly::derivative(coeffs);
                let d2 = poly::derivative(&d1);
                (
                    poly::eval(coeffs, y),
                    poly::eval(&d2, y) / (width * width) - (nf - 2.0) * poly::eval(&d1, y) / width,
                )
            }
        }
    }

    fn scaled(&self, c: f64) -> Term {
        match self {
            Term::Power { coeffs, ln_rho } => Term::Power {
                coeffs: poly::scale(coeffs, c),
                ln_rho: *ln_rho,
            },
            Term::Log {
                coeffs,
                shift,
                width,
            } => Term::Log {
                coeffs: poly::scale(coeffs, c),
                shift: *shift,
                width: *width,
            },
        }
    }

    /// The term of `u(λr)`.
    fn dilated(&self, ln_lambda: f64) -> Term {
        match self {
            Term::Power { coeffs, ln_rho } => Term::Power {
                coeffs: coeffs.clone(),
                ln_rho: ln_rho - ln_lambda,
            },
            // ln(1/(λr)) = ln(1/r) − ln λ
            Term::Log {
                coeffs,
                shift,
                width,
            } => Term::Log {
                coeffs: coeffs.clone(),
                shift: shift + ln_lambda,
                width: *width,
            },
        }
    }
}

/// Piece on `t ∈ [t_lo, t_hi]`; an empty term list is the zero function.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub t_lo: f64,
    pub t_hi: f64,
    pub terms: Vec<Term>,
}

/// Radial profile given piecewise in closed form; pieces partition `(0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseRadial {
    pub n: usize,
    pub pieces: Vec<Piece>,
}

const PANEL: f64 = 0.5;
const GL_POINTS: usize = 12;

impl PiecewiseRadial {
    pub fn new(n: usize, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return invalid("no pieces");
        }
        if pieces[0].t_lo != f64::NEG_INFINITY || pieces.last().unwrap().t_hi != f64::INFINITY {
            return invalid("pieces must cover (0, ∞)");
        }
        for w in pieces.windows(2) {
            if w[0].t_hi != w[1].t_lo || !(w[0].t_lo < w[0].t_hi) {
                return invalid("pieces must be contiguous and nonempty");
            }
        }
        if !pieces.last().unwrap().terms.is_empty() {
            return invalid("profile must vanish for large r");
        }
        Ok(PiecewiseRadial { n, pieces })
    }

    fn piece_at(&self, t: f64) -> &Piece {
        let i = self
            .pieces
            .partition_point(|p| p.t_hi < t)
            .min(self.pieces.len() - 1);
        &self.pieces[i]
    }

    fn eval_piece(&self, p: &Piece, t: f64) -> (f64, f64) {
        p.terms.iter().fold((0.0, 0.0), |(u, l), term| {
            let (a, b) = term.eval(t, self.n);
            (u + a, l + b)
        })
    }

    /// `(u, r²Δu)` at `t = ln r`.
    pub fn eval_t(&self, t: f64) -> (f64, f64) {
        self.eval_piece(self.piece_at(t), t)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval_t(r.ln()).0
    }

    pub fn laplacian(&self, r: f64) -> f64 {
        self.eval_t(r.ln()).1 / (r * r)
    }

    /// Largest value jump across junctions.
    pub fn continuity_mismatch(&self) -> f64 {
        self.pieces
            .windows(2)
            .map(|w| {
                let t = w[0].t_hi;
                (self.eval_piece(&w[0], t).0 - self.eval_piece(&w[1], t).0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest jump of `u′` across junctions (`u_t` compared, i.e. `r u′`).
    pub fn derivative_mismatch(&self) -> f64 {
        let h = 1e-6;
        self.pieces
            .windows(2)
            .map(|w| {
                let t = w[0].t_hi;
                let dl = (self.eval_piece(&w[0], t).0 - self.eval_piece(&w[0], t - h).0) / h;
                let dr = (self.eval_piece(&w[1], t + h).0 - self.eval_piece(&w[1], t).0) / h;
                (dl - dr).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                t_lo: p.t_lo,
                t_hi: p.t_hi,
                terms: p.terms.iter().map(|t| t.scaled(c)).collect(),
            })
            .collect();
        PiecewiseRadial { n: self.n, pieces }
    }

    /// `r ↦ u(λr)`.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return invalid(format!("λ = {lambda} must be positive"));
        }
        let s = lambda.ln();
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                t_lo: p.t_lo - s,
                t_hi: p.t_hi - s,
                terms: p.terms.iter().map(|t| t.dilated(s)).collect(),
            })
            .collect();
        Ok(PiecewiseRadial { n: self.n, pieces })
    }

    /// Pointwise sum on the merged breakpoints.
    pub fn add(&self, other: &PiecewiseRadial) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Mismatch("dimensions differ".into()));
        }
        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .map(|p| p.t_hi)
            .filter(|t| t.is_finite())
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut pieces = Vec::new();
        let mut lo = f64::NEG_INFINITY;
        for hi in cuts.into_iter().chain([f64::INFINITY]) {
            let mid = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if hi.is_finite() {
                hi - 1.0
            } else {
                lo + 1.0
            };
            let mut terms = self.piece_at(mid).terms.clone();
            terms.extend(other.piece_at(mid).terms.iter().cloned());
            pieces.push(Piece {
                t_lo: lo,
                t_hi: hi,
                terms,
            });
            lo = hi;
        }
        PiecewiseRadial::new(self.n, pieces)
    }

    /// Support edge `ln r` (start of the trailing zero piece).
    pub fn support_end_t(&self) -> f64 {
        self.pieces.last().unwrap().t_lo
    }

    /// Values and exact Laplacians at the grid nodes.
    pub fn on_grid(&self, grid: GridRef) -> Result<RadialFunction> {
        if grid.n != self.n {
            return Err(Error::Mismatch(format!(
                "grid dimension {} vs {}",
                grid.n, self.n
            )));
        }
        let (mut u, mut l) = (
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
        );
        for &r in &grid.nodes {
            let (a, b) = self.eval_t(r.ln());
            u.push(a);
            l.push(b / (r * r));
        }
        RadialFunction::new(grid, u)?.with_laplacian(l)
    }
}

impl Radial for PiecewiseRadial {
    fn dim(&self) -> usize {
        self.n
    }

    /// Composite Gauss–Legendre in `t` on each nonzero piece; the unbounded
    /// inner piece is truncated where `e^{(n−γ)t}` has decayed by `e^{−80}`.
    fn samples(&self, gamma: f64) -> Samples {
        let c = self.n as f64 - gamma;
        let depth = (80.0 / c).min(4000.0);
        let gl = GaussLegendre::new(GL_POINTS);
        let mut s = Samples {
            n: self.n,
            t: vec![],
            ln_w: vec![],
            u: vec![],
            lap_r2: vec![],
        };
        for p in &self.pieces {
            if p.terms.is_empty() {
                continue;
            }
            let a = if p.t_lo.is_finite() {
                p.t_lo
            } else {
                p.t_hi - depth
            };
            let b = p.t_hi;
            let panels = ((b - a) / PANEL).ceil().max(1.0) as usize;
            let hp = (b - a) / panels as f64;
            for k in 0..panels {
                let lo = a + k as f64 * hp;
                for (t, w) in gl.mapped(lo, lo + hp) {
                    let (u, l) = self.eval_piece(p, t);
                    s.t.push(t);
                    s.ln_w.push(w.ln() + c * t);
                    s.u.push(u);
                    s.lap_r2.push(l);
                }
            }
        }
        s
    }
}

/// Collar shape on `[1, 2]` in powers of `r`: the quintic with
/// `q(1)=0, q′(1)=−1, q″(1)=1` and a triple zero at `r = 2`, so that
/// `A·q` continues `A ln(1/r)` in `C²` fashion.
pub fn collar_quintic() -> Vec<f64> {
    // in x = r − 1: −x + x²/2 + 9/2 x³ − 13/2 x⁴ + 5/2 x⁵
    let qx = [0.0, -1.0, 0.5, 4.5, -6.5, 2.5];
    poly::compose_linear(&qx, -1.0, 1.0)
}

/// Smoothing cap `f(y) = 6y³ − 8y⁴ + 3y⁵`: `f(0)=f′(0)=f″(0)=0`, `f(1)=f′(1)=1`, `f″(1)=0`.
pub fn smoothing_cap() -> Vec<f64> {
    vec![0.0, 0.0, 0.0, 6.0, -8.0, 3.0]
}

/// `(‖f′‖_∞, ‖f″‖_∞)` on `[0, 1]` for [`smoothing_cap`].
pub fn smoothing_cap_norms() -> (f64, f64) {
    let d1 = poly::derivative(&smoothing_cap());
    let d2 = poly::derivative(&d1);
    let m = 20000;
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for i in 0..=m {
        let y = i as f64 / m as f64;
        a = a.max(poly::eval(&d1, y).abs());
        b = b.max(poly::eval(&d2, y).abs());
    }
    (a, b)
}

/// `ξ_k` with `k = e^L`. Inner cap on `r ≤ k^{−1/n}`, logarithm up to `r = 1`,
/// collar on `(1, 2)`.
pub fn moser_adams_xi_ln(ln_k: f64, n: usize) -> Result<PiecewiseRadial> {
    if !(ln_k > 1.0 && ln_k.is_finite()) {
        return invalid(format!("ln k = {ln_k} must exceed 1 (k ≥ 3)"));
    }
    if n < 4 {
        return invalid(format!("n = {n} must be at least 4"));
    }
    let nf = n as f64;
    let beta = beta_n2(n)?;
    let a = xi_log_slope(ln_k, n)?;
    let c0 = (ln_k / beta).powf(1.0 - 2.0 / nf);
    let tj = -ln_k / nf;
    let collar = poly::scale(&collar_quintic(), a);
    let pieces = vec![
        Piece {
            t_lo: f64::NEG_INFINITY,
            t_hi: tj,
            terms: vec![Term::Power {
                coeffs: vec![c0 + 0.5 * a, 0.0, -0.5 * a],
                ln_rho: tj,
            }],
        },
        Piece {
            t_lo: tj,
            t_hi: 0.0,
            terms: vec![Term::Log {
                coeffs: vec![0.0, a],
                shift: 0.0,
                width: 1.0,
            }],
        },
        Piece {
            t_lo: 0.0,
            t_hi: 2f64.ln(),
            terms: vec![Term::Power {
                coeffs: collar,
                ln_rho: 0.0,
            }],
        },
        Piece {
            t_lo: 2f64.ln(),
            t_hi: f64::INFINITY,
            terms: vec![],
        },
    ];
    PiecewiseRadial::new(n, pieces)
}

pub fn moser_adams_xi(k: f64, n: usize) -> Result<PiecewiseRadial> {
    if !(k >= 3.0) {
        return invalid(format!("k = {k} must be at least 3"));
    }
    moser_adams_xi_ln(k.ln(), n)
}

/// `A = nβ(n,2)^{2/n−1}(ln k)^{−2/n}`, the coefficient of `ln(1/r)` in the middle branch.
pub fn xi_log_slope(ln_k: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    let beta = beta_n2(n)?;
    Ok(nf * beta.powf(2.0 / nf - 1.0) * ln_k.powf(-2.0 / nf))
}

/// `ξ_k(0) = (ln k/β)^{1−2/n} + nβ^{2/n−1}/(2(ln k)^{2/n})`.
pub fn xi_center_value(ln_k: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    let beta = beta_n2(n)?;
    Ok((ln_k / beta).powf(1.0 - 2.0 / nf) + 0.5 * xi_log_slope(ln_k, n)?)
}

/// Closed-form split of `‖Δξ_k‖_{n/2}^{n/2}` into inner cap `(nA)^{n/2}σ_n`,
/// logarithmic annulus `(A(n−2))^{n/2} ω ln k/n` (identically 1) and collar
/// `A^{n/2} ω ∫₁² |Δq|^{n/2} r^{n−1} dr`.
pub fn xi_norm_decomposition(ln_k: f64, n: usize) -> Result<(f64, f64, f64)> {
    let nf = n as f64;
    let h = nf / 2.0;
    let (omega, sigma) = measures(n)?;
    let a = xi_log_slope(ln_k, n)?;
    let inner = (nf * a).powf(h) * sigma;
    let middle = (a * (nf - 2.0)).powf(h) * omega * ln_k / nf;
    let q = collar_quintic();
    let d1 = poly::derivative(&q);
    let d2 = poly::derivative(&d1);
    // Δq = q″ + (n−1)q′/r; 64 panels of 16-point Gauss–Legendre
    let gl = GaussLegendre::new(16);
    let panels = 64;
    let mut c = 0.0;
    for j in 0..panels {
        let lo = 1.0 + j as f64 / panels as f64;
        c += gl.integrate(lo, lo + 1.0 / panels as f64, |r| {
            let lap = poly::eval(&d2, r) + (nf - 1.0) * poly::eval(&d1, r) / r;
            lap.abs().powf(h) * r.powf(nf - 1.0)
        });
    }
    Ok((inner, middle, a.powf(h) * omega * c))
}

/// Truncated-logarithm profile `v(s) = Ψ(ln(1/s)/ln(1/r_cut))`; with `scaled`
/// set, returns `v̄ = (ln 1/r_cut)^{1−2/n} v`.
pub fn truncated_log_profile(
    r_cut: f64,
    eps: f64,
    n: usize,
    scaled: bool,
) -> Result<PiecewiseRadial> {
    if !(r_cut > 0.0 && r_cut < 1.0) {
        return invalid(format!("r_cut = {r_cut} must lie in (0, 1)"));
    }
    truncated_log_profile_ln(-r_cut.ln(), eps, n, scaled)
}

/// Same profile parametrized by `Λ = ln(1/r_cut)`, usable far beyond the
/// range where `r_cut` itself is representable.
pub fn truncated_log_profile_ln(
    lam: f64,
    eps: f64,
    n: usize,
    scaled: bool,
) -> Result<PiecewiseRadial> {
    if !(lam > 0.0 && lam.is_finite()) {
        return invalid(format!("ln(1/r_cut) = {lam} must be positive"));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return invalid(format!("ε = {eps} must lie in (0, 1/2)"));
    }
    if n < 3 {
        return invalid(format!("n = {n} too small"));
    }
    let f = smoothing_cap();
    let amp = if scaled {
        lam.powf(1.0 - 2.0 / n as f64)
    } else {
        1.0
    };
    // local variable y ∈ [0, 1] on each piece; σ = ln(1/r), τ = σ/Λ
    let log = |c: Vec<f64>, shift: f64, width: f64| {
        vec![Term::Log {
            coeffs: poly::scale(&c, amp),
            shift,
            width,
        }]
    };
    // τ ∈ (1−ε, 1]: Ψ = 1 − εf((1−τ)/ε) = 1 − εf(1 − y), y = (σ − (1−ε)Λ)/(εΛ)
    let upper = poly::add(
        &[1.0],
        &poly::scale(&poly::compose_linear(&f, 1.0, -1.0), -eps),
    );
    // τ ∈ (0, ε]: Ψ = εf(y), y = σ/(εΛ)
    let lower = poly::scale(&f, eps);
    let pieces = vec![
        Piece {
            t_lo: f64::NEG_INFINITY,
            t_hi: -lam,
            terms: log(vec![1.0], 0.0, 1.0),
        },
        Piece {
            t_lo: -lam,
            t_hi: -(1.0 - eps) * lam,
            terms: log(upper, (1.0 - eps) * lam, eps * lam),
        },
        Piece {
            t_lo: -(1.0 - eps) * lam,
            t_hi: -eps * lam,
            terms: log(vec![0.0, 1.0], 0.0, lam),
        },
        Piece {
            t_lo: -eps * lam,
            t_hi: 0.0,
            terms: log(lower, 0.0, eps * lam),
        },
        Piece {
            t_lo: 0.0,
            t_hi: f64::INFINITY,
            terms: vec![],
        },
    ];
    PiecewiseRadial::new(n, pieces)
}

/// `Θ_{n/2} = ‖Δv̄‖_{n/2}^{n/2} / (ω^{1−n/2} α(n,2)^{n/2})` and its upper bound
/// `1 + 2ε(‖f′‖_∞ + ‖f″‖_∞/((n−2)ε ln(1/r)))^{n/2}`, where the second term
/// makes the `O((ln 1/r)^{−1})` correction explicit.
pub fn theta_half(r_cut: f64, eps: f64, n: usize) -> Result<(f64, f64)> {
    let v = truncated_log_profile(r_cut, eps, n, true)?;
    let nf = n as f64;
    let (omega, _) = measures(n)?;
    let alpha = omega * (nf - 2.0);
    let s = v.samples(0.0);
    let integral = omega * s.lap_power_integral(nf / 2.0);
    let theta = integral / (omega.powf(1.0 - nf / 2.0) * alpha.powf(nf / 2.0));
    let (f1, f2) = smoothing_cap_norms();
    let lam = -r_cut.ln();
    let bound = 1.0 + 2.0 * eps * (f1 + f2 / ((nf - 2.0) * eps * lam)).powf(nf / 2.0);
    Ok((theta, bound))
}

/// Smooth bump `((r−2)(3−r))³` supported in `2 < r < 3`.
pub fn annular_bump(n: usize) -> Result<PiecewiseRadial> {
    let base = poly::mul(&[-2.0, 1.0], &[3.0, -1.0]);
    let cube = poly::mul(&poly::mul(&base, &base), &base);
    PiecewiseRadial::new(
        n,
        vec![
            Piece {
                t_lo: f64::NEG_INFINITY,
                t_hi: 2f64.ln(),
                terms: vec![],
            },
            Piece {
                t_lo: 2f64.ln(),
                t_hi: 3f64.ln(),
                terms: vec![Term::Power {
                    coeffs: cube,
                    ln_rho: 0.0,
                }],
            },
            Piece {
                t_lo: 3f64.ln(),
                t_hi: f64::INFINITY,
                terms: vec![],
            },
        ],
    )
}

/// Concentration–compactness family: the weak limit `u` (bump with `‖u‖ = δ`)
/// and `u_k = v_k/‖v_k‖` with `v_k = u + (1−δ^{n/2})^{2/n} ξ_k`.
#[derive(Debug, Clone)]
pub struct CcFamily {
    pub u: PiecewiseRadial,
    pub u_k: PiecewiseRadial,
    pub v_norm: f64,
    pub delta: f64,
    pub ln_k: f64,
}

impl CcFamily {
    /// `L_n(u) = (1 − ‖u‖^{n/2})^{−2/(n−2)}`.
    pub fn concentration_threshold(&self) -> f64 {
        let nf = self.u.n as f64;
        (1.0 - self.delta.powf(nf / 2.0)).powf(-2.0 / (nf - 2.0))
    }
}

pub fn cc_sharpness_family_ln(ln_k: f64, delta: f64, n: usize, p: f64) -> Result<CcFamily> {
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("δ = {delta} must lie in (0, 1)"));
    }
    let nf = n as f64;
    let bump = annular_bump(n)?;
    let u = bump.scaled(delta / e_norm(&bump, p)?.e_norm);
    let xi = moser_adams_xi_ln(ln_k, n)?;
    let v = u.add(&xi.scaled((1.0 - delta.powf(nf / 2.0)).powf(2.0 / nf)))?;
    let v_norm = e_norm(&v, p)?.e_norm;
    Ok(CcFamily {
        u,
        u_k: v.scaled(1.0 / v_norm),
        v_norm,
        delta,
        ln_k,
    })
}

/// Grid samples `(u, u_k)` of the family at `k`.
pub fn cc_sharpness_family(
    k: f64,
    delta: f64,
    n: usize,
    p: f64,
    grid: GridRef,
) -> Result<(RadialFunction, RadialFunction)> {
    if !(k >= 3.0) {
        return invalid(format!("k = {k} must be at least 3"));
    }
    let fam = cc_sharpness_family_ln(k.ln(), delta, n, p)?;
    Ok((fam.u.on_grid(grid.clone())?, fam.u_k.on_grid(grid)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collar_conditions() {
        let q = collar_quintic();
        let d1 = poly::derivative(&q);
        let d2 = poly::derivative(&d1);
        let checks = [
            (poly::eval(&q, 1.0), 0.0),
            (poly::eval(&d1, 1.0), -1.0),
            (poly::eval(&d2, 1.0), 1.0),
            (poly::eval(&q, 2.0), 0.0),
            (poly::eval(&d1, 2.0), 0.0),
            (poly::eval(&d2, 2.0), 0.0),
        ];
        for (got, want) in checks {
            assert!((got - want).abs() < 1e-11, "{got} vs {want}");
        }
    }

    #[test]
    fn cap_conditions() {
        let f = smoothing_cap();
        let d1 = poly::derivative(&f);
        let d2 = poly::derivative(&d1);
        assert_eq!(poly::eval(&f, 0.0), 0.0);
        assert_eq!(poly::eval(&d1, 0.0), 0.0);
        assert_eq!(poly::eval(&d2, 0.0), 0.0);
        assert_eq!(poly::eval(&f, 1.0), 1.0);
        assert_eq!(poly::eval(&d1, 1.0), 1.0);
        assert_eq!(poly::eval(&d2, 1.0), 0.0);
        let (a, _) = smoothing_cap_norms();
        assert!((a - 1.512).abs() < 1e-6);
    }

    #[test]
    fn xi_is_c1() {
        for lk in [5.0, 20.0, 300.0] {
            let xi = moser_adams_xi_ln(lk, 4).unwrap();
            assert!(xi.continuity_mismatch() < 1e-12);
            assert!(xi.derivative_mismatch() < 1e-5);
        }
    }

    #[test]
    fn xi_rejects_small_k() {
        assert!(moser_adams_xi(2.0, 4).is_err());
        assert!(moser_adams_xi(1e3, 3).is_err());
    }

    #[test]
    fn dilation_and_sum() {
        let xi = moser_adams_xi_ln(7.0, 4).unwrap();
        let d = xi.dilated(1.7).unwrap();
        for r in [1e-3, 0.05, 0.4, 0.9, 1.1] {
            assert!((d.value(r) - xi.value(1.7 * r)).abs() < 1e-12);
        }
        let b = annular_bump(4).unwrap();
        let s = xi.add(&b).unwrap();
        for r in [1e-3, 0.5, 1.5, 2.5] {
            assert!((s.value(r) - xi.value(r) - b.value(r)).abs() < 1e-13);
        }
    }

    #[test]
    fn truncated_log_shape() {
        let v = truncated_log_profile(1e-3, 0.1, 4, false).unwrap();
        assert!(v.continuity_mismatch() < 1e-12);
        assert_eq!(v.value(1e-4), 1.0);
        assert_eq!(v.value(1.0), 0.0);
        assert!((v.value(10f64.powf(-1.5)) - 0.5).abs() < 1e-12);
    }
}
