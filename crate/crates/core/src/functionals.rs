//! E-norms, the singular Adams functional, the dilation map and lower-bound
//! probes of the Adams-type suprema.
//!
//! All suprema here are lower-bound probes over explicit families. Large
//! values are carried as logarithms; a row is flagged `overflow` when its
//! value no longer fits in an `f64`.

use std::io::Write;

use rayon::prelude::*;

use crate::constants::{beta_n2, check_npg, j0 as j0_of, measures, p_star};
use crate::error::{invalid, Error, Result};
use crate::grid::{pchip_eval, pchip_slopes, RadialFunction};
use crate::profile::{Radial, Samples};
use crate::quadrature::log_sum_exp;
use crate::sequences::{
    annular_bump, moser_adams_xi_ln, truncated_log_profile_ln, PiecewiseRadial,
};
use crate::young::{ln_phi_of_arg, MAX_EXP_ARG};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnormReport {
    /// `‖Δu‖_p`
    pub dnorm_p: f64,
    /// `‖Δu‖_{n/2}`
    pub dnorm_half: f64,
    /// `(‖Δu‖_{n/2}^{n/2} + ‖Δu‖_p^{n/2})^{2/n}`
    pub e_norm: f64,
    /// `‖Δu‖_{n/2} + ‖Δu‖_p`
    pub e_norm_alt: f64,
    pub n: usize,
}

impl EnormReport {
    pub fn from_norms(dnorm_p: f64, dnorm_half: f64, n: usize) -> Self {
        let h = n as f64 / 2.0;
        EnormReport {
            dnorm_p,
            dnorm_half,
            e_norm: (dnorm_half.powf(h) + dnorm_p.powf(h)).powf(1.0 / h),
            e_norm_alt: dnorm_half + dnorm_p,
            n,
        }
    }

    /// `‖u‖ ≤ ‖u‖_E ≤ 2^{(n−2)/n}‖u‖` up to a relative rounding slack.
    pub fn sandwich_holds(&self, rel: f64) -> bool {
        let nf = self.n as f64;
        self.e_norm <= self.e_norm_alt * (1.0 + rel)
            && self.e_norm_alt <= 2f64.powf((nf - 2.0) / nf) * self.e_norm * (1.0 + rel)
    }
}

/// `‖Δu‖_q` from `γ = 0` samples.
pub fn lap_norm(s: &Samples, q: f64) -> f64 {
    let (omega, _) = measures(s.n).expect("valid dimension");
    (omega * s.lap_power_integral(q)).powf(1.0 / q)
}

pub fn e_norm(u: &impl Radial, p: f64) -> Result<EnormReport> {
    let n = u.dim();
    let s = u.samples(0.0);
    Ok(EnormReport::from_norms(
        lap_norm(&s, p),
        lap_norm(&s, n as f64 / 2.0),
        n,
    ))
}

/// A functional value carried in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValue {
    pub ln_value: f64,
    /// Set when the integrand or the value left the `f64` range.
    pub overflow: bool,
}

impl FunctionalValue {
    /// `exp(ln_value)`, `+inf` once it overflows.
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

fn check_gamma(n: usize, gamma: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma < n as f64) {
        return invalid(format!("γ = {gamma} must lie in [0, n = {n})"));
    }
    Ok(())
}

/// `ln ∫ Φ_{α,j₀}(u)|x|^{−γ}` from precomputed samples.
fn ln_adams_integral(s: &Samples, alpha: f64, j0: usize) -> (f64, bool) {
    let nf = s.n as f64;
    let q = nf / (nf - 2.0);
    let (omega, _) = measures(s.n).expect("valid dimension");
    let mut overflow = false;
    let terms = (0..s.len()).map(|i| {
        let x = alpha * s.u[i].abs().powf(q);
        overflow |= x > MAX_EXP_ARG;
        ln_phi_of_arg(x, j0) + s.ln_w[i]
    });
    let ln = omega.ln() + log_sum_exp(terms.collect::<Vec<_>>());
    (ln, overflow || ln > MAX_EXP_ARG)
}

/// `ω_{n−1}∫ Φ_{α,j₀}(u(r)) r^{n−1−γ} dr`.
pub fn adams_functional(
    u: &impl Radial,
    alpha: f64,
    gamma: f64,
    j0: usize,
) -> Result<FunctionalValue> {
    check_gamma(u.dim(), gamma)?;
    if !(alpha >= 0.0) {
        return invalid(format!("α = {alpha} must be nonnegative"));
    }
    if j0 < 1 {
        return invalid("j0 must be at least 1");
    }
    if alpha == 0.0 {
        return Ok(FunctionalValue {
            ln_value: f64::NEG_INFINITY,
            overflow: false,
        });
    }
    let (ln_value, overflow) = ln_adams_integral(&u.samples(gamma), alpha, j0);
    Ok(FunctionalValue { ln_value, overflow })
}

/// `w(r) = u(λr)` resampled by monotone cubic interpolation in `ln r`; the
/// Laplacian is carried along as `λ²(Δu)(λr)` rather than re-differenced.
pub fn scale(u: &RadialFunction, lambda: f64) -> Result<RadialFunction> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return invalid(format!("λ = {lambda} must be positive"));
    }
    let g = &u.grid;
    let lap = u.laplacian_values();
    let du = pchip_slopes(g, &u.values);
    let dl = pchip_slopes(g, &lap);
    let vals = g
        .nodes
        .iter()
        .map(|&r| pchip_eval(g, &u.values, &du, lambda * r))
        .collect();
    let lw = g
        .nodes
        .iter()
        .map(|&r| lambda * lambda * pchip_eval(g, &lap, &dl, lambda * r))
        .collect();
    RadialFunction::new(g.clone(), vals)?.with_laplacian(lw)
}

/// Quotient `∫Φ_{ℓ(1−γ/n),j₀}(u)|x|^{−γ} / ‖Δu‖_p^{p*(1−γ/n)}` in log form.
pub fn subcritical_quotient(
    u: &impl Radial,
    ell: f64,
    gamma: f64,
    p: f64,
) -> Result<FunctionalValue> {
    let n = u.dim();
    check_npg(n, p, gamma)?;
    let beta = beta_n2(n)?;
    if !(ell > 0.0 && ell < beta) {
        return invalid(format!("ℓ = {ell} must lie in (0, β(n,2) = {beta})"));
    }
    let s0 = u.samples(0.0);
    let nf = n as f64;
    let dh = lap_norm(&s0, nf / 2.0);
    if dh > 1.0 + 1e-9 {
        return invalid(format!("‖Δu‖_{{n/2}} = {dh} exceeds 1"));
    }
    quotient_from_samples(&s0, &u.samples(gamma), ell, gamma, p)
}

fn quotient_from_samples(
    s0: &Samples,
    sg: &Samples,
    ell: f64,
    gamma: f64,
    p: f64,
) -> Result<FunctionalValue> {
    let n = s0.n;
    let nf = n as f64;
    let dp = lap_norm(s0, p);
    if !(dp > 0.0) {
        return Err(Error::Degenerate("‖Δu‖_p vanishes".into()));
    }
    let red = 1.0 - gamma / nf;
    let (ln_f, overflow) = ln_adams_integral(sg, ell * red, j0_of(n, p));
    let ln_value = ln_f - p_star(n, p) * red * dp.ln();
    Ok(FunctionalValue {
        ln_value,
        overflow: overflow || ln_value > MAX_EXP_ARG,
    })
}

/// `(1 − (ℓ/β)^{(n−2)/2})^{−(2p*/n)(1−γ/n)}`.
pub fn atsc_envelope(ell: f64, gamma: f64, n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    let x = ell / beta_n2(n)?;
    Ok((1.0 - x.powf((nf - 2.0) / 2.0)).powf(-(2.0 * p_star(n, p) / nf) * (1.0 - gamma / nf)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub param: f64,
    pub value: f64,
    pub ln_value: f64,
    pub envelope: f64,
    pub overflow: bool,
    /// Auxiliary parameter at which the row's value was attained (e.g. `ln k`).
    pub argmax: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbeTable {
    pub rows: Vec<ProbeRow>,
}

impl ProbeTable {
    pub fn from_rows(mut rows: Vec<ProbeRow>) -> Self {
        rows.sort_by(|a, b| a.param.total_cmp(&b.param));
        ProbeTable { rows }
    }

    pub fn any_overflow(&self) -> bool {
        self.rows.iter().any(|r| r.overflow)
    }

    /// CSV with a `#` config comment, header `param,value,envelope,overflow`.
    pub fn write_csv(&self, out: impl Write, comment: &str) -> std::io::Result<()> {
        write_csv_rows(
            out,
            comment,
            &["param", "value", "envelope", "overflow"],
            self.rows.iter().map(|r| {
                vec![
                    fmt_num(r.param),
                    fmt_num(r.value),
                    fmt_num(r.envelope),
                    (r.overflow as u8).to_string(),
                ]
            }),
        )
    }
}

/// Shortest round-trip formatting; deterministic across runs.
pub fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:e}")
    }
}

pub fn write_csv_rows(
    mut out: impl Write,
    comment: &str,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> std::io::Result<()> {
    writeln!(out, "# {comment}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

/// A member of a probe family normalized to `‖Δw‖_{n/2} = 1`, sampled for
/// `γ = 0` and for `γ`.
struct Member {
    param: f64,
    s0: Samples,
    sg: Samples,
}

fn normalized_member(u: &PiecewiseRadial, param: f64, n: usize, gamma: f64) -> Member {
    let c = 1.0 / lap_norm(&u.samples(0.0), n as f64 / 2.0);
    let w = u.scaled(c);
    Member {
        param,
        s0: w.samples(0.0),
        sg: w.samples(gamma),
    }
}

/// Test family for the subcritical supremum.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeFamily {
    /// Moser–Adams functions `ξ_k`; parameters are `ln k`.
    Xi,
    /// Truncated-log profiles; parameters are `ln(1/r_cut)`, each tried with
    /// every listed `ε`.
    TruncatedLog { eps: Vec<f64> },
}

/// For each `ℓ`, the maximum over `ln k ∈ ln_k_list` of the subcritical
/// quotient along `ξ_k/‖Δξ_k‖_{n/2}`, with the envelope alongside.
pub fn atsc_probe(
    ell_list: &[f64],
    gamma: f64,
    ln_k_list: &[f64],
    n: usize,
    p: f64,
) -> Result<ProbeTable> {
    atsc_probe_family(ell_list, gamma, ln_k_list, n, p, &ProbeFamily::Xi)
}

/// [`atsc_probe`] over an arbitrary family. `argmax` records the family
/// parameter of the maximizer.
pub fn atsc_probe_family(
    ell_list: &[f64],
    gamma: f64,
    params: &[f64],
    n: usize,
    p: f64,
    family: &ProbeFamily,
) -> Result<ProbeTable> {
    check_npg(n, p, gamma)?;
    let beta = beta_n2(n)?;
    if let Some(l) = ell_list.iter().find(|&&l| !(l > 0.0 && l < beta)) {
        return invalid(format!("ℓ = {l} must lie in (0, β(n,2))"));
    }
    if params.is_empty() {
        return invalid("empty family parameter list");
    }
    let specs: Vec<(f64, f64)> = match family {
        ProbeFamily::Xi => params.iter().map(|&x| (x, 0.0)).collect(),
        ProbeFamily::TruncatedLog { eps } => {
            if eps.is_empty() {
                return invalid("empty ε list");
            }
            params
                .iter()
                .flat_map(|&x| eps.iter().map(move |&e| (x, e)))
                .collect()
        }
    };
    let members: Vec<Member> = specs
        .par_iter()
        .map(|&(x, e)| {
            let u = match family {
                ProbeFamily::Xi => moser_adams_xi_ln(x, n)?,
                ProbeFamily::TruncatedLog { .. } => truncated_log_profile_ln(x, e, n, true)?,
            };
            Ok(normalized_member(&u, x, n, gamma))
        })
        .collect::<Result<_>>()?;
    let rows = ell_list
        .par_iter()
        .map(|&ell| {
            let mut best: Option<(FunctionalValue, f64)> = None;
            for w in &members {
                let q = quotient_from_samples(&w.s0, &w.sg, ell, gamma, p)?;
                if best.is_none_or(|(b, _)| q.ln_value > b.ln_value) {
                    best = Some((q, w.param));
                }
            }
            let (q, arg) = best.expect("nonempty family");
            Ok(ProbeRow {
                param: ell,
                value: q.value(),
                ln_value: q.ln_value,
                envelope: atsc_envelope(ell, gamma, n, p)?,
                overflow: q.overflow,
                argmax: arg,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeTable::from_rows(rows))
}

/// `ln` of the identity weight
/// `((1 − x^{((n−2)/n)a}) / x^{((n−2)/n)b})^{(p*/b)(1−γ/n)}`, `x = ℓ/β(n,2)`.
pub fn ln_atc_weight(ell: f64, a: f64, b: f64, gamma: f64, n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    let x = ell / beta_n2(n)?;
    let e = (p_star(n, p) / b) * (1.0 - gamma / nf);
    let k = (nf - 2.0) / nf;
    Ok(e * ((-(k * a * x.ln()).exp()).ln_1p() - k * b * x.ln()))
}

/// Discrete supremum of weight × ATSC samples over the table rows.
pub fn atc_identity_rhs(
    table: &ProbeTable,
    a: f64,
    b: f64,
    gamma: f64,
    n: usize,
    p: f64,
) -> Result<f64> {
    if table.rows.is_empty() {
        return invalid("empty probe table");
    }
    if !(a > 0.0 && b > 0.0) {
        return invalid("a and b must be positive");
    }
    let mut best = f64::NEG_INFINITY;
    for r in &table.rows {
        best = best.max(ln_atc_weight(r.param, a, b, gamma, n, p)? + r.ln_value);
    }
    Ok(best.exp())
}

/// Along a family indexed by `ln k`: rows `(ln k, F)` with `F` the Adams
/// functional at `α`.
pub fn functional_scan(
    family: impl Fn(f64) -> Result<PiecewiseRadial> + Sync,
    ln_k_list: &[f64],
    alpha: f64,
    gamma: f64,
    j0: usize,
) -> Result<ProbeTable> {
    let rows = ln_k_list
        .par_iter()
        .map(|&lk| {
            let u = family(lk)?;
            let f = adams_functional(&u, alpha, gamma, j0)?;
            Ok(ProbeRow {
                param: lk,
                value: f.value(),
                ln_value: f.ln_value,
                envelope: f64::NAN,
                overflow: f.overflow,
                argmax: lk,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeTable::from_rows(rows))
}

/// `ξ_k/‖ξ_k‖`, the E-norm normalization.
pub fn normalized_xi_profile(ln_k: f64, n: usize, p: f64) -> Result<PiecewiseRadial> {
    let xi = moser_adams_xi_ln(ln_k, n)?;
    let c = e_norm(&xi, p)?.e_norm;
    Ok(xi.scaled(1.0 / c))
}

/// Dichotomy summary of a scan: end-to-end growth and the largest ratio to the
/// first row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanTrend {
    pub growth: f64,
    pub max_ratio: f64,
    pub strictly_increasing: bool,
}

pub fn scan_trend(t: &ProbeTable) -> ScanTrend {
    let first = t.rows.first().map(|r| r.ln_value).unwrap_or(0.0);
    let last = t.rows.last().map(|r| r.ln_value).unwrap_or(0.0);
    let max = t
        .rows
        .iter()
        .map(|r| r.ln_value)
        .fold(f64::NEG_INFINITY, f64::max);
    ScanTrend {
        growth: (last - first).exp(),
        max_ratio: (max - first).exp(),
        strictly_increasing: t.rows.windows(2).all(|w| w[1].ln_value > w[0].ln_value),
    }
}

/// Least-squares slope of `ln(value)` against `ln(1 − (ℓ/β)^{(n−2)/2})`,
/// with the envelope exponent `−(2p*/n)(1−γ/n)` it should approach.
pub fn envelope_slope(t: &ProbeTable, gamma: f64, n: usize, p: f64) -> Result<(f64, f64)> {
    if t.rows.len() < 2 {
        return invalid("need at least two rows to fit a slope");
    }
    let nf = n as f64;
    let beta = beta_n2(n)?;
    let pts: Vec<(f64, f64)> = t
        .rows
        .iter()
        .map(|r| {
            (
                (-(r.param / beta).powf((nf - 2.0) / 2.0)).ln_1p(),
                r.ln_value,
            )
        })
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|q| q.0).sum::<f64>() / k;
    let my = pts.iter().map(|q| q.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all ℓ values coincide".into()));
    }
    Ok((sxy / sxx, -(2.0 * p_star(n, p) / nf) * (1.0 - gamma / nf)))
}

/// Trial profile for the embedding probe.
#[derive(Debug, Clone)]
pub enum Trial {
    /// `(1 + b r²) e^{−r²/2}`
    GaussPoly { b: f64 },
    /// `(1 − r²)_+^m`
    Bump { m: u32 },
    /// `ξ_k`
    Xi { ln_k: f64 },
    /// annular bump `((r−2)(3−r))³`
    Annulus,
}

/// Norms of a trial that fix the dilation law: `(‖Δu‖_{n/2}, ‖Δu‖_p, ‖u‖_{ϱ,γ})`.
fn trial_norms(trial: &Trial, n: usize, p: f64, rho: f64, gamma: f64) -> Result<(f64, f64, f64)> {
    let u: PiecewiseRadial;
    let s0;
    let sg;
    match trial {
        Trial::GaussPoly { b } => {
            // sampled in t with Gauss–Legendre panels, closed-form Laplacian
            let nf = n as f64;
            let (t_lo, t_hi) = (-80.0 / (nf - gamma).min(nf), 3.5);
            let gl = crate::quadrature::GaussLegendre::new(12);
            let mut a = Samples {
                n,
                t: vec![],
                ln_w: vec![],
                u: vec![],
                lap_r2: vec![],
            };
            let mut c = a.clone();
            let panels = ((t_hi - t_lo) / 0.25).ceil() as usize;
            let h = (t_hi - t_lo) / panels as f64;
            for k in 0..panels {
                let lo = t_lo + k as f64 * h;
                for (t, w) in gl.mapped(lo, lo + h) {
                    let r2 = (2.0 * t).exp();
                    let e = (-0.5 * r2).exp();
                    let val = (1.0 + b * r2) * e;
                    // Δ of f(r²): 4r² f″ + 2n f′ with f(s) = (1 + b s)e^{−s/2}
                    let f1 = (b - 0.5 * (1.0 + b * r2)) * e;
                    let f2 = (-b + 0.25 * (1.0 + b * r2)) * e;
                    let lap = 4.0 * r2 * f2 + 2.0 * nf * f1;
                    for (s, g) in [(&mut a, 0.0), (&mut c, gamma)] {
                        s.t.push(t);
                        s.ln_w.push(w.ln() + (nf - g) * t);
                        s.u.push(val);
                        s.lap_r2.push(lap * r2);
                    }
                }
            }
            s0 = a;
            sg = c;
        }
        other => {
            u = match other {
                Trial::Bump { m } => {
                    let base = [1.0, 0.0, -1.0];
                    let mut c = vec![1.0];
                    for _ in 0..*m {
                        c = crate::poly::mul(&c, &base);
                    }
                    PiecewiseRadial::new(
                        n,
                        vec![
                            crate::sequences::Piece {
                                t_lo: f64::NEG_INFINITY,
                                t_hi: 0.0,
                                terms: vec![crate::sequences::Term::Power {
                                    coeffs: c,
                                    ln_rho: 0.0,
                                }],
                            },
                            crate::sequences::Piece {
                                t_lo: 0.0,
                                t_hi: f64::INFINITY,
                                terms: vec![],
                            },
                        ],
                    )?
                }
                Trial::Xi { ln_k } => moser_adams_xi_ln(*ln_k, n)?,
                Trial::Annulus => annular_bump(n)?,
                Trial::GaussPoly { .. } => unreachable!(),
            };
            s0 = u.samples(0.0);
            sg = u.samples(gamma);
        }
    }
    let (omega, _) = measures(n)?;
    let w = (omega * sg.value_power_integral(rho)).powf(1.0 / rho);
    Ok((lap_norm(&s0, n as f64 / 2.0), lap_norm(&s0, p), w))
}

/// Minimum over dilations `u(λ·)` of `‖u_λ‖/‖u_λ‖_{ϱ,γ}` using the exact scaling
/// laws `‖Δu_λ‖_{n/2} = ‖Δu‖_{n/2}`, `‖Δu_λ‖_p = λ^{2−n/p}‖Δu‖_p`,
/// `‖u_λ‖_{ϱ,γ} = λ^{−(n−γ)/ϱ}‖u‖_{ϱ,γ}`.
fn best_dilation(norms: (f64, f64, f64), n: usize, p: f64, rho: f64, gamma: f64) -> (f64, f64) {
    let (dh, dp, w) = norms;
    let nf = n as f64;
    let h = nf / 2.0;
    let ratio = |s: f64| {
        let lam = s.exp();
        let a = dp * lam.powf(2.0 - nf / p);
        (dh.powf(h) + a.powf(h)).powf(1.0 / h) * lam.powf((nf - gamma) / rho) / w
    };
    // golden section on ln λ over a wide bracket (unimodal: convex pieces)
    let (mut a, mut b) = (-30.0f64, 30.0f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if ratio(c) < ratio(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let s = 0.5 * (a + b);
    (ratio(s), s.exp())
}

#[derive(Debug, Clone)]
pub struct EmbeddingReport {
    /// Running minimum after each trial (nonincreasing).
    pub history: Vec<f64>,
    pub estimate: f64,
    pub best_trial: String,
}

/// Upper estimate of `S_ϱ = inf ‖u‖/‖u‖_{ϱ,γ}` from `trials` trial profiles:
/// a fixed family followed by compass search on the Gaussian-polynomial shape.
pub fn embedding_probe(
    rho: f64,
    gamma: f64,
    n: usize,
    p: f64,
    trials: usize,
) -> Result<EmbeddingReport> {
    check_npg(n, p, gamma)?;
    if !(gamma > 0.0) {
        return invalid("γ must be positive");
    }
    if !(rho >= p_star(n, p)) {
        return invalid(format!("ϱ = {rho} must be at least p* = {}", p_star(n, p)));
    }
    if trials == 0 {
        return invalid("need at least one trial");
    }
    let eval = |t: &Trial| -> Result<f64> {
        Ok(best_dilation(trial_norms(t, n, p, rho, gamma)?, n, p, rho, gamma).0)
    };
    let mut fixed = vec![
        Trial::GaussPoly { b: 0.0 },
        Trial::Bump { m: 3 },
        Trial::Bump { m: 4 },
        Trial::Bump { m: 6 },
        Trial::Annulus,
        Trial::Xi { ln_k: 3f64.ln() },
        Trial::Xi { ln_k: 10f64.ln() },
        Trial::Xi { ln_k: 1e3f64.ln() },
    ];
    fixed.truncate(trials);
    let mut history = Vec::with_capacity(trials);
    let mut best = f64::INFINITY;
    let mut best_trial = String::new();
    for t in &fixed {
        let v = eval(t)?;
        if v < best {
            best = v;
            best_trial = format!("{t:?}");
        }
        history.push(best);
    }
    // compass search on b for (1 + b r²)e^{−r²/2}
    let mut b = 0.0;
    let mut fb = eval(&Trial::GaussPoly { b })?;
    let mut step = 0.5;
    while history.len() < trials {
        let mut moved = false;
        for cand in [b + step, b - step] {
            if history.len() >= trials {
                break;
            }
            let v = eval(&Trial::GaussPoly { b: cand })?;
            if v < best {
                best = v;
                best_trial = format!("{:?}", Trial::GaussPoly { b: cand });
            }
            history.push(best);
            if v < fb {
                b = cand;
                fb = v;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(EmbeddingReport {
        estimate: best,
        history,
        best_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_log_grid;

    #[test]
    fn enorm_trivial_cases() {
        let r = EnormReport::from_norms(0.0, 1.0, 4);
        assert_eq!(r.e_norm, 1.0);
        let a = 0.7;
        let r = EnormReport::from_norms(a, a, 6);
        assert!((r.e_norm - 2f64.powf(2.0 / 6.0) * a).abs() < 1e-15);
        assert!((r.e_norm_alt - 2.0 * a).abs() < 1e-15);
        assert!(r.sandwich_holds(1e-12));
        assert!((r.e_norm_alt - 2f64.powf(4.0 / 6.0) * r.e_norm).abs() < 1e-14);
    }

    #[test]
    fn functional_zero_and_monotone() {
        let g = make_log_grid(4, 1e-5, 4.0, 400).unwrap();
        let z = RadialFunction::new(g.clone(), vec![0.0; 400]).unwrap();
        let f = adams_functional(&z, 1.0, 1.0, 3).unwrap();
        assert_eq!(f.value(), 0.0);
        let u = RadialFunction::from_fn(g, |r| (1.0 - r * r).max(0.0).powi(3)).unwrap();
        let a = adams_functional(&u, 2.0, 1.0, 3).unwrap().value();
        let b = adams_functional(&u, 3.0, 1.0, 3).unwrap().value();
        assert!(a < b);
        assert!(adams_functional(&u, 3.0, 4.0, 3).is_err());
    }

    #[test]
    fn atsc_rejects_critical_ell() {
        let beta = beta_n2(4).unwrap();
        assert!(atsc_probe(&[beta], 1.0, &[5.0], 4, 1.5).is_err());
    }

    #[test]
    fn atc_constant_samples_factor() {
        let beta = beta_n2(4).unwrap();
        let rows = (1..40)
            .map(|i| {
                let l = beta * i as f64 / 40.0;
                ProbeRow {
                    param: l,
                    value: 2.0,
                    ln_value: 2f64.ln(),
                    envelope: 1.0,
                    overflow: false,
                    argmax: 0.0,
                }
            })
            .collect();
        let t = ProbeTable::from_rows(rows);
        let rhs = atc_identity_rhs(&t, 2.0, 2.0, 1.0, 4, 1.5).unwrap();
        let wmax = t
            .rows
            .iter()
            .map(|r| ln_atc_weight(r.param, 2.0, 2.0, 1.0, 4, 1.5).unwrap())
            .fold(f64::NEG_INFINITY, f64::max)
            .exp();
        assert!((rhs - 2.0 * wmax).abs() < 1e-12 * rhs);
    }
}
