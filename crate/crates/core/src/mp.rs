//! Radial mountain-pass solver for `Δ²_p u + Δ²_{n/2} u = g(u)/|x|^γ` with
//! `G(s) = λ|s|^ϑ exp(α₀|s|^{n/(n−2)})`.
//!
//! Discretization: unknowns are nodal values on a log grid, `u = 0` at
//! `R_max` (the condition `Δu = 0` there is natural for the energy), and the
//! Laplacian uses the flat left-boundary stencil. The discrete energy is
//! differentiated exactly, so gradient and Hessian are consistent with it.

use std::io::Write;

use crate::banded::{BandLu, BandMatrix};
use crate::constants::{check_npg, p_star, ConstantSet};
use crate::error::{invalid, Error, Result};
use crate::functionals::{fmt_num, write_csv_rows, EnormReport};
use crate::grid::{make_log_grid, GridRef, LeftBoundary, RadialFunction, StencilOp};
use crate::young::MAX_EXP_ARG;

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub n: usize,
    pub p: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub vartheta: f64,
    pub alpha0: f64,
    /// Ambrosetti–Rabinowitz constant; equal to `ϑ` for this nonlinearity.
    pub mu: f64,
    pub grid: GridRef,
    /// Target for the scaled residual.
    pub tol: f64,
    /// Smallest relative step before the path descent is declared stalled.
    pub step_tol: f64,
    pub max_iter: usize,
    /// Largest multiple of the cut-off tried as path endpoint.
    pub s_max: f64,
    lap: StencilOp,
    /// `ω_{n−1}`-scaled quadrature weights for `γ = 0` and for `γ`.
    w: Vec<f64>,
    wg: Vec<f64>,
}

impl ProblemSpec {
    pub fn new(
        n: usize,
        p: f64,
        gamma: f64,
        lambda: f64,
        vartheta: f64,
        alpha0: f64,
        grid: GridRef,
    ) -> Result<Self> {
        check_npg(n, p, gamma)?;
        let nf = n as f64;
        if !(gamma > 0.0) {
            return invalid(format!("γ = {gamma} must be positive"));
        }
        let floor = p_star(n, p).max(nf / 2.0);
        if !(vartheta > floor) {
            return invalid(format!("ϑ = {vartheta} must exceed max(p*, n/2) = {floor}"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return invalid(format!("λ = {lambda} must be positive"));
        }
        if !(alpha0 > 0.0) {
            return invalid(format!("α₀ = {alpha0} must be positive"));
        }
        if grid.n != n {
            return Err(Error::Mismatch(format!(
                "grid dimension {} vs n = {n}",
                grid.n
            )));
        }
        if grid.r_max() < 1.0 {
            return invalid("grid must cover (0, 1]");
        }
        let omega = grid.omega();
        let lap = grid.laplacian_op(LeftBoundary::Flat);
        let w = grid.weights.iter().map(|x| omega * x).collect();
        let wg = grid
            .weights_gamma(gamma)
            .iter()
            .map(|x| omega * x)
            .collect();
        Ok(ProblemSpec {
            n,
            p,
            gamma,
            lambda,
            vartheta,
            alpha0,
            mu: vartheta,
            grid,
            tol: 1e-6,
            step_tol: 1e-12,
            max_iter: 500,
            s_max: 4.0,
            lap,
            w,
            wg,
        })
    }

    /// Default truncation: `r ∈ [10⁻⁵, 8]`.
    pub fn default_grid(n: usize, nodes: usize) -> Result<GridRef> {
        make_log_grid(n, 1e-5, 8.0, nodes)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return invalid(format!("λ = {lambda} must be positive"));
        }
        Ok(ProblemSpec {
            lambda,
            ..self.clone()
        })
    }

    pub fn constants(&self) -> Result<ConstantSet> {
        ConstantSet::with_level(self.n, self.p, self.gamma, self.mu, self.alpha0)
    }

    fn q(&self) -> f64 {
        let nf = self.n as f64;
        nf / (nf - 2.0)
    }

    fn len(&self) -> usize {
        self.grid.len()
    }
}

/// `(G(s), g(s))`; overflow once `α₀|s|^q` leaves the exponent range.
pub fn nonlinearity(s: f64, spec: &ProblemSpec) -> Result<(f64, f64)> {
    if !s.is_finite() {
        return invalid("non-finite argument");
    }
    let a = s.abs();
    if a == 0.0 {
        return Ok((0.0, 0.0));
    }
    let q = spec.q();
    let aq = spec.alpha0 * a.powf(q);
    if aq > MAX_EXP_ARG {
        return Err(Error::Overflow { arg: aq });
    }
    let big_g = spec.lambda * a.powf(spec.vartheta) * aq.exp();
    let g = big_g / s * (spec.vartheta + q * aq);
    if !big_g.is_finite() || !g.is_finite() {
        return Err(Error::Overflow { arg: aq });
    }
    Ok((big_g, g))
}

/// `g′(s)`.
pub fn nonlinearity_derivative(s: f64, spec: &ProblemSpec) -> Result<f64> {
    let a = s.abs();
    if a == 0.0 {
        return Ok(0.0);
    }
    let (big_g, _) = nonlinearity(s, spec)?;
    let (t, q) = (spec.vartheta, spec.q());
    let aq = spec.alpha0 * a.powf(q);
    Ok(big_g / (a * a) * (t * (t - 1.0) + q * aq * (2.0 * t + q - 1.0) + q * q * aq * aq))
}

struct Principal {
    /// `|Δu|^{p−2}Δu` regularized, and `|Δu|^{n/2−2}Δu`.
    lap: Vec<f64>,
    eps: f64,
    a: f64,
    b: f64,
}

fn check_len(u: &[f64], spec: &ProblemSpec) -> Result<()> {
    if u.len() != spec.len() {
        return Err(Error::Mismatch(format!(
            "{} values for a {}-node grid",
            u.len(),
            spec.len()
        )));
    }
    let last = u[u.len() - 1];
    if last != 0.0 {
        return invalid(format!("boundary value u(R_max) = {last} must vanish"));
    }
    Ok(())
}

fn principal(u: &[f64], spec: &ProblemSpec) -> Principal {
    let lap = spec.lap.apply(u);
    let p = spec.p;
    let h = spec.n as f64 / 2.0;
    let ap: f64 = lap
        .iter()
        .zip(&spec.w)
        .map(|(l, w)| w * l.abs().powf(p))
        .sum();
    let eps = 1e-10 * ap.powf(1.0 / p);
    let e2 = eps * eps;
    let a = lap
        .iter()
        .zip(&spec.w)
        .map(|(l, w)| w * (l * l + e2).powf(p / 2.0))
        .sum();
    let b = lap
        .iter()
        .zip(&spec.w)
        .map(|(l, w)| w * l.abs().powf(h))
        .sum();
    Principal { lap, eps, a, b }
}

fn g_term(u: &[f64], spec: &ProblemSpec) -> Result<f64> {
    let mut s = 0.0;
    for (x, w) in u.iter().zip(&spec.wg) {
        s += w * nonlinearity(*x, spec)?.0;
    }
    Ok(s)
}

/// Energy split into its three parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    /// `‖Δu‖_p^p` (regularized at the `10⁻¹⁰` relative level)
    pub lap_p: f64,
    /// `‖Δu‖_{n/2}^{n/2}`
    pub lap_half: f64,
    /// `∫ G(u)/|x|^γ`
    pub g_integral: f64,
    pub energy: f64,
}

pub fn energy_parts(u: &[f64], spec: &ProblemSpec) -> Result<EnergyParts> {
    check_len(u, spec)?;
    let pr = principal(u, spec);
    let gi = g_term(u, spec)?;
    let nf = spec.n as f64;
    Ok(EnergyParts {
        lap_p: pr.a,
        lap_half: pr.b,
        g_integral: gi,
        energy: pr.a / spec.p + 2.0 / nf * pr.b - gi,
    })
}

/// `J(u) = (1/p)‖Δu‖_p^p + (2/n)‖Δu‖_{n/2}^{n/2} − ∫ G(u)/|x|^γ`.
pub fn energy(u: &RadialFunction, spec: &ProblemSpec) -> Result<f64> {
    Ok(energy_parts(&u.values, spec)?.energy)
}

fn energy_vec(u: &[f64], spec: &ProblemSpec) -> Result<f64> {
    Ok(energy_parts(u, spec)?.energy)
}

/// Principal-part gradient `Lᵀ(w ⊙ F′(Lu))`.
fn principal_gradient(pr: &Principal, spec: &ProblemSpec) -> Vec<f64> {
    let (p, h) = (spec.p, spec.n as f64 / 2.0);
    let e2 = pr.eps * pr.eps;
    let f: Vec<f64> = pr
        .lap
        .iter()
        .zip(&spec.w)
        .map(|(&l, w)| w * (l * (l * l + e2).powf(p / 2.0 - 1.0) + l * l.abs().powf(h - 2.0)))
        .collect();
    let mut out = spec.lap.apply_transpose(&f);
    let m = out.len();
    out[m - 1] = 0.0;
    out
}

/// `∂J/∂u_i`: the pairing `⟨J′(u), v⟩ = Σ_i G_i v_i` for grid vectors `v`
/// vanishing at `R_max`. The last entry is zero.
pub fn weak_gradient(u: &RadialFunction, spec: &ProblemSpec) -> Result<Vec<f64>> {
    gradient_vec(&u.values, spec).map(|(g, _)| g)
}

/// Full gradient and its principal part.
fn gradient_vec(u: &[f64], spec: &ProblemSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(u, spec)?;
    let pr = principal(u, spec);
    let pg = principal_gradient(&pr, spec);
    let mut g = pg.clone();
    let m = g.len();
    for i in 0..m - 1 {
        g[i] -= spec.wg[i] * nonlinearity(u[i], spec)?.1;
    }
    Ok((g, pg))
}

/// Band Hessian of `J` on the free nodes.
fn hessian(u: &[f64], spec: &ProblemSpec) -> Result<BandMatrix> {
    let pr = principal(u, spec);
    let (p, h) = (spec.p, spec.n as f64 / 2.0);
    let e2 = pr.eps * pr.eps;
    let m = u.len() - 1;
    let mut hm = BandMatrix::zeros(m, 2, 2);
    let op = &spec.lap;
    for (i, &l) in pr.lap.iter().enumerate() {
        let f2 = (l * l + e2).powf(p / 2.0 - 2.0) * ((p - 1.0) * l * l + e2)
            + (h - 1.0) * l.abs().powf(h - 2.0);
        let d = spec.w[i] * f2 * op.scale[i] * op.scale[i];
        add_outer(&mut hm, op.start[i], &op.coef[i], d, m);
    }
    for i in 0..m {
        hm.add(i, i, -spec.wg[i] * nonlinearity_derivative(u[i], spec)?);
    }
    Ok(hm)
}

fn add_outer(hm: &mut BandMatrix, j: usize, c: &[f64; 3], d: f64, m: usize) {
    for a in 0..3 {
        for b in 0..3 {
            if j + a < m && j + b < m {
                hm.add(j + a, j + b, d * c[a] * c[b]);
            }
        }
    }
}

/// Preconditioner `LᵀWL + W` on the free nodes.
fn preconditioner(spec: &ProblemSpec) -> Result<BandLu> {
    let op = &spec.lap;
    let m = spec.len() - 1;
    let mut pm = BandMatrix::zeros(m, 2, 2);
    for i in 0..op.start.len() {
        let d = spec.w[i] * op.scale[i] * op.scale[i];
        add_outer(&mut pm, op.start[i], &op.coef[i], d, m);
    }
    for i in 0..m {
        pm.add(i, i, spec.w[i]);
    }
    pm.factor()
}

fn dual_norm(g: &[f64], pre: &BandLu) -> f64 {
    let m = g.len() - 1;
    let z = pre.solve(&g[..m]);
    z.iter()
        .zip(g)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// `‖J′(u)‖_{P⁻¹} / ‖principal part‖_{P⁻¹}` with `P = LᵀWL + W`.
fn scaled_residual(u: &[f64], spec: &ProblemSpec, pre: &BandLu) -> Result<f64> {
    let (g, pg) = gradient_vec(u, spec)?;
    let d = dual_norm(&pg, pre);
    if d == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(dual_norm(&g, pre) / d)
}

/// Radial cut-off with `ψ = 1` on `B_{1/2}`, `ψ = 0` off `B_1`.
///
/// Among `C^{1,1}` profiles this one minimizes `sup|Δψ|`: the Laplacian is
/// `−K` on `(1/2, a)` and `+K` on `(a, 1)`, with `aⁿ = (1 + 2⁻ⁿ)/2`. The exact
/// Laplacian is attached.
pub fn cutoff_psi(grid: GridRef) -> Result<RadialFunction> {
    if grid.r_max() < 1.0 || grid.r_min() >= 0.5 {
        return invalid("grid must cover (0, 1]");
    }
    let inside = grid
        .nodes
        .iter()
        .filter(|&&r| (0.5..=1.0).contains(&r))
        .count();
    if inside < 16 {
        return Err(Error::Degenerate(format!(
            "only {inside} nodes in [1/2, 1]; cannot resolve the cut-off"
        )));
    }
    let c = Cutoff::new(grid.n);
    let lap = grid.nodes.iter().map(|&r| c.lap(r)).collect();
    RadialFunction::from_fn(grid.clone(), |r| c.value(r))?.with_laplacian(lap)
}

/// `(max|ψ′|, max|Δψ|)` on the grid nodes, from the closed form.
pub fn cutoff_bounds(n: usize) -> (f64, f64) {
    let c = Cutoff::new(n);
    (c.k * (c.a.powi(1 - n as i32) - c.a) / n as f64, c.k)
}

struct Cutoff {
    n: usize,
    a: f64,
    k: f64,
}

impl Cutoff {
    fn new(n: usize) -> Self {
        let nf = n as f64;
        let a = ((1.0 + 2f64.powf(-nf)) / 2.0).powf(1.0 / nf);
        let mut c = Cutoff { n, a, k: 1.0 };
        c.k = nf / (c.d1(a) + c.d2(a));
        c
    }

    fn d1(&self, r: f64) -> f64 {
        let nf = self.n as f64;
        (r * r - 0.25) / 2.0
            + 2f64.powf(-nf) * (r.powf(2.0 - nf) - 2f64.powf(nf - 2.0)) / (nf - 2.0)
    }

    fn d2(&self, r: f64) -> f64 {
        let nf = self.n as f64;
        (r.powf(2.0 - nf) - 1.0) / (nf - 2.0) - (1.0 - r * r) / 2.0
    }

    fn value(&self, r: f64) -> f64 {
        let nf = self.n as f64;
        if r <= 0.5 {
            1.0
        } else if r <= self.a {
            1.0 - self.k / nf * self.d1(r)
        } else if r < 1.0 {
            self.k / nf * self.d2(r)
        } else {
            0.0
        }
    }

    fn lap(&self, r: f64) -> f64 {
        if r <= 0.5 || r >= 1.0 {
            0.0
        } else if r <= self.a {
            -self.k
        } else {
            self.k
        }
    }
}

/// Discrete vector of `ψ` with the boundary node zeroed.
fn psi_vec(spec: &ProblemSpec) -> Result<Vec<f64>> {
    let mut v = cutoff_psi(spec.grid.clone())?.values;
    let m = v.len();
    v[m - 1] = 0.0;
    Ok(v)
}

fn scale_vec(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| s * x).collect()
}

/// `J(t v)` with overflow read as `−∞` (the exponential term dominates).
fn ray_energy(v: &[f64], t: f64, spec: &ProblemSpec) -> Result<f64> {
    match energy_vec(&scale_vec(v, t), spec) {
        Err(Error::Overflow { .. }) => Ok(f64::NEG_INFINITY),
        r => r,
    }
}

/// Maximizer of `t ↦ J(t v)` on `t > 0`, starting the bracket at `t0`.
fn ray_max(v: &[f64], t0: f64, spec: &ProblemSpec) -> Result<(f64, f64)> {
    let f = |t: f64| ray_energy(v, t, spec);
    let ratio = 1.25f64;
    let (mut t, mut ft) = (t0, f(t0)?);
    // climb towards the larger neighbour until the peak is bracketed
    let up = f(t * ratio)?;
    let dir = if up > ft { ratio } else { 1.0 / ratio };
    let mut steps = 0;
    loop {
        let tn = t * dir;
        let fn_ = f(tn)?;
        if fn_ <= ft {
            break;
        }
        t = tn;
        ft = fn_;
        steps += 1;
        if steps > 400 {
            return Err(Error::NonConvergence(
                "energy has no maximum along the ray".into(),
            ));
        }
    }
    // golden section in ln t on [t/ratio, t·ratio]
    let (mut lo, mut hi) = ((t / ratio).ln(), (t * ratio).ln());
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let (mut f1, mut f2) = (f(x1.exp())?, f(x2.exp())?);
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2.exp())?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1.exp())?;
        }
    }
    let (tb, fb) = if f1 > f2 {
        (x1.exp(), f1)
    } else {
        (x2.exp(), f2)
    };
    if ft > fb {
        Ok((t, ft))
    } else {
        Ok((tb, fb))
    }
}

/// Smallest `s = 2^j ≤ s_max` with `J(sψ) < 0`.
pub fn endpoint_search(spec: &ProblemSpec) -> Result<f64> {
    let psi = psi_vec(spec)?;
    let mut s = 1.0;
    loop {
        if ray_energy(&psi, s, spec)? < 0.0 {
            return Ok(s);
        }
        if s >= spec.s_max {
            return Err(Error::EndpointSearch { s_max: spec.s_max });
        }
        s = (2.0 * s).min(spec.s_max);
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub lap: Vec<f64>,
    pub energy: f64,
    pub parts: EnergyParts,
    /// Scaled residual of the returned state.
    pub residual: f64,
    /// Path maximum `max_t J(t u*)`.
    pub c_estimate: f64,
    pub c0: f64,
    pub c_below_c0: bool,
    pub endpoint_s: f64,
    /// Path maximum when the descent handed over to Newton.
    pub path_level: f64,
    /// Path maximum at the start and after each accepted descent step.
    pub path_max_history: Vec<f64>,
    pub path_iterations: usize,
    pub newton_iterations: usize,
    pub norms: EnormReport,
}

impl SolveReport {
    pub fn converged(&self, tol: f64) -> bool {
        self.residual <= tol && self.energy > 0.0
    }

    /// `key=value` lines.
    pub fn to_record(&self) -> String {
        let kv = [
            ("energy", fmt_num(self.energy)),
            ("residual", fmt_num(self.residual)),
            ("c_estimate", fmt_num(self.c_estimate)),
            ("c0", fmt_num(self.c0)),
            ("c_below_c0", self.c_below_c0.to_string()),
            ("endpoint_s", fmt_num(self.endpoint_s)),
            ("path_level", fmt_num(self.path_level)),
            ("path_iterations", self.path_iterations.to_string()),
            ("newton_iterations", self.newton_iterations.to_string()),
            ("lap_p_pow", fmt_num(self.parts.lap_p)),
            ("lap_half_pow", fmt_num(self.parts.lap_half)),
            ("g_integral", fmt_num(self.parts.g_integral)),
            ("e_norm", fmt_num(self.norms.e_norm)),
            ("u0", fmt_num(self.u[0])),
            ("nodes", self.r.len().to_string()),
        ];
        kv.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// CSV of `(r, u, Δu)`.
    pub fn write_csv(&self, out: &mut impl Write, comment: &str) -> std::io::Result<()> {
        let rows = (0..self.r.len())
            .map(|i| vec![fmt_num(self.r[i]), fmt_num(self.u[i]), fmt_num(self.lap[i])]);
        write_csv_rows(out, comment, &["r", "u", "lap_u"], rows)
    }
}

fn norms_of(parts: &EnergyParts, n: usize, p: f64) -> EnormReport {
    EnormReport::from_norms(
        parts.lap_p.powf(1.0 / p),
        parts.lap_half.powf(2.0 / n as f64),
        n,
    )
}

fn sub(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - s * y).collect()
}

/// Path mountain pass followed by a Newton polish.
///
/// The path is the ray through the current iterate, sampled and maximized
/// each sweep; its maximizer takes a preconditioned steepest-descent step and
/// a step is accepted only when the new path maximum is lower. Once the
/// scaled residual is below `10⁻³`, or the level drops by less than 1% over
/// ten accepted steps, damped Newton
/// iterations on `‖J′‖_{P⁻¹}` take the maximizer to the critical point.
pub fn mountain_pass_solve(spec: &ProblemSpec) -> Result<SolveReport> {
    let cs = spec.constants()?;
    let c0 = cs.c0.expect("level constants present");
    let endpoint_s = endpoint_search(spec)?;
    let pre = preconditioner(spec)?;
    let psi = psi_vec(spec)?;
    let (t, c) = ray_max(&psi, 0.5 * endpoint_s, spec)?;
    let mut u = scale_vec(&psi, t);
    let mut level = c;
    let mut history = vec![level];
    let mut tau = 1.0;
    let mut path_iterations = 0;
    let switch = 1e-3f64.max(spec.tol);
    while path_iterations < spec.max_iter {
        let (g, pg) = gradient_vec(&u, spec)?;
        let dn = dual_norm(&pg, &pre);
        if dn > 0.0 && dual_norm(&g, &pre) / dn <= switch {
            break;
        }
        let m = u.len() - 1;
        let mut d = pre.solve(&g[..m]);
        d.push(0.0);
        let mut accepted = false;
        while tau > spec.step_tol {
            let v = sub(&u, &d, tau);
            let (tv, fv) = ray_max(&v, 1.0, spec)?;
            if fv < level {
                u = scale_vec(&v, tv);
                level = fv;
                history.push(level);
                tau = (1.5 * tau).min(1.0);
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        path_iterations += 1;
        if !accepted {
            break;
        }
        // slow creep near the saddle: hand over to Newton
        let k = history.len();
        if k > 10 && history[k - 11] - level < 1e-2 * level.abs() {
            break;
        }
    }
    let mut newton_iterations = 0;
    let mut res = scaled_residual(&u, spec, &pre)?;
    while res > 1e-3 * spec.tol && newton_iterations < 60 {
        let (g, _) = gradient_vec(&u, spec)?;
        let m = u.len() - 1;
        let lu = hessian(&u, spec)?.factor()?;
        let mut d = lu.solve(&g[..m]);
        d.push(0.0);
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-6 {
            let v = sub(&u, &d, step);
            if let Ok(rv) = scaled_residual(&v, spec, &pre) {
                if rv < res {
                    u = v;
                    res = rv;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        newton_iterations += 1;
        if !improved {
            break;
        }
    }
    let parts = energy_parts(&u, spec)?;
    let (_, c_estimate) = ray_max(&u, 1.0, spec)?;
    if !(res <= spec.tol) || !(parts.energy > 0.0) {
        return Err(Error::NonConvergence(format!(
            "scaled residual {res:.3e} (tolerance {:.1e}), J = {:.6e}, path level {level:.6e} after {path_iterations} descent and {newton_iterations} Newton steps",
            spec.tol, parts.energy
        )));
    }
    let lap = spec.lap.apply(&u);
    Ok(SolveReport {
        r: spec.grid.nodes.clone(),
        lap,
        energy: parts.energy,
        parts,
        residual: res,
        c_estimate,
        c0,
        c_below_c0: c_estimate < c0,
        endpoint_s,
        path_level: level,
        path_max_history: history,
        path_iterations,
        newton_iterations,
        norms: norms_of(&parts, spec.n, spec.p),
        u,
    })
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// `(ρ, min over the trial family of J on the sphere ‖u‖ = ρ)`.
    pub sphere: Vec<(f64, f64)>,
    /// Radius with the largest positive sphere minimum, and that minimum.
    pub rho: f64,
    pub delta: f64,
    /// `‖u*‖^{n/(n−2)}` against `β_{γ,n}/α₀`.
    pub norm_pow: f64,
    pub norm_cap: f64,
    pub norm_bound_ok: bool,
    /// `J(u*) − ⟨J′(u*),u*⟩/μ` against `(2/n − 1/μ)(‖Δu*‖_p^p + ‖Δu*‖_{n/2}^{n/2})`.
    pub ar_lhs: f64,
    pub ar_rhs: f64,
    /// `|⟨J′(u*),u*⟩|/μ`, relative to the principal parts.
    pub ar_slack: f64,
    pub ar_ok: bool,
}

impl Diagnostics {
    pub fn to_record(&self) -> String {
        let kv = [
            ("rho", fmt_num(self.rho)),
            ("delta", fmt_num(self.delta)),
            ("norm_pow", fmt_num(self.norm_pow)),
            ("norm_cap", fmt_num(self.norm_cap)),
            ("norm_bound_ok", self.norm_bound_ok.to_string()),
            ("ar_lhs", fmt_num(self.ar_lhs)),
            ("ar_rhs", fmt_num(self.ar_rhs)),
            ("ar_slack", fmt_num(self.ar_slack)),
            ("ar_ok", self.ar_ok.to_string()),
        ];
        kv.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// Geometry and bound checks around a completed solve.
pub fn diagnostics(spec: &ProblemSpec, report: &SolveReport) -> Result<Diagnostics> {
    let nf = spec.n as f64;
    let cs = spec.constants()?;
    // trial family: dilated cut-offs and the solution itself
    let c = Cutoff::new(spec.n);
    let mut family: Vec<Vec<f64>> = [0.25, 0.5, 1.0, 2.0]
        .iter()
        .map(|&s| {
            let mut v: Vec<f64> = spec.grid.nodes.iter().map(|&r| c.value(r / s)).collect();
            let m = v.len();
            v[m - 1] = 0.0;
            v
        })
        .collect();
    family.push(report.u.clone());
    let unit: Vec<Vec<f64>> = family
        .into_iter()
        .map(|v| {
            let parts = energy_parts(&v, spec)?;
            let nr = norms_of(&parts, spec.n, spec.p).e_norm;
            Ok(scale_vec(&v, 1.0 / nr))
        })
        .collect::<Result<_>>()?;
    let mut sphere = Vec::new();
    for j in 0..=24 {
        let rho = 10f64.powf(-3.0 + 3.5 * j as f64 / 24.0);
        let mut worst = f64::INFINITY;
        for v in &unit {
            worst = worst.min(ray_energy(v, rho, spec)?);
        }
        sphere.push((rho, worst));
    }
    let (rho, delta) = sphere
        .iter()
        .copied()
        .fold((0.0, 0.0), |b, s| if s.1 > b.1 { s } else { b });
    let norm_pow = report.norms.e_norm.powf(nf / (nf - 2.0));
    let norm_cap = cs.beta_gamma / spec.alpha0;
    let (g, _) = gradient_vec(&report.u, spec)?;
    let pair: f64 = g.iter().zip(&report.u).map(|(a, b)| a * b).sum();
    let princ = report.parts.lap_p + report.parts.lap_half;
    let ar_lhs = report.energy - pair / spec.mu;
    let ar_rhs = (2.0 / nf - 1.0 / spec.mu) * princ;
    let ar_slack = pair.abs() / spec.mu / princ;
    Ok(Diagnostics {
        sphere,
        rho,
        delta,
        norm_pow,
        norm_cap,
        norm_bound_ok: norm_pow < norm_cap,
        ar_lhs,
        ar_rhs,
        ar_slack,
        ar_ok: report.energy >= ar_rhs - pair.abs() / spec.mu,
    })
}

/// Whether `λ` passes the endpoint and level test: `J(sψ) < 0` for some
/// `s ≤ s_max`, and `max_{t ≤ s} J(tψ) < c₀`.
pub fn lambda_admissible(spec: &ProblemSpec) -> Result<bool> {
    let s = match endpoint_search(spec) {
        Ok(s) => s,
        Err(Error::EndpointSearch { .. }) => return Ok(false),
        Err(e) => return Err(e),
    };
    let psi = psi_vec(spec)?;
    let (t, level) = ray_max(&psi, 0.5 * s, spec)?;
    let c0 = spec.constants()?.c0.expect("level constants present");
    Ok(t <= s && level < c0)
}

/// Bisection in `ln λ` for the admissibility threshold within `[lo, hi]`;
/// returns the smallest admissible `λ` found.
pub fn find_lambda0(spec: &ProblemSpec, lo: f64, hi: f64, iters: usize) -> Result<f64> {
    if !(lo > 0.0 && hi > lo) {
        return invalid("need 0 < lo < hi");
    }
    if !lambda_admissible(&spec.with_lambda(hi)?)? {
        return Err(Error::NonConvergence(format!(
            "λ = {hi:e} is not admissible"
        )));
    }
    if lambda_admissible(&spec.with_lambda(lo)?)? {
        return Ok(lo);
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..iters {
        let mid = 0.5 * (a + b);
        if lambda_admissible(&spec.with_lambda(mid.exp())?)? {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(b.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(nodes: usize) -> ProblemSpec {
        let g = ProblemSpec::default_grid(4, nodes).unwrap();
        ProblemSpec::new(4, 1.5, 1.0, 1e6, 7.0, 1.0, g).unwrap()
    }

    #[test]
    fn nonlinearity_identities() {
        let s = spec(256);
        let (g1, _) = nonlinearity(1.0, &s).unwrap();
        assert!((g1 - 1e6 * 1f64.exp()).abs() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x: f64 = rng.gen_range(-3.0..3.0);
            let (gp, sp) = nonlinearity(x, &s).unwrap();
            let (gm, sm) = nonlinearity(-x, &s).unwrap();
            assert_eq!(gp, gm);
            assert_eq!(sp, -sm);
            assert!(sp * x >= s.vartheta * gp * (1.0 - 1e-14));
            let h = 1e-6 * x.abs().max(1e-3);
            let fd = (nonlinearity(x + h, &s).unwrap().0 - nonlinearity(x - h, &s).unwrap().0)
                / (2.0 * h);
            assert!((fd - sp).abs() <= 1e-6 * sp.abs().max(1e-6));
            let fd2 = (nonlinearity(x + h, &s).unwrap().1 - nonlinearity(x - h, &s).unwrap().1)
                / (2.0 * h);
            let d2 = nonlinearity_derivative(x, &s).unwrap();
            assert!(
                (fd2 - d2).abs() <= 1e-6 * d2.abs().max(1e-6),
                "x={x} fd={fd2} exact={d2}"
            );
        }
        assert!(matches!(
            nonlinearity(30.0, &s),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn rejects_small_vartheta() {
        let g = ProblemSpec::default_grid(4, 256).unwrap();
        assert!(ProblemSpec::new(4, 1.5, 1.0, 1.0, 6.0, 1.0, g.clone()).is_err());
        assert!(ProblemSpec::new(4, 1.5, 0.0, 1.0, 7.0, 1.0, g).is_err());
    }

    #[test]
    fn cutoff_shape() {
        let g = ProblemSpec::default_grid(4, 1024).unwrap();
        let psi = cutoff_psi(g.clone()).unwrap();
        for (r, v) in g.nodes.iter().zip(&psi.values) {
            if *r <= 0.5 {
                assert_eq!(*v, 1.0);
            }
            if *r >= 1.0 {
                assert_eq!(*v, 0.0);
            }
            assert!((0.0..=1.0).contains(v));
        }
        // C¹ across the switch radius: discrete Laplacian stays near ±K
        let (d1, k) = cutoff_bounds(4);
        let fd = g.laplacian_op(LeftBoundary::OneSided).apply(&psi.values);
        let worst = fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1.1 * k, "{worst} vs {k}");
        let du = g.derivative_op().apply(&psi.values);
        let worst_d = du.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((worst_d - d1).abs() < 3e-2 * d1, "{worst_d} vs {d1}");
        assert!(cutoff_psi(ProblemSpec::default_grid(4, 64).unwrap()).is_err());
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let s = spec(200);
        // Δu = −8c never vanishes, so the p-term is smooth along the test
        let mut u: Vec<f64> = s
            .grid
            .nodes
            .iter()
            .map(|r| 0.004 * (64.0 - r * r))
            .collect();
        let m = u.len();
        u[m - 1] = 0.0;
        let h = hessian(&u, &s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (a, b, c): (f64, f64, f64) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let mut v: Vec<f64> = s
            .grid
            .nodes
            .iter()
            .map(|&r| (1.0 - r * r / 64.0) * (a + b * r * r / 16.0 + c * (-r * r).exp()))
            .collect();
        v[m - 1] = 0.0;
        let hv = h.mul_vec(&v[..m - 1]);
        let e = 1e-6;
        let gp = gradient_vec(&sub(&u, &v, -e), &s).unwrap().0;
        let gm = gradient_vec(&sub(&u, &v, e), &s).unwrap().0;
        let scale = hv.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        for i in 0..m - 1 {
            let fd = (gp[i] - gm[i]) / (2.0 * e);
            assert!(
                (fd - hv[i]).abs() < 1e-5 * scale,
                "i={i} fd={fd} h={}",
                hv[i]
            );
        }
    }

    #[test]
    fn boundary_value_must_vanish() {
        let s = spec(128);
        let mut u = vec![0.1; 128];
        assert!(energy_parts(&u, &s).is_err());
        u[127] = 0.0;
        assert!(energy_parts(&u, &s).is_ok());
    }
}
