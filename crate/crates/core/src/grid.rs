//! Log-spaced radial grids, finite-difference operators in `t = ln r`, and
//! weighted radial norms.

use std::sync::Arc;

use crate::constants::measures;
use crate::error::{invalid, Error, Result};
use crate::profile::{Radial, Samples};
use crate::quadrature::GaussLegendre;

/// Geometric grid `r_i = r_min·e^{ih}`, `i = 0..M-1`, with `r_{M-1} = r_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub n: usize,
    pub nodes: Vec<f64>,
    /// Weights for `∫₀^{r_max} f(r) r^{n-1} dr` (the ball inside `r_1` is
    /// charged to the first node).
    pub weights: Vec<f64>,
    h: f64,
    omega: f64,
}

/// Shared handle; functions on the same grid hold clones of this.
pub type GridRef = Arc<RadialGrid>;

pub fn make_log_grid(n: usize, r_min: f64, r_max: f64, m: usize) -> Result<GridRef> {
    RadialGrid::new(n, r_min, r_max, m).map(Arc::new)
}

impl RadialGrid {
    pub fn new(n: usize, r_min: f64, r_max: f64, m: usize) -> Result<Self> {
        if n < 2 {
            return invalid(format!("dimension n = {n} too small"));
        }
        if !(r_min > 0.0 && r_min.is_finite() && r_max.is_finite() && r_min < r_max) {
            return invalid(format!(
                "need 0 < r_min < r_max, got r_min = {r_min}, r_max = {r_max}"
            ));
        }
        if m < 16 {
            return invalid(format!("need at least 16 nodes, got {m}"));
        }
        let (t0, t1) = (r_min.ln(), r_max.ln());
        let h = (t1 - t0) / (m - 1) as f64;
        let mut nodes: Vec<f64> = (0..m).map(|i| (t0 + i as f64 * h).exp()).collect();
        nodes[0] = r_min;
        nodes[m - 1] = r_max;
        let (omega, _) = measures(n)?;
        let mut g = RadialGrid {
            n,
            nodes,
            weights: vec![],
            h,
            omega,
        };
        g.weights = g.weights_gamma(0.0);
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Uniform spacing in `ln r`.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.len() - 1]
    }

    pub fn t(&self, i: usize) -> f64 {
        self.nodes[0].ln() + i as f64 * self.h
    }

    /// Product-integration weights for `∫₀^{r_max} f(r) r^{n−1−γ} dr`.
    ///
    /// On each cell `f` is replaced by its cubic interpolant in `t` and the
    /// exponential factor `e^{(n−γ)t}` is integrated exactly (8-point
    /// Gauss–Legendre on a polynomial times a slowly varying exponential).
    /// The inner ball `[0, r_1]` uses `f ≈ f(r_1)`.
    pub fn weights_gamma(&self, gamma: f64) -> Vec<f64> {
        let m = self.len();
        let c = self.n as f64 - gamma;
        let h = self.h;
        let gl = GaussLegendre::new(8);
        let mut w = vec![0.0; m];
        // local weights for a cell [0, h] with stencil offsets o..o+3
        let local = |o: i64| -> [f64; 4] {
            let mut out = [0.0; 4];
            for (s, ws) in gl.mapped(0.0, h) {
                let e = (c * s).exp() * ws;
                for (j, oj) in out.iter_mut().enumerate() {
                    let xj = (o + j as i64) as f64 * h;
                    let mut l = 1.0;
                    for k in 0..4 {
                        if k != j {
                            let xk = (o + k as i64) as f64 * h;
                            l *= (s - xk) / (xj - xk);
                        }
                    }
                    *oj += e * l;
                }
            }
            out
        };
        let first = local(0);
        let inner = local(-1);
        let last = local(-2);
        for i in 0..m - 1 {
            let (o, lw) = if i == 0 {
                (0i64, &first)
            } else if i == m - 2 {
                (-2, &last)
            } else {
                (-1, &inner)
            };
            let scale = (c * self.t(i)).exp();
            for (j, lwj) in lw.iter().enumerate() {
                let idx = (i as i64 + o + j as i64) as usize;
                w[idx] += scale * lwj;
            }
        }
        w[0] += self.nodes[0].powf(c) / c;
        w
    }

    /// Finite-difference Laplacian with the given left-boundary treatment.
    pub fn laplacian_op(&self, left: LeftBoundary) -> StencilOp {
        StencilOp::build(self, left, StencilKind::Laplacian)
    }

    /// Radial derivative `u′(r)`.
    pub fn derivative_op(&self) -> StencilOp {
        StencilOp::build(self, LeftBoundary::OneSided, StencilKind::Derivative)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeftBoundary {
    /// One-sided three-point stencil at `r_1`.
    OneSided,
    /// Flat extension `u_t(t_1) = 0`; suppresses the `r^{2−n}` mode in solvers.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StencilKind {
    Laplacian,
    Derivative,
}

/// Three-point operator `(Lu)_i = r_i^{-s} Σ_k c_{ik} u_{j_i + k}`.
///
/// Coefficients are exact on span{1, ln r, r²} (constants, the quadratic
/// inner branch and the logarithmic branch of the extremal sequences); on
/// general smooth functions they are second order in `h`.
#[derive(Debug, Clone)]
pub struct StencilOp {
    pub start: Vec<usize>,
    pub coef: Vec<[f64; 3]>,
    /// `r_i^{-2}` for the Laplacian, `r_i^{-1}` for the derivative.
    pub scale: Vec<f64>,
}

impl StencilOp {
    fn build(g: &RadialGrid, left: LeftBoundary, kind: StencilKind) -> Self {
        let m = g.len();
        let h = g.h;
        let nf = g.n as f64;
        // rhs of the exactness conditions for 1, t, e^{2t}
        let rhs = match kind {
            StencilKind::Laplacian => [0.0, nf - 2.0, 2.0 * nf],
            StencilKind::Derivative => [0.0, 1.0, 2.0],
        };
        let solve = |d: [f64; 3]| -> [f64; 3] {
            let a = [
                [1.0, 1.0, 1.0],
                [d[0], d[1], d[2]],
                [(2.0 * d[0]).exp(), (2.0 * d[1]).exp(), (2.0 * d[2]).exp()],
            ];
            solve3(a, rhs)
        };
        let inner = solve([-h, 0.0, h]);
        let lo = solve([0.0, h, 2.0 * h]);
        let hi = solve([-2.0 * h, -h, 0.0]);
        let mut start = Vec::with_capacity(m);
        let mut coef = Vec::with_capacity(m);
        for i in 0..m {
            if i == 0 {
                match left {
                    LeftBoundary::OneSided => {
                        start.push(0);
                        coef.push(lo);
                    }
                    LeftBoundary::Flat => {
                        start.push(0);
                        coef.push([inner[0] + inner[1], inner[2], 0.0]);
                    }
                }
            } else if i == m - 1 {
                start.push(m - 3);
                coef.push(hi);
            } else {
                start.push(i - 1);
                coef.push(inner);
            }
        }
        let s = match kind {
            StencilKind::Laplacian => 2,
            StencilKind::Derivative => 1,
        };
        let scale = g.nodes.iter().map(|r| r.powi(-s)).collect();
        StencilOp { start, coef, scale }
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        (0..self.start.len())
            .map(|i| self.apply_row(i, u))
            .collect()
    }

    /// `r_i^s (Lu)_i`, the scale-free part.
    pub fn apply_unscaled(&self, u: &[f64]) -> Vec<f64> {
        (0..self.start.len())
            .map(|i| {
                let j = self.start[i];
                let c = &self.coef[i];
                c[0] * u[j] + c[1] * u[j + 1] + c[2] * u[j + 2]
            })
            .collect()
    }

    fn apply_row(&self, i: usize, u: &[f64]) -> f64 {
        let j = self.start[i];
        let c = &self.coef[i];
        self.scale[i] * (c[0] * u[j] + c[1] * u[j + 1] + c[2] * u[j + 2])
    }

    /// `Lᵀ v`.
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.start.len()];
        for (i, &vi) in v.iter().enumerate() {
            let j = self.start[i];
            let s = self.scale[i] * vi;
            for k in 0..3 {
                out[j + k] += self.coef[i][k] * s;
            }
        }
        out
    }
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x
}

/// Sampled radial profile on a shared grid.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    pub grid: GridRef,
    pub values: Vec<f64>,
    /// Exact Laplacian samples when the profile came from a closed form.
    pub laplacian: Option<Vec<f64>>,
}

impl RadialFunction {
    pub fn new(grid: GridRef, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "{} values for a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("non-finite value at node {i}"));
        }
        Ok(RadialFunction {
            grid,
            values,
            laplacian: None,
        })
    }

    pub fn from_fn(grid: GridRef, f: impl Fn(f64) -> f64) -> Result<Self> {
        let v = grid.nodes.iter().map(|&r| f(r)).collect();
        Self::new(grid, v)
    }

    pub fn with_laplacian(mut self, lap: Vec<f64>) -> Result<Self> {
        if lap.len() != self.values.len() {
            return Err(Error::Mismatch("laplacian length".into()));
        }
        self.laplacian = Some(lap);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn scaled(&self, c: f64) -> Self {
        RadialFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            laplacian: self
                .laplacian
                .as_ref()
                .map(|l| l.iter().map(|v| c * v).collect()),
        }
    }

    /// Exact samples if attached, otherwise the finite-difference Laplacian.
    pub fn laplacian_values(&self) -> Vec<f64> {
        match &self.laplacian {
            Some(l) => l.clone(),
            None => self
                .grid
                .laplacian_op(LeftBoundary::OneSided)
                .apply(&self.values),
        }
    }
}

/// Finite-difference Laplacian as a new radial function.
pub fn radial_laplacian(u: &RadialFunction) -> Result<RadialFunction> {
    if u.grid.len() < 3 {
        return Err(Error::Degenerate("Laplacian needs at least 3 nodes".into()));
    }
    let l = u.grid.laplacian_op(LeftBoundary::OneSided).apply(&u.values);
    RadialFunction::new(u.grid.clone(), l)
}

impl Radial for RadialFunction {
    fn dim(&self) -> usize {
        self.grid.n
    }

    fn samples(&self, gamma: f64) -> Samples {
        let g = &self.grid;
        let w = if gamma == 0.0 {
            g.weights.clone()
        } else {
            g.weights_gamma(gamma)
        };
        let lap = self.laplacian_values();
        let t: Vec<f64> = g.nodes.iter().map(|r| r.ln()).collect();
        Samples {
            n: g.n,
            ln_w: w.iter().map(|x| x.ln()).collect(),
            lap_r2: lap.iter().zip(&g.nodes).map(|(l, r)| l * r * r).collect(),
            u: self.values.clone(),
            t,
        }
    }
}

fn check_gamma(n: usize, gamma: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma < n as f64) {
        return invalid(format!("γ = {gamma} must lie in [0, n = {n})"));
    }
    Ok(())
}

/// `(ω_{n-1} ∫ |f|^q r^{n−1−γ} dr)^{1/q}`.
pub fn weighted_lp_norm(f: &RadialFunction, q: f64, gamma: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return invalid(format!("exponent {q} must be at least 1"));
    }
    check_gamma(f.n(), gamma)?;
    let w = f.grid.weights_gamma(gamma);
    let s: f64 = f
        .values
        .iter()
        .zip(&w)
        .map(|(v, w)| v.abs().powf(q) * w)
        .sum();
    Ok((f.grid.omega * s).powf(1.0 / q))
}

/// Plain `‖f‖_q` over the grid's ball.
pub fn lp_norm_values(grid: &RadialGrid, values: &[f64], q: f64) -> f64 {
    let s: f64 = values
        .iter()
        .zip(&grid.weights)
        .map(|(v, w)| v.abs().powf(q) * w)
        .sum();
    (grid.omega * s).powf(1.0 / q)
}

/// Gagliardo–Nirenberg ratio `‖∇u‖_t / (‖Δu‖_t^{1/2} ‖u‖_t^{1/2})`.
pub fn gn_ratio(u: &RadialFunction, t: f64) -> Result<f64> {
    let g = &u.grid;
    let du = g.derivative_op().apply(&u.values);
    let lap = u.laplacian_values();
    let a = lp_norm_values(g, &du, t);
    let b = lp_norm_values(g, &lap, t);
    let c = lp_norm_values(g, &u.values, t);
    if b * c == 0.0 {
        return Err(Error::Degenerate("u vanishes identically".into()));
    }
    Ok(a / (b.sqrt() * c.sqrt()))
}

/// Monotone (Fritsch–Carlson) cubic Hermite interpolation in `t = ln r` of
/// samples on `grid`, evaluated at `r`. Zero beyond `r_max`, flat inside `r_min`.
pub fn pchip_eval(grid: &RadialGrid, values: &[f64], slopes: &[f64], r: f64) -> f64 {
    let m = grid.len();
    if r >= grid.r_max() {
        return if r == grid.r_max() {
            values[m - 1]
        } else {
            0.0
        };
    }
    if r <= grid.r_min() {
        return values[0];
    }
    let x = (r.ln() - grid.t(0)) / grid.h;
    let i = (x.floor() as usize).min(m - 2);
    let s = x - i as f64;
    let h = grid.h;
    let (y0, y1, d0, d1) = (values[i], values[i + 1], slopes[i], slopes[i + 1]);
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Fritsch–Carlson slopes `du/dt` for [`pchip_eval`].
pub fn pchip_slopes(grid: &RadialGrid, values: &[f64]) -> Vec<f64> {
    let m = values.len();
    let h = grid.h;
    let delta: Vec<f64> = (0..m - 1)
        .map(|i| (values[i + 1] - values[i]) / h)
        .collect();
    let mut d = vec![0.0; m];
    for i in 1..m - 1 {
        let (a, b) = (delta[i - 1], delta[i]);
        d[i] = if a * b <= 0.0 {
            0.0
        } else {
            2.0 * a * b / (a + b)
        };
    }
    d[0] = end_slope(delta[0], delta[1]);
    d[m - 1] = end_slope(delta[m - 2], delta[m - 3]);
    d
}

fn end_slope(d0: f64, d1: f64) -> f64 {
    let s = (3.0 * d0 - d1) / 2.0;
    if s * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}
