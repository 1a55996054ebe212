//! Common sampling interface shared by grid functions and closed-form
//! piecewise profiles.

/// Quadrature samples of a radial profile.
///
/// `Σ_i F(u_i, Δu_i) e^{ln_w_i}` approximates `∫₀^∞ F(u, Δu) r^{n−1−γ} dr`
/// for the `γ` the samples were requested with. The Laplacian is stored as
/// `r²Δu` and the weights as logarithms so that profiles concentrating at
/// `r ~ e^{-1000}` stay representable.
#[derive(Debug, Clone)]
pub struct Samples {
    pub n: usize,
    /// `ln r_i`.
    pub t: Vec<f64>,
    pub ln_w: Vec<f64>,
    pub u: Vec<f64>,
    pub lap_r2: Vec<f64>,
}

pub trait Radial {
    fn dim(&self) -> usize;
    fn samples(&self, gamma: f64) -> Samples;
}

impl Samples {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `ln |Δu_i|` (may be `-inf`).
    pub fn ln_abs_lap(&self, i: usize) -> f64 {
        self.lap_r2[i].abs().ln() - 2.0 * self.t[i]
    }

    /// `∫ |Δu|^q r^{n−1−γ} dr` without the sphere factor. Only meaningful for
    /// samples requested with `γ = 0` when used as a norm.
    pub fn lap_power_integral(&self, q: f64) -> f64 {
        (0..self.len())
            .filter(|&i| self.lap_r2[i] != 0.0)
            .map(|i| (q * self.ln_abs_lap(i) + self.ln_w[i]).exp())
            .sum()
    }

    /// `∫ |u|^q r^{n−1−γ} dr`.
    pub fn value_power_integral(&self, q: f64) -> f64 {
        (0..self.len())
            .filter(|&i| self.u[i] != 0.0)
            .map(|i| (q * self.u[i].abs().ln() + self.ln_w[i]).exp())
            .sum()
    }
}
