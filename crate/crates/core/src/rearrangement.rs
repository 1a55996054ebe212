//! Distribution functions and rearrangements on a discrete (value, measure)
//! model, where every identity reduces to sorting and exact sums.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::measures;
use crate::error::{invalid, Error, Result};
use crate::grid::{GridRef, RadialFunction};

/// A nonnegative simple function: value `v_i` on a cell of measure `m_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredSamples {
    values: Vec<f64>,
    measures: Vec<f64>,
}

impl MeasuredSamples {
    /// Callers pass `|f|`; negative values are refused rather than absolutized.
    pub fn new(values: Vec<f64>, measures: Vec<f64>) -> Result<Self> {
        if values.len() != measures.len() {
            return Err(Error::Mismatch(format!(
                "{} values vs {} measures",
                values.len(),
                measures.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return invalid(format!("values must be finite and nonnegative, got {v}"));
        }
        if let Some(m) = measures.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return invalid(format!("measures must be positive, got {m}"));
        }
        Ok(MeasuredSamples { values, measures })
    }

    pub fn unit_cells(values: Vec<f64>) -> Result<Self> {
        let m = vec![1.0; values.len()];
        Self::new(values, m)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn total_measure(&self) -> f64 {
        self.measures.iter().sum()
    }

    /// `∫ f^q = Σ v_i^q m_i`.
    pub fn lp_power(&self, q: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.measures)
            .map(|(v, m)| v.powf(q) * m)
            .sum()
    }

    /// Cellwise image `Ψ(f)`.
    pub fn map(&self, psi: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.values.iter().map(|&v| psi(v)).collect(),
            self.measures.clone(),
        )
    }
}

/// `μ_f(t) = |{f > t}|`.
pub fn distribution(f: &MeasuredSamples, t: f64) -> f64 {
    f.values
        .iter()
        .zip(&f.measures)
        .filter(|(v, _)| **v > t)
        .map(|(_, m)| m)
        .sum()
}

/// Right-continuous nonincreasing step function on `[0, total)`; zero beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct DecreasingProfile {
    /// `0 = s_0 < s_1 < … < s_N`.
    pub breaks: Vec<f64>,
    /// `w_1 > w_2 > … > w_N` (equal values are merged).
    pub values: Vec<f64>,
}

/// `f^♯`: sort descending and accumulate measures.
pub fn decreasing_rearrangement(f: &MeasuredSamples) -> DecreasingProfile {
    let mut idx: Vec<usize> = (0..f.values.len()).collect();
    // stable: ties keep input order, and merging makes the result tie-order free
    idx.sort_by(|&a, &b| f.values[b].total_cmp(&f.values[a]));
    let mut breaks = vec![0.0];
    let mut values: Vec<f64> = Vec::new();
    let mut widths: Vec<f64> = Vec::new();
    for i in idx {
        let (v, m) = (f.values[i], f.measures[i]);
        match values.last() {
            Some(&w) if w == v => *widths.last_mut().unwrap() += m,
            _ => {
                values.push(v);
                widths.push(m);
            }
        }
    }
    let mut s = 0.0;
    for w in widths {
        s += w;
        breaks.push(s);
    }
    DecreasingProfile { breaks, values }
}

impl DecreasingProfile {
    pub fn total_measure(&self) -> f64 {
        *self.breaks.last().unwrap_or(&0.0)
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.breaks.windows(2).map(|w| w[1] - w[0])
    }

    /// `f^♯(s)`.
    pub fn value(&self, s: f64) -> f64 {
        if s < 0.0 {
            return self.values.first().copied().unwrap_or(0.0);
        }
        // first j with breaks[j+1] > s
        let j = self.breaks[1..].partition_point(|&b| b <= s);
        self.values.get(j).copied().unwrap_or(0.0)
    }

    /// Distribution function of the profile itself.
    pub fn distribution(&self, t: f64) -> f64 {
        let j = self.values.partition_point(|&w| w > t);
        self.breaks[j]
    }

    /// `∫₀^{total} (f^♯)^q ds` from the step structure.
    pub fn lp_power(&self, q: f64) -> f64 {
        self.values
            .iter()
            .zip(self.widths())
            .map(|(w, d)| w.powf(q) * d)
            .sum()
    }

    /// `∫₀^s f^♯`.
    pub fn primitive(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &w) in self.values.iter().enumerate() {
            let (a, b) = (self.breaks[j], self.breaks[j + 1]);
            if s <= a {
                break;
            }
            acc += w * (s.min(b) - a);
        }
        acc
    }
}

/// `f^♯♯(s) = (1/s)∫₀^s f^♯`.
pub fn maximal_profile(g: &DecreasingProfile, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return invalid(format!("s = {s} must be positive"));
    }
    Ok(g.primitive(s) / s)
}

/// Schwarz symmetrization `f*(r) = f^♯(σ_n r^n)` as a closed-form radial profile.
#[derive(Debug, Clone)]
pub struct SchwarzProfile {
    pub n: usize,
    pub sigma: f64,
    pub profile: DecreasingProfile,
}

pub fn schwarz(f: &MeasuredSamples, n: usize) -> Result<SchwarzProfile> {
    let (_, sigma) = measures(n)?;
    Ok(SchwarzProfile {
        n,
        sigma,
        profile: decreasing_rearrangement(f),
    })
}

impl SchwarzProfile {
    pub fn eval(&self, r: f64) -> f64 {
        self.profile.value(self.sigma * r.abs().powi(self.n as i32))
    }

    /// Radii `(s_j/σ_n)^{1/n}` at which `f*` jumps.
    pub fn jump_radii(&self) -> Vec<f64> {
        self.profile.breaks[1..]
            .iter()
            .map(|s| (s / self.sigma).powf(1.0 / self.n as f64))
            .collect()
    }

    pub fn on_grid(&self, grid: GridRef) -> Result<RadialFunction> {
        if grid.n != self.n {
            return Err(Error::Mismatch(format!(
                "grid dimension {} vs {}",
                grid.n, self.n
            )));
        }
        RadialFunction::from_fn(grid, |r| self.eval(r))
    }

    /// Radial decay bound `r^{−n/℘}(n/ω_{n−1})^{1/℘}‖f‖_℘`.
    pub fn decay_bound(&self, r: f64, wp: f64) -> f64 {
        let nf = self.n as f64;
        let omega = self.sigma * nf;
        let norm = self.profile.lp_power(wp).powf(1.0 / wp);
        r.powf(-nf / wp) * (nf / omega).powf(1.0 / wp) * norm
    }
}

/// `∫ f*g* − ∫ fg` for samples on the same cells.
pub fn hardy_littlewood_gap(f: &MeasuredSamples, g: &MeasuredSamples) -> Result<f64> {
    if f.measures != g.measures {
        return Err(Error::Mismatch(
            "f and g must share their cell measures".into(),
        ));
    }
    let direct: f64 = f
        .values
        .iter()
        .zip(&g.values)
        .zip(&f.measures)
        .map(|((a, b), m)| a * b * m)
        .sum();
    let (pf, pg) = (decreasing_rearrangement(f), decreasing_rearrangement(g));
    Ok(product_integral(&pf, &pg) - direct)
}

/// `∫ f^♯ g^♯` by merging breakpoints.
pub fn product_integral(a: &DecreasingProfile, b: &DecreasingProfile) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut s = 0.0;
    let mut acc = 0.0;
    while i < a.values.len() && j < b.values.len() {
        let next = a.breaks[i + 1].min(b.breaks[j + 1]);
        acc += a.values[i] * b.values[j] * (next - s);
        s = next;
        if a.breaks[i + 1] <= s {
            i += 1;
        }
        if b.breaks[j + 1] <= s {
            j += 1;
        }
    }
    acc
}

/// Outcome of the randomized property suite.
#[derive(Debug, Clone, Default)]
pub struct SelfTestReport {
    pub trials: usize,
    pub max_norm_rel_err: f64,
    pub min_hl_gap: f64,
    pub maximal_violations: usize,
    pub decay_violations: usize,
    pub equimeasurability_violations: usize,
    pub monotonicity_violations: usize,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.max_norm_rel_err <= 1e-12
            && self.min_hl_gap >= -1e-12
            && self.maximal_violations == 0
            && self.decay_violations == 0
            && self.equimeasurability_violations == 0
            && self.monotonicity_violations == 0
    }
}

/// Random instance; about a third of draws use a coarse value lattice so ties occur.
pub fn random_samples(rng: &mut ChaCha8Rng, max_cells: usize) -> MeasuredSamples {
    let len = rng.gen_range(1..=max_cells);
    let coarse = rng.gen_bool(1.0 / 3.0);
    let values = (0..len)
        .map(|_| {
            let v: f64 = rng.gen_range(0.0..10.0);
            if coarse {
                v.round()
            } else {
                v
            }
        })
        .collect();
    let measures = (0..len).map(|_| rng.gen_range(0.01..2.0)).collect();
    MeasuredSamples::new(values, measures).expect("valid random instance")
}

/// Randomized check of the rearrangement identities: norm preservation for
/// `p ∈ {1, 1.5, 2, 7}`, Hardy–Littlewood, `f^♯ ≤ f^♯♯`, the radial decay
/// bound for `℘ ∈ {1, p, n/2}`, equimeasurability and monotonicity.
pub fn selftest(trials: usize, seed: u64, n: usize, p: f64) -> Result<SelfTestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SelfTestReport {
        trials,
        min_hl_gap: f64::INFINITY,
        ..Default::default()
    };
    for _ in 0..trials {
        let f = random_samples(&mut rng, 60);
        let prof = decreasing_rearrangement(&f);
        for q in [1.0, 1.5, 2.0, 7.0] {
            let a = f.lp_power(q);
            let b = prof.lp_power(q);
            if a > 0.0 {
                rep.max_norm_rel_err = rep.max_norm_rel_err.max((a - b).abs() / a);
            }
        }
        // g on the same cells
        let gv = (0..f.values.len())
            .map(|_| rng.gen_range(0.0..5.0))
            .collect();
        let g = MeasuredSamples::new(gv, f.measures.clone())?;
        let gap = hardy_littlewood_gap(&f, &g)?;
        rep.min_hl_gap = rep.min_hl_gap.min(gap);
        let total = prof.total_measure();
        for k in 1..=40 {
            let s = total * k as f64 / 40.0 * 0.999;
            if prof.value(s) > maximal_profile(&prof, s)? * (1.0 + 1e-12) {
                rep.maximal_violations += 1;
            }
        }
        let maxv = prof.values[0];
        for k in 0..=40 {
            let t = maxv * k as f64 / 40.0;
            if (distribution(&f, t) - prof.distribution(t)).abs() > 1e-12 * total {
                rep.equimeasurability_violations += 1;
            }
        }
        // cellwise-larger h ⇒ h^♯ ≥ f^♯
        let h = f.map(|v| v + 0.5 * v.sqrt())?;
        let ph = decreasing_rearrangement(&h);
        for k in 0..40 {
            let s = total * k as f64 / 40.0;
            if ph.value(s) < prof.value(s) {
                rep.monotonicity_violations += 1;
            }
        }
        let sz = schwarz(&f, n)?;
        let radii = sz.jump_radii();
        let r_max = *radii.last().unwrap();
        for wp in [1.0, p, n as f64 / 2.0] {
            for k in 1..=40 {
                let r = r_max * k as f64 / 40.0;
                if sz.eval(r) > sz.decay_bound(r, wp) * (1.0 + 1e-12) {
                    rep.decay_violations += 1;
                }
            }
            for &r in &radii {
                // left limits at the jumps are the tightest points
                let rl = r * (1.0 - 1e-12);
                if sz.eval(rl) > sz.decay_bound(rl, wp) * (1.0 + 1e-9) {
                    rep.decay_violations += 1;
                }
            }
        }
    }
    Ok(rep)
}
