//! Batch driver: one subcommand per experiment, CSV tables with a `#` config
//! comment, `key=value` summaries.
//!
//! Settings come from a `--config` file (`key=value` lines), then bare
//! `key=value` tokens, then `--flags`; later sources win. Exit codes: 0
//! success, 1 invalid configuration, 2 non-convergence or failed check,
//! 3 overflow-dominated probe.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::constants::{beta_n2, ConstantSet};
use crate::error::Error;
use crate::functionals::{
    atc_identity_rhs, atsc_probe_family, e_norm, embedding_probe, envelope_slope, fmt_num,
    functional_scan, normalized_xi_profile, scan_trend, write_csv_rows, ProbeFamily, ProbeRow,
    ProbeTable,
};
use crate::grid::make_log_grid;
use crate::mp::{diagnostics, mountain_pass_solve, ProblemSpec};
use crate::rearrangement::selftest;
use crate::sequences::{cc_sharpness_family_ln, moser_adams_xi_ln, xi_norm_decomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Constants,
    MoserScan,
    AdamsProbe,
    CcProbe,
    AtscScan,
    RearrangeSelftest,
    Embed,
    Solve,
}

#[derive(Debug, Parser)]
#[command(
    name = "adamslab",
    about = "Numerical probes of singular Adams-type inequalities"
)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// `key=value` settings
    settings: Vec<String>,
    /// File of `key=value` lines; `#` starts a comment
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    ell: Option<String>,
    #[arg(long = "k-min")]
    k_min: Option<String>,
    #[arg(long = "k-max")]
    k_max: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    vartheta: Option<String>,
    #[arg(long)]
    alpha0: Option<String>,
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    rmax: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parsed run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub params: BTreeMap<String, String>,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Run(Error),
    Check(String),
    Overflow(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Run(Error::InvalidParameter(_) | Error::Mismatch(_)) => 1,
            CliError::Run(Error::Overflow { .. }) | CliError::Overflow(_) => 3,
            CliError::Run(_) | CliError::Check(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Run(e) => write!(f, "{e}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
            CliError::Overflow(m) => write!(f, "overflow-dominated probe: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn norm_key(k: &str) -> String {
    k.trim().trim_start_matches("--").replace('_', "-")
}

fn insert_kv(map: &mut BTreeMap<String, String>, token: &str) -> CliResult<()> {
    let (k, v) = token
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected key=value, got `{token}`")))?;
    let k = norm_key(k);
    if k.is_empty() {
        return Err(CliError::Config(format!("empty key in `{token}`")));
    }
    map.insert(k, v.trim().to_string());
    Ok(())
}

impl ExperimentConfig {
    /// Parse a full argument vector (program name first).
    pub fn from_args<I, T>(args: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let a = Args::try_parse_from(args)?;
        Self::from_parsed(a).map_err(|e| {
            clap::Error::raw(clap::error::ErrorKind::ValueValidation, format!("{e}\n"))
        })
    }

    fn from_parsed(a: Args) -> CliResult<Self> {
        let mut params = BTreeMap::new();
        if let Some(path) = &a.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            for line in text.lines() {
                let line = line.split('#').next().unwrap_or("").trim();
                if !line.is_empty() {
                    insert_kv(&mut params, line)?;
                }
            }
        }
        for s in &a.settings {
            insert_kv(&mut params, s)?;
        }
        let flags = [
            ("n", &a.n),
            ("p", &a.p),
            ("gamma", &a.gamma),
            ("alpha", &a.alpha),
            ("ell", &a.ell),
            ("k-min", &a.k_min),
            ("k-max", &a.k_max),
            ("lambda", &a.lambda),
            ("vartheta", &a.vartheta),
            ("alpha0", &a.alpha0),
            ("nodes", &a.nodes),
            ("rmax", &a.rmax),
            ("tol", &a.tol),
            ("seed", &a.seed),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                params.insert(k.to_string(), v.clone());
            }
        }
        let out = a.out.or_else(|| params.remove("out").map(PathBuf::from));
        Ok(ExperimentConfig {
            command: a.command,
            params,
            out,
        })
    }

    fn comment(&self) -> String {
        let name = self
            .command
            .to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default();
        let kv: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("adamslab {name} {}", kv.join(" "))
            .trim_end()
            .to_string()
    }
}

/// Typed access with defaults; records which keys were read so unknown keys
/// can be rejected.
struct Params<'a> {
    map: &'a BTreeMap<String, String>,
    used: std::cell::RefCell<Vec<String>>,
}

impl<'a> Params<'a> {
    fn new(map: &'a BTreeMap<String, String>) -> Self {
        Params {
            map,
            used: Default::default(),
        }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.used.borrow_mut().push(key.to_string());
        self.map.get(key).map(|s| s.as_str())
    }

    fn f64(&self, key: &str, default: f64) -> CliResult<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => parse_f64(key, s),
        }
    }

    fn opt_f64(&self, key: &str) -> CliResult<Option<f64>> {
        self.raw(key).map(|s| parse_f64(key, s)).transpose()
    }

    fn usize(&self, key: &str, default: usize) -> CliResult<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => {
                let v = parse_f64(key, s)?;
                if v < 0.0 || v.fract() != 0.0 || v > 1e9 {
                    return Err(CliError::Config(format!(
                        "{key} = {s} must be a nonnegative integer"
                    )));
                }
                Ok(v as usize)
            }
        }
    }

    fn string(&self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or(default).to_string()
    }

    /// `a:b` (spaced per `spacing` with `points` entries) or a comma list.
    fn grid(&self, key: &str, default: &str, points: usize, log: bool) -> CliResult<Vec<f64>> {
        let s = self.raw(key).unwrap_or(default);
        parse_grid(key, s, points, log)
    }

    fn reject_unknown(&self) -> CliResult<()> {
        let used = self.used.borrow();
        for k in self.map.keys() {
            if !used.iter().any(|u| u == k) {
                return Err(CliError::Config(format!("unknown setting `{k}`")));
            }
        }
        Ok(())
    }
}

fn parse_f64(key: &str, s: &str) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Config(format!("{key} = `{s}` is not a finite number")))
}

fn parse_grid(key: &str, s: &str, points: usize, log: bool) -> CliResult<Vec<f64>> {
    if let Some((a, b)) = s.split_once(':') {
        let (a, b) = (parse_f64(key, a)?, parse_f64(key, b)?);
        if points < 2 {
            return Ok(vec![a]);
        }
        if log && !(a > 0.0 && b > 0.0) {
            return Err(CliError::Config(format!(
                "{key}: logarithmic range needs positive ends"
            )));
        }
        let (la, lb) = if log { (a.ln(), b.ln()) } else { (a, b) };
        Ok((0..points)
            .map(|i| {
                let x = la + (lb - la) * i as f64 / (points - 1) as f64;
                if log {
                    x.exp()
                } else {
                    x
                }
            })
            .collect())
    } else {
        s.split(',').map(|x| parse_f64(key, x)).collect()
    }
}

fn output(cfg: &ExperimentConfig) -> CliResult<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

/// Execute one configured run; summaries go to `log`.
pub fn run(cfg: &ExperimentConfig, log: &mut impl Write) -> CliResult<()> {
    let ps = Params::new(&cfg.params);
    match cfg.command {
        Command::Constants => cmd_constants(cfg, &ps),
        Command::MoserScan => cmd_moser_scan(cfg, &ps, log),
        Command::AdamsProbe => cmd_adams_probe(cfg, &ps, log),
        Command::CcProbe => cmd_cc_probe(cfg, &ps, log),
        Command::AtscScan => cmd_atsc_scan(cfg, &ps, log),
        Command::RearrangeSelftest => cmd_selftest(cfg, &ps),
        Command::Embed => cmd_embed(cfg, &ps, log),
        Command::Solve => cmd_solve(cfg, &ps),
    }
}

fn npg(ps: &Params) -> CliResult<(usize, f64, f64)> {
    Ok((ps.usize("n", 4)?, ps.f64("p", 1.5)?, ps.f64("gamma", 1.0)?))
}

fn k_list(ps: &Params) -> CliResult<Vec<f64>> {
    let points = ps.usize("kpoints", 7)?;
    let kmin = ps.opt_f64("k-min")?;
    let kmax = ps.opt_f64("k-max")?;
    let ks = match (kmin, kmax) {
        (Some(a), Some(b)) => parse_grid("k-min/k-max", &format!("{a}:{b}"), points, true)?,
        (None, None) => ps.grid("kgrid", "1e3:1e9", points, true)?,
        _ => return Err(CliError::Config("give both k-min and k-max".into())),
    };
    if ks.iter().any(|&k| !(k >= 3.0)) {
        return Err(CliError::Config("every k must be at least 3".into()));
    }
    Ok(ks)
}

fn cmd_constants(cfg: &ExperimentConfig, ps: &Params) -> CliResult<()> {
    let (n, p, gamma) = npg(ps)?;
    let vt = ps.opt_f64("vartheta")?;
    let a0 = ps.opt_f64("alpha0")?;
    ps.reject_unknown()?;
    let cs = match (vt, a0) {
        (Some(mu), Some(a0)) => ConstantSet::with_level(n, p, gamma, mu, a0)?,
        (None, None) => ConstantSet::new(n, p, gamma)?,
        _ => {
            return Err(CliError::Config(
                "give both vartheta and alpha0 for c0".into(),
            ))
        }
    };
    let mut out = output(cfg)?;
    let rows = cs
        .rows()
        .into_iter()
        .map(|(k, v)| vec![k.to_string(), fmt_num(v)]);
    write_csv_rows(&mut out, &cfg.comment(), &["name", "value"], rows)?;
    Ok(())
}

fn cmd_moser_scan(cfg: &ExperimentConfig, ps: &Params, log: &mut impl Write) -> CliResult<()> {
    let (n, p, _) = npg(ps)?;
    let ks = k_list(ps)?;
    ps.reject_unknown()?;
    let h = n as f64 / 2.0;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &k in &ks {
        let lk = k.ln();
        let xi = moser_adams_xi_ln(lk, n)?;
        let en = e_norm(&xi, p)?;
        let quad = en.dnorm_half.powf(h);
        let (inner, middle, collar) = xi_norm_decomposition(lk, n)?;
        let closed = inner + middle + collar;
        let rel = (quad - closed).abs() / closed;
        worst = worst.max(rel);
        let lap_p_pow = en.dnorm_p.powf(p);
        rows.push(vec![
            fmt_num(k),
            fmt_num(lk),
            fmt_num(quad),
            fmt_num(inner),
            fmt_num(middle),
            fmt_num(collar),
            fmt_num(rel),
            fmt_num(lap_p_pow),
        ]);
    }
    let mut out = output(cfg)?;
    write_csv_rows(
        &mut out,
        &cfg.comment(),
        &[
            "k",
            "ln_k",
            "lap_half_pow",
            "inner",
            "middle",
            "collar",
            "rel_err",
            "lap_p_pow",
        ],
        rows.into_iter(),
    )?;
    writeln!(log, "max_rel_err={}", fmt_num(worst))?;
    Ok(())
}

fn finish_probe(cfg: &ExperimentConfig, table: &ProbeTable, log: &mut impl Write) -> CliResult<()> {
    let mut out = output(cfg)?;
    table.write_csv(&mut out, &cfg.comment())?;
    out.flush()?;
    let tr = scan_trend(table);
    writeln!(log, "growth={}", fmt_num(tr.growth))?;
    writeln!(log, "max_ratio={}", fmt_num(tr.max_ratio))?;
    writeln!(log, "strictly_increasing={}", tr.strictly_increasing)?;
    overflow_check(table)
}

fn overflow_check(table: &ProbeTable) -> CliResult<()> {
    let best = table
        .rows
        .iter()
        .max_by(|a, b| a.ln_value.total_cmp(&b.ln_value));
    match best {
        Some(r) if r.overflow => Err(CliError::Overflow(format!(
            "largest row at {} overflowed",
            fmt_num(r.param)
        ))),
        _ => Ok(()),
    }
}

fn cmd_adams_probe(cfg: &ExperimentConfig, ps: &Params, log: &mut impl Write) -> CliResult<()> {
    let (n, p, gamma) = npg(ps)?;
    let cs = ConstantSet::new(n, p, gamma)?;
    let alpha = match ps.opt_f64("alpha")? {
        Some(a) => a,
        None => ps.f64("alpha-ratio", 1.1)? * cs.beta_gamma,
    };
    let ks = k_list(ps)?;
    ps.reject_unknown()?;
    let lks: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let t = functional_scan(
        |lk| normalized_xi_profile(lk, n, p),
        &lks,
        alpha,
        gamma,
        cs.j0,
    )?;
    let t = relabel(t, |lk| lk.exp());
    writeln!(log, "alpha={}", fmt_num(alpha))?;
    finish_probe(cfg, &t, log)
}

fn relabel(t: ProbeTable, f: impl Fn(f64) -> f64) -> ProbeTable {
    ProbeTable::from_rows(
        t.rows
            .into_iter()
            .map(|r| ProbeRow {
                param: f(r.param),
                ..r
            })
            .collect(),
    )
}

fn cmd_cc_probe(cfg: &ExperimentConfig, ps: &Params, log: &mut impl Write) -> CliResult<()> {
    let (n, p, gamma) = npg(ps)?;
    let cs = ConstantSet::new(n, p, gamma)?;
    let delta = ps.f64("delta", 0.5)?;
    let ratio = ps.f64("ell-ratio", 1.1)?;
    let ks = k_list(ps)?;
    ps.reject_unknown()?;
    let probe = cc_sharpness_family_ln(ks[0].ln(), delta, n, p)?;
    let ell = ratio * probe.concentration_threshold();
    let alpha = ell * cs.beta_gamma;
    let lks: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let t = functional_scan(
        |lk| Ok(cc_sharpness_family_ln(lk, delta, n, p)?.u_k),
        &lks,
        alpha,
        gamma,
        cs.j0,
    )?;
    let t = relabel(t, |lk| lk.exp());
    writeln!(log, "L_n={}", fmt_num(probe.concentration_threshold()))?;
    writeln!(log, "ell={}", fmt_num(ell))?;
    finish_probe(cfg, &t, log)
}

fn cmd_atsc_scan(cfg: &ExperimentConfig, ps: &Params, log: &mut impl Write) -> CliResult<()> {
    let (n, p, gamma) = npg(ps)?;
    let beta = beta_n2(n)?;
    let ells = match ps.raw("ell") {
        Some(s) => parse_grid("ell", s, ps.usize("ell-points", 10)?, false)?,
        None => {
            let r = ps.grid("ell-ratio", "0.9:0.99", ps.usize("ell-points", 10)?, false)?;
            r.iter().map(|x| x * beta).collect()
        }
    };
    let family = match ps.string("family", "xi").as_str() {
        "xi" => ProbeFamily::Xi,
        "trunclog" => ProbeFamily::TruncatedLog {
            eps: ps.grid("eps", "0.05,0.1,0.2,0.3,0.4,0.45", 0, false)?,
        },
        other => {
            return Err(CliError::Config(format!(
                "family `{other}` is not xi or trunclog"
            )))
        }
    };
    let params = ps.grid(
        "family-grid",
        "2:1500",
        ps.usize("family-points", 80)?,
        true,
    )?;
    let a = ps.f64("a", n as f64 / 2.0)?;
    let bs = ps.grid("b", &format!("{},{}", n as f64 / 2.0, n as f64), 0, false)?;
    ps.reject_unknown()?;
    let t = atsc_probe_family(&ells, gamma, &params, n, p, &family)?;
    let mut out = output(cfg)?;
    t.write_csv(&mut out, &cfg.comment())?;
    out.flush()?;
    let (slope, expected) = envelope_slope(&t, gamma, n, p)?;
    writeln!(log, "envelope_slope={}", fmt_num(slope))?;
    writeln!(log, "expected_slope={}", fmt_num(expected))?;
    for b in bs {
        writeln!(
            log,
            "atc_rhs_a{}_b{}={}",
            fmt_num(a),
            fmt_num(b),
            fmt_num(atc_identity_rhs(&t, a, b, gamma, n, p)?)
        )?;
    }
    overflow_check(&t)
}

fn cmd_selftest(cfg: &ExperimentConfig, ps: &Params) -> CliResult<()> {
    let (n, p, _) = npg(ps)?;
    let trials = ps.usize("trials", 1000)?;
    let seed = ps.usize("seed", 7)? as u64;
    ps.reject_unknown()?;
    let r = selftest(trials, seed, n, p)?;
    let mut out = output(cfg)?;
    writeln!(out, "trials={}", r.trials)?;
    writeln!(out, "max_norm_rel_err={}", fmt_num(r.max_norm_rel_err))?;
    writeln!(out, "min_hl_gap={}", fmt_num(r.min_hl_gap))?;
    writeln!(out, "maximal_violations={}", r.maximal_violations)?;
    writeln!(out, "decay_violations={}", r.decay_violations)?;
    writeln!(
        out,
        "equimeasurability_violations={}",
        r.equimeasurability_violations
    )?;
    writeln!(out, "monotonicity_violations={}", r.monotonicity_violations)?;
    writeln!(out, "passed={}", r.passed())?;
    out.flush()?;
    if r.passed() {
        Ok(())
    } else {
        Err(CliError::Check("rearrangement property suite".into()))
    }
}

fn cmd_embed(cfg: &ExperimentConfig, ps: &Params, log: &mut impl Write) -> CliResult<()> {
    let (n, p, gamma) = npg(ps)?;
    let rho = ps.f64("rho", 8.0)?;
    let trials = ps.usize("trials", 40)?;
    ps.reject_unknown()?;
    let r = embedding_probe(rho, gamma, n, p, trials)?;
    let mut out = output(cfg)?;
    let rows = r
        .history
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i + 1).to_string(), fmt_num(*v)]);
    write_csv_rows(&mut out, &cfg.comment(), &["trial", "estimate"], rows)?;
    writeln!(log, "estimate={}", fmt_num(r.estimate))?;
    writeln!(log, "best_trial={}", r.best_trial)?;
    Ok(())
}

fn cmd_solve(cfg: &ExperimentConfig, ps: &Params) -> CliResult<()> {
    let (n, p, gamma) = npg(ps)?;
    let lambda = ps.f64("lambda", 1e6)?;
    let vartheta = ps.f64("vartheta", 7.0)?;
    let alpha0 = ps.f64("alpha0", 1.0)?;
    let nodes = ps.usize("nodes", 2048)?;
    let rmin = ps.f64("rmin", 1e-5)?;
    let rmax = ps.f64("rmax", 8.0)?;
    let tol = ps.f64("tol", 1e-6)?;
    let max_iter = ps.usize("max-iter", 500)?;
    let s_max = ps.f64("s-max", 4.0)?;
    ps.reject_unknown()?;
    let grid = make_log_grid(n, rmin, rmax, nodes)?;
    let mut spec = ProblemSpec::new(n, p, gamma, lambda, vartheta, alpha0, grid)?;
    spec.tol = tol;
    spec.max_iter = max_iter;
    spec.s_max = s_max;
    let report = mountain_pass_solve(&spec)?;
    let diag = diagnostics(&spec, &report)?;
    let mut stdout = std::io::stdout().lock();
    write!(stdout, "{}{}", report.to_record(), diag.to_record())?;
    if let Some(path) = &cfg.out {
        let mut f = BufWriter::new(File::create(path)?);
        report.write_csv(&mut f, &cfg.comment())?;
        f.flush()?;
    }
    Ok(())
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match Args::try_parse_from(args) {
        Ok(a) => match ExperimentConfig::from_parsed(a) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return e.exit_code();
            }
        },
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut log = std::io::stderr().lock();
    match run(&cfg, &mut log) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> ExperimentConfig {
        let mut v = vec!["adamslab"];
        v.extend_from_slice(args);
        ExperimentConfig::from_args(v).unwrap()
    }

    #[test]
    fn flags_override_tokens() {
        let c = cfg(&["constants", "n=5", "--n", "6", "gamma=0.5"]);
        assert_eq!(c.command, Command::Constants);
        assert_eq!(c.params["n"], "6");
        assert_eq!(c.params["gamma"], "0.5");
    }

    #[test]
    fn config_file_is_lowest_priority() {
        let dir = std::env::temp_dir().join(format!("adamslab-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# comment\nn=5\np = 1.2\nk_min=10 # trailing\n").unwrap();
        let c = cfg(&["constants", "--config", path.to_str().unwrap(), "p=1.4"]);
        assert_eq!(c.params["n"], "5");
        assert_eq!(c.params["p"], "1.4");
        assert_eq!(c.params["k-min"], "10");
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("k", "1e3:1e9", 7, true).unwrap().len(), 7);
        let g = parse_grid("k", "1e3:1e9", 7, true).unwrap();
        assert!((g[3] / 1e6 - 1.0).abs() < 1e-12);
        assert_eq!(
            parse_grid("x", "1,2,3", 0, false).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        assert!(parse_grid("x", "1,a", 0, false).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let c = cfg(&["constants", "colour=blue"]);
        let e = run(&c, &mut Vec::new()).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            CliError::Run(Error::NonConvergence("x".into())).exit_code(),
            2
        );
        assert_eq!(CliError::Run(Error::Overflow { arg: 1e3 }).exit_code(), 3);
        assert_eq!(
            CliError::Run(Error::InvalidParameter("x".into())).exit_code(),
            1
        );
        assert_eq!(main_with_args(["adamslab", "no-such-command"]), 1);
    }
}
