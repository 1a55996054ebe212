//! Python module `pyadamslab`.

use std::collections::BTreeMap;

use adamslab::constants::ConstantSet;
use adamslab::functionals::{e_norm, functional_scan, normalized_xi_profile};
use adamslab::mp::diagnostics;
use adamslab::sequences::{moser_adams_xi_ln, xi_norm_decomposition};
use adamslab::{make_log_grid, Error, ProblemSpec, YoungParams};
use pyo3::exceptions::{PyOverflowError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::Mismatch(_) => PyValueError::new_err(e.to_string()),
        Error::Overflow { .. } => PyOverflowError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Sharp constants for `(n, p, γ)`; pass `vartheta` and `alpha0` for the
/// level bound `c0`.
#[pyclass(frozen, name = "Constants")]
struct PyConstants {
    inner: ConstantSet,
}

#[pymethods]
impl PyConstants {
    #[new]
    #[pyo3(signature = (n, p, gamma, vartheta=None, alpha0=None))]
    fn new(
        n: usize,
        p: f64,
        gamma: f64,
        vartheta: Option<f64>,
        alpha0: Option<f64>,
    ) -> PyResult<Self> {
        let inner = match (vartheta, alpha0) {
            (Some(mu), Some(a0)) => ConstantSet::with_level(n, p, gamma, mu, a0),
            (None, None) => ConstantSet::new(n, p, gamma),
            _ => return Err(PyValueError::new_err("give both vartheta and alpha0")),
        }
        .map_err(py_err)?;
        Ok(PyConstants { inner })
    }

    #[getter]
    fn beta_n2(&self) -> f64 {
        self.inner.beta_n2
    }

    #[getter]
    fn beta_gamma(&self) -> f64 {
        self.inner.beta_gamma
    }

    #[getter]
    fn p_star(&self) -> f64 {
        self.inner.p_star
    }

    #[getter]
    fn j0(&self) -> usize {
        self.inner.j0
    }

    #[getter]
    fn c0(&self) -> Option<f64> {
        self.inner.c0
    }

    fn as_dict(&self) -> BTreeMap<&'static str, f64> {
        self.inner.rows().into_iter().collect()
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!("Constants(n={}, p={}, gamma={})", c.n, c.p, c.gamma)
    }
}

/// `exp(α|s|^q)` minus its first `j0` Taylor terms, `q = n/(n−2)`.
#[pyfunction]
#[pyo3(signature = (s, alpha, n=4, j0=3))]
fn phi(s: f64, alpha: f64, n: usize, j0: usize) -> PyResult<f64> {
    let params = YoungParams::for_dim(n, alpha, j0).map_err(py_err)?;
    adamslab::phi(s, &params).map_err(py_err)
}

#[pyfunction]
fn split_constant(eta: f64, wp: f64) -> PyResult<f64> {
    adamslab::split_constant(eta, wp).map_err(py_err)
}

/// `(inner, middle, collar)` pieces of `‖Δξ_k‖_{n/2}^{n/2}` at `ln k`.
#[pyfunction]
#[pyo3(signature = (ln_k, n=4))]
fn xi_norm_parts(ln_k: f64, n: usize) -> PyResult<(f64, f64, f64)> {
    xi_norm_decomposition(ln_k, n).map_err(py_err)
}

/// E-norm of `ξ_k` by quadrature.
#[pyfunction]
#[pyo3(signature = (ln_k, n=4, p=1.5))]
fn xi_e_norm(ln_k: f64, n: usize, p: f64) -> PyResult<f64> {
    let xi = moser_adams_xi_ln(ln_k, n).map_err(py_err)?;
    Ok(e_norm(&xi, p).map_err(py_err)?.e_norm)
}

/// `ln` of the singular Adams functional along normalized `ξ_k`; returns
/// `[(ln_k, ln_value, overflow)]` in input order.
#[pyfunction]
#[pyo3(signature = (ln_k, alpha, n=4, p=1.5, gamma=1.0))]
fn adams_scan(
    py: Python<'_>,
    ln_k: Vec<f64>,
    alpha: f64,
    n: usize,
    p: f64,
    gamma: f64,
) -> PyResult<Vec<(f64, f64, bool)>> {
    let cs = ConstantSet::new(n, p, gamma).map_err(py_err)?;
    let t = py
        .detach(|| {
            functional_scan(
                |lk| normalized_xi_profile(lk, n, p),
                &ln_k,
                alpha,
                gamma,
                cs.j0,
            )
        })
        .map_err(py_err)?;
    Ok(t.rows
        .iter()
        .map(|r| (r.param, r.ln_value, r.overflow))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (trials=1000, seed=7, n=4, p=1.5))]
fn rearrangement_selftest(trials: usize, seed: u64, n: usize, p: f64) -> PyResult<bool> {
    Ok(adamslab::rearrangement::selftest(trials, seed, n, p)
        .map_err(py_err)?
        .passed())
}

/// Converged mountain-pass state.
#[pyclass(frozen, get_all, name = "Solution")]
struct PySolution {
    r: Vec<f64>,
    u: Vec<f64>,
    lap_u: Vec<f64>,
    energy: f64,
    residual: f64,
    c0: f64,
    norm_bound_ok: bool,
    ar_ok: bool,
}

#[pymethods]
impl PySolution {
    fn __repr__(&self) -> String {
        format!(
            "Solution(nodes={}, energy={:.8}, residual={:.2e})",
            self.r.len(),
            self.energy,
            self.residual
        )
    }
}

#[pyfunction]
#[pyo3(signature = (n=4, p=1.5, gamma=1.0, lam=1e6, vartheta=7.0, alpha0=1.0, nodes=2048, r_min=1e-5, r_max=8.0, tol=1e-6))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    n: usize,
    p: f64,
    gamma: f64,
    lam: f64,
    vartheta: f64,
    alpha0: f64,
    nodes: usize,
    r_min: f64,
    r_max: f64,
    tol: f64,
) -> PyResult<PySolution> {
    py.detach(|| {
        let grid = make_log_grid(n, r_min, r_max, nodes)?;
        let mut spec = ProblemSpec::new(n, p, gamma, lam, vartheta, alpha0, grid)?;
        spec.tol = tol;
        let rep = adamslab::mountain_pass_solve(&spec)?;
        let d = diagnostics(&spec, &rep)?;
        Ok(PySolution {
            r: rep.r,
            u: rep.u,
            lap_u: rep.lap,
            energy: rep.energy,
            residual: rep.residual,
            c0: rep.c0,
            norm_bound_ok: d.norm_bound_ok,
            ar_ok: d.ar_ok,
        })
    })
    .map_err(py_err)
}

#[pymodule]
fn pyadamslab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConstants>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(split_constant, m)?)?;
    m.add_function(wrap_pyfunction!(xi_norm_parts, m)?)?;
    m.add_function(wrap_pyfunction!(xi_e_norm, m)?)?;
    m.add_function(wrap_pyfunction!(adams_scan, m)?)?;
    m.add_function(wrap_pyfunction!(rearrangement_selftest, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    Ok(())
}
