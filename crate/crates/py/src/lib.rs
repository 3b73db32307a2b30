//! Python module `stable_transversals`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use stable_transversals as st;
use st::{SearchBudget, SearchConfig, SearchOutcome};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// `mu` transversals of B_n meeting stably.
#[pyclass(name = "Family", frozen)]
pub struct PyFamily {
    inner: st::StableFamily,
}

#[pymethods]
impl PyFamily {
    /// `cols[i][r]` is the column of transversal `i` in row `r`.
    #[new]
    fn new(n: usize, cols: Vec<Vec<usize>>) -> PyResult<Self> {
        let transversals = cols
            .into_iter()
            .map(|c| st::Transversal::new(n, c))
            .collect::<st::Result<Vec<_>>>()
            .map_err(value_err)?;
        let inner = st::StableFamily::new(transversals).map_err(value_err)?;
        Ok(PyFamily { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn mu(&self) -> usize {
        self.inner.mu()
    }

    #[getter]
    fn t(&self) -> usize {
        self.inner.t()
    }

    #[getter]
    fn cols(&self) -> Vec<Vec<usize>> {
        self.inner.transversals().iter().map(|t| t.cols().to_vec()).collect()
    }

    #[getter]
    fn stable_cells(&self) -> Vec<(usize, usize)> {
        self.inner.stable_set().iter().map(|c| (c.row, c.col)).collect()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(value_err)?;
        Ok(PyFamily { inner })
    }

    fn trade(&self) -> PyResult<PyTrade> {
        let inner = st::family_to_trade(&self.inner).map_err(value_err)?;
        Ok(PyTrade { inner })
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Family(n={}, mu={}, t={})", self.inner.n(), self.inner.mu(), self.inner.t())
    }
}

/// Circulant mu-way k-homogeneous latin trade given by its base row.
#[pyclass(name = "Trade", frozen)]
pub struct PyTrade {
    inner: st::CirculantTrade,
}

#[pymethods]
impl PyTrade {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn mu(&self) -> usize {
        self.inner.mu()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn b_notation(&self) -> String {
        self.inner.to_b_notation()
    }

    fn base_rows(&self) -> String {
        self.inner.render_base_rows()
    }

    /// Violated trade conditions; empty when the trade is valid.
    fn violations(&self) -> Vec<String> {
        st::verify_trade(&self.inner).violations.into_iter().map(|v| v.detail).collect()
    }

    fn verify(&self) -> bool {
        st::verify_trade(&self.inner).is_ok()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(value_err)?;
        Ok(PyTrade { inner })
    }

    fn __repr__(&self) -> String {
        format!("Trade(n={}, mu={}, k={})", self.inner.n(), self.inner.mu(), self.inner.k())
    }
}

fn budget(mode: &str, seed: u64, max_nodes: Option<u64>) -> PyResult<SearchBudget> {
    match (mode, max_nodes) {
        ("exhaustive", None) => Ok(SearchBudget::exhaustive()),
        ("exhaustive", Some(m)) => Ok(SearchBudget::exhaustive_limited(m)),
        ("random", m) => Ok(SearchBudget::randomized(seed, m.unwrap_or(SearchBudget::DEFAULT_RANDOM_NODES))),
        (other, _) => Err(PyValueError::new_err(format!("mode must be 'exhaustive' or 'random', got {other:?}"))),
    }
}

/// Returns `(status, family or None, nodes)`; status is one of
/// `found`, `exhausted_none`, `proven_infeasible`, `budget_exceeded`.
#[pyfunction]
#[pyo3(signature = (n, mu, t, mode = "exhaustive", seed = 0, max_nodes = None, threads = 1))]
fn search(
    py: Python<'_>,
    n: usize,
    mu: usize,
    t: usize,
    mode: &str,
    seed: u64,
    max_nodes: Option<u64>,
    threads: usize,
) -> PyResult<(String, Option<PyFamily>, u64)> {
    let budget = budget(mode, seed, max_nodes)?;
    let config = SearchConfig {
        threads: threads.max(1),
        ..SearchConfig::default()
    };
    let report = py
        .detach(|| st::search_stable_family(n, mu, t, &budget, &config))
        .map_err(value_err)?;
    let (status, family) = match report.outcome {
        SearchOutcome::Found(f) => ("found", Some(PyFamily { inner: f })),
        SearchOutcome::ExhaustedNone => ("exhausted_none", None),
        SearchOutcome::ProvenInfeasible(_) => ("proven_infeasible", None),
        SearchOutcome::BudgetExceeded => ("budget_exceeded", None),
    };
    Ok((status.to_string(), family, report.nodes))
}

/// Composition from the bundled dataset; with `closed_forms`, the
/// identical, shifted and factorization families are tried first.
/// Returns `(family, provenance)`.
#[pyfunction]
#[pyo3(signature = (n, mu, t, b = "auto", closed_forms = false))]
fn compose(n: usize, mu: usize, t: usize, b: &str, closed_forms: bool) -> PyResult<(PyFamily, String)> {
    let choice: st::BaseChoice = b.parse().map_err(value_err)?;
    let dataset = st::Dataset::shipped().map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let built = if closed_forms {
        st::construct_family(&dataset, n, mu, t, choice)
    } else {
        st::compose_from_dataset(&dataset, n, mu, t, choice)
    }
    .map_err(value_err)?;
    Ok((PyFamily { inner: built.family }, built.provenance.to_string()))
}

fn report_dict<'py>(py: Python<'py>, r: &st::SpectrumReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("mu", r.mu)?;
    d.set_item("proven", r.proven.iter().collect::<Vec<_>>())?;
    d.set_item("exceptions", r.exceptions.iter().collect::<Vec<_>>())?;
    d.set_item("infeasible", r.infeasible.iter().collect::<Vec<_>>())?;
    d.set_item("unknown", r.unknown().iter().collect::<Vec<_>>())?;
    Ok(d)
}

/// Stable sizes established for odd `n >= 33`, `mu` in {3, 4}.
#[pyfunction]
fn theorem_spectrum(py: Python<'_>, n: usize, mu: usize) -> PyResult<Bound<'_, PyDict>> {
    let r = st::theorem_spectrum(n, mu).map_err(value_err)?;
    report_dict(py, &r)
}

/// The same statement in terms of the trade size `k = n - t`.
#[pyfunction]
fn trade_spectrum(py: Python<'_>, n: usize, mu: usize) -> PyResult<Bound<'_, PyDict>> {
    let r = st::trades::trade_spectrum(n, mu).map_err(value_err)?;
    report_dict(py, &r)
}

/// `{t: "found" | "none" | "unknown"}` by search over every `t`.
#[pyfunction]
#[pyo3(signature = (n, mu, max_nodes = None, threads = 1))]
fn spectrum_small(py: Python<'_>, n: usize, mu: usize, max_nodes: Option<u64>, threads: usize) -> PyResult<Bound<'_, PyDict>> {
    let budget = budget("exhaustive", 0, max_nodes)?;
    let config = SearchConfig {
        threads: threads.max(1),
        ..SearchConfig::default()
    };
    let row = py
        .detach(|| st::compute_spectrum_small(n, mu, &budget, &config))
        .map_err(value_err)?;
    let d = PyDict::new(py);
    for (t, e) in &row.entries {
        let s = match e {
            st::search::SpectrumEntry::Found { .. } => "found",
            st::search::SpectrumEntry::None { .. } => "none",
            st::search::SpectrumEntry::Unknown => "unknown",
        };
        d.set_item(*t, s)?;
    }
    Ok(d)
}

/// `(ok, failed claim statements)` for the bundled dataset.
#[pyfunction]
fn verify_appendix() -> PyResult<(bool, Vec<String>)> {
    let dataset = st::Dataset::shipped().map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let report = st::verify_appendix(&dataset);
    Ok((report.is_ok(), report.failures().map(|c| c.statement()).collect()))
}

#[pyfunction]
fn is_transversal(n: usize, cols: Vec<usize>) -> PyResult<bool> {
    st::is_transversal(n, &cols).map_err(value_err)
}

#[pymodule]
#[pyo3(name = "stable_transversals")]
fn stable_transversals_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFamily>()?;
    m.add_class::<PyTrade>()?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(compose, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(trade_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_small, m)?)?;
    m.add_function(wrap_pyfunction!(verify_appendix, m)?)?;
    m.add_function(wrap_pyfunction!(is_transversal, m)?)?;
    Ok(())
}
