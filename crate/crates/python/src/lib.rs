//! Python bindings. Reports come back as plain dicts (via `json.loads`),
//! matrices as lists of rows.

use hyperspec::linalg::{symmetric_eigenvalues, DenseMatrix};
use hyperspec::sampler::{auto_method, SampleMethod, DEFAULT_SWITCH_SWEEPS};
use hyperspec::spectra::{self, LimitLaw, SpectralDensity};
use hyperspec::{expansion, nbops, walks, Error, SampleConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

fn rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// A (d,k)-regular hypergraph with canonically sorted hyperedges.
#[pyclass(name = "Hypergraph", module = "hyperspec", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyHypergraph(hyperspec::Hypergraph);

#[pymethods]
impl PyHypergraph {
    /// Validates `edges` as a (d,k)-regular hypergraph on `n` vertices.
    #[new]
    fn new(n: usize, edges: Vec<Vec<usize>>, d: usize, k: usize) -> PyResult<Self> {
        hyperspec::build_hypergraph(n, edges, d, k).map(Self).map_err(err)
    }

    /// All `k`-subsets of `n` vertices.
    #[staticmethod]
    fn complete(n: usize, k: usize) -> PyResult<Self> {
        hyperspec::Hypergraph::complete(n, k).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        hyperspec::Hypergraph::from_json(s).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn edges(&self) -> Vec<Vec<usize>> {
        self.0.edges().to_vec()
    }

    fn adjacency_matrix(&self) -> Vec<Vec<f64>> {
        rows(&self.0.adjacency_matrix())
    }

    fn incidence_matrix(&self) -> Vec<Vec<f64>> {
        rows(&self.0.incidence_matrix())
    }

    fn is_connected(&self) -> bool {
        self.0.is_connected()
    }

    fn __repr__(&self) -> String {
        format!("Hypergraph(n={}, d={}, k={})", self.0.n(), self.0.d(), self.0.k())
    }
}

/// Draws a (d,k)-regular hypergraph. `method` is "auto", "rejection" or
/// "switching".
#[pyfunction]
#[pyo3(signature = (n, d, k, seed=0, method="auto"))]
fn sample(n: usize, d: usize, k: usize, seed: u64, method: &str) -> PyResult<PyHypergraph> {
    let method = match method {
        "auto" => auto_method(d, k),
        "rejection" => SampleMethod::Rejection,
        "switching" => SampleMethod::Switching { sweeps: DEFAULT_SWITCH_SWEEPS },
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    let cfg = SampleConfig::new(n, d, k, seed).with_method(method);
    hyperspec::sample_regular_hypergraph(&cfg)
        .map(|(h, _)| PyHypergraph(h))
        .map_err(err)
}

/// Adjacency eigenvalues in decreasing order.
#[pyfunction]
fn eigenvalues(h: &PyHypergraph) -> PyResult<Vec<f64>> {
    Ok(symmetric_eigenvalues(&h.0.adjacency_matrix()).map_err(err)?.values)
}

#[pyfunction]
fn adjacency_gap(py: Python<'_>, h: &PyHypergraph) -> PyResult<Py<PyAny>> {
    to_py(py, &spectra::adjacency_gap(&h.0).map_err(err)?)
}

fn limit_law(law: &str, d: usize, k: usize) -> PyResult<LimitLaw> {
    let alpha = d as f64 / k as f64;
    match law {
        "feng_li" => LimitLaw::feng_li(d, k),
        "alpha" => LimitLaw::alpha(alpha),
        other => return Err(PyValueError::new_err(format!("unknown law {other:?}"))),
    }
    .map_err(err)
}

/// Kolmogorov-Smirnov distance between the spectral distribution of
/// `(A - (k-2)) / sqrt((d-1)(k-1))`, Perron eigenvalue removed, and the
/// limit law `"feng_li"` or `"alpha"` (with alpha = d/k).
#[pyfunction]
#[pyo3(signature = (h, law="feng_li"))]
fn ks_distance(h: &PyHypergraph, law: &str) -> PyResult<f64> {
    let (d, k) = (h.0.d(), h.0.k());
    let q = ((d - 1) * (k - 1)) as f64;
    let law = limit_law(law, d, k)?;
    let spec = symmetric_eigenvalues(&h.0.adjacency_matrix()).map_err(err)?;
    let bulk = spectra::esd_of(&spec, k as f64 - 2.0, q.sqrt()).map_err(err)?.without_largest();
    spectra::ks_distance(&bulk, &law).map_err(err)
}

/// Density of the limit law at `x`.
#[pyfunction]
#[pyo3(signature = (x, d, k, law="feng_li"))]
fn limit_density(x: f64, d: usize, k: usize, law: &str) -> PyResult<f64> {
    Ok(limit_law(law, d, k)?.pdf(x))
}

/// `h`, `r` and `eta` of the local law at size `n`.
#[pyfunction]
fn local_law_params(py: Python<'_>, n: usize, k: usize) -> PyResult<Py<PyAny>> {
    to_py(py, &spectra::local_law_params(n, k).map_err(err)?)
}

#[pyfunction]
fn verify_bmn(h: &PyHypergraph) -> bool {
    nbops::verify_bmn(&h.0)
}

/// Non-backtracking spectrum against its predicted classification.
#[pyfunction]
fn nb_classification(py: Python<'_>, h: &PyHypergraph) -> PyResult<Py<PyAny>> {
    to_py(py, &nbops::classify_nb_spectrum(&h.0).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (h, slack=nbops::DEFAULT_NB_SLACK))]
fn nb_gap(py: Python<'_>, h: &PyHypergraph, slack: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &nbops::nb_gap_check(&h.0, slack).map_err(err)?)
}

/// Counts of non-backtracking walks of length `l` between vertex pairs.
#[pyfunction]
fn nb_walk_counts(h: &PyHypergraph, l: usize) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(&walks::nb_walk_counts(&h.0, l).map_err(err)?.matrix))
}

#[pyfunction]
#[pyo3(signature = (h, l_max=40))]
fn srw_mixing(py: Python<'_>, h: &PyHypergraph, l_max: usize) -> PyResult<Py<PyAny>> {
    to_py(py, &walks::srw_mixing_empirical(&h.0, l_max).map_err(err)?)
}

/// Predicted mixing rate of the non-backtracking walk.
#[pyfunction]
fn nbrw_mixing_rate(h: &PyHypergraph) -> PyResult<f64> {
    let gap = spectra::adjacency_gap(&h.0).map_err(err)?;
    walks::nbrw_mixing_exact(&gap, h.0.d(), h.0.k()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (h, trials=1000, seed=0))]
fn expander_mixing(py: Python<'_>, h: &PyHypergraph, trials: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let gap = spectra::adjacency_gap(&h.0).map_err(err)?;
    to_py(py, &expansion::verify_expander_mixing(&h.0, &gap, trials, seed).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (h, trials=1000, seed=0))]
fn vertex_expansion(py: Python<'_>, h: &PyHypergraph, trials: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let gap = spectra::adjacency_gap(&h.0).map_err(err)?;
    to_py(py, &expansion::verify_vertex_expansion(&h.0, &gap, trials, seed).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "hyperspec")]
fn hyperspec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHypergraph>()?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(adjacency_gap, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance, m)?)?;
    m.add_function(wrap_pyfunction!(limit_density, m)?)?;
    m.add_function(wrap_pyfunction!(local_law_params, m)?)?;
    m.add_function(wrap_pyfunction!(verify_bmn, m)?)?;
    m.add_function(wrap_pyfunction!(nb_classification, m)?)?;
    m.add_function(wrap_pyfunction!(nb_gap, m)?)?;
    m.add_function(wrap_pyfunction!(nb_walk_counts, m)?)?;
    m.add_function(wrap_pyfunction!(srw_mixing, m)?)?;
    m.add_function(wrap_pyfunction!(nbrw_mixing_rate, m)?)?;
    m.add_function(wrap_pyfunction!(expander_mixing, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_expansion, m)?)?;
    Ok(())
}
