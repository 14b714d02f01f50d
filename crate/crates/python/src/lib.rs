//! Python bindings: the main types and operations of the wcperiod crate.
//!
//! Build as a cdylib and import as `wcperiod_py`; see python/smoke_test.py
//! for a driving example.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wcperiod::engine::onepass::check_promise;
use wcperiod::engine::report::PeriodReport;
use wcperiod::oracle;
use wcperiod::symbols::WildcardString;
use wcperiod::{distance, OnePassEngine, SubroutineKind, TwoPassEngine};

fn to_py_err(e: wcperiod::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_marker(marker: &str) -> PyResult<u8> {
    let bytes = marker.as_bytes();
    if bytes.len() != 1 {
        return Err(PyValueError::new_err("marker must be a single byte"));
    }
    Ok(bytes[0])
}

fn parse_subroutine(name: &str) -> PyResult<SubroutineKind> {
    name.parse().map_err(to_py_err)
}

fn report_dict(py: Python<'_>, report: &PeriodReport) -> PyResult<Py<PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", report.n)?;
    d.set_item("k_declared", report.k_declared)?;
    d.set_item("k_found", report.k_found)?;
    d.set_item("periods", report.periods.clone())?;
    d.set_item("smallest_period", report.smallest_period)?;
    d.set_item("boundary_period", report.boundary_period)?;
    d.set_item("promise_violations", report.promise_violations.clone())?;
    let stats = PyDict::new(py);
    stats.set_item("fingerprints_stored", report.stats.fingerprints_stored)?;
    stats.set_item("assignment_entries", report.stats.assignment_entries)?;
    stats.set_item("buckets_nonempty", report.stats.buckets_nonempty)?;
    stats.set_item("kmismatch_space_words", report.stats.kmismatch_space_words)?;
    d.set_item("stats", stats)?;
    Ok(d.into())
}

/// A parsed symbol stream with wildcard positions.
#[pyclass(name = "WildcardText")]
struct PyWildcardText {
    inner: WildcardString,
}

#[pymethods]
impl PyWildcardText {
    #[new]
    #[pyo3(signature = (text, marker = "?"))]
    fn new(text: &str, marker: &str) -> PyResult<Self> {
        let inner =
            WildcardString::parse(text.as_bytes(), parse_marker(marker)?).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn wildcards(&self) -> Vec<usize> {
        self.inner.wildcard_positions().to_vec()
    }

    #[getter]
    fn wildcard_count(&self) -> usize {
        self.inner.wildcard_count()
    }

    #[getter]
    fn alphabet(&self) -> Vec<String> {
        self.inner
            .alphabet()
            .iter()
            .map(|&b| (b as char).to_string())
            .collect()
    }

    /// True when no wildcard sits in the last p symbols.
    fn promise_holds(&self, p: usize) -> PyResult<bool> {
        if p < 1 || p >= self.inner.n() {
            return Err(PyValueError::new_err(format!("p = {p} outside [1, n-1]")));
        }
        Ok(check_promise(&self.inner, p))
    }

    fn __str__(&self) -> String {
        String::from_utf8_lossy(&self.inner.to_bytes()).into_owned()
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!(
            "WildcardText({:?}, wildcards={:?})",
            self.__str__(),
            self.wildcards()
        )
    }
}

/// Every wildcard-period of `text`, via the two-pass streaming engine.
#[pyfunction]
#[pyo3(signature = (text, k, subroutine = "reference", seed = wcperiod::DEFAULT_SEED, marker = "?"))]
fn find_periods(
    py: Python<'_>,
    text: &str,
    k: usize,
    subroutine: &str,
    seed: u64,
    marker: &str,
) -> PyResult<Py<PyDict>> {
    let s = WildcardString::parse(text.as_bytes(), parse_marker(marker)?).map_err(to_py_err)?;
    s.ensure_wildcard_bound(k).map_err(to_py_err)?;
    let report = if s.n() == 1 {
        PeriodReport::new(1, k, s.wildcard_count(), Vec::new())
    } else {
        TwoPassEngine::new(k, parse_subroutine(subroutine)?, seed)
            .run(&s)
            .map_err(to_py_err)?
    };
    report_dict(py, &report)
}

/// Wildcard-periods up to n/2 from a single scan, under the tail promise.
#[pyfunction]
#[pyo3(signature = (text, k, subroutine = "reference", seed = wcperiod::DEFAULT_SEED, marker = "?"))]
fn find_periods_onepass(
    py: Python<'_>,
    text: &str,
    k: usize,
    subroutine: &str,
    seed: u64,
    marker: &str,
) -> PyResult<Py<PyDict>> {
    let s = WildcardString::parse(text.as_bytes(), parse_marker(marker)?).map_err(to_py_err)?;
    s.ensure_wildcard_bound(k).map_err(to_py_err)?;
    let report = OnePassEngine::new(k, parse_subroutine(subroutine)?, seed)
        .run(s.n(), s.symbols().iter().copied())
        .map_err(to_py_err)?;
    report_dict(py, &report)
}

/// Brute-force ground-truth period set.
#[pyfunction]
#[pyo3(signature = (text, marker = "?"))]
fn oracle_periods(text: &str, marker: &str) -> PyResult<Vec<usize>> {
    let s = WildcardString::parse(text.as_bytes(), parse_marker(marker)?).map_err(to_py_err)?;
    Ok(oracle::oracle_all_periods(&s))
}

/// Exact distance to p-periodicity.
#[pyfunction]
#[pyo3(signature = (text, p, marker = "?"))]
fn delta_exact(text: &str, p: usize, marker: &str) -> PyResult<u64> {
    let s = WildcardString::parse(text.as_bytes(), parse_marker(marker)?).map_err(to_py_err)?;
    distance::delta_exact(&s, p).map_err(to_py_err)
}

/// Deterministic (1+eps) streaming estimate of the distance.
#[pyfunction]
#[pyo3(signature = (text, p, eps, marker = "?"))]
fn delta_estimate_hh(text: &str, p: usize, eps: f64, marker: &str) -> PyResult<u64> {
    let s = WildcardString::parse(text.as_bytes(), parse_marker(marker)?).map_err(to_py_err)?;
    distance::delta_hh(s.symbols().iter().copied(), s.n(), p, eps).map_err(to_py_err)
}

/// Randomized distinct-count streaming estimate of the distance.
#[pyfunction]
#[pyo3(signature = (text, p, eps, delta, seed = wcperiod::DEFAULT_SEED, marker = "?"))]
fn delta_estimate_de(
    text: &str,
    p: usize,
    eps: f64,
    delta: f64,
    seed: u64,
    marker: &str,
) -> PyResult<u64> {
    let s = WildcardString::parse(text.as_bytes(), parse_marker(marker)?).map_err(to_py_err)?;
    distance::delta_de(s.symbols().iter().copied(), s.n(), p, eps, delta, seed).map_err(to_py_err)
}

/// Adversarial fixture stream: y'.x.x.x with the head's first k/2
/// mismatches wildcarded. gap = k/2 gives period n/4; gap = k/2+1 breaks it.
#[pyfunction]
#[pyo3(signature = (n, k, gap, seed = wcperiod::DEFAULT_SEED))]
fn hard_instance(n: usize, k: usize, gap: usize, seed: u64) -> PyResult<String> {
    let instance = oracle::gen_hard_instance(n, k, gap, seed).map_err(to_py_err)?;
    Ok(String::from_utf8_lossy(&instance.stream.to_bytes()).into_owned())
}

#[pymodule]
fn wcperiod_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWildcardText>()?;
    m.add_function(wrap_pyfunction!(find_periods, m)?)?;
    m.add_function(wrap_pyfunction!(find_periods_onepass, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_periods, m)?)?;
    m.add_function(wrap_pyfunction!(delta_exact, m)?)?;
    m.add_function(wrap_pyfunction!(delta_estimate_hh, m)?)?;
    m.add_function(wrap_pyfunction!(delta_estimate_de, m)?)?;
    m.add_function(wrap_pyfunction!(hard_instance, m)?)?;
    m.add("DEFAULT_SEED", wcperiod::DEFAULT_SEED)?;
    Ok(())
}
