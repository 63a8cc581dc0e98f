//! Python bindings. Indices are 0-based throughout; structured results
//! come back as plain dicts built from the same documents the CLI and
//! HTTP service emit.

#![allow(clippy::needless_range_loop)]

use pcm_core::elicitation::{SessionDocument, SessionOptions, SessionStatus};
use pcm_core::inconsistency::MissingPatternPolicy;
use pcm_core::structures;
use pcm_core::weighting::Bounds;
use pcm_core::{
    AnalysisOptions, CompletionMethod, DocumentFormat, Gauge, IncompletePcm, Judgment,
    QuestionPolicy, RiQueryPolicy, Scale, WeightMethod,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(
    pypcm,
    PcmError,
    PyValueError,
    "Raised for every domain error; the message starts with its kind."
);

fn err(e: pcm_core::PcmError) -> PyErr {
    let msg = e.to_string();
    let kind = e.kind();
    if msg.starts_with(kind) {
        PcmError::new_err(msg)
    } else {
        PcmError::new_err(format!("{kind}: {msg}"))
    }
}

fn bad(msg: impl Into<String>) -> PyErr {
    PyValueError::new_err(msg.into())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| bad(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_enum<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(bad)
}

fn scale(s: &str) -> PyResult<Scale> {
    match s {
        "saaty" => Ok(Scale::Saaty),
        "free" => Ok(Scale::Free),
        other => Err(bad(format!("unknown scale {other:?}"))),
    }
}

fn ri_policy(name: &str, samples: usize, seed: u64) -> PyResult<RiQueryPolicy> {
    match name {
        "table" => Ok(RiQueryPolicy::TableOnly),
        "approx" | "table-then-approx" => Ok(RiQueryPolicy::TableThenApprox),
        "simulate" => Ok(RiQueryPolicy::SimulateIfMissing { samples, seed }),
        other => Err(bad(format!("unknown random index policy {other:?}"))),
    }
}

/// Accepts an int, a float, or a token such as `"1/3"`.
fn judgment(value: &Bound<'_, PyAny>) -> PyResult<Judgment> {
    if let Ok(s) = value.extract::<String>() {
        return Judgment::parse(&s).map_err(bad);
    }
    if !value.is_instance_of::<pyo3::types::PyFloat>() {
        if let Ok(p) = value.extract::<u64>() {
            return Ok(if p == 0 {
                Judgment::real(0.0)
            } else {
                Judgment::fraction(p, 1)
            });
        }
    }
    Ok(Judgment::real(value.extract::<f64>()?))
}

/// An incomplete pairwise comparison matrix.
#[pyclass(name = "Pcm", module = "pypcm", from_py_object)]
#[derive(Clone)]
struct PyPcm {
    inner: IncompletePcm,
}

impl PyPcm {
    fn check(&self, i: usize, j: usize) -> PyResult<()> {
        let n = self.inner.n();
        if i >= n || j >= n {
            return Err(PyIndexError::new_err(format!(
                "({i}, {j}) outside a {n}x{n} matrix"
            )));
        }
        Ok(())
    }
}

#[pymethods]
impl PyPcm {
    /// Empty matrix with only the unit diagonal known.
    #[new]
    #[pyo3(signature = (n, scale = "free"))]
    fn new(n: usize, scale: &str) -> PyResult<Self> {
        let inner = IncompletePcm::new(n, self::scale(scale)?).map_err(err)?;
        Ok(Self { inner })
    }

    /// Parses the CSV or JSON matrix format (auto-detected).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: pcm_core::parse_pcm(text).map_err(err)?,
        })
    }

    /// Rows of values where `None` marks a missing entry.
    #[staticmethod]
    fn from_rows(rows: Vec<Vec<Option<Bound<'_, PyAny>>>>) -> PyResult<Self> {
        let n = rows.len();
        let mut inner = IncompletePcm::new(n, Scale::Free).map_err(err)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(bad(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
        }
        let mut cells = vec![vec![None; n]; n];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if let Some(v) = v {
                    if !v.is_none()
                        && v.extract::<String>()
                            .map(|s| s.trim() != "*")
                            .unwrap_or(true)
                    {
                        cells[i][j] = Some(judgment(v)?);
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                match (cells[i][j], cells[j][i]) {
                    (Some(a), Some(b)) if ((a.value() * b.value()) - 1.0).abs() > 1e-9 => {
                        return Err(err(pcm_core::PcmError::ReciprocityViolation {
                            i: i + 1,
                            j: j + 1,
                        }));
                    }
                    (Some(a), _) => inner.set(i, j, a).map_err(err)?,
                    (None, Some(b)) => inner.set(j, i, b).map_err(err)?,
                    (None, None) => {}
                }
            }
        }
        Ok(Self { inner })
    }

    /// Consistent matrix `a_ij = w_i / w_j`.
    #[staticmethod]
    fn from_weights(weights: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: IncompletePcm::from_weights(&weights).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn missing_count(&self) -> usize {
        self.inner.missing_count()
    }

    fn is_complete(&self) -> bool {
        self.inner.is_complete()
    }

    fn missing_pairs(&self) -> Vec<(usize, usize)> {
        self.inner.missing_pairs()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<Option<f64>> {
        self.check(i, j)?;
        Ok(self.inner.get(i, j))
    }

    /// Sets `a_ij` and its reciprocal.
    fn set(&mut self, i: usize, j: usize, value: &Bound<'_, PyAny>) -> PyResult<()> {
        self.check(i, j)?;
        let v = judgment(value)?;
        self.inner.set(i, j, v).map_err(err)
    }

    fn clear(&mut self, i: usize, j: usize) -> PyResult<()> {
        self.check(i, j)?;
        self.inner.clear(i, j).map_err(err)
    }

    fn to_list(&self) -> Vec<Vec<Option<f64>>> {
        let n = self.inner.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.inner.get(i, j)).collect())
            .collect()
    }

    fn to_csv(&self) -> String {
        pcm_core::serialize_pcm(&self.inner, DocumentFormat::Csv)
    }

    fn to_json(&self) -> String {
        pcm_core::serialize_pcm(&self.inner, DocumentFormat::Structured)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Pcm(n={}, missing={})",
            self.inner.n(),
            self.inner.missing_count()
        )
    }

    fn __str__(&self) -> String {
        self.to_csv()
    }
}

#[pyfunction]
fn parse(text: &str) -> PyResult<PyPcm> {
    PyPcm::parse(text)
}

/// Priority vector of the known entries.
#[pyfunction]
#[pyo3(signature = (pcm, method = "llsm", gauge = "sum-one"))]
fn weights(pcm: &PyPcm, method: &str, gauge: &str) -> PyResult<Vec<f64>> {
    let method: WeightMethod = parse_enum(method)?;
    let gauge: Gauge = parse_enum(gauge)?;
    let w = method.weigh(&pcm.inner).map_err(err)?;
    Ok(w.regauge(gauge).weights().to_vec())
}

/// Fills the missing entries. Returns the completed matrix and the
/// completion document (filled values, diagnostics and stages).
#[pyfunction]
#[pyo3(signature = (pcm, method = "em", bounds = None))]
fn complete<'py>(
    py: Python<'py>,
    pcm: &PyPcm,
    method: &str,
    bounds: Option<(f64, f64)>,
) -> PyResult<(PyPcm, Bound<'py, PyAny>)> {
    let method: CompletionMethod = parse_enum(method)?;
    let bounds = bounds
        .map(|(lo, hi)| Bounds::new(lo, hi))
        .transpose()
        .map_err(err)?;
    let result = py
        .detach(|| method.complete(&pcm.inner, bounds))
        .map_err(err)?;
    let doc = to_py(py, &result.to_document())?;
    Ok((
        PyPcm {
            inner: result.matrix,
        },
        doc,
    ))
}

/// Generalized consistency ratio of the eigenvalue-optimal completion.
#[pyfunction]
#[pyo3(signature = (pcm, policy = "approx", bounded = true, samples = 10_000, seed = 0))]
fn cr<'py>(
    py: Python<'py>,
    pcm: &PyPcm,
    policy: &str,
    bounded: bool,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let policy = ri_policy(policy, samples, seed)?;
    let report = py
        .detach(|| pcm_core::cr_incomplete(&pcm.inner, policy, bounded))
        .map_err(err)?;
    to_py(py, &report)
}

/// Random index for size `n` with `m` missing pairs: `(value, source)`.
#[pyfunction]
#[pyo3(signature = (n, m = 0, policy = "approx", samples = 10_000, seed = 0))]
fn ri(
    py: Python<'_>,
    n: usize,
    m: usize,
    policy: &str,
    samples: usize,
    seed: u64,
) -> PyResult<(f64, String)> {
    let policy = ri_policy(policy, samples, seed)?;
    let (v, src) = py
        .detach(|| pcm_core::ri_lookup(n, m, policy))
        .map_err(err)?;
    Ok((v, src.to_string()))
}

#[pyfunction]
fn ri_approx(n: usize, m: usize) -> PyResult<f64> {
    pcm_core::ri_approx(n, m).map_err(err)
}

/// Monte Carlo estimate `(mean, stdev)` of the random index.
#[pyfunction]
#[pyo3(signature = (n, m, samples = 10_000, seed = 0))]
fn simulate_ri(
    py: Python<'_>,
    n: usize,
    m: usize,
    samples: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    py.detach(|| {
        pcm_core::simulate_ri(n, m, samples, seed, &MissingPatternPolicy::UniformConnected)
    })
    .map_err(err)
}

/// Graph, triads, consistency and weights in one report.
#[pyfunction]
#[pyo3(signature = (pcm, method = "llsm", bounded = true, policy = "approx"))]
fn analyze<'py>(
    py: Python<'py>,
    pcm: &PyPcm,
    method: &str,
    bounded: bool,
    policy: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = AnalysisOptions {
        method: parse_enum(method)?,
        bounded,
        ri_policy: ri_policy(policy, 10_000, 0)?,
    };
    let a = py
        .detach(|| pcm_core::analyze(&pcm.inner, &opts))
        .map_err(err)?;
    to_py(py, &a)
}

#[pyfunction]
fn triads<'py>(py: Python<'py>, pcm: &PyPcm) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &pcm_core::triad_profile(&pcm.inner).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (pcm, method = "llsm"))]
fn ordinal_violations<'py>(
    py: Python<'py>,
    pcm: &PyPcm,
    method: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let method: WeightMethod = parse_enum(method)?;
    to_py(
        py,
        &structures::ordinal_violations_for(&pcm.inner, method).map_err(err)?,
    )
}

/// Best-worst matrix from the best row and the column towards the worst.
#[pyfunction]
fn bwm_matrix(n: usize, best: Vec<f64>, worst: Vec<f64>) -> PyResult<PyPcm> {
    Ok(PyPcm {
        inner: structures::bwm_matrix(n, &best, &worst).map_err(err)?,
    })
}

#[pyfunction]
fn bwm_check<'py>(py: Python<'py>, pcm: &PyPcm) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &structures::bwm_guarantee(&pcm.inner).map_err(err)?)
}

/// Sequential elicitation with a consistency ratio after every answer.
#[pyclass(name = "Session", module = "pypcm")]
struct PySession {
    inner: pcm_core::Session,
}

#[pymethods]
impl PySession {
    #[new]
    #[pyo3(signature = (n, labels = None, policy = "balanced", scale = "free", bounded = true))]
    fn new(
        n: usize,
        labels: Option<Vec<String>>,
        policy: &str,
        scale: &str,
        bounded: bool,
    ) -> PyResult<Self> {
        let opts = SessionOptions {
            labels: labels.unwrap_or_default(),
            policy: policy.parse::<QuestionPolicy>().map_err(err)?,
            scale: self::scale(scale)?,
            bounded,
        };
        Ok(Self {
            inner: pcm_core::Session::create(n, opts).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc: SessionDocument = serde_json::from_str(text)
            .map_err(|e| err(pcm_core::PcmError::Parse(e.to_string())))?;
        Ok(Self {
            inner: pcm_core::Session::from_document(&doc).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_document()).map_err(|e| bad(e.to_string()))
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id().to_owned()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn status(&self) -> &'static str {
        match self.inner.status() {
            SessionStatus::Active => "active",
            SessionStatus::Completed => "completed",
            SessionStatus::Abandoned => "abandoned",
        }
    }

    #[getter]
    fn order(&self) -> Vec<(usize, usize)> {
        self.inner.order().to_vec()
    }

    #[getter]
    fn matrix(&self) -> PyPcm {
        PyPcm {
            inner: self.inner.matrix().clone(),
        }
    }

    fn next_pair(&self) -> Option<(usize, usize)> {
        self.inner.next_pair()
    }

    /// Records `a_ij`. Returns the consistency record, or `None` while the
    /// comparison graph is still disconnected.
    fn submit<'py>(
        &mut self,
        py: Python<'py>,
        i: usize,
        j: usize,
        value: &Bound<'py, PyAny>,
    ) -> PyResult<Option<Bound<'py, PyAny>>> {
        let v = judgment(value)?;
        match self.inner.submit((i, j), v).map_err(err)? {
            Some(r) => Ok(Some(to_py(py, r)?)),
            None => Ok(None),
        }
    }

    fn abandon(&mut self) -> PyResult<()> {
        self.inner.abandon().map_err(err)
    }

    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.report())
    }

    fn __repr__(&self) -> String {
        format!(
            "Session(id={:?}, n={}, answered={}/{}, status={})",
            self.inner.id(),
            self.inner.n(),
            self.inner.answers().len(),
            self.inner.total_questions(),
            self.status()
        )
    }
}

#[pymodule]
fn pypcm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PcmError", m.py().get_type::<PcmError>())?;
    m.add_class::<PyPcm>()?;
    m.add_class::<PySession>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(weights, m)?)?;
    m.add_function(wrap_pyfunction!(complete, m)?)?;
    m.add_function(wrap_pyfunction!(cr, m)?)?;
    m.add_function(wrap_pyfunction!(ri, m)?)?;
    m.add_function(wrap_pyfunction!(ri_approx, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_ri, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(triads, m)?)?;
    m.add_function(wrap_pyfunction!(ordinal_violations, m)?)?;
    m.add_function(wrap_pyfunction!(bwm_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(bwm_check, m)?)?;
    Ok(())
}
