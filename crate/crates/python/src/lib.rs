//! Python bindings: machines, their transformations, validity and speed.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use wmatch::alphabet::all_patterns;
use wmatch::serialize::{from_json, to_dot, to_json};
use wmatch::{Algorithm, Alphabet, BruteVerdict, Error, IidModel, Pattern, SearchConfig, Strategy, TableSpec, Validity};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Cap(_) | Error::Numeric(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn iid(model: &str, alphabet: &Alphabet) -> PyResult<IidModel> {
    IidModel::parse(alphabet.clone(), model).map_err(py_err)
}

/// A w-matching machine.
#[pyclass(name = "Machine", module = "wmatch_py")]
#[derive(Clone)]
pub struct PyMachine {
    inner: wmatch::Machine,
}

#[pymethods]
impl PyMachine {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyMachine { inner: from_json(s).map_err(py_err)? })
    }

    fn to_json(&self) -> String {
        to_json(&self.inner)
    }

    fn to_dot(&self) -> String {
        to_dot(&self.inner)
    }

    #[getter]
    fn pattern(&self) -> String {
        self.inner.pattern().to_string()
    }

    #[getter]
    fn alphabet(&self) -> String {
        self.inner.alphabet().to_string()
    }

    /// Number of states, the sink excluded.
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn is_standard(&self) -> bool {
        wmatch::is_standard(&self.inner)
    }

    fn is_redundant(&self) -> bool {
        wmatch::is_redundant(&self.inner)
    }

    /// Runs the machine on a text; returns (occurrences, number of accesses).
    fn run(&self, text: &str) -> PyResult<(Vec<usize>, usize)> {
        let t = self.inner.alphabet().encode(text).map_err(py_err)?;
        let tr = wmatch::run(&self.inner, &t).map_err(py_err)?;
        Ok((tr.occurrences, tr.tac))
    }

    fn expand(&self) -> Self {
        PyMachine { inner: wmatch::expand(&self.inner).machine }
    }

    fn compact(&self) -> Self {
        PyMachine { inner: wmatch::compact(&self.inner) }
    }

    fn standardize(&self) -> Self {
        PyMachine { inner: wmatch::standardize(&self.inner) }
    }

    fn positify(&self) -> PyResult<Self> {
        let profile = wmatch::compute_mnshft(&self.inner);
        Ok(PyMachine { inner: wmatch::positify(&self.inner, &profile).map_err(py_err)? })
    }

    #[pyo3(signature = (model = ""))]
    fn canonicalize(&self, model: &str) -> PyResult<Self> {
        let model = iid(model, self.inner.alphabet())?;
        Ok(PyMachine { inner: wmatch::canonicalize(&self.inner, &model).map_err(py_err)? })
    }

    /// Validity of a standard, non-redundant machine: (valid, reason).
    fn check_validity(&self) -> PyResult<(bool, String)> {
        let v = wmatch::check_validity_standard(&self.inner).map_err(py_err)?;
        Ok((v == Validity::Valid, v.to_string()))
    }

    /// Counterexample text on texts up to `max_len` plus random trials, or None.
    #[pyo3(signature = (max_len = 8, trials = 0, trial_len = 64, seed = 0))]
    fn counterexample(&self, max_len: usize, trials: usize, trial_len: usize, seed: u64) -> PyResult<Option<String>> {
        match wmatch::validate_bruteforce(&self.inner, max_len, trials, trial_len, seed).map_err(py_err)? {
            BruteVerdict::NoCounterexample => Ok(None),
            BruteVerdict::Counterexample(c) => Ok(Some(self.inner.alphabet().decode(&c.text))),
        }
    }

    /// Asymptotic speed under an iid model such as "a=0.25"; empty means uniform.
    #[pyo3(signature = (model = ""))]
    fn speed(&self, model: &str) -> PyResult<f64> {
        let model = iid(model, self.inner.alphabet())?;
        wmatch::asymptotic_speed_iid(&self.inner, &model).map_err(py_err)
    }

    /// Mean and standard error of the speed over random texts.
    #[pyo3(signature = (model = "", length = 100_000, reps = 10, seed = 0))]
    fn empirical_speed(&self, model: &str, length: usize, reps: usize, seed: u64) -> PyResult<(f64, f64)> {
        let model = wmatch::TextModel::Iid(iid(model, self.inner.alphabet())?);
        let s = wmatch::empirical_speed(&self.inner, &model, length, reps, seed).map_err(py_err)?;
        Ok((s.mean, s.std_error))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Machine(pattern={:?}, states={})", self.pattern(), self.inner.len())
    }
}

fn pattern(w: &str, alphabet: &str) -> PyResult<Pattern> {
    Pattern::new(Alphabet::parse(alphabet).map_err(py_err)?, w).map_err(py_err)
}

/// Classic machine: naive, mp, kmp, horspool or quicksearch.
#[pyfunction]
#[pyo3(signature = (algorithm, w, alphabet = "ab"))]
fn build(algorithm: &str, w: &str, alphabet: &str) -> PyResult<PyMachine> {
    let alg: Algorithm = algorithm.parse().map_err(py_err)?;
    Ok(PyMachine { inner: wmatch::build_classic(alg, &pattern(w, alphabet)?) })
}

/// Fastest valid machine of order `k`; returns (machine, speed).
#[pyfunction]
#[pyo3(signature = (w, k, model = "", alphabet = "ab", hill_climb = false, restarts = 50, seed = 0))]
fn optimize(
    w: &str,
    k: usize,
    model: &str,
    alphabet: &str,
    hill_climb: bool,
    restarts: usize,
    seed: u64,
) -> PyResult<(PyMachine, f64)> {
    let w = pattern(w, alphabet)?;
    let model = iid(model, w.alphabet())?;
    let config = SearchConfig {
        strategy: if hill_climb { Strategy::HillClimb } else { Strategy::Exhaustive },
        restarts,
        seed,
        ..SearchConfig::default()
    };
    let o = wmatch::optimize(&w, k, &model, &config).map_err(py_err)?;
    Ok((PyMachine { inner: o.machine }, o.speed))
}

/// Speeds of canonicalized classic machines for every pattern of a length,
/// as a list of (pattern, [speeds], optimal speed or None).
#[pyfunction]
#[pyo3(signature = (length, model = "", alphabet = "ab", optimal = None))]
fn speed_table(length: usize, model: &str, alphabet: &str, optimal: Option<usize>) -> PyResult<Vec<(String, Vec<f64>, Option<f64>)>> {
    let alphabet = Alphabet::parse(alphabet).map_err(py_err)?;
    let spec = TableSpec {
        patterns: all_patterns(&alphabet, length),
        algorithms: Algorithm::ALL.to_vec(),
        model: iid(model, &alphabet)?,
        optimal,
        search: SearchConfig { strategy: Strategy::HillClimb, ..SearchConfig::default() },
    };
    let rows = wmatch::speed_table(&spec).map_err(py_err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.pattern.to_string(), r.cells.iter().map(|c| c.speed).collect(), r.optimal.map(|o| o.speed)))
        .collect())
}

#[pymodule]
fn wmatch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMachine>()?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(speed_table, m)?)?;
    m.add("ALGORITHMS", Algorithm::ALL.iter().map(|a| a.short_name()).collect::<Vec<_>>())?;
    Ok(())
}
