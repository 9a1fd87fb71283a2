//! Python bindings: the core ranking types and the operations of the
//! private aggregation pipeline, exposed as the `helnaksort_py` module.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use helnaksort::experiment::{DataSource, ExperimentConfig, Method};
use helnaksort::{aggregation, datagen, privacy, ranking};

fn to_py(err: helnaksort::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// A strict preference order over m alternatives (most preferred first).
#[pyclass(frozen, eq)]
#[derive(PartialEq)]
struct Ranking {
    inner: ranking::Ranking,
}

#[pymethods]
impl Ranking {
    #[new]
    fn new(order: Vec<usize>) -> PyResult<Self> {
        Ok(Ranking {
            inner: ranking::Ranking::new(order).map_err(to_py)?,
        })
    }

    /// The identity ranking [0, 1, ..., m-1].
    #[staticmethod]
    fn identity(m: usize) -> PyResult<Self> {
        Ok(Ranking {
            inner: ranking::Ranking::identity(m).map_err(to_py)?,
        })
    }

    /// Rebuild a ranking from per-alternative positions.
    #[staticmethod]
    fn from_rank_vector(ranks: Vec<usize>) -> PyResult<Self> {
        Ok(Ranking {
            inner: ranking::Ranking::from_rank_vector(&ranks).map_err(to_py)?,
        })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn order(&self) -> Vec<usize> {
        self.inner.order().to_vec()
    }

    /// Position of each alternative: result[i] is the rank of alternative i.
    fn to_rank_vector(&self) -> Vec<usize> {
        self.inner.to_rank_vector()
    }

    fn reversed(&self) -> Ranking {
        Ranking {
            inner: self.inner.reversed(),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.m()
    }

    fn __repr__(&self) -> String {
        format!("Ranking([{}])", self.inner)
    }
}

fn unwrap_profile(profile: Vec<PyRef<'_, Ranking>>) -> Vec<ranking::Ranking> {
    profile.iter().map(|r| r.inner.clone()).collect()
}

/// Pairwise tally: counts[i][j] answers assert alternative i over j.
#[pyclass(frozen)]
struct PairwiseCounts {
    inner: ranking::PairwiseCounts,
}

#[pymethods]
impl PairwiseCounts {
    /// Full-information tally of a profile.
    #[staticmethod]
    fn from_profile(profile: Vec<PyRef<'_, Ranking>>) -> PyResult<Self> {
        Ok(PairwiseCounts {
            inner: ranking::tally(&unwrap_profile(profile)).map_err(to_py)?,
        })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<u64> {
        if i >= self.inner.m() || j >= self.inner.m() {
            return Err(PyValueError::new_err("pair index out of range"));
        }
        Ok(self.inner.get(i, j))
    }

    fn total(&self) -> u64 {
        self.inner.total()
    }

    fn __repr__(&self) -> String {
        format!(
            "PairwiseCounts(m={}, total={})",
            self.inner.m(),
            self.inner.total()
        )
    }
}

/// Noise sizing parameters for the per-answer Gaussian mechanism.
#[pyclass(frozen)]
struct PrivacySpec {
    inner: privacy::PrivacySpec,
}

#[pymethods]
impl PrivacySpec {
    #[new]
    #[pyo3(signature = (epsilon, delta, k=1, sensitivity=1.0))]
    fn new(epsilon: f64, delta: f64, k: usize, sensitivity: f64) -> PyResult<Self> {
        Ok(PrivacySpec {
            inner: privacy::PrivacySpec::new(epsilon, delta, k, sensitivity).map_err(to_py)?,
        })
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k_queries
    }

    /// Per-answer Gaussian noise scale.
    fn sigma(&self) -> f64 {
        privacy::gaussian_sigma(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "PrivacySpec(epsilon={}, delta={}, k={})",
            self.inner.epsilon, self.inner.delta, self.inner.k_queries
        )
    }
}

#[pyfunction]
fn kendall_raw(a: PyRef<'_, Ranking>, b: PyRef<'_, Ranking>) -> PyResult<u64> {
    ranking::kendall_raw(&a.inner, &b.inner).map_err(to_py)
}

#[pyfunction]
fn kendall_normalized(a: PyRef<'_, Ranking>, b: PyRef<'_, Ranking>) -> PyResult<f64> {
    ranking::kendall_normalized(&a.inner, &b.inner).map_err(to_py)
}

#[pyfunction]
fn average_kendall(r: PyRef<'_, Ranking>, profile: Vec<PyRef<'_, Ranking>>) -> PyResult<f64> {
    ranking::average_kendall(&r.inner, &unwrap_profile(profile)).map_err(to_py)
}

/// Sample a profile from the Mallows model (identity reference).
#[pyfunction]
#[pyo3(signature = (m, n, theta, seed=42))]
fn sample_mallows(m: usize, n: usize, theta: f64, seed: u64) -> PyResult<Vec<Ranking>> {
    let cfg = datagen::MallowsConfig::new(m, n, theta, seed).map_err(to_py)?;
    Ok(datagen::sample_mallows(&cfg)
        .map_err(to_py)?
        .into_iter()
        .map(|inner| Ranking { inner })
        .collect())
}

/// Hierarchical aggregation with the net-win tie rule.
#[pyfunction]
fn ra_aggregate(counts: PyRef<'_, PairwiseCounts>) -> Ranking {
    Ranking {
        inner: aggregation::ra_aggregate(&counts.inner),
    }
}

/// Hierarchical aggregation with the Borda tie rule.
#[pyfunction]
fn hra_aggregate(counts: PyRef<'_, PairwiseCounts>) -> Ranking {
    Ranking {
        inner: aggregation::hra_aggregate(&counts.inner),
    }
}

/// Rank by descending total pairwise wins.
#[pyfunction]
fn borda_aggregate(counts: PyRef<'_, PairwiseCounts>) -> Ranking {
    Ranking {
        inner: aggregation::borda_aggregate(&counts.inner),
    }
}

/// Exhaustive Kemeny search (m <= 8): the optimal ranking and its mean
/// normalized Kendall distance to the profile.
#[pyfunction]
fn kemeny_optimal(profile: Vec<PyRef<'_, Ranking>>) -> PyResult<(Ranking, f64)> {
    let (ranking, value) =
        aggregation::kemeny_optimal(&unwrap_profile(profile)).map_err(to_py)?;
    Ok((Ranking { inner: ranking }, value))
}

/// Probability that the bit randomizer flips its input at this noise scale.
#[pyfunction]
fn flip_probability(sigma: f64) -> f64 {
    privacy::flip_probability(sigma)
}

/// Shuffle-amplification accounting as a dict with keys sigma,
/// epsilon_local, epsilon_central, n_prime, applicable, reason.
#[pyfunction]
#[pyo3(signature = (epsilon, delta, n, m, k=1))]
fn amplification(
    py: Python<'_>,
    epsilon: f64,
    delta: f64,
    n: usize,
    m: usize,
    k: usize,
) -> PyResult<Py<pyo3::types::PyDict>> {
    use pyo3::types::PyDict;
    let spec = privacy::PrivacySpec::for_bits(epsilon, delta, k).map_err(to_py)?;
    let report = privacy::amplification_report(&spec, n, m).map_err(to_py)?;
    let dict = PyDict::new(py);
    dict.set_item("sigma", report.sigma)?;
    dict.set_item("epsilon_local", report.epsilon_local)?;
    dict.set_item("epsilon_central", report.epsilon_central)?;
    dict.set_item("n_prime", report.n_prime)?;
    dict.set_item("applicable", report.applicable)?;
    dict.set_item("reason", report.reason.map(|r| r.to_string()))?;
    Ok(dict.into())
}

/// Local budget whose shuffled central guarantee equals the target (K=1).
#[pyfunction]
fn local_epsilon_for_central(target: f64, delta: f64, n: usize, m: usize) -> PyResult<f64> {
    Ok(privacy::local_epsilon_for_central(target, delta, n, m)
        .map_err(to_py)?
        .epsilon)
}

/// Run one experiment cell on Mallows data and return a dict with the mean,
/// std, ci95, and per-repetition distances.
#[pyfunction]
#[pyo3(signature = (method, m, n, theta, epsilon=1.0, delta=1e-4, k=1, reps=50, seed=42, epsilon_scope=None))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    py: Python<'_>,
    method: &str,
    m: usize,
    n: usize,
    theta: f64,
    epsilon: f64,
    delta: f64,
    k: usize,
    reps: usize,
    seed: u64,
    epsilon_scope: Option<&str>,
) -> PyResult<Py<pyo3::types::PyDict>> {
    use pyo3::types::PyDict;
    let mut cfg = ExperimentConfig::new(
        Method::parse(method).map_err(to_py)?,
        DataSource::Mallows { m, n, theta },
    );
    cfg.epsilon = epsilon;
    cfg.delta = delta;
    cfg.k_queries = k;
    cfg.repetitions = reps;
    cfg.master_seed = seed;
    cfg.epsilon_is_central = match epsilon_scope {
        None => None,
        Some("central") => Some(true),
        Some("local") => Some(false),
        Some(other) => {
            return Err(PyValueError::new_err(format!(
                "epsilon_scope must be central or local, not `{other}`"
            )))
        }
    };
    let result = helnaksort::experiment::run_config(&cfg).map_err(to_py)?;

    let dict = PyDict::new(py);
    dict.set_item("method", method)?;
    dict.set_item("m", result.m)?;
    dict.set_item("n", result.n)?;
    dict.set_item("mean", result.mean)?;
    dict.set_item("std", result.std)?;
    dict.set_item("ci95", result.ci95)?;
    dict.set_item("distances", result.distances)?;
    Ok(dict.into())
}

#[pymodule]
fn helnaksort_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Ranking>()?;
    m.add_class::<PairwiseCounts>()?;
    m.add_class::<PrivacySpec>()?;
    m.add_function(wrap_pyfunction!(kendall_raw, m)?)?;
    m.add_function(wrap_pyfunction!(kendall_normalized, m)?)?;
    m.add_function(wrap_pyfunction!(average_kendall, m)?)?;
    m.add_function(wrap_pyfunction!(sample_mallows, m)?)?;
    m.add_function(wrap_pyfunction!(ra_aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(hra_aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(borda_aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(kemeny_optimal, m)?)?;
    m.add_function(wrap_pyfunction!(flip_probability, m)?)?;
    m.add_function(wrap_pyfunction!(amplification, m)?)?;
    m.add_function(wrap_pyfunction!(local_epsilon_for_central, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
