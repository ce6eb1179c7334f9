use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use anneal_svm::annealer::{self, AnnealSchedule, SolveResult};
use anneal_svm::datagen::{self, LabeledPoint, Label, ProblemKind};
use anneal_svm::harness::{self, SweepGrid};
use anneal_svm::kernels::KernelSpec;
use anneal_svm::qubo::{self, EncodingSpec};
use anneal_svm::svm::{self, Classifier, SmoParams};
use anneal_svm::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Parse { .. } | Error::SizeLimit { .. } => PyValueError::new_err(e.to_string()),
        Error::Io { .. } | Error::Json { .. } => PyIOError::new_err(e.to_string()),
        Error::Convergence { .. } => PyRuntimeError::new_err(e.to_string()),
    }
}

fn problem(name: &str) -> PyResult<ProblemKind> {
    name.parse().map_err(to_py)
}

fn schedule(sweeps: usize, restarts: usize, seed: u64, t_start: Option<f64>, t_end: f64) -> AnnealSchedule {
    AnnealSchedule {
        t_start,
        t_end,
        sweeps,
        restarts,
        seed,
    }
}

/// Labeled 2-D points.
#[pyclass(name = "Dataset", module = "anneal_svm")]
struct PyDataset {
    inner: datagen::Dataset,
}

#[pymethods]
impl PyDataset {
    #[new]
    fn new(points: Vec<(f64, f64, i8)>) -> PyResult<Self> {
        let points = points
            .into_iter()
            .map(|(x1, x2, t)| {
                let label = Label::try_from(t).map_err(PyValueError::new_err)?;
                Ok(LabeledPoint::new(x1, x2, label))
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyDataset {
            inner: datagen::Dataset::from_points(points),
        })
    }

    /// Sample `n` points of problem `linear`, `nonlinear1` or `nonlinear2`.
    #[staticmethod]
    #[pyo3(signature = (problem_name, n, seed=0))]
    fn generate(problem_name: &str, n: usize, seed: u64) -> PyResult<Self> {
        let inner = datagen::generate_dataset(problem(problem_name)?, n, seed).map_err(to_py)?;
        Ok(PyDataset { inner })
    }

    fn with_noise(&self, rate: f64, seed: u64) -> PyResult<Self> {
        let inner = datagen::apply_label_noise(&self.inner, rate, seed).map_err(to_py)?;
        Ok(PyDataset { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyDataset {
            inner: datagen::load_dataset(path).map_err(to_py)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        datagen::save_dataset(&self.inner, path).map_err(to_py)
    }

    fn points(&self) -> Vec<(f64, f64, i8)> {
        self.inner
            .points
            .iter()
            .map(|p| (p.x1, p.x2, p.label.as_int()))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Quadratic model over binary variables.
#[pyclass(name = "QuboProblem", module = "anneal_svm")]
struct PyQubo {
    inner: qubo::QuboProblem,
}

#[pymethods]
impl PyQubo {
    /// The SVM Hamiltonian for a training set with an RBF kernel.
    #[staticmethod]
    fn svm(train: &PyDataset, gamma: f64, base: u32, bits: u32, xi: f64) -> PyResult<Self> {
        let enc = EncodingSpec::new(base, bits).map_err(to_py)?;
        let inner = qubo::build_svm_qubo(&train.inner, KernelSpec::rbf(gamma), enc, xi).map_err(to_py)?;
        Ok(PyQubo { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyQubo {
            inner: qubo::load_qubo(path).map_err(to_py)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        qubo::save_qubo(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    fn energy(&self, bits: Vec<bool>) -> PyResult<f64> {
        self.inner.energy(&bits).map_err(to_py)
    }

    /// `(fields, couplings, offset)` under `a = (1 + s) / 2`.
    fn to_ising(&self) -> (Vec<(usize, f64)>, Vec<((usize, usize), f64)>, f64) {
        let ising = qubo::qubo_to_ising(&self.inner);
        (ising.fields().collect(), ising.couplings().collect(), ising.offset)
    }

    #[pyo3(signature = (sweeps=2000, restarts=10, seed=0, t_start=None, t_end=1e-3))]
    fn anneal(&self, sweeps: usize, restarts: usize, seed: u64, t_start: Option<f64>, t_end: f64) -> PyResult<(Vec<bool>, f64)> {
        let res = annealer::simulated_anneal(&self.inner, &schedule(sweeps, restarts, seed, t_start, t_end)).map_err(to_py)?;
        Ok(unpack(res))
    }

    fn brute_force(&self) -> PyResult<(Vec<bool>, f64)> {
        Ok(unpack(annealer::brute_force_solve(&self.inner).map_err(to_py)?))
    }
}

fn unpack(res: SolveResult) -> (Vec<bool>, f64) {
    (res.bits, res.energy)
}

#[pyfunction]
fn decode_alphas(bits: Vec<bool>, base: u32, bits_per_alpha: u32, n_points: usize) -> PyResult<Vec<f64>> {
    let enc = EncodingSpec::new(base, bits_per_alpha).map_err(to_py)?;
    qubo::decode_alphas(&bits, enc, n_points).map_err(to_py)
}

#[pyclass(name = "ConfusionMatrix", module = "anneal_svm", get_all)]
struct PyConfusion {
    true_pos: usize,
    false_pos: usize,
    true_neg: usize,
    false_neg: usize,
    accuracy: f64,
}

impl From<svm::ConfusionMatrix> for PyConfusion {
    fn from(cm: svm::ConfusionMatrix) -> Self {
        PyConfusion {
            true_pos: cm.true_pos,
            false_pos: cm.false_pos,
            true_neg: cm.true_neg,
            false_neg: cm.false_neg,
            accuracy: cm.accuracy().unwrap_or(0.0),
        }
    }
}

#[pymethods]
impl PyConfusion {
    fn __repr__(&self) -> String {
        format!(
            "ConfusionMatrix(tp={}, fp={}, tn={}, fn={}, accuracy={})",
            self.true_pos, self.false_pos, self.true_neg, self.false_neg, self.accuracy
        )
    }
}

/// A trained classifier, either QUBO-based or classical.
#[pyclass(name = "Model", module = "anneal_svm")]
struct PyModel {
    inner: svm::SvmModel,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    #[pyo3(signature = (train, gamma, base, bits, xi, sweeps=2000, restarts=10, seed=0))]
    #[allow(clippy::too_many_arguments)]
    fn fit_qubo(train: &PyDataset, gamma: f64, base: u32, bits: u32, xi: f64, sweeps: usize, restarts: usize, seed: u64) -> PyResult<Self> {
        let enc = EncodingSpec::new(base, bits).map_err(to_py)?;
        let sched = schedule(sweeps, restarts, seed, None, AnnealSchedule::default().t_end);
        let model = svm::fit_qubo_svm(&train.inner, KernelSpec::rbf(gamma), enc, xi, &sched).map_err(to_py)?;
        Ok(PyModel {
            inner: svm::SvmModel::Qubo(model),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (train, gamma=1.0, c=1.0, tol=1e-3, max_passes=10))]
    fn fit_classical(train: &PyDataset, gamma: f64, c: f64, tol: f64, max_passes: usize) -> PyResult<Self> {
        let params = SmoParams {
            c,
            tol,
            max_passes,
            ..Default::default()
        };
        let model = svm::fit_classical_svm(&train.inner, KernelSpec::rbf(gamma), &params).map_err(to_py)?;
        Ok(PyModel {
            inner: svm::SvmModel::Classical(model),
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: svm::load_model(path).map_err(to_py)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        svm::save_model(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn alphas(&self) -> Vec<f64> {
        match &self.inner {
            svm::SvmModel::Qubo(m) => m.alphas.clone(),
            svm::SvmModel::Classical(m) => m.alphas.clone(),
        }
    }

    #[getter]
    fn bias(&self) -> f64 {
        match &self.inner {
            svm::SvmModel::Qubo(m) => m.bias,
            svm::SvmModel::Classical(m) => m.bias,
        }
    }

    fn decision(&self, x1: f64, x2: f64) -> f64 {
        self.inner.decision(&[x1, x2])
    }

    fn predict(&self, x1: f64, x2: f64) -> i8 {
        self.inner.predict(&[x1, x2]).as_int()
    }

    fn evaluate(&self, test: &PyDataset) -> PyResult<PyConfusion> {
        Ok(svm::evaluate(&self.inner, &test.inner).map_err(to_py)?.into())
    }
}

/// Sweep the default grid; returns `(B, K, gamma, xi, accuracy)` per grid point,
/// with `accuracy` `None` for failed fits.
#[pyfunction]
#[pyo3(signature = (problem_name, noise=0.0, seed=0, sweeps=2000, restarts=10))]
fn run_sweep(problem_name: &str, noise: f64, seed: u64, sweeps: usize, restarts: usize) -> PyResult<Vec<(u32, u32, f64, f64, Option<f64>)>> {
    let sched = schedule(sweeps, restarts, seed, None, AnnealSchedule::default().t_end);
    let records = harness::run_sweep(problem(problem_name)?, noise, &SweepGrid::default(), seed, &sched).map_err(to_py)?;
    Ok(records
        .into_iter()
        .map(|r| (r.config.base, r.config.bits, r.config.gamma, r.config.xi, r.accuracy))
        .collect())
}

#[pymodule]
#[pyo3(name = "anneal_svm")]
fn anneal_svm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyQubo>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyConfusion>()?;
    m.add_function(wrap_pyfunction!(decode_alphas, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
