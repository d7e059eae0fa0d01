//! Python bindings: polynomial types, the interpolation solver and the
//! analyze/synthesize/sweep/verify pipelines. Reports come back as the same
//! dictionaries the CLI writes as JSON.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use simstab::cee::{solve_general, HomotopyOptions, SigmaChoice};
use simstab::cli::config::{parse_grid, PlantConfig};
use simstab::cli::report;
use simstab::interp::{normalize, InterpNode, InterpProblem, NormalizationNode, NormalizationTranscript};
use simstab::pipeline::{self, PipelineOptions, SigmaSpec};
use simstab::poly::{poly_roots, Jet, RatFun, RealPoly};

create_exception!(simstab_py, SimstabError, PyException);
create_exception!(simstab_py, InputError, SimstabError);
create_exception!(simstab_py, InfeasibleError, SimstabError);
create_exception!(simstab_py, SolverError, SimstabError);

fn to_py(e: simstab::Error) -> PyErr {
    let msg = e.to_string();
    match e.exit_code() {
        1 => InputError::new_err(msg),
        2 => InfeasibleError::new_err(msg),
        _ => SolverError::new_err(msg),
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for simstab::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

#[pyclass(name = "RealPoly", module = "simstab_py", frozen)]
pub struct PyRealPoly {
    inner: RealPoly,
}

#[pymethods]
impl PyRealPoly {
    /// Coefficients, highest power first.
    #[new]
    fn new(coeffs: Vec<f64>) -> Self {
        PyRealPoly { inner: RealPoly::new(coeffs) }
    }

    #[staticmethod]
    #[pyo3(signature = (roots, gain=1.0))]
    fn from_roots(roots: Vec<Complex64>, gain: f64) -> Self {
        PyRealPoly { inner: RealPoly::from_roots(&roots, gain) }
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs().to_vec()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn __call__(&self, x: Complex64) -> Complex64 {
        self.inner.eval_complex(x)
    }

    #[pyo3(signature = (tol=1e-10))]
    fn roots(&self, tol: f64) -> PyResult<Vec<(Complex64, usize)>> {
        Ok(poly_roots(&self.inner, tol)
            .py_err()?
            .into_iter()
            .map(|r| (r.value, r.multiplicity))
            .collect())
    }

    fn __mul__(&self, other: &PyRealPoly) -> PyRealPoly {
        PyRealPoly { inner: &self.inner * &other.inner }
    }

    fn __add__(&self, other: &PyRealPoly) -> PyRealPoly {
        PyRealPoly { inner: &self.inner + &other.inner }
    }

    fn __repr__(&self) -> String {
        format!("RealPoly({:?})", self.inner.coeffs())
    }
}

#[pyclass(name = "Jet", module = "simstab_py", frozen)]
pub struct PyJet {
    inner: Jet,
}

#[pymethods]
impl PyJet {
    /// Taylor coefficients `f^(k)(center) / k!`.
    #[new]
    fn new(center: Complex64, coeffs: Vec<Complex64>) -> PyResult<Self> {
        Ok(PyJet { inner: Jet::new(center, coeffs).py_err()? })
    }

    #[getter]
    fn center(&self) -> Complex64 {
        self.inner.center
    }

    #[getter]
    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs.clone()
    }

    fn sqrt(&self) -> PyResult<PyJet> {
        Ok(PyJet { inner: self.inner.sqrt().py_err()? })
    }

    fn __mul__(&self, other: &PyJet) -> PyResult<PyJet> {
        Ok(PyJet { inner: self.inner.mul(&other.inner).py_err()? })
    }

    fn __repr__(&self) -> String {
        format!("Jet(center={}, coeffs={:?})", self.inner.center, self.inner.coeffs)
    }
}

#[pyclass(name = "RatFun", module = "simstab_py", frozen)]
pub struct PyRatFun {
    inner: RatFun,
}

#[pymethods]
impl PyRatFun {
    /// `num / den`, coefficients highest power first.
    #[new]
    #[pyo3(signature = (num, den=None))]
    fn new(num: Vec<f64>, den: Option<Vec<f64>>) -> PyResult<Self> {
        let den = den.map_or_else(RealPoly::one, RealPoly::new);
        Ok(PyRatFun { inner: RatFun::new(RealPoly::new(num), den).py_err()? })
    }

    #[staticmethod]
    #[pyo3(signature = (zeros, poles, gain=1.0))]
    fn from_zpk(zeros: Vec<Complex64>, poles: Vec<Complex64>, gain: f64) -> PyResult<Self> {
        Ok(PyRatFun { inner: RatFun::from_zpk(&zeros, &poles, gain).py_err()? })
    }

    #[getter]
    fn num(&self) -> Vec<f64> {
        self.inner.num().coeffs().to_vec()
    }

    #[getter]
    fn den(&self) -> Vec<f64> {
        self.inner.den().coeffs().to_vec()
    }

    #[getter]
    fn is_proper(&self) -> bool {
        self.inner.is_proper()
    }

    fn value_at_infinity(&self) -> Option<f64> {
        self.inner.value_at_infinity()
    }

    fn __call__(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.eval(s).py_err()
    }

    fn jet(&self, center: Complex64, order: usize) -> PyResult<PyJet> {
        Ok(PyJet { inner: self.inner.jet(center, order).py_err()? })
    }

    fn poles(&self) -> PyResult<Vec<(Complex64, usize)>> {
        Ok(self.inner.poles().py_err()?.into_iter().map(|r| (r.value, r.multiplicity)).collect())
    }

    fn zeros(&self) -> PyResult<Vec<(Complex64, usize)>> {
        Ok(self.inner.zeros().py_err()?.into_iter().map(|r| (r.value, r.multiplicity)).collect())
    }

    fn __mul__(&self, other: &PyRatFun) -> PyRatFun {
        PyRatFun { inner: self.inner.mul(&other.inner) }
    }

    fn __add__(&self, other: &PyRatFun) -> PyRatFun {
        PyRatFun { inner: self.inner.add(&other.inner) }
    }

    fn __repr__(&self) -> String {
        format!("RatFun(num={:?}, den={:?})", self.inner.num().coeffs(), self.inner.den().coeffs())
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (report::to_json_string(v),))
}

fn load(config: &str, lambda_grid: Option<&str>) -> PyResult<(PlantConfig, PipelineOptions)> {
    let cfg = PlantConfig::from_json(config).py_err()?;
    let mut opts = cfg.options().py_err()?;
    if let Some(g) = lambda_grid {
        opts.lambda_grid = parse_grid(g).py_err()?;
    }
    Ok((cfg, opts))
}

/// Eta zeros, constraints and Pick verdict for a JSON config string.
#[pyfunction]
#[pyo3(signature = (config, lambda_grid=None))]
fn analyze<'py>(py: Python<'py>, config: &str, lambda_grid: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let (cfg, opts) = load(config, lambda_grid)?;
    let a = pipeline::analyze(&cfg.plant_pair().py_err()?, &opts).py_err()?;
    let mut v = report::analysis(&a);
    v["warnings"] = serde_json::json!(a.warnings);
    json_to_py(py, &v)
}

/// Full design. `sigma` (coefficients) or `sigma_zeros` overrides the config.
#[pyfunction]
#[pyo3(signature = (config, sigma=None, sigma_zeros=None, lambda_grid=None))]
fn synthesize<'py>(
    py: Python<'py>,
    config: &str,
    sigma: Option<Vec<f64>>,
    sigma_zeros: Option<Vec<Complex64>>,
    lambda_grid: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let (cfg, opts) = load(config, lambda_grid)?;
    let spec = match (sigma, sigma_zeros) {
        (Some(c), _) => SigmaSpec::Coefficients(c),
        (None, Some(z)) => SigmaSpec::Zeros(z),
        (None, None) => cfg.sigma_spec().py_err()?,
    };
    let d = py
        .detach(|| pipeline::synthesize(&cfg.plant_pair()?, &spec, &opts))
        .py_err()?;
    json_to_py(py, &report::design(&d))
}

/// One design per `sigma = (z - z0)^n`.
#[pyfunction]
#[pyo3(signature = (config, sigma_zeros, lambda_grid=None))]
fn sweep<'py>(
    py: Python<'py>,
    config: &str,
    sigma_zeros: Vec<f64>,
    lambda_grid: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let (cfg, opts) = load(config, lambda_grid)?;
    let sw = py
        .detach(|| pipeline::sweep(&cfg.plant_pair()?, &sigma_zeros, &opts))
        .py_err()?;
    json_to_py(py, &report::sweep(&sw))
}

/// Closed-loop check of a given compensator.
#[pyfunction]
#[pyo3(signature = (config, k, lambda_grid=None))]
fn verify<'py>(
    py: Python<'py>,
    config: &str,
    k: &PyRatFun,
    lambda_grid: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let (cfg, opts) = load(config, lambda_grid)?;
    let c = pipeline::verify_compensator(&cfg.plant_pair().py_err()?, &k.inner, &opts).py_err()?;
    json_to_py(py, &report::closed_loop(&c))
}

fn interp_problem(nodes: Vec<(Complex64, Vec<Complex64>)>) -> PyResult<InterpProblem> {
    let nodes = nodes
        .into_iter()
        .map(|(z, w)| Ok(InterpNode { z, jet: Jet::new(z, w).py_err()? }))
        .collect::<PyResult<Vec<_>>>()?;
    InterpProblem::new(nodes, NormalizationTranscript::identity()).py_err()
}

/// Pick test for disc data `[(z, [f(z), f'(z), f''(z)/2, ...]), ...]`.
/// Returns `(solvable, min_eigenvalue)`.
#[pyfunction]
fn pick_test(nodes: Vec<(Complex64, Vec<Complex64>)>) -> PyResult<(bool, f64)> {
    let v = simstab::interp::pick_test(&interp_problem(nodes)?).py_err()?;
    Ok((v.is_solvable(), v.min_eigenvalue()))
}

/// Carathéodory interpolant `f = rev_b / (2 rev_a)` of the disc data for the
/// given `sigma` tail (default `z^n`). Unnormalized data is first moved so the
/// chosen real node sits at the origin with value 1/2; `alpha` and `gamma`
/// describe that move.
#[pyfunction]
#[pyo3(signature = (nodes, sigma=None))]
fn solve_interpolation<'py>(
    py: Python<'py>,
    nodes: Vec<(Complex64, Vec<Complex64>)>,
    sigma: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut ip = interp_problem(nodes)?;
    if !ip.is_normalized() {
        ip = normalize(&ip, NormalizationNode::Auto).py_err()?;
    }
    let n = ip.degree_bound();
    let sigma = match sigma {
        Some(v) => SigmaChoice::from_vector(&v).py_err()?,
        None => SigmaChoice::monomial(n),
    };
    let (sol, _) = py
        .detach(|| solve_general(&ip, &sigma, &HomotopyOptions::default()))
        .py_err()?;
    let d = PyDict::new(py);
    d.set_item("a", sol.a.coeffs().to_vec())?;
    d.set_item("b", sol.b.coeffs().to_vec())?;
    d.set_item("rho", sol.rho)?;
    d.set_item("sigma", sol.sigma.poly().coeffs().to_vec())?;
    d.set_item("rank_p", sol.rank_p)?;
    d.set_item("alpha", ip.transcript.alpha)?;
    d.set_item("gamma", ip.transcript.gamma)?;
    Ok(d)
}

/// Runs the command line with `argv` (without the program name) and returns
/// `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(argv: Vec<String>) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let args = std::iter::once("simstab".to_string()).chain(argv);
    let code = simstab::cli::run(args, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

#[pymodule]
fn simstab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRealPoly>()?;
    m.add_class::<PyRatFun>()?;
    m.add_class::<PyJet>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(pick_test, m)?)?;
    m.add_function(wrap_pyfunction!(solve_interpolation, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    let py = m.py();
    m.add("SimstabError", py.get_type::<SimstabError>())?;
    m.add("InputError", py.get_type::<InputError>())?;
    m.add("InfeasibleError", py.get_type::<InfeasibleError>())?;
    m.add("SolverError", py.get_type::<SolverError>())?;
    Ok(())
}
