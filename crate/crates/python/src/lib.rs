//! Python bindings: parameters, closed-form modes, blow-up diagnostics, the
//! integration oracle, figure data and the verification suite.

use pyo3::create_exception;
use pyo3::exceptions::{PyValueError, PyArithmeticError};
use pyo3::prelude::*;

use susy_damp::modes::{self, Family, ModeSpec, Sign};
use susy_damp::oracle::{self, Ivp};
use susy_damp::params::{Coefficients, DampingParams, RiccatiParam};
use susy_damp::verify::{self, Scope};
use susy_damp::Error;

create_exception!(susy_damp_py, SingularTimeError, PyArithmeticError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::SingularTime { .. } | Error::DerivativeUnavailable { .. } | Error::SingularInterval { .. } => {
            SingularTimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "DampingParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyDampingParams(DampingParams);

#[pymethods]
impl PyDampingParams {
    #[new]
    fn new(beta: f64, omega0: f64) -> PyResult<Self> {
        DampingParams::new(beta, omega0).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_omega0_sq(beta: f64, omega0_sq: f64) -> PyResult<Self> {
        DampingParams::from_omega0_sq(beta, omega0_sq).map(Self).map_err(to_py)
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn omega0(&self) -> f64 {
        self.0.omega0()
    }

    #[getter]
    fn omega0_sq(&self) -> f64 {
        self.0.omega0_sq()
    }

    #[getter]
    fn alpha_sq(&self) -> f64 {
        self.0.alpha_sq()
    }

    /// "underdamped", "critical" or "overdamped".
    #[getter]
    fn regime(&self) -> &'static str {
        self.0.regime().tag().name()
    }

    fn __repr__(&self) -> String {
        format!("DampingParams(beta={}, omega0={})", self.0.beta(), self.0.omega0())
    }
}

#[pyclass(name = "RiccatiParam", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyRiccatiParam(RiccatiParam);

#[pymethods]
impl PyRiccatiParam {
    #[new]
    fn new(gamma: f64) -> PyResult<Self> {
        RiccatiParam::new(gamma).map(Self).map_err(to_py)
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    #[getter]
    fn t_star(&self) -> f64 {
        self.0.t_star()
    }

    fn h(&self, t: f64) -> PyResult<f64> {
        self.0.check(t).map_err(to_py)?;
        Ok(self.0.gamma() / (self.0.gamma() * t + 1.0))
    }

    fn is_singular(&self, t: f64) -> bool {
        self.0.is_singular(t)
    }

    fn __repr__(&self) -> String {
        format!("RiccatiParam(gamma={})", self.0.gamma())
    }
}

/// A seed mode (`gamma=None`) or a member of the tilde family.
///
/// Coefficients come either as `a`/`b` (for the critical tilde family `b` is
/// the weight D of the second solution) or as `amp`/`phase`.
#[pyclass(name = "Mode", frozen)]
struct PyMode(ModeSpec);

#[pymethods]
impl PyMode {
    #[new]
    #[pyo3(signature = (params, gamma=None, *, a=None, b=None, amp=None, phase=None))]
    fn new(
        params: PyDampingParams,
        gamma: Option<f64>,
        a: Option<f64>,
        b: Option<f64>,
        amp: Option<f64>,
        phase: Option<f64>,
    ) -> PyResult<Self> {
        let coeffs = match (a.is_some() || b.is_some(), amp.is_some() || phase.is_some()) {
            (true, false) => Coefficients::AB { a: a.unwrap_or(0.0), b: b.unwrap_or(0.0) },
            (false, true) => Coefficients::AmpPhase { amp: amp.unwrap_or(1.0), phase: phase.unwrap_or(0.0) },
            _ => return Err(PyValueError::new_err("give either a/b or amp/phase")),
        };
        let family = match gamma {
            Some(g) => Family::Tilde(RiccatiParam::new(g).map_err(to_py)?),
            None => Family::Seed,
        };
        ModeSpec::new(params.0, coeffs, family).map(Self).map_err(to_py)
    }

    /// `(y, dy, d2y)` at `t`.
    fn eval(&self, t: f64) -> PyResult<(f64, f64, f64)> {
        let e = self.0.eval(t).map_err(to_py)?;
        Ok((e.y, e.dy, e.d2y))
    }

    /// Values on a grid; `nan` where `t` is inside the singular guard band.
    fn values(&self, ts: Vec<f64>) -> Vec<f64> {
        ts.into_iter()
            .map(|t| self.0.eval(t).map_or(f64::NAN, |e| e.y))
            .collect()
    }

    /// Antirestoring acceleration `2 gamma^2/(gamma t + 1)^2 * y~(t)`.
    fn acceleration(&self, t: f64) -> PyResult<f64> {
        modes::antirestoring_acceleration(&self.0, t).map_err(to_py)
    }

    /// Normalized residual of the mode's own equation at `t`.
    fn residual(&self, t: f64) -> PyResult<f64> {
        let e = self.0.eval(t).map_err(to_py)?;
        let (res, scale) = match self.0.riccati() {
            Some(r) => modes::tilde_residual(self.0.params(), &r, &e),
            None => modes::seed_residual(self.0.params(), &e),
        };
        Ok(res / scale)
    }
}

/// `(y~, dy~, d2y~)` of the overdamped pair `y~± = (±alpha - h) y±`.
#[pyfunction]
fn tilde_pm(params: PyDampingParams, gamma: f64, plus: bool, t: f64) -> PyResult<(f64, f64, f64)> {
    let r = RiccatiParam::new(gamma).map_err(to_py)?;
    let sign = if plus { Sign::Plus } else { Sign::Minus };
    let e = modes::eval_tilde_pm(&params.0, &r, sign, t).map_err(to_py)?;
    Ok((e.y, e.dy, e.d2y))
}

#[pyfunction]
fn blow_up_time(gamma: f64) -> PyResult<f64> {
    let r = RiccatiParam::new(gamma).map_err(to_py)?;
    Ok(modes::blow_up_time(&r))
}

/// Integrates the oscillator (with the `gamma` potential when given) and
/// returns `(ys, dys)` on `grid`.
#[pyfunction]
#[pyo3(signature = (params, gamma, t0, y0, dy0, t_end, grid, rel_tol=1e-10, abs_tol=1e-12))]
#[allow(clippy::too_many_arguments)]
fn integrate(
    params: PyDampingParams,
    gamma: Option<f64>,
    t0: f64,
    y0: f64,
    dy0: f64,
    t_end: f64,
    grid: Vec<f64>,
    rel_tol: f64,
    abs_tol: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let r = gamma.map(RiccatiParam::new).transpose().map_err(to_py)?;
    let ivp = Ivp::new(&params.0, r.as_ref(), t0, y0, dy0, t_end);
    let tr = oracle::integrate(&ivp, rel_tol, abs_tol, &grid).map_err(to_py)?;
    Ok((tr.ys, tr.dys))
}

/// CSV text of figure `n` (1-6).
#[pyfunction]
fn figure_csv(n: u8) -> PyResult<String> {
    susy_damp::cli::figure_csv(n).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyclass(name = "CheckReport", frozen, get_all)]
struct PyCheckReport {
    name: &'static str,
    max_residual: f64,
    threshold: f64,
    passed: bool,
}

#[pymethods]
impl PyCheckReport {
    fn __repr__(&self) -> String {
        format!(
            "CheckReport({}, max_residual={:e}, threshold={:e}, passed={})",
            self.name, self.max_residual, self.threshold, self.passed
        )
    }
}

#[pyfunction]
#[pyo3(signature = (scope="all", seed=0))]
fn run_suite(py: Python<'_>, scope: &str, seed: u64) -> PyResult<Vec<PyCheckReport>> {
    let scope: Scope = scope.parse().map_err(|e: String| PyValueError::new_err(e))?;
    let reports = py.detach(|| verify::run_suite(scope, seed));
    Ok(reports
        .into_iter()
        .map(|r| PyCheckReport {
            name: r.check_name,
            max_residual: r.max_residual,
            threshold: r.threshold,
            passed: r.passed,
        })
        .collect())
}

#[pymodule]
fn susy_damp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDampingParams>()?;
    m.add_class::<PyRiccatiParam>()?;
    m.add_class::<PyMode>()?;
    m.add_class::<PyCheckReport>()?;
    m.add_function(wrap_pyfunction!(tilde_pm, m)?)?;
    m.add_function(wrap_pyfunction!(blow_up_time, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(figure_csv, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("SingularTimeError", m.py().get_type::<SingularTimeError>())?;
    Ok(())
}
