use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use zetaops::funcspace::{battery_fn, battery_names};
use zetaops::mellin::mellin_point;
use zetaops::operators::{adjoint, apply, parse_sexpr, to_sexpr};
use zetaops::verify::{check_op, run_all, VerifyConfig};
use zetaops::zeta_xi::{self, HeatVariant, XiEngine, ZeroMethod};
use zetaops::{AnalyticFunction, CheckReport, OperatorExpr, ZError, ZeroList};

create_exception!(zetaops_py, ZetaOpsError, PyException);

fn err(e: ZError) -> PyErr {
    match e {
        ZError::Domain(_) | ZError::Shape(_) | ZError::Parse(_) => PyValueError::new_err(e.to_string()),
        _ => ZetaOpsError::new_err(e.to_string()),
    }
}

/// A function from the built-in battery.
#[pyclass(name = "Function")]
#[derive(Clone)]
struct PyFunction {
    inner: AnalyticFunction,
}

#[pymethods]
impl PyFunction {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        battery_fn(name)
            .map(|inner| PyFunction { inner })
            .ok_or_else(|| PyValueError::new_err(format!("unknown function '{}'; battery: {}", name, battery_names().join(", "))))
    }

    #[staticmethod]
    fn battery() -> Vec<&'static str> {
        battery_names()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    fn __call__(&self, t: f64) -> PyResult<Complex64> {
        self.inner.eval(t).map_err(err)
    }

    #[pyo3(signature = (s, eps=1e-12))]
    fn mellin(&self, s: Complex64, eps: f64) -> PyResult<Complex64> {
        mellin_point(&self.inner, s, eps).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Function('{}')", self.inner.name())
    }
}

/// Operator expression in s-expression form, e.g. "(compose (H 4) (Z 4))".
#[pyclass(name = "Operator")]
struct PyOperator {
    inner: OperatorExpr,
}

#[pymethods]
impl PyOperator {
    #[new]
    fn new(sexpr: &str) -> PyResult<Self> {
        parse_sexpr(sexpr).map(|inner| PyOperator { inner }).map_err(err)
    }

    fn adjoint(&self, hbar: f64) -> PyResult<PyOperator> {
        adjoint(&self.inner, hbar).map(|inner| PyOperator { inner }).map_err(err)
    }

    fn apply(&self, f: &PyFunction, t: f64) -> PyResult<Complex64> {
        apply(&self.inner, &f.inner, t).map_err(err)
    }

    /// Adjoint-rule checks of this operator.
    fn check(&self, py: Python<'_>) -> PyResult<Vec<PyObject>> {
        let cfg = VerifyConfig::default();
        let reports = py.allow_threads(|| check_op(&self.inner, &cfg));
        reports_to_py(py, &reports)
    }

    fn __str__(&self) -> String {
        to_sexpr(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Operator('{}')", to_sexpr(&self.inner))
    }
}

fn reports_to_py(py: Python<'_>, reports: &[CheckReport]) -> PyResult<Vec<PyObject>> {
    reports
        .iter()
        .map(|r| {
            let d = PyDict::new_bound(py);
            d.set_item("name", &r.name)?;
            d.set_item("params", r.params.clone())?;
            d.set_item("residual", r.residual)?;
            d.set_item("tolerance", r.tolerance)?;
            d.set_item("passed", r.passed)?;
            d.set_item("inputs_provenance", &r.inputs_provenance)?;
            Ok(d.into_any().unbind())
        })
        .collect()
}

/// Xi(s) = pi^{-s/2} Gamma(s/2) zeta(s).
#[pyfunction]
#[pyo3(signature = (s, engine="direct", n=0, eps=1e-12))]
fn xi(py: Python<'_>, s: Complex64, engine: &str, n: usize, eps: f64) -> PyResult<Complex64> {
    let e = match engine {
        "direct" => XiEngine::Direct,
        "integral" => XiEngine::Integral,
        "ibp" => XiEngine::Ibp(n),
        other => return Err(PyValueError::new_err(format!("unknown engine '{}'", other))),
    };
    py.allow_threads(|| zeta_xi::xi(s, e, eps)).map_err(err)
}

#[pyfunction]
fn zeta(s: Complex64) -> PyResult<Complex64> {
    zeta_xi::zeta_ref(s).map_err(err)
}

/// Ordinates of the zeros 1/2 + it with 0 < t <= t_max.
#[pyfunction]
#[pyo3(signature = (t_max, tol=1e-10))]
fn find_zeros(py: Python<'_>, t_max: f64, tol: f64) -> PyResult<Vec<f64>> {
    py.allow_threads(|| zeta_xi::find_critical_zeros(t_max, tol)).map(|z| z.ordinates).map_err(err)
}

#[pyfunction]
fn weil_sum(py: Python<'_>, f: &PyFunction, zeros: Vec<f64>) -> PyResult<f64> {
    if zeros.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(PyValueError::new_err("zeros must be strictly increasing"));
    }
    let z = ZeroList { residuals: vec![0.0; zeros.len()], ordinates: zeros, method: ZeroMethod::Loaded };
    py.allow_threads(|| zeta_xi::weil_sum(&f.inner, &z)).map_err(err)
}

/// Roots of the heat-flow symmetry defect as (k, predicted, located, residual).
#[pyfunction]
#[pyo3(signature = (m, rho, k_max, variant="plain"))]
fn equisym_roots(py: Python<'_>, m: usize, rho: f64, k_max: usize, variant: &str) -> PyResult<Vec<(i64, Complex64, Complex64, f64)>> {
    let v = match variant {
        "plain" => HeatVariant::Plain,
        "tilde" => HeatVariant::Tilde,
        other => return Err(PyValueError::new_err(format!("unknown variant '{}'", other))),
    };
    let roots = py.allow_threads(|| zeta_xi::equisym_roots(m, rho, k_max, v)).map_err(err)?;
    Ok(roots.into_iter().map(|r| (r.k, r.predicted, r.located, r.residual)).collect())
}

#[pyfunction]
#[pyo3(signature = (t, eps=1e-15))]
fn theta(t: f64, eps: f64) -> PyResult<f64> {
    zetaops::special::theta(t, eps).map_err(err)
}

/// Run the identity-check suite; filters are globs on check names.
#[pyfunction]
#[pyo3(signature = (filters=None, tau_shift=0.0))]
fn run_checks(py: Python<'_>, filters: Option<Vec<String>>, tau_shift: f64) -> PyResult<Vec<PyObject>> {
    let cfg = VerifyConfig { filters: filters.unwrap_or_else(|| vec!["*".into()]), tau_shift, ..Default::default() };
    let reports = py.allow_threads(|| run_all(&cfg));
    reports_to_py(py, &reports)
}

#[pymodule]
fn zetaops_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ZetaOpsError", m.py().get_type_bound::<ZetaOpsError>())?;
    m.add_class::<PyFunction>()?;
    m.add_class::<PyOperator>()?;
    m.add_function(wrap_pyfunction!(xi, m)?)?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(find_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(weil_sum, m)?)?;
    m.add_function(wrap_pyfunction!(equisym_roots, m)?)?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
