//! Python bindings: problems, template generation, the online solver, the
//! oracles and the stability harness.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use resultant_forge_core as core;
use resultant_forge_core::bench::{stability_run, NormalSampler};
use resultant_forge_core::poly::{Monomial, NumPolynomial};
use resultant_forge_core::template::FormulationPreference;
use resultant_forge_core::verify::{verify, VerifyOptions};

create_exception!(resultant_forge, ResultantForgeError, PyException);

fn err(e: core::Error) -> PyErr {
    ResultantForgeError::new_err(e.to_string())
}

/// A parametric polynomial system.
#[pyclass(name = "PolySystem", module = "resultant_forge", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPolySystem {
    inner: core::PolySystem,
}

#[pymethods]
impl PyPolySystem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        core::PolySystem::from_json(text).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        core::PolySystem::load(path).map(|inner| Self { inner }).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n_vars(&self) -> usize {
        self.inner.n_vars()
    }

    #[getter]
    fn n_polys(&self) -> usize {
        self.inner.n_polys()
    }

    #[getter]
    fn n_slots(&self) -> usize {
        self.inner.n_slots()
    }

    #[getter]
    fn var_names(&self) -> Vec<String> {
        self.inner.var_names().to_vec()
    }

    /// Exponent vectors of each polynomial.
    fn supports(&self) -> PyResult<Vec<Vec<Vec<i32>>>> {
        let s = self.inner.supports().map_err(err)?;
        Ok(s.iter()
            .map(|p| p.iter().map(|m| m.exponents().to_vec()).collect())
            .collect())
    }

    /// Numeric polynomials for one coefficient vector, as `[(exponents, value)]`.
    fn instantiate(&self, coeffs: Vec<f64>) -> PyResult<Vec<Vec<(Vec<i32>, f64)>>> {
        let polys = self.inner.instantiate(&coeffs).map_err(err)?;
        Ok(polys
            .iter()
            .map(|p| p.terms().iter().map(|(m, c)| (m.exponents().to_vec(), *c)).collect())
            .collect())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "PolySystem(n_vars={}, n_polys={}, n_slots={})",
            self.inner.n_vars(),
            self.inner.n_polys(),
            self.inner.n_slots()
        )
    }
}

/// One root returned by the solver.
#[pyclass(name = "Root", module = "resultant_forge", frozen, get_all)]
struct PyRoot {
    x: Vec<Complex64>,
    lambda_: Complex64,
    residual: f64,
    is_real: bool,
    partial: bool,
}

#[pymethods]
impl PyRoot {
    fn __repr__(&self) -> String {
        let xs: Vec<String> = self
            .x
            .iter()
            .map(|z| if self.is_real { format!("{}", z.re) } else { format!("{z}") })
            .collect();
        format!("Root(x=[{}], residual={:.1e})", xs.join(", "), self.residual)
    }
}

impl From<&core::solver::Root> for PyRoot {
    fn from(r: &core::solver::Root) -> Self {
        PyRoot {
            x: r.x.clone(),
            lambda_: r.lambda,
            residual: r.residual,
            is_real: r.is_real,
            partial: r.partial,
        }
    }
}

/// Aggregate of a stability run.
#[pyclass(name = "StabilityReport", module = "resultant_forge", frozen)]
struct PyStabilityReport {
    inner: core::bench::StabilityReport,
}

#[pymethods]
impl PyStabilityReport {
    #[getter]
    fn n_instances(&self) -> usize {
        self.inner.n_instances
    }

    #[getter]
    fn mean_log10_residual(&self) -> f64 {
        self.inner.mean_log10_residual
    }

    #[getter]
    fn median_log10_residual(&self) -> f64 {
        self.inner.median_log10_residual
    }

    #[getter]
    fn fail_fraction(&self) -> f64 {
        self.inner.fail_fraction
    }

    #[getter]
    fn n_failed(&self) -> usize {
        self.inner.n_failed
    }

    /// `[(bin_lower_edge, count)]` over log10 worst residuals.
    #[getter]
    fn histogram(&self) -> Vec<(f64, usize)> {
        self.inner.histogram.iter().map(|b| (b.lo, b.count)).collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "StabilityReport(n={}, mean={:.2}, median={:.2}, fail={:.2}%)",
            self.inner.n_instances,
            self.inner.mean_log10_residual,
            self.inner.median_log10_residual,
            100.0 * self.inner.fail_fraction
        )
    }
}

/// A generated solver template together with its provenance.
#[pyclass(name = "Template", module = "resultant_forge", frozen)]
struct PyTemplate {
    inner: core::TemplateFile,
}

#[pymethods]
impl PyTemplate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        core::TemplateFile::from_json(text).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        core::TemplateFile::load(path).map(|inner| Self { inner }).map_err(err)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// `"template: inv a×a, eig b×b"`.
    #[getter]
    fn summary(&self) -> String {
        self.inner.summary_line()
    }

    #[getter]
    fn inversion_size(&self) -> usize {
        self.inner.template.inversion_size()
    }

    #[getter]
    fn eigen_size(&self) -> usize {
        self.inner.template.eigen_size()
    }

    #[getter]
    fn hidden_var(&self) -> usize {
        self.inner.template.hidden_var
    }

    #[getter]
    fn formulation(&self) -> &'static str {
        match self.inner.template.formulation() {
            core::template::Formulation::Standard => "standard",
            core::template::Formulation::Alternate => "alternate",
        }
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.config.seed
    }

    #[getter]
    fn system(&self) -> PyPolySystem {
        PyPolySystem {
            inner: self.inner.template.system.clone(),
        }
    }

    #[getter]
    fn reduction_steps(&self) -> usize {
        self.inner.trace.steps.len()
    }

    /// Solve one instance. Roots come sorted by the hidden coordinate.
    #[pyo3(signature = (coeffs, all_complex = true))]
    fn solve(&self, py: Python<'_>, coeffs: Vec<f64>, all_complex: bool) -> PyResult<Vec<PyRoot>> {
        let sol = py
            .detach(|| core::solve(&self.inner.template, &coeffs))
            .map_err(err)?;
        Ok(sol
            .roots
            .iter()
            .filter(|r| all_complex || r.is_real)
            .map(PyRoot::from)
            .collect())
    }

    /// Residual statistics over `n` standard-normal instances.
    #[pyo3(signature = (n = 5000, seed = 0))]
    fn stability(&self, py: Python<'_>, n: usize, seed: u64) -> PyStabilityReport {
        let inner = py.detach(|| stability_run(&self.inner.template, &NormalSampler, n, seed));
        PyStabilityReport { inner }
    }

    /// Oracle cross-checks; `[(name, passed, detail)]`.
    #[pyo3(signature = (system, instances = 20, seed = 0))]
    fn verify(
        &self,
        py: Python<'_>,
        system: &PyPolySystem,
        instances: usize,
        seed: u64,
    ) -> PyResult<Vec<(String, bool, String)>> {
        let opts = VerifyOptions { instances, seed };
        let rep = py.detach(|| verify(&system.inner, &self.inner, &opts)).map_err(err)?;
        Ok(rep.checks.into_iter().map(|c| (c.name, c.passed, c.detail)).collect())
    }

    fn __repr__(&self) -> String {
        format!("Template({})", self.inner.summary_line())
    }
}

/// Run the offline pipeline: basis search, reduction, finalization.
#[pyfunction]
#[pyo3(signature = (system, seed = 0, epsilon = 0.45, max_subset = None, formulation = "auto"))]
fn generate(
    py: Python<'_>,
    system: &PyPolySystem,
    seed: u64,
    epsilon: f64,
    max_subset: Option<usize>,
    formulation: &str,
) -> PyResult<PyTemplate> {
    let formulation: FormulationPreference = formulation
        .parse()
        .map_err(ResultantForgeError::new_err)?;
    let cfg = core::SearchConfig {
        seed,
        epsilon,
        max_subset_size: max_subset,
        formulation,
        ..core::SearchConfig::default()
    };
    cfg.validate().map_err(err)?;
    let inner = py.detach(|| core::generate(&system.inner, &cfg)).map_err(err)?;
    Ok(PyTemplate { inner })
}

/// `x² + y² − 5`, `x·y − 2` with every coefficient a slot.
#[pyfunction]
fn s1() -> PyPolySystem {
    PyPolySystem {
        inner: core::fixtures::s1(),
    }
}

/// `x³ − 6x² + 11x − 6` with every coefficient a slot.
#[pyfunction]
fn cubic() -> PyPolySystem {
    PyPolySystem {
        inner: core::fixtures::cubic(),
    }
}

/// A seeded random sparse bivariate system and one coefficient draw.
#[pyfunction]
fn random_sparse_bivariate(seed: u64) -> (PyPolySystem, Vec<f64>) {
    let (inner, coeffs) = core::fixtures::random_sparse_bivariate(seed);
    (PyPolySystem { inner }, coeffs)
}

fn num_poly(n: usize, terms: Vec<(Vec<i32>, f64)>) -> PyResult<NumPolynomial> {
    NumPolynomial::new(n, terms.into_iter().map(|(e, c)| (Monomial::new(e), c)).collect()).map_err(err)
}

/// Roots of a univariate polynomial, coefficients from the constant term up.
#[pyfunction]
fn companion_roots(coeffs: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    core::oracle::companion_roots_complex(&coeffs).map_err(err)
}

/// Common roots of two bivariate polynomials given as `[(exponents, value)]`.
#[pyfunction]
fn sylvester_roots(f: Vec<(Vec<i32>, f64)>, g: Vec<(Vec<i32>, f64)>) -> PyResult<Vec<(Complex64, Complex64)>> {
    let roots = core::oracle::sylvester_roots(&num_poly(2, f)?, &num_poly(2, g)?).map_err(err)?;
    Ok(roots.into_iter().map(|[x, y]| (x, y)).collect())
}

/// Mixed volume of two planar supports.
#[pyfunction]
fn bkk_2d(p: Vec<Vec<i32>>, q: Vec<Vec<i32>>) -> i64 {
    let conv = |v: Vec<Vec<i32>>| v.into_iter().map(Monomial::new).collect::<Vec<_>>();
    core::oracle::bkk_2d(&conv(p), &conv(q))
}

/// Hidden-variable baseline: roots and the number of parasitic eigenvalues.
#[pyfunction]
fn gep_baseline(
    py: Python<'_>,
    system: &PyPolySystem,
    hidden: usize,
    coeffs: Vec<f64>,
) -> PyResult<(Vec<Vec<Complex64>>, usize)> {
    let cfg = core::SearchConfig::default();
    let sol = py
        .detach(|| core::gep::gep_baseline(&system.inner, hidden, &coeffs, &cfg))
        .map_err(err)?;
    let parasitic = sol.parasitic();
    Ok((sol.roots.into_iter().map(|r| r.x).collect(), parasitic))
}

#[pymodule]
fn resultant_forge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ResultantForgeError", m.py().get_type::<ResultantForgeError>())?;
    m.add_class::<PyPolySystem>()?;
    m.add_class::<PyTemplate>()?;
    m.add_class::<PyRoot>()?;
    m.add_class::<PyStabilityReport>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(s1, m)?)?;
    m.add_function(wrap_pyfunction!(cubic, m)?)?;
    m.add_function(wrap_pyfunction!(random_sparse_bivariate, m)?)?;
    m.add_function(wrap_pyfunction!(companion_roots, m)?)?;
    m.add_function(wrap_pyfunction!(sylvester_roots, m)?)?;
    m.add_function(wrap_pyfunction!(bkk_2d, m)?)?;
    m.add_function(wrap_pyfunction!(gep_baseline, m)?)?;
    Ok(())
}
