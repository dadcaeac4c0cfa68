//! Python bindings: `import laxlab`.

use laxlab_core as core;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: core::LabError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Periodic grid function with the sup-norm.
#[pyclass(name = "GridFunction", module = "laxlab", skip_from_py_object)]
#[derive(Clone)]
struct PyGridFunction {
    inner: core::GridFunction,
}

#[pymethods]
impl PyGridFunction {
    #[new]
    #[pyo3(signature = (values, domain_length = core::DEFAULT_DOMAIN_LENGTH))]
    fn new(values: Vec<f64>, domain_length: f64) -> PyResult<Self> {
        let inner = core::GridFunction::new(values, domain_length).map_err(err)?;
        Ok(Self { inner })
    }

    /// Samples a descriptor such as `"sine(1) + 0.5*cosine(3)"`.
    #[staticmethod]
    #[pyo3(signature = (descriptor, n, domain_length = core::DEFAULT_DOMAIN_LENGTH))]
    fn sample(descriptor: &str, n: usize, domain_length: f64) -> PyResult<Self> {
        let d: core::FunctionDescriptor = descriptor.parse().map_err(err)?;
        let inner = d.sample(n, domain_length).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.inner.dx()
    }

    #[getter]
    fn domain_length(&self) -> f64 {
        self.inner.domain_length()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn sup_norm(&self) -> PyResult<f64> {
        self.inner.sup_norm().map_err(err)
    }

    fn distance(&self, other: &PyGridFunction) -> PyResult<f64> {
        self.inner.distance(&other.inner).map_err(err)
    }

    /// Spectral interpolation onto `n ≥ len` points.
    fn resample(&self, n: usize) -> PyResult<Self> {
        let inner = self.inner.resample(n).map_err(err)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!("GridFunction(n={}, L={})", self.inner.len(), self.inner.domain_length())
    }
}

/// Explicit stencil operator `v_j = Σ c_m u_{j+o_m}`.
#[pyclass(name = "Scheme", module = "laxlab", skip_from_py_object)]
#[derive(Clone)]
struct PyScheme {
    inner: core::StencilScheme,
}

#[pymethods]
impl PyScheme {
    #[new]
    #[pyo3(signature = (name, offsets, coefficients, dt, dx))]
    fn new(name: &str, offsets: Vec<i64>, coefficients: Vec<f64>, dt: f64, dx: f64) -> PyResult<Self> {
        let inner = core::StencilScheme::new(name, offsets, coefficients, dt, dx).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn ftcs(dt: f64, dx: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::ftcs_heat(dt, dx).map_err(err)?,
        })
    }

    #[staticmethod]
    fn backward_euler(dt: f64, dx: f64, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: core::backward_euler_heat(dt, dx, n).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn offsets(&self) -> Vec<i64> {
        self.inner.offsets().to_vec()
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.inner.coefficients().to_vec()
    }

    #[getter]
    fn ratio(&self) -> f64 {
        self.inner.ratio()
    }

    fn on_grid(&self, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.on_grid(n).map_err(err)?,
        })
    }

    fn apply(&self, u: &PyGridFunction) -> PyResult<PyGridFunction> {
        Ok(PyGridFunction {
            inner: self.inner.apply(&u.inner).map_err(err)?,
        })
    }

    fn power(&self, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.power(n).map_err(err)?,
        })
    }

    fn operator_norm(&self) -> f64 {
        core::operator_norm(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Scheme({:?}, r={})", self.inner.name(), self.inner.ratio())
    }
}

/// Exact heat evolution by Fourier multipliers.
#[pyclass(name = "HeatSemigroup", module = "laxlab", skip_from_py_object)]
#[derive(Clone)]
struct PyHeatSemigroup {
    inner: core::HeatSemigroup,
}

#[pymethods]
impl PyHeatSemigroup {
    #[new]
    #[pyo3(signature = (horizon, n, domain_length = core::DEFAULT_DOMAIN_LENGTH))]
    fn new(horizon: f64, n: usize, domain_length: f64) -> PyResult<Self> {
        let inner = core::HeatSemigroup::new(horizon, n)
            .and_then(|s| s.with_domain_length(domain_length))
            .map_err(err)?;
        Ok(Self { inner })
    }

    fn evolve(&self, u: &PyGridFunction, t: f64) -> PyResult<PyGridFunction> {
        Ok(PyGridFunction {
            inner: self.inner.evolve(&u.inner, t).map_err(err)?,
        })
    }

    fn extend_evolve(&self, u: &PyGridFunction, t: f64) -> PyResult<PyGridFunction> {
        Ok(PyGridFunction {
            inner: self.inner.extend_evolve(&u.inner, t).map_err(err)?,
        })
    }

    fn properly_posed_check<'py>(
        &self,
        py: Python<'py>,
        ts: Vec<f64>,
        probes: Vec<PyRef<'py, PyGridFunction>>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let probes: Vec<core::GridFunction> = probes.iter().map(|p| p.inner.clone()).collect();
        let report = self.inner.properly_posed_check(&ts, &probes).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("max_ratio", report.max_ratio)?;
        d.set_item("bound_k", report.bound_k)?;
        d.set_item("pass", report.pass)?;
        let rows: Vec<(f64, usize, f64)> = report.rows.iter().map(|r| (r.t, r.probe_id, r.ratio)).collect();
        d.set_item("rows", rows)?;
        Ok(d)
    }
}

#[pyfunction]
#[pyo3(signature = (scheme, horizon, threshold = core::analysis::DEFAULT_STABILITY_THRESHOLD))]
fn stability_check<'py>(
    py: Python<'py>,
    scheme: &PyScheme,
    horizon: f64,
    threshold: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let report = core::stability_check_with(&scheme.inner, horizon, threshold).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("bound_l", report.bound_l)?;
    d.set_item("stable", report.stable)?;
    d.set_item("max_steps", report.max_steps)?;
    d.set_item("first_exceedance", report.first_exceedance())?;
    d.set_item("norms", report.norms.clone())?;
    Ok(d)
}

#[pyfunction]
fn von_neumann_check<'py>(py: Python<'py>, scheme: &PyScheme, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let report = core::von_neumann_check(&scheme.inner, n).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("max_abs_g", report.max_abs_g)?;
    d.set_item("argmax_k", report.argmax_k)?;
    d.set_item("pass", report.pass)?;
    Ok(d)
}

/// `(t, residual)` pairs of `‖S E(t)u − E(t+Δt)u‖`.
#[pyfunction]
fn consistency_check(
    scheme: &PyScheme,
    semigroup: &PyHeatSemigroup,
    u: &PyGridFunction,
    ts: Vec<f64>,
) -> PyResult<Vec<(f64, f64)>> {
    core::consistency_check(&scheme.inner, &semigroup.inner, &u.inner, &ts).map_err(err)
}

/// Sweep along `Δx = alpha_c·Δt^alpha_p`; `scheme` is `"ftcs"` or `"backward_euler"`.
#[pyfunction]
#[pyo3(signature = (scheme, u, horizon, dts, alpha_c = std::f64::consts::SQRT_2, alpha_p = 0.5))]
fn convergence_experiment<'py>(
    py: Python<'py>,
    scheme: &str,
    u: &PyGridFunction,
    horizon: f64,
    dts: Vec<f64>,
    alpha_c: f64,
    alpha_p: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let kind: core::SchemeKind = scheme.parse().map_err(err)?;
    let path = core::RefinementPath::power(alpha_c, alpha_p).map_err(err)?;
    let sg = core::HeatSemigroup::new(horizon, u.inner.len())
        .and_then(|s| s.with_domain_length(u.inner.domain_length()))
        .map_err(err)?;
    let report = core::convergence_experiment(
        kind,
        &path,
        &sg,
        &u.inner,
        horizon,
        &dts,
        &core::ConvergenceOptions::default(),
    )
    .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("converged", report.converged)?;
    d.set_item("observed_order", report.observed_order)?;
    d.set_item("compactness_diameter", report.compactness_diameter)?;
    let rows: Vec<(f64, f64, usize, usize, f64)> = report
        .rows
        .iter()
        .map(|r| (r.dt, r.dx, r.grid_n, r.n_steps, r.error))
        .collect();
    d.set_item("rows", rows)?;
    Ok(d)
}

/// Gap between a rounded and an exact-arithmetic run of `scheme`.
#[pyfunction]
fn roundoff_growth<'py>(
    py: Python<'py>,
    scheme: &PyScheme,
    u: &PyGridFunction,
    horizon: f64,
    bits: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let p = core::PrecisionSpec::new(bits).map_err(err)?;
    let report = core::roundoff_growth_experiment(&scheme.inner, &u.inner, horizon, &p).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("epsilon", report.epsilon)?;
    d.set_item("n_steps", report.n_steps)?;
    d.set_item("final_gap", report.final_gap())?;
    d.set_item("growth_exponent", report.growth_exponent)?;
    d.set_item("diverged", report.diverged)?;
    let samples: Vec<(usize, f64, f64)> = report.samples.iter().map(|s| (s.n, s.t, s.gap)).collect();
    d.set_item("samples", samples)?;
    Ok(d)
}

#[pyfunction]
fn round_to_precision(x: f64, bits: u32) -> PyResult<f64> {
    let p = core::PrecisionSpec::new(bits).map_err(err)?;
    core::round_to_precision(x, &p).map_err(err)
}

#[pyfunction]
fn norm_tk(k: usize) -> f64 {
    core::norm_tk(k)
}

/// `sup_k ‖T_k x‖` for the finitely supported sequence with prefix `x`.
#[pyfunction]
#[pyo3(signature = (x, k_max = None))]
fn pointwise_bound(x: Vec<f64>, k_max: Option<usize>) -> PyResult<f64> {
    let seq = core::FiniteSequence::from_prefix(&x).map_err(err)?;
    let k_max = k_max.unwrap_or(seq.support_bound());
    Ok(core::pointwise_bound(&seq, k_max).map_err(err)?.bound)
}

#[pymodule]
fn laxlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGridFunction>()?;
    m.add_class::<PyScheme>()?;
    m.add_class::<PyHeatSemigroup>()?;
    m.add_function(wrap_pyfunction!(stability_check, m)?)?;
    m.add_function(wrap_pyfunction!(von_neumann_check, m)?)?;
    m.add_function(wrap_pyfunction!(consistency_check, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(roundoff_growth, m)?)?;
    m.add_function(wrap_pyfunction!(round_to_precision, m)?)?;
    m.add_function(wrap_pyfunction!(norm_tk, m)?)?;
    m.add_function(wrap_pyfunction!(pointwise_bound, m)?)?;
    Ok(())
}
