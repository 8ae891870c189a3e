//! Python bindings. The module imports as `kyle_disclosure`.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use kyle_disclosure as core;
use kyle_disclosure::report::{self, OutputFormat};
use kyle_disclosure::simulator::{self, NoiseConvention, SimulationConfig};

fn to_py(e: core::Error) -> PyErr {
    use core::Error::*;
    match e {
        InvalidParams { .. }
        | WrongN { .. }
        | MonopolistHasNoA
        | EmptySimulation
        | ConventionMismatch { .. } => PyValueError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

fn format_of(format: &str) -> PyResult<OutputFormat> {
    format.parse().map_err(PyValueError::new_err)
}

#[pyclass(name = "MarketParams", frozen, get_all, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyMarketParams {
    insiders: u32,
    auctions: usize,
    prior_var: f64,
    noise_var: f64,
    prior_mean: f64,
}

impl PyMarketParams {
    fn inner(&self) -> core::MarketParams {
        core::MarketParams::new(self.insiders, self.auctions, self.prior_var, self.noise_var)
            .with_prior_mean(self.prior_mean)
    }
}

#[pymethods]
impl PyMarketParams {
    #[new]
    #[pyo3(signature = (insiders, auctions, prior_var = 1.0, noise_var = 1.0, prior_mean = 0.0))]
    fn new(
        insiders: u32,
        auctions: usize,
        prior_var: f64,
        noise_var: f64,
        prior_mean: f64,
    ) -> PyResult<Self> {
        let p = Self {
            insiders,
            auctions,
            prior_var,
            noise_var,
            prior_mean,
        };
        p.inner().validate().map_err(to_py)?;
        Ok(p)
    }

    fn __repr__(&self) -> String {
        format!(
            "MarketParams(insiders={}, auctions={}, prior_var={}, noise_var={}, prior_mean={})",
            self.insiders, self.auctions, self.prior_var, self.noise_var, self.prior_mean
        )
    }
}

/// One auction of the disclosure equilibrium. `lambda_` avoids the keyword.
#[pyclass(name = "AuctionRow", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyAuctionRow {
    index: usize,
    a: f64,
    lambda_: f64,
    beta: f64,
    gamma: f64,
    alpha: f64,
    delta: f64,
    sigma_post: f64,
    z_var: f64,
}

#[pyclass(name = "Equilibrium", frozen)]
struct PyEquilibrium {
    inner: core::EquilibriumPath,
}

#[pymethods]
impl PyEquilibrium {
    #[getter]
    fn rows(&self) -> Vec<PyAuctionRow> {
        self.inner
            .rows
            .iter()
            .map(|r| PyAuctionRow {
                index: r.index,
                a: r.a,
                lambda_: r.lambda,
                beta: r.beta,
                gamma: r.gamma,
                alpha: r.alpha,
                delta: r.delta,
                sigma_post: r.sigma_post,
                z_var: r.z_var,
            })
            .collect()
    }

    #[getter]
    fn alpha0(&self) -> f64 {
        self.inner.alpha0
    }

    #[getter]
    fn delta0(&self) -> f64 {
        self.inner.delta0
    }

    #[getter]
    fn ex_ante_profit(&self) -> f64 {
        self.inner.ex_ante_profit
    }

    /// Σ_n for n = 0..=N.
    fn sigmas(&self) -> Vec<f64> {
        (0..=self.inner.rows.len())
            .map(|n| self.inner.sigma(n))
            .collect()
    }

    fn lambdas(&self) -> Vec<f64> {
        self.inner.rows.iter().map(|r| r.lambda).collect()
    }

    /// Largest scaled residual of the equilibrium difference system.
    fn max_residual(&self) -> f64 {
        core::disclosure::verify_difference_system(&self.inner, 0.0).max_residual()
    }

    #[pyo3(signature = (format = "csv"))]
    fn table(&self, format: &str) -> PyResult<String> {
        Ok(report::solve_table(&self.inner).render(format_of(format)?))
    }

    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }
}

#[pyclass(name = "BenchmarkPath", frozen)]
struct PyBenchmarkPath {
    inner: core::benchmark::HsPath,
    k: Option<f64>,
}

#[pymethods]
impl PyBenchmarkPath {
    fn lambdas(&self) -> Vec<f64> {
        self.inner.rows.iter().map(|r| r.lambda).collect()
    }

    fn betas(&self) -> Vec<f64> {
        self.inner.rows.iter().map(|r| r.beta).collect()
    }

    fn sigmas(&self) -> Vec<f64> {
        (0..=self.inner.rows.len())
            .map(|n| self.inner.sigma(n))
            .collect()
    }

    /// λ₁/λ₂ from the closed form; None unless N = 2.
    #[getter]
    fn k(&self) -> Option<f64> {
        self.k
    }

    #[getter]
    fn boundary_mismatch(&self) -> f64 {
        self.inner.boundary_mismatch
    }

    #[getter]
    fn reconstructed(&self) -> bool {
        self.inner.reconstructed
    }

    #[pyo3(signature = (format = "csv"))]
    fn table(&self, format: &str) -> PyResult<String> {
        Ok(report::benchmark_table(&self.inner, self.k).render(format_of(format)?))
    }
}

#[pyclass(name = "SimulationReport", frozen)]
struct PySimulationReport {
    inner: simulator::SimulationReport,
}

#[pymethods]
impl PySimulationReport {
    fn all_pass(&self) -> bool {
        self.inner.all_pass()
    }

    fn checks(&self) -> Vec<(String, bool)> {
        self.inner.checks()
    }

    /// (estimate, standard error, expected) of mean per-insider profit.
    fn profit(&self) -> (f64, f64, f64) {
        let p = &self.inner.profit;
        (p.estimate, p.std_error, p.expected)
    }

    /// (estimate, standard error, expected) of the structural λ slope at auction n.
    fn structural_lambda(&self, n: usize) -> PyResult<(f64, f64, f64)> {
        let a = self
            .inner
            .auctions
            .get(n.wrapping_sub(1))
            .ok_or_else(|| PyValueError::new_err("auction index out of range"))?;
        let e = &a.structural_lambda;
        Ok((e.estimate, e.std_error, e.expected))
    }

    #[getter]
    fn max_final_error(&self) -> f64 {
        self.inner.max_final_error
    }

    fn to_json(&self) -> String {
        report::simulation_json(&self.inner)
    }
}

#[pyfunction]
fn solve(params: &PyMarketParams) -> PyResult<PyEquilibrium> {
    let inner = core::disclosure::solve(&params.inner()).map_err(to_py)?;
    Ok(PyEquilibrium { inner })
}

/// The mixing coefficients a_n², computed backward from a_N² = M.
#[pyfunction]
fn a_squared_sequence(insiders: u32, auctions: usize) -> Vec<f64> {
    core::disclosure::a_squared_sequence(insiders, auctions)
}

/// Closed-form two-auction values as a dict; N must be 2.
#[pyfunction]
#[pyo3(signature = (params, disclosure = true))]
fn two_period<'py>(
    py: Python<'py>,
    params: &PyMarketParams,
    disclosure: bool,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let p = params.inner();
    let b = if disclosure {
        core::disclosure::two_period_closed_form(&p)
    } else {
        core::benchmark::two_period_no_disclosure(&p)
    }
    .map_err(to_py)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("lambda1", b.lambda1)?;
    d.set_item("lambda2", b.lambda2)?;
    d.set_item("beta1", b.beta1)?;
    d.set_item("beta2", b.beta2)?;
    d.set_item("sigma1", b.sigma1)?;
    d.set_item("sigma2", b.sigma2)?;
    d.set_item("gamma1", b.gamma1)?;
    d.set_item("z_var1", b.z_var1)?;
    d.set_item("k", b.k)?;
    d.set_item("profit1", b.profit1)?;
    d.set_item("profit2", b.profit2)?;
    Ok(d)
}

#[pyfunction]
fn benchmark(params: &PyMarketParams) -> PyResult<PyBenchmarkPath> {
    let p = params.inner();
    let inner = core::benchmark::solve_hs_multiperiod(&p).map_err(to_py)?;
    let k = if p.auctions == 2 {
        core::benchmark::two_period_no_disclosure(&p)
            .map_err(to_py)?
            .k
    } else {
        None
    };
    Ok(PyBenchmarkPath { inner, k })
}

/// The limit constant A with its analytic bracket: (A, lower, upper).
#[pyfunction]
fn limit_constant(insiders: u32) -> PyResult<(f64, f64, f64)> {
    let r = core::asymptotics::limit_constant_a(insiders).map_err(to_py)?;
    Ok((r.a, r.bracket.lower, r.bracket.upper))
}

#[pyfunction]
#[pyo3(signature = (params, paths, seed = 42, convention = "independent"))]
fn simulate(
    params: &PyMarketParams,
    paths: u64,
    seed: u64,
    convention: &str,
) -> PyResult<PySimulationReport> {
    let convention: NoiseConvention = convention.parse().map_err(to_py)?;
    let path = core::disclosure::solve(&params.inner()).map_err(to_py)?;
    let cfg = SimulationConfig::new(paths, seed, convention);
    let inner = simulator::simulate_paths(&path, &cfg).map_err(to_py)?;
    Ok(PySimulationReport { inner })
}

/// Raises ValueError naming the first statistic that differs between the
/// conventions; otherwise returns None.
#[pyfunction]
fn convention_equivalence(a: &PySimulationReport, b: &PySimulationReport) -> PyResult<()> {
    simulator::convention_equivalence(&a.inner, &b.inner)
        .map(|_| ())
        .map_err(to_py)
}

/// Writes figure `which` into `outdir` and returns the written paths.
#[pyfunction]
#[pyo3(signature = (which, outdir, format = "csv"))]
fn write_figure(which: u8, outdir: std::path::PathBuf, format: &str) -> PyResult<Vec<String>> {
    let out =
        core::figures::figure(which, &core::figures::FigureOptions::default()).map_err(to_py)?;
    if !out.passed() {
        return Err(PyArithmeticError::new_err(format!(
            "figure {which} assertion failed"
        )));
    }
    let files = out
        .write(&outdir, format_of(format)?)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(files.into_iter().map(|p| p.display().to_string()).collect())
}

#[pymodule]
#[pyo3(name = "kyle_disclosure")]
fn kyle_disclosure_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMarketParams>()?;
    m.add_class::<PyAuctionRow>()?;
    m.add_class::<PyEquilibrium>()?;
    m.add_class::<PyBenchmarkPath>()?;
    m.add_class::<PySimulationReport>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(a_squared_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(two_period, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(limit_constant, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(convention_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(write_figure, m)?)?;
    Ok(())
}
