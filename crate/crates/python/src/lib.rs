//! Python bindings for the kdsim core. Enum arguments are the snake_case names
//! used in scenario files ("skd", "linear_y", "up", ...).

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::de::DeserializeOwned;

use kdsim::classical::{run_scenario, ClassicalScenario};
use kdsim::config::Scenario;
use kdsim::pauli::{self, ScanScenario};
use kdsim::perturbation::{self as pt, Method, Process};
use kdsim::{Direction, Error, Polarization};

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::Config(_) | Error::Json(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse<T: DeserializeOwned>(what: &str, s: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| PyValueError::new_err(format!("unknown {what} '{s}'")))
}

fn name<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

/// One laser pulse; `harmonic` 1 or 2 multiplies the base frequency.
#[pyclass(name = "LaserPulse", frozen)]
#[derive(Clone)]
struct PyLaserPulse(kdsim::LaserPulseSpec);

#[pymethods]
impl PyLaserPulse {
    #[new]
    #[pyo3(signature = (intensity, wavelength=1.064e-6, harmonic=1, duration=10e-12, polarization="linear_y", direction="plus_z"))]
    fn new(intensity: f64, wavelength: f64, harmonic: u32, duration: f64, polarization: &str, direction: &str) -> PyResult<Self> {
        let pol: Polarization = parse("polarization", polarization)?;
        let dir: Direction = parse("direction", direction)?;
        kdsim::LaserPulseSpec::new(intensity, wavelength, harmonic, duration, pol, dir).map(Self).map_err(err)
    }

    #[getter]
    fn intensity(&self) -> f64 {
        self.0.intensity
    }

    #[getter]
    fn polarization(&self) -> String {
        name(&self.0.polarization)
    }

    /// omega, k, a0 (V·s/m), e0, b0 and the normalized amplitude qA0/(mc).
    fn derived<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = kdsim::derived_quantities(&self.0);
        let out = PyDict::new(py);
        for (k, v) in [("omega", d.omega), ("k", d.k), ("a0", d.a0), ("e0", d.e0), ("b0", d.b0), ("a0_norm", d.a0_norm)] {
            out.set_item(k, v)?;
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("LaserPulse(intensity={:e}, harmonic={}, polarization='{}')", self.0.intensity, self.0.harmonic, self.polarization())
    }
}

/// A full scenario document with defaults for everything not given.
#[pyclass(name = "Scenario")]
#[derive(Clone)]
struct PyScenario(Scenario);

#[pymethods]
impl PyScenario {
    #[new]
    #[pyo3(signature = (json=None))]
    fn new(json: Option<&str>) -> PyResult<Self> {
        match json {
            Some(j) => Scenario::from_json(j).map(Self).map_err(err),
            None => Ok(Self(Scenario::default())),
        }
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Scenario::load(&path).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.canonical_json()
    }

    /// sha256 of the canonical JSON.
    fn hash(&self) -> String {
        self.0.hash()
    }

    #[getter]
    fn pulses(&self) -> Vec<PyLaserPulse> {
        self.0.pulses.iter().map(|p| PyLaserPulse(*p)).collect()
    }
}

fn process(s: &str) -> PyResult<Process> {
    parse("process", s)
}

/// Table scaling law P = α I^a v^b λ^c τ^d (regular_kd has none).
#[pyfunction]
fn scaling_probability(process_name: &str, intensity: f64, v: f64, wavelength: f64, tau: f64) -> PyResult<f64> {
    use kdsim::ScalingLaw as L;
    let law = match process(process_name)? {
        Process::Skd => L::SKD,
        Process::Depolarizer => L::DEPOLARIZER,
        Process::TwoColorKd => L::TWO_COLOR_KD,
        Process::RegularKd => return Err(PyValueError::new_err("regular_kd has no scaling law")),
    };
    kdsim::scaling_probability(&law, intensity, v, wavelength, tau).map_err(err)
}

/// Perturbative amplitude. `method` is "quadrature" (vertex engine on the
/// process field) or "asymptotic" (closed form where one exists).
#[pyfunction]
#[pyo3(signature = (process_name, intensity, v=1e7, wavelength=1.064e-6, tau=10e-12, method="quadrature", polarization=None))]
fn perturbative_amplitude(
    py: Python<'_>,
    process_name: &str,
    intensity: f64,
    v: f64,
    wavelength: f64,
    tau: f64,
    method: &str,
    polarization: Option<&str>,
) -> PyResult<Py<PyDict>> {
    let p = process(process_name)?;
    let m: Method = parse("method", method)?;
    let pol = polarization.map(|s| parse::<Polarization>("polarization", s)).transpose()?;
    let a = py
        .allow_threads(|| match (m, p) {
            (Method::Quadrature, _) => {
                pt::process_setup(p, intensity, v, wavelength, tau, pol).and_then(|s| pt::skd_amplitude_with(&s, &Default::default()))
            }
            (_, Process::Skd) => pt::skd_amplitude(intensity, wavelength, tau, m),
            (_, Process::Depolarizer) => pt::depolarizer_amplitude(intensity, v, wavelength, tau, m),
            (_, Process::TwoColorKd) => pt::two_color_kd_amplitude(intensity, v, wavelength, tau, m),
            (_, Process::RegularKd) => pt::regular_kd_amplitude(intensity, wavelength, tau, m),
        })
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("process", p.name())?;
    d.set_item("method", name(&a.method))?;
    d.set_item("amplitude", Complex64::new(a.amplitude.re, a.amplitude.im))?;
    d.set_item("probability", a.probability)?;
    d.set_item("breakdown", a.breakdown)?;
    Ok(d.unbind())
}

fn scan(wavelength: f64, tau: f64, v: f64, ladder_max: i32, tolerance: f64) -> ScanScenario {
    let mut s = ScanScenario { lambda: wavelength, tau, speed: v, ladder_max, ..Default::default() };
    s.options.rel_tol = tolerance;
    s
}

/// Final-state probability of a process from the Pauli ladder solver.
#[pyfunction]
#[pyo3(signature = (process_name, intensity, v=1e7, wavelength=1.064e-6, tau=10e-12, ladder_max=12, tolerance=1e-9))]
fn ladder_probability(
    py: Python<'_>,
    process_name: &str,
    intensity: f64,
    v: f64,
    wavelength: f64,
    tau: f64,
    ladder_max: i32,
    tolerance: f64,
) -> PyResult<f64> {
    let p = process(process_name)?;
    let s = scan(wavelength, tau, v, ladder_max, tolerance);
    py.allow_threads(|| pauli::process_probability(p, intensity, &s)).map(|r| r.0).map_err(err)
}

/// SKD momentum distribution: list of (n, p_up, p_down) for |n| ≤ n_show.
#[pyfunction]
#[pyo3(signature = (intensity=1e18, n_show=7, tau=10e-12, ladder_max=12, tolerance=1e-9))]
fn momentum_distribution(
    py: Python<'_>,
    intensity: f64,
    n_show: i32,
    tau: f64,
    ladder_max: i32,
    tolerance: f64,
) -> PyResult<Vec<(i32, f64, f64)>> {
    let s = scan(1.064e-6, tau, 1e7, ladder_max, tolerance);
    let (rows, _) = py.allow_threads(|| pauli::figure4(intensity, &s, n_show)).map_err(err)?;
    Ok(rows.iter().map(|r| (r.n, r.p_up, r.p_down)).collect())
}

/// Classical nine-trajectory run; returns the diagnostics as a dict.
/// `json` overrides fields of the default classical setup.
#[pyfunction]
#[pyo3(signature = (json=None, threads=1))]
fn classical_run(py: Python<'_>, json: Option<&str>, threads: usize) -> PyResult<PyObject> {
    let sc: ClassicalScenario = match json {
        Some(j) => serde_json::from_str(j).map_err(|e| PyValueError::new_err(e.to_string()))?,
        None => ClassicalScenario::default(),
    };
    sc.validate().map_err(err)?;
    let (_, rep) = py.allow_threads(|| run_scenario(&sc, threads)).map_err(err)?;
    let text = serde_json::to_string(&rep).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,)).map(|o| o.unbind())
}

#[pyfunction]
fn larmor_probability(intensity: f64, wavelength: f64, tau: f64) -> f64 {
    pt::larmor_probability(intensity, wavelength, tau)
}

#[pyfunction]
#[pyo3(signature = (intensity, v, wavelength, theta=std::f64::consts::FRAC_PI_2))]
fn spurious_ratios<'py>(py: Python<'py>, intensity: f64, v: f64, wavelength: f64, theta: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = pt::spurious_ratios(intensity, v, wavelength, theta);
    let d = PyDict::new(py);
    d.set_item("first_to_second_order", r.first_to_second_order)?;
    d.set_item("intensity_isolation", r.intensity_isolation)?;
    d.set_item("two_color_to_skd", r.two_color_to_skd)?;
    d.set_item("two_color_to_skd_unsuppressed", r.two_color_to_skd_unsuppressed)?;
    d.set_item("critical_misalignment", r.critical_misalignment)?;
    Ok(d)
}

/// Runs a CLI command line (without the program name); returns the exit status.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> i32 {
    py.allow_threads(|| kdsim::cli::main_with_args(std::iter::once("kdsim".to_string()).chain(args)))
}

#[pymodule]
fn pykdsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLaserPulse>()?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(scaling_probability, m)?)?;
    m.add_function(wrap_pyfunction!(perturbative_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(ladder_probability, m)?)?;
    m.add_function(wrap_pyfunction!(momentum_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(classical_run, m)?)?;
    m.add_function(wrap_pyfunction!(larmor_probability, m)?)?;
    m.add_function(wrap_pyfunction!(spurious_ratios, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("HBAR", kdsim::constants::HBAR)?;
    m.add("MU_B", kdsim::constants::MU_B)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
