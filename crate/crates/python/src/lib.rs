//! Python bindings. Structured inputs and results cross the boundary as
//! plain dicts and lists with the same keys as the JSON configs and outputs.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::de::DeserializeOwned;
use serde::Serialize;

use cavity_ising::correlation::{correlation_report, ReportOptions};
use cavity_ising::fermion::{ground_sector, spectrum, SectorMode};
use cavity_ising::meanfield::{
    energy_per_particle, measured_order_parameters, minimize_phi, stationary_points, SearchGrid,
};
use cavity_ising::model::{effective_field, EffectiveField, IsingProfile, SystemParams};
use cavity_ising::oracle::{exact_ground, DenseSpinProblem, ParityBlock};
use cavity_ising::phases::{self, Axis, FieldPhase, MagneticThresholds, PhaseDiagramSpec};
use cavity_ising::validation::{validate_random_instances, ValidationOptions};
use cavity_ising::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_)
        | Error::Config(_)
        | Error::LengthMismatch { .. }
        | Error::TooLarge(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(value: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = value
        .py()
        .import("json")?
        .call_method1("dumps", (value,))?
        .extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn search_from(search: Option<&Bound<'_, PyAny>>) -> PyResult<SearchGrid> {
    search.map_or(Ok(SearchGrid::default()), from_py)
}

/// Chain plus resonator modes.
///
/// `ising` is a dict such as `{"kind": "uniform", "J": 0.05}` or
/// `{"kind": "rectangular", "J_max": 0.35, "J_min": 0.05, "period": 2}`.
#[pyclass(name = "System", module = "cavity_ising", from_py_object)]
#[derive(Clone)]
struct PySystem {
    params: SystemParams,
}

#[pymethods]
impl PySystem {
    #[new]
    #[pyo3(signature = (n=200, e_z=0.8, e_c=8.0, ising=None, modes=vec![1], lambda0=0.0))]
    fn new(
        n: usize,
        e_z: f64,
        e_c: f64,
        ising: Option<&Bound<'_, PyAny>>,
        modes: Vec<usize>,
        lambda0: f64,
    ) -> PyResult<Self> {
        let ising: IsingProfile = match ising {
            Some(v) => from_py(v)?,
            None => IsingProfile::Uniform { j: 0.05 },
        };
        let params = SystemParams {
            n,
            e_z,
            e_c,
            ising,
            modes,
            lambda0,
        };
        params.build().map_err(err)?;
        Ok(PySystem { params })
    }

    /// Build from a dict with the keys of the config's `model` block.
    #[staticmethod]
    fn from_dict(d: &Bound<'_, PyAny>) -> PyResult<Self> {
        let params: SystemParams = from_py(d)?;
        params.build().map_err(err)?;
        Ok(PySystem { params })
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.params)
    }

    /// Copy with a different coupling amplitude.
    fn with_lambda0(&self, lambda0: f64) -> Self {
        PySystem {
            params: SystemParams {
                lambda0,
                ..self.params.clone()
            },
        }
    }

    #[getter]
    fn n(&self) -> usize {
        self.params.n
    }

    #[getter]
    fn lambda0(&self) -> f64 {
        self.params.lambda0
    }

    #[getter]
    fn modes(&self) -> Vec<usize> {
        self.params.modes.clone()
    }

    /// Bond couplings `J(j)`.
    fn couplings(&self) -> PyResult<Vec<f64>> {
        Ok(self.params.chain().map_err(err)?.couplings().to_vec())
    }

    /// `ω_l + 4D_l` per mode.
    fn stiffness(&self) -> PyResult<Vec<f64>> {
        let (_, modes) = self.params.build().map_err(err)?;
        Ok(modes.modes().iter().map(|m| m.stiffness()).collect())
    }

    /// Ground-state energy per site at fixed order parameters.
    fn energy(&self, py: Python<'_>, phi: Vec<f64>) -> PyResult<f64> {
        let (chain, modes) = self.params.build().map_err(err)?;
        py.detach(|| energy_per_particle(&chain, &modes, &phi))
            .map_err(err)
    }

    /// `(Ω(j), θ(j))` felt by the spins at order parameters `phi`.
    fn effective_field(&self, phi: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let (chain, modes) = self.params.build().map_err(err)?;
        let f = effective_field(&chain, &modes, &phi).map_err(err)?;
        Ok((f.omega, f.theta))
    }

    /// Global minimizer: dict with `phi`, `sigma_x`, `e_g`, `boundary_hit`,
    /// `alternatives` and `field_phase`.
    #[pyo3(signature = (search=None))]
    fn minimize<'py>(
        &self,
        py: Python<'py>,
        search: Option<&Bound<'py, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let search = search_from(search)?;
        let (chain, modes) = self.params.build().map_err(err)?;
        let state = py
            .detach(|| minimize_phi(&chain, &modes, &search))
            .map_err(err)?;
        let out = to_py(py, &state)?;
        out.set_item("field_phase", to_py(py, &FieldPhase::of(&state))?)?;
        Ok(out)
    }

    /// `Σˣ_l` evaluated from `⟨σˣ_j⟩` in the chain ground state.
    fn measured_order_parameters(&self, py: Python<'_>, phi: Vec<f64>) -> PyResult<Vec<f64>> {
        let (chain, modes) = self.params.build().map_err(err)?;
        py.detach(|| measured_order_parameters(&chain, &modes, &phi))
            .map_err(err)
    }

    /// Stationary points of a single-mode system.
    #[pyo3(signature = (search=None))]
    fn stationary_points<'py>(
        &self,
        py: Python<'py>,
        search: Option<&Bound<'py, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let search = search_from(search)?;
        let (chain, modes) = self.params.build().map_err(err)?;
        let points = py
            .detach(|| stationary_points(&chain, &modes, &search))
            .map_err(err)?;
        to_py(py, &points)
    }

    /// Spin expectations, `ρ_{j,j+n}` and correlation lengths at `phi`
    /// (default: the minimizer), plus the magnetic-order label.
    #[pyo3(signature = (phi=None, rho_max=10, xi_window=None, thresholds=None))]
    fn correlations<'py>(
        &self,
        py: Python<'py>,
        phi: Option<Vec<f64>>,
        rho_max: usize,
        xi_window: Option<usize>,
        thresholds: Option<&Bound<'py, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let thresholds: MagneticThresholds = match thresholds {
            Some(t) => from_py(t)?,
            None => MagneticThresholds::default(),
        };
        let (chain, modes) = self.params.build().map_err(err)?;
        let (report, assessment, phi) = py
            .detach(|| -> cavity_ising::Result<_> {
                let state = match phi {
                    Some(phi) => {
                        let e_g = energy_per_particle(&chain, &modes, &phi)?;
                        let sigma_x = modes
                            .modes()
                            .iter()
                            .zip(&phi)
                            .map(|(m, p)| m.stiffness() * p)
                            .collect();
                        cavity_ising::meanfield::MeanFieldState {
                            phi,
                            sigma_x,
                            e_g,
                            boundary_hit: false,
                            alternatives: Vec::new(),
                        }
                    }
                    None => minimize_phi(&chain, &modes, &SearchGrid::default())?,
                };
                let field = effective_field(&chain, &modes, &state.phi)?;
                let solution = ground_sector(&field, chain.couplings(), SectorMode::Even)?;
                let report =
                    correlation_report(&solution, &field, ReportOptions { xi_window, rho_max })?;
                let assessment = phases::classify_magnetic_order(
                    &report,
                    FieldPhase::of(&state),
                    &chain,
                    &thresholds,
                )?;
                Ok((report, assessment, state.phi))
            })
            .map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("phi", phi)?;
        out.set_item("sigma_z_rot", report.sigma_z_rot.clone())?;
        out.set_item("sigma_z_lab", report.sigma_z_lab.clone())?;
        out.set_item("sigma_x_lab", report.sigma_x_lab.clone())?;
        out.set_item("xi_right", report.xi_right())?;
        out.set_item("xi_left", report.xi_left())?;
        out.set_item("xi_mean", report.xi_mean())?;
        out.set_item("rho", report.rho.clone())?;
        out.set_item("magnetic_order", assessment.order.label())?;
        out.set_item("diagnostics", to_py(py, &assessment.diagnostics)?)?;
        Ok(out.into_any())
    }

    fn __repr__(&self) -> String {
        format!(
            "System(N={}, E_z={}, E_c={}, ising={:?}, modes={:?}, lambda0={})",
            self.params.n,
            self.params.e_z,
            self.params.e_c,
            self.params.ising,
            self.params.modes,
            self.params.lambda0
        )
    }
}

/// Minimize at every value of `axis` ("lambda0", "J_min" or "E_z").
#[pyfunction]
#[pyo3(signature = (system, values, axis="lambda0", search=None, stationary=false))]
fn sweep<'py>(
    py: Python<'py>,
    system: &PySystem,
    values: Vec<f64>,
    axis: &str,
    search: Option<&Bound<'py, PyAny>>,
    stationary: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let axis: Axis = from_py(&axis.into_pyobject(py)?.into_any())?;
    let search = search_from(search)?;
    let result = py
        .detach(|| phases::sweep(&system.params, axis, &values, &search, stationary))
        .map_err(err)?;
    to_py(py, &result)
}

/// λ₀ᶜ located on `values` and refined by bisection.
#[pyfunction]
#[pyo3(signature = (system, values, search=None))]
fn critical_coupling(
    py: Python<'_>,
    system: &PySystem,
    values: Vec<f64>,
    search: Option<&Bound<'_, PyAny>>,
) -> PyResult<f64> {
    let search = search_from(search)?;
    py.detach(|| {
        let r = phases::sweep(&system.params, Axis::Lambda0, &values, &search, false)?;
        phases::critical_coupling(&r)
    })
    .map_err(err)
}

/// Transition-order analysis of a single-mode λ₀ sweep.
#[pyfunction]
#[pyo3(signature = (system, values, search=None, options=None))]
fn transition_order<'py>(
    py: Python<'py>,
    system: &PySystem,
    values: Vec<f64>,
    search: Option<&Bound<'py, PyAny>>,
    options: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let search = search_from(search)?;
    let options = options.map_or(Ok(phases::TransitionOptions::default()), from_py)?;
    let analysis = py
        .detach(|| {
            let r = phases::sweep(&system.params, Axis::Lambda0, &values, &search, true)?;
            phases::classify_transition_order(&r, &options)
        })
        .map_err(err)?;
    to_py(py, &analysis)
}

/// Phase diagram; `spec` has the keys of the config's `phase-diagram` block.
#[pyfunction]
#[pyo3(signature = (system, spec, search=None))]
fn phase_diagram<'py>(
    py: Python<'py>,
    system: &PySystem,
    spec: &Bound<'py, PyAny>,
    search: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let spec: PhaseDiagramSpec = from_py(spec)?;
    let search = search_from(search)?;
    let d = py
        .detach(|| phases::phase_diagram(&system.params, &spec, &search))
        .map_err(err)?;
    to_py(py, &d)
}

/// Quasiparticle energies `Λ_k` (ascending) of a chain with fields `omega`
/// and bonds `couplings` in the even-parity sector.
#[pyfunction]
fn quasiparticle_spectrum(omega: Vec<f64>, couplings: Vec<f64>) -> PyResult<Vec<f64>> {
    let n = omega.len();
    let field = EffectiveField {
        omega,
        theta: vec![0.0; n],
    };
    spectrum(&field, &couplings, cavity_ising::fermion::Sector::Even).map_err(err)
}

/// Even-parity ground energy by exact diagonalization (N ≤ 14).
#[pyfunction]
fn exact_ground_energy(py: Python<'_>, omega: Vec<f64>, couplings: Vec<f64>) -> PyResult<f64> {
    py.detach(|| {
        let problem = DenseSpinProblem::new(omega, couplings)?;
        Ok(exact_ground(&problem, ParityBlock::Even)?.energy)
    })
    .map_err(err)
}

/// Free-fermion ground energy of the same even-parity block.
#[pyfunction]
fn fermion_ground_energy(omega: Vec<f64>, couplings: Vec<f64>) -> PyResult<f64> {
    let n = omega.len();
    let field = EffectiveField {
        omega,
        theta: vec![0.0; n],
    };
    Ok(ground_sector(&field, &couplings, SectorMode::Even)
        .map_err(err)?
        .physical_energy())
}

/// Seeded comparison against exact diagonalization; keys as in the
/// config's `validate` block.
#[pyfunction]
#[pyo3(signature = (options=None))]
fn validate<'py>(
    py: Python<'py>,
    options: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let options: ValidationOptions = options.map_or(Ok(ValidationOptions::default()), from_py)?;
    let report = py
        .detach(|| validate_random_instances(&options))
        .map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
#[pyo3(name = "cavity_ising")]
fn cavity_ising_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(critical_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(transition_order, m)?)?;
    m.add_function(wrap_pyfunction!(phase_diagram, m)?)?;
    m.add_function(wrap_pyfunction!(quasiparticle_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(exact_ground_energy, m)?)?;
    m.add_function(wrap_pyfunction!(fermion_ground_energy, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add("CONDENSED_THRESHOLD", phases::CONDENSED_THRESHOLD)?;
    Ok(())
}
