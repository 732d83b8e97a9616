//! Python bindings. Rates and couplings are angular (rad/µs), times in µs;
//! the `mhz`/`khz`/... helpers convert from ordinary frequencies.

use phononbus_core::hilbert::{self, ComplexMatrix, CompositeSpace};
use phononbus_core::msgate::{self, MSConfig as CoreMs};
use phononbus_core::nuclear::{self, HyperfineConfig as CoreHf, Timing};
use phononbus_core::pitchcatch::{self, WaveguideConfig as CoreWg};
use phononbus_core::strain::{self, MWDriveConfig, StrainTensor, SusceptibilityConstants};
use phononbus_core::transduction::{self, DirectChainConfig, InputState, DELAY_GRID, WINDOW};
use phononbus_core::{units, Error, C64};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::StepUnderflow { .. } | Error::TooManySteps { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn input_state(name: &str) -> PyResult<InputState> {
    match name {
        "excited" => Ok(InputState::Excited),
        "ground" => Ok(InputState::Ground),
        "superposition" => Ok(InputState::Superposition),
        other => Err(PyValueError::new_err(format!("unknown input state {other:?}"))),
    }
}

#[pyclass(name = "DensityMatrix", module = "phononbus", from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix {
    inner: hilbert::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// Validated density matrix from a square list of rows.
    #[new]
    fn new(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = ComplexMatrix::from_fn(d, d, |i, j| rows[i][j]);
        Ok(Self { inner: hilbert::DensityMatrix::new(m).map_err(py_err)? })
    }

    #[staticmethod]
    fn basis(dim: usize, k: usize) -> PyResult<Self> {
        if k >= dim {
            return Err(PyValueError::new_err(format!("level {k} out of range for dim {dim}")));
        }
        Ok(Self { inner: hilbert::DensityMatrix::basis(dim, k) })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn trace(&self) -> C64 {
        self.inner.trace()
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    fn to_list(&self) -> Vec<Vec<C64>> {
        let m = self.inner.matrix();
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
    }

    /// Uhlmann fidelity √F form.
    fn fidelity(&self, other: &PyDensityMatrix) -> PyResult<f64> {
        hilbert::fidelity(&self.inner, &other.inner).map_err(py_err)
    }

    fn partial_trace(&self, dims: Vec<usize>, keep: Vec<usize>) -> PyResult<Self> {
        let space = CompositeSpace::new(dims).map_err(py_err)?;
        Ok(Self { inner: hilbert::partial_trace(&self.inner, &space, &keep).map_err(py_err)? })
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={}, purity={:.6})", self.inner.dim(), self.inner.purity())
    }
}

#[pyclass(name = "TransferConfig", module = "phononbus", get_all, set_all, from_py_object)]
#[derive(Clone)]
struct PyTransferConfig {
    g_scp: f64,
    g_pe: f64,
    gamma_sc: f64,
    gamma_p: f64,
    gamma_e: f64,
    n_max: usize,
    input: String,
    /// Pulse separation (µs); optimized when None.
    dtau: Option<f64>,
    samples: usize,
}

#[pymethods]
impl PyTransferConfig {
    #[new]
    #[pyo3(signature = (
        g_scp = units::mhz(50.0), g_pe = units::mhz(1.0), gamma_sc = units::khz(10.0),
        gamma_p = units::khz(0.1), gamma_e = units::khz(10.0), n_max = 3,
        input = "excited".to_string(), dtau = None, samples = 401
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        g_scp: f64,
        g_pe: f64,
        gamma_sc: f64,
        gamma_p: f64,
        gamma_e: f64,
        n_max: usize,
        input: String,
        dtau: Option<f64>,
        samples: usize,
    ) -> Self {
        Self { g_scp, g_pe, gamma_sc, gamma_p, gamma_e, n_max, input, dtau, samples }
    }

    fn lossless(&self) -> Self {
        Self { gamma_sc: 0.0, gamma_p: 0.0, gamma_e: 0.0, ..self.clone() }
    }
}

impl PyTransferConfig {
    fn to_core(&self) -> PyResult<DirectChainConfig> {
        let mut cfg = DirectChainConfig {
            g_scp: self.g_scp,
            g_pe: self.g_pe,
            gamma_sc: self.gamma_sc,
            gamma_p: self.gamma_p,
            gamma_e: self.gamma_e,
            n_max: self.n_max,
            input: input_state(&self.input)?,
            samples: self.samples,
            ..DirectChainConfig::default()
        };
        cfg.tau_scp = WINDOW / cfg.g_scp;
        cfg.tau_pe = cfg.tau_scp + WINDOW / cfg.g_pe;
        cfg.validate().map_err(py_err)?;
        Ok(cfg)
    }
}

/// Δτ-optimized (or fixed-Δτ) transfer; returns fidelity, dtau and population traces.
#[pyfunction]
fn transfer<'py>(py: Python<'py>, cfg: &PyTransferConfig) -> PyResult<Bound<'py, PyDict>> {
    let core = cfg.to_core()?;
    let dtau = cfg.dtau;
    let r = py
        .detach(|| {
            let d = match dtau {
                Some(d) => d,
                None => transduction::optimize_delay(&core, transduction::default_delay_range(&core), DELAY_GRID)?.dtau,
            };
            transduction::run_transfer(&core.with_delay(d))
        })
        .map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("fidelity", r.fidelity)?;
    out.set_item("dtau", r.dtau)?;
    out.set_item("t", r.trajectory.times.clone())?;
    for name in ["pop_sc", "pop_ph", "pop_spin"] {
        out.set_item(name, r.trajectory.observable(name).unwrap_or_default().to_vec())?;
    }
    out.set_item("output", PyDensityMatrix { inner: r.output })?;
    Ok(out)
}

/// Fidelity grid; returns (g_pe, gamma_e, F, dtau) tuples, g_pe outer.
#[pyfunction]
#[pyo3(signature = (cfg, g_pe, gamma_e, workers = 1))]
fn sweep(
    py: Python<'_>,
    cfg: &PyTransferConfig,
    g_pe: Vec<f64>,
    gamma_e: Vec<f64>,
    workers: usize,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let core = cfg.to_core()?;
    let table = py.detach(|| transduction::sweep(&core, &g_pe, &gamma_e, workers)).map_err(py_err)?;
    Ok(table.cells.iter().map(|c| (c.g_pe, c.gamma_e, c.fidelity, c.dtau)).collect())
}

#[pyclass(name = "WaveguideConfig", module = "phononbus", get_all, set_all, from_py_object)]
#[derive(Clone)]
struct PyWaveguideConfig {
    length: f64,
    speed: f64,
    n0: u64,
    modes: usize,
    g_qm: f64,
    phi: f64,
    transmission: f64,
    samples: usize,
}

#[pymethods]
impl PyWaveguideConfig {
    #[new]
    #[pyo3(signature = (length = 0.4e-3, speed = 1000.0, n0 = 2000, modes = 201, g_qm = units::mhz(1.0),
                        phi = std::f64::consts::PI, transmission = 1.0, samples = 401))]
    #[allow(clippy::too_many_arguments)]
    fn new(length: f64, speed: f64, n0: u64, modes: usize, g_qm: f64, phi: f64, transmission: f64, samples: usize) -> Self {
        Self { length, speed, n0, modes, g_qm, phi, transmission, samples }
    }

    /// κ = 2πg²/δ.
    fn kappa(&self) -> PyResult<f64> {
        Ok(self.to_core()?.kappa())
    }
}

impl PyWaveguideConfig {
    fn to_core(&self) -> PyResult<CoreWg> {
        let mut cfg = CoreWg {
            length: self.length,
            speed: self.speed,
            n0: self.n0,
            modes: self.modes,
            g_qm: self.g_qm,
            phi: self.phi,
            transmission: self.transmission,
            samples: self.samples,
            ..CoreWg::default()
        };
        cfg.tau_pc = cfg.default_onset();
        cfg.validate().map_err(py_err)?;
        Ok(cfg)
    }
}

/// Explicit-mode release and catch; returns population traces.
#[pyfunction]
fn pitch_catch<'py>(py: Python<'py>, cfg: &PyWaveguideConfig) -> PyResult<Bound<'py, PyDict>> {
    let core = cfg.to_core()?;
    let tr = py.detach(|| pitchcatch::simulate_schrodinger(&core)).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("t", tr.times.clone())?;
    for name in ["pop_sc", "pop_wg", "pop_ph"] {
        out.set_item(name, tr.observable(name).unwrap_or_default().to_vec())?;
    }
    Ok(out)
}

/// Cascaded master equation with the same pulses; returns population traces.
#[pyfunction]
fn pitch_catch_cascaded<'py>(py: Python<'py>, cfg: &PyWaveguideConfig) -> PyResult<Bound<'py, PyDict>> {
    let core = cfg.to_core()?;
    let tr = py.detach(|| pitchcatch::simulate_cascaded(&core)).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("t", tr.times.clone())?;
    for name in ["pop_sc", "pop_ph"] {
        out.set_item(name, tr.observable(name).unwrap_or_default().to_vec())?;
    }
    Ok(out)
}

/// Maximum (SC, phonon) population discrepancy between the two models.
#[pyfunction]
fn cross_validate(py: Python<'_>, cfg: &PyWaveguideConfig) -> PyResult<(f64, f64)> {
    let core = cfg.to_core()?;
    let cv = py.detach(|| pitchcatch::cross_validate(&core)).map_err(py_err)?;
    Ok((cv.max_sc, cv.max_ph))
}

/// Wave packet at peak waveguide occupation: time, x, intensity, skewness.
#[pyfunction]
fn packet_snapshot<'py>(py: Python<'py>, cfg: &PyWaveguideConfig) -> PyResult<Bound<'py, PyDict>> {
    let core = cfg.to_core()?;
    let snap = py.detach(|| pitchcatch::mid_flight_snapshot(&core)).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("time", snap.time)?;
    out.set_item("x", snap.profile.iter().map(|p| p.0).collect::<Vec<_>>())?;
    out.set_item("intensity", snap.profile.iter().map(|p| p.1).collect::<Vec<_>>())?;
    out.set_item("skewness", pitchcatch::skewness(&snap.profile))?;
    Ok(out)
}

/// Defect-frame strain combinations of a cubic-frame tensor.
#[pyfunction]
fn defect_strain<'py>(
    py: Python<'py>,
    e11: f64,
    e22: f64,
    e33: f64,
    e12: f64,
    e13: f64,
    e23: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let eps = StrainTensor::from_components(e11, e22, e33, e12, e13, e23).map_err(py_err)?;
    let c = strain::cubic_to_defect(&eps);
    let out = PyDict::new(py);
    out.set_item("xx_minus_yy", c.eps_xx_minus_yy)?;
    out.set_item("zx", c.eps_zx)?;
    out.set_item("xy", c.eps_xy)?;
    out.set_item("yz", c.eps_yz)?;
    out.set_item("xx_plus_yy", c.eps_xx_plus_yy)?;
    out.set_item("zz", c.eps_zz)?;
    Ok(out)
}

/// Orbital coupling d·(ε_xx − ε_yy) in rad/µs; `d` defaults to 1 PHz/strain.
#[pyfunction]
#[pyo3(signature = (e11, e22, e33, e12, e13, e23, d = None))]
fn g_orb(e11: f64, e22: f64, e33: f64, e12: f64, e13: f64, e23: f64, d: Option<f64>) -> PyResult<f64> {
    let eps = StrainTensor::from_components(e11, e22, e33, e12, e13, e23).map_err(py_err)?;
    let d = d.unwrap_or(SusceptibilityConstants::default().d);
    Ok(d * strain::cubic_to_defect(&eps).eps_xx_minus_yy)
}

/// Effective spin–phonon coupling under a microwave drive; `detuning` is δ = ω_p − Δ.
#[pyfunction]
#[pyo3(signature = (omega, g_orb, theta = 0.0, detuning = None))]
fn mw_coupling(omega: f64, g_orb: f64, theta: f64, detuning: Option<f64>) -> PyResult<C64> {
    let d = MWDriveConfig::default();
    let delta_level = detuning.map_or(d.delta_level, |x| d.omega_p - x);
    let cfg = MWDriveConfig::resonant(delta_level, d.omega_b, d.omega_p, omega, theta, g_orb);
    strain::mw_effective_coupling(&cfg).map_err(py_err)
}

#[pyclass(name = "HyperfineConfig", module = "phononbus", get_all, set_all, from_py_object)]
#[derive(Clone)]
struct PyHyperfineConfig {
    a_parallel: f64,
    omega_mw: f64,
    gamma_e: f64,
    gamma_n: f64,
    omega_l: f64,
}

#[pymethods]
impl PyHyperfineConfig {
    #[new]
    #[pyo3(signature = (a_parallel = units::khz(500.0), omega_mw = units::khz(3.9), gamma_e = units::khz(10.0),
                        gamma_n = units::hz(1.0), omega_l = 0.0))]
    fn new(a_parallel: f64, omega_mw: f64, gamma_e: f64, gamma_n: f64, omega_l: f64) -> Self {
        Self { a_parallel, omega_mw, gamma_e, gamma_n, omega_l }
    }
}

impl PyHyperfineConfig {
    fn to_core(&self) -> CoreHf {
        CoreHf {
            a_parallel: self.a_parallel,
            omega_mw: self.omega_mw,
            gamma_e: self.gamma_e,
            gamma_n: self.gamma_n,
            omega_l: self.omega_l,
        }
    }
}

/// Electron → nuclear SWAP; returns F_en, total time and per-gate records.
#[pyfunction]
#[pyo3(signature = (cfg, electron = None, pulses = None))]
fn nuclear_swap<'py>(
    py: Python<'py>,
    cfg: &PyHyperfineConfig,
    electron: Option<PyDensityMatrix>,
    pulses: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let rho = match electron {
        Some(e) => e.inner,
        None => InputState::Superposition.density().map_err(py_err)?,
    };
    let timing = pulses.map_or(Timing::Resonant, Timing::Pulses);
    let core = cfg.to_core();
    let r = py.detach(|| nuclear::swap_protocol(&core, &rho, timing)).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("fidelity", r.fidelity)?;
    out.set_item("total_time", r.total_time)?;
    out.set_item("gates", r.gates.iter().map(|g| (g.gate.name(), g.duration, g.f_running)).collect::<Vec<_>>())?;
    out.set_item("nuclear_output", PyDensityMatrix { inner: r.nuclear_output })?;
    Ok(out)
}

#[pyclass(name = "MSConfig", module = "phononbus", get_all, set_all, from_py_object)]
#[derive(Clone)]
struct PyMsConfig {
    omega_e: f64,
    omega_p: f64,
    g0: f64,
    delta: f64,
    n_max: usize,
    gamma_e: f64,
    gamma_p: f64,
    t_end: Option<f64>,
    samples: usize,
    pre_rwa: bool,
}

#[pymethods]
impl PyMsConfig {
    #[new]
    #[pyo3(signature = (g0 = units::mhz(14.8), delta = units::mhz(148.0), n_max = 5, gamma_e = 0.0, gamma_p = 0.0,
                        t_end = None, samples = 401, pre_rwa = false,
                        omega_e = units::ghz(1.5), omega_p = units::ghz(2.0)))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        g0: f64,
        delta: f64,
        n_max: usize,
        gamma_e: f64,
        gamma_p: f64,
        t_end: Option<f64>,
        samples: usize,
        pre_rwa: bool,
        omega_e: f64,
        omega_p: f64,
    ) -> Self {
        Self { omega_e, omega_p, g0, delta, n_max, gamma_e, gamma_p, t_end, samples, pre_rwa }
    }

    fn g_ms(&self) -> PyResult<f64> {
        msgate::g_ms(self.g0, self.delta).map_err(py_err)
    }

    /// π/(4g_MS).
    fn bell_time(&self) -> PyResult<f64> {
        self.to_core().bell_time().map_err(py_err)
    }
}

impl PyMsConfig {
    fn to_core(&self) -> CoreMs {
        CoreMs {
            omega_e: self.omega_e,
            omega_p: self.omega_p,
            g0: self.g0,
            delta: self.delta,
            n_max: self.n_max,
            gamma_e: self.gamma_e,
            gamma_p: self.gamma_p,
            t_end: self.t_end,
            samples: self.samples,
            pre_rwa: self.pre_rwa,
            ..CoreMs::default()
        }
    }
}

/// g_MS = g0²/(8δ).
#[pyfunction]
fn g_ms(g0: f64, delta: f64) -> PyResult<f64> {
    msgate::g_ms(g0, delta).map_err(py_err)
}

/// Populations of |gg,0⟩ and |ee,0⟩ with the ideal curve.
#[pyfunction]
fn ms_gate<'py>(py: Python<'py>, cfg: &PyMsConfig) -> PyResult<Bound<'py, PyDict>> {
    let core = cfg.to_core();
    let r = py.detach(|| msgate::simulate(&core)).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("t", r.trajectory.times.clone())?;
    for name in ["n_gg", "n_ee", "odd"] {
        out.set_item(name, r.trajectory.observable(name).unwrap_or_default().to_vec())?;
    }
    out.set_item("ideal", r.ideal)?;
    out.set_item("g_ms", r.g_ms)?;
    Ok(out)
}

/// (fidelity, chi, purity) of the two-spin state at `t_stop`.
#[pyfunction]
fn bell_state_fidelity(py: Python<'_>, cfg: &PyMsConfig, t_stop: f64) -> PyResult<(f64, f64, f64)> {
    let core = cfg.to_core();
    let b = py.detach(|| msgate::bell_state_fidelity(&core, t_stop)).map_err(py_err)?;
    Ok((b.fidelity, b.chi, b.purity))
}

#[pyfunction]
fn mhz(f: f64) -> f64 {
    units::mhz(f)
}

#[pyfunction]
fn khz(f: f64) -> f64 {
    units::khz(f)
}

#[pyfunction]
fn ghz(f: f64) -> f64 {
    units::ghz(f)
}

#[pyfunction]
fn hz(f: f64) -> f64 {
    units::hz(f)
}

#[pyfunction]
fn to_mhz(omega: f64) -> f64 {
    units::to_mhz(omega)
}

#[pyfunction]
fn to_khz(omega: f64) -> f64 {
    units::to_khz(omega)
}

#[pymodule]
fn phononbus(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyTransferConfig>()?;
    m.add_class::<PyWaveguideConfig>()?;
    m.add_class::<PyHyperfineConfig>()?;
    m.add_class::<PyMsConfig>()?;
    m.add_function(wrap_pyfunction!(transfer, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(pitch_catch, m)?)?;
    m.add_function(wrap_pyfunction!(pitch_catch_cascaded, m)?)?;
    m.add_function(wrap_pyfunction!(cross_validate, m)?)?;
    m.add_function(wrap_pyfunction!(packet_snapshot, m)?)?;
    m.add_function(wrap_pyfunction!(defect_strain, m)?)?;
    m.add_function(wrap_pyfunction!(g_orb, m)?)?;
    m.add_function(wrap_pyfunction!(mw_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(nuclear_swap, m)?)?;
    m.add_function(wrap_pyfunction!(g_ms, m)?)?;
    m.add_function(wrap_pyfunction!(ms_gate, m)?)?;
    m.add_function(wrap_pyfunction!(bell_state_fidelity, m)?)?;
    for f in [
        wrap_pyfunction!(mhz, m)?,
        wrap_pyfunction!(khz, m)?,
        wrap_pyfunction!(ghz, m)?,
        wrap_pyfunction!(hz, m)?,
        wrap_pyfunction!(to_mhz, m)?,
        wrap_pyfunction!(to_khz, m)?,
    ] {
        m.add_function(f)?;
    }
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
