//! Run configuration: TOML on disk, converted to core types at this boundary.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use phononbus_core::hilbert::DensityMatrix;
use phononbus_core::lindblad::{IntegratorConfig, Method};
use phononbus_core::msgate::MSConfig;
use phononbus_core::nuclear::{HyperfineConfig, Timing};
use phononbus_core::pitchcatch::WaveguideConfig;
use phononbus_core::strain::SusceptibilityConstants;
use phononbus_core::transduction::{DirectChainConfig, InputState, WINDOW};
use serde::{Deserialize, Serialize};

use crate::freq::Freq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Transfer,
    Sweep,
    PitchCatch,
    StrainMap,
    NuclearSwap,
    MsGate,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Transfer => "transfer",
            Protocol::Sweep => "sweep",
            Protocol::PitchCatch => "pitch-catch",
            Protocol::StrainMap => "strain-map",
            Protocol::NuclearSwap => "nuclear-swap",
            Protocol::MsGate => "ms-gate",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Input {
    #[default]
    Excited,
    Ground,
    Superposition,
}

impl Input {
    pub fn state(self) -> InputState {
        match self {
            Input::Excited => InputState::Excited,
            Input::Ground => InputState::Ground,
            Input::Superposition => InputState::Superposition,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    #[default]
    Rk45,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorBlock {
    pub method: MethodName,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Fixed step for rk4 (µs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_step_us: Option<f64>,
}

impl Default for IntegratorBlock {
    fn default() -> Self {
        Self { method: MethodName::Rk45, rel_tol: 1e-8, abs_tol: 1e-10, dt_us: None, max_step_us: None }
    }
}

impl IntegratorBlock {
    pub fn to_core(&self) -> Result<IntegratorConfig> {
        let method = match self.method {
            MethodName::Rk45 => Method::Rk45 { rel_tol: self.rel_tol, abs_tol: self.abs_tol },
            MethodName::Rk4 => Method::Rk4 { dt: self.dt_us.context("integrator.dt_us is required for rk4")? },
        };
        Ok(IntegratorConfig { method, max_step: self.max_step_us, ..IntegratorConfig::default() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferBlock {
    pub g_scp: Freq,
    pub g_pe: Freq,
    pub gamma_sc: Freq,
    pub gamma_p: Freq,
    pub gamma_e: Freq,
    pub n_max: usize,
    pub input: Input,
    pub phase_compensation: bool,
    /// Pulse separation; optimized when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dtau_us: Option<f64>,
    pub samples: usize,
}

impl Default for TransferBlock {
    fn default() -> Self {
        Self {
            g_scp: Freq::mhz(50.0),
            g_pe: Freq::mhz(1.0),
            gamma_sc: Freq::khz(10.0),
            gamma_p: Freq::khz(0.1),
            gamma_e: Freq::khz(10.0),
            n_max: 3,
            input: Input::Excited,
            phase_compensation: true,
            dtau_us: None,
            samples: 401,
        }
    }
}

impl TransferBlock {
    pub fn to_core(&self, integrator: &IntegratorConfig) -> DirectChainConfig {
        let mut cfg = DirectChainConfig {
            g_scp: self.g_scp.angular(),
            g_pe: self.g_pe.angular(),
            gamma_sc: self.gamma_sc.angular(),
            gamma_p: self.gamma_p.angular(),
            gamma_e: self.gamma_e.angular(),
            n_max: self.n_max,
            input: self.input.state(),
            phase_compensation: self.phase_compensation,
            samples: self.samples,
            integrator: integrator.clone(),
            ..DirectChainConfig::default()
        };
        cfg.tau_scp = WINDOW / cfg.g_scp;
        cfg.tau_pe = cfg.tau_scp + WINDOW / cfg.g_pe;
        cfg
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepBlock {
    pub g_scp: Freq,
    pub gamma_sc: Freq,
    pub gamma_p: Freq,
    pub n_max: usize,
    pub g_pe_min: Freq,
    pub g_pe_max: Freq,
    pub g_pe_points: usize,
    pub gamma_e_min: Freq,
    pub gamma_e_max: Freq,
    pub gamma_e_points: usize,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            g_scp: Freq::mhz(50.0),
            gamma_sc: Freq::khz(10.0),
            gamma_p: Freq::khz(0.1),
            n_max: 3,
            g_pe_min: Freq::mhz(0.1),
            g_pe_max: Freq::mhz(10.0),
            g_pe_points: 20,
            gamma_e_min: Freq::khz(1.0),
            gamma_e_max: Freq::khz(100.0),
            gamma_e_points: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PitchCatchBlock {
    pub length_m: f64,
    pub speed_m_per_s: f64,
    pub n0: u64,
    pub modes: usize,
    pub g_qm: Freq,
    pub phi_rad: f64,
    pub transmission: f64,
    pub samples: usize,
}

impl Default for PitchCatchBlock {
    fn default() -> Self {
        let d = WaveguideConfig::default();
        Self {
            length_m: d.length,
            speed_m_per_s: d.speed,
            n0: d.n0,
            modes: d.modes,
            g_qm: Freq::mhz(1.0),
            phi_rad: d.phi,
            transmission: d.transmission,
            samples: d.samples,
        }
    }
}

impl PitchCatchBlock {
    pub fn to_core(&self, integrator: &IntegratorConfig) -> WaveguideConfig {
        let mut cfg = WaveguideConfig {
            length: self.length_m,
            speed: self.speed_m_per_s,
            n0: self.n0,
            modes: self.modes,
            g_qm: self.g_qm.angular(),
            phi: self.phi_rad,
            transmission: self.transmission,
            samples: self.samples,
            integrator: integrator.clone(),
            ..WaveguideConfig::default()
        };
        cfg.tau_pc = cfg.default_onset();
        cfg
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrainMapBlock {
    /// CSV with header x,y,z,e11,e22,e33,e12,e13,e23; relative paths resolve
    /// against the config file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Susceptibilities per unit strain.
    pub t_parallel: Freq,
    pub t_perp: Freq,
    pub d: Freq,
    pub f: Freq,
    pub normalization: f64,
}

impl Default for StrainMapBlock {
    fn default() -> Self {
        let p = Freq::ghz(1e6);
        Self { input: None, t_parallel: p, t_perp: p, d: p, f: p, normalization: 1.0 }
    }
}

impl StrainMapBlock {
    pub fn constants(&self) -> SusceptibilityConstants {
        SusceptibilityConstants {
            t_parallel: self.t_parallel.angular(),
            t_perp: self.t_perp.angular(),
            d: self.d.angular(),
            f: self.f.angular(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NuclearSwapBlock {
    pub a_parallel: Freq,
    pub omega_mw: Freq,
    pub omega_l: Freq,
    pub gamma_e: Freq,
    pub gamma_n: Freq,
    pub input: Input,
    /// Fixed decoupling pulses per rotation at fixed Ω_mw; resonant timing when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulses: Option<usize>,
}

impl Default for NuclearSwapBlock {
    fn default() -> Self {
        Self {
            a_parallel: Freq::khz(500.0),
            omega_mw: Freq::khz(3.9),
            omega_l: Freq::hz(0.0),
            gamma_e: Freq::khz(10.0),
            gamma_n: Freq::hz(1.0),
            input: Input::Superposition,
            pulses: None,
        }
    }
}

impl NuclearSwapBlock {
    pub fn to_core(&self) -> Result<(HyperfineConfig, DensityMatrix, Timing)> {
        let cfg = HyperfineConfig {
            a_parallel: self.a_parallel.angular(),
            omega_mw: self.omega_mw.angular(),
            omega_l: self.omega_l.angular(),
            gamma_e: self.gamma_e.angular(),
            gamma_n: self.gamma_n.angular(),
        };
        let timing = self.pulses.map_or(Timing::Resonant, Timing::Pulses);
        Ok((cfg, self.input.state().density()?, timing))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MsGateBlock {
    pub f_e: Freq,
    pub f_p: Freq,
    pub g0: Freq,
    pub delta: Freq,
    pub n_max: usize,
    pub gamma_e: Freq,
    pub gamma_p: Freq,
    /// Defaults to one full |gg⟩ → |ee⟩ transfer, π/(2g_MS).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end_us: Option<f64>,
    pub samples: usize,
    pub pre_rwa: bool,
}

impl Default for MsGateBlock {
    fn default() -> Self {
        Self {
            f_e: Freq::ghz(1.5),
            f_p: Freq::ghz(2.0),
            g0: Freq::mhz(14.8),
            delta: Freq::mhz(148.0),
            n_max: 5,
            gamma_e: Freq::hz(0.0),
            gamma_p: Freq::hz(0.0),
            t_end_us: None,
            samples: 401,
            pre_rwa: false,
        }
    }
}

impl MsGateBlock {
    pub fn to_core(&self, integrator: &IntegratorConfig) -> MSConfig {
        MSConfig {
            omega_e: self.f_e.angular(),
            omega_p: self.f_p.angular(),
            g0: self.g0.angular(),
            delta: self.delta.angular(),
            n_max: self.n_max,
            gamma_e: self.gamma_e.angular(),
            gamma_p: self.gamma_p.angular(),
            t_end: self.t_end_us,
            samples: self.samples,
            pre_rwa: self.pre_rwa,
            integrator: integrator.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Normally set by the subcommand; a config that names one must match it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<Protocol>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub integrator: IntegratorBlock,
    pub transfer: TransferBlock,
    pub sweep: SweepBlock,
    pub pitch_catch: PitchCatchBlock,
    pub strain_map: StrainMapBlock,
    pub nuclear_swap: NuclearSwapBlock,
    pub ms_gate: MsGateBlock,
}

fn positive(key: &str, f: &Freq) -> Result<()> {
    if !(f.value > 0.0) {
        bail!("{key}: coupling must be > 0, got {f}");
    }
    Ok(())
}

fn rate(key: &str, f: &Freq) -> Result<()> {
    if f.value < 0.0 {
        bail!("{key}: rate must be ≥ 0, got {f}");
    }
    Ok(())
}

fn count(key: &str, n: usize, min: usize) -> Result<()> {
    if n < min {
        bail!("{key}: must be ≥ {min}, got {n}");
    }
    Ok(())
}

fn finite_positive(key: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        bail!("{key}: must be a finite positive number, got {x}");
    }
    Ok(())
}

impl RunConfig {
    /// Key-level checks; physics-level checks happen in the core configs.
    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.workers {
            count("workers", w, 1)?;
        }
        let i = &self.integrator;
        finite_positive("integrator.rel_tol", i.rel_tol)?;
        finite_positive("integrator.abs_tol", i.abs_tol)?;
        if let Some(dt) = i.dt_us {
            finite_positive("integrator.dt_us", dt)?;
        }
        if let Some(m) = i.max_step_us {
            finite_positive("integrator.max_step_us", m)?;
        }

        let t = &self.transfer;
        positive("transfer.g_scp", &t.g_scp)?;
        positive("transfer.g_pe", &t.g_pe)?;
        rate("transfer.gamma_sc", &t.gamma_sc)?;
        rate("transfer.gamma_p", &t.gamma_p)?;
        rate("transfer.gamma_e", &t.gamma_e)?;
        count("transfer.n_max", t.n_max, 2)?;
        count("transfer.samples", t.samples, 2)?;
        if let Some(d) = t.dtau_us {
            if !(d >= 0.0 && d.is_finite()) {
                bail!("transfer.dtau_us: must be ≥ 0, got {d}");
            }
        }

        let s = &self.sweep;
        positive("sweep.g_scp", &s.g_scp)?;
        rate("sweep.gamma_sc", &s.gamma_sc)?;
        rate("sweep.gamma_p", &s.gamma_p)?;
        count("sweep.n_max", s.n_max, 2)?;
        positive("sweep.g_pe_min", &s.g_pe_min)?;
        positive("sweep.g_pe_max", &s.g_pe_max)?;
        positive("sweep.gamma_e_min", &s.gamma_e_min)?;
        positive("sweep.gamma_e_max", &s.gamma_e_max)?;
        count("sweep.g_pe_points", s.g_pe_points, 1)?;
        count("sweep.gamma_e_points", s.gamma_e_points, 1)?;

        let p = &self.pitch_catch;
        finite_positive("pitch_catch.length_m", p.length_m)?;
        finite_positive("pitch_catch.speed_m_per_s", p.speed_m_per_s)?;
        positive("pitch_catch.g_qm", &p.g_qm)?;
        if !(p.transmission > 0.0 && p.transmission <= 1.0) {
            bail!("pitch_catch.transmission: must lie in (0, 1], got {}", p.transmission);
        }
        if !p.phi_rad.is_finite() {
            bail!("pitch_catch.phi_rad: must be finite");
        }
        count("pitch_catch.samples", p.samples, 2)?;

        let m = &self.strain_map;
        for (k, f) in [("t_parallel", &m.t_parallel), ("t_perp", &m.t_perp), ("d", &m.d), ("f", &m.f)] {
            if !f.value.is_finite() {
                bail!("strain_map.{k}: must be finite");
            }
        }
        if !m.normalization.is_finite() {
            bail!("strain_map.normalization: must be finite");
        }

        let n = &self.nuclear_swap;
        positive("nuclear_swap.a_parallel", &n.a_parallel)?;
        positive("nuclear_swap.omega_mw", &n.omega_mw)?;
        rate("nuclear_swap.gamma_e", &n.gamma_e)?;
        rate("nuclear_swap.gamma_n", &n.gamma_n)?;
        if let Some(k) = n.pulses {
            count("nuclear_swap.pulses", k, 1)?;
        }

        let g = &self.ms_gate;
        positive("ms_gate.g0", &g.g0)?;
        if g.delta.value == 0.0 {
            bail!("ms_gate.delta: must be nonzero");
        }
        rate("ms_gate.gamma_e", &g.gamma_e)?;
        rate("ms_gate.gamma_p", &g.gamma_p)?;
        count("ms_gate.n_max", g.n_max, 2)?;
        count("ms_gate.samples", g.samples, 2)?;
        if let Some(t) = g.t_end_us {
            finite_positive("ms_gate.t_end_us", t)?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing config")
    }
}

/// Parse and validate a config from TOML text.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| anyhow::anyhow!("{e}"))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parse a config file; a relative strain-map input resolves against the
/// file's directory.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = parse_config_str(&text).with_context(|| format!("in {}", path.display()))?;
    if let Some(input) = &cfg.strain_map.input {
        if input.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            cfg.strain_map.input = Some(base.join(input));
        }
    }
    Ok(cfg)
}
