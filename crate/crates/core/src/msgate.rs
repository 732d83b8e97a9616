//! Mølmer–Sørensen gate between two spins sharing a phonon mode.
//!
//! Space [phonon, spin 1, spin 2]. With J = σ_x1 + σ_x2 the driven RWA
//! Hamiltonian is (g⁰/4)·J·(b†e^{iδt} + b e^{−iδt}); the flip-flop
//! |gg⟩ ↔ |ee⟩ then runs at g_MS = (g⁰)²/(8δ).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::hilbert::{embed, ops, partial_trace, ComplexMatrix, CompositeSpace, DensityMatrix};
use crate::lindblad::{
    envelope, evolve, observable, Dissipator, IntegratorConfig, Sampling, TimeDependentHamiltonian, Trajectory,
};
use crate::units::{ghz, mhz};
use crate::C64;

pub const PHONON: usize = 0;
pub const SPIN1: usize = 1;
pub const SPIN2: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct MSConfig {
    /// Spin and phonon frequencies (rad·µs⁻¹); only the pre-RWA model uses them.
    pub omega_e: f64,
    pub omega_p: f64,
    pub g0: f64,
    pub delta: f64,
    /// Phonon Hilbert-space dimension.
    pub n_max: usize,
    pub gamma_e: f64,
    pub gamma_p: f64,
    /// Defaults to π/(2g_MS), one full gg → ee transfer.
    pub t_end: Option<f64>,
    pub samples: usize,
    /// Integrate the interaction-picture Hamiltonian before the RWA.
    pub pre_rwa: bool,
    pub integrator: IntegratorConfig,
}

impl Default for MSConfig {
    /// g⁰/2π = 14.8 MHz, δ/2π = 148 MHz: g_MS/2π = 185 kHz, π/(4g_MS) ≈ 0.676 µs.
    fn default() -> Self {
        Self {
            omega_e: ghz(1.5),
            omega_p: ghz(2.0),
            g0: mhz(14.8),
            delta: mhz(148.0),
            n_max: 5,
            gamma_e: 0.0,
            gamma_p: 0.0,
            t_end: None,
            samples: 401,
            pre_rwa: false,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl MSConfig {
    pub fn g_ms(&self) -> Result<f64> {
        g_ms(self.g0, self.delta)
    }

    /// Drive frequencies ω₁ = ω_e + ω_p − δ and ω₂ = ω_p − ω_e − δ.
    pub fn drive_frequencies(&self) -> (f64, f64) {
        (self.omega_e + self.omega_p - self.delta, self.omega_p - self.omega_e - self.delta)
    }

    pub fn bell_time(&self) -> Result<f64> {
        Ok(FRAC_PI_4 / self.g_ms()?)
    }

    pub fn t_end(&self) -> Result<f64> {
        match self.t_end {
            Some(t) => Ok(t),
            None => Ok(FRAC_PI_2 / self.g_ms()?),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.g_ms()?;
        if self.n_max < 2 {
            return Err(Error::InvalidParameter(format!("phonon cutoff must be ≥ 2, got {}", self.n_max)));
        }
        if self.gamma_e < 0.0 || self.gamma_p < 0.0 {
            return Err(Error::InvalidParameter("rates must be ≥ 0".into()));
        }
        if self.pre_rwa && !(self.omega_p > self.omega_e && self.omega_e > 0.0) {
            return Err(Error::InvalidParameter("pre-RWA model needs ω_p > ω_e > 0".into()));
        }
        if (self.g0 / self.delta).abs() > 0.3 {
            log::warn!("g⁰/δ = {:.3} is not ≪ 1", self.g0 / self.delta);
        }
        Ok(())
    }
}

/// g_MS = (g⁰)²/(8δ).
pub fn g_ms(g0: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("MS detuning must be nonzero and finite, got {delta}")));
    }
    Ok(g0 * g0 / (8.0 * delta))
}

/// 0.5[cos(2g_MS t) + 1], the effective-model |gg⟩ population.
pub fn ideal_gg(g_ms: f64, t: f64) -> f64 {
    0.5 * ((2.0 * g_ms * t).cos() + 1.0)
}

fn space(cfg: &MSConfig) -> Result<CompositeSpace> {
    CompositeSpace::new(vec![cfg.n_max, 2, 2])
}

pub fn hamiltonian(cfg: &MSConfig) -> Result<TimeDependentHamiltonian> {
    let sp = space(cfg)?;
    let b = embed(&ops::destroy(cfg.n_max), &sp, PHONON)?;
    let s1 = embed(&ops::sigma_minus(), &sp, SPIN1)?;
    let s2 = embed(&ops::sigma_minus(), &sp, SPIN2)?;
    let lower = &s1 + &s2;
    let h0 = TimeDependentHamiltonian::zero(sp.total_dim());
    let i = C64::new(0.0, 1.0);
    if !cfg.pre_rwa {
        let j = &lower + lower.adjoint();
        let a = &j * (&b + b.adjoint()) * C64::new(cfg.g0 / 4.0, 0.0);
        let c = &j * ((b.adjoint() - &b) * i) * C64::new(cfg.g0 / 4.0, 0.0);
        let d = cfg.delta;
        return Ok(h0.with_term(envelope(move |t| (d * t).cos()), a).with_term(envelope(move |t| (d * t).sin()), c));
    }
    // g(t)·(σe^{−iω_e t} + h.c.)(be^{−iω_p t} + h.c.), g(t) = (g⁰/2)(cos ω₁t + cos ω₂t)
    let (w1, w2) = cfg.drive_frequencies();
    let g0 = cfg.g0;
    let g = move |t: f64| 0.5 * g0 * ((w1 * t).cos() + (w2 * t).cos());
    let mut h = h0;
    for (x, w) in [(&lower * &b, cfg.omega_e + cfg.omega_p), (&lower * b.adjoint(), cfg.omega_e - cfg.omega_p)] {
        let herm = &x + x.adjoint();
        let anti = (&x - x.adjoint()) * (-i);
        h = h
            .with_term(envelope(move |t| g(t) * (w * t).cos()), herm)
            .with_term(envelope(move |t| g(t) * (w * t).sin()), anti);
    }
    Ok(h)
}

fn dissipators(cfg: &MSConfig, sp: &CompositeSpace) -> Result<Vec<Dissipator>> {
    Ok(vec![
        Dissipator::new(embed(&ops::excited(), sp, SPIN1)?, cfg.gamma_e),
        Dissipator::new(embed(&ops::excited(), sp, SPIN2)?, cfg.gamma_e),
        Dissipator::new(embed(&ops::destroy(cfg.n_max), sp, PHONON)?, cfg.gamma_p),
    ])
}

fn observables(cfg: &MSConfig, sp: &CompositeSpace) -> Result<Vec<(String, ComplexMatrix)>> {
    let d = sp.total_dim();
    let proj = |levels: &[usize]| ops::projector(d, sp.index(levels));
    let mut odd = ComplexMatrix::zeros(d, d);
    for n in 0..cfg.n_max {
        odd += proj(&[n, 0, 1]) + proj(&[n, 1, 0]);
    }
    Ok(vec![
        observable("n_gg", proj(&[0, 0, 0])),
        observable("n_ee", proj(&[0, 1, 1])),
        observable("odd", odd),
        observable("top_fock", embed(&ops::projector(cfg.n_max, cfg.n_max - 1), sp, PHONON)?),
    ])
}

#[derive(Clone, Debug)]
pub struct MsResult {
    /// Observables n_gg, n_ee (phonon vacuum), odd (|ge⟩ + |eg⟩, any phonon
    /// number) and top_fock.
    pub trajectory: Trajectory,
    pub g_ms: f64,
    /// 0.5[cos(2g_MS t) + 1] on the trajectory times.
    pub ideal: Vec<f64>,
}

fn run(cfg: &MSConfig, t_end: f64, sampling: Sampling) -> Result<Trajectory> {
    cfg.validate()?;
    let sp = space(cfg)?;
    let h = hamiltonian(cfg)?;
    let rho0 = DensityMatrix::basis(sp.total_dim(), sp.index(&[0, 0, 0]));
    let max_step = if cfg.pre_rwa {
        let (w1, _) = cfg.drive_frequencies();
        0.5 / (w1.abs() + cfg.omega_e + cfg.omega_p)
    } else {
        0.1 / cfg.delta.abs()
    };
    let icfg = IntegratorConfig {
        sampling,
        max_step: Some(cfg.integrator.max_step.map_or(max_step, |m| m.min(max_step))),
        ..cfg.integrator.clone()
    };
    let tr = evolve(&h, &dissipators(cfg, &sp)?, None, &rho0, (0.0, t_end), &icfg, &observables(cfg, &sp)?)?;
    let top = tr.observable("top_fock").expect("observable").iter().cloned().fold(0.0, f64::max);
    if top > 1e-3 {
        log::warn!("top Fock level population {top:.2e} exceeds 1e-3; raise n_max");
    }
    Ok(tr)
}

/// Integrate from |gg, 0⟩.
pub fn simulate(cfg: &MSConfig) -> Result<MsResult> {
    let g = cfg.g_ms()?;
    let trajectory = run(cfg, cfg.t_end()?, Sampling::Uniform(cfg.samples.max(2)))?;
    let ideal = trajectory.times.iter().map(|&t| ideal_gg(g, t)).collect();
    Ok(MsResult { trajectory, g_ms: g, ideal })
}

/// Two-spin state after tracing out the phonon.
pub fn reduced_spins(cfg: &MSConfig, rho: &DensityMatrix) -> Result<DensityMatrix> {
    partial_trace(rho, &space(cfg)?, &[SPIN1, SPIN2])
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellFidelity {
    pub fidelity: f64,
    /// Optimal relative phase χ of (|gg⟩ + e^{iχ}|ee⟩)/√2.
    pub chi: f64,
    pub purity: f64,
}

/// F = √((ρ_gg,gg + ρ_ee,ee + 2|ρ_gg,ee|)/2), maximized over χ.
pub fn bell_fidelity_of(spins: &DensityMatrix) -> Result<BellFidelity> {
    if spins.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("expected a two-spin state, got dim {}", spins.dim())));
    }
    let m = spins.matrix();
    let c = m[(3, 0)];
    let overlap = 0.5 * (m[(0, 0)].re + m[(3, 3)].re + 2.0 * c.norm());
    Ok(BellFidelity { fidelity: overlap.max(0.0).sqrt(), chi: c.arg(), purity: spins.purity() })
}

pub fn bell_state_fidelity(cfg: &MSConfig, t_stop: f64) -> Result<BellFidelity> {
    let sp = space(cfg)?;
    if t_stop == 0.0 {
        let rho0 = DensityMatrix::basis(sp.total_dim(), sp.index(&[0, 0, 0]));
        return bell_fidelity_of(&reduced_spins(cfg, &rho0)?);
    }
    let tr = run(cfg, t_stop, Sampling::Times(Vec::new()))?;
    bell_fidelity_of(&reduced_spins(cfg, &tr.final_state)?)
}

/// Flip-flop rate from the first upward crossing of n_ee = 0.5, which the
/// effective model places at t = π/(4g_MS). Linear interpolation between samples.
pub fn fitted_rate(times: &[f64], n_ee: &[f64]) -> Option<f64> {
    let k = n_ee.windows(2).position(|w| w[0] < 0.5 && w[1] >= 0.5)?;
    let (t0, t1, y0, y1) = (times[k], times[k + 1], n_ee[k], n_ee[k + 1]);
    let t = t0 + (0.5 - y0) * (t1 - t0) / (y1 - y0);
    Some(FRAC_PI_4 / t)
}
