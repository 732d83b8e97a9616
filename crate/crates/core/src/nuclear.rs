//! Electron → nuclear spin SWAP built from dynamically decoupled conditional
//! and unconditional nuclear rotations.
//!
//! Space: electron ⊗ nuclear, level 0 = |0⟩. The effective Hamiltonian is
//! H_en = −A_∥ σ_n†σ_n ⊗ |0_e⟩⟨0_e| + Ω(cos θ σ_x + sin θ σ_y)_n ⊗ |1_e⟩⟨1_e|.
//! Electron π pulses and electron single-qubit gates are instantaneous.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::hilbert::{fidelity, kron, ops, partial_trace, unitary_propagator, ComplexMatrix, CompositeSpace, DensityMatrix};
use crate::lindblad::{Dissipator, Liouvillian, TimeDependentHamiltonian};
use crate::units::{hz, khz};
use crate::C64;

pub const ELECTRON: usize = 0;
pub const NUCLEAR: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperfineConfig {
    pub a_parallel: f64,
    pub omega_mw: f64,
    /// Pure-dephasing rates of the electron and nuclear spins.
    pub gamma_e: f64,
    pub gamma_n: f64,
    /// Larmor frequency; only fixes the drive frequency ω_L + A_∥/2, which the
    /// effective Hamiltonian has already absorbed.
    pub omega_l: f64,
}

impl Default for HyperfineConfig {
    fn default() -> Self {
        Self { a_parallel: khz(500.0), omega_mw: khz(3.9), gamma_e: khz(10.0), gamma_n: hz(1.0), omega_l: 0.0 }
    }
}

impl HyperfineConfig {
    pub fn lossless(self) -> Self {
        Self { gamma_e: 0.0, gamma_n: 0.0, ..self }
    }

    pub fn drive_frequency(&self) -> f64 {
        self.omega_l + 0.5 * self.a_parallel
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_parallel > 0.0 && self.omega_mw > 0.0) {
            return Err(Error::InvalidParameter("A_∥ and Ω_mw must be > 0".into()));
        }
        if self.gamma_e < 0.0 || self.gamma_n < 0.0 {
            return Err(Error::InvalidParameter("dephasing rates must be ≥ 0".into()));
        }
        if self.omega_mw / self.a_parallel > 0.05 {
            log::warn!("Ω_mw/A_∥ = {:.3} is not ≪ 1", self.omega_mw / self.a_parallel);
        }
        Ok(())
    }
}

/// H_en for drive phase θ, on electron ⊗ nuclear.
pub fn effective_hamiltonian(a_parallel: f64, omega_mw: f64, theta: f64) -> ComplexMatrix {
    let p0 = ops::projector(2, 0);
    let p1 = ops::projector(2, 1);
    let drive = ops::sigma_x() * C64::new(omega_mw * theta.cos(), 0.0) + ops::sigma_y() * C64::new(omega_mw * theta.sin(), 0.0);
    kron(&p0, &(ops::excited() * C64::new(-a_parallel, 0.0))) + kron(&p1, &drive)
}

/// θ_mw after pulse k (k ≥ 1): (k−1)φ_k + φ_c + φ₀ for odd k, (k−1)φ_k + φ₀
/// for even k, with φ_k = −(2 − δ_{1k})τA_∥ and φ_c = π for conditional gates.
pub fn phase_schedule(a_parallel: f64, tau: f64, k: usize, phi_0: f64, conditional: bool) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("pulse index starts at 1".into()));
    }
    let phi_k = -(if k == 1 { 1.0 } else { 2.0 }) * tau * a_parallel;
    let phi_c = if conditional && k % 2 == 1 { PI } else { 0.0 };
    Ok((k - 1) as f64 * phi_k + phi_c + phi_0)
}

/// (τ − π − 2τ − π − τ)^{N/2} with drive amplitude `omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DDSchedule {
    pub n: usize,
    pub tau: f64,
    pub omega: f64,
    pub phi_0: f64,
    pub conditional: bool,
}

impl DDSchedule {
    /// τ = 2π/A_∥ (free precession is the identity over every segment), N the
    /// even count closest to φ/(2Ω_mw τ), and Ω re-derived as φ/(2τN).
    pub fn for_angle(cfg: &HyperfineConfig, phi_0: f64, angle: f64, conditional: bool) -> Result<Self> {
        cfg.validate()?;
        let tau = TAU / cfg.a_parallel;
        let n = (2.0 * (angle.abs() / (2.0 * cfg.omega_mw * tau) / 2.0).round()).max(2.0) as usize;
        Ok(Self { n, tau, omega: angle / (2.0 * tau * n as f64), phi_0, conditional })
    }

    /// Fixed Ω_mw and N; τ = φ/(2Ω_mw N).
    pub fn with_pulses(cfg: &HyperfineConfig, phi_0: f64, angle: f64, n: usize, conditional: bool) -> Result<Self> {
        cfg.validate()?;
        let s = Self { n, tau: angle / (2.0 * cfg.omega_mw * n as f64), omega: cfg.omega_mw, phi_0, conditional };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 2 == 1 {
            return Err(Error::InvalidParameter(format!("pulse count N must be even and > 0, got {}", self.n)));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParameter(format!("τ must be > 0, got {}", self.tau)));
        }
        Ok(())
    }

    /// φ = 2Ωτ N.
    pub fn angle(&self) -> f64 {
        2.0 * self.omega * self.tau * self.n as f64
    }

    /// T_N = 2Nτ.
    pub fn duration(&self) -> f64 {
        2.0 * self.n as f64 * self.tau
    }

    /// (duration, θ) of the N+1 free segments; an electron π pulse follows
    /// every segment but the last.
    pub fn segments(&self, a_parallel: f64) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        (0..=self.n)
            .map(|j| {
                let dt = if j == 0 || j == self.n { self.tau } else { 2.0 * self.tau };
                Ok((dt, phase_schedule(a_parallel, self.tau, j + 1, self.phi_0, self.conditional)?))
            })
            .collect()
    }
}

fn electron_flip() -> ComplexMatrix {
    kron(&ops::sigma_x(), &ops::identity(2))
}

/// Closed-system unitary of a DD rotation.
pub fn rotation_gate(cfg: &HyperfineConfig, sched: &DDSchedule) -> Result<ComplexMatrix> {
    let x = electron_flip();
    let mut u = ops::identity(4);
    let segs = sched.segments(cfg.a_parallel)?;
    for (j, &(dt, theta)) in segs.iter().enumerate() {
        u = unitary_propagator(&effective_hamiltonian(cfg.a_parallel, sched.omega, theta), dt)? * u;
        if j + 1 < segs.len() {
            u = &x * u;
        }
    }
    Ok(u)
}

fn dephasing(cfg: &HyperfineConfig) -> Vec<Dissipator> {
    let pe = kron(&ops::excited(), &ops::identity(2));
    let pn = kron(&ops::identity(2), &ops::excited());
    vec![Dissipator::new(pe, cfg.gamma_e), Dissipator::new(pn, cfg.gamma_n)]
}

/// Open-system DD rotation: each segment is exp(L·dt) of the 16×16 generator.
pub fn rotation_channel(cfg: &HyperfineConfig, sched: &DDSchedule, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("expected a 4-dim electron ⊗ nuclear state, got {}", rho.dim())));
    }
    let x = electron_flip();
    let ds = dephasing(cfg);
    let segs = sched.segments(cfg.a_parallel)?;
    let mut m = rho.matrix().clone();
    let mut cache: Vec<((f64, f64), ComplexMatrix)> = Vec::new();
    for (j, &(dt, theta)) in segs.iter().enumerate() {
        let key = (dt, theta.rem_euclid(TAU));
        let prop = match cache.iter().find(|(k, _)| (k.0 - key.0).abs() < 1e-15 && (k.1 - key.1).abs() < 1e-12) {
            Some((_, p)) => p.clone(),
            None => {
                let h = TimeDependentHamiltonian::new(effective_hamiltonian(cfg.a_parallel, sched.omega, theta));
                let l = Liouvillian::compile(&h, &ds, None)?.dense_at(0.0);
                let p = (l * C64::new(dt, 0.0)).exp();
                cache.push((key, p.clone()));
                p
            }
        };
        let v = prop * ComplexMatrix::from_column_slice(16, 1, m.as_slice());
        m = ComplexMatrix::from_column_slice(4, 4, v.as_slice());
        if j + 1 < segs.len() {
            m = &x * m * &x;
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Nuclear rotation exp(−iφ/2 (cos φ₀ σ_x + sin φ₀ σ_y)).
pub fn ideal_rotation(phi_0: f64, angle: f64) -> ComplexMatrix {
    let n = ops::sigma_x() * C64::new(phi_0.cos(), 0.0) + ops::sigma_y() * C64::new(phi_0.sin(), 0.0);
    ops::identity(2) * C64::new((angle / 2.0).cos(), 0.0) - n * C64::new(0.0, (angle / 2.0).sin())
}

/// R^n_{φ₀,φ} or C^n_{φ₀,φ} (−φ when the electron starts in |1⟩).
pub fn ideal_gate(phi_0: f64, angle: f64, conditional: bool) -> ComplexMatrix {
    let sign = if conditional { -1.0 } else { 1.0 };
    kron(&ops::projector(2, 0), &ideal_rotation(phi_0, angle)) + kron(&ops::projector(2, 1), &ideal_rotation(phi_0, sign * angle))
}

/// S_{π/2} = σσ† + iσ†σ on the electron.
pub fn electron_phase_gate() -> ComplexMatrix {
    let s = ops::projector(2, 0) + ops::projector(2, 1) * C64::new(0.0, 1.0);
    kron(&s, &ops::identity(2))
}

pub fn electron_hadamard() -> ComplexMatrix {
    let h = ComplexMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0].map(|x| C64::new(x * FRAC_1_SQRT_2, 0.0)));
    kron(&h, &ops::identity(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    /// CXⁿ = S_{π/2}·R_{0,π/2}·C_{0,π/2}
    ControlledNot,
    /// Hⁿ = R_{0,π}·R_{π/2,π/2}
    NuclearHadamard,
    ElectronHadamard,
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::ControlledNot => "CX_n",
            Gate::NuclearHadamard => "H_n",
            Gate::ElectronHadamard => "H_e",
        }
    }

    /// Nuclear rotations (φ₀, φ, conditional) in time order.
    fn rotations(&self) -> Vec<(f64, f64, bool)> {
        match self {
            Gate::ControlledNot => vec![(0.0, FRAC_PI_2, true), (0.0, FRAC_PI_2, false)],
            Gate::NuclearHadamard => vec![(FRAC_PI_2, FRAC_PI_2, false), (0.0, PI, false)],
            Gate::ElectronHadamard => vec![],
        }
    }

    /// Ideal unitary.
    pub fn ideal(&self) -> ComplexMatrix {
        let mut u = ops::identity(4);
        for (p, a, c) in self.rotations() {
            u = ideal_gate(p, a, c) * u;
        }
        match self {
            Gate::ControlledNot => electron_phase_gate() * u,
            Gate::NuclearHadamard => u,
            Gate::ElectronHadamard => electron_hadamard(),
        }
    }
}

/// Time order of CXⁿ·Hᵉ·Hⁿ·CXⁿ·Hᵉ·Hⁿ·CXⁿ.
pub const SWAP_SEQUENCE: [Gate; 7] = [
    Gate::ControlledNot,
    Gate::NuclearHadamard,
    Gate::ElectronHadamard,
    Gate::ControlledNot,
    Gate::NuclearHadamard,
    Gate::ElectronHadamard,
    Gate::ControlledNot,
];

/// How each nuclear rotation is timed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Timing {
    /// τ = 2π/A_∥, N from the target angle ([`DDSchedule::for_angle`]).
    Resonant,
    /// Fixed N per rotation and Ω_mw ([`DDSchedule::with_pulses`]).
    Pulses(usize),
}

fn schedule(cfg: &HyperfineConfig, timing: Timing, phi_0: f64, angle: f64, conditional: bool) -> Result<DDSchedule> {
    match timing {
        Timing::Resonant => DDSchedule::for_angle(cfg, phi_0, angle, conditional),
        Timing::Pulses(n) => DDSchedule::with_pulses(cfg, phi_0, angle, n, conditional),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateRecord {
    pub index: usize,
    pub gate: Gate,
    pub duration: f64,
    /// Fidelity against the ideal lossless state after this gate.
    pub f_running: f64,
}

#[derive(Clone, Debug)]
pub struct SwapResult {
    pub final_state: DensityMatrix,
    pub nuclear_output: DensityMatrix,
    /// F_en = F(electron input, nuclear output).
    pub fidelity: f64,
    pub gates: Vec<GateRecord>,
    pub total_time: f64,
}

/// Simulate the SWAP on |ψ_e⟩ ⊗ |0_n⟩ with dephasing during the rotations.
///
/// The ideal gate sequence equals i·SWAP exactly, so the nuclear output is
/// compared with the electron input directly.
pub fn swap_protocol(cfg: &HyperfineConfig, electron: &DensityMatrix, timing: Timing) -> Result<SwapResult> {
    cfg.validate()?;
    if electron.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("electron input must be a qubit, got dim {}", electron.dim())));
    }
    electron.validate(1e-9)?;
    let space = CompositeSpace::new(vec![2, 2])?;
    let rho0 = space.product_state(&[electron.clone(), DensityMatrix::basis(2, 0)])?;
    let mut rho = rho0.clone();
    let mut ideal = rho0.into_matrix();
    let mut gates = Vec::with_capacity(SWAP_SEQUENCE.len());
    let mut total_time = 0.0;
    for (index, gate) in SWAP_SEQUENCE.iter().enumerate() {
        let mut duration = 0.0;
        for (p, a, c) in gate.rotations() {
            let s = schedule(cfg, timing, p, a, c)?;
            rho = rotation_channel(cfg, &s, &rho)?;
            duration += s.duration();
        }
        let local = match gate {
            Gate::ControlledNot => Some(electron_phase_gate()),
            Gate::ElectronHadamard => Some(electron_hadamard()),
            Gate::NuclearHadamard => None,
        };
        if let Some(u) = local {
            rho = DensityMatrix::from_matrix_unchecked(&u * rho.matrix() * u.adjoint());
        }
        let g = gate.ideal();
        ideal = &g * ideal * g.adjoint();
        total_time += duration;
        let f_running = fidelity(&DensityMatrix::from_matrix_unchecked(ideal.clone()), &rho)?;
        gates.push(GateRecord { index, gate: *gate, duration, f_running });
    }
    let nuclear_output = partial_trace(&rho, &space, &[NUCLEAR])?;
    let fidelity = fidelity(electron, &nuclear_output)?;
    Ok(SwapResult { final_state: rho, nuclear_output, fidelity, gates, total_time })
}
