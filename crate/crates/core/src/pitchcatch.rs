//! Waveguide pitch-and-catch: an explicit single-excitation model of
//! SC qubit + M waveguide modes + phonon, and the equivalent cascaded master
//! equation.
//!
//! Modes k_j = (N0 + j)π/L with j = −(M−1)/2 … (M−1)/2, spacing δ = cπ/L.
//! The SC qubit sits at x = 0 (mode function 1), the phonon at x = L (mode
//! function (−1)^{N0+j}). The explicit model therefore contains the
//! propagation delay τ_prop = L/c = π/δ; the cascaded model has τ = 0 and is
//! compared against the explicit one shifted by τ_prop.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::hilbert::{embed, ops, partial_trace, ComplexMatrix, CompositeSpace, DensityMatrix, KetState};
use crate::lindblad::{
    envelope, evolve, evolve_ket, observable, CascadeCoupling, Dissipator, IntegratorConfig, Rate, Sampling,
    TimeDependentHamiltonian, Trajectory,
};
use crate::transduction::{transfer_fidelity, InputState};
use crate::units::mhz;
use crate::C64;

/// Onset delay and tail length in units of 1/κ.
pub const PULSE_MARGIN: f64 = 12.0;

#[derive(Clone, Debug, PartialEq)]
pub struct WaveguideConfig {
    /// Waveguide length (m).
    pub length: f64,
    /// Mode speed (m/s).
    pub speed: f64,
    pub n0: u64,
    /// Number of retained modes (odd).
    pub modes: usize,
    /// Qubit–mode coupling amplitude (rad·µs⁻¹).
    pub g_qm: f64,
    /// Centre of the release pulse (µs).
    pub tau_pc: f64,
    /// Cascade phase φ (rad).
    pub phi: f64,
    /// Intensity transmission η ∈ (0, 1].
    pub transmission: f64,
    pub gamma_sc: f64,
    pub gamma_p: f64,
    pub n_max: usize,
    /// SC input state for the cascaded model.
    pub input: InputState,
    /// Disable the catch coupling (release-only dynamics).
    pub catch_enabled: bool,
    pub samples: usize,
    pub integrator: IntegratorConfig,
}

impl Default for WaveguideConfig {
    fn default() -> Self {
        let mut cfg = Self {
            length: 0.4e-3,
            speed: 1000.0,
            n0: 2000,
            modes: 201,
            g_qm: mhz(1.0),
            tau_pc: 0.0,
            phi: PI,
            transmission: 1.0,
            gamma_sc: 0.0,
            gamma_p: 0.0,
            n_max: 3,
            input: InputState::Excited,
            catch_enabled: true,
            samples: 401,
            integrator: IntegratorConfig::default(),
        };
        cfg.tau_pc = cfg.default_onset();
        cfg
    }
}

impl WaveguideConfig {
    /// Mode spacing δ = cπ/L (rad·µs⁻¹).
    pub fn delta(&self) -> f64 {
        self.speed * PI / self.length * 1e-6
    }

    pub fn kappa(&self) -> f64 {
        kappa_from_g(self.g_qm, self.delta())
    }

    /// Travel time L/c (µs).
    pub fn propagation_delay(&self) -> f64 {
        self.length / self.speed * 1e6
    }

    pub fn default_onset(&self) -> f64 {
        let k = self.kappa();
        if k > 0.0 {
            PULSE_MARGIN / k
        } else {
            0.0
        }
    }

    fn tail(&self) -> f64 {
        let k = self.kappa();
        if k > 0.0 {
            PULSE_MARGIN / k
        } else {
            1.0
        }
    }

    /// End of the cascaded simulation (τ = 0).
    pub fn t_end_cascaded(&self) -> f64 {
        self.tau_pc + self.tail()
    }

    /// End of the explicit simulation (includes the propagation delay).
    pub fn t_end_schrodinger(&self) -> f64 {
        self.tau_pc + self.propagation_delay() + self.tail()
    }

    /// Mode offsets j = −(M−1)/2 … (M−1)/2.
    pub fn mode_offsets(&self) -> Vec<i64> {
        let h = (self.modes as i64 - 1) / 2;
        (-h..=h).collect()
    }

    pub fn wavenumber(&self, j: i64) -> f64 {
        (self.n0 as i64 + j) as f64 * PI / self.length
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes.is_multiple_of(2) || self.modes < 21 {
            return Err(Error::InvalidParameter(format!("M must be odd and ≥ 21, got {}", self.modes)));
        }
        if !(self.length > 0.0 && self.speed > 0.0) {
            return Err(Error::InvalidParameter("L and c must be > 0".into()));
        }
        if (self.n0 as i64) <= (self.modes as i64 - 1) / 2 {
            return Err(Error::InvalidParameter("N0 must exceed (M−1)/2".into()));
        }
        if !(self.transmission > 0.0 && self.transmission <= 1.0) {
            return Err(Error::InvalidParameter(format!("transmission must lie in (0, 1], got {}", self.transmission)));
        }
        if self.gamma_sc < 0.0 || self.gamma_p < 0.0 || self.g_qm < 0.0 {
            return Err(Error::InvalidParameter("rates and couplings must be ≥ 0".into()));
        }
        if self.n_max < 2 {
            return Err(Error::InvalidParameter("n_max must be ≥ 2".into()));
        }
        Ok(())
    }

    /// Retained band M·δ must cover at least 20 κ.
    pub fn check_band(&self) -> Result<()> {
        let band = self.modes as f64 * self.delta();
        if band < 20.0 * self.kappa() {
            return Err(Error::InvalidParameter(format!(
                "retained band {band:.3} rad/µs narrower than 20κ = {:.3} rad/µs",
                20.0 * self.kappa()
            )));
        }
        Ok(())
    }

    pub fn release(&self, t: f64) -> f64 {
        release_coupling(t, self.g_qm, self.kappa(), self.tau_pc)
    }

    pub fn catch(&self, t: f64, delay: f64) -> f64 {
        catch_coupling(t, self.g_qm, self.kappa(), self.tau_pc, delay)
    }
}

/// κ = 2πg²/δ.
pub fn kappa_from_g(g_qm: f64, delta: f64) -> f64 {
    TAU * g_qm * g_qm / delta
}

/// g√(e^{κt'}/(1+e^{κt'})), t' = t − τ_pc.
pub fn release_coupling(t: f64, g_qm: f64, kappa: f64, tau_pc: f64) -> f64 {
    g_qm * (1.0 / (1.0 + (-kappa * (t - tau_pc)).exp())).sqrt()
}

/// g√(e^{−κ(t'−τ)}/(1+e^{−κ(t'−τ)})), the time reverse of the release about τ/2.
pub fn catch_coupling(t: f64, g_qm: f64, kappa: f64, tau_pc: f64, delay: f64) -> f64 {
    g_qm * (1.0 / (1.0 + (kappa * (t - tau_pc - delay)).exp())).sqrt()
}

/// Explicit single-excitation Hamiltonian in the frame of the central mode.
/// Basis: [c_sc, c_j (M modes), c_p].
pub fn schrodinger_hamiltonian(cfg: &WaveguideConfig) -> TimeDependentHamiltonian {
    let m = cfg.modes;
    let d = m + 2;
    let offsets = cfg.mode_offsets();
    let delta = cfg.delta();
    let mut h0 = ComplexMatrix::zeros(d, d);
    let mut x_sc = ComplexMatrix::zeros(d, d);
    let mut x_p = ComplexMatrix::zeros(d, d);
    for (idx, &j) in offsets.iter().enumerate() {
        let k = idx + 1;
        h0[(k, k)] = C64::new(j as f64 * delta, 0.0);
        x_sc[(0, k)] = C64::new(1.0, 0.0);
        x_sc[(k, 0)] = C64::new(1.0, 0.0);
        let sign = if (cfg.n0 as i64 + j).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        x_p[(d - 1, k)] = C64::new(sign, 0.0);
        x_p[(k, d - 1)] = C64::new(sign, 0.0);
    }
    let (g, kappa, tau_pc, delay) = (cfg.g_qm, cfg.kappa(), cfg.tau_pc, cfg.propagation_delay());
    let mut h = TimeDependentHamiltonian::new(h0).with_term(envelope(move |t| release_coupling(t, g, kappa, tau_pc)), x_sc);
    if cfg.catch_enabled {
        h = h.with_term(envelope(move |t| catch_coupling(t, g, kappa, tau_pc, delay)), x_p);
    }
    h
}

fn schrodinger_observables(cfg: &WaveguideConfig) -> Vec<(String, ComplexMatrix)> {
    let d = cfg.modes + 2;
    let mut wg = ComplexMatrix::zeros(d, d);
    for k in 1..=cfg.modes {
        wg[(k, k)] = C64::new(1.0, 0.0);
    }
    vec![
        observable("pop_sc", ops::projector(d, 0)),
        observable("pop_wg", wg),
        observable("pop_ph", ops::projector(d, d - 1)),
    ]
}

fn run_schrodinger(cfg: &WaveguideConfig, t_end: f64, sampling: Sampling, store_states: bool) -> Result<Trajectory<KetState>> {
    cfg.validate()?;
    cfg.check_band()?;
    let h = schrodinger_hamiltonian(cfg);
    let psi0 = KetState::basis(cfg.modes + 2, 0);
    let icfg = IntegratorConfig { sampling, store_states, ..cfg.integrator.clone() };
    evolve_ket(&h, &psi0, (0.0, t_end), &icfg, &schrodinger_observables(cfg))
}

/// Integrate i·ċ = H(t)c from c_sc = 1; observables pop_sc, pop_wg, pop_ph.
pub fn simulate_schrodinger(cfg: &WaveguideConfig) -> Result<Trajectory<KetState>> {
    run_schrodinger(cfg, cfg.t_end_schrodinger(), Sampling::Uniform(cfg.samples.max(2)), false)
}

/// |ψ(x)|² with ψ(x) = Σ_j c_j cos(k_j x); `state` holds [c_sc, c_j…, c_p].
pub fn wavepacket_snapshot(state: &KetState, cfg: &WaveguideConfig, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    if state.dim() != cfg.modes + 2 {
        return Err(Error::DimensionMismatch(format!("state dim {} vs M + 2 = {}", state.dim(), cfg.modes + 2)));
    }
    let offsets = cfg.mode_offsets();
    let amps: Vec<(f64, C64)> = offsets
        .iter()
        .enumerate()
        .map(|(idx, &j)| (cfg.wavenumber(j), state.amplitudes[idx + 1]))
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .collect();
    Ok(xs
        .iter()
        .map(|&x| {
            let psi: C64 = amps.iter().map(|&(k, c)| c * (k * x).cos()).sum();
            (x, psi.norm_sqr())
        })
        .collect())
}

/// Uniform grid over [0, L] resolving the carrier (≥ 8 points per half-wave).
pub fn default_packet_grid(cfg: &WaveguideConfig) -> Vec<f64> {
    let n = 8 * (cfg.n0 as usize + cfg.modes) + 1;
    (0..n).map(|i| cfg.length * i as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Debug)]
pub struct PacketSnapshot {
    pub time: f64,
    pub waveguide_population: f64,
    pub state: KetState,
    pub profile: Vec<(f64, f64)>,
}

/// Snapshot at the time of maximum waveguide population.
pub fn mid_flight_snapshot(cfg: &WaveguideConfig) -> Result<PacketSnapshot> {
    let tr = run_schrodinger(cfg, cfg.t_end_schrodinger(), Sampling::Uniform(cfg.samples.max(2)), true)?;
    let wg = tr.observable("pop_wg").expect("observable");
    let best = (0..wg.len()).max_by(|&a, &b| wg[a].total_cmp(&wg[b])).unwrap();
    let state = tr.states[best].clone();
    let profile = wavepacket_snapshot(&state, cfg, &default_packet_grid(cfg))?;
    Ok(PacketSnapshot { time: tr.times[best], waveguide_population: wg[best], state, profile })
}

/// Standardized third moment of an intensity profile.
pub fn skewness(profile: &[(f64, f64)]) -> f64 {
    let w: f64 = profile.iter().map(|p| p.1).sum();
    let mu = profile.iter().map(|p| p.0 * p.1).sum::<f64>() / w;
    let var = profile.iter().map(|p| (p.0 - mu).powi(2) * p.1).sum::<f64>() / w;
    let m3 = profile.iter().map(|p| (p.0 - mu).powi(3) * p.1).sum::<f64>() / w;
    m3 / var.powf(1.5)
}

/// Trapezoidal ∫|ψ|² dx over the profile.
pub fn integrated_intensity(profile: &[(f64, f64)]) -> f64 {
    profile.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum()
}

/// Cascaded master equation on [SC, phonon] with τ = 0.
pub fn simulate_cascaded(cfg: &WaveguideConfig) -> Result<Trajectory> {
    run_cascaded(cfg, cfg.t_end_cascaded(), Sampling::Uniform(cfg.samples.max(2)))
}

fn run_cascaded(cfg: &WaveguideConfig, t_end: f64, sampling: Sampling) -> Result<Trajectory> {
    cfg.validate()?;
    let space = CompositeSpace::new(vec![2, cfg.n_max])?;
    let s = embed(&ops::sigma_minus(), &space, 0)?;
    let b = embed(&ops::destroy(cfg.n_max), &space, 1)?;
    let (g, kappa, tau_pc, delta) = (cfg.g_qm, cfg.kappa(), cfg.tau_pc, cfg.delta());
    let catch_on = cfg.catch_enabled;
    let kappa_sc = envelope(move |t| TAU * release_coupling(t, g, kappa, tau_pc).powi(2) / delta);
    let kappa_p = envelope(move |t| if catch_on { TAU * catch_coupling(t, g, kappa, tau_pc, 0.0).powi(2) / delta } else { 0.0 });
    let ds = vec![
        Dissipator::varying(s.clone(), kappa_sc.clone()),
        Dissipator::new(s.clone(), cfg.gamma_sc),
        Dissipator::varying(b.clone(), kappa_p.clone()),
        Dissipator::new(b.clone(), cfg.gamma_p),
    ];
    let cc = CascadeCoupling {
        source_op: s.clone(),
        sink_op: b.clone(),
        kappa_source: Rate::Varying(kappa_sc),
        kappa_sink: Rate::Varying(kappa_p),
        phase: cfg.phi,
        transmission: cfg.transmission,
    };
    let rho0 = space.product_state(&[cfg.input.density()?, DensityMatrix::basis(cfg.n_max, 0)])?;
    let obs = vec![observable("pop_sc", embed(&ops::excited(), &space, 0)?), observable("pop_ph", b.adjoint() * &b)];
    let icfg = IntegratorConfig { sampling, breakpoints: vec![tau_pc], ..cfg.integrator.clone() };
    let h = TimeDependentHamiltonian::zero(space.total_dim());
    evolve(&h, &ds, Some(&cc), &rho0, (0.0, t_end), &icfg, &obs)
}

/// Qubit block {|0⟩, |1⟩} of the phonon at the end of a cascaded run.
pub fn cascaded_phonon_qubit(cfg: &WaveguideConfig) -> Result<DensityMatrix> {
    let tr = run_cascaded(cfg, cfg.t_end_cascaded(), Sampling::Times(Vec::new()))?;
    let space = CompositeSpace::new(vec![2, cfg.n_max])?;
    let ph = partial_trace(&tr.final_state, &space, &[1])?;
    Ok(DensityMatrix::from_matrix_unchecked(ph.matrix().view((0, 0), (2, 2)).into_owned()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossValidation {
    pub max_sc: f64,
    pub max_ph: f64,
}

impl CrossValidation {
    pub fn max(&self) -> f64 {
        self.max_sc.max(self.max_ph)
    }
}

/// Max |pop_explicit − pop_cascaded| over time for SC and phonon; the explicit
/// phonon population is read τ_prop later.
pub fn cross_validate(cfg: &WaveguideConfig) -> Result<CrossValidation> {
    let tau = cfg.propagation_delay();
    let per_delay = 40usize;
    let h = tau / per_delay as f64;
    let k_casc = (cfg.t_end_cascaded() / h).ceil() as usize;
    let grid = |n: usize| (0..=n).map(|k| k as f64 * h).collect::<Vec<_>>();
    let c_cfg = WaveguideConfig { input: InputState::Excited, ..cfg.clone() };
    let t_casc = k_casc as f64 * h;
    let casc = run_cascaded(&c_cfg, t_casc, Sampling::Times(grid(k_casc)))?;
    let schr = run_schrodinger(cfg, t_casc + tau, Sampling::Times(grid(k_casc + per_delay)), false)?;
    let (cs, cp) = (casc.observable("pop_sc").unwrap(), casc.observable("pop_ph").unwrap());
    let (ss, sp) = (schr.observable("pop_sc").unwrap(), schr.observable("pop_ph").unwrap());
    let max_sc = cs.iter().zip(ss).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let max_ph = cp.iter().zip(&sp[per_delay..]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(CrossValidation { max_sc, max_ph })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCalibration {
    pub phi: f64,
    /// (φ, coherent transfer fidelity) for each candidate.
    pub scan: Vec<(f64, f64)>,
}

/// Choose φ ∈ {0, π/2, π, 3π/2} maximizing the uncompensated transfer
/// fidelity of the superposition input (populations do not depend on φ).
pub fn calibrate_phase(cfg: &WaveguideConfig) -> Result<PhaseCalibration> {
    let input = InputState::Superposition.density()?;
    let mut scan = Vec::new();
    for k in 0..4 {
        let phi = k as f64 * FRAC_PI_2;
        let c = WaveguideConfig { phi, input: InputState::Superposition, ..cfg.clone() };
        let out = cascaded_phonon_qubit(&c)?;
        scan.push((phi, transfer_fidelity(&input, &out, false)?));
    }
    let best = scan.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.total_cmp(&a.0))).unwrap();
    Ok(PhaseCalibration { phi: best.0, scan })
}

/// Slope of −ln|c_sc|² over t' ∈ [3/κ, 8/κ] under release-only dynamics.
pub fn release_efolding(cfg: &WaveguideConfig) -> Result<f64> {
    let kappa = cfg.kappa();
    let c = WaveguideConfig { catch_enabled: false, ..cfg.clone() };
    let (a, b) = (cfg.tau_pc + 3.0 / kappa, cfg.tau_pc + 8.0 / kappa);
    let n = 51;
    let times: Vec<f64> = (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect();
    let tr = run_schrodinger(&c, b, Sampling::Times(times.clone()), false)?;
    let y: Vec<f64> = tr.observable("pop_sc").unwrap().iter().map(|p| -p.ln()).collect();
    let xm = times.iter().sum::<f64>() / n as f64;
    let ym = y.iter().sum::<f64>() / n as f64;
    let sxy: f64 = times.iter().zip(&y).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = times.iter().map(|x| (x - xm).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Zero-amplitude ket of the explicit model.
pub fn empty_state(cfg: &WaveguideConfig) -> KetState {
    KetState::new(DVector::zeros(cfg.modes + 2))
}
