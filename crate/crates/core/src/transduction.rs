//! Direct SC qubit → phonon → electron-spin transfer with sech pulses.
//!
//! Simulated in the resonant interaction frame where only the two exchange
//! couplings remain:
//! H(t) = g_scp(t)(σ_sc b† + h.c.) + g_pe(t)(σ_e b† + h.c.),
//! with dissipators σ_sc (γ_sc), b (γ_p) and σ_e†σ_e (γ_e). Because the spin
//! dephasing uses the projector σ_e†σ_e, spin coherences decay at γ_e/2.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{embed, fidelity, ops, partial_trace, CompositeSpace, ComplexMatrix, DensityMatrix};
use crate::lindblad::{envelope, evolve, observable, Dissipator, IntegratorConfig, Sampling, TimeDependentHamiltonian, Trajectory};
use crate::units::{ghz, khz, mhz};
use crate::C64;

/// Half-width (in units of 1/g) of the window kept around each pulse centre.
pub const WINDOW: f64 = 4.0;
/// Minimum margin (in units of 1/g) between a pulse centre and the span edges.
pub const MIN_MARGIN: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub enum InputState {
    Excited,
    Ground,
    /// (|0⟩ + |1⟩)/√2
    Superposition,
    Custom(DensityMatrix),
}

impl InputState {
    pub fn density(&self) -> Result<DensityMatrix> {
        match self {
            InputState::Excited => Ok(DensityMatrix::basis(2, 1)),
            InputState::Ground => Ok(DensityMatrix::basis(2, 0)),
            InputState::Superposition => Ok(DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_element(
                2,
                2,
                C64::new(0.5, 0.0),
            ))),
            InputState::Custom(rho) => {
                if rho.dim() != 2 {
                    return Err(Error::DimensionMismatch("input state must be a qubit".into()));
                }
                rho.validate(1e-9)?;
                Ok(rho.clone())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// SC → phonon → spin.
    Forward,
    /// spin → phonon → SC (pulse order interchanged).
    Reverse,
}

/// Parameters of the direct chain. Couplings and rates are angular (rad·µs⁻¹),
/// times in µs; the carrier frequencies (GHz) only document the resonance.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectChainConfig {
    pub f_sc: f64,
    pub f_p: f64,
    pub f_e: f64,
    pub g_scp: f64,
    pub g_pe: f64,
    pub tau_scp: f64,
    pub tau_pe: f64,
    pub gamma_sc: f64,
    pub gamma_p: f64,
    pub gamma_e: f64,
    pub n_max: usize,
    pub input: InputState,
    pub direction: Direction,
    pub phase_compensation: bool,
    /// Explicit simulation window; derived from the pulse centres when `None`.
    pub t_span: Option<(f64, f64)>,
    /// Number of uniformly spaced samples in the returned trajectory.
    pub samples: usize,
    pub integrator: IntegratorConfig,
}

impl Default for DirectChainConfig {
    fn default() -> Self {
        let g_scp = mhz(50.0);
        let g_pe = mhz(1.0);
        let tau_scp = WINDOW / g_scp;
        Self {
            f_sc: 5.0,
            f_p: 5.0,
            f_e: 5.0,
            g_scp,
            g_pe,
            tau_scp,
            tau_pe: tau_scp + WINDOW / g_pe,
            gamma_sc: ghz(1e-5),
            gamma_p: ghz(1e-7),
            gamma_e: ghz(1e-5),
            n_max: 3,
            input: InputState::Excited,
            direction: Direction::Forward,
            phase_compensation: true,
            t_span: None,
            samples: 401,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl DirectChainConfig {
    pub fn lossless(mut self) -> Self {
        self.gamma_sc = 0.0;
        self.gamma_p = 0.0;
        self.gamma_e = 0.0;
        self
    }

    /// Pulse separation Δτ = τ_pe − τ_scp (forward) or τ_scp − τ_pe (reverse).
    pub fn dtau(&self) -> f64 {
        match self.direction {
            Direction::Forward => self.tau_pe - self.tau_scp,
            Direction::Reverse => self.tau_scp - self.tau_pe,
        }
    }

    /// Place the second pulse Δτ after the first; the first stays put.
    pub fn with_delay(mut self, dtau: f64) -> Self {
        match self.direction {
            Direction::Forward => self.tau_pe = self.tau_scp + dtau,
            Direction::Reverse => self.tau_scp = self.tau_pe + dtau,
        }
        self
    }

    /// Mirror of the protocol: spin → SC with the pulse order interchanged and
    /// the same separation.
    pub fn reversed(&self) -> Self {
        let dtau = self.dtau();
        let mut r = self.clone();
        r.direction = match self.direction {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        };
        match r.direction {
            Direction::Reverse => {
                r.tau_pe = WINDOW / r.g_pe;
                r.tau_scp = r.tau_pe + dtau;
            }
            Direction::Forward => {
                r.tau_scp = WINDOW / r.g_scp;
                r.tau_pe = r.tau_scp + dtau;
            }
        }
        r.t_span = None;
        r
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 2 {
            return Err(Error::InvalidParameter(format!("n_max must be ≥ 2, got {}", self.n_max)));
        }
        for (name, v) in [("g_scp", self.g_scp), ("g_pe", self.g_pe)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be > 0")));
            }
        }
        for (name, v) in [("gamma_sc", self.gamma_sc), ("gamma_p", self.gamma_p), ("gamma_e", self.gamma_e)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be ≥ 0")));
            }
        }
        if self.f_sc != self.f_p || self.f_p != self.f_e {
            return Err(Error::InvalidParameter("the chain must be resonant (f_sc = f_p = f_e)".into()));
        }
        Ok(())
    }

    /// Simulation window: explicit, or WINDOW/g around both pulse centres.
    pub fn window(&self) -> Result<(f64, f64)> {
        let pulses = [(self.tau_scp, self.g_scp), (self.tau_pe, self.g_pe)];
        let span = match self.t_span {
            Some(s) => s,
            None => (
                pulses.iter().map(|(c, g)| c - WINDOW / g).fold(f64::INFINITY, f64::min),
                pulses.iter().map(|(c, g)| c + WINDOW / g).fold(f64::NEG_INFINITY, f64::max),
            ),
        };
        for (c, g) in pulses {
            let m = MIN_MARGIN / g;
            if c - span.0 < m * (1.0 - 1e-12) || span.1 - c < m * (1.0 - 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "pulse at {c} µs needs a margin of {m} µs inside [{}, {}]",
                    span.0, span.1
                )));
            }
        }
        Ok(span)
    }
}

/// g·sech(2g(t − τ)); area π/2.
pub fn sech_pulse(t: f64, g: f64, tau: f64) -> f64 {
    g / (2.0 * g * (t - tau)).cosh()
}

pub struct Chain {
    pub hamiltonian: TimeDependentHamiltonian,
    pub dissipators: Vec<Dissipator>,
    pub space: CompositeSpace,
    pub rho0: DensityMatrix,
}

pub const SC: usize = 0;
pub const PHONON: usize = 1;
pub const SPIN: usize = 2;

pub fn build_chain(cfg: &DirectChainConfig) -> Result<Chain> {
    cfg.validate()?;
    let space = CompositeSpace::new(vec![2, cfg.n_max, 2])?;
    let s_sc = embed(&ops::sigma_minus(), &space, SC)?;
    let b = embed(&ops::destroy(cfg.n_max), &space, PHONON)?;
    let s_e = embed(&ops::sigma_minus(), &space, SPIN)?;
    let x_scp = &s_sc * b.adjoint() + s_sc.adjoint() * &b;
    let x_pe = &s_e * b.adjoint() + s_e.adjoint() * &b;
    let (g1, t1, g2, t2) = (cfg.g_scp, cfg.tau_scp, cfg.g_pe, cfg.tau_pe);
    let hamiltonian = TimeDependentHamiltonian::zero(space.total_dim())
        .with_term(envelope(move |t| sech_pulse(t, g1, t1)), x_scp)
        .with_term(envelope(move |t| sech_pulse(t, g2, t2)), x_pe);
    let dissipators = vec![
        Dissipator::new(s_sc, cfg.gamma_sc),
        Dissipator::new(b, cfg.gamma_p),
        Dissipator::new(embed(&ops::excited(), &space, SPIN)?, cfg.gamma_e),
    ];
    let input = cfg.input.density()?;
    let vac = DensityMatrix::basis(cfg.n_max, 0);
    let g = DensityMatrix::basis(2, 0);
    let rho0 = match cfg.direction {
        Direction::Forward => space.product_state(&[input, vac, g])?,
        Direction::Reverse => space.product_state(&[g, vac, input])?,
    };
    Ok(Chain { hamiltonian, dissipators, space, rho0 })
}

/// Rotate ρ_f by exp(iθσ_z/2) so its coherence phase matches ρ_i.
pub fn compensate_phase(rho_i: &DensityMatrix, rho_f: &DensityMatrix) -> DensityMatrix {
    let ci = rho_i.matrix()[(0, 1)];
    let cf = rho_f.matrix()[(0, 1)];
    if ci.norm() < 1e-15 || cf.norm() < 1e-15 {
        return rho_f.clone();
    }
    let theta = ci.arg() - cf.arg();
    let mut m = rho_f.matrix().clone();
    m[(0, 1)] *= C64::from_polar(1.0, theta);
    m[(1, 0)] *= C64::from_polar(1.0, -theta);
    DensityMatrix::from_matrix_unchecked(m)
}

/// Transfer fidelity between an input qubit and the output qubit.
pub fn transfer_fidelity(rho_i: &DensityMatrix, rho_f: &DensityMatrix, compensate: bool) -> Result<f64> {
    let out = if compensate { compensate_phase(rho_i, rho_f) } else { rho_f.clone() };
    fidelity(rho_i, &out)
}

#[derive(Clone, Debug)]
pub struct TransferResult {
    pub trajectory: Trajectory,
    pub fidelity: f64,
    /// Reduced state of the receiving qubit at the end of the run.
    pub output: DensityMatrix,
    pub dtau: f64,
}

fn breakpoints(cfg: &DirectChainConfig) -> Vec<f64> {
    let mut b = Vec::new();
    for (c, g) in [(cfg.tau_scp, cfg.g_scp), (cfg.tau_pe, cfg.g_pe)] {
        b.extend([c - WINDOW / g, c, c + WINDOW / g]);
    }
    b
}

fn simulate(cfg: &DirectChainConfig, sampling: Sampling) -> Result<TransferResult> {
    let span = cfg.window()?;
    let chain = build_chain(cfg)?;
    let space = &chain.space;
    let obs = vec![
        observable("pop_sc", embed(&ops::excited(), space, SC)?),
        observable("pop_ph", embed(&ops::number(cfg.n_max), space, PHONON)?),
        observable("pop_spin", embed(&ops::excited(), space, SPIN)?),
        observable("pop_top_fock", embed(&ops::projector(cfg.n_max, cfg.n_max - 1), space, PHONON)?),
    ];
    let icfg = IntegratorConfig { sampling, breakpoints: breakpoints(cfg), ..cfg.integrator.clone() };
    let trajectory = evolve(&chain.hamiltonian, &chain.dissipators, None, &chain.rho0, span, &icfg, &obs)?;
    let (receiver, sender_input) = match cfg.direction {
        Direction::Forward => (SPIN, cfg.input.density()?),
        Direction::Reverse => (SC, cfg.input.density()?),
    };
    let output = partial_trace(&trajectory.final_state, space, &[receiver])?;
    let fidelity = transfer_fidelity(&sender_input, &output, cfg.phase_compensation)?;
    Ok(TransferResult { trajectory, fidelity, output, dtau: cfg.dtau() })
}

/// Run the protocol, sampling `cfg.samples` uniformly spaced points.
pub fn run_transfer(cfg: &DirectChainConfig) -> Result<TransferResult> {
    simulate(cfg, Sampling::Uniform(cfg.samples.max(2)))
}

/// Fidelity only (no trajectory samples).
pub fn transfer_fidelity_at(cfg: &DirectChainConfig) -> Result<f64> {
    Ok(simulate(cfg, Sampling::Times(Vec::new()))?.fidelity)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelayOptimum {
    pub dtau: f64,
    pub fidelity: f64,
    pub evaluations: usize,
}

pub const DELAY_GRID: usize = 41;
pub const DELAY_TOL: f64 = 1e-4;
/// Plateau tolerance: the smallest Δτ within this of the best F is returned.
pub const PLATEAU_TOL: f64 = 1e-6;

/// Coarse scan over `range` followed by golden-section refinement; returns
/// the smallest Δτ whose fidelity is within [`PLATEAU_TOL`] of the maximum.
pub fn optimize_delay(cfg: &DirectChainConfig, range: (f64, f64), grid: usize) -> Result<DelayOptimum> {
    let (a, b) = range;
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return Err(Error::InvalidParameter(format!("empty delay range [{a}, {b}]")));
    }
    let grid = grid.max(DELAY_GRID);
    let mut evals: Vec<(f64, f64)> = Vec::new();
    let f = |x: f64, evals: &mut Vec<(f64, f64)>| -> Result<f64> {
        let v = transfer_fidelity_at(&cfg.clone().with_delay(x))?;
        evals.push((x, v));
        Ok(v)
    };
    let xs: Vec<f64> = (0..grid).map(|k| a + (b - a) * k as f64 / (grid - 1) as f64).collect();
    let mut fs = Vec::with_capacity(grid);
    for &x in &xs {
        fs.push(f(x, &mut evals)?);
    }
    let best = (0..grid).max_by(|&i, &j| fs[i].total_cmp(&fs[j]).then(j.cmp(&i))).unwrap();
    // golden-section refinement on the bracketing cells
    let (mut lo, mut hi) = (xs[best.saturating_sub(1)], xs[(best + 1).min(grid - 1)]);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1, &mut evals)?;
    let mut f2 = f(x2, &mut evals)?;
    while hi - lo > DELAY_TOL {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1, &mut evals)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2, &mut evals)?;
        }
    }
    let f_max = evals.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let threshold = f_max - PLATEAU_TOL;
    let mut sorted = evals.clone();
    sorted.sort_by(|p, q| p.0.total_cmp(&q.0));
    let first = sorted.iter().position(|e| e.1 >= threshold).unwrap();
    let (mut x_ok, mut f_ok) = sorted[first];
    if first > 0 {
        // bisect the threshold crossing between the last point below and the first above
        let mut x_bad = sorted[first - 1].0;
        while x_ok - x_bad > DELAY_TOL {
            let m = 0.5 * (x_ok + x_bad);
            let v = f(m, &mut evals)?;
            if v >= threshold {
                x_ok = m;
                f_ok = v;
            } else {
                x_bad = m;
            }
        }
    }
    Ok(DelayOptimum { dtau: x_ok, fidelity: f_ok, evaluations: evals.len() })
}

/// Default Δτ search range [0, 4/g_pe].
pub fn default_delay_range(cfg: &DirectChainConfig) -> (f64, f64) {
    (0.0, WINDOW / cfg.g_pe)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub g_pe: f64,
    pub gamma_e: f64,
    pub fidelity: f64,
    pub log10_infidelity: f64,
    pub dtau: f64,
}

/// Cells in row-major order: g_pe outer, γ_e inner.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityTable {
    pub g_pe: Vec<f64>,
    pub gamma_e: Vec<f64>,
    pub cells: Vec<SweepCell>,
}

impl FidelityTable {
    pub fn cell(&self, i_g: usize, i_gamma: usize) -> &SweepCell {
        &self.cells[i_g * self.gamma_e.len() + i_gamma]
    }
}

pub fn log10_infidelity(f: f64) -> f64 {
    (1.0 - f).max(1e-16).log10()
}

/// Δτ-optimized fidelity over a (g_pe, γ_e) grid; output independent of `workers`.
pub fn sweep(template: &DirectChainConfig, g_pe: &[f64], gamma_e: &[f64], workers: usize) -> Result<FidelityTable> {
    if g_pe.is_empty() || gamma_e.is_empty() {
        return Err(Error::InvalidParameter("sweep grids must be nonempty".into()));
    }
    let jobs: Vec<(f64, f64)> = g_pe.iter().flat_map(|&g| gamma_e.iter().map(move |&ge| (g, ge))).collect();
    let run = |&(g, ge): &(f64, f64)| -> Result<SweepCell> {
        let mut cfg = template.clone();
        cfg.g_pe = g;
        cfg.gamma_e = ge;
        cfg.tau_scp = WINDOW / cfg.g_scp;
        cfg.t_span = None;
        let opt = optimize_delay(&cfg, default_delay_range(&cfg), DELAY_GRID)?;
        Ok(SweepCell { g_pe: g, gamma_e: ge, fidelity: opt.fidelity, log10_infidelity: log10_infidelity(opt.fidelity), dtau: opt.dtau })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    let cells = pool.install(|| jobs.par_iter().map(run).collect::<Result<Vec<_>>>())?;
    Ok(FidelityTable { g_pe: g_pe.to_vec(), gamma_e: gamma_e.to_vec(), cells })
}

/// n log-spaced points between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Default sweep axes: g_pe/2π ∈ [0.1, 10] MHz and γ_e/2π ∈ [1, 100] kHz.
pub fn default_sweep_axes(n: usize) -> (Vec<f64>, Vec<f64>) {
    (
        log_grid(0.1, 10.0, n).into_iter().map(mhz).collect(),
        log_grid(1.0, 100.0, n).into_iter().map(khz).collect(),
    )
}
