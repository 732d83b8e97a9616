//! Time-dependent Lindblad and cascaded master equations.
//!
//! dρ/dt = −i[H(t), ρ] + Σ γ(t)/2 (2cρc† − {c†c, ρ})
//!         + √η √(κ_src κ_snk) (e^{iφ}[σ ρ, b†] + e^{−iφ}[b, ρ σ†])
//!
//! [`rhs`] evaluates the generator densely and serves as the reference;
//! [`evolve`] compiles the same generator into sparse superoperators.

mod ode;
pub mod sparse;

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::hilbert::{hermiticity_error, ComplexMatrix, DensityMatrix, KetState};
use crate::C64;

pub use ode::{integrate, OdeSystem};
use sparse::{nonzeros, sandwich, trace_product, Csr};

/// Real function of time (µs) returning an angular rate (rad·µs⁻¹).
pub type Envelope = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn envelope(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Envelope {
    Arc::new(f)
}

#[derive(Clone)]
pub enum Rate {
    Constant(f64),
    Varying(Envelope),
}

impl Rate {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Rate::Constant(g) => *g,
            Rate::Varying(f) => f(t),
        }
    }
}

impl std::fmt::Debug for Rate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rate::Constant(g) => write!(f, "Constant({g})"),
            Rate::Varying(_) => write!(f, "Varying(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Dissipator {
    pub operator: ComplexMatrix,
    pub rate: Rate,
}

impl Dissipator {
    pub fn new(operator: ComplexMatrix, rate: f64) -> Self {
        Self { operator, rate: Rate::Constant(rate) }
    }

    pub fn varying(operator: ComplexMatrix, rate: Envelope) -> Self {
        Self { operator, rate: Rate::Varying(rate) }
    }
}

#[derive(Clone)]
pub struct DrivenTerm {
    pub envelope: Envelope,
    pub operator: ComplexMatrix,
}

/// H(t) = static + Σ envelopeₖ(t)·opₖ.
#[derive(Clone)]
pub struct TimeDependentHamiltonian {
    pub static_part: ComplexMatrix,
    pub driven_terms: Vec<DrivenTerm>,
}

impl std::fmt::Debug for TimeDependentHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimeDependentHamiltonian")
            .field("dim", &self.dim())
            .field("driven_terms", &self.driven_terms.len())
            .finish()
    }
}

impl TimeDependentHamiltonian {
    pub fn new(static_part: ComplexMatrix) -> Self {
        Self { static_part, driven_terms: Vec::new() }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(ComplexMatrix::zeros(dim, dim))
    }

    pub fn with_term(mut self, envelope: Envelope, operator: ComplexMatrix) -> Self {
        self.driven_terms.push(DrivenTerm { envelope, operator });
        self
    }

    pub fn dim(&self) -> usize {
        self.static_part.nrows()
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        let mut h = self.static_part.clone();
        for term in &self.driven_terms {
            h += &term.operator * C64::new((term.envelope)(t), 0.0);
        }
        h
    }

    /// Largest anti-Hermitian deviation of H(t) over the given times.
    pub fn hermiticity_error(&self, times: &[f64]) -> f64 {
        times.iter().map(|&t| hermiticity_error(&self.at(t))).fold(0.0, f64::max)
    }

    fn check_dims(&self) -> Result<()> {
        let d = self.dim();
        if !self.static_part.is_square() || self.driven_terms.iter().any(|k| k.operator.shape() != (d, d)) {
            return Err(Error::DimensionMismatch("Hamiltonian terms have inconsistent shapes".into()));
        }
        Ok(())
    }
}

/// Unidirectional source → sink coupling (e.g. σ_sc → b) of the cascaded formalism.
#[derive(Clone, Debug)]
pub struct CascadeCoupling {
    pub source_op: ComplexMatrix,
    pub sink_op: ComplexMatrix,
    pub kappa_source: Rate,
    pub kappa_sink: Rate,
    pub phase: f64,
    /// Intensity transmission η of the channel; the cross term scales with √η.
    pub transmission: f64,
}

impl CascadeCoupling {
    fn coefficient(&self, t: f64) -> f64 {
        let ks = self.kappa_source.at(t).max(0.0);
        let kk = self.kappa_sink.at(t).max(0.0);
        (self.transmission * ks * kk).sqrt()
    }

    /// Cross-term superoperator at unit coefficient.
    fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let d = self.source_op.nrows();
        let id = ComplexMatrix::identity(d, d);
        let s = &self.source_op;
        let b = &self.sink_op;
        let bd = b.adjoint();
        let sd = s.adjoint();
        let ep = C64::from_polar(1.0, self.phase);
        let em = ep.conj();
        let mut t = Vec::new();
        // e^{iφ}(σρb† − b†σρ)
        sandwich(s, &bd, ep, &mut t);
        sandwich(&(&bd * s), &id, -ep, &mut t);
        // e^{−iφ}(bρσ† − ρσ†b)
        sandwich(b, &sd, em, &mut t);
        sandwich(&id, &(&sd * b), -em, &mut t);
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Rk4 { dt: f64 },
    Rk45 { rel_tol: f64, abs_tol: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sampling {
    /// Every k-th accepted step, plus the endpoints.
    Stride(usize),
    /// n equally spaced times including both endpoints.
    Uniform(usize),
    /// Explicit times inside the span.
    Times(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub sampling: Sampling,
    pub store_states: bool,
    /// Times at which the adaptive controller restarts its step estimate
    /// (pulse onsets after quiet intervals).
    pub breakpoints: Vec<f64>,
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk45 { rel_tol: 1e-8, abs_tol: 1e-10 },
            sampling: Sampling::Stride(1),
            store_states: false,
            breakpoints: Vec::new(),
            max_step: None,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(dt: f64) -> Self {
        Self { method: Method::Rk4 { dt }, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::Rk4 { dt } if !(dt > 0.0 && dt.is_finite()) => {
                Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")))
            }
            Method::Rk45 { rel_tol, abs_tol } if !(rel_tol > 0.0 && abs_tol > 0.0) => {
                Err(Error::InvalidParameter("tolerances must be > 0".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<S = DensityMatrix> {
    pub times: Vec<f64>,
    pub observables: Vec<(String, Vec<f64>)>,
    pub states: Vec<S>,
    pub final_state: S,
}

impl<S> Trajectory<S> {
    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn final_value(&self, name: &str) -> Option<f64> {
        self.observable(name).and_then(|v| v.last().copied())
    }
}

/// A named Hermitian observable.
pub type Observable = (String, ComplexMatrix);

pub fn observable(name: &str, op: ComplexMatrix) -> Observable {
    (name.to_string(), op)
}

fn check_problem(h: &TimeDependentHamiltonian, ds: &[Dissipator], cc: Option<&CascadeCoupling>, d: usize) -> Result<()> {
    h.check_dims()?;
    if h.dim() != d {
        return Err(Error::DimensionMismatch(format!("Hamiltonian dim {} vs state dim {d}", h.dim())));
    }
    if ds.iter().any(|c| c.operator.shape() != (d, d)) {
        return Err(Error::DimensionMismatch("dissipator operator shape".into()));
    }
    if let Some(c) = cc {
        if c.source_op.shape() != (d, d) || c.sink_op.shape() != (d, d) {
            return Err(Error::DimensionMismatch("cascade operator shape".into()));
        }
    }
    Ok(())
}

/// Dense evaluation of dρ/dt at time t.
pub fn rhs(
    h: &TimeDependentHamiltonian,
    ds: &[Dissipator],
    cc: Option<&CascadeCoupling>,
    rho: &DensityMatrix,
    t: f64,
) -> Result<ComplexMatrix> {
    let d = rho.dim();
    check_problem(h, ds, cc, d)?;
    let r = rho.matrix();
    let i = C64::new(0.0, 1.0);
    let ht = h.at(t);
    let mut out = (&ht * r - r * &ht) * (-i);
    for diss in ds {
        let g = diss.rate.at(t);
        if g < 0.0 {
            return Err(Error::InvalidParameter(format!("negative rate {g} at t = {t}")));
        }
        let c = &diss.operator;
        let cd = c.adjoint();
        let n = &cd * c;
        out += (c * r * &cd * C64::new(2.0, 0.0) - &n * r - r * &n) * C64::new(g / 2.0, 0.0);
    }
    if let Some(c) = cc {
        let k = C64::new(c.coefficient(t), 0.0);
        let ep = C64::from_polar(1.0, c.phase);
        let s = &c.source_op;
        let b = &c.sink_op;
        let sr = s * r;
        let rsd = r * s.adjoint();
        let bd = b.adjoint();
        let t1 = (&sr * &bd - &bd * &sr) * ep;
        let t2 = (b * &rsd - &rsd * b) * ep.conj();
        out += (t1 + t2) * k;
    }
    Ok(out)
}

type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sparse compiled Liouvillian: L(t) = L₀ + Σ fₖ(t) Lₖ.
pub struct Liouvillian {
    d: usize,
    static_part: Csr,
    terms: Vec<(Coefficient, Csr)>,
}

impl Liouvillian {
    pub fn compile(h: &TimeDependentHamiltonian, ds: &[Dissipator], cc: Option<&CascadeCoupling>) -> Result<Self> {
        let d = h.dim();
        check_problem(h, ds, cc, d)?;
        let n = d * d;
        let id = ComplexMatrix::identity(d, d);
        let i = C64::new(0.0, 1.0);
        let commutator = |op: &ComplexMatrix, out: &mut Vec<(usize, usize, C64)>| {
            sandwich(op, &id, -i, out);
            sandwich(&id, op, i, out);
        };
        let dissipator = |c: &ComplexMatrix, g: f64, out: &mut Vec<(usize, usize, C64)>| {
            let cd = c.adjoint();
            let nn = &cd * c;
            sandwich(c, &cd, C64::new(g, 0.0), out);
            sandwich(&nn, &id, C64::new(-g / 2.0, 0.0), out);
            sandwich(&id, &nn, C64::new(-g / 2.0, 0.0), out);
        };
        let mut static_trips = Vec::new();
        commutator(&h.static_part, &mut static_trips);
        let mut terms: Vec<(Coefficient, Csr)> = Vec::new();
        for term in &h.driven_terms {
            let mut t = Vec::new();
            commutator(&term.operator, &mut t);
            terms.push((term.envelope.clone(), Csr::from_triplets(n, t)));
        }
        for diss in ds {
            match &diss.rate {
                Rate::Constant(g) => {
                    if *g < 0.0 {
                        return Err(Error::InvalidParameter(format!("negative rate {g}")));
                    }
                    if *g > 0.0 {
                        dissipator(&diss.operator, *g, &mut static_trips);
                    }
                }
                Rate::Varying(f) => {
                    let mut t = Vec::new();
                    dissipator(&diss.operator, 1.0, &mut t);
                    let f = f.clone();
                    terms.push((Arc::new(move |t| f(t).max(0.0)), Csr::from_triplets(n, t)));
                }
            }
        }
        if let Some(c) = cc {
            let cc = c.clone();
            let trips = c.triplets();
            terms.push((Arc::new(move |t| cc.coefficient(t)), Csr::from_triplets(n, trips)));
        }
        Ok(Self { d, static_part: Csr::from_triplets(n, static_trips), terms })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Dense d²×d² matrix of L(t) (column-major vectorization).
    pub fn dense_at(&self, t: f64) -> ComplexMatrix {
        let mut m = self.static_part.to_dense();
        for (f, op) in &self.terms {
            m += op.to_dense() * C64::new(f(t), 0.0);
        }
        m
    }
}

impl OdeSystem for Liouvillian {
    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        let one = C64::new(1.0, 0.0);
        self.static_part.mul_add(one, y, dy);
        for (f, op) in &self.terms {
            let c = f(t);
            if c != 0.0 {
                op.mul_add(C64::new(c, 0.0), y, dy);
            }
        }
        if cfg!(debug_assertions) {
            let tr: C64 = (0..self.d).map(|k| dy[k * (self.d + 1)]).sum();
            let scale = dy.iter().fold(1.0f64, |a, z| a.max(z.norm()));
            debug_assert!(tr.norm() <= 1e-9 * scale, "generator not trace-free: {tr}");
        }
    }
}

/// Sparse −i·H(t) acting on kets.
pub struct KetGenerator {
    static_part: Csr,
    terms: Vec<(Envelope, Csr)>,
}

impl KetGenerator {
    pub fn compile(h: &TimeDependentHamiltonian) -> Result<Self> {
        h.check_dims()?;
        let mi = C64::new(0.0, -1.0);
        let scale = |m: &ComplexMatrix| Csr::from_dense(&(m * mi));
        Ok(Self {
            static_part: scale(&h.static_part),
            terms: h.driven_terms.iter().map(|k| (k.envelope.clone(), scale(&k.operator))).collect(),
        })
    }
}

impl OdeSystem for KetGenerator {
    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        self.static_part.mul_add(C64::new(1.0, 0.0), y, dy);
        for (f, op) in &self.terms {
            let c = f(t);
            if c != 0.0 {
                op.mul_add(C64::new(c, 0.0), y, dy);
            }
        }
    }
}

/// Integrate the master equation and sample `observables` (real part of Tr ρA).
pub fn evolve(
    h: &TimeDependentHamiltonian,
    ds: &[Dissipator],
    cc: Option<&CascadeCoupling>,
    rho0: &DensityMatrix,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    observables: &[Observable],
) -> Result<Trajectory> {
    let d = rho0.dim();
    check_problem(h, ds, cc, d)?;
    let l = Liouvillian::compile(h, ds, cc)?;
    evolve_compiled(&l, rho0, t_span, cfg, observables)
}

/// As [`evolve`] with a pre-compiled generator (reused across runs).
pub fn evolve_compiled(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    observables: &[Observable],
) -> Result<Trajectory> {
    let d = rho0.dim();
    if l.dim() != d {
        return Err(Error::DimensionMismatch(format!("generator dim {} vs state dim {d}", l.dim())));
    }
    let obs: Vec<Vec<(usize, usize, C64)>> = observables
        .iter()
        .map(|(name, op)| {
            if op.shape() != (d, d) {
                Err(Error::DimensionMismatch(format!("observable {name}")))
            } else {
                Ok(nonzeros(op))
            }
        })
        .collect::<Result<_>>()?;
    let mut times = Vec::new();
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); obs.len()];
    let mut states = Vec::new();
    let y0 = rho0.matrix().as_slice().to_vec();
    let y = integrate(l, y0, t_span.0, t_span.1, cfg, |t, y| {
        times.push(t);
        for (s, a) in series.iter_mut().zip(&obs) {
            let v = trace_product(a, y, d).re;
            if !v.is_finite() {
                return Err(Error::InvalidState(format!("non-finite observable at t = {t}")));
            }
            s.push(v);
        }
        if cfg.store_states {
            states.push(DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_column_slice(d, d, y)));
        }
        Ok(())
    })?;
    let final_state = DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_column_slice(d, d, &y));
    Ok(Trajectory {
        times,
        observables: observables.iter().map(|(n, _)| n.clone()).zip(series).collect(),
        states,
        final_state,
    })
}

/// Schrödinger evolution i·dψ/dt = H(t)ψ; observables are ⟨ψ|A|ψ⟩.
pub fn evolve_ket(
    h: &TimeDependentHamiltonian,
    psi0: &KetState,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    observables: &[Observable],
) -> Result<Trajectory<KetState>> {
    let d = psi0.dim();
    if h.dim() != d {
        return Err(Error::DimensionMismatch(format!("Hamiltonian dim {} vs ket dim {d}", h.dim())));
    }
    let gen = KetGenerator::compile(h)?;
    let obs: Vec<Csr> = observables.iter().map(|(_, op)| Csr::from_dense(op)).collect();
    let mut times = Vec::new();
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); obs.len()];
    let mut states = Vec::new();
    let mut buf = vec![C64::new(0.0, 0.0); d];
    let y = integrate(&gen, psi0.amplitudes.as_slice().to_vec(), t_span.0, t_span.1, cfg, |t, y| {
        times.push(t);
        for (s, a) in series.iter_mut().zip(&obs) {
            buf.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            a.mul_add(C64::new(1.0, 0.0), y, &mut buf);
            let v: f64 = y.iter().zip(&buf).map(|(p, q)| (p.conj() * q).re).sum();
            s.push(v);
        }
        if cfg.store_states {
            states.push(KetState::new(DVector::from_column_slice(y)));
        }
        Ok(())
    })?;
    Ok(Trajectory {
        times,
        observables: observables.iter().map(|(n, _)| n.clone()).zip(series).collect(),
        states,
        final_state: KetState::new(DVector::from_vec(y)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::ops::*;
    use crate::hilbert::{embed, CompositeSpace};

    fn plus() -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_element(2, 2, C64::new(0.5, 0.0)))
    }

    #[test]
    fn zero_generator() {
        let d = rhs(&TimeDependentHamiltonian::zero(2), &[], None, &plus(), 0.0).unwrap();
        assert_eq!(d.norm(), 0.0);
    }

    #[test]
    fn amplitude_damping_rate() {
        let g = 0.7;
        let e = DensityMatrix::basis(2, 1);
        let d = rhs(&TimeDependentHamiltonian::zero(2), &[Dissipator::new(sigma_minus(), g)], None, &e, 0.0).unwrap();
        assert!((d[(1, 1)].re + g).abs() < 1e-15);
        assert!((d[(0, 0)].re - g).abs() < 1e-15);
    }

    #[test]
    fn projector_dephasing_halves_coherence_rate() {
        // D[σ†σ] with rate γ: dρ₀₁/dt = −(γ/2)ρ₀₁
        let g = 0.4;
        let d = rhs(&TimeDependentHamiltonian::zero(2), &[Dissipator::new(excited(), g)], None, &plus(), 0.0).unwrap();
        assert!((d[(0, 1)].re + g / 2.0 * 0.5).abs() < 1e-15);
        assert!(d[(0, 0)].norm() < 1e-15 && d[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let r = rhs(&TimeDependentHamiltonian::zero(3), &[], None, &plus(), 0.0);
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn compiled_matches_dense_with_cascade() {
        let space = CompositeSpace::new(vec![2, 3]).unwrap();
        let s = embed(&sigma_minus(), &space, 0).unwrap();
        let b = embed(&destroy(3), &space, 1).unwrap();
        let h = TimeDependentHamiltonian::new(embed(&sigma_z(), &space, 0).unwrap() * C64::new(0.3, 0.0))
            .with_term(envelope(|t| (2.0 * t).sin()), &s + s.adjoint());
        let ds = vec![
            Dissipator::new(s.clone(), 0.2),
            Dissipator::varying(b.clone(), envelope(|t| 1.0 + t * t)),
        ];
        let cc = CascadeCoupling {
            source_op: s.clone(),
            sink_op: b.clone(),
            kappa_source: Rate::Varying(envelope(|t| 2.0 + t)),
            kappa_sink: Rate::Constant(1.5),
            phase: 0.7,
            transmission: 0.9,
        };
        let rho = DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_fn(6, 6, |i, j| {
            C64::new((i * j) as f64 * 0.01 + if i == j { 1.0 / 6.0 } else { 0.0 }, 0.02 * (i as f64 - j as f64))
        }));
        let t = 0.37;
        let dense = rhs(&h, &ds, Some(&cc), &rho, t).unwrap();
        let l = Liouvillian::compile(&h, &ds, Some(&cc)).unwrap();
        let mut dy = vec![C64::new(0.0, 0.0); 36];
        l.rhs(t, rho.matrix().as_slice(), &mut dy);
        let sparse = ComplexMatrix::from_column_slice(6, 6, &dy);
        assert!((dense - sparse).norm() < 1e-12);
    }

    #[test]
    fn cascade_phase_zero_is_gardiner_form() {
        // √(κ₁κ₂)([σρ, b†] + [b, ρσ†]) equals the cascaded generator
        // −i[H_c, ρ] + D[√κ₁σ + √κ₂b] − D[√κ₁σ] − D[√κ₂b] with
        // H_c = (i/2)√(κ₁κ₂)(σ†b − b†σ).
        let space = CompositeSpace::new(vec![2, 3]).unwrap();
        let s = embed(&sigma_minus(), &space, 0).unwrap();
        let b = embed(&destroy(3), &space, 1).unwrap();
        let (k1, k2) = (0.8, 1.7);
        let rho = DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_fn(6, 6, |i, j| {
            C64::new(0.05 * (i + j) as f64 + if i == j { 0.1 } else { 0.0 }, 0.03 * (i as f64 - j as f64))
        }));
        let cc = CascadeCoupling {
            source_op: s.clone(),
            sink_op: b.clone(),
            kappa_source: Rate::Constant(k1),
            kappa_sink: Rate::Constant(k2),
            phase: 0.0,
            transmission: 1.0,
        };
        let zero = TimeDependentHamiltonian::zero(6);
        let cross = rhs(&zero, &[], Some(&cc), &rho, 0.0).unwrap();
        let kk = (k1 * k2).sqrt();
        let hc = (s.adjoint() * &b - b.adjoint() * &s) * C64::new(0.0, 0.5 * kk);
        let joint = &s * C64::new(k1.sqrt(), 0.0) + &b * C64::new(k2.sqrt(), 0.0);
        let oracle = rhs(
            &TimeDependentHamiltonian::new(hc),
            &[Dissipator::new(joint, 1.0)],
            None,
            &rho,
            0.0,
        )
        .unwrap()
            - rhs(&zero, &[Dissipator::new(s.clone(), k1), Dissipator::new(b.clone(), k2)], None, &rho, 0.0).unwrap();
        assert!((cross - oracle).norm() < 1e-12);
    }

    #[test]
    fn free_decay_matches_exponential() {
        let g = 0.3;
        let tr = evolve(
            &TimeDependentHamiltonian::zero(2),
            &[Dissipator::new(sigma_minus(), g)],
            None,
            &DensityMatrix::basis(2, 1),
            (0.0, 5.0),
            &IntegratorConfig { sampling: Sampling::Uniform(51), ..Default::default() },
            &[observable("pe", excited())],
        )
        .unwrap();
        for (t, p) in tr.times.iter().zip(tr.observable("pe").unwrap()) {
            assert!((p - (-g * t).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn jaynes_cummings_half_period_swap() {
        // area-π/2 resonant exchange |1,0⟩ → |0,1⟩
        let space = CompositeSpace::new(vec![2, 3]).unwrap();
        let s = embed(&sigma_minus(), &space, 0).unwrap();
        let b = embed(&destroy(3), &space, 1).unwrap();
        let g = 2.0;
        let x = &s * b.adjoint() + s.adjoint() * &b;
        let h = TimeDependentHamiltonian::new(x * C64::new(g, 0.0));
        let rho0 = space.product_state(&[DensityMatrix::basis(2, 1), DensityMatrix::basis(3, 0)]).unwrap();
        let tr = evolve(
            &h,
            &[],
            None,
            &rho0,
            (0.0, std::f64::consts::FRAC_PI_2 / g),
            &IntegratorConfig::default(),
            &[observable("n", b.adjoint() * &b)],
        )
        .unwrap();
        assert!(tr.final_value("n").unwrap() >= 0.999);
        assert!((tr.final_state.purity() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn ket_and_density_agree() {
        let h = TimeDependentHamiltonian::new(sigma_x() * C64::new(0.5, 0.0))
            .with_term(envelope(|t| t.cos()), sigma_z());
        let psi0 = crate::hilbert::KetState::basis(2, 0);
        let cfg = IntegratorConfig { sampling: Sampling::Uniform(5), ..Default::default() };
        let a = evolve_ket(&h, &psi0, (0.0, 3.0), &cfg, &[observable("e", excited())]).unwrap();
        let b = evolve(&h, &[], None, &psi0.to_density(), (0.0, 3.0), &cfg, &[observable("e", excited())]).unwrap();
        for (x, y) in a.observable("e").unwrap().iter().zip(b.observable("e").unwrap()) {
            assert!((x - y).abs() < 1e-7);
        }
    }
}
