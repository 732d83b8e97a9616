//! SiV⁻ strain calculators: crystal-to-defect frame transformation, strain
//! couplings, the fine-structure Hamiltonian and the effective spin–phonon
//! coupling schemes (static transverse field, microwave drive, optical Raman).
//!
//! All frequencies are angular rates in rad·µs⁻¹ (see [`crate::units`]);
//! susceptibilities are rad·µs⁻¹ per unit strain, magnetic fields are in tesla
//! and the gyromagnetic ratio is rad·µs⁻¹·T⁻¹.

use nalgebra::{Matrix2, Matrix3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{embed, ops, ComplexMatrix, CompositeSpace, KetState};
use crate::lindblad::{envelope, evolve_ket, observable, IntegratorConfig, Sampling, TimeDependentHamiltonian};
use crate::units::{ghz, mhz};
use crate::C64;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Strain tensor in the cubic axes [100], [010], [001].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrainTensor(Matrix3<f64>);

impl StrainTensor {
    /// Validated constructor; the tensor must be symmetric within 1e-12
    /// (relative to its largest component when that exceeds 1).
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite strain component".into()));
        }
        let scale = m.amax().max(1.0);
        let asym = (m - m.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::InvalidParameter(format!("strain tensor not symmetric (|ε − εᵀ| = {asym:.3e})")));
        }
        Ok(Self(m))
    }

    pub fn from_components(e11: f64, e22: f64, e33: f64, e12: f64, e13: f64, e23: f64) -> Result<Self> {
        Self::new(Matrix3::new(e11, e12, e13, e12, e22, e23, e13, e23, e33))
    }

    pub fn zero() -> Self {
        Self(Matrix3::zeros())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }
}

/// Defect frame: rows are x ∥ [1̄1̄2], y ∥ [1̄10], z ∥ [111] in cubic axes
/// (as conventionally quoted; note x × y = −z).
pub fn defect_axes() -> Matrix3<f64> {
    let (s6, s3) = (6f64.sqrt(), 3f64.sqrt());
    Matrix3::new(
        -1.0 / s6, -1.0 / s6, 2.0 / s6,
        -1.0 / SQRT2, 1.0 / SQRT2, 0.0,
        1.0 / s3, 1.0 / s3, 1.0 / s3,
    )
}

/// Strain combinations in the defect frame.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DefectStrainComponents {
    pub eps_xx_minus_yy: f64,
    pub eps_zx: f64,
    pub eps_xy: f64,
    pub eps_yz: f64,
    /// ε_xx + ε_yy and ε_zz feed only the A₁g term α.
    pub eps_xx_plus_yy: f64,
    pub eps_zz: f64,
}

/// Transform to the defect frame. The four transverse combinations keep the
/// general (non-symmetrized) index form.
pub fn cubic_to_defect(eps: &StrainTensor) -> DefectStrainComponents {
    let e = |i: usize, j: usize| eps.0[(i - 1, j - 1)];
    let (s2, s3, s6) = (SQRT2, 3f64.sqrt(), 6f64.sqrt());
    let eps_xx_minus_yy =
        (-e(1, 1) - e(2, 2) + 2.0 * e(3, 3) + 2.0 * (e(1, 2) + e(2, 1)) - (e(1, 3) + e(3, 1)) - (e(2, 3) + e(3, 2))) / 3.0;
    let eps_zx = -(e(1, 1) + e(2, 2) - 2.0 * e(3, 3) - 2.0 * e(1, 3) - 2.0 * e(2, 3) + e(1, 2) + e(2, 1) + e(3, 1) + e(3, 2))
        / (3.0 * s2);
    let eps_xy = (e(1, 1) - e(1, 2) + e(2, 1) - e(2, 2) - 2.0 * e(3, 1) + 2.0 * e(3, 2)) / (2.0 * s3);
    let eps_yz = (-e(1, 1) - e(1, 2) - e(1, 3) + e(2, 1) + e(2, 2) + e(2, 3)) / s6;
    let eps_zz = eps.0.iter().sum::<f64>() / 3.0;
    DefectStrainComponents {
        eps_xx_minus_yy,
        eps_zx,
        eps_xy,
        eps_yz,
        eps_xx_plus_yy: eps.0.trace() - eps_zz,
        eps_zz,
    }
}

/// Strain susceptibilities (rad·µs⁻¹ per unit strain).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SusceptibilityConstants {
    pub t_parallel: f64,
    pub t_perp: f64,
    pub d: f64,
    pub f: f64,
}

impl Default for SusceptibilityConstants {
    /// 1 PHz/strain for every constant.
    fn default() -> Self {
        let p = ghz(1e6);
        Self { t_parallel: p, t_perp: p, d: p, f: p }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StrainCouplings {
    /// A₁g shift; uniform over the fine structure and not used downstream.
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn strain_components(eps: &DefectStrainComponents, c: &SusceptibilityConstants) -> StrainCouplings {
    StrainCouplings {
        alpha: c.t_perp * eps.eps_xx_plus_yy + c.t_parallel * eps.eps_zz,
        beta: c.d * eps.eps_xx_minus_yy + c.f * eps.eps_zx,
        gamma: -2.0 * c.d * eps.eps_xy + c.f * eps.eps_yz,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FineStructureConfig {
    /// Spin–orbit coupling λ (rad·µs⁻¹).
    pub lambda_so: f64,
    /// Longitudinal and transverse fields (T).
    pub b_z: f64,
    pub b_x: f64,
    /// Spin gyromagnetic ratio (rad·µs⁻¹·T⁻¹).
    pub gamma_s: f64,
}

impl Default for FineStructureConfig {
    fn default() -> Self {
        Self { lambda_so: ghz(23.0), b_z: 0.0, b_x: 0.0, gamma_s: ghz(28.0) }
    }
}

impl FineStructureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_so > 0.0) {
            return Err(Error::InvalidParameter(format!("λ must be > 0, got {}", self.lambda_so)));
        }
        Ok(())
    }

    /// ν₁…ν₄ of the eigenstates ψ₁…ψ₄.
    pub fn levels(&self) -> [f64; 4] {
        let (z, l) = (self.b_z * self.gamma_s, self.lambda_so);
        [-z - l, -z + l, z + l, z - l]
    }
}

/// H_tot in the basis {e_y↑, e_y↓, e_x↑, e_x↓}.
pub fn fine_structure_hamiltonian(cfg: &FineStructureConfig) -> ComplexMatrix {
    let z = C64::new(cfg.b_z * cfg.gamma_s, 0.0);
    let il = C64::new(0.0, cfg.lambda_so);
    let o = C64::new(0.0, 0.0);
    ComplexMatrix::from_row_slice(4, 4, &[z, o, -il, o, o, -z, o, il, il, o, z, o, o, -il, o, -z])
}

/// Columns are ψ₁…ψ₄ expressed in {e_y↑, e_y↓, e_x↑, e_x↓}.
pub fn fine_structure_eigenstates() -> ComplexMatrix {
    let h = 1.0 / SQRT2;
    let (o, r, i) = (C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(0.0, h));
    ComplexMatrix::from_row_slice(4, 4, &[o, o, -i, i, -i, i, o, o, o, o, r, r, r, r, o, o])
}

/// (H_β, H_γ) in the eigenbasis {ψ₁…ψ₄}.
pub fn strain_hamiltonians(beta: f64, gamma: f64) -> (ComplexMatrix, ComplexMatrix) {
    let mut hb = ComplexMatrix::zeros(4, 4);
    let mut hg = ComplexMatrix::zeros(4, 4);
    for (a, b) in [(0, 1), (2, 3)] {
        hb[(a, b)] = C64::new(beta, 0.0);
        hb[(b, a)] = C64::new(beta, 0.0);
        hg[(a, b)] = C64::new(0.0, gamma);
        hg[(b, a)] = C64::new(0.0, -gamma);
    }
    (hb, hg)
}

/// x-polarized field term in the eigenbasis: couples ψ₁↔ψ₃ and ψ₂↔ψ₄.
pub fn transverse_field_hamiltonian(cfg: &FineStructureConfig) -> ComplexMatrix {
    let x = C64::new(cfg.b_x * cfg.gamma_s, 0.0);
    let mut h = ComplexMatrix::zeros(4, 4);
    for (a, b) in [(0, 2), (1, 3)] {
        h[(a, b)] = x;
        h[(b, a)] = x;
    }
    h
}

/// ⟨ψ'₄|H_β + H_γ|ψ'₁⟩ from first-order perturbation theory and from exact
/// diagonalization of diag(ν) + H_Bx.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaticFieldCoupling {
    pub perturbative: C64,
    pub exact: C64,
}

impl StaticFieldCoupling {
    pub fn relative_error(&self) -> f64 {
        if self.exact.norm() == 0.0 {
            return (self.perturbative - self.exact).norm();
        }
        (self.perturbative - self.exact).norm() / self.exact.norm()
    }
}

/// Eigenvector of a real symmetric 2×2 block continuously connected to its
/// first basis vector, with a positive first component.
fn dressed(a: f64, c: f64, b: f64) -> (f64, f64) {
    let eig = Matrix2::new(a, b, b, c).symmetric_eigen();
    let k = if eig.eigenvectors[(0, 0)].abs() >= eig.eigenvectors[(0, 1)].abs() { 0 } else { 1 };
    let v = eig.eigenvectors.column(k);
    let s = v[0].signum();
    (s * v[0], s * v[1])
}

/// Static transverse-field coupling of the spin qubit ψ₁ ↔ ψ₄.
///
/// Note: with λ/(2π) = 23 GHz, γ_S/(2π) = 28 GHz/T, β/(2π) = 10 MHz and
/// B_z = 0 this formula gives ≈ 12 MHz/T, not the ≈ 5 MHz/T quoted in prose
/// elsewhere; the formula value is returned.
pub fn static_field_coupling(cfg: &FineStructureConfig, beta: f64, gamma: f64) -> Result<StaticFieldCoupling> {
    cfg.validate()?;
    let x = cfg.b_x * cfg.gamma_s;
    if (x / (2.0 * cfg.lambda_so)).abs() > 0.2 {
        log::warn!("B_xγ_S/2λ = {:.3} exceeds 0.2; first-order coupling unreliable", x / (2.0 * cfg.lambda_so));
    }
    let nu = cfg.levels();
    let (zg, l) = (cfg.b_z * cfg.gamma_s, cfg.lambda_so);
    let first = x / (-2.0 * zg - 2.0 * l) + x / (2.0 * zg - 2.0 * l);
    let perturbative = C64::new(beta * first, -gamma * first);

    // ψ'₁ in block {ψ₁, ψ₃}, ψ'₄ in block {ψ₄, ψ₂}
    let (a1, a3) = dressed(nu[0], nu[2], x);
    let (a4, a2) = dressed(nu[3], nu[1], x);
    let mut v1 = nalgebra::DVector::<C64>::zeros(4);
    v1[0] = C64::new(a1, 0.0);
    v1[2] = C64::new(a3, 0.0);
    let mut v4 = nalgebra::DVector::<C64>::zeros(4);
    v4[3] = C64::new(a4, 0.0);
    v4[1] = C64::new(a2, 0.0);
    let (hb, hg) = strain_hamiltonians(beta, gamma);
    let exact = (v4.adjoint() * (hb + hg) * v1)[(0, 0)];
    Ok(StaticFieldCoupling { perturbative, exact })
}

/// Microwave-assisted scheme: levels ψ₁, ψ₂, ψ₄, drive ψ₄↔ψ₂, strain ψ₁↔ψ₂.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MWDriveConfig {
    /// Δ = E₂ − E₁.
    pub delta_level: f64,
    /// ω_B = E₄ − E₁.
    pub omega_b: f64,
    pub omega_p: f64,
    pub omega_d: f64,
    /// Drive amplitude Ω and phase θ.
    pub omega: f64,
    pub theta: f64,
    pub g_orb: f64,
}

impl Default for MWDriveConfig {
    /// g_orb/(2π) = 10 MHz, δ/(2π) = 100 MHz and Ω = g_orb, so Ω/δ = 0.1.
    fn default() -> Self {
        Self::resonant(ghz(46.0), ghz(2.0), ghz(46.0) + mhz(100.0), mhz(10.0), 0.0, mhz(10.0))
    }
}

impl MWDriveConfig {
    /// Configuration with ω_d = ω_p − ω_B.
    pub fn resonant(delta_level: f64, omega_b: f64, omega_p: f64, omega: f64, theta: f64, g_orb: f64) -> Self {
        Self { delta_level, omega_b, omega_p, omega_d: omega_p - omega_b, omega, theta, g_orb }
    }

    /// δ = ω_p − Δ.
    pub fn detuning(&self) -> f64 {
        self.omega_p - self.delta_level
    }

    pub fn validate(&self) -> Result<()> {
        let want = self.omega_p - self.omega_b;
        if (self.omega_d - want).abs() > 1e-9 * want.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!("drive off resonance: ω_d = {} but ω_p − ω_B = {want}", self.omega_d)));
        }
        let det = self.detuning();
        if !(self.omega.abs() < det.abs()) {
            return Err(Error::InvalidParameter(format!(
                "adiabatic condition violated: |Ω| = {} ≥ |δ| = {}",
                self.omega.abs(),
                det.abs()
            )));
        }
        Ok(())
    }
}

/// g_orb·Ω·e^{iθ}/δ.
pub fn mw_effective_coupling(cfg: &MWDriveConfig) -> Result<C64> {
    cfg.validate()?;
    Ok(C64::from_polar(cfg.g_orb * cfg.omega / cfg.detuning(), cfg.theta))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RamanConfig {
    pub omega_a: f64,
    pub omega_c: f64,
    pub theta_a: f64,
    pub theta_c: f64,
    /// Laser frequencies ω_A, ω_C and the excited-state energy ω_E.
    pub freq_a: f64,
    pub freq_c: f64,
    pub freq_e: f64,
    pub omega_p: f64,
    pub omega_b: f64,
    pub delta_level: f64,
    pub g_orb: f64,
}

impl RamanConfig {
    /// Ω_AΩ_C / [(ω_p − Δ)(ω_C − ω_E + ω_p)].
    pub fn perturbative_ratio(&self) -> f64 {
        self.omega_a * self.omega_c / self.denominator()
    }

    fn denominator(&self) -> f64 {
        (self.omega_p - self.delta_level) * (self.freq_c - self.freq_e + self.omega_p)
    }

    pub fn validate(&self) -> Result<()> {
        let want = self.omega_b + self.freq_a - self.freq_c;
        if (self.omega_p - want).abs() > 1e-9 * want.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!("Raman resonance violated: ω_p = {} vs ω_B + ω_A − ω_C = {want}", self.omega_p)));
        }
        if self.denominator() == 0.0 {
            return Err(Error::InvalidParameter("zero Raman detuning denominator".into()));
        }
        Ok(())
    }
}

pub fn raman_effective_coupling(cfg: &RamanConfig) -> Result<C64> {
    cfg.validate()?;
    let ratio = cfg.perturbative_ratio();
    if ratio.abs() > 0.1 {
        log::warn!("Raman perturbative ratio {ratio:.3} exceeds 0.1");
    }
    Ok(C64::from_polar(cfg.omega_a * cfg.omega_c * cfg.g_orb / cfg.denominator(), cfg.theta_a - cfg.theta_c))
}

/// Full driven model vs effective Jaynes–Cummings model, both from |ψ₄, 0⟩.
#[derive(Clone, Debug)]
pub struct MwValidation {
    pub times: Vec<f64>,
    /// Population of ψ₁ in the full and effective models.
    pub full: Vec<f64>,
    pub effective: Vec<f64>,
    pub max_discrepancy: f64,
    pub g_eff: C64,
}

/// Integrates the rotating-frame four-level ⊗ phonon model and the two-level
/// effective model over `duration` (default: one effective Rabi cycle π/|g_eff|).
pub fn validate_effective_model(cfg: &MWDriveConfig, duration: Option<f64>, samples: usize) -> Result<MwValidation> {
    let g_eff = mw_effective_coupling(cfg)?;
    let t_end = match duration {
        Some(t) => t,
        None if g_eff.norm() > 0.0 => std::f64::consts::PI / g_eff.norm(),
        None => 1.0,
    };
    let n_ph = 3;
    let delta = cfg.detuning();
    let (theta, omega, g_orb) = (cfg.theta, cfg.omega, cfg.g_orb);
    let icfg = IntegratorConfig { sampling: Sampling::Uniform(samples.max(2)), max_step: Some(0.5 / delta.abs()), ..Default::default() };

    let space = CompositeSpace::new(vec![4, n_ph])?;
    let level = |i: usize, j: usize| {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(i, j)] = C64::new(1.0, 0.0);
        embed(&m, &space, 0)
    };
    let b = embed(&ops::destroy(n_ph), &space, 1)?;
    let (s42, s12) = (level(3, 1)?, level(0, 1)?);
    // Ω[σ₄₂e^{i(θ+δt)} + h.c.] + g[b†σ₁₂e^{iδt} + h.c.]
    let drive_c = (&s42 * C64::from_polar(omega, theta)) + (&s42 * C64::from_polar(omega, theta)).adjoint();
    let drive_s = (&s42 * C64::from_polar(omega, theta)) * C64::new(0.0, 1.0);
    let drive_s = &drive_s + drive_s.adjoint();
    let ph = b.adjoint() * &s12 * C64::new(g_orb, 0.0);
    let ph_c = &ph + ph.adjoint();
    let ph_s = &ph * C64::new(0.0, 1.0);
    let ph_s = &ph_s + ph_s.adjoint();
    let h = TimeDependentHamiltonian::zero(space.total_dim())
        .with_term(envelope(move |t| (delta * t).cos()), drive_c + ph_c)
        .with_term(envelope(move |t| (delta * t).sin()), drive_s + ph_s);
    let psi0 = KetState::basis(space.total_dim(), space.index(&[3, 0]));
    let full = evolve_ket(&h, &psi0, (0.0, t_end), &icfg, &[observable("pop1", level(0, 0)?)])?;

    let eff_space = CompositeSpace::new(vec![2, n_ph])?;
    let s = embed(&ops::sigma_minus(), &eff_space, 0)?;
    let be = embed(&ops::destroy(n_ph), &eff_space, 1)?;
    let jc = be.adjoint() * &s * g_eff;
    let h_eff = TimeDependentHamiltonian::new(&jc + jc.adjoint());
    let psi0e = KetState::basis(eff_space.total_dim(), eff_space.index(&[1, 0]));
    let p_ground = embed(&ops::projector(2, 0), &eff_space, 0)?;
    let eff = evolve_ket(&h_eff, &psi0e, (0.0, t_end), &icfg, &[observable("pop1", p_ground)])?;

    let full_p = full.observable("pop1").expect("observable").to_vec();
    let eff_p = eff.observable("pop1").expect("observable").to_vec();
    let max_discrepancy = full_p.iter().zip(&eff_p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(MwValidation { times: full.times, full: full_p, effective: eff_p, max_discrepancy, g_eff })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMap {
    /// (position, g_orb) per input sample, in input order.
    pub points: Vec<([f64; 3], f64)>,
    pub max_abs: f64,
}

/// g_orb = d·(ε_xx − ε_yy)·normalization at each sample.
pub fn coupling_map(samples: &[([f64; 3], StrainTensor)], constants: &SusceptibilityConstants, normalization: f64) -> Result<CouplingMap> {
    if !normalization.is_finite() {
        return Err(Error::InvalidParameter(format!("normalization must be finite, got {normalization}")));
    }
    let points = samples
        .par_iter()
        .enumerate()
        .map(|(i, (pos, eps))| {
            if pos.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!("row {i}: non-finite position")));
            }
            let g = constants.d * cubic_to_defect(eps).eps_xx_minus_yy * normalization;
            Ok((*pos, g))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_abs = points.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    Ok(CouplingMap { points, max_abs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::eigensystem_hermitian;
    use crate::units::to_mhz;

    #[test]
    fn isotropic_strain_has_no_transverse_part() {
        let d = cubic_to_defect(&StrainTensor::from_components(1e-6, 1e-6, 1e-6, 0.0, 0.0, 0.0).unwrap());
        for v in [d.eps_xx_minus_yy, d.eps_zx, d.eps_xy, d.eps_yz] {
            assert!(v.abs() < 1e-20);
        }
        assert!((d.eps_zz - 1e-6).abs() < 1e-20 && (d.eps_xx_plus_yy - 2e-6).abs() < 1e-20);
    }

    #[test]
    fn uniaxial_33() {
        let s = 3e-7;
        let d = cubic_to_defect(&StrainTensor::from_components(0.0, 0.0, s, 0.0, 0.0, 0.0).unwrap());
        assert!((d.eps_xx_minus_yy - 2.0 * s / 3.0).abs() < 1e-20);
        assert!((d.eps_zx - 2.0 * s / (3.0 * SQRT2)).abs() < 1e-20);
        assert_eq!(d.eps_xy, 0.0);
        assert_eq!(d.eps_yz, 0.0);
    }

    #[test]
    fn asymmetric_tensor_rejected() {
        let m = Matrix3::new(0.0, 1e-3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(StrainTensor::new(m).is_err());
    }

    #[test]
    fn beta_and_gamma_examples() {
        let c = SusceptibilityConstants::default();
        let eps = DefectStrainComponents { eps_xx_minus_yy: 5.4e-9, ..Default::default() };
        assert!((to_mhz(strain_components(&eps, &c).beta) - 5.4).abs() < 1e-9);
        assert_eq!(strain_components(&DefectStrainComponents::default(), &c), StrainCouplings::default());
        let eps = DefectStrainComponents { eps_xy: 1e-9, ..Default::default() };
        assert!((to_mhz(strain_components(&eps, &c).gamma) + 2.0).abs() < 1e-9);
    }

    #[test]
    fn fine_structure_eigensystem() {
        for b_z in [0.0, 0.1, -0.35] {
            let cfg = FineStructureConfig { b_z, ..Default::default() };
            let h = fine_structure_hamiltonian(&cfg);
            assert_eq!(h.adjoint(), h);
            let u = fine_structure_eigenstates();
            let nu = cfg.levels();
            // closed form: H ψ_k = ν_k ψ_k
            for k in 0..4 {
                let col = u.column(k).into_owned();
                let r = &h * &col - &col * C64::new(nu[k], 0.0);
                assert!(r.norm() < 1e-12 * cfg.lambda_so, "k = {k}");
            }
            assert!((u.adjoint() * &u - ComplexMatrix::identity(4, 4)).norm() < 1e-15);
            let (vals, _) = eigensystem_hermitian(&h).unwrap();
            let mut want = nu.to_vec();
            want.sort_by(f64::total_cmp);
            for (a, b) in vals.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12 * cfg.lambda_so);
            }
        }
        let v = fine_structure_eigenstates();
        let h = 1.0 / SQRT2;
        assert_eq!(v.column(2).iter().copied().collect::<Vec<_>>(), vec![C64::new(0.0, -h), C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(0.0, 0.0)]);
    }

    #[test]
    fn zero_field_degeneracy() {
        let nu = FineStructureConfig::default().levels();
        let l = ghz(23.0);
        assert_eq!(nu, [-l, l, l, -l]);
    }

    #[test]
    fn strain_hamiltonian_pattern() {
        let (hb, hg) = strain_hamiltonians(1.0, 1.0);
        for i in 0..4 {
            for j in 0..4 {
                let on = matches!((i, j), (0, 1) | (1, 0) | (2, 3) | (3, 2));
                assert_eq!(hb[(i, j)], C64::new(if on { 1.0 } else { 0.0 }, 0.0));
            }
        }
        assert_eq!(hg[(0, 1)], C64::new(0.0, 1.0));
        assert_eq!(hg[(1, 0)], C64::new(0.0, -1.0));
        assert_eq!(hg[(2, 3)], C64::new(0.0, 1.0));
        assert_eq!(hg[(3, 2)], C64::new(0.0, -1.0));
        assert_eq!(hb.adjoint(), hb);
        assert_eq!(hg.adjoint(), hg);
        assert_eq!(hb[(3, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn static_field_vanishes_without_bx() {
        let c = static_field_coupling(&FineStructureConfig::default(), mhz(10.0), mhz(10.0)).unwrap();
        assert_eq!(c.perturbative, C64::new(0.0, 0.0));
        assert!(c.exact.norm() < 1e-15);
    }

    #[test]
    fn static_field_rate_per_tesla() {
        let cfg = FineStructureConfig { b_x: 1e-3, ..Default::default() };
        let c = static_field_coupling(&cfg, mhz(10.0), 0.0).unwrap();
        let per_tesla = to_mhz(c.perturbative.norm()) / cfg.b_x;
        assert!((per_tesla - 10.0 * 28.0 / 23.0).abs() < 1e-9);
        // same order of magnitude as the quoted ∼5 MHz/T
        assert!(per_tesla > 1.0 && per_tesla < 50.0);
    }

    #[test]
    fn mw_coupling_examples() {
        let cfg = MWDriveConfig::default();
        let g = mw_effective_coupling(&cfg).unwrap();
        assert!((g - C64::new(mhz(1.0), 0.0)).norm() < 1e-12);
        let g2 = mw_effective_coupling(&MWDriveConfig { theta: std::f64::consts::FRAC_PI_2, ..cfg }).unwrap();
        assert!(g2.re.abs() < 1e-12 && (g2.im - g.re).abs() < 1e-12);
        assert_eq!(mw_effective_coupling(&MWDriveConfig { omega: 0.0, ..cfg }).unwrap().norm(), 0.0);
        let strong = MWDriveConfig { omega: 2.0 * cfg.detuning(), ..cfg };
        assert!(mw_effective_coupling(&strong).unwrap_err().to_string().contains("adiabatic"));
        let off = MWDriveConfig { omega_d: cfg.omega_d + 1.0, ..cfg };
        assert!(mw_effective_coupling(&off).is_err());
    }

    fn raman() -> RamanConfig {
        let (freq_a, freq_c, omega_b) = (ghz(406_000.0), ghz(406_010.0), ghz(2.0));
        RamanConfig {
            omega_a: mhz(100.0),
            omega_c: mhz(100.0),
            theta_a: 0.3,
            theta_c: 0.3,
            freq_a,
            freq_c,
            freq_e: ghz(406_020.0) + (omega_b + freq_a - freq_c),
            omega_p: omega_b + freq_a - freq_c,
            omega_b,
            delta_level: omega_b + freq_a - freq_c - mhz(200.0),
            g_orb: mhz(10.0),
        }
    }

    #[test]
    fn raman_coupling_examples() {
        let cfg = raman();
        let g = raman_effective_coupling(&cfg).unwrap();
        assert!(g.im.abs() < 1e-12 * g.norm());
        assert!((g.norm() / cfg.g_orb - cfg.perturbative_ratio().abs()).abs() < 1e-12);
        assert_eq!(raman_effective_coupling(&RamanConfig { omega_a: 0.0, ..cfg }).unwrap().norm(), 0.0);
        assert_eq!(raman_effective_coupling(&RamanConfig { omega_c: 0.0, ..cfg }).unwrap().norm(), 0.0);
        // prefactor product 0.05 → |g| = 0.05 g_orb
        let den = (cfg.omega_p - cfg.delta_level) * (cfg.freq_c - cfg.freq_e + cfg.omega_p);
        let amp = (0.05 * den.abs()).sqrt();
        let g = raman_effective_coupling(&RamanConfig { omega_a: amp, omega_c: amp, ..cfg }).unwrap();
        assert!((g.norm() - 0.05 * cfg.g_orb).abs() < 1e-12 * cfg.g_orb);
        // bilinear
        let g2 = raman_effective_coupling(&RamanConfig { omega_a: 2.0 * amp, omega_c: 3.0 * amp, ..cfg }).unwrap();
        assert!((g2.norm() - 6.0 * 0.05 * cfg.g_orb).abs() < 1e-12 * cfg.g_orb);
        assert!(raman_effective_coupling(&RamanConfig { freq_a: cfg.freq_a + 1.0, ..cfg }).is_err());
        let zero = RamanConfig { delta_level: cfg.omega_p, ..cfg };
        assert!(raman_effective_coupling(&zero).is_err());
    }

    #[test]
    fn coupling_map_examples() {
        let c = SusceptibilityConstants::default();
        // ε₃₃ = s gives ε_xx − ε_yy = 2s/3
        let s = 1.5 * 5.4e-9;
        let map = coupling_map(&[([0.0; 3], StrainTensor::from_components(0.0, 0.0, s, 0.0, 0.0, 0.0).unwrap())], &c, 1.0).unwrap();
        assert!((to_mhz(map.points[0].1) - 5.4).abs() < 1e-9);
        let zero = coupling_map(&[([1.0, 2.0, 3.0], StrainTensor::zero()); 4], &c, 7.0).unwrap();
        assert!(zero.points.iter().all(|p| p.1 == 0.0) && zero.max_abs == 0.0);
        let bad = coupling_map(&[([0.0; 3], StrainTensor::zero()), ([f64::NAN, 0.0, 0.0], StrainTensor::zero())], &c, 1.0);
        assert!(bad.unwrap_err().to_string().contains("row 1"));
    }
}
