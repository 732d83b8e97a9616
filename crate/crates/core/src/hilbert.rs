//! Dense complex linear algebra and composite-system bookkeeping.
//!
//! Conventions: level 0 is the ground state (σ_z|0⟩ = +|0⟩), σ = |0⟩⟨1|, Fock
//! index = phonon number, and tensor factors are ordered as listed in the
//! [`CompositeSpace`] (SC, phonon, spin(s)).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

pub type ComplexMatrix = DMatrix<C64>;

/// Tolerance used for Hermiticity/PSD/trace checks.
pub const STATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct KetState {
    pub amplitudes: DVector<C64>,
}

impl KetState {
    pub fn new(amplitudes: DVector<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut a = DVector::zeros(dim);
        a[k] = C64::new(1.0, 0.0);
        Self { amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Self {
        Self { amplitudes: self.amplitudes.unscale(self.norm()) }
    }

    pub fn is_normalized(&self) -> bool {
        (self.amplitudes.norm_squared() - 1.0).abs() <= STATE_TOL
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(&self.amplitudes * self.amplitudes.adjoint())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian, unit trace and PSD within [`STATE_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(matrix);
        rho.validate(STATE_TOL)?;
        Ok(rho)
    }

    pub fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        assert!(matrix.is_square(), "density matrix must be square");
        Self { matrix }
    }

    pub fn pure(ket: &KetState) -> Self {
        ket.to_density()
    }

    /// |k⟩⟨k| in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        KetState::basis(dim, k).to_density()
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim, dim).unscale(dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ_ij |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = eigensystem_hermitian(&hermitian_part(&self.matrix))?;
        Ok(vals[0])
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(Error::NotHermitian(herm));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} ≠ 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < -tol {
            return Err(Error::NotPsd(min));
        }
        Ok(())
    }

    /// Population ⟨k|ρ|k⟩.
    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeSpace {
    dims: Vec<usize>,
}

impl CompositeSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidParameter(format!("subsystem dims must be ≥ 2, got {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Flat basis index of a product state |i₀, i₁, …⟩.
    pub fn index(&self, levels: &[usize]) -> usize {
        assert_eq!(levels.len(), self.dims.len());
        levels.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| {
            assert!(i < d);
            acc * d + i
        })
    }

    /// Product density matrix ρ₀ ⊗ ρ₁ ⊗ …
    pub fn product_state(&self, factors: &[DensityMatrix]) -> Result<DensityMatrix> {
        if factors.len() != self.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} factors for {} subsystems",
                factors.len(),
                self.dims.len()
            )));
        }
        let mut m = ComplexMatrix::identity(1, 1);
        for (f, &d) in factors.iter().zip(&self.dims) {
            if f.dim() != d {
                return Err(Error::DimensionMismatch(format!("factor dim {} vs {d}", f.dim())));
            }
            m = kron(&m, f.matrix());
        }
        Ok(DensityMatrix::from_matrix_unchecked(m))
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `op` acting on factor `site`, identity elsewhere.
pub fn embed(op: &ComplexMatrix, space: &CompositeSpace, site: usize) -> Result<ComplexMatrix> {
    let dims = space.dims();
    if site >= dims.len() {
        return Err(Error::DimensionMismatch(format!("site {site} out of range for {dims:?}")));
    }
    if op.nrows() != dims[site] || op.ncols() != dims[site] {
        return Err(Error::DimensionMismatch(format!(
            "operator {}×{} on site of dim {}",
            op.nrows(),
            op.ncols(),
            dims[site]
        )));
    }
    let before: usize = dims[..site].iter().product();
    let after: usize = dims[site + 1..].iter().product();
    let left = kron(&ComplexMatrix::identity(before, before), op);
    Ok(kron(&left, &ComplexMatrix::identity(after, after)))
}

/// Reduced state on the factors in `keep` (order of the space is preserved).
pub fn partial_trace(rho: &DensityMatrix, space: &CompositeSpace, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = space.dims();
    if rho.dim() != space.total_dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs space dim {}",
            rho.dim(),
            space.total_dim()
        )));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() != keep.len() || kept.iter().any(|&s| s >= dims.len()) {
        return Err(Error::InvalidParameter(format!("invalid keep set {keep:?} for {dims:?}")));
    }
    let n = rho.dim();
    let dk: usize = kept.iter().map(|&s| dims[s]).product();
    let mut kidx = vec![0usize; n];
    let mut tidx = vec![0usize; n];
    for i in 0..n {
        let mut rem = i;
        let mut levels = vec![0usize; dims.len()];
        for s in (0..dims.len()).rev() {
            levels[s] = rem % dims[s];
            rem /= dims[s];
        }
        let (mut k, mut t) = (0, 0);
        for (s, (&l, &d)) in levels.iter().zip(dims).enumerate() {
            if kept.contains(&s) {
                k = k * d + l;
            } else {
                t = t * d + l;
            }
        }
        kidx[i] = k;
        tidx[i] = t;
    }
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for j in 0..n {
        for i in 0..n {
            if tidx[i] == tidx[j] {
                out[(kidx[i], kidx[j])] += m[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

pub fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).unscale(2.0)
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}×{} is not square", m.nrows(), m.ncols())));
    }
    let scale = m.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    let err = hermiticity_error(m);
    if err > STATE_TOL * scale {
        return Err(Error::NotHermitian(err));
    }
    Ok(())
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors (columns).
pub fn eigensystem_hermitian(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(m)?;
    let eig = hermitian_part(m).symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((vals, vecs))
}

/// f(m) = V f(Λ) V† for Hermitian m.
fn spectral_map(vals: &[f64], vecs: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let fv = f(v);
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= fv);
    }
    scaled * vecs.adjoint()
}

/// PSD square root; eigenvalues in [−1e-9, 0) are clamped to zero.
pub fn hermitian_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (vals, vecs) = eigensystem_hermitian(m)?;
    if let Some(&min) = vals.first() {
        if min < -STATE_TOL {
            return Err(Error::NotPsd(min));
        }
    }
    Ok(spectral_map(&vals, &vecs, |v| v.max(0.0).sqrt()))
}

/// Uhlmann fidelity F = Tr √(√ρ_i ρ_f √ρ_i) (root form, in [0, 1]).
pub fn fidelity(rho_i: &DensityMatrix, rho_f: &DensityMatrix) -> Result<f64> {
    if rho_i.dim() != rho_f.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", rho_i.dim(), rho_f.dim())));
    }
    // For a pure argument F = √⟨ψ|σ|ψ⟩ = √Tr(ρσ); this avoids √(noise)
    // contributions from numerically-zero eigenvalues.
    let pure_tol = 1e-13;
    if rho_i.purity() > 1.0 - pure_tol || rho_f.purity() > 1.0 - pure_tol {
        let overlap = expectation(rho_i, rho_f.matrix())?.re;
        return Ok(overlap.max(0.0).sqrt().min(1.0));
    }
    let s = hermitian_sqrt(&hermitian_part(rho_i.matrix()))?;
    let m = hermitian_part(&(&s * rho_f.matrix() * &s));
    let (vals, _) = eigensystem_hermitian(&m)?;
    if vals[0] < -STATE_TOL {
        return Err(Error::NotPsd(vals[0]));
    }
    let f: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Tr(ρ·op).
pub fn expectation(rho: &DensityMatrix, op: &ComplexMatrix) -> Result<C64> {
    let m = rho.matrix();
    if op.nrows() != m.nrows() || op.ncols() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "operator {}×{} on state of dim {}",
            op.nrows(),
            op.ncols(),
            m.nrows()
        )));
    }
    Ok(m.iter().zip(op.transpose().iter()).map(|(a, b)| a * b).sum())
}

/// exp(−i·m·t) for Hermitian m.
pub fn unitary_propagator(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = eigensystem_hermitian(m)?;
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let phase = C64::from_polar(1.0, -v * t);
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= phase);
    }
    Ok(scaled * vecs.adjoint())
}

/// Standard operators.
pub mod ops {
    use super::ComplexMatrix;
    use crate::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub fn identity(n: usize) -> ComplexMatrix {
        ComplexMatrix::identity(n, n)
    }

    /// Lowering operator σ = |0⟩⟨1|.
    pub fn sigma_minus() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)])
    }

    pub fn sigma_plus() -> ComplexMatrix {
        sigma_minus().adjoint()
    }

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }

    /// σ_z with σ_z|0⟩ = +|0⟩.
    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }

    /// |k⟩⟨k| in dimension n.
    pub fn projector(n: usize, k: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        m[(k, k)] = c(1., 0.);
        m
    }

    /// Excited-state projector σ†σ = |1⟩⟨1|.
    pub fn excited() -> ComplexMatrix {
        projector(2, 1)
    }

    /// Truncated bosonic annihilation operator on Fock levels 0..n.
    pub fn destroy(n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for k in 1..n {
            m[(k - 1, k)] = c((k as f64).sqrt(), 0.);
        }
        m
    }

    pub fn number(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |k, _| c(k as f64, 0.)))
    }
}
