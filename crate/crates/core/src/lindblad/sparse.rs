//! Compressed-row complex matrices used for the compiled generators.
//!
//! Density matrices are vectorized column-major (the nalgebra storage order),
//! so `ρ_ij ↔ v[i + j·d]` and `A ρ B ↔ (Bᵀ ⊗ A) v`.

use crate::hilbert::ComplexMatrix;
use crate::C64;

#[derive(Debug, Clone, Default)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    pub fn from_triplets(n: usize, mut trips: Vec<(usize, usize, C64)>) -> Self {
        trips.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(trips.len());
        let mut vals: Vec<C64> = Vec::with_capacity(trips.len());
        let mut rows = Vec::with_capacity(trips.len());
        for (r, c, v) in trips {
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            vals.push(v);
        }
        // drop exact cancellations
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut keep_cols = Vec::with_capacity(rows.len());
        let mut keep_vals = Vec::with_capacity(rows.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != C64::new(0.0, 0.0) {
                keep_rows.push(r);
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for &r in &keep_rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols: keep_cols, vals: keep_vals }
    }

    pub fn from_dense(m: &ComplexMatrix) -> Self {
        Self::from_triplets(m.nrows(), nonzeros(m))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// y += α·A·x
    #[inline]
    pub fn mul_add(&self, alpha: C64, x: &[C64], y: &mut [C64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.n) {
            let mut acc = C64::new(0.0, 0.0);
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[idx] * x[self.cols[idx]];
            }
            *yr += alpha * acc;
        }
    }

    /// Iterate over (row, col, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n).flat_map(move |r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k])))
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for (r, c, v) in self.entries() {
            m[(r, c)] += v;
        }
        m
    }
}

pub fn nonzeros(m: &ComplexMatrix) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != C64::new(0.0, 0.0) {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Triplets of the superoperator ρ ↦ coef·A ρ B in column-major vectorization.
pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix, coef: C64, out: &mut Vec<(usize, usize, C64)>) {
    let d = a.nrows();
    let an = nonzeros(a);
    let bn = nonzeros(b);
    for &(i, k, av) in &an {
        for &(l, j, bv) in &bn {
            out.push((i + j * d, k + l * d, coef * av * bv));
        }
    }
}

/// Tr(A ρ) for a vectorized ρ, with A given as triplets.
pub fn trace_product(a: &[(usize, usize, C64)], rho: &[C64], d: usize) -> C64 {
    a.iter().map(|&(i, j, v)| v * rho[j + i * d]).sum()
}
