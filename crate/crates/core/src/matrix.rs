//! Sparse complex matrices, state vectors and norm estimation.

use std::ops::{Index, IndexMut};

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::pauli::{i_pow, PauliString};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Amplitude vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector(pub Vec<C64>);

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![ZERO; dim])
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[k] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.0.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// ⟨self|other⟩, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        inner(&self.0, &other.0)
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, s: C64) -> StateVector {
        StateVector(self.0.iter().map(|a| a * s).collect())
    }
}

impl Index<usize> for StateVector {
    type Output = C64;
    fn index(&self, k: usize) -> &C64 {
        &self.0[k]
    }
}

impl IndexMut<usize> for StateVector {
    fn index_mut(&mut self, k: usize) -> &mut C64 {
        &mut self.0[k]
    }
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Square complex matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<C64>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|k| (k, k, ONE)))
    }

    /// Builds from (row, col, value) triplets; duplicates are summed, exact zeros dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut rows: Vec<Vec<(u32, C64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            rows[r].push((c as u32, v));
        }
        Self::from_rows(dim, rows)
    }

    fn from_rows(dim: usize, rows: Vec<Vec<(u32, C64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = ZERO;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if v != ZERO {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub(crate) fn from_pauli_terms(n_qubits: usize, terms: &[PauliString]) -> Self {
        let dim = 1usize << n_qubits;
        // Terms sharing an X mask contribute to the same off-diagonal.
        let mut groups: Vec<(u64, Vec<(u64, C64)>)> = Vec::new();
        for t in terms {
            let (x, z, ny) = t.masks();
            let c = t.coeff * i_pow(ny);
            match groups.iter_mut().find(|g| g.0 == x) {
                Some(g) => g.1.push((z, c)),
                None => groups.push((x, vec![(z, c)])),
            }
        }
        let mut rows = Vec::with_capacity(dim);
        for r in 0..dim as u64 {
            let mut row = Vec::with_capacity(groups.len());
            for (x, zs) in &groups {
                let col = r ^ x;
                let v: C64 = zs
                    .iter()
                    .map(|&(z, c)| if (col & z).count_ones() % 2 == 0 { c } else { -c })
                    .sum();
                row.push((col as u32, v));
            }
            rows.push(row);
        }
        Self::from_rows(dim, rows)
    }

    pub fn from_dense(m: &Mat<C64>) -> Self {
        let dim = m.nrows();
        Self::from_triplets(
            dim,
            (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c, m[(r, c)]))),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Nonzero entries as (row, col, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k] as usize, self.vals[k]))
        })
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&(c as u32)) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        check_dim(self.dim, v.dim())?;
        let mut out = StateVector::zeros(self.dim);
        self.apply_into(&v.0, &mut out.0);
        Ok(out)
    }

    /// `out = self · v`; slices must have length `dim`.
    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * v[self.cols[k] as usize];
            }
            *o = acc;
        }
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scaled(&self, s: C64) -> OperatorMatrix {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= s);
        m
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        check_dim(self.dim, other.dim)?;
        Ok(Self::from_triplets(self.dim, self.entries().chain(other.entries())))
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.add(&other.scaled(-ONE))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        Ok(self.sub(other)?.max_abs_entry())
    }

    /// max |M − M†| over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).map(|d| d.max_abs_entry()).unwrap_or(f64::INFINITY)
    }

    /// Submatrix selecting `rows` × `cols` (dense-index lists into this matrix).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RectMatrix {
        let mut col_pos = vec![usize::MAX; self.dim];
        for (j, &c) in cols.iter().enumerate() {
            col_pos[c] = j;
        }
        let mut entries = Vec::new();
        for (i, &r) in rows.iter().enumerate() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let j = col_pos[self.cols[k] as usize];
                if j != usize::MAX {
                    entries.push((i, j, self.vals[k]));
                }
            }
        }
        RectMatrix {
            nrows: rows.len(),
            ncols: cols.len(),
            entries,
        }
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Spectral norm, assuming the matrix is Hermitian.
    pub fn hermitian_norm(&self) -> f64 {
        if self.nnz() == 0 {
            return 0.0;
        }
        if self.dim <= DENSE_NORM_DIM {
            return dense_hermitian_norm(&self.to_dense());
        }
        lanczos_extremal(self.dim, |v, out| self.apply_into(v, out)).abs_max()
    }

    /// Spectral norm of an arbitrary square matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.as_rect().spectral_norm()
    }

    pub fn as_rect(&self) -> RectMatrix {
        RectMatrix {
            nrows: self.dim,
            ncols: self.dim,
            entries: self.entries().collect(),
        }
    }
}

/// Matrices up to this dimension get exact dense norms.
pub const DENSE_NORM_DIM: usize = 256;

/// Rectangular sparse matrix in coordinate form, used for off-diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl RectMatrix {
    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.nrows, self.ncols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.to_dense_abs_max()
    }

    fn to_dense_abs_max(&self) -> f64 {
        if self.nrows * self.ncols <= 1 << 22 {
            let d = self.to_dense();
            let mut best = 0.0f64;
            for c in 0..d.ncols() {
                for r in 0..d.nrows() {
                    best = best.max(d[(r, c)].norm());
                }
            }
            best
        } else {
            self.entries.iter().map(|e| e.2.norm()).fold(0.0, f64::max)
        }
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.entries.iter().all(|e| e.2 == ZERO) {
            return 0.0;
        }
        if self.nrows.max(self.ncols) <= DENSE_NORM_DIM {
            return dense_spectral_norm(&self.to_dense());
        }
        let mut tmp = vec![ZERO; self.nrows];
        let lam = lanczos_extremal(self.ncols, |v, out| {
            tmp.iter_mut().for_each(|t| *t = ZERO);
            for &(r, c, a) in &self.entries {
                tmp[r] += a * v[c];
            }
            out.iter_mut().for_each(|o| *o = ZERO);
            for &(r, c, a) in &self.entries {
                out[c] += a.conj() * tmp[r];
            }
        });
        lam.max.max(0.0).sqrt()
    }
}

pub fn dense_hermitian_norm(m: &Mat<C64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let eig = m
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("Hermitian eigenvalue solver failed");
    eig.iter().map(|e| e.abs()).fold(0.0, f64::max)
}

pub fn dense_spectral_norm(m: &Mat<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let sv = m.singular_values().expect("SVD failed");
    sv.iter().copied().fold(0.0, f64::max)
}

pub(crate) struct Extremal {
    pub min: f64,
    pub max: f64,
}

impl Extremal {
    pub fn abs_max(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }
}

const LANCZOS_MAX_STEPS: usize = 160;
const LANCZOS_TOL: f64 = 1e-12;

/// Extremal eigenvalues of a Hermitian operator given as a matvec closure.
///
/// Full reorthogonalization; start vector is a fixed pseudo-random vector so the
/// result is deterministic.
pub(crate) fn lanczos_extremal(dim: usize, mut matvec: impl FnMut(&[C64], &mut [C64])) -> Extremal {
    let steps = LANCZOS_MAX_STEPS.min(dim);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(steps);
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    let mut q: Vec<C64> = (0..dim)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            C64::new(a + 0.1, b)
        })
        .collect();
    let n0 = vec_norm(&q);
    q.iter_mut().for_each(|a| *a /= n0);
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![ZERO; dim];
    let mut last = Extremal { min: 0.0, max: 0.0 };
    for k in 0..steps {
        matvec(&q, &mut w);
        let alpha = inner(&q, &w).re;
        alphas.push(alpha);
        basis.push(q.clone());
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let beta = vec_norm(&w);
        let done = beta <= LANCZOS_TOL * alpha.abs().max(1e-300) || k + 1 == steps;
        if done || (k + 1) % 8 == 0 {
            let (ev, evec_last) = tridiag_eigs(&alphas, &betas);
            let cur = Extremal {
                min: ev[0],
                max: ev[ev.len() - 1],
            };
            let scale = cur.min.abs().max(cur.max.abs()).max(1e-300);
            let res_min = (beta * evec_last[0]).abs();
            let res_max = (beta * evec_last[ev.len() - 1]).abs();
            if done || (res_min <= 1e-13 * scale && res_max <= 1e-13 * scale) {
                return cur;
            }
            last = cur;
        }
        betas.push(beta);
        q = w.iter().map(|a| a / beta).collect();
    }
    last
}

/// Eigenvalues (ascending) of a real symmetric tridiagonal matrix and the last
/// component of each eigenvector.
fn tridiag_eigs(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = alphas.len();
    let mut t = Mat::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.self_adjoint_eigen(Side::Lower).expect("tridiagonal eigensolver failed");
    let vals: Vec<f64> = (0..m).map(|i| eig.S().column_vector()[i]).collect();
    let lasts: Vec<f64> = (0..m).map(|i| eig.U()[(m - 1, i)]).collect();
    (vals, lasts)
}

/// Dense Hermitian eigendecomposition: ascending eigenvalues and eigenvector columns.
pub fn dense_eigh(m: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let eig = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Numerical {
        message: format!("Hermitian eigendecomposition failed: {e:?}"),
        residual: f64::NAN,
    })?;
    let n = m.nrows();
    let vals = (0..n).map(|i| eig.S().column_vector()[i].re).collect();
    Ok((vals, eig.U().to_owned()))
}
