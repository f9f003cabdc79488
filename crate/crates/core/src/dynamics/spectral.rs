//! Propagation through a full eigendecomposition.

use faer::Mat;

use crate::error::{check_dim, Result};
use crate::matrix::{dense_eigh, OperatorMatrix, StateVector, C64};

/// exp(−iht) for every t from one eigendecomposition of a Hermitian matrix.
pub struct SpectralPropagator {
    eigvals: Vec<f64>,
    eigvecs: Mat<C64>,
}

impl SpectralPropagator {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        Self::from_dense(&h.to_dense())
    }

    pub fn from_dense(h: &Mat<C64>) -> Result<Self> {
        let (eigvals, eigvecs) = dense_eigh(h)?;
        Ok(Self { eigvals, eigvecs })
    }

    pub fn dim(&self) -> usize {
        self.eigvals.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigvals
    }

    pub fn apply(&self, v: &StateVector, t: f64) -> Result<StateVector> {
        check_dim(self.dim(), v.dim())?;
        let n = self.dim();
        let col = Mat::<C64>::from_fn(n, 1, |i, _| v.0[i]);
        let mut coeffs = self.eigvecs.adjoint() * &col;
        for (i, &lam) in self.eigvals.iter().enumerate() {
            coeffs[(i, 0)] *= C64::from_polar(1.0, -lam * t);
        }
        let out = &self.eigvecs * &coeffs;
        Ok(StateVector((0..n).map(|i| out[(i, 0)]).collect()))
    }
}
