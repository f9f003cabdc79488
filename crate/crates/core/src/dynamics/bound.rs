//! Dense check of the first-order unitary difference bound.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::matrix::{dense_eigh, dense_spectral_norm, OperatorMatrix, C64};

/// Largest register the dense check accepts.
pub const BOUND_CHECK_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitaryBoundReport {
    pub gap: f64,
    pub kappa: f64,
    /// ‖e^{−iHt}P₀ − e^{−iH_eff t}P₀‖.
    pub difference: f64,
    /// 5κ + 6κ²‖Q₀WP₀‖t.
    pub bound: f64,
    pub holds: bool,
}

fn expm_hermitian(h: &Mat<C64>, t: f64) -> Result<Mat<C64>> {
    let (vals, u) = dense_eigh(h)?;
    let n = vals.len();
    let mut scaled = u.clone();
    for (j, &lam) in vals.iter().enumerate() {
        let ph = C64::from_polar(1.0, -lam * t);
        for i in 0..n {
            scaled[(i, j)] *= ph;
        }
    }
    Ok(&scaled * u.adjoint())
}

/// Compares the exact propagator on the zero space of `h0` with the one generated by
/// P₀WP₀ − P₀WR₀WP₀.
pub fn unitary_diff_bound_check(h0: &OperatorMatrix, w: &OperatorMatrix, t: f64) -> Result<UnitaryBoundReport> {
    check_dim(h0.dim(), w.dim())?;
    let n = h0.dim();
    if n > 1 << BOUND_CHECK_QUBITS {
        return Err(Error::Capacity {
            what: "unitary bound check (dimension)",
            requested: n,
            limit: 1 << BOUND_CHECK_QUBITS,
        });
    }
    let h0d = h0.to_dense();
    let wd = w.to_dense();
    let (vals, u) = dense_eigh(&h0d)?;
    let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let zero_tol = 1e-9 * scale;
    let gap = vals
        .iter()
        .map(|v| v.abs())
        .filter(|v| *v > zero_tol)
        .fold(f64::INFINITY, f64::min);
    let wnorm = dense_spectral_norm(&wd);
    let kappa = wnorm / gap;
    if kappa > 0.25 {
        return Err(Error::Precondition(format!("kappa = {kappa} exceeds 1/4")));
    }
    let mut p0 = Mat::<C64>::zeros(n, n);
    let mut r0 = Mat::<C64>::zeros(n, n);
    for (j, &lam) in vals.iter().enumerate() {
        let col = u.col(j);
        let outer = col * col.adjoint();
        if lam.abs() <= zero_tol {
            p0 += &outer;
        } else {
            r0 += outer * faer::Scale(C64::new(1.0 / lam, 0.0));
        }
    }
    let q0 = Mat::<C64>::identity(n, n) - &p0;
    let wp = &wd * &p0;
    let heff = &p0 * &wp - &p0 * &wd * &r0 * &wp;
    let h = &h0d + &wd;
    let lhs = expm_hermitian(&h, t)? * &p0 - expm_hermitian(&heff, t)? * &p0;
    let difference = dense_spectral_norm(&lhs);
    let leak = dense_spectral_norm(&(&q0 * &wp));
    let bound = 5.0 * kappa + 6.0 * kappa * kappa * leak * t.abs();
    Ok(UnitaryBoundReport {
        gap,
        kappa,
        difference,
        bound,
        holds: difference <= bound + 1e-12,
    })
}
