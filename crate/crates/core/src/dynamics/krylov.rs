//! Lanczos approximation of exp(−iht)·v.

use faer::{Mat, Side};

use crate::error::{check_dim, Error, Result};
use crate::matrix::{inner, OperatorMatrix, StateVector, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub dim: usize,
    /// Upper bound on ‖h‖·Δt for a substep.
    pub max_phase: f64,
    /// Accepted error estimate per substep.
    pub tol: f64,
    pub max_substeps: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            dim: 30,
            max_phase: 20.0,
            tol: 1e-12,
            max_substeps: 1_000_000,
        }
    }
}

/// Upper bound on the spectral norm: the largest absolute row sum.
pub fn row_sum_bound(h: &OperatorMatrix) -> f64 {
    let mut best = 0.0f64;
    let mut row = usize::MAX;
    let mut acc = 0.0;
    for (r, _, v) in h.entries() {
        if r != row {
            best = best.max(acc);
            acc = 0.0;
            row = r;
        }
        acc += v.norm();
    }
    best.max(acc)
}

pub fn evolve(h: &OperatorMatrix, v: &StateVector, t: f64) -> Result<StateVector> {
    evolve_with(h, v, t, &KrylovOptions::default())
}

pub fn evolve_with(h: &OperatorMatrix, v: &StateVector, t: f64, opts: &KrylovOptions) -> Result<StateVector> {
    check_dim(h.dim(), v.dim())?;
    let hnorm = row_sum_bound(h);
    if t == 0.0 || hnorm == 0.0 {
        return Ok(v.clone());
    }
    let sign = t.signum();
    let mut remaining = t.abs();
    let max_dt = opts.max_phase / hnorm;
    let mut dt = remaining.min(max_dt);
    let mut w = v.0.clone();
    let mut substeps = 0usize;
    while remaining > 0.0 {
        let beta0 = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if beta0 == 0.0 {
            break;
        }
        let basis = LanczosBasis::build(h, &w, beta0, opts.dim, hnorm);
        loop {
            substeps += 1;
            if substeps > opts.max_substeps {
                return Err(Error::Numerical {
                    message: "Krylov propagation exceeded the substep cap".into(),
                    residual: f64::NAN,
                });
            }
            let step = dt.min(remaining);
            let (small, err) = basis.exp_e1(sign * step);
            if err <= opts.tol.max(basis.roundoff_floor()) {
                w = basis.combine(&small, beta0);
                remaining -= step;
                if err < opts.tol * 1e-3 {
                    dt = (dt * 1.5).min(max_dt);
                }
                break;
            }
            dt = step / 2.0;
            if dt * hnorm < 1e-14 {
                return Err(Error::Numerical {
                    message: "Krylov step size underflow".into(),
                    residual: err,
                });
            }
        }
    }
    Ok(StateVector(w))
}

struct LanczosBasis {
    vectors: Vec<Vec<C64>>,
    eigvals: Vec<f64>,
    eigvecs: Mat<f64>,
    /// β of the next (unbuilt) vector; zero on invariant subspace.
    beta_next: f64,
}

impl LanczosBasis {
    fn build(h: &OperatorMatrix, w: &[C64], beta0: f64, m: usize, hnorm: f64) -> Self {
        let n = w.len();
        let m = m.min(n);
        let mut vectors: Vec<Vec<C64>> = vec![w.iter().map(|a| a / beta0).collect()];
        let mut alphas = Vec::with_capacity(m);
        let mut betas = Vec::with_capacity(m);
        let mut beta_next = 0.0;
        let mut hv = vec![ZERO; n];
        for k in 0..m {
            h.apply_into(&vectors[k], &mut hv);
            let alpha = inner(&vectors[k], &hv).re;
            alphas.push(alpha);
            for _ in 0..2 {
                for b in &vectors {
                    let c = inner(b, &hv);
                    hv.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let beta = hv.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if beta <= 1e-13 * hnorm {
                beta_next = 0.0;
                break;
            }
            beta_next = beta;
            if k + 1 == m {
                break;
            }
            betas.push(beta);
            vectors.push(hv.iter().map(|a| a / beta).collect());
        }
        let k = alphas.len();
        let mut t = Mat::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = t.self_adjoint_eigen(Side::Lower).expect("tridiagonal eigensolver failed");
        let eigvals = (0..k).map(|i| eig.S().column_vector()[i]).collect();
        Self {
            vectors,
            eigvals,
            eigvecs: eig.U().to_owned(),
            beta_next,
        }
    }

    /// exp(−iτT)e₁ and the a-posteriori error estimate β·|last component|.
    fn exp_e1(&self, tau: f64) -> (Vec<C64>, f64) {
        let k = self.eigvals.len();
        let mut out = vec![ZERO; k];
        for (j, &lam) in self.eigvals.iter().enumerate() {
            let c = C64::from_polar(self.eigvecs[(0, j)], -lam * tau);
            for (i, o) in out.iter_mut().enumerate() {
                *o += c * self.eigvecs[(i, j)];
            }
        }
        let err = self.beta_next * out[k - 1].norm();
        (out, err)
    }

    /// Size of the error estimate that rounding alone produces.
    fn roundoff_floor(&self) -> f64 {
        8.0 * self.eigvals.len() as f64 * f64::EPSILON * self.beta_next
    }

    fn combine(&self, small: &[C64], scale: f64) -> Vec<C64> {
        let n = self.vectors[0].len();
        let mut w = vec![ZERO; n];
        for (c, v) in small.iter().zip(&self.vectors) {
            let c = c * scale;
            w.iter_mut().zip(v).for_each(|(x, y)| *x += c * y);
        }
        w
    }
}
