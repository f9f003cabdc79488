//! Noisy evolution, infidelity sweeps and the penalty-scaling bound.

mod bound;
mod krylov;
mod spectral;

use std::io::Write;
use std::time::Instant;

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::code::bell::{from_bell_frame, to_bell_frame};
use crate::code::CodeLayout;
use crate::error::{Error, Result};
use crate::matrix::{OperatorMatrix, StateVector, C64};
use crate::models::EncodedSystem;
use crate::pauli::{OperatorSum, Pauli};
use crate::rng;

pub use bound::{unitary_diff_bound_check, UnitaryBoundReport, BOUND_CHECK_QUBITS};
pub use krylov::{evolve, evolve_with, row_sum_bound, KrylovOptions};
pub use spectral::SpectralPropagator;

/// Mean infidelities below this are left out of the slope fit.
pub const FIT_FLOOR: f64 = 100.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default = "default_amplitude")]
    pub amplitude_bound: f64,
    #[serde(default = "default_axes")]
    pub axes: Vec<Pauli>,
    #[serde(default)]
    pub seed: u64,
}

fn default_amplitude() -> f64 {
    0.1
}

fn default_axes() -> Vec<Pauli> {
    Pauli::NON_IDENTITY.to_vec()
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            amplitude_bound: default_amplitude(),
            axes: default_axes(),
            seed: 0,
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude_bound >= 0.0 && self.amplitude_bound.is_finite()) {
            return Err(Error::Parse(format!(
                "noise amplitude must be finite and non-negative, got {}",
                self.amplitude_bound
            )));
        }
        if self.axes.contains(&Pauli::I) {
            return Err(Error::Parse("noise axes must be X, Y or Z".into()));
        }
        Ok(())
    }

    pub fn silent() -> Self {
        Self {
            amplitude_bound: 0.0,
            ..Self::default()
        }
    }
}

/// One term per (qubit, axis) with coefficient uniform in [−bound, bound].
pub fn sample_noise(n_qubits: usize, spec: &NoiseSpec) -> OperatorSum {
    sample_noise_stream(n_qubits, spec, rng::NOISE_STREAM)
}

pub fn sample_noise_stream(n_qubits: usize, spec: &NoiseSpec, stream: u64) -> OperatorSum {
    let mut v = OperatorSum::new(n_qubits);
    if spec.amplitude_bound == 0.0 {
        return v;
    }
    let mut r = rng::stream(spec.seed, stream);
    let b = spec.amplitude_bound;
    for q in 0..n_qubits {
        for &axis in &spec.axes {
            let c: f64 = r.random_range(-b..=b);
            v.add_term(&[(q, axis)], c).expect("qubit in range");
        }
    }
    v
}

/// Standard complex Gaussian vector normalized to the unit sphere.
pub fn random_unit_coefficients(dim: usize, seed: u64) -> StateVector {
    let mut r = rng::stream(seed, rng::STATE_STREAM);
    let mut v = StateVector(
        (0..dim)
            .map(|_| C64::new(r.sample(StandardNormal), r.sample(StandardNormal)))
            .collect(),
    );
    v.normalize();
    v
}

/// Physical state Σ_L c_L |codeword_L⟩.
pub fn embed_codeword_amplitudes(layout: &CodeLayout, coeffs: &StateVector) -> Result<StateVector> {
    let configs = layout.codeword_configs();
    crate::error::check_dim(configs.len(), coeffs.dim())?;
    let mut f = StateVector::zeros(1usize << layout.n_physical());
    for (c, a) in configs.iter().zip(&coeffs.0) {
        f.0[*c as usize] = *a;
    }
    Ok(from_bell_frame(&f))
}

/// Overlaps ⟨codeword_L|v⟩ for every codeword.
pub fn codeword_amplitudes(layout: &CodeLayout, v: &StateVector) -> Result<StateVector> {
    crate::error::check_dim(1usize << layout.n_physical(), v.dim())?;
    let f = to_bell_frame(v);
    Ok(StateVector(
        layout.codeword_configs().iter().map(|&c| f.0[c as usize]).collect(),
    ))
}

/// Uniformly random state of the code space.
pub fn random_encoded_state(layout: &CodeLayout, seed: u64) -> Result<StateVector> {
    let coeffs = random_unit_coefficients(1usize << layout.n_logical(), seed);
    embed_codeword_amplitudes(layout, &coeffs)
}

/// (M/λ)(6 + 13Mt)², or `None` when λ < 25M.
pub fn infidelity_bound(m: f64, lambda: f64, t: f64) -> Option<f64> {
    (lambda >= 25.0 * m).then(|| m / lambda * (6.0 + 13.0 * m * t).powi(2))
}

/// max{‖H₂‖², ‖H₁ + V‖}.
#[allow(non_snake_case)]
pub fn compute_M(sys: &EncodedSystem, noise: &OperatorSum) -> Result<f64> {
    let h2 = sys.h_enc2.to_matrix()?.hermitian_norm();
    let h1v = sys.h_enc1.plus(noise)?.simplified().to_matrix()?.hermitian_norm();
    Ok((h2 * h2).max(h1v))
}

/// Propagation method limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Registers up to this many qubits use a dense eigendecomposition.
    pub dense_limit: usize,
    pub krylov: KrylovOptions,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            dense_limit: 12,
            krylov: KrylovOptions::default(),
        }
    }
}

enum Propagator {
    Spectral(SpectralPropagator),
    Krylov(OperatorMatrix, KrylovOptions),
}

impl Propagator {
    fn new(h: &OperatorSum, opts: &SimOptions) -> Result<Self> {
        let m = h.to_matrix()?;
        if h.n_qubits() <= opts.dense_limit {
            Ok(Propagator::Spectral(SpectralPropagator::new(&m)?))
        } else {
            Ok(Propagator::Krylov(m, opts.krylov))
        }
    }

    fn apply(&self, v: &StateVector, t: f64) -> Result<StateVector> {
        match self {
            Propagator::Spectral(p) => p.apply(v, t),
            Propagator::Krylov(m, o) => evolve_with(m, v, t, o),
        }
    }
}

/// Target dynamics in the codeword frame.
pub struct TargetEvolution {
    propagator: SpectralPropagator,
}

impl TargetEvolution {
    pub fn new(sys: &EncodedSystem) -> Result<Self> {
        Ok(Self {
            propagator: SpectralPropagator::new(&sys.target_codeword_matrix()?)?,
        })
    }

    pub fn evolve(&self, coeffs: &StateVector, t: f64) -> Result<StateVector> {
        self.propagator.apply(coeffs, t)
    }
}

fn infidelity(target: &StateVector, actual: &StateVector) -> f64 {
    (1.0 - target.inner(actual).norm_sqr()).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub lambda: f64,
    pub seed: u64,
    pub t: f64,
    pub infidelity: f64,
    pub bound: Option<f64>,
    #[serde(rename = "M")]
    pub m: f64,
    pub wall_time_s: f64,
}

/// Evolves one random encoded state under the noisy simulator Hamiltonian.
pub fn run_simulation(sys: &EncodedSystem, lambda: f64, noise: &NoiseSpec, t: f64, seed: u64) -> Result<RunRecord> {
    run_simulation_with(sys, lambda, noise, t, seed, &SimOptions::default())
}

pub fn run_simulation_with(
    sys: &EncodedSystem,
    lambda: f64,
    noise: &NoiseSpec,
    t: f64,
    seed: u64,
    opts: &SimOptions,
) -> Result<RunRecord> {
    let cfg = SweepConfig {
        lambdas: vec![lambda],
        t,
        n_samples: 1,
        master_seed: 0,
        noise: noise.clone(),
        options: *opts,
        record_wall_time: true,
        workers: Some(1),
    };
    let ctx = SweepContext::new(sys, &cfg)?;
    let prop = ctx.propagator(lambda)?;
    ctx.run(&prop, lambda, seed, true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub lambdas: Vec<f64>,
    pub t: f64,
    pub n_samples: usize,
    pub master_seed: u64,
    pub noise: NoiseSpec,
    pub options: SimOptions,
    /// When false, wall times are written as 0 so output is bit-reproducible.
    pub record_wall_time: bool,
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn new(lambdas: Vec<f64>, t: f64, n_samples: usize, master_seed: u64, noise: NoiseSpec) -> Self {
        Self {
            lambdas,
            t,
            n_samples,
            master_seed,
            noise,
            options: SimOptions::default(),
            record_wall_time: false,
            workers: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() {
            return Err(Error::Parse("lambda list is empty".into()));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::Parse(format!("lambda values must be positive, got {l}")));
        }
        if self.n_samples == 0 {
            return Err(Error::Parse("n_samples must be positive".into()));
        }
        self.noise.validate()
    }
}

/// Per-sweep constants: noise realization, M and the target propagator.
struct SweepContext<'a> {
    sys: &'a EncodedSystem,
    noise: OperatorSum,
    m: f64,
    target: TargetEvolution,
    t: f64,
    opts: SimOptions,
}

impl<'a> SweepContext<'a> {
    fn new(sys: &'a EncodedSystem, cfg: &SweepConfig) -> Result<Self> {
        cfg.validate()?;
        let noise = sample_noise(sys.n_physical(), &cfg.noise);
        let m = compute_M(sys, &noise)?;
        Ok(Self {
            sys,
            m,
            target: TargetEvolution::new(sys)?,
            noise,
            t: cfg.t,
            opts: cfg.options,
        })
    }

    fn propagator(&self, lambda: f64) -> Result<Propagator> {
        Propagator::new(&self.sys.simulator_hamiltonian(lambda, Some(&self.noise))?, &self.opts)
    }

    fn run(&self, prop: &Propagator, lambda: f64, seed: u64, timed: bool) -> Result<RunRecord> {
        let start = Instant::now();
        let coeffs = random_unit_coefficients(1usize << self.sys.layout.n_logical(), seed);
        let psi0 = embed_codeword_amplitudes(&self.sys.layout, &coeffs)?;
        let psi = prop.apply(&psi0, self.t)?;
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::Numerical {
                message: "propagation lost normalization".into(),
                residual: (norm - 1.0).abs(),
            });
        }
        let target = self.target.evolve(&coeffs, self.t)?;
        let actual = codeword_amplitudes(&self.sys.layout, &psi)?;
        Ok(RunRecord {
            lambda,
            seed,
            t: self.t,
            infidelity: infidelity(&target, &actual),
            bound: infidelity_bound(self.m, lambda, self.t),
            m: self.m,
            wall_time_s: if timed { start.elapsed().as_secs_f64() } else { 0.0 },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaStats {
    pub lambda: f64,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// 95% interval from the Student t distribution; absent with two points.
    pub ci95: Option<(f64, f64)>,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<RunRecord>,
    pub stats: Vec<LambdaStats>,
    pub fitted_slope: Option<SlopeFit>,
    #[serde(rename = "M")]
    pub m: f64,
}

impl SweepResult {
    pub fn bound_violations(&self) -> Vec<&RunRecord> {
        self.records
            .iter()
            .filter(|r| r.bound.is_some_and(|b| r.infidelity > b))
            .collect()
    }

    pub fn mean_at(&self, lambda: f64) -> Option<f64> {
        self.stats.iter().find(|s| s.lambda == lambda).map(|s| s.mean)
    }
}

fn stats_of(lambda: f64, values: &[f64]) -> LambdaStats {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    LambdaStats {
        lambda,
        mean,
        std: var.sqrt(),
        n,
    }
}

/// Least-squares slope of log(mean) against log(λ), skipping floor-level points.
pub fn fit_log_slope(stats: &[LambdaStats]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = stats
        .iter()
        .filter(|s| s.mean >= FIT_FLOOR)
        .map(|s| (s.lambda.ln(), s.mean.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (stderr, ci95) = if n > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        let se = (rss / (nf - 2.0) / sxx).sqrt();
        let q = StudentsT::new(0.0, 1.0, nf - 2.0)
            .map(|d| d.inverse_cdf(0.975))
            .unwrap_or(f64::NAN);
        (se, Some((slope - q * se, slope + q * se)))
    } else {
        (f64::NAN, None)
    };
    Some(SlopeFit {
        slope,
        intercept,
        stderr,
        ci95,
        n_points: n,
    })
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w.max(1));
    }
    let pool = b.build().map_err(|e| Error::Numerical {
        message: format!("worker pool: {e}"),
        residual: f64::NAN,
    })?;
    Ok(pool.install(f))
}

/// Runs `n_samples` random initial states at every λ.
///
/// One noise realization (from `noise.seed`) is shared by the whole sweep and
/// sample `k` uses seed `sample_seed(master_seed, k)` at every λ.
pub fn sweep_lambda(sys: &EncodedSystem, cfg: &SweepConfig) -> Result<SweepResult> {
    let ctx = SweepContext::new(sys, cfg)?;
    let seeds: Vec<u64> = (0..cfg.n_samples).map(|k| rng::sample_seed(cfg.master_seed, k)).collect();
    let per_lambda: Vec<Result<Vec<RunRecord>>> = with_pool(cfg.workers, || {
        cfg.lambdas
            .par_iter()
            .map(|&lambda| {
                let prop = ctx.propagator(lambda)?;
                seeds
                    .iter()
                    .map(|&s| ctx.run(&prop, lambda, s, cfg.record_wall_time))
                    .collect()
            })
            .collect()
    })?;
    let mut records = Vec::new();
    let mut stats = Vec::new();
    for (lambda, recs) in cfg.lambdas.iter().zip(per_lambda) {
        let recs = recs?;
        let vals: Vec<f64> = recs.iter().map(|r| r.infidelity).collect();
        stats.push(stats_of(*lambda, &vals));
        records.extend(recs);
    }
    Ok(SweepResult {
        fitted_slope: fit_log_slope(&stats),
        records,
        stats,
        m: ctx.m,
    })
}

/// Infidelities of H_tar + V on the bare logical register, one per sample.
pub fn unencoded_baseline(sys: &EncodedSystem, cfg: &SweepConfig) -> Result<LambdaStats> {
    cfg.validate()?;
    let n = sys.layout.n_logical();
    let noise = sample_noise_stream(n, &cfg.noise, rng::BASELINE_NOISE_STREAM);
    let h_tar = sys.h_tar_logical.to_matrix()?;
    let target = SpectralPropagator::new(&h_tar)?;
    let noisy = SpectralPropagator::new(&sys.h_tar_logical.plus(&noise)?.simplified().to_matrix()?)?;
    let vals = (0..cfg.n_samples)
        .map(|k| {
            let psi0 = random_unit_coefficients(1 << n, rng::sample_seed(cfg.master_seed, k));
            Ok(infidelity(&target.apply(&psi0, cfg.t)?, &noisy.apply(&psi0, cfg.t)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(stats_of(f64::NAN, &vals))
}

/// One CSV row per run.
pub fn write_csv<W: Write>(out: W, sys: &EncodedSystem, result: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["model", "rows", "cols", "lambda", "seed", "t", "infidelity", "bound", "M", "wall_time_s"])?;
    for r in &result.records {
        w.write_record([
            sys.model.to_string(),
            sys.rows.to_string(),
            sys.cols.to_string(),
            r.lambda.to_string(),
            r.seed.to_string(),
            r.t.to_string(),
            r.infidelity.to_string(),
            r.bound.map(|b| b.to_string()).unwrap_or_default(),
            r.m.to_string(),
            r.wall_time_s.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Dense matrix of an operator for small registers.
pub fn dense(h: &OperatorSum) -> Result<Mat<C64>> {
    Ok(h.to_matrix()?.to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formula() {
        assert!((infidelity_bound(1.0, 1e5, 1.0).unwrap() - 3.61e-3).abs() < 1e-15);
        assert!((infidelity_bound(2.0, 1e3, 0.0).unwrap() - 36.0 * 2.0 / 1e3).abs() < 1e-15);
        assert!(infidelity_bound(1.0, 24.0, 1.0).is_none());
    }

    #[test]
    fn noise_counts_and_determinism() {
        let spec = NoiseSpec {
            seed: 9,
            ..NoiseSpec::default()
        };
        let a = sample_noise(4, &spec);
        assert_eq!(a.len(), 12);
        assert_eq!(a, sample_noise(4, &spec));
        assert!(a.terms().iter().all(|t| t.coeff.re.abs() <= 0.1));
        assert!(sample_noise(4, &NoiseSpec::silent()).is_empty());
    }

    #[test]
    fn slope_needs_two_points() {
        let s = [LambdaStats {
            lambda: 2.0,
            mean: 0.1,
            std: 0.0,
            n: 1,
        }];
        assert!(fit_log_slope(&s).is_none());
        let two: Vec<LambdaStats> = [1.0, 4.0]
            .iter()
            .map(|&l| LambdaStats {
                lambda: l,
                mean: 1.0 / l,
                std: 0.0,
                n: 1,
            })
            .collect();
        let f = fit_log_slope(&two).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!(f.ci95.is_none());
    }

    #[test]
    fn krylov_eigenstate_phase() {
        let mut h = OperatorSum::new(1);
        h.add_term(&[(0, Pauli::Z)], 1.0).unwrap();
        let m = h.to_matrix().unwrap();
        let v = StateVector::basis(2, 0);
        let out = evolve(&m, &v, 2.5).unwrap();
        assert!((out[0] - C64::from_polar(1.0, -2.5)).norm() < 1e-13);
        assert_eq!(evolve(&m, &v, 0.0).unwrap(), v);
    }
}
