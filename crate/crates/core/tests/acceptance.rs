//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::Instant;

use common::{compare_gadget, dense_encoding_residuals, Row};
use hamcode::code::{css_equivalence_check, BlockParams, CodeLayout};
use hamcode::dynamics::{sweep_lambda, unencoded_baseline, write_csv, NoiseSpec, SweepConfig, SweepResult};
use hamcode::models::{encode, EncodedSystem, ModelKind, ModelSpec};
use hamcode::verify::{check_error_suppression, check_coexistence_suite, check_unitary_bound_trials, code_distance, standard_coexistence_cases};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn default_lambdas() -> Vec<f64> {
    (5..=14).map(|k| 2f64.powi(k)).collect()
}

fn sweep_config(n_samples: usize) -> SweepConfig {
    SweepConfig::new(default_lambdas(), 1.0, n_samples, 2024, NoiseSpec { seed: 1, ..Default::default() })
}

fn csv_bytes(sys: &EncodedSystem, r: &SweepResult) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(&mut out, sys, r).expect("in-memory CSV");
    out
}

fn slope_outcome(r: &SweepResult, lo: f64, hi: f64, secs: f64, budget: f64) -> Outcome {
    match &r.fitted_slope {
        Some(fit) => outcome(
            (lo..=hi).contains(&fit.slope) && secs < budget,
            format!("slope {:.4} (want [{lo}, {hi}]), {secs:.1} s (budget {budget} s)", fit.slope),
        ),
        None => outcome(false, "no slope fitted"),
    }
}

fn layouts() -> Vec<CodeLayout> {
    let p = |x, z| BlockParams::new(x, z).unwrap();
    vec![
        CodeLayout::uniform(1, 1.0, 3.0).unwrap(),
        CodeLayout::sequential(vec![p(3.0, 1.0)]).unwrap(),
        CodeLayout::uniform(2, 1.0, 3.0).unwrap(),
        CodeLayout::sequential(vec![p(1.0, 3.0), p(2.0, 5.0)]).unwrap(),
        CodeLayout::uniform(3, 1.0, 3.0).unwrap(),
        CodeLayout::sequential(vec![p(1.0, 2.0), p(4.0, 8.0), p(16.0, 32.0)]).unwrap(),
    ]
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();

    let tfi1d = encode(&ModelSpec::chain(ModelKind::Tfi1d, 4)).unwrap();
    let start = Instant::now();
    let run1 = sweep_lambda(&tfi1d, &sweep_config(20)).unwrap();
    let secs1 = start.elapsed().as_secs_f64();
    results.push((1, "1D TFI inverse-penalty scaling", slope_outcome(&run1, -1.15, -0.85, secs1, 600.0)));

    let tfi2d = encode(&ModelSpec::lattice(ModelKind::Tfi2d, 2, 3)).unwrap();
    let start = Instant::now();
    let run2 = sweep_lambda(&tfi2d, &sweep_config(5)).unwrap();
    let secs2 = start.elapsed().as_secs_f64();
    let mut o2 = slope_outcome(&run2, -1.2, -0.8, secs2, 1800.0);
    o2.detail = format!("{} qubits, {}", tfi2d.n_physical(), o2.detail);
    o2.pass &= tfi2d.n_physical() == 12;
    results.push((2, "2D TFI 2x3 inverse-penalty scaling", o2));

    let checked: usize = [&run1, &run2]
        .iter()
        .map(|r| r.records.iter().filter(|x| x.bound.is_some()).count())
        .sum();
    let violations = run1.bound_violations().len() + run2.bound_violations().len();
    results.push((
        3,
        "penalty bound soundness",
        outcome(
            violations == 0 && checked > 0,
            format!("{violations} violations in {checked} runs with lambda >= 25M"),
        ),
    ));

    let mut worst = 0.0f64;
    for spec in [
        ModelSpec::chain(ModelKind::Tfi1d, 4),
        ModelSpec::chain(ModelKind::Xy1d, 4),
        ModelSpec::lattice(ModelKind::Tfi2d, 2, 2),
        ModelSpec::lattice(ModelKind::Compass2d, 2, 2),
    ] {
        let sys = encode(&spec).unwrap();
        worst = dense_encoding_residuals(&sys).into_iter().fold(worst, f64::max);
    }
    results.push((
        4,
        "encoding conditions, four encoders at 2 blocks",
        outcome(worst <= 1e-9, format!("largest residual {worst:.2e} (limit 1e-9)")),
    ));

    let mut supp = true;
    let mut distances = Vec::new();
    for layout in layouts() {
        supp &= check_error_suppression(&layout).unwrap().overall();
        if layout.n_blocks() <= 2 {
            distances.push(code_distance(&layout).unwrap());
        }
    }
    results.push((
        5,
        "single-qubit error suppression and distance",
        outcome(
            supp && distances.iter().all(|d| *d == 2),
            format!("1-local residuals <= 1e-12: {supp}; distances {distances:?}"),
        ),
    ));

    let mixed = CodeLayout::sequential(vec![BlockParams::new(1.0, 3.0).unwrap(), BlockParams::new(2.0, 5.0).unwrap()]).unwrap();
    let mut gadget_err = 0.0f64;
    for layout in [CodeLayout::uniform(2, 1.0, 3.0).unwrap(), mixed] {
        for row in [Row::Zz(1.0), Row::Xx(1.0), Row::Xy(1.0, 0.5)] {
            gadget_err = gadget_err.max(compare_gadget(&layout, row).entry_error);
        }
    }
    results.push((
        6,
        "gadget closed forms vs dense second order",
        outcome(gadget_err <= 1e-10, format!("largest entry error {gadget_err:.2e} (limit 1e-10)")),
    ));

    let suite = check_coexistence_suite(&standard_coexistence_cases()).unwrap();
    let failures: Vec<String> = suite.failures().map(|c| c.name.clone()).collect();
    results.push((
        7,
        "gadget coexistence suite and controls",
        outcome(suite.overall(), format!("{} checks, failing: {failures:?}", suite.checks.len())),
    ));

    let mut css_layouts = layouts();
    for spec in [ModelSpec::chain(ModelKind::Xy1d, 6), ModelSpec::lattice(ModelKind::Compass2d, 2, 3)] {
        css_layouts.push(encode(&spec).unwrap().layout);
    }
    css_layouts.push(tfi2d.layout.clone());
    let css_ok = css_layouts.iter().all(|l| css_equivalence_check(l).unwrap());
    results.push((
        8,
        "four-qubit stabilizers on the code space",
        outcome(css_ok, format!("{} layouts", css_layouts.len())),
    ));

    let trials = check_unitary_bound_trials(50, 2024).unwrap();
    let tightest = trials
        .checks
        .iter()
        .map(|c| c.measured / c.threshold)
        .fold(0.0, f64::max);
    results.push((
        9,
        "unitary difference bound, 50 random trials",
        outcome(
            trials.overall() && trials.checks.len() == 50,
            format!("largest difference/bound ratio {tightest:.3}"),
        ),
    ));

    let base = unencoded_baseline(&tfi1d, &sweep_config(20)).unwrap();
    let enc = run1.mean_at(4096.0).unwrap();
    let ratio = base.mean / enc;
    results.push((
        10,
        "baseline separation at lambda 2^12",
        outcome(
            ratio >= 10.0,
            format!("unencoded {:.3e} vs encoded {enc:.3e}: {ratio:.1}x (want >= 10x)", base.mean),
        ),
    ));

    let again = sweep_lambda(&tfi1d, &sweep_config(20)).unwrap();
    let mut serial_cfg = sweep_config(20);
    serial_cfg.workers = Some(1);
    let serial = sweep_lambda(&tfi1d, &serial_cfg).unwrap();
    let first = csv_bytes(&tfi1d, &run1);
    let same = first == csv_bytes(&tfi1d, &again) && first == csv_bytes(&tfi1d, &serial);
    results.push((
        11,
        "deterministic sweep output",
        outcome(same, format!("{} CSV bytes, repeated and single-worker runs identical: {same}", first.len())),
    ));

    let mut all = true;
    for (id, name, o) in &results {
        all &= o.pass;
        println!("[{}] criterion {id:>2}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!(
        "acceptance: {}/{} criteria passed",
        results.iter().filter(|r| r.2.pass).count(),
        results.len()
    );
    if !all {
        std::process::exit(1);
    }
}
