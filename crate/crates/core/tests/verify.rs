mod common;

use hamcode::code::{BlockParams, CodeLayout};
use hamcode::models::{encode, ModelKind, ModelSpec};
use hamcode::pauli::{OperatorSum, Pauli};
use hamcode::verify::*;
use hamcode::Error;

#[test]
fn coexistence_suite_passes_with_live_controls() {
    let cases = standard_coexistence_cases();
    let report = check_coexistence_suite(&cases).unwrap();
    assert!(report.overall(), "{report}");
    let controls = cases
        .iter()
        .filter(|c| matches!(c.expect, Expectation::SumNonzero | Expectation::EachNonzero))
        .count();
    assert!(controls >= 5);
    assert_eq!(report.checks.len(), controls + 7);
}

#[test]
fn spread_parameters_are_nonresonant() {
    let p = |x, z| BlockParams::new(x, z).unwrap();
    assert!(nonresonant(p(1.0, 2.0), p(4.0, 8.0), p(16.0, 32.0)));
    assert!(!nonresonant(p(1.0, 3.0), p(1.0, 3.0), p(1.0, 3.0)));
}

#[test]
fn shared_qubit_control_matches_hand_value() {
    // one-sided product at uniform (1,3): each zero-energy state maps to one other with amplitude
    // 1/ΔE, where the intermediate energy is ±4 or ±8, so the norm is 1/4
    let case = standard_coexistence_cases()
        .into_iter()
        .find(|c| c.label == "control Z-shared equal |g_z|")
        .unwrap();
    let frame = hamcode::code::BellFrame::new(&case.layout).unwrap();
    let v = evaluate_case(&frame, &case);
    assert!((v - 0.25).abs() < 1e-12, "{v}");
}

#[test]
fn suppression_and_distance() {
    for layout in [
        CodeLayout::uniform(1, 1.0, 3.0).unwrap(),
        CodeLayout::uniform(2, 1.0, 3.0).unwrap(),
        CodeLayout::sequential(vec![BlockParams::new(1.0, 3.0).unwrap(), BlockParams::new(2.0, 5.0).unwrap()]).unwrap(),
    ] {
        assert!(check_error_suppression(&layout).unwrap().overall());
        assert_eq!(code_distance(&layout).unwrap(), 2);
        assert!(check_nogo_consistency(&layout).unwrap().overall());
    }
    let big = CodeLayout::uniform(3, 1.0, 3.0).unwrap();
    assert!(check_error_suppression(&big).unwrap().overall());
    assert!(matches!(code_distance(&big), Err(Error::Capacity { .. })));
}

#[test]
fn two_qubit_pauli_is_not_suppressed() {
    let layout = CodeLayout::uniform(1, 1.0, 3.0).unwrap();
    let frame = hamcode::code::BellFrame::new(&layout).unwrap();
    let mut zz = OperatorSum::new(4);
    zz.add_term(&[(0, Pauli::Z), (1, Pauli::Z)], 1.0).unwrap();
    assert!(suppression_residual(&frame, &zz) > 0.5);
}

#[test]
fn unitary_bound_trials() {
    let r = check_unitary_bound_trials(20, 3).unwrap();
    assert_eq!(r.checks.len(), 20);
    assert!(r.overall(), "{r}");
}

#[test]
fn system_battery_and_report_output() {
    let sys = encode(&ModelSpec::chain(ModelKind::Xy1d, 4)).unwrap();
    let report = check_system(&sys).unwrap();
    assert!(report.overall(), "{report}");
    let text = report.to_string();
    assert!(text.contains("[PASS] encoding target_mismatch"));
    assert!(text.ends_with("0 failed"));
    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert_eq!(csv.lines().count(), report.checks.len() + 1);
}

#[test]
fn failing_entries_are_reported() {
    let mut r = CheckReport::default();
    r.at_most("small", 1.0, 0.5);
    r.at_least("large", 1.0, 0.5);
    assert!(!r.overall());
    assert_eq!(r.failures().count(), 1);
    assert!(r.to_string().contains("[FAIL] small"));
}
