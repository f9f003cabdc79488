mod common;

use common::*;
use hamcode::models::{encode, verify_encoding, BlockParamsChoice, EncodedSystem, ModelKind, ModelSpec, Pairing};
use hamcode::pauli::OperatorSum;
use proptest::prelude::*;

fn two_block_specs() -> Vec<ModelSpec> {
    vec![
        ModelSpec::chain(ModelKind::Tfi1d, 4),
        ModelSpec::chain(ModelKind::Xy1d, 4),
        ModelSpec::lattice(ModelKind::Tfi2d, 2, 2),
        ModelSpec::lattice(ModelKind::Compass2d, 2, 2),
    ]
}

#[test]
fn encoders_satisfy_conditions_dense() {
    for spec in two_block_specs() {
        let sys = encode(&spec).unwrap();
        assert_eq!(sys.layout.n_blocks(), 2);
        let r = dense_encoding_residuals(&sys);
        assert!(r.iter().all(|v| *v <= 1e-9), "{:?}: {r:?}", spec.model);
        let fast = verify_encoding(&sys).unwrap();
        assert!(fast.passes(), "{:?}: {fast:?}", spec.model);
    }
}

#[test]
fn coloring_params_also_encode() {
    for spec in two_block_specs() {
        let mut spec = spec;
        spec.block_params = BlockParamsChoice::Named("coloring".into());
        let sys = encode(&spec).unwrap();
        let r = dense_encoding_residuals(&sys);
        assert!(r.iter().all(|v| *v <= 1e-9), "{:?}: {r:?}", spec.model);
    }
}

#[test]
fn larger_systems_pass_frame_verification() {
    for spec in [
        ModelSpec::chain(ModelKind::Tfi1d, 6),
        ModelSpec::chain(ModelKind::Xy1d, 6),
        ModelSpec::lattice(ModelKind::Tfi2d, 2, 3),
        ModelSpec::lattice(ModelKind::Compass2d, 2, 3),
        ModelSpec::lattice(ModelKind::Tfi2d, 2, 4),
    ] {
        let sys = encode(&spec).unwrap();
        let r = verify_encoding(&sys).unwrap();
        assert!(r.passes(), "{:?} {:?}: {r:?}", spec.model, spec.geometry);
    }
}

#[test]
fn pairing_rule() {
    let sys = encode(&ModelSpec::lattice(ModelKind::Tfi2d, 2, 4)).unwrap();
    assert_eq!(sys.pairing, Pairing::Columns);
    let sys = encode(&ModelSpec::lattice(ModelKind::Tfi2d, 4, 2)).unwrap();
    assert_eq!(sys.layout.n_blocks(), 4);
}

#[test]
fn gap_is_normalized() {
    for spec in two_block_specs() {
        let sys = encode(&spec).unwrap();
        assert!(sys.layout.spectral_gap() >= 1.0 - 1e-12);
    }
}

#[test]
fn encoded_system_json_round_trip() {
    let sys = encode(&ModelSpec::lattice(ModelKind::Compass2d, 2, 2)).unwrap();
    let back = EncodedSystem::from_json(&sys.to_json().unwrap()).unwrap();
    assert_eq!(sys, back);
    assert!(EncodedSystem::from_json("{\"model\": \"tfi1d\"}").is_err());
}

#[test]
fn target_matches_model_definition() {
    let sys = encode(&ModelSpec::chain(ModelKind::Tfi1d, 4)).unwrap();
    let mut want = OperatorSum::new(4);
    use hamcode::pauli::Pauli::{X, Z};
    for i in 0..3 {
        want.add_term(&[(i, Z), (i + 1, Z)], 1.0).unwrap();
    }
    for i in 0..4 {
        want.add_term(&[(i, Z)], 1.0).unwrap();
        want.add_term(&[(i, X)], 1.0).unwrap();
    }
    let diff = sum_matrix(&sys.h_tar_logical) - sum_matrix(&want);
    assert!(max_entry(&diff) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn random_couplings_encode(j in prop::collection::vec(-2.0f64..2.0, 3), hz in -1.5f64..1.5, hx in -1.5f64..1.5) {
        let spec = ModelSpec::from_json(&format!(
            r#"{{"model": "tfi1d", "geometry": {{"sites": 4}}, "couplings": {{"j": [{}, {}, {}]}}, "fields": {{"hz": {hz}, "hx": {hx}}}}}"#,
            j[0], j[1], j[2]
        )).unwrap();
        let sys = encode(&spec).unwrap();
        let r = dense_encoding_residuals(&sys);
        prop_assert!(r.iter().all(|v| *v <= 1e-9), "{:?}", r);
    }
}
