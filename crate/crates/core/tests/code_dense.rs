mod common;

use common::*;
use faer::Mat;
use hamcode::code::{
    css_equivalence_check, encoding_basis, logical_to_physical, penalty_hamiltonian, zero_space_basis, BellFrame,
    BlockParams, CodeLayout,
};
use hamcode::pauli::{OperatorSum, PauliString};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn frame_basis(frame: &BellFrame, configs: &[u64]) -> Mat<C64> {
    let cols: Vec<_> = configs.iter().map(|&c| frame.product_state(c)).collect();
    Mat::from_fn(cols[0].dim(), cols.len(), |r, k| cols[k].0[r])
}

fn single(n: usize, letters: &str) -> OperatorSum {
    OperatorSum::from_terms(n, vec![PauliString::parse_letters(letters, C64::new(1.0, 0.0)).unwrap()]).unwrap()
}

#[test]
fn penalty_matches_kronecker_assembly() {
    let layout = CodeLayout::sequential(vec![BlockParams::new(1.0, 3.0).unwrap(), BlockParams::new(2.0, 5.0).unwrap()])
        .unwrap();
    let ours = penalty_hamiltonian(&layout).to_matrix().unwrap().to_dense();
    assert!(max_entry(&(&ours - &penalty_matrix(&layout))) < 1e-14);
}

#[test]
fn codewords_are_zero_energy_eigenvectors() {
    let layout = CodeLayout::uniform(1, 1.0, 3.0).unwrap();
    let h = penalty_matrix(&layout);
    for d in 0..4 {
        let v = Mat::from_fn(16, 1, |r, _| codeword(d)[r]);
        assert!(max_entry(&(&h * &v)) < 1e-14, "codeword {d}");
    }
    let basis = encoding_basis(&layout).unwrap();
    assert!(basis.gram_defect() < 1e-14);
    for (d, v) in basis.vectors.iter().enumerate() {
        let want = codeword(d);
        let diff = v.0.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-14, "codeword {d} differs by {diff}");
    }
}

#[test]
fn logical_table_through_isometry() {
    let iso = block_isometry();
    for logical in ["ZI", "IZ", "ZZ", "XI", "IX", "XX"] {
        let phys = logical_to_physical(&PauliString::parse_letters(logical, C64::new(1.0, 0.0)).unwrap(), 0, 1)
            .unwrap();
        let p = string_matrix(&phys.letter_string());
        let p = Mat::from_fn(16, 16, |r, k| p[(r, k)] * phys.coeff);
        let got = adjoint(&iso) * &p * &iso;
        let want = string_matrix(logical);
        assert!(max_entry(&(&got - &want)) < 1e-14, "{logical} -> {phys}");
        // the physical operator keeps the code space invariant
        let leak = &p * &iso - &iso * &got;
        assert!(max_entry(&leak) < 1e-14, "{logical} leaks");
    }
    for logical in ["YI", "IY"] {
        let op = PauliString::parse_letters(logical, C64::new(1.0, 0.0)).unwrap();
        assert!(logical_to_physical(&op, 0, 1).is_err(), "{logical}");
    }
}

#[test]
fn zero_space_matches_dense_eigenspace() {
    for params in [vec![(1.0, 3.0)], vec![(1.0, 3.0), (1.0, 3.0)], vec![(1.0, 3.0), (2.0, 5.0)]] {
        let layout =
            CodeLayout::sequential(params.iter().map(|&(x, z)| BlockParams::new(x, z).unwrap()).collect()).unwrap();
        let oracle = DenseOracle::new(&layout);
        let frame = BellFrame::new(&layout).unwrap();
        assert_eq!(frame.zero_dim(), oracle.zero_dim(), "{params:?}");
        let basis = zero_space_basis(&layout).unwrap();
        assert_eq!(basis.dimension(), oracle.zero_dim());
        let b = frame_basis(&frame, frame.zero_configs());
        assert!(max_entry(&(&b * adjoint(&b) - &oracle.p0)) < 1e-12, "{params:?}");
    }
}

#[test]
fn frame_projections_match_dense() {
    let layout = CodeLayout::sequential(vec![BlockParams::new(1.0, 3.0).unwrap(), BlockParams::new(1.0, 4.0).unwrap()])
        .unwrap();
    let n = layout.n_physical();
    let oracle = DenseOracle::new(&layout);
    let frame = BellFrame::new(&layout).unwrap();
    let b = frame_basis(&frame, frame.zero_configs());
    let ops = ["IZIIIIXI", "IIIZIIXI", "IZIIXIII", "XIIYIIZI", "ZZIIIIII", "IIIIIIYY"];
    for x in ops {
        let a = single(n, x);
        let am = string_matrix(x);
        let got = frame.project_zero(&a).to_dense();
        let want = adjoint(&b) * &am * &b;
        assert!(max_entry(&(&got - &want)) < 1e-13, "{x}");
        for y in ops {
            let bm = string_matrix(y);
            let got = frame.second_order(&a, &single(n, y)).to_dense();
            let want = adjoint(&b) * oracle.second_order(&am, &bm) * &b;
            assert!(max_entry(&(&got - &want)) < 1e-13, "{x} {y}");
        }
    }
}

#[test]
fn stabilizers_on_code_space() {
    let layout = CodeLayout::uniform(1, 1.0, 3.0).unwrap();
    let iso = block_isometry();
    for s in ["XXXX", "ZZZZ"] {
        let m = adjoint(&iso) * string_matrix(s) * &iso;
        let want = Mat::from_fn(4, 4, |r, k| if r == k { c(-1.0) } else { c(0.0) });
        assert!(max_entry(&(&m - &want)) < 1e-14, "{s}");
    }
    assert!(css_equivalence_check(&layout).unwrap());
}

fn dense_gap(layout: &CodeLayout) -> f64 {
    let h = penalty_matrix(layout);
    let vals = h.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
    vals.iter().map(|e| e.abs()).filter(|e| *e > 1e-9).fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectral_gap_matches_dense(gx in 0.2f64..4.0, gz in 0.2f64..4.0, hx in 0.2f64..4.0, hz in 0.2f64..4.0) {
        prop_assume!((gx - gz).abs() > 1e-3 && (hx - hz).abs() > 1e-3);
        let layout = CodeLayout::sequential(vec![BlockParams::new(gx, gz).unwrap(), BlockParams::new(hx, hz).unwrap()]).unwrap();
        let want = dense_gap(&layout);
        prop_assert!((layout.spectral_gap() - want).abs() < 1e-9 * want.max(1.0));
        let (norm, scale) = layout.gap_normalized();
        prop_assert!(norm.spectral_gap() >= 1.0 - 1e-12);
        prop_assert!(scale >= 1.0);
    }

    #[test]
    fn codewords_stay_zero_energy(gx in 0.1f64..5.0, gz in 0.1f64..5.0) {
        prop_assume!((gx - gz).abs() > 1e-3);
        let layout = CodeLayout::uniform(1, gx, gz).unwrap();
        let h = penalty_matrix(&layout);
        for d in 0..4 {
            let v = Mat::from_fn(16, 1, |r, _| codeword(d)[r]);
            prop_assert!(max_entry(&(&h * &v)) < 1e-12);
        }
    }
}
