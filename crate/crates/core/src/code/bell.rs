//! Bell-pair eigenbasis of the penalty Hamiltonian.
//!
//! A configuration assigns one of four Bell states to every qubit pair
//! `(2p, 2p+1)`. It is packed into a `u64`, two bits per pair with pair 0 in the
//! most significant position, so that the packed value is also the index of the
//! state in the Bell-rotated computational basis.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::matrix::{OperatorMatrix, RectMatrix, StateVector, C64, ZERO};
use crate::pauli::{i_pow, OperatorSum, Pauli};

use super::CodeLayout;

/// Pair state index `2·[s = −1] + [t = −1]`.
pub type PairState = u8;

pub fn pair_state(s: i8, t: i8) -> PairState {
    2 * u8::from(s < 0) + u8::from(t < 0)
}

pub fn pair_labels(k: PairState) -> (i8, i8) {
    (if k & 2 == 0 { 1 } else { -1 }, if k & 1 == 0 { 1 } else { -1 })
}

/// Amplitudes of |φ_{s,t}⟩ over |q1 q2⟩ = |00⟩, |01⟩, |10⟩, |11⟩.
pub fn bell_vector(k: PairState) -> [f64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match k {
        0 => [h, 0.0, 0.0, h],
        1 => [h, 0.0, 0.0, -h],
        2 => [0.0, h, h, 0.0],
        _ => [0.0, h, -h, 0.0],
    }
}

fn pauli_2x2(p: Pauli) -> [[C64; 2]; 2] {
    let o = C64::new(1.0, 0.0);
    let z = ZERO;
    let i = C64::new(0.0, 1.0);
    match p {
        Pauli::I => [[o, z], [z, o]],
        Pauli::X => [[z, o], [o, z]],
        Pauli::Y => [[z, -i], [i, z]],
        Pauli::Z => [[o, z], [z, -o]],
    }
}

/// Action of a two-qubit Pauli on a Bell state: `σ|k⟩ = i^phase |target⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairAction {
    pub phase: u8,
    pub target: PairState,
}

/// Table indexed by `[4·first + second][state]`, letters in I, X, Y, Z order.
pub fn pair_table() -> &'static [[PairAction; 4]; 16] {
    static TABLE: OnceLock<[[PairAction; 4]; 16]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [[PairAction { phase: 0, target: 0 }; 4]; 16];
        for (a, &pa) in Pauli::ALL.iter().enumerate() {
            for (b, &pb) in Pauli::ALL.iter().enumerate() {
                let ma = pauli_2x2(pa);
                let mb = pauli_2x2(pb);
                for k in 0..4u8 {
                    let v = bell_vector(k);
                    let mut w = [ZERO; 4];
                    for r in 0..4 {
                        for c in 0..4 {
                            w[r] += ma[r >> 1][c >> 1] * mb[r & 1][c & 1] * v[c];
                        }
                    }
                    let (target, amp) = (0..4u8)
                        .map(|k2| {
                            let u = bell_vector(k2);
                            (k2, (0..4).map(|r| w[r] * u[r]).sum::<C64>())
                        })
                        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
                        .unwrap();
                    let phase = (0..4u8)
                        .min_by(|&p, &q| (i_pow(p) - amp).norm().total_cmp(&(i_pow(q) - amp).norm()))
                        .unwrap();
                    assert!((i_pow(phase) - amp).norm() < 1e-12, "Bell table is not monomial");
                    table[4 * a + b][k as usize] = PairAction { phase, target };
                }
            }
        }
        table
    })
}

/// Pauli string compiled to per-pair letter codes.
#[derive(Debug, Clone)]
struct CompiledTerm {
    coeff: C64,
    factors: Vec<(usize, usize)>,
}

/// An operator sum prepared for action on packed Bell configurations.
#[derive(Debug, Clone)]
pub struct BellOperator {
    n_pairs: usize,
    terms: Vec<CompiledTerm>,
}

impl BellOperator {
    pub fn new(op: &OperatorSum) -> Self {
        assert!(op.n_qubits().is_multiple_of(2), "Bell frame needs an even qubit count");
        let n_pairs = op.n_qubits() / 2;
        let terms = op
            .terms()
            .iter()
            .map(|t| {
                let factors = (0..n_pairs)
                    .filter_map(|p| {
                        let code = 4 * t.letter(2 * p).index() + t.letter(2 * p + 1).index();
                        (code != 0).then_some((p, code))
                    })
                    .collect();
                CompiledTerm {
                    coeff: t.coeff,
                    factors,
                }
            })
            .collect();
        Self { n_pairs, terms }
    }

    /// Calls `f(amplitude, new_config)` for every term applied to `config`.
    pub fn for_each_image(&self, config: u64, mut f: impl FnMut(C64, u64)) {
        let table = pair_table();
        for t in &self.terms {
            let mut c = config;
            let mut phase = 0u8;
            for &(p, code) in &t.factors {
                let shift = 2 * (self.n_pairs - 1 - p);
                let k = ((c >> shift) & 3) as usize;
                let act = table[code][k];
                phase += act.phase;
                c = (c & !(3 << shift)) | ((act.target as u64) << shift);
            }
            f(t.coeff * i_pow(phase), c);
        }
    }
}

/// Zero-energy configurations and energies of a layout.
#[derive(Debug, Clone)]
pub struct BellFrame {
    n_pairs: usize,
    pair_gx: Vec<f64>,
    pair_gz: Vec<f64>,
    tol: f64,
    zero_configs: Vec<u64>,
    zero_index: HashMap<u64, usize>,
    code_positions: Vec<usize>,
}

/// Largest block count the Bell frame enumerates.
pub const MAX_FRAME_BLOCKS: usize = 6;

impl BellFrame {
    pub fn new(layout: &CodeLayout) -> crate::Result<Self> {
        let n_blocks = layout.n_blocks();
        if n_blocks > MAX_FRAME_BLOCKS {
            return Err(crate::Error::Capacity {
                what: "zero-space enumeration (blocks)",
                requested: n_blocks,
                limit: MAX_FRAME_BLOCKS,
            });
        }
        let n_pairs = 2 * n_blocks;
        let pair_gx: Vec<f64> = (0..n_pairs).map(|p| layout.blocks[p / 2].g_x).collect();
        let pair_gz: Vec<f64> = (0..n_pairs).map(|p| layout.blocks[p / 2].g_z).collect();
        let tol = layout.energy_tolerance();
        let zero_configs = enumerate_zero(&pair_gx, &pair_gz, tol);
        let zero_index: HashMap<u64, usize> =
            zero_configs.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let code_positions = layout
            .codeword_configs()
            .iter()
            .map(|c| zero_index[c])
            .collect();
        Ok(Self {
            n_pairs,
            pair_gx,
            pair_gz,
            tol,
            zero_configs,
            zero_index,
            code_positions,
        })
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn zero_dim(&self) -> usize {
        self.zero_configs.len()
    }

    pub fn zero_configs(&self) -> &[u64] {
        &self.zero_configs
    }

    /// Positions of the codewords (in codeword order) inside the zero-space list.
    pub fn code_positions(&self) -> &[usize] {
        &self.code_positions
    }

    /// Zero-space positions outside the code space.
    pub fn non_code_positions(&self) -> Vec<usize> {
        let mut in_code = vec![false; self.zero_dim()];
        self.code_positions.iter().for_each(|&i| in_code[i] = true);
        (0..self.zero_dim()).filter(|&i| !in_code[i]).collect()
    }

    pub fn energy(&self, config: u64) -> f64 {
        (0..self.n_pairs)
            .map(|p| {
                let k = ((config >> (2 * (self.n_pairs - 1 - p))) & 3) as u8;
                let (s, t) = pair_labels(k);
                f64::from(s) * self.pair_gz[p] + f64::from(t) * self.pair_gx[p]
            })
            .sum()
    }

    pub fn is_zero_energy(&self, e: f64) -> bool {
        e.abs() <= self.tol
    }

    /// P₀ · op · P₀ in the zero-space basis.
    pub fn project_zero(&self, op: &OperatorSum) -> OperatorMatrix {
        let bop = BellOperator::new(op);
        let mut trip = Vec::new();
        for (col, &c) in self.zero_configs.iter().enumerate() {
            bop.for_each_image(c, |amp, c2| {
                if let Some(&row) = self.zero_index.get(&c2) {
                    trip.push((row, col, amp));
                }
            });
        }
        OperatorMatrix::from_triplets(self.zero_dim(), trip)
    }

    /// P₀ · a · R₀ · b · P₀ in the zero-space basis.
    pub fn second_order(&self, a: &OperatorSum, b: &OperatorSum) -> OperatorMatrix {
        let aop = BellOperator::new(a);
        let bop = BellOperator::new(b);
        let mut trip = Vec::new();
        for (col, &c) in self.zero_configs.iter().enumerate() {
            let mut mid: HashMap<u64, C64> = HashMap::new();
            bop.for_each_image(c, |amp, c2| {
                *mid.entry(c2).or_insert(ZERO) += amp;
            });
            let mut mids: Vec<(u64, C64)> = mid.into_iter().collect();
            mids.sort_by_key(|m| m.0);
            for (c2, amp) in mids {
                let e = self.energy(c2);
                if self.is_zero_energy(e) || amp == ZERO {
                    continue;
                }
                let w = amp / e;
                aop.for_each_image(c2, |amp2, c3| {
                    if let Some(&row) = self.zero_index.get(&c3) {
                        trip.push((row, col, amp2 * w));
                    }
                });
            }
        }
        OperatorMatrix::from_triplets(self.zero_dim(), trip)
    }

    /// Block of a zero-space matrix on the code space, in codeword order.
    pub fn code_block(&self, m: &OperatorMatrix) -> RectMatrix {
        m.submatrix(&self.code_positions, &self.code_positions)
    }

    /// Block mapping the code space into the rest of the zero space.
    pub fn leakage_block(&self, m: &OperatorMatrix) -> RectMatrix {
        m.submatrix(&self.non_code_positions(), &self.code_positions)
    }

    /// Product state for a packed configuration, on `2·n_pairs` qubits.
    pub fn product_state(&self, config: u64) -> StateVector {
        product_state(self.n_pairs, config)
    }
}

/// Explicit vector of a packed Bell configuration.
pub fn product_state(n_pairs: usize, config: u64) -> StateVector {
    let mut v = StateVector::zeros(1usize << (2 * n_pairs));
    let mut stack = vec![(0usize, 0usize, 1.0f64)];
    while let Some((p, idx, amp)) = stack.pop() {
        if p == n_pairs {
            v.0[idx] = C64::new(amp, 0.0);
            continue;
        }
        let k = ((config >> (2 * (n_pairs - 1 - p))) & 3) as u8;
        for (field, &a) in bell_vector(k).iter().enumerate() {
            if a != 0.0 {
                stack.push((p + 1, (idx << 2) | field, amp * a));
            }
        }
    }
    v
}

/// Applies the real 4×4 matrix `u` (row-major) to the two-bit field of pair `p`.
fn apply_pair_matrix(v: &mut [C64], n_pairs: usize, p: usize, u: &[[f64; 4]; 4]) {
    let shift = 2 * (n_pairs - 1 - p);
    let stride = 1usize << shift;
    let block = stride << 2;
    for base in (0..v.len()).step_by(block) {
        for off in 0..stride {
            let idx = |f: usize| base + f * stride + off;
            let x = [v[idx(0)], v[idx(1)], v[idx(2)], v[idx(3)]];
            for (r, row) in u.iter().enumerate() {
                v[idx(r)] = row.iter().zip(&x).map(|(a, b)| b * *a).sum();
            }
        }
    }
}

fn bell_matrix() -> [[f64; 4]; 4] {
    // columns are Bell vectors
    let mut m = [[0.0; 4]; 4];
    for k in 0..4u8 {
        let b = bell_vector(k);
        for r in 0..4 {
            m[r][k as usize] = b[r];
        }
    }
    m
}

/// Rotates computational amplitudes into packed Bell-configuration amplitudes.
pub fn to_bell_frame(v: &StateVector) -> StateVector {
    let n_pairs = v.dim().trailing_zeros() as usize / 2;
    let b = bell_matrix();
    let mut bt = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            bt[r][c] = b[c][r];
        }
    }
    let mut out = v.clone();
    for p in 0..n_pairs {
        apply_pair_matrix(&mut out.0, n_pairs, p, &bt);
    }
    out
}

/// Inverse of [`to_bell_frame`].
pub fn from_bell_frame(v: &StateVector) -> StateVector {
    let n_pairs = v.dim().trailing_zeros() as usize / 2;
    let b = bell_matrix();
    let mut out = v.clone();
    for p in 0..n_pairs {
        apply_pair_matrix(&mut out.0, n_pairs, p, &b);
    }
    out
}

fn enumerate_zero(gx: &[f64], gz: &[f64], tol: f64) -> Vec<u64> {
    let n = gx.len();
    let pair_e = |p: usize, k: u8| {
        let (s, t) = pair_labels(k);
        f64::from(s) * gz[p] + f64::from(t) * gx[p]
    };
    // suffix bounds on the remaining energy for pruning
    let mut lo = vec![0.0; n + 1];
    let mut hi = vec![0.0; n + 1];
    for p in (0..n).rev() {
        let es: Vec<f64> = (0..4).map(|k| pair_e(p, k)).collect();
        lo[p] = lo[p + 1] + es.iter().copied().fold(f64::INFINITY, f64::min);
        hi[p] = hi[p + 1] + es.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    let mut out = Vec::new();
    fn rec(
        p: usize,
        acc: f64,
        cfg: u64,
        n: usize,
        lo: &[f64],
        hi: &[f64],
        tol: f64,
        pair_e: &dyn Fn(usize, u8) -> f64,
        out: &mut Vec<u64>,
    ) {
        if p == n {
            if acc.abs() <= tol {
                out.push(cfg);
            }
            return;
        }
        if acc + lo[p] > tol || acc + hi[p] < -tol {
            return;
        }
        for k in 0..4u8 {
            rec(p + 1, acc + pair_e(p, k), (cfg << 2) | k as u64, n, lo, hi, tol, pair_e, out);
        }
    }
    rec(0, 0.0, 0, n, &lo, &hi, tol, &pair_e, &mut out);
    out
}
