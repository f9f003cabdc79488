//! Penalty Hamiltonian, zero-energy space and the [[4n,2n,2]] encoding.

pub mod bell;

use std::collections::{HashMap, HashSet};

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::matrix::{OperatorMatrix, StateVector, C64, ZERO};
use crate::pauli::{OperatorSum, Pauli, PauliString};

pub use bell::BellFrame;

/// Per-block penalty strengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockParams {
    #[serde(rename = "gx")]
    pub g_x: f64,
    #[serde(rename = "gz")]
    pub g_z: f64,
}

impl BlockParams {
    pub fn new(g_x: f64, g_z: f64) -> Result<Self> {
        let p = Self { g_x, g_z };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g_x.is_finite() && self.g_z.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite parameters {self:?}")));
        }
        if self.g_x == 0.0 || self.g_z == 0.0 {
            return Err(Error::InvalidParams(format!(
                "g_x and g_z must be nonzero, got ({}, {})",
                self.g_x, self.g_z
            )));
        }
        if (self.g_x.abs() - self.g_z.abs()).abs() <= 1e-12 * self.g_x.abs().max(self.g_z.abs()) {
            return Err(Error::InvalidParams(format!(
                "|g_x| must differ from |g_z|, got ({}, {})",
                self.g_x, self.g_z
            )));
        }
        Ok(())
    }
}

/// Position of a logical site: block index (0-based) and slot 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot(pub usize, pub u8);

/// Block parameters plus the assignment of logical sites to block slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeLayout {
    pub blocks: Vec<BlockParams>,
    /// Entry `i` holds `[block, slot]` for logical site `i`.
    pub logical_map: Vec<Slot>,
}

/// Global qubit of block-local qubit `k ∈ 1..=4`.
pub fn qubit(block: usize, k: usize) -> usize {
    debug_assert!((1..=4).contains(&k));
    4 * block + (k - 1)
}

impl CodeLayout {
    pub fn new(blocks: Vec<BlockParams>, logical_map: Vec<Slot>) -> Result<Self> {
        let l = Self {
            blocks,
            logical_map,
        };
        l.validate()?;
        Ok(l)
    }

    /// Sites `2b, 2b+1` in slots 1, 2 of block `b`.
    pub fn sequential(blocks: Vec<BlockParams>) -> Result<Self> {
        let map = (0..blocks.len())
            .flat_map(|b| [Slot(b, 1), Slot(b, 2)])
            .collect();
        Self::new(blocks, map)
    }

    pub fn uniform(n_blocks: usize, g_x: f64, g_z: f64) -> Result<Self> {
        Self::sequential(vec![BlockParams::new(g_x, g_z)?; n_blocks])
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::InvalidLayout("no blocks".into()));
        }
        for b in &self.blocks {
            b.validate()?;
        }
        if self.logical_map.len() != 2 * self.blocks.len() {
            return Err(Error::InvalidLayout(format!(
                "{} logical sites for {} blocks",
                self.logical_map.len(),
                self.blocks.len()
            )));
        }
        let mut seen = HashSet::new();
        for s in &self.logical_map {
            if s.0 >= self.blocks.len() || !(s.1 == 1 || s.1 == 2) || !seen.insert(*s) {
                return Err(Error::InvalidLayout(format!("bad or repeated slot {s:?}")));
            }
        }
        Ok(())
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn n_logical(&self) -> usize {
        2 * self.blocks.len()
    }

    pub fn n_physical(&self) -> usize {
        4 * self.blocks.len()
    }

    /// Logical site hosted by `(block, slot)`.
    pub fn site_of(&self, block: usize, slot: u8) -> usize {
        self.logical_map
            .iter()
            .position(|s| *s == Slot(block, slot))
            .expect("validated layout covers every slot")
    }

    /// Absolute tolerance for recognizing zero Bell energy.
    pub fn energy_tolerance(&self) -> f64 {
        let scale = self
            .blocks
            .iter()
            .map(|b| b.g_x.abs().max(b.g_z.abs()))
            .fold(1.0, f64::max);
        1e-9 * scale
    }

    /// Packed Bell configurations of the codewords, block-major with
    /// (s,t) = (+,+), (+,−), (−,+), (−,−) inside each block.
    pub fn codeword_configs(&self) -> Vec<u64> {
        let n = self.n_blocks();
        (0..1u64 << (2 * n))
            .map(|logical| {
                (0..n).fold(0u64, |acc, b| {
                    let d = (logical >> (2 * (n - 1 - b))) & 3;
                    (acc << 4) | (d << 2) | (3 - d)
                })
            })
            .collect()
    }

    /// Smallest nonzero |energy| of the penalty Hamiltonian.
    pub fn spectral_gap(&self) -> f64 {
        let tol = self.energy_tolerance();
        let quantum = tol / 10.0;
        // distinct sums keyed by a rounded value, storing the exactly accumulated sum
        let mut sums: HashMap<i64, f64> = HashMap::from([(0, 0.0)]);
        for b in &self.blocks {
            for _ in 0..2 {
                let mut next = HashMap::with_capacity(sums.len() * 4);
                for &s in sums.values() {
                    for (sg, tg) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        let e = s + sg * b.g_z + tg * b.g_x;
                        next.entry((e / quantum).round() as i64).or_insert(e);
                    }
                }
                sums = next;
            }
        }
        sums.into_values()
            .map(f64::abs)
            .filter(|e| *e > tol)
            .fold(f64::INFINITY, f64::min)
    }

    /// Layout rescaled so that the gap is at least 1, with the scale factor applied.
    pub fn gap_normalized(&self) -> (CodeLayout, f64) {
        let gap = self.spectral_gap();
        let scale = if gap < 1.0 { 1.0 / gap } else { 1.0 };
        let mut l = self.clone();
        for b in &mut l.blocks {
            b.g_x *= scale;
            b.g_z *= scale;
        }
        (l, scale)
    }
}

/// Labels (s, t) for every pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellConfig {
    pub labels: Vec<(i8, i8)>,
}

impl BellConfig {
    pub fn pack(&self) -> u64 {
        self.labels
            .iter()
            .fold(0u64, |acc, &(s, t)| (acc << 2) | bell::pair_state(s, t) as u64)
    }

    pub fn unpack(config: u64, n_pairs: usize) -> Self {
        let labels = (0..n_pairs)
            .map(|p| bell::pair_labels(((config >> (2 * (n_pairs - 1 - p))) & 3) as u8))
            .collect();
        Self { labels }
    }
}

/// Eigenvalue of a Bell configuration under the penalty Hamiltonian.
pub fn bell_energy(config: &BellConfig, layout: &CodeLayout) -> Result<f64> {
    check_dim(2 * layout.n_blocks(), config.labels.len())?;
    Ok(config
        .labels
        .iter()
        .enumerate()
        .map(|(p, &(s, t))| {
            let b = layout.blocks[p / 2];
            f64::from(s) * b.g_z + f64::from(t) * b.g_x
        })
        .sum())
}

/// Σ_b g_x(X1X2 + X3X4) + g_z(Z1Z2 + Z3Z4).
pub fn penalty_hamiltonian(layout: &CodeLayout) -> OperatorSum {
    let mut h = OperatorSum::new(layout.n_physical());
    for (b, p) in layout.blocks.iter().enumerate() {
        for (k1, k2) in [(1, 2), (3, 4)] {
            let pair = |l| [(qubit(b, k1), l), (qubit(b, k2), l)];
            h.add_term(&pair(Pauli::X), p.g_x).expect("in range");
            h.add_term(&pair(Pauli::Z), p.g_z).expect("in range");
        }
    }
    h
}

/// Orthonormal vectors spanning a subspace, optionally labelled by Bell configurations.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub vectors: Vec<StateVector>,
    pub configs: Option<Vec<u64>>,
}

/// Largest `dimension × vectors` product materialized as explicit vectors.
pub const MAX_BASIS_ENTRIES: usize = 1 << 26;

impl SubspaceBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.vectors.first().map_or(0, StateVector::dim)
    }

    /// max |G − I| over Gram entries.
    pub fn gram_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((u.inner(v) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    fn from_configs(n_pairs: usize, configs: Vec<u64>) -> Result<Self> {
        let dim = 1usize << (2 * n_pairs);
        if dim.saturating_mul(configs.len()) > MAX_BASIS_ENTRIES {
            return Err(Error::Capacity {
                what: "explicit subspace basis (entries)",
                requested: dim.saturating_mul(configs.len()),
                limit: MAX_BASIS_ENTRIES,
            });
        }
        let vectors = configs
            .iter()
            .map(|&c| bell::product_state(n_pairs, c))
            .collect();
        Ok(Self {
            vectors,
            configs: Some(configs),
        })
    }
}

/// Bell-product states of zero penalty energy.
pub fn zero_space_basis(layout: &CodeLayout) -> Result<SubspaceBasis> {
    let frame = BellFrame::new(layout)?;
    SubspaceBasis::from_configs(frame.n_pairs(), frame.zero_configs().to_vec())
}

/// The 4ⁿ codewords in block-major order.
pub fn encoding_basis(layout: &CodeLayout) -> Result<SubspaceBasis> {
    SubspaceBasis::from_configs(2 * layout.n_blocks(), layout.codeword_configs())
}

/// Table of slot-local logical operators and their physical strings.
///
/// Letters are (slot 1, slot 2); physical entries are (sign, local qubits, letter).
const LOGICAL_TABLE: [((Pauli, Pauli), f64, (usize, usize), Pauli); 6] = [
    ((Pauli::Z, Pauli::I), 1.0, (1, 2), Pauli::Z),
    ((Pauli::I, Pauli::Z), 1.0, (1, 3), Pauli::Z),
    ((Pauli::Z, Pauli::Z), 1.0, (2, 3), Pauli::Z),
    ((Pauli::X, Pauli::I), -1.0, (1, 3), Pauli::X),
    ((Pauli::I, Pauli::X), 1.0, (1, 2), Pauli::X),
    ((Pauli::X, Pauli::X), -1.0, (2, 3), Pauli::X),
];

/// Maps a two-letter logical string (slot 1, slot 2) of `block` to its physical string
/// on `layout`-sized register of `4·n_blocks` qubits.
pub fn logical_to_physical(op: &PauliString, block: usize, n_blocks: usize) -> Result<PauliString> {
    if op.n_qubits() != 2 {
        return Err(Error::UnsupportedOperator(format!(
            "expected a two-slot logical string, got {} letters",
            op.n_qubits()
        )));
    }
    if block >= n_blocks {
        return Err(Error::Dimension {
            expected: n_blocks,
            found: block + 1,
        });
    }
    let key = (op.letter(0), op.letter(1));
    let (_, sign, (k1, k2), letter) = LOGICAL_TABLE
        .iter()
        .find(|e| e.0 == key)
        .ok_or_else(|| Error::UnsupportedOperator(format!("logical {} has no 2-local image", op.letter_string())))?;
    let mut p = PauliString::from_sparse(
        4 * n_blocks,
        &[(qubit(block, *k1), *letter), (qubit(block, *k2), *letter)],
        *sign,
    )?;
    p.coeff *= op.coeff;
    Ok(p)
}

/// Physical image of a logical operator sum whose terms each live inside one block.
pub fn logical_sum_to_physical(op: &OperatorSum, layout: &CodeLayout) -> Result<OperatorSum> {
    check_dim(layout.n_logical(), op.n_qubits())?;
    let mut out = OperatorSum::new(layout.n_physical());
    for t in op.terms() {
        let support: Vec<(usize, Pauli)> = t.support().collect();
        let Some(&(first, _)) = support.first() else {
            return Err(Error::UnsupportedOperator("identity logical term".into()));
        };
        let block = layout.logical_map[first].0;
        let mut letters = [Pauli::I; 2];
        for &(site, p) in &support {
            let Slot(b, slot) = layout.logical_map[site];
            if b != block {
                return Err(Error::UnsupportedOperator(format!(
                    "cross-block logical term {}",
                    t.letter_string()
                )));
            }
            letters[usize::from(slot) - 1] = p;
        }
        let local = PauliString::new(letters.to_vec(), t.coeff);
        out.push(logical_to_physical(&local, block, layout.n_blocks())?)?;
    }
    Ok(out)
}

/// Rewrites a logical operator in the codeword frame: qubit `2b + slot − 1`, with
/// slot-2 letters conjugated by a Hadamard (X ↔ Z, Y → −Y).
pub fn to_codeword_frame(op: &OperatorSum, layout: &CodeLayout) -> Result<OperatorSum> {
    check_dim(layout.n_logical(), op.n_qubits())?;
    let mut out = OperatorSum::new(layout.n_logical());
    for t in op.terms() {
        let mut letters = vec![Pauli::I; layout.n_logical()];
        let mut coeff = t.coeff;
        for (site, p) in t.support() {
            let Slot(b, slot) = layout.logical_map[site];
            let q = 2 * b + usize::from(slot) - 1;
            letters[q] = if slot == 2 {
                match p {
                    Pauli::X => Pauli::Z,
                    Pauli::Z => Pauli::X,
                    Pauli::Y => {
                        coeff = -coeff;
                        Pauli::Y
                    }
                    Pauli::I => Pauli::I,
                }
            } else {
                p
            };
        }
        out.push(PauliString::new(letters, coeff))?;
    }
    Ok(out)
}

/// B† h B for the stacked basis vectors B.
pub fn project(h: &OperatorMatrix, basis: &SubspaceBasis) -> Result<OperatorMatrix> {
    let k = basis.dimension();
    let mut m = Mat::<C64>::zeros(k, k);
    for (j, v) in basis.vectors.iter().enumerate() {
        let hv = h.apply(v)?;
        for (i, u) in basis.vectors.iter().enumerate() {
            m[(i, j)] = u.inner(&hv);
        }
    }
    Ok(OperatorMatrix::from_dense(&m))
}

/// R₀ v: divides each Bell component by its energy, zeroing the zero-energy part.
pub fn penalty_pseudoinverse_apply(layout: &CodeLayout, v: &StateVector) -> Result<StateVector> {
    let n_pairs = 2 * layout.n_blocks();
    check_dim(1usize << (2 * n_pairs), v.dim())?;
    let tol = layout.energy_tolerance();
    let mut f = bell::to_bell_frame(v);
    for (c, a) in f.0.iter_mut().enumerate() {
        let e = bell_energy(&BellConfig::unpack(c as u64, n_pairs), layout)?;
        if e.abs() <= tol {
            *a = ZERO;
        } else {
            *a /= e;
        }
    }
    Ok(bell::from_bell_frame(&f))
}

/// Largest deviation of a four-qubit stabilizer from −1 on the given single-block basis.
pub fn css_residual(basis: &SubspaceBasis) -> Result<f64> {
    let mut worst = 0.0f64;
    for l in [Pauli::X, Pauli::Z] {
        let mut s = OperatorSum::new(4);
        s.add_term(&[(0, l), (1, l), (2, l), (3, l)], 1.0)?;
        let m = s.to_matrix()?;
        for v in &basis.vectors {
            let sv = m.apply(v)?;
            worst = worst.max(sv.distance(&v.scaled(C64::new(-1.0, 0.0))));
        }
    }
    Ok(worst)
}

/// X1X2X3X4 and Z1Z2Z3Z4 act as −1 on every block's codewords.
pub fn css_equivalence_check(layout: &CodeLayout) -> Result<bool> {
    for b in &layout.blocks {
        let single = CodeLayout::sequential(vec![*b])?;
        if css_residual(&encoding_basis(&single)?)? > 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}
