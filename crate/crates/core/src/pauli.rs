//! Pauli strings, weighted sums of them, and their text format.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::matrix::OperatorMatrix;

/// Terms whose coefficient falls below this are dropped when merging.
pub const MERGE_TOL: f64 = 1e-12;

/// Default qubit limit for sparse assembly.
pub const DEFAULT_MATRIX_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Product `self * other` as (power of i, letter).
    pub fn product(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    /// Index in I, X, Y, Z order.
    pub fn index(self) -> usize {
        self as usize
    }
}

pub(crate) fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Tensor product of single-qubit Paulis with a complex coefficient.
///
/// Qubit 0 is the leftmost letter and the most significant bit of a basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    letters: Vec<Pauli>,
    pub coeff: Complex64,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, coeff: Complex64) -> Self {
        Self { letters, coeff }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::new(vec![Pauli::I; n_qubits], Complex64::new(1.0, 0.0))
    }

    /// Real-coefficient string with the given letters on the given qubits.
    pub fn from_sparse(n_qubits: usize, ops: &[(usize, Pauli)], coeff: f64) -> Result<Self> {
        let mut letters = vec![Pauli::I; n_qubits];
        for &(q, p) in ops {
            if q >= n_qubits {
                return Err(Error::Dimension {
                    expected: n_qubits,
                    found: q + 1,
                });
            }
            letters[q] = p;
        }
        Ok(Self::new(letters, Complex64::new(coeff, 0.0)))
    }

    pub fn parse_letters(s: &str, coeff: Complex64) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::Parse(format!("bad Pauli letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(letters, coeff))
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn letter(&self, q: usize) -> Pauli {
        self.letters[q]
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, &p)| (q, p))
    }

    pub fn letter_string(&self) -> String {
        self.letters.iter().map(|p| p.as_char()).collect()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self::new(self.letters.clone(), self.coeff * s)
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        check_dim(self.n_qubits(), other.n_qubits())?;
        let mut phase = 0u8;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (k, p) = a.product(b);
                phase += k;
                p
            })
            .collect();
        Ok(PauliString::new(letters, self.coeff * other.coeff * i_pow(phase)))
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        check_dim(self.n_qubits(), other.n_qubits())?;
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| a.anticommutes(**b))
            .count();
        Ok(anti % 2 == 0)
    }

    /// Bit masks (x, z) and the number of Y letters.
    pub(crate) fn masks(&self) -> (u64, u64, u8) {
        let n = self.n_qubits();
        let (mut x, mut z, mut ny) = (0u64, 0u64, 0u8);
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = 1u64 << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        (x, z, ny)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.coeff.re, self.coeff.im, self.letter_string())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [re, im, letters] = fields.as_slice() else {
            return Err(Error::Parse(format!(
                "expected \"coeff_re coeff_im LETTERS\", got {line:?}"
            )));
        };
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad coefficient {s:?}: {e}")))
        };
        PauliString::parse_letters(letters, Complex64::new(parse(re)?, parse(im)?))
    }
}

/// Weighted sum of Pauli strings on a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    n_qubits: usize,
    terms: Vec<PauliString>,
}

impl OperatorSum {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<PauliString>) -> Result<Self> {
        let mut s = Self::new(n_qubits);
        for t in terms {
            s.push(t)?;
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: PauliString) -> Result<()> {
        check_dim(self.n_qubits, term.n_qubits())?;
        self.terms.push(term);
        Ok(())
    }

    /// Adds `coeff` times the given sparse letters.
    pub fn add_term(&mut self, ops: &[(usize, Pauli)], coeff: f64) -> Result<()> {
        let t = PauliString::from_sparse(self.n_qubits, ops, coeff)?;
        self.push(t)
    }

    pub fn extend(&mut self, other: &OperatorSum) -> Result<()> {
        check_dim(self.n_qubits, other.n_qubits)?;
        self.terms.extend(other.terms.iter().cloned());
        Ok(())
    }

    pub fn plus(&self, other: &OperatorSum) -> Result<OperatorSum> {
        let mut s = self.clone();
        s.extend(other)?;
        Ok(s)
    }

    pub fn scaled(&self, s: f64) -> OperatorSum {
        OperatorSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| t.scaled(Complex64::new(s, 0.0)))
                .collect(),
        }
    }

    /// Merges terms with equal letters and drops those with |coeff| ≤ [`MERGE_TOL`].
    /// First-occurrence order is kept.
    pub fn simplified(&self) -> OperatorSum {
        let mut index: std::collections::HashMap<&[Pauli], usize> = Default::default();
        let mut merged: Vec<PauliString> = Vec::new();
        for t in &self.terms {
            match index.get(t.letters()) {
                Some(&k) => merged[k].coeff += t.coeff,
                None => {
                    index.insert(t.letters(), merged.len());
                    merged.push(t.clone());
                }
            }
        }
        merged.retain(|t| t.coeff.norm() > MERGE_TOL);
        OperatorSum {
            n_qubits: self.n_qubits,
            terms: merged,
        }
    }

    /// All coefficients real, so the operator is Hermitian.
    pub fn is_hermitian(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.im.abs() <= MERGE_TOL)
    }

    pub fn max_weight(&self) -> usize {
        self.terms.iter().map(PauliString::weight).max().unwrap_or(0)
    }

    pub fn to_matrix(&self) -> Result<OperatorMatrix> {
        self.to_matrix_with_limit(DEFAULT_MATRIX_LIMIT)
    }

    pub fn to_matrix_with_limit(&self, limit: usize) -> Result<OperatorMatrix> {
        if self.n_qubits > limit {
            return Err(Error::Capacity {
                what: "matrix assembly (qubits)",
                requested: self.n_qubits,
                limit,
            });
        }
        Ok(OperatorMatrix::from_pauli_terms(self.n_qubits, &self.terms))
    }

    /// Line format: optional `# n_qubits=N` header, then "coeff_re coeff_im LETTERS" per term.
    pub fn to_text(&self) -> String {
        let mut out = format!("# n_qubits={}\n", self.n_qubits);
        for t in &self.terms {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n_qubits = None;
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("n_qubits=") {
                    n_qubits = Some(v.trim().parse::<usize>().map_err(|e| {
                        Error::Parse(format!("line {}: bad n_qubits: {e}", lineno + 1))
                    })?);
                }
                continue;
            }
            let t: PauliString = line
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            terms.push(t);
        }
        let n = match (n_qubits, terms.first()) {
            (Some(n), _) => n,
            (None, Some(t)) => t.n_qubits(),
            (None, None) => return Err(Error::Parse("empty operator without n_qubits header".into())),
        };
        OperatorSum::from_terms(n, terms)
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for OperatorSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n_qubits: usize,
            terms: Vec<String>,
        }
        Repr {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|t| t.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n_qubits: usize,
            terms: Vec<String>,
        }
        let r = Repr::deserialize(d)?;
        let terms = r
            .terms
            .iter()
            .map(|s| s.parse::<PauliString>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        OperatorSum::from_terms(r.n_qubits, terms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        PauliString::parse_letters(s, Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn involution() {
        let p = ps("X").multiply(&ps("X")).unwrap();
        assert_eq!(p.letter_string(), "I");
        assert_eq!(p.coeff, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let p = ps("X").multiply(&ps("Z")).unwrap();
        assert_eq!(p.letter_string(), "Y");
        assert_eq!(p.coeff, Complex64::new(0.0, -1.0));
    }

    #[test]
    fn zz_times_xx() {
        let p = ps("ZZ").multiply(&ps("XX")).unwrap();
        assert_eq!(p.letter_string(), "YY");
        assert_eq!(p.coeff, Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn commutation() {
        assert!(ps("XX").commutes(&ps("ZZ")).unwrap());
        assert!(!ps("X").commutes(&ps("Z")).unwrap());
        // Z2 X3 straddling two blocks against X3 X4 of the second block
        let g = PauliString::from_sparse(8, &[(1, Pauli::Z), (6, Pauli::X)], 1.0).unwrap();
        let pen = PauliString::from_sparse(8, &[(6, Pauli::X), (7, Pauli::X)], 1.0).unwrap();
        assert!(g.commutes(&pen).unwrap());
        let pen_z = PauliString::from_sparse(8, &[(6, Pauli::Z), (7, Pauli::Z)], 1.0).unwrap();
        assert!(!g.commutes(&pen_z).unwrap());
    }

    #[test]
    fn mismatched_lengths() {
        assert!(matches!(ps("XX").multiply(&ps("X")), Err(Error::Dimension { .. })));
        assert!(ps("XX").commutes(&ps("XYZ")).is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut h = OperatorSum::new(4);
        h.add_term(&[(1, Pauli::X), (2, Pauli::X)], 1.0).unwrap();
        h.add_term(&[(0, Pauli::Z)], -0.1234567890123).unwrap();
        let text = h.to_text();
        assert!(text.contains("1 0 IXXI"));
        assert_eq!(OperatorSum::from_text(&text).unwrap(), h);
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<OperatorSum>(&json).unwrap(), h);
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = OperatorSum::from_text("1.0 0.0 XX\n1.0 XX\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(OperatorSum::from_text("1.0 0.0 XQ").is_err());
        assert!(OperatorSum::from_text("").is_err());
        assert_eq!(OperatorSum::from_text("# n_qubits=3\n").unwrap().n_qubits(), 3);
    }

    #[test]
    fn simplify_merges_and_drops() {
        let mut h = OperatorSum::new(2);
        h.add_term(&[(0, Pauli::Z)], 1.0).unwrap();
        h.add_term(&[(1, Pauli::X)], 2.0).unwrap();
        h.add_term(&[(0, Pauli::Z)], -1.0).unwrap();
        let s = h.simplified();
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].letter_string(), "IX");
    }

    #[test]
    fn capacity_limit() {
        let h = OperatorSum::new(20);
        assert!(matches!(h.to_matrix(), Err(Error::Capacity { .. })));
    }
}
