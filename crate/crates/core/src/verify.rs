//! Verification battery: every algebraic condition of the scheme as a numeric check.

use std::fmt;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::{css_equivalence_check, qubit, BellFrame, BlockParams, CodeLayout};
use crate::dynamics::unitary_diff_bound_check;
use crate::error::{Error, Result};
use crate::gadget::{effective_hamiltonian_in, interference_in, FIRST_ORDER_TOL};
use crate::matrix::{OperatorMatrix, C64};
use crate::models::{verify_encoding, EncodedSystem, ENCODING_TOL};
use crate::pauli::{OperatorSum, Pauli, PauliString};
use crate::rng;

/// Pass band for exact-zero checks.
pub const ZERO_TOL: f64 = 1e-12;
/// Negative controls must exceed this.
pub const CONTROL_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    AtMost,
    AtLeast,
    Equals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checks: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn overall(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn push(&mut self, name: impl Into<String>, measured: f64, threshold: f64, direction: Direction) {
        let pass = match direction {
            Direction::AtMost => measured <= threshold,
            Direction::AtLeast => measured >= threshold,
            Direction::Equals => measured == threshold,
        };
        self.checks.push(CheckEntry {
            name: name.into(),
            measured,
            threshold,
            direction,
            pass,
        });
    }

    pub fn at_most(&mut self, name: impl Into<String>, measured: f64, threshold: f64) {
        self.push(name, measured, threshold, Direction::AtMost);
    }

    pub fn at_least(&mut self, name: impl Into<String>, measured: f64, threshold: f64) {
        self.push(name, measured, threshold, Direction::AtLeast);
    }

    pub fn equals(&mut self, name: impl Into<String>, measured: f64, expected: f64) {
        self.push(name, measured, expected, Direction::Equals);
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["name", "measured", "threshold", "direction", "pass"])?;
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                c.measured.to_string(),
                c.threshold.to_string(),
                format!("{:?}", c.direction),
                c.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let rel = match c.direction {
                Direction::AtMost => "<=",
                Direction::AtLeast => ">=",
                Direction::Equals => "==",
            };
            writeln!(
                f,
                "[{}] {}: {:.3e} {rel} {:.3e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.threshold
            )?;
        }
        let n_fail = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), n_fail)
    }
}

/// ‖P₀VP₀ − cP₀‖ with c the mean diagonal of P₀VP₀.
pub fn suppression_residual(frame: &BellFrame, op: &OperatorSum) -> f64 {
    let m = frame.project_zero(op);
    let dim = frame.zero_dim();
    let trace: C64 = (0..dim).map(|i| m.get(i, i)).sum();
    let c = trace / dim as f64;
    let shifted = m
        .sub(&OperatorMatrix::identity(dim).scaled(c))
        .expect("same dimension");
    shifted.spectral_norm()
}

fn require_blocks(layout: &CodeLayout, limit: usize, what: &'static str) -> Result<()> {
    if layout.n_blocks() > limit {
        return Err(Error::Capacity {
            what,
            requested: layout.n_blocks(),
            limit,
        });
    }
    Ok(())
}

fn single_qubit(n: usize, q: usize, p: Pauli) -> OperatorSum {
    OperatorSum::from_terms(n, vec![PauliString::from_sparse(n, &[(q, p)], 1.0).expect("in range")])
        .expect("same size")
}

/// Every single-qubit Pauli acts as a multiple of P₀ on the zero space.
pub fn check_error_suppression(layout: &CodeLayout) -> Result<CheckReport> {
    require_blocks(layout, 3, "error-suppression check (blocks)")?;
    let frame = BellFrame::new(layout)?;
    let n = layout.n_physical();
    let mut report = CheckReport::default();
    for q in 0..n {
        for p in Pauli::NON_IDENTITY {
            let r = suppression_residual(&frame, &single_qubit(n, q, p));
            report.at_most(format!("suppression {}{q}", p.as_char()), r, ZERO_TOL);
        }
    }
    Ok(report)
}

/// Pauli strings of exactly `weight` non-identity letters, unit coefficient.
pub fn paulis_of_weight(n: usize, weight: usize) -> Vec<PauliString> {
    fn rec(n: usize, start: usize, left: usize, cur: &mut Vec<(usize, Pauli)>, out: &mut Vec<PauliString>) {
        if left == 0 {
            out.push(PauliString::from_sparse(n, cur, 1.0).expect("in range"));
            return;
        }
        for q in start..n {
            for p in Pauli::NON_IDENTITY {
                cur.push((q, p));
                rec(n, q + 1, left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, 0, weight, &mut Vec::new(), &mut out);
    out
}

/// Largest suppression residual over all Paulis of a given weight.
pub fn max_residual_of_weight(frame: &BellFrame, n: usize, weight: usize) -> f64 {
    paulis_of_weight(n, weight)
        .into_iter()
        .map(|p| suppression_residual(frame, &OperatorSum::from_terms(n, vec![p]).expect("same size")))
        .fold(0.0, f64::max)
}

/// Smallest weight of a Pauli that is not a multiple of P₀ on the zero space.
pub fn code_distance(layout: &CodeLayout) -> Result<usize> {
    require_blocks(layout, 2, "code distance enumeration (blocks)")?;
    let frame = BellFrame::new(layout)?;
    let n = layout.n_physical();
    for w in 1..=n {
        if max_residual_of_weight(&frame, n, w) > CONTROL_FLOOR {
            return Ok(w);
        }
    }
    Ok(n + 1)
}

/// Distance is exactly two: weight one passes, some weight-two Pauli fails.
pub fn check_nogo_consistency(layout: &CodeLayout) -> Result<CheckReport> {
    require_blocks(layout, 2, "distance check (blocks)")?;
    let frame = BellFrame::new(layout)?;
    let n = layout.n_physical();
    let mut report = CheckReport::default();
    report.at_most("weight-1 max residual", max_residual_of_weight(&frame, n, 1), ZERO_TOL);
    report.at_least("weight-2 max residual", max_residual_of_weight(&frame, n, 2), CONTROL_FLOOR);
    report.equals("code distance", code_distance(layout)? as f64, 2.0);
    Ok(report)
}

/// Stabilizers X1X2X3X4 and Z1Z2Z3Z4 equal −1 on the code space of each block.
pub fn check_css(layout: &CodeLayout) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    let ok = css_equivalence_check(layout)?;
    report.equals("four-qubit stabilizers are -1 on codewords", f64::from(u8::from(ok)), 1.0);
    Ok(report)
}

/// What a coexistence case asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expectation {
    /// Symmetrized cross term vanishes.
    SumVanishes,
    /// Both one-sided products vanish.
    EachVanishes,
    /// Negative control: symmetrized cross term is nonzero.
    SumNonzero,
    /// Negative control: a one-sided product is nonzero.
    EachNonzero,
}

#[derive(Debug, Clone)]
pub struct CoexistenceCase {
    pub family: &'static str,
    pub label: String,
    pub layout: CodeLayout,
    pub a: OperatorSum,
    pub b: OperatorSum,
    pub expect: Expectation,
}

/// (block, qubit 1..=4, letter).
type Site = (usize, usize, Pauli);

fn two_site(layout: &CodeLayout, first: Site, second: Site) -> OperatorSum {
    let n = layout.n_physical();
    let p = PauliString::from_sparse(
        n,
        &[(qubit(first.0, first.1), first.2), (qubit(second.0, second.1), second.2)],
        1.0,
    )
    .expect("in range");
    OperatorSum::from_terms(n, vec![p]).expect("same size")
}

fn layout_of(params: &[(f64, f64)]) -> CodeLayout {
    CodeLayout::sequential(params.iter().map(|&(x, z)| BlockParams { g_x: x, g_z: z }).collect())
        .expect("valid parameters")
}

const DIFFERENT_PAIRS: [(usize, usize); 8] = [(1, 3), (1, 4), (2, 3), (2, 4), (3, 1), (3, 2), (4, 1), (4, 2)];
const SAME_PAIR_OTHER_QUBIT: [(usize, usize); 4] = [(1, 2), (2, 1), (3, 4), (4, 3)];
const ZX: (Pauli, Pauli) = (Pauli::Z, Pauli::X);
const XZ: (Pauli, Pauli) = (Pauli::X, Pauli::Z);

/// Non-resonance condition: no signed sum of two block-a parameters and one each of
/// blocks b and c vanishes.
pub fn nonresonant(pa: BlockParams, pb: BlockParams, pc: BlockParams) -> bool {
    let ga = [pa.g_x, pa.g_z];
    let gb = [pb.g_x, pb.g_z];
    let gc = [pc.g_x, pc.g_z];
    let signs = [-1.0, 1.0];
    ga.iter().all(|&g1| {
        ga.iter().all(|&g2| {
            gb.iter().all(|&g3| {
                gc.iter().all(|&g4| {
                    signs.iter().all(|&s1| {
                        signs.iter().all(|&s2| {
                            signs.iter().all(|&s3| {
                                signs
                                    .iter()
                                    .all(|&s4| (s1 * g1 + s2 * g2 + s3 * g3 + s4 * g4).abs() > 1e-9)
                            })
                        })
                    })
                })
            })
        })
    })
}

/// Instantiations of every gadget-coexistence family plus negative controls.
pub fn standard_coexistence_cases() -> Vec<CoexistenceCase> {
    let mut cases = Vec::new();
    let uniform4 = layout_of(&[(1.0, 3.0); 4]);
    let mixed4 = layout_of(&[(1.0, 3.0), (1.0, 4.0), (2.0, 5.0), (3.0, 6.0)]);
    let uniform3 = layout_of(&[(1.0, 3.0); 3]);
    let mixed3 = layout_of(&[(1.0, 3.0), (2.0, 5.0), (3.0, 6.0)]);
    let uniform2 = layout_of(&[(1.0, 3.0); 2]);
    let mixed2 = layout_of(&[(1.0, 4.0), (2.0, 5.0)]);
    let sites = 1..=4usize;

    for (tag, layout) in [("uniform", &uniform4), ("mixed", &mixed4)] {
        for i in sites.clone() {
            for j in sites.clone() {
                for k in sites.clone() {
                    for l in sites.clone() {
                        cases.push(CoexistenceCase {
                            family: "four_blocks",
                            label: format!("{tag} Z{i}a X{j}b | Z{k}c X{l}d"),
                            layout: layout.clone(),
                            a: two_site(layout, (0, i, Pauli::Z), (1, j, Pauli::X)),
                            b: two_site(layout, (2, k, Pauli::Z), (3, l, Pauli::X)),
                            expect: Expectation::SumVanishes,
                        });
                    }
                }
            }
        }
    }

    for (tag, layout) in [("uniform", &uniform3), ("mixed", &mixed3)] {
        for fa in [ZX, XZ] {
            for fb in [ZX, XZ] {
                for &(i, k) in &DIFFERENT_PAIRS {
                    for j in sites.clone() {
                        for l in sites.clone() {
                            cases.push(CoexistenceCase {
                                family: "three_blocks_different_pairs",
                                label: format!("{tag} {}{i}a {}{j}b | {}{k}a {}{l}c", fa.0.as_char(), fa.1.as_char(), fb.0.as_char(), fb.1.as_char()),
                                layout: layout.clone(),
                                a: two_site(layout, (0, i, fa.0), (1, j, fa.1)),
                                b: two_site(layout, (0, k, fb.0), (2, l, fb.1)),
                                expect: Expectation::SumVanishes,
                            });
                        }
                    }
                }
            }
        }
        for (fa, fb) in [(ZX, XZ), (XZ, ZX)] {
            for &(i, k) in &SAME_PAIR_OTHER_QUBIT {
                for j in sites.clone() {
                    for l in sites.clone() {
                        cases.push(CoexistenceCase {
                            family: "three_blocks_same_pair",
                            label: format!("{tag} {}{i}a {}{j}b | {}{k}a {}{l}c", fa.0.as_char(), fa.1.as_char(), fb.0.as_char(), fb.1.as_char()),
                            layout: layout.clone(),
                            a: two_site(layout, (0, i, fa.0), (1, j, fa.1)),
                            b: two_site(layout, (0, k, fb.0), (2, l, fb.1)),
                            expect: Expectation::SumVanishes,
                        });
                    }
                }
            }
        }
    }

    for (tag, layout) in [("uniform", &uniform2), ("mixed", &mixed2)] {
        for fa in [ZX, XZ] {
            for fb in [ZX, XZ] {
                for &(i, k) in &DIFFERENT_PAIRS {
                    for &(j, l) in &DIFFERENT_PAIRS {
                        cases.push(CoexistenceCase {
                            family: "two_blocks_different_pairs",
                            label: format!("{tag} {}{i}a {}{j}b | {}{k}a {}{l}b", fa.0.as_char(), fa.1.as_char(), fb.0.as_char(), fb.1.as_char()),
                            layout: layout.clone(),
                            a: two_site(layout, (0, i, fa.0), (1, j, fa.1)),
                            b: two_site(layout, (0, k, fb.0), (1, l, fb.1)),
                            expect: Expectation::SumVanishes,
                        });
                    }
                }
            }
        }
        for (fa, fb) in [(ZX, XZ), (XZ, ZX)] {
            for &(i, k) in &SAME_PAIR_OTHER_QUBIT {
                for &(j, l) in &SAME_PAIR_OTHER_QUBIT {
                    cases.push(CoexistenceCase {
                        family: "two_blocks_same_pair",
                        label: format!("{tag} {}{i}a {}{j}b | {}{k}a {}{l}b", fa.0.as_char(), fa.1.as_char(), fb.0.as_char(), fb.1.as_char()),
                        layout: layout.clone(),
                        a: two_site(layout, (0, i, fa.0), (1, j, fa.1)),
                        b: two_site(layout, (0, k, fb.0), (1, l, fb.1)),
                        expect: Expectation::SumVanishes,
                    });
                }
            }
        }
    }

    let spread = layout_of(&[(1.0, 2.0), (4.0, 8.0), (16.0, 32.0)]);
    debug_assert!(nonresonant(spread.blocks[0], spread.blocks[1], spread.blocks[2]));
    let letters = [(Pauli::Z, Pauli::Z), (Pauli::X, Pauli::X), ZX, XZ];
    for fa in letters {
        for fb in letters {
            for i in sites.clone() {
                for j in sites.clone() {
                    for k in sites.clone() {
                        for l in sites.clone() {
                            cases.push(CoexistenceCase {
                                family: "three_blocks_nonresonant",
                                label: format!("{}{i}a {}{j}b | {}{k}a {}{l}c", fa.0.as_char(), fa.1.as_char(), fb.0.as_char(), fb.1.as_char()),
                                layout: spread.clone(),
                                a: two_site(&spread, (0, i, fa.0), (1, j, fa.1)),
                                b: two_site(&spread, (0, k, fb.0), (2, l, fb.1)),
                                expect: Expectation::EachVanishes,
                            });
                        }
                    }
                }
            }
        }
    }

    // b and c differ in |g_z| and in |g_x|
    let shared = layout_of(&[(1.0, 3.0), (1.0, 4.0), (2.0, 5.0)]);
    for (fa, tag) in [(ZX, "Z-shared"), (XZ, "X-shared")] {
        for i in sites.clone() {
            for j in sites.clone() {
                for k in sites.clone() {
                    cases.push(CoexistenceCase {
                        family: "shared_qubit",
                        label: format!("{tag} {i}a {j}b | {i}a {k}c"),
                        layout: shared.clone(),
                        a: two_site(&shared, (0, i, fa.0), (1, j, fa.1)),
                        b: two_site(&shared, (0, i, fa.0), (2, k, fa.1)),
                        expect: Expectation::EachVanishes,
                    });
                }
            }
        }
    }

    // negative controls: each family's constraint broken
    type Control<'a> = (&'static str, &'a str, &'a CodeLayout, Site, Site, Site, Site, Expectation);
    let controls: [Control; 6] = [
        (
            "shared_qubit",
            "control Z-shared equal |g_z|",
            &uniform3,
            (0, 1, Pauli::Z),
            (1, 1, Pauli::X),
            (0, 1, Pauli::Z),
            (2, 1, Pauli::X),
            Expectation::EachNonzero,
        ),
        (
            "shared_qubit",
            "control X-shared equal |g_x|",
            &uniform3,
            (0, 2, Pauli::X),
            (1, 3, Pauli::Z),
            (0, 2, Pauli::X),
            (2, 4, Pauli::Z),
            Expectation::EachNonzero,
        ),
        (
            "three_blocks_nonresonant",
            "control resonant parameters",
            &uniform3,
            (0, 1, Pauli::Z),
            (1, 1, Pauli::Z),
            (0, 1, Pauli::Z),
            (2, 1, Pauli::Z),
            Expectation::EachNonzero,
        ),
        (
            "three_blocks_different_pairs",
            "control same pair, same letter",
            &uniform3,
            (0, 1, Pauli::Z),
            (1, 1, Pauli::X),
            (0, 2, Pauli::Z),
            (2, 1, Pauli::X),
            Expectation::SumNonzero,
        ),
        (
            "three_blocks_same_pair",
            "control same qubit, Z against X",
            &uniform3,
            (0, 1, Pauli::Z),
            (1, 1, Pauli::X),
            (0, 1, Pauli::X),
            (2, 1, Pauli::Z),
            Expectation::SumNonzero,
        ),
        (
            "two_blocks_different_pairs",
            "control same pair in both blocks",
            &uniform2,
            (0, 1, Pauli::Z),
            (1, 1, Pauli::X),
            (0, 2, Pauli::Z),
            (1, 2, Pauli::X),
            Expectation::SumNonzero,
        ),
    ];
    for (family, label, layout, a1, a2, b1, b2, expect) in controls {
        cases.push(CoexistenceCase {
            family,
            label: label.to_string(),
            layout: layout.clone(),
            a: two_site(layout, a1, a2),
            b: two_site(layout, b1, b2),
            expect,
        });
    }
    cases
}

/// Measured value of a coexistence case: the symmetrized or the larger one-sided norm.
pub fn evaluate_case(frame: &BellFrame, case: &CoexistenceCase) -> f64 {
    match case.expect {
        Expectation::SumVanishes | Expectation::SumNonzero => interference_in(frame, &case.a, &case.b),
        Expectation::EachVanishes | Expectation::EachNonzero => {
            let ab = frame.second_order(&case.a, &case.b).spectral_norm();
            let ba = frame.second_order(&case.b, &case.a).spectral_norm();
            ab.max(ba)
        }
    }
}

/// One entry per family (worst case) and one per negative control.
pub fn check_coexistence_suite(cases: &[CoexistenceCase]) -> Result<CheckReport> {
    let mut frames: Vec<(CodeLayout, BellFrame)> = Vec::new();
    let mut worst: Vec<(&'static str, f64, String, usize)> = Vec::new();
    let mut report = CheckReport::default();
    for case in cases {
        require_blocks(&case.layout, 4, "coexistence scenario (blocks)")?;
        let pos = match frames.iter().position(|(l, _)| *l == case.layout) {
            Some(p) => p,
            None => {
                frames.push((case.layout.clone(), BellFrame::new(&case.layout)?));
                frames.len() - 1
            }
        };
        let value = evaluate_case(&frames[pos].1, case);
        match case.expect {
            Expectation::SumVanishes | Expectation::EachVanishes => {
                match worst.iter_mut().find(|w| w.0 == case.family) {
                    Some(w) => {
                        w.3 += 1;
                        if value > w.1 {
                            w.1 = value;
                            w.2 = case.label.clone();
                        }
                    }
                    None => worst.push((case.family, value, case.label.clone(), 1)),
                }
            }
            Expectation::SumNonzero | Expectation::EachNonzero => {
                report.at_least(format!("{}: {}", case.family, case.label), value, CONTROL_FLOOR);
            }
        }
    }
    for (family, value, label, count) in worst {
        report.at_most(format!("{family} ({count} cases, worst {label})"), value, ZERO_TOL);
    }
    Ok(report)
}

/// Randomized trials of the first-order unitary difference bound on one block with gap 1.
pub fn check_unitary_bound_trials(n_trials: usize, seed: u64) -> Result<CheckReport> {
    // (1,3) scaled by one half has gap exactly 1
    let layout = layout_of(&[(0.5, 1.5)]);
    let h0 = crate::code::penalty_hamiltonian(&layout).to_matrix()?;
    let dim = h0.dim();
    let mut r = rng::stream(seed, rng::DIAGNOSTIC_STREAM);
    let mut report = CheckReport::default();
    for trial in 0..n_trials {
        let mut w = faer::Mat::<C64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..=i {
                let re: f64 = r.sample(rand_distr::StandardNormal);
                let im: f64 = if i == j { 0.0 } else { r.sample(rand_distr::StandardNormal) };
                w[(i, j)] = C64::new(re, im);
                w[(j, i)] = C64::new(re, -im);
            }
        }
        let norm = crate::matrix::dense_hermitian_norm(&w);
        let kappa: f64 = r.random_range(0.01..=0.25);
        let w = OperatorMatrix::from_dense(&w).scaled(C64::new(kappa / norm * (1.0 - 1e-12), 0.0));
        let t: f64 = r.random_range(0.0..=10.0);
        let rep = unitary_diff_bound_check(&h0, &w, t)?;
        report.at_most(
            format!("trial {trial}: kappa {:.3} t {:.2}", rep.kappa, t),
            rep.difference,
            rep.bound,
        );
    }
    Ok(report)
}

/// Full battery for an encoded system.
pub fn check_system(sys: &EncodedSystem) -> Result<CheckReport> {
    let layout = &sys.layout;
    let mut report = CheckReport::default();
    let enc = verify_encoding(sys)?;
    for (name, v) in enc.norms() {
        report.at_most(format!("encoding {name}"), v, ENCODING_TOL);
    }
    if layout.n_blocks() <= 3 {
        report.merge(check_error_suppression(layout)?);
    }
    if layout.n_blocks() <= 2 {
        report.merge(check_nogo_consistency(layout)?);
    }
    report.merge(check_css(layout)?);
    let frame = BellFrame::new(layout)?;
    for g in &sys.gadgets {
        let (a, b) = g.blocks_touched;
        let first = frame.project_zero(&g.physical).spectral_norm();
        report.at_most(format!("gadget {a}->{b} first order"), first, FIRST_ORDER_TOL);
        if first <= FIRST_ORDER_TOL {
            let eff = effective_hamiltonian_in(&frame, &g.physical)?;
            report.at_most(format!("gadget {a}->{b} leakage"), eff.leakage, ZERO_TOL);
        }
    }
    for (x, gx) in sys.gadgets.iter().enumerate() {
        for gy in &sys.gadgets[x + 1..] {
            let v = interference_in(&frame, &gx.physical, &gy.physical);
            report.at_most(
                format!(
                    "interference {:?} / {:?}",
                    gx.blocks_touched, gy.blocks_touched
                ),
                v,
                ZERO_TOL,
            );
        }
    }
    Ok(report)
}
