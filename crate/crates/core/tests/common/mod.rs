//! Dense reference implementations used as oracles by the integration tests.
#![allow(dead_code)]

use faer::{Mat, Side};
use hamcode::code::CodeLayout;
use hamcode::pauli::OperatorSum;
use num_complex::Complex64 as C64;

const FRAC: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn letter_matrix(p: char) -> Mat<C64> {
    let i = C64::new(0.0, 1.0);
    match p {
        'I' => Mat::from_fn(2, 2, |r, k| if r == k { c(1.0) } else { c(0.0) }),
        'X' => Mat::from_fn(2, 2, |r, k| if r != k { c(1.0) } else { c(0.0) }),
        'Y' => Mat::from_fn(2, 2, |r, k| match (r, k) {
            (0, 1) => -i,
            (1, 0) => i,
            _ => c(0.0),
        }),
        'Z' => Mat::from_fn(2, 2, |r, k| match (r, k) {
            (0, 0) => c(1.0),
            (1, 1) => c(-1.0),
            _ => c(0.0),
        }),
        _ => panic!("bad letter {p}"),
    }
}

pub fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |r, k| a[(r / br, k / bc)] * b[(r % br, k % bc)])
}

/// Kronecker product of single-qubit matrices, qubit 0 leftmost.
pub fn string_matrix(letters: &str) -> Mat<C64> {
    letters
        .chars()
        .fold(Mat::from_fn(1, 1, |_, _| c(1.0)), |acc, p| kron(&acc, &letter_matrix(p)))
}

pub fn sum_matrix(op: &OperatorSum) -> Mat<C64> {
    let dim = 1usize << op.n_qubits();
    let mut m = Mat::<C64>::zeros(dim, dim);
    for t in op.terms() {
        let s = string_matrix(&t.letter_string());
        m += Mat::from_fn(dim, dim, |r, k| s[(r, k)] * t.coeff);
    }
    m
}

pub fn adjoint(m: &Mat<C64>) -> Mat<C64> {
    m.adjoint().to_owned()
}

pub fn spectral_norm(m: &Mat<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().unwrap().into_iter().fold(0.0, f64::max)
}

pub fn max_entry(m: &Mat<C64>) -> f64 {
    let mut out = 0.0f64;
    for r in 0..m.nrows() {
        for k in 0..m.ncols() {
            out = out.max(m[(r, k)].norm());
        }
    }
    out
}

/// Penalty Hamiltonian assembled from explicit Kronecker products.
pub fn penalty_matrix(layout: &CodeLayout) -> Mat<C64> {
    let nb = layout.n_blocks();
    let n = 4 * nb;
    let dim = 1usize << n;
    let mut h = Mat::<C64>::zeros(dim, dim);
    for (b, p) in layout.blocks.iter().enumerate() {
        for (pair, p_letter, g) in [(0, 'X', p.g_x), (1, 'X', p.g_x), (0, 'Z', p.g_z), (1, 'Z', p.g_z)] {
            let mut s = vec!['I'; n];
            s[4 * b + 2 * pair] = p_letter;
            s[4 * b + 2 * pair + 1] = p_letter;
            let m = string_matrix(&s.iter().collect::<String>());
            h += Mat::from_fn(dim, dim, |r, k| m[(r, k)] * g);
        }
    }
    h
}

pub fn bell(k: usize) -> [C64; 4] {
    let f = c(FRAC);
    match k {
        0 => [f, c(0.0), c(0.0), f],
        1 => [f, c(0.0), c(0.0), -f],
        2 => [c(0.0), f, f, c(0.0)],
        3 => [c(0.0), f, -f, c(0.0)],
        _ => unreachable!(),
    }
}

/// Codeword d of one block: pair one in Bell state d, pair two in 3 − d.
pub fn codeword(d: usize) -> Vec<C64> {
    let (u, v) = (bell(d), bell(3 - d));
    let mut out = vec![c(0.0); 16];
    for i in 0..4 {
        for j in 0..4 {
            out[4 * i + j] = u[i] * v[j];
        }
    }
    out
}

/// Block isometry from two logical qubits (slot 1, slot 2) into 16 amplitudes.
pub fn block_isometry() -> Mat<C64> {
    let cw = Mat::from_fn(16, 4, |r, d| codeword(d)[r]);
    let h = Mat::from_fn(2, 2, |r, k| if r == 1 && k == 1 { c(-FRAC) } else { c(FRAC) });
    let slot2 = kron(&letter_matrix('I'), &h);
    &cw * &slot2
}

/// Encoding isometry from logical sites (site 0 most significant) into the physical register.
pub fn encoding_isometry(layout: &CodeLayout) -> Mat<C64> {
    let nb = layout.n_blocks();
    let nl = layout.n_logical();
    let blk = block_isometry();
    Mat::from_fn(1usize << (4 * nb), 1usize << nl, |row, col| {
        let mut amp = c(1.0);
        for b in 0..nb {
            let bit = |slot: u8| (col >> (nl - 1 - layout.site_of(b, slot))) & 1;
            let lcol = 2 * bit(1) + bit(2);
            let lrow = (row >> (4 * (nb - 1 - b))) & 15;
            amp *= blk[(lrow, lcol)];
            if amp == c(0.0) {
                break;
            }
        }
        amp
    })
}

/// Projector onto the zero-energy space and the penalty pseudoinverse, from a dense eigendecomposition.
pub struct DenseOracle {
    pub p0: Mat<C64>,
    pub r0: Mat<C64>,
    pub iso: Mat<C64>,
    pub penc: Mat<C64>,
}

impl DenseOracle {
    pub fn new(layout: &CodeLayout) -> Self {
        let h = penalty_matrix(layout);
        let dim = h.nrows();
        let eig = h.self_adjoint_eigen(Side::Lower).unwrap();
        let u = eig.U();
        let vals: Vec<f64> = (0..dim).map(|i| eig.S().column_vector()[i].re).collect();
        let mut p0 = Mat::<C64>::zeros(dim, dim);
        let mut r0 = Mat::<C64>::zeros(dim, dim);
        for (k, &e) in vals.iter().enumerate() {
            let col = u.col(k);
            let proj = Mat::from_fn(dim, dim, |r, s| col[r] * col[s].conj());
            if e.abs() < 1e-9 {
                p0 += &proj;
            } else {
                r0 += Mat::from_fn(dim, dim, |r, s| proj[(r, s)] / e);
            }
        }
        let iso = encoding_isometry(layout);
        let penc = &iso * adjoint(&iso);
        DenseOracle { p0, r0, iso, penc }
    }

    /// P₀ A R₀ B P₀.
    pub fn second_order(&self, a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
        &self.p0 * a * &self.r0 * b * &self.p0
    }

    /// −P₀ G R₀ G P₀.
    pub fn effective(&self, g: &Mat<C64>) -> Mat<C64> {
        let m = self.second_order(g, g);
        Mat::from_fn(m.nrows(), m.ncols(), |r, k| -m[(r, k)])
    }

    pub fn to_logical(&self, m: &Mat<C64>) -> Mat<C64> {
        adjoint(&self.iso) * m * &self.iso
    }

    /// (P₀ − P_enc) M P_enc.
    pub fn leakage(&self, m: &Mat<C64>) -> Mat<C64> {
        (&self.p0 - &self.penc) * m * &self.penc
    }

    pub fn zero_dim(&self) -> usize {
        (0..self.p0.nrows()).map(|i| self.p0[(i, i)].re).sum::<f64>().round() as usize
    }
}

/// Row of the gadget table under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Row {
    Zz(f64),
    Xx(f64),
    Xy(f64, f64),
}

pub struct GadgetComparison {
    /// Largest entry of (dense effective operator on the code space) − (closed form).
    pub entry_error: f64,
    /// ‖P₀GP₀‖.
    pub first_order: f64,
    /// ‖(P₀ − P_enc)H_eff P_enc‖.
    pub leakage: f64,
    /// Largest difference between library and oracle physical coefficients.
    pub coefficient_error: f64,
}

fn scaled_string(letters: &str, coeff: f64) -> Mat<C64> {
    let m = string_matrix(letters);
    Mat::from_fn(m.nrows(), m.ncols(), |r, k| m[(r, k)] * coeff)
}

/// Two-block gadget from block 0 (slot 2) to block 1 (slot 1), checked against the closed forms.
pub fn compare_gadget(layout: &CodeLayout, row: Row) -> GadgetComparison {
    use hamcode::gadget::{make_xx_gadget, make_xy_gadget, make_zz_gadget};
    assert_eq!(layout.n_blocks(), 2);
    let (gxa, gzb) = (layout.blocks[0].g_x, layout.blocks[1].g_z);
    let d = gzb * gzb - gxa * gxa;
    let sign = |x: f64| if x < 0.0 { -1.0 } else { 1.0 };
    // physical strings on 8 qubits: Z2a X3b, Z4a X3b, Z2a X1b
    let (z2x3, z4x3, z2x1) = ("IZIIIIXI", "IIIZIIXI", "IZIIXIII");
    // logical strings on 4 sites: a = sites 0,1 and b = sites 2,3
    let (zz, xx, x2a, z1b) = ("IZZI", "IXXI", "IXII", "IIZI");
    let (coeffs, physical, terms): (Vec<f64>, Mat<C64>, Vec<(&str, f64)>) = match row {
        Row::Zz(j) => {
            let al = (j * d / gzb).abs().sqrt();
            let be = sign(j * d / gzb) * al;
            (
                vec![al, be],
                scaled_string(z2x3, al) + scaled_string(z4x3, be),
                vec![
                    (zz, al * be * gzb / d),
                    (x2a, -(al * al - be * be) / 2.0 * gxa / d),
                    (z1b, -(al * al + be * be) / 2.0 * gzb / d),
                ],
            )
        }
        Row::Xx(j) => {
            let al = (j * d / gxa).abs().sqrt();
            let be = sign(j * d / gxa) * al;
            (
                vec![al, be],
                scaled_string(z2x1, al) + scaled_string(z2x3, be),
                vec![
                    (xx, al * be * gxa / d),
                    (x2a, -(al * al + be * be) / 2.0 * gxa / d),
                    (z1b, (al * al - be * be) / 2.0 * gzb / d),
                ],
            )
        }
        Row::Xy(jz, jx) => {
            let al = (jz * d / gzb).abs().sqrt();
            let be = sign(jz * d / gzb) * al;
            let ga = jx * d / (gxa * al);
            (
                vec![al, be, ga],
                scaled_string(z2x3, al) + scaled_string(z4x3, be) + scaled_string(z2x1, ga),
                vec![
                    (zz, al * be * gzb / d),
                    (xx, al * ga * gxa / d),
                    (x2a, -(al * al - be * be + ga * ga) / 2.0 * gxa / d),
                    (z1b, -(al * al + be * be - ga * ga) / 2.0 * gzb / d),
                ],
            )
        }
    };
    let gadget = match row {
        Row::Zz(j) => make_zz_gadget(0, 1, j, layout),
        Row::Xx(j) => make_xx_gadget(0, 1, j, layout),
        Row::Xy(jz, jx) => make_xy_gadget(0, 1, jz, jx, layout),
    }
    .unwrap();
    let coefficient_error = gadget
        .coefficients
        .iter()
        .zip(&coeffs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        .max(max_entry(&(sum_matrix(&gadget.physical) - &physical)));

    let oracle = DenseOracle::new(layout);
    let heff = oracle.effective(&physical);
    let want = terms
        .iter()
        .fold(Mat::<C64>::zeros(16, 16), |acc, &(s, k)| acc + scaled_string(s, k));
    GadgetComparison {
        entry_error: max_entry(&(oracle.to_logical(&heff) - want)),
        first_order: spectral_norm(&(&oracle.p0 * &physical * &oracle.p0)),
        leakage: spectral_norm(&oracle.leakage(&heff)),
        coefficient_error,
    }
}

/// The four encoding residuals of an encoded system from dense projectors:
/// ‖P₀H₂P₀‖, ‖P_enc(H₁ + H_eff)P_enc − H_tar‖, ‖(P₀ − P_enc)H₁P_enc‖, ‖(P₀ − P_enc)H_eff P_enc‖.
pub fn dense_encoding_residuals(sys: &hamcode::models::EncodedSystem) -> [f64; 4] {
    let oracle = DenseOracle::new(&sys.layout);
    let h1 = sum_matrix(&sys.h_enc1);
    let h2 = sum_matrix(&sys.h_enc2);
    let heff = oracle.effective(&h2);
    let tar = sum_matrix(&sys.h_tar_logical);
    [
        spectral_norm(&(&oracle.p0 * &h2 * &oracle.p0)),
        spectral_norm(&(oracle.to_logical(&(&h1 + &heff)) - tar)),
        spectral_norm(&oracle.leakage(&h1)),
        spectral_norm(&oracle.leakage(&heff)),
    ]
}
