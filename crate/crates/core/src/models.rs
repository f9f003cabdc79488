//! Encoders for the four target spin models.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::code::{
    logical_sum_to_physical, penalty_hamiltonian, to_codeword_frame, BellFrame, BlockParams, CodeLayout, Slot,
};
use crate::error::{Error, Result};
use crate::gadget::{
    assign_block_colors, make_xx_gadget, make_xy_gadget, make_zz_gadget, CouplingKind, Gadget, InteractionGraph,
};
use crate::matrix::{dense_spectral_norm, OperatorMatrix};
use crate::pauli::{OperatorSum, Pauli};

/// Threshold for each encoding residual.
pub const ENCODING_TOL: f64 = 1e-9;

/// Largest physical register `verify_encoding` accepts.
pub const VERIFY_QUBIT_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "tfi1d", alias = "TFI1D")]
    Tfi1d,
    #[serde(rename = "xy1d", alias = "XY1D")]
    Xy1d,
    #[serde(rename = "tfi2d", alias = "TFI2D")]
    Tfi2d,
    #[serde(rename = "compass2d", alias = "COMPASS2D")]
    Compass2d,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Tfi1d => "tfi1d",
            ModelKind::Xy1d => "xy1d",
            ModelKind::Tfi2d => "tfi2d",
            ModelKind::Compass2d => "compass2d",
        })
    }
}

/// A scalar applied uniformly or one value per bond/site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    Uniform(f64),
    PerItem(Vec<f64>),
}

impl Values {
    fn expand(&self, n: usize, key: &str) -> Result<Vec<f64>> {
        match self {
            Values::Uniform(v) => Ok(vec![*v; n]),
            Values::PerItem(vs) if vs.len() == n => Ok(vs.clone()),
            Values::PerItem(vs) => Err(Error::Parse(format!(
                "key {key:?}: expected {n} values, got {}",
                vs.len()
            ))),
        }
    }
}

fn expand(v: &Option<Values>, n: usize, key: &str, default: f64) -> Result<Vec<f64>> {
    v.as_ref().map_or(Ok(vec![default; n]), |v| v.expand(n, key))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default)]
    pub periodic: bool,
}

/// Coupling constants; keys not used by a model must be absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Couplings {
    /// Chain bonds (1D models), in site order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Values>,
    /// Bonds between rows i and i+1 (2D TFI), row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_vertical: Option<Values>,
    /// Bonds between columns j and j+1 (2D TFI), row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_horizontal: Option<Values>,
    /// Vertical ZZ bonds of the compass model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jz: Option<Values>,
    /// Horizontal XX bonds of the compass model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jx: Option<Values>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fields {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hz: Option<Values>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hx: Option<Values>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BlockParamsChoice {
    /// "standard" or "coloring".
    Named(String),
    Explicit(Vec<BlockParams>),
}

impl Default for BlockParamsChoice {
    fn default() -> Self {
        BlockParamsChoice::Named("standard".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub model: ModelKind,
    pub geometry: Geometry,
    #[serde(default)]
    pub couplings: Couplings,
    #[serde(default)]
    pub fields: Fields,
    #[serde(default)]
    pub block_params: BlockParamsChoice,
}

impl ModelSpec {
    pub fn chain(model: ModelKind, sites: usize) -> Self {
        Self {
            model,
            geometry: Geometry {
                sites: Some(sites),
                ..Default::default()
            },
            couplings: Couplings::default(),
            fields: Fields::default(),
            block_params: BlockParamsChoice::default(),
        }
    }

    pub fn lattice(model: ModelKind, rows: usize, cols: usize) -> Self {
        Self {
            model,
            geometry: Geometry {
                rows: Some(rows),
                cols: Some(cols),
                ..Default::default()
            },
            couplings: Couplings::default(),
            fields: Fields::default(),
            block_params: BlockParamsChoice::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("model config: {e}")))
    }

    /// (rows, cols) of the lattice; chains are one row.
    pub fn shape(&self) -> Result<(usize, usize)> {
        let g = &self.geometry;
        match self.model {
            ModelKind::Tfi1d | ModelKind::Xy1d => {
                let n = g
                    .sites
                    .ok_or_else(|| Error::Geometry("chain models need geometry.sites".into()))?;
                if n == 0 || n % 2 != 0 {
                    return Err(Error::Geometry(format!("chain length must be even and positive, got {n}")));
                }
                Ok((1, n))
            }
            ModelKind::Tfi2d | ModelKind::Compass2d => {
                let (Some(r), Some(c)) = (g.rows, g.cols) else {
                    return Err(Error::Geometry("lattice models need geometry.rows and geometry.cols".into()));
                };
                if r == 0 || c == 0 || (r % 2 != 0 && c % 2 != 0) {
                    return Err(Error::Geometry(format!("{r}x{c} lattice has no even dimension")));
                }
                if g.periodic {
                    return Err(Error::Geometry("periodic boundaries are only supported for chains".into()));
                }
                Ok((r, c))
            }
        }
    }
}

/// How lattice sites are grouped into blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    /// Chain sites 2b, 2b+1.
    Chain,
    /// Horizontal neighbours, slot order reversed on odd rows.
    Rows,
    /// Vertical neighbours, slot order reversed on odd columns.
    Columns,
}

#[derive(Debug, Clone, PartialEq)]
struct Bond {
    u: usize,
    v: usize,
    letter: Pauli,
    strength: f64,
}

struct Assignment {
    pairing: Pairing,
    map: Vec<Slot>,
    /// Row (or column) index used by the standard parameter pattern.
    line_of_block: Vec<usize>,
}

fn assign(model: ModelKind, rows: usize, cols: usize) -> Assignment {
    let n_sites = rows * cols;
    let mut map = vec![Slot(0, 1); n_sites];
    let mut line_of_block = Vec::new();
    let pairing = match model {
        ModelKind::Tfi1d | ModelKind::Xy1d => Pairing::Chain,
        _ if rows == 2 => Pairing::Columns,
        _ if cols.is_multiple_of(2) => Pairing::Rows,
        _ => Pairing::Columns,
    };
    match pairing {
        Pairing::Chain => {
            for k in 0..n_sites {
                map[k] = Slot(k / 2, 1 + (k % 2) as u8);
            }
            line_of_block = vec![0; n_sites / 2];
        }
        Pairing::Rows => {
            for i in 0..rows {
                for m in 0..cols / 2 {
                    let block = i * (cols / 2) + m;
                    let (first, second) = if i % 2 == 0 { (1, 2) } else { (2, 1) };
                    map[i * cols + 2 * m] = Slot(block, first);
                    map[i * cols + 2 * m + 1] = Slot(block, second);
                    line_of_block.push(i);
                }
            }
        }
        Pairing::Columns => {
            for r in 0..rows / 2 {
                for j in 0..cols {
                    let block = r * cols + j;
                    let (first, second) = if j % 2 == 0 { (1, 2) } else { (2, 1) };
                    map[2 * r * cols + j] = Slot(block, first);
                    map[(2 * r + 1) * cols + j] = Slot(block, second);
                    line_of_block.push(j);
                }
            }
        }
    }
    Assignment {
        pairing,
        map,
        line_of_block,
    }
}

/// Single-site term: (site, letter, strength).
type FieldTerm = (usize, Pauli, f64);

fn bonds_and_fields(spec: &ModelSpec, rows: usize, cols: usize) -> Result<(Vec<Bond>, Vec<FieldTerm>)> {
    let c = &spec.couplings;
    let f = &spec.fields;
    let n = rows * cols;
    let mut bonds = Vec::new();
    let mut fields = Vec::new();
    let unused = |present: bool, key: &str| {
        if present {
            Err(Error::Parse(format!("key {key:?} is not used by model {}", spec.model)))
        } else {
            Ok(())
        }
    };
    match spec.model {
        ModelKind::Tfi1d | ModelKind::Xy1d => {
            unused(c.j_vertical.is_some(), "j_vertical")?;
            unused(c.j_horizontal.is_some(), "j_horizontal")?;
            unused(c.jz.is_some(), "jz")?;
            unused(c.jx.is_some(), "jx")?;
            let n_bonds = if spec.geometry.periodic && n > 2 { n } else { n - 1 };
            let js = expand(&c.j, n_bonds, "j", 1.0)?;
            for (k, &jk) in js.iter().enumerate() {
                let (u, v) = (k, (k + 1) % n);
                let letters: &[Pauli] = if spec.model == ModelKind::Tfi1d {
                    &[Pauli::Z]
                } else {
                    &[Pauli::Z, Pauli::X]
                };
                for &l in letters {
                    bonds.push(Bond { u, v, letter: l, strength: jk });
                }
            }
            if spec.model == ModelKind::Tfi1d {
                let hz = expand(&f.hz, n, "hz", 1.0)?;
                let hx = expand(&f.hx, n, "hx", 1.0)?;
                for k in 0..n {
                    fields.push((k, Pauli::Z, hz[k]));
                    fields.push((k, Pauli::X, hx[k]));
                }
            } else {
                unused(f.hz.is_some(), "hz")?;
                unused(f.hx.is_some(), "hx")?;
            }
        }
        ModelKind::Tfi2d | ModelKind::Compass2d => {
            unused(c.j.is_some(), "j")?;
            let (vk, hk) = if spec.model == ModelKind::Tfi2d {
                unused(c.jz.is_some(), "jz")?;
                unused(c.jx.is_some(), "jx")?;
                (("j_vertical", &c.j_vertical), ("j_horizontal", &c.j_horizontal))
            } else {
                unused(c.j_vertical.is_some(), "j_vertical")?;
                unused(c.j_horizontal.is_some(), "j_horizontal")?;
                (("jz", &c.jz), ("jx", &c.jx))
            };
            let hletter = if spec.model == ModelKind::Tfi2d { Pauli::Z } else { Pauli::X };
            let jv = expand(vk.1, (rows - 1) * cols, vk.0, 1.0)?;
            let jh = expand(hk.1, rows * (cols - 1), hk.0, 1.0)?;
            for i in 0..rows - 1 {
                for j in 0..cols {
                    bonds.push(Bond {
                        u: i * cols + j,
                        v: (i + 1) * cols + j,
                        letter: Pauli::Z,
                        strength: jv[i * cols + j],
                    });
                }
            }
            for i in 0..rows {
                for j in 0..cols - 1 {
                    bonds.push(Bond {
                        u: i * cols + j,
                        v: i * cols + j + 1,
                        letter: hletter,
                        strength: jh[i * (cols - 1) + j],
                    });
                }
            }
            if spec.model == ModelKind::Tfi2d {
                let hz = expand(&f.hz, n, "hz", 1.0)?;
                let hx = expand(&f.hx, n, "hx", 1.0)?;
                for k in 0..n {
                    fields.push((k, Pauli::Z, hz[k]));
                    fields.push((k, Pauli::X, hx[k]));
                }
            } else {
                unused(f.hz.is_some(), "hz")?;
                unused(f.hx.is_some(), "hx")?;
            }
        }
    }
    Ok((bonds, fields))
}

/// Standard patterns: (1,3) everywhere for chains, (1,4)/(2,5)/(3,6) cycling over lines for lattices.
fn standard_params(model: ModelKind, line: usize) -> BlockParams {
    match model {
        ModelKind::Tfi1d | ModelKind::Xy1d => BlockParams { g_x: 1.0, g_z: 3.0 },
        _ => {
            let k = (line % 3) as f64;
            BlockParams {
                g_x: 1.0 + k,
                g_z: 4.0 + k,
            }
        }
    }
}

/// Encoded model: layout, target and the two simulator Hamiltonian parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedSystem {
    pub model: ModelKind,
    pub rows: usize,
    pub cols: usize,
    pub pairing: Pairing,
    pub layout: CodeLayout,
    /// Factor applied to the requested block parameters to make the gap at least 1.
    pub gap_scale: f64,
    pub h_tar_logical: OperatorSum,
    pub h_enc1: OperatorSum,
    pub h_enc2: OperatorSum,
    pub gadgets: Vec<Gadget>,
}

impl EncodedSystem {
    pub fn n_physical(&self) -> usize {
        self.layout.n_physical()
    }

    pub fn h_pen(&self) -> OperatorSum {
        penalty_hamiltonian(&self.layout)
    }

    /// Target in the codeword frame (dimension 4ⁿ, codeword order).
    pub fn target_codeword_matrix(&self) -> Result<OperatorMatrix> {
        to_codeword_frame(&self.h_tar_logical, &self.layout)?.to_matrix()
    }

    /// λ·H_pen + H₁ + √λ·H₂ + V.
    pub fn simulator_hamiltonian(&self, lambda: f64, noise: Option<&OperatorSum>) -> Result<OperatorSum> {
        let mut h = self.h_pen().scaled(lambda);
        h.extend(&self.h_enc1)?;
        h.extend(&self.h_enc2.scaled(lambda.sqrt()))?;
        if let Some(v) = noise {
            h.extend(v)?;
        }
        Ok(h.simplified())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sys: EncodedSystem =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("encoded system: {e}")))?;
        sys.layout.validate()?;
        Ok(sys)
    }
}

/// Builds the encoded system for a model specification.
pub fn encode(spec: &ModelSpec) -> Result<EncodedSystem> {
    let (rows, cols) = spec.shape()?;
    let (bonds, fields) = bonds_and_fields(spec, rows, cols)?;
    let asg = assign(spec.model, rows, cols);
    let n_blocks = asg.line_of_block.len();

    // orient every cross-block bond as slot 2 of block a → slot 1 of block b
    let mut cross: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
    let mut inner_bonds = Vec::new();
    for bond in &bonds {
        let (Slot(bu, su), Slot(bv, sv)) = (asg.map[bond.u], asg.map[bond.v]);
        if bu == bv {
            inner_bonds.push(bond.clone());
            continue;
        }
        let key = match (su, sv) {
            (2, 1) => (bu, bv),
            (1, 2) => (bv, bu),
            _ => {
                return Err(Error::Geometry(format!(
                    "bond {}-{} joins slot {su} to slot {sv}; gadgets need slot 2 to slot 1",
                    bond.u, bond.v
                )))
            }
        };
        let e = cross.entry(key).or_insert((0.0, 0.0));
        match bond.letter {
            Pauli::Z => e.0 += bond.strength,
            _ => e.1 += bond.strength,
        }
    }

    let blocks = match &spec.block_params {
        BlockParamsChoice::Named(name) if name == "standard" => asg
            .line_of_block
            .iter()
            .map(|&line| standard_params(spec.model, line))
            .collect(),
        BlockParamsChoice::Named(name) if name == "coloring" => {
            let mut g = InteractionGraph::new(n_blocks);
            for (&(a, b), &(jz, jx)) in &cross {
                let kind = match (jz != 0.0, jx != 0.0) {
                    (true, true) => CouplingKind::Xy,
                    (false, true) => CouplingKind::Xx,
                    _ => CouplingKind::Zz,
                };
                g.add_edge(a, b, kind, if jz != 0.0 { jz } else { jx });
            }
            assign_block_colors(&g)
        }
        BlockParamsChoice::Named(other) => {
            return Err(Error::Parse(format!(
                "block_params must be \"standard\", \"coloring\" or a list, got {other:?}"
            )))
        }
        BlockParamsChoice::Explicit(list) => {
            if list.len() != n_blocks {
                return Err(Error::Parse(format!(
                    "block_params lists {} blocks, the geometry needs {n_blocks}",
                    list.len()
                )));
            }
            list.clone()
        }
    };
    let (layout, gap_scale) = CodeLayout::new(blocks, asg.map)?.gap_normalized();

    let n_logical = layout.n_logical();
    let mut h_tar = OperatorSum::new(n_logical);
    let mut inner = OperatorSum::new(n_logical);
    for b in &bonds {
        h_tar.add_term(&[(b.u, b.letter), (b.v, b.letter)], b.strength)?;
    }
    for b in &inner_bonds {
        inner.add_term(&[(b.u, b.letter), (b.v, b.letter)], b.strength)?;
    }
    for &(site, l, h) in &fields {
        h_tar.add_term(&[(site, l)], h)?;
        inner.add_term(&[(site, l)], h)?;
    }
    let h_tar = h_tar.simplified();
    let mut h_enc1 = logical_sum_to_physical(&inner.simplified(), &layout)?;

    let mut gadgets = Vec::new();
    let mut h_enc2 = OperatorSum::new(layout.n_physical());
    for (&(a, b), &(jz, jx)) in &cross {
        let g = match (jz != 0.0, jx != 0.0) {
            (_, false) => make_zz_gadget(a, b, jz, &layout)?,
            (false, true) => make_xx_gadget(a, b, jx, &layout)?,
            (true, true) => make_xy_gadget(a, b, jz, jx, &layout)?,
        };
        h_enc1.extend(&g.residual_correction)?;
        h_enc2.extend(&g.physical)?;
        gadgets.push(g);
    }

    Ok(EncodedSystem {
        model: spec.model,
        rows,
        cols,
        pairing: asg.pairing,
        layout,
        gap_scale,
        h_tar_logical: h_tar,
        h_enc1: h_enc1.simplified(),
        h_enc2: h_enc2.simplified(),
        gadgets,
    })
}

/// The four encoding residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodingReport {
    /// ‖P₀H₂P₀‖.
    pub first_order: f64,
    /// ‖P_enc(H₁ + H_eff)P_enc − H_tar‖.
    pub target_mismatch: f64,
    /// ‖(P₀ − P_enc)H₁P_enc‖.
    pub inner_leakage: f64,
    /// ‖(P₀ − P_enc)H_eff P_enc‖.
    pub gadget_leakage: f64,
}

impl EncodingReport {
    pub fn norms(&self) -> [(&'static str, f64); 4] {
        [
            ("first_order", self.first_order),
            ("target_mismatch", self.target_mismatch),
            ("inner_leakage", self.inner_leakage),
            ("gadget_leakage", self.gadget_leakage),
        ]
    }

    pub fn passes(&self) -> bool {
        self.norms().iter().all(|(_, v)| *v <= ENCODING_TOL)
    }
}

pub fn verify_encoding(sys: &EncodedSystem) -> Result<EncodingReport> {
    if sys.n_physical() > VERIFY_QUBIT_LIMIT {
        return Err(Error::Capacity {
            what: "encoding verification (qubits)",
            requested: sys.n_physical(),
            limit: VERIFY_QUBIT_LIMIT,
        });
    }
    let frame = BellFrame::new(&sys.layout)?;
    let first_order = frame.project_zero(&sys.h_enc2).spectral_norm();
    let h1 = frame.project_zero(&sys.h_enc1);
    let heff = frame
        .second_order(&sys.h_enc2, &sys.h_enc2)
        .scaled(crate::matrix::C64::new(-1.0, 0.0));
    let total = h1.add(&heff)?;
    let mut diff = frame.code_block(&total).to_dense();
    let target = sys.target_codeword_matrix()?.to_dense();
    diff -= &target;
    Ok(EncodingReport {
        first_order,
        target_mismatch: dense_spectral_norm(&diff),
        inner_leakage: frame.leakage_block(&h1).spectral_norm(),
        gadget_leakage: frame.leakage_block(&heff).spectral_norm(),
    })
}
