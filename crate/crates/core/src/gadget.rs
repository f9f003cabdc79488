//! Cross-block perturbative gadgets and their second-order logical action.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::code::{logical_sum_to_physical, qubit, BellFrame, BlockParams, CodeLayout};
use crate::error::{Error, Result};
use crate::matrix::{OperatorMatrix, RectMatrix, C64};
use crate::pauli::{OperatorSum, Pauli};

/// Gadgets must satisfy ‖P₀ g P₀‖ below this.
pub const FIRST_ORDER_TOL: f64 = 1e-10;

/// Logical coupling realized by a gadget, between slot 2 of block `a` and slot 1 of block `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CouplingKind {
    #[serde(rename = "ZZ")]
    Zz,
    #[serde(rename = "XX")]
    Xx,
    #[serde(rename = "XY")]
    Xy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gadget {
    pub kind: CouplingKind,
    pub blocks_touched: (usize, usize),
    /// α, β and (for XY) γ.
    pub coefficients: Vec<f64>,
    pub physical: OperatorSum,
    pub target_logical: OperatorSum,
    /// Single-site logical terms produced alongside the target.
    pub byproduct_logical: OperatorSum,
    pub residual_correction: OperatorSum,
}

fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn denominator(layout: &CodeLayout, a: usize, b: usize) -> Result<(BlockParams, BlockParams, f64)> {
    for &k in &[a, b] {
        if k >= layout.n_blocks() {
            return Err(Error::Dimension {
                expected: layout.n_blocks(),
                found: k + 1,
            });
        }
    }
    if a == b {
        return Err(Error::InvalidLayout("gadget needs two distinct blocks".into()));
    }
    let (pa, pb) = (layout.blocks[a], layout.blocks[b]);
    let (gx, gz) = (pa.g_x.abs(), pb.g_z.abs());
    if (gx - gz).abs() <= 1e-12 * gx.max(gz) {
        return Err(Error::GadgetDegenerate(gx));
    }
    Ok((pa, pb, pb.g_z * pb.g_z - pa.g_x * pa.g_x))
}

/// Closed-form second-order logical operator of a gadget with the given coefficients.
pub fn closed_form_logical(
    kind: CouplingKind,
    coefficients: &[f64],
    a: usize,
    b: usize,
    layout: &CodeLayout,
) -> Result<OperatorSum> {
    let (pa, pb, d) = denominator(layout, a, b)?;
    let (gx, gz) = (pa.g_x, pb.g_z);
    let s2a = layout.site_of(a, 2);
    let s1b = layout.site_of(b, 1);
    let mut out = OperatorSum::new(layout.n_logical());
    let mut add = |ops: &[(usize, Pauli)], c: f64| out.add_term(ops, c / d);
    let zz = [(s2a, Pauli::Z), (s1b, Pauli::Z)];
    let xx = [(s2a, Pauli::X), (s1b, Pauli::X)];
    let x2a = [(s2a, Pauli::X)];
    let z1b = [(s1b, Pauli::Z)];
    match (kind, coefficients) {
        (CouplingKind::Zz, &[al, be]) => {
            add(&zz, al * be * gz)?;
            add(&x2a, -(al * al - be * be) / 2.0 * gx)?;
            add(&z1b, -(al * al + be * be) / 2.0 * gz)?;
        }
        (CouplingKind::Xx, &[al, be]) => {
            add(&xx, al * be * gx)?;
            add(&x2a, -(al * al + be * be) / 2.0 * gx)?;
            add(&z1b, (al * al - be * be) / 2.0 * gz)?;
        }
        (CouplingKind::Xy, &[al, be, ga]) => {
            add(&zz, al * be * gz)?;
            add(&xx, al * ga * gx)?;
            add(&x2a, -(al * al - be * be + ga * ga) / 2.0 * gx)?;
            add(&z1b, -(al * al + be * be - ga * ga) / 2.0 * gz)?;
        }
        _ => {
            return Err(Error::InfeasibleGadget(format!(
                "{kind:?} gadget takes {} coefficients, got {}",
                if kind == CouplingKind::Xy { 3 } else { 2 },
                coefficients.len()
            )))
        }
    }
    Ok(out.simplified())
}

impl Gadget {
    /// Builds the gadget for explicit coefficients.
    pub fn from_coefficients(
        kind: CouplingKind,
        a: usize,
        b: usize,
        coefficients: Vec<f64>,
        layout: &CodeLayout,
    ) -> Result<Gadget> {
        let logical = closed_form_logical(kind, &coefficients, a, b, layout)?;
        let mut physical = OperatorSum::new(layout.n_physical());
        let terms: &[(usize, usize)] = match kind {
            CouplingKind::Zz => &[(2, 3), (4, 3)],
            CouplingKind::Xx => &[(2, 1), (2, 3)],
            CouplingKind::Xy => &[(2, 3), (4, 3), (2, 1)],
        };
        for (&(ka, kb), &c) in terms.iter().zip(&coefficients) {
            if c != 0.0 {
                physical.add_term(&[(qubit(a, ka), Pauli::Z), (qubit(b, kb), Pauli::X)], c)?;
            }
        }
        let (mut target, mut byproduct) = (OperatorSum::new(layout.n_logical()), OperatorSum::new(layout.n_logical()));
        for t in logical.terms() {
            if t.weight() == 2 {
                target.push(t.clone())?;
            } else {
                byproduct.push(t.clone())?;
            }
        }
        let residual_correction = logical_sum_to_physical(&byproduct.scaled(-1.0), layout)?;
        Ok(Gadget {
            kind,
            blocks_touched: (a, b),
            coefficients,
            physical,
            target_logical: target,
            byproduct_logical: byproduct,
            residual_correction,
        })
    }
}

/// J·Z̄₂^(a)Z̄₁^(b) via α Z₂^(a)X₃^(b) + β Z₄^(a)X₃^(b).
pub fn make_zz_gadget(a: usize, b: usize, j: f64, layout: &CodeLayout) -> Result<Gadget> {
    let (_, pb, d) = denominator(layout, a, b)?;
    let ratio = j * d / pb.g_z;
    let alpha = ratio.abs().sqrt();
    Gadget::from_coefficients(CouplingKind::Zz, a, b, vec![alpha, sgn(ratio) * alpha], layout)
}

/// J·X̄₂^(a)X̄₁^(b) via α Z₂^(a)X₁^(b) + β Z₂^(a)X₃^(b).
pub fn make_xx_gadget(a: usize, b: usize, j: f64, layout: &CodeLayout) -> Result<Gadget> {
    let (pa, _, d) = denominator(layout, a, b)?;
    let ratio = j * d / pa.g_x;
    let alpha = ratio.abs().sqrt();
    Gadget::from_coefficients(CouplingKind::Xx, a, b, vec![alpha, sgn(ratio) * alpha], layout)
}

/// J_Z·Z̄₂^(a)Z̄₁^(b) + J_X·X̄₂^(a)X̄₁^(b) with one shared three-term gadget.
pub fn make_xy_gadget(a: usize, b: usize, j_z: f64, j_x: f64, layout: &CodeLayout) -> Result<Gadget> {
    let (pa, pb, d) = denominator(layout, a, b)?;
    if j_z == 0.0 && j_x != 0.0 {
        return Err(Error::InfeasibleGadget(
            "the three-term gadget needs a nonzero ZZ part; use an XX gadget".into(),
        ));
    }
    let ratio = j_z * d / pb.g_z;
    let alpha = ratio.abs().sqrt();
    let gamma = if alpha == 0.0 { 0.0 } else { j_x * d / (pa.g_x * alpha) };
    Gadget::from_coefficients(
        CouplingKind::Xy,
        a,
        b,
        vec![alpha, sgn(ratio) * alpha, gamma],
        layout,
    )
}

/// Second-order effective operator of a gadget sum.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    /// −P₀ g R₀ g P₀ in the zero-space basis.
    pub on_zero_space: OperatorMatrix,
    /// Restriction to the code space, codeword order.
    pub code_block: RectMatrix,
    /// ‖(P₀ − P_enc) H_eff P_enc‖.
    pub leakage: f64,
    /// ‖P₀ g P₀‖.
    pub first_order: f64,
}

pub fn effective_hamiltonian(g: &OperatorSum, layout: &CodeLayout) -> Result<EffectiveHamiltonian> {
    effective_hamiltonian_in(&BellFrame::new(layout)?, g)
}

pub fn effective_hamiltonian_in(frame: &BellFrame, g: &OperatorSum) -> Result<EffectiveHamiltonian> {
    let first_order = frame.project_zero(g).spectral_norm();
    if first_order > FIRST_ORDER_TOL {
        return Err(Error::FirstOrderLeakage { norm: first_order });
    }
    let on_zero_space = frame.second_order(g, g).scaled(C64::new(-1.0, 0.0));
    let leakage = frame.leakage_block(&on_zero_space).spectral_norm();
    let code_block = frame.code_block(&on_zero_space);
    Ok(EffectiveHamiltonian {
        on_zero_space,
        code_block,
        leakage,
        first_order,
    })
}

/// ‖P₀AR₀BP₀ + P₀BR₀AP₀‖.
pub fn interference(a: &OperatorSum, b: &OperatorSum, layout: &CodeLayout) -> Result<f64> {
    Ok(interference_in(&BellFrame::new(layout)?, a, b))
}

pub fn interference_in(frame: &BellFrame, a: &OperatorSum, b: &OperatorSum) -> f64 {
    let ab = frame.second_order(a, b);
    let ba = frame.second_order(b, a);
    ab.add(&ba).expect("same zero space").spectral_norm()
}

/// P₀AR₀BP₀ alone.
pub fn one_sided_second_order(frame: &BellFrame, a: &OperatorSum, b: &OperatorSum) -> f64 {
    frame.second_order(a, b).spectral_norm()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub kind: CouplingKind,
    pub strength: f64,
}

/// Block-level interaction graph.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InteractionGraph {
    pub n_vertices: usize,
    pub edges: Vec<GraphEdge>,
}

impl InteractionGraph {
    pub fn new(n_vertices: usize) -> Self {
        Self {
            n_vertices,
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize, kind: CouplingKind, strength: f64) {
        self.edges.push(GraphEdge { a, b, kind, strength });
    }

    fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.n_vertices;
        let mut adj = vec![vec![false; n]; n];
        for e in &self.edges {
            if e.a != e.b {
                adj[e.a][e.b] = true;
                adj[e.b][e.a] = true;
            }
        }
        adj
    }

    /// Graph plus edges between vertices sharing a neighbor.
    pub fn squared_adjacency(&self) -> Vec<Vec<bool>> {
        let adj = self.adjacency();
        let n = self.n_vertices;
        let mut sq = adj.clone();
        for (v, row) in adj.iter().enumerate() {
            let nbrs: Vec<usize> = (0..n).filter(|&u| row[u]).collect();
            for &x in &nbrs {
                for &y in &nbrs {
                    if x != y {
                        sq[x][y] = true;
                    }
                }
            }
            sq[v][v] = false;
        }
        sq
    }

    /// Greedy coloring of the squared graph in vertex order.
    pub fn greedy_colors(&self) -> Vec<usize> {
        let sq = self.squared_adjacency();
        let mut colors: Vec<Option<usize>> = vec![None; self.n_vertices];
        for v in 0..self.n_vertices {
            let used: Vec<usize> = (0..self.n_vertices)
                .filter(|&u| sq[v][u])
                .filter_map(|u| colors[u])
                .collect();
            colors[v] = (0..).find(|c| !used.contains(c));
        }
        colors.into_iter().map(|c| c.expect("colored")).collect()
    }
}

/// g_x = 2^{2C}, g_z = 2^{2C+1} from a greedy coloring of the squared graph.
pub fn assign_block_colors(graph: &InteractionGraph) -> Vec<BlockParams> {
    graph
        .greedy_colors()
        .into_iter()
        .map(|c| BlockParams {
            g_x: 2f64.powi(2 * c as i32),
            g_z: 2f64.powi(2 * c as i32 + 1),
        })
        .collect()
}

/// Text report of a gadget with its numerically measured norms.
pub fn gadget_report(g: &Gadget, layout: &CodeLayout) -> Result<String> {
    let frame = BellFrame::new(layout)?;
    let first = frame.project_zero(&g.physical).spectral_norm();
    let leak = if first <= FIRST_ORDER_TOL {
        effective_hamiltonian_in(&frame, &g.physical)?.leakage
    } else {
        f64::NAN
    };
    let mut s = String::new();
    let (a, b) = g.blocks_touched;
    let _ = writeln!(s, "gadget {:?} blocks ({a}, {b}) coefficients {:?}", g.kind, g.coefficients);
    let _ = writeln!(s, "physical:");
    g.physical.terms().iter().for_each(|t| {
        let _ = writeln!(s, "  {t}");
    });
    let _ = writeln!(s, "target (logical sites):");
    g.target_logical.terms().iter().for_each(|t| {
        let _ = writeln!(s, "  {t}");
    });
    let _ = writeln!(s, "byproduct (logical sites):");
    g.byproduct_logical.terms().iter().for_each(|t| {
        let _ = writeln!(s, "  {t}");
    });
    let _ = writeln!(s, "residual correction:");
    g.residual_correction.terms().iter().for_each(|t| {
        let _ = writeln!(s, "  {t}");
    });
    let _ = writeln!(s, "first_order_norm {first:e}");
    let _ = writeln!(s, "leakage_norm {leak:e}");
    Ok(s)
}
