//! Circuit-Flip to Node-Max-Cut.
//!
//! Two circuit-computing halves `A` and `B` evaluate the augmented circuit
//! (value bits plus an improving neighbor) on their own input block. Each
//! NOR gate numbered `i` is a gadget of weight order `2^{N+i}`, scaled by
//! `2^{100N}` (`2^{90N}` for value bits). Equality gadgets drive the two
//! `Control` vertices, Copy gadgets write one half's neighbor output into
//! the other half's inputs, and a Comparator decides `Flag`, the direction
//! of copying. Light vertices reach heavy ones only through leverage chains.
//!
//! Every weight is an exact sum of powers of two ([`Pow2Sum`]); the global
//! factor `2^{500N}` makes all of them integers.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::circuit::BitString;
use crate::error::{Error, Result};
use crate::games_core::Cut;

mod check;
mod engine;
pub(crate) mod gadgets;
pub mod pow2;

pub use check::{intended_configuration, verify, IntendedReport};
pub use engine::{DynamicsOutcome, MaxGainDynamics};
pub use gadgets::{dominance_inequalities, n_min, reduce_cf_to_nmc, vertex_count, Inequality};
pub use pow2::Pow2Sum;

/// One of the two circuit-computing halves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Half {
    A,
    B,
}

impl Half {
    pub fn other(self) -> Half {
        match self {
            Half::A => Half::B,
            Half::B => Half::A,
        }
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Half::A => "A",
            Half::B => "B",
        })
    }
}

macro_rules! named {
    ($(#[$m:meta])* $name:ident { $($v:ident = $s:literal),* $(,)? }) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name { $($v),* }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$v),*];
            pub fn as_str(self) -> &'static str {
                match self { $($name::$v => $s),* }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s { $($s => Ok($name::$v),)* _ => Err(format!("unknown name `{s}`")) }
            }
        }
    };
}

named!(
    /// Vertices of one NOR gadget, control vertices included.
    NorName {
        A1 = "a1", A2 = "a2", B1 = "b1", B2 = "b2", B3 = "b3", C1 = "c1", C2 = "c2", C3 = "c3",
        D1 = "d1", D2 = "d2", V = "v", G = "g", Y1 = "y1", Z1 = "z1", Y2 = "y2", Z2 = "z2",
        Y3 = "y3", Z3 = "z3", Rho = "rho",
    }
);

named!(
    /// Vertices of one Equality bit.
    EqName { E1 = "e1", E2 = "e2", E3 = "e3", E4 = "e4", E5 = "e5", R = "r" }
);

named!(
    /// Vertices of one Copy bit besides `T`.
    CopyName { F = "f", Eta = "eta" }
);

/// What a vertex of a compiled instance stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexRole {
    Input { half: Half, bit: u32 },
    NextOut { half: Half, bit: u32 },
    ValOut { half: Half, bit: u32 },
    T { half: Half, bit: u32 },
    Control(Half),
    NotControl(Half),
    Flag,
    SuperOne,
    SuperZero,
    NorInternal { half: Half, gate: u32, name: NorName },
    LeverageInternal { chain: u32, step: u32, name: u8 },
    EqualityInternal { half: Half, bit: u32, name: EqName },
    CopyInternal { half: Half, bit: u32, name: CopyName },
    ComparatorInternal,
    Aux,
}

impl VertexRole {
    /// Short category name used in reports.
    pub fn category(&self) -> &'static str {
        match self {
            VertexRole::Input { .. } => "input",
            VertexRole::NextOut { .. } => "next",
            VertexRole::ValOut { .. } => "val",
            VertexRole::T { .. } => "t",
            VertexRole::Control(_) => "control",
            VertexRole::NotControl(_) => "notcontrol",
            VertexRole::Flag => "flag",
            VertexRole::SuperOne => "super1",
            VertexRole::SuperZero => "super0",
            VertexRole::NorInternal { .. } => "nor",
            VertexRole::LeverageInternal { .. } => "lev",
            VertexRole::EqualityInternal { .. } => "eq",
            VertexRole::CopyInternal { .. } => "copy",
            VertexRole::ComparatorInternal => "cmp",
            VertexRole::Aux => "aux",
        }
    }
}

impl fmt::Display for VertexRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.category();
        match self {
            VertexRole::Input { half, bit }
            | VertexRole::NextOut { half, bit }
            | VertexRole::ValOut { half, bit }
            | VertexRole::T { half, bit } => write!(f, "{c} {half} {bit}"),
            VertexRole::Control(h) | VertexRole::NotControl(h) => write!(f, "{c} {h}"),
            VertexRole::NorInternal { half, gate, name } => write!(f, "{c} {half} {gate} {}", name.as_str()),
            VertexRole::LeverageInternal { chain, step, name } => write!(f, "{c} {chain} {step} {name}"),
            VertexRole::EqualityInternal { half, bit, name } => write!(f, "{c} {half} {bit} {}", name.as_str()),
            VertexRole::CopyInternal { half, bit, name } => write!(f, "{c} {half} {bit} {}", name.as_str()),
            _ => f.write_str(c),
        }
    }
}

impl FromStr for VertexRole {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let t: Vec<&str> = s.split_whitespace().collect();
        let half = |k: usize| -> std::result::Result<Half, String> {
            match t.get(k).copied() {
                Some("A") => Ok(Half::A),
                Some("B") => Ok(Half::B),
                other => Err(format!("expected A or B, got {other:?}")),
            }
        };
        let num = |k: usize| -> std::result::Result<u32, String> {
            t.get(k).ok_or("missing number")?.parse::<u32>().map_err(|e| e.to_string())
        };
        let arity = |n: usize| -> std::result::Result<(), String> {
            if t.len() == n {
                Ok(())
            } else {
                Err(format!("`{s}`: expected {n} fields"))
            }
        };
        let head = *t.first().ok_or("empty role")?;
        let role = match head {
            "input" | "next" | "val" | "t" => {
                arity(3)?;
                let (h, b) = (half(1)?, num(2)?);
                match head {
                    "input" => VertexRole::Input { half: h, bit: b },
                    "next" => VertexRole::NextOut { half: h, bit: b },
                    "val" => VertexRole::ValOut { half: h, bit: b },
                    _ => VertexRole::T { half: h, bit: b },
                }
            }
            "control" => {
                arity(2)?;
                VertexRole::Control(half(1)?)
            }
            "notcontrol" => {
                arity(2)?;
                VertexRole::NotControl(half(1)?)
            }
            "nor" => {
                arity(4)?;
                VertexRole::NorInternal { half: half(1)?, gate: num(2)?, name: t[3].parse()? }
            }
            "lev" => {
                arity(4)?;
                let name = t[3].parse::<u8>().map_err(|e| e.to_string())?;
                VertexRole::LeverageInternal { chain: num(1)?, step: num(2)?, name }
            }
            "eq" => {
                arity(4)?;
                VertexRole::EqualityInternal { half: half(1)?, bit: num(2)?, name: t[3].parse()? }
            }
            "copy" => {
                arity(4)?;
                VertexRole::CopyInternal { half: half(1)?, bit: num(2)?, name: t[3].parse()? }
            }
            "flag" | "super1" | "super0" | "cmp" | "aux" => {
                arity(1)?;
                match head {
                    "flag" => VertexRole::Flag,
                    "super1" => VertexRole::SuperOne,
                    "super0" => VertexRole::SuperZero,
                    "cmp" => VertexRole::ComparatorInternal,
                    _ => VertexRole::Aux,
                }
            }
            other => return Err(format!("unknown role `{other}`")),
        };
        Ok(role)
    }
}

/// The scale parameter `N` and the exponent bookkeeping that goes with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightScale {
    pub n: u32,
}

impl WeightScale {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("scale N must be positive".into()));
        }
        Ok(Self { n })
    }

    /// Exponent of the global integralizing factor, `500N`.
    pub fn multiplier_exp(&self) -> i64 {
        500 * self.n as i64
    }

    /// Integralized exponent of the nominal weight `2^{kN}`.
    pub fn exp(&self, k: i64) -> i64 {
        (k + 500) * self.n as i64
    }

    /// Integralized `2^{kN}`.
    pub fn e(&self, k: i64) -> Pow2Sum {
        Pow2Sum::pow2(self.exp(k))
    }

    /// Integralized `2^{sN}·(2^{N+i} + delta)`, the gate-scaled weights.
    pub fn gate(&self, s: i64, i: u32, delta: i64) -> Pow2Sum {
        let base = self.exp(s);
        Pow2Sum::from_terms(vec![(base + self.n as i64 + i as i64, 1), (base, delta)])
    }

    /// The leverage slack, `2^{-500N}` before scaling.
    pub fn eps(&self) -> Pow2Sum {
        self.e(-500)
    }

    /// Supervertex weight, `2^{1500N}` after scaling.
    pub fn supervertex(&self) -> Pow2Sum {
        self.e(1000)
    }
}

/// Weights of a leverage chain from `A` to `B` with parameter `x`.
///
/// Block `k` (1-based, `k = 1..=x+1`) has an input pair of weight
/// `w_B/2^{x+2-k} + ε` and an output pair of weight `w_A/2^k + ε`.
pub fn leverage_weights(wa: &Pow2Sum, wb: &Pow2Sum, x: u32, eps: &Pow2Sum) -> Vec<(Pow2Sum, Pow2Sum)> {
    (1..=x as i64 + 1)
        .map(|k| (&wb.shl(-(x as i64 + 2 - k)) + eps, &wa.shl(-k) + eps))
        .collect()
}

/// A stand-alone leverage gadget: vertex 0 is `A`, vertex 1 is `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeverageGadget {
    pub weights: Vec<Pow2Sum>,
    pub edges: Vec<(usize, usize)>,
    pub x: u32,
}

impl LeverageGadget {
    /// Vertex id of `L_{k,j}` (block `k` and position `j` both 1-based).
    pub fn vertex(&self, k: u32, j: u32) -> usize {
        2 + 4 * (k as usize - 1) + (j as usize - 1)
    }
}

/// Chain of `x+1` four-vertex blocks between `A` and `B`.
pub fn build_leverage(wa: &Pow2Sum, wb: &Pow2Sum, x: u32, eps: &Pow2Sum) -> Result<LeverageGadget> {
    if wa.signum() <= 0 || wb.signum() <= 0 || eps.signum() <= 0 {
        return Err(Error::InvalidArgument("leverage weights must be positive".into()));
    }
    let mut weights = vec![wa.clone(), wb.clone()];
    let mut edges = Vec::new();
    let blocks = leverage_weights(wa, wb, x, eps);
    for (p, q) in &blocks {
        weights.extend([p.clone(), p.clone(), q.clone(), q.clone()]);
    }
    let g = LeverageGadget { weights, edges: Vec::new(), x };
    for k in 1..=x + 1 {
        let (l1, l2, l3, l4) = (g.vertex(k, 1), g.vertex(k, 2), g.vertex(k, 3), g.vertex(k, 4));
        let prev: Vec<usize> = if k == 1 { vec![0] } else { vec![g.vertex(k - 1, 3), g.vertex(k - 1, 4)] };
        for u in prev {
            edges.push((u, l1));
            edges.push((u, l2));
        }
        for (a, b) in [(l1, l3), (l1, l4), (l2, l3), (l2, l4)] {
            edges.push((a, b));
        }
        if k == x + 1 {
            edges.push((l3, 1));
            edges.push((l4, 1));
        }
    }
    Ok(LeverageGadget { edges, ..g })
}

/// Where a leverage chain sits in a compiled instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeverageSite {
    pub a: u32,
    pub b: u32,
    pub x: u32,
    /// First internal vertex; block `k` occupies `first + 4(k-1) ..+4`.
    pub first: u32,
}

/// Vertex ids of one NOR gadget, indexed by [`NorName`].
pub type NorVertices = [u32; 19];

/// Vertex ids of one half.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HalfLayout {
    pub inputs: Vec<u32>,
    /// Gate number `i` is at position `i - 1`.
    pub gates: Vec<NorVertices>,
    pub control: u32,
    pub not_control: u32,
    pub t: Vec<u32>,
    pub eta: Vec<u32>,
    pub f: Vec<u32>,
    /// Equality bits comparing this half's inputs, indexed by [`EqName`].
    pub eq: Vec<[u32; 6]>,
}

/// Vertex ids needed by the solution map and the checkers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Layout {
    pub a: HalfLayout,
    pub b: HalfLayout,
    pub flag: u32,
    pub super_one: u32,
    pub super_zero: u32,
    pub leverages: Vec<LeverageSite>,
    /// Constant-value vertices and their values.
    pub constants: Vec<(u32, u8)>,
}

impl Layout {
    pub fn half(&self, h: Half) -> &HalfLayout {
        match h {
            Half::A => &self.a,
            Half::B => &self.b,
        }
    }
}

/// Solution map: which vertices to read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfMap {
    pub flag: usize,
    pub super_one: usize,
    pub inputs_a: Vec<usize>,
    pub inputs_b: Vec<usize>,
}

impl CfMap {
    /// Recovers the map from a roles listing.
    pub fn from_roles(roles: &[VertexRole]) -> Result<Self> {
        let mut flag = None;
        let mut super_one = None;
        let mut ia: Vec<(u32, usize)> = Vec::new();
        let mut ib: Vec<(u32, usize)> = Vec::new();
        for (v, r) in roles.iter().enumerate() {
            match r {
                VertexRole::Flag => flag = Some(v),
                VertexRole::SuperOne => super_one = Some(v),
                VertexRole::Input { half: Half::A, bit } => ia.push((*bit, v)),
                VertexRole::Input { half: Half::B, bit } => ib.push((*bit, v)),
                _ => {}
            }
        }
        ia.sort_unstable();
        ib.sort_unstable();
        let missing = |w: &str| Error::InvalidInstance(format!("roles lack a {w} vertex"));
        if ia.len() != ib.len() || ia.iter().enumerate().any(|(k, (b, _))| *b as usize != k) {
            return Err(Error::InvalidInstance("input roles are not two complete blocks".into()));
        }
        Ok(Self {
            flag: flag.ok_or_else(|| missing("flag"))?,
            super_one: super_one.ok_or_else(|| missing("super1"))?,
            inputs_a: ia.into_iter().map(|x| x.1).collect(),
            inputs_b: ib.into_iter().map(|x| x.1).collect(),
        })
    }
}

/// Reads `Flag` relative to `SuperOne`, then the input block it selects.
pub fn map_back_cf(sm: &CfMap, cut: &Cut) -> Result<BitString> {
    let need = sm.inputs_a.iter().chain(&sm.inputs_b).chain([&sm.flag, &sm.super_one]).max().copied().unwrap_or(0);
    if cut.len() <= need {
        return Err(Error::DimensionError { expected: need + 1, got: cut.len() });
    }
    let one = cut.side(sm.super_one);
    let block = if cut.side(sm.flag) == one { &sm.inputs_b } else { &sm.inputs_a };
    Ok(block.iter().map(|&v| u8::from(cut.side(v) == one)).collect())
}

/// A compiled instance in compact form.
#[derive(Clone, Debug)]
pub struct CfInstance {
    pub scale: WeightScale,
    /// Distinct weights; `weight_id[v]` indexes this table.
    pub weight_table: Vec<Pow2Sum>,
    pub weight_id: Vec<u32>,
    pub roles: Vec<VertexRole>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    pub layout: Layout,
    /// Augmented circuits evaluated by the two halves.
    pub circuit_a: crate::circuit::Circuit,
    pub circuit_b: crate::circuit::Circuit,
}

impl CfInstance {
    pub fn num_vertices(&self) -> usize {
        self.roles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn weight(&self, v: usize) -> &Pow2Sum {
        &self.weight_table[self.weight_id[v] as usize]
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edges `u < v`, in adjacency order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices())
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| (v as usize) > u).map(move |&v| (u, v as usize)))
    }

    pub fn map(&self) -> CfMap {
        CfMap {
            flag: self.layout.flag as usize,
            super_one: self.layout.super_one as usize,
            inputs_a: self.layout.a.inputs.iter().map(|&v| v as usize).collect(),
            inputs_b: self.layout.b.inputs.iter().map(|&v| v as usize).collect(),
        }
    }

    /// Total bits of the expanded weights, an estimate of the expanded size.
    pub fn expanded_bits(&self) -> u128 {
        self.weight_id.iter().map(|&k| self.weight_table[k as usize].bits().max(1) as u128).sum()
    }

    /// Expands to an ordinary vertex-weighted graph when that stays below `max_bits`.
    pub fn to_graph(&self, max_bits: u128) -> Result<crate::games_core::VertexWeightedGraph> {
        let bits = self.expanded_bits();
        if bits > max_bits {
            return Err(Error::TooLarge(format!("expanded weights need {bits} bits, cap {max_bits}")));
        }
        let table: Vec<crate::weight::Weight> = self.weight_table.iter().map(|w| w.to_weight()).collect();
        let weights = self.weight_id.iter().map(|&k| table[k as usize].clone()).collect();
        crate::games_core::VertexWeightedGraph::new(weights, self.edges().collect())
    }
}

/// Incremental construction shared by the full compiler and the isolated
/// gadget instances used by the lemma checks.
pub(crate) struct Builder {
    pub scale: WeightScale,
    table: Vec<Pow2Sum>,
    intern: HashMap<Pow2Sum, u32>,
    pub weight_id: Vec<u32>,
    pub roles: Vec<VertexRole>,
    pub edges: Vec<(u32, u32)>,
    /// `Some((one, zero))` when constants hang off supervertices;
    /// `None` for isolated gadgets, where constants are pinned instead.
    pub supers: Option<(u32, u32)>,
    pub constants: Vec<(u32, u8)>,
    pub leverages: Vec<LeverageSite>,
}

impl Builder {
    pub fn new(scale: WeightScale, with_supers: bool) -> Self {
        let mut b = Self {
            scale,
            table: Vec::new(),
            intern: HashMap::new(),
            weight_id: Vec::new(),
            roles: Vec::new(),
            edges: Vec::new(),
            supers: None,
            constants: Vec::new(),
            leverages: Vec::new(),
        };
        if with_supers {
            let w = scale.supervertex();
            let one = b.vertex(w.clone(), VertexRole::SuperOne);
            let zero = b.vertex(w, VertexRole::SuperZero);
            b.edge(one, zero);
            b.supers = Some((one, zero));
        }
        b
    }

    pub fn vertex(&mut self, w: Pow2Sum, role: VertexRole) -> u32 {
        let id = match self.intern.get(&w) {
            Some(&k) => k,
            None => {
                let k = self.table.len() as u32;
                self.intern.insert(w.clone(), k);
                self.table.push(w);
                k
            }
        };
        self.weight_id.push(id);
        self.roles.push(role);
        (self.roles.len() - 1) as u32
    }

    pub fn weight(&self, v: u32) -> &Pow2Sum {
        &self.table[self.weight_id[v as usize] as usize]
    }

    pub fn edge(&mut self, a: u32, b: u32) {
        debug_assert_ne!(a, b);
        self.edges.push((a.min(b), a.max(b)));
    }

    /// A vertex of weight `w` held at `val`, adjacent to `target`.
    pub fn constant(&mut self, val: u8, w: Pow2Sum, target: u32, role: VertexRole) -> u32 {
        let k = self.vertex(w, role);
        if let Some((one, zero)) = self.supers {
            self.edge(k, if val == 1 { zero } else { one });
        }
        self.edge(k, target);
        self.constants.push((k, val));
        k
    }

    /// Tiny vertex meant to pass the controller's value to `target`.
    pub fn aux_bias(&mut self, controller: u32, target: u32) -> u32 {
        let h = self.vertex(self.scale.e(-200), VertexRole::Aux);
        self.edge(h, controller);
        self.edge(h, target);
        h
    }

    /// Leverage chain from `a` to `b` with parameter `x`.
    pub fn leverage(&mut self, a: u32, b: u32, x: u32) -> LeverageSite {
        let chain = self.leverages.len() as u32;
        let blocks = leverage_weights(&self.weight(a).clone(), &self.weight(b).clone(), x, &self.scale.eps());
        let first = self.roles.len() as u32;
        let mut prev = vec![a];
        for (k, (p, q)) in blocks.into_iter().enumerate() {
            let role = |name| VertexRole::LeverageInternal { chain, step: k as u32 + 1, name };
            let l1 = self.vertex(p.clone(), role(1));
            let l2 = self.vertex(p, role(2));
            let l3 = self.vertex(q.clone(), role(3));
            let l4 = self.vertex(q, role(4));
            for &u in &prev {
                self.edge(u, l1);
                self.edge(u, l2);
            }
            for (s, t) in [(l1, l3), (l1, l4), (l2, l3), (l2, l4)] {
                self.edge(s, t);
            }
            prev = vec![l3, l4];
        }
        for &u in &prev {
            self.edge(u, b);
        }
        let site = LeverageSite { a, b, x, first };
        self.leverages.push(site);
        site
    }

    /// Sorted, duplicate-checked adjacency in CSR form.
    pub fn finish_adjacency(&mut self) -> Result<(Vec<usize>, Vec<u32>)> {
        self.edges.sort_unstable();
        if let Some(w) = self.edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidInstance(format!("duplicate edge {:?}", w[0])));
        }
        let n = self.roles.len();
        let mut deg = vec![0usize; n + 1];
        for &(a, b) in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        for &(a, b) in &self.edges {
            targets[fill[a as usize]] = b;
            fill[a as usize] += 1;
            targets[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        Ok((offsets, targets))
    }

    pub fn into_table(self) -> Vec<Pow2Sum> {
        self.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn role_round_trip() {
        let roles = [
            VertexRole::Input { half: Half::A, bit: 3 },
            VertexRole::NextOut { half: Half::B, bit: 0 },
            VertexRole::ValOut { half: Half::A, bit: 1 },
            VertexRole::T { half: Half::B, bit: 2 },
            VertexRole::Control(Half::A),
            VertexRole::NotControl(Half::B),
            VertexRole::Flag,
            VertexRole::SuperOne,
            VertexRole::SuperZero,
            VertexRole::NorInternal { half: Half::B, gate: 7, name: NorName::Rho },
            VertexRole::LeverageInternal { chain: 12, step: 3, name: 4 },
            VertexRole::EqualityInternal { half: Half::A, bit: 0, name: EqName::R },
            VertexRole::CopyInternal { half: Half::B, bit: 1, name: CopyName::Eta },
            VertexRole::ComparatorInternal,
            VertexRole::Aux,
        ];
        for r in roles {
            assert_eq!(r.to_string().parse::<VertexRole>().unwrap(), r);
        }
        assert!("nor A x b1".parse::<VertexRole>().is_err());
        assert!("flag 1".parse::<VertexRole>().is_err());
    }

    #[test]
    fn leverage_shape_and_weights() {
        let eps = Pow2Sum::from_int(1);
        let g = build_leverage(&Pow2Sum::from_int(64), &Pow2Sum::from_int(1024), 2, &eps).unwrap();
        assert_eq!(g.weights.len(), 2 + 12);
        // first pair w_B/2^{x+1}+ε, last output pair w_A/2^{x+1}+ε
        assert_eq!(g.weights[g.vertex(1, 1)], Pow2Sum::from_int(1024 / 8 + 1));
        assert_eq!(g.weights[g.vertex(3, 3)], Pow2Sum::from_int(64 / 8 + 1));
        assert_eq!(g.edges.len(), 2 + 4 * 3 + 4 * 2 + 2);
        let one = build_leverage(&Pow2Sum::from_int(8), &Pow2Sum::from_int(8), 0, &eps).unwrap();
        assert_eq!(one.weights.len(), 6);
        assert!(build_leverage(&Pow2Sum::zero(), &eps, 0, &eps).is_err());
    }

    #[test]
    fn scale_exponents() {
        let s = WeightScale::new(3).unwrap();
        assert_eq!(s.exp(-500), 0);
        assert_eq!(s.supervertex(), Pow2Sum::pow2(4500));
        assert_eq!(s.gate(100, 2, -50).to_weight(), s.e(100).to_weight() * crate::weight::int(32 - 50));
        assert!(WeightScale::new(0).is_err());
    }
}
