//! Cut games on edge-weighted (Max-Cut) and vertex-weighted (Node-Max-Cut) graphs.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::weight::{ensure_positive, Weight};

fn check_simple(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (u, v) in edges {
        if u >= n || v >= n {
            return Err(Error::InvalidInstance(format!("edge {{{u},{v}}} references a vertex outside 0..{n}")));
        }
        if u == v {
            return Err(Error::InvalidInstance(format!("self-loop at {u}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::InvalidInstance(format!("duplicate edge {{{u},{v}}}")));
        }
    }
    Ok(())
}

/// Max-Cut instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeWeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, Weight)>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl EdgeWeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, Weight)>) -> Result<Self> {
        check_simple(n, edges.iter().map(|e| (e.0, e.1)))?;
        for (_, _, w) in &edges {
            ensure_positive(w, "edge weight")?;
        }
        let mut adj = vec![Vec::new(); n];
        for (k, (u, v, _)) in edges.iter().enumerate() {
            adj[*u].push((*v, k));
            adj[*v].push((*u, k));
        }
        Ok(Self { n, edges, adj })
    }

    pub fn edges(&self) -> &[(usize, usize, Weight)] {
        &self.edges
    }

    /// Weight of edge {u,v}, if present.
    pub fn weight(&self, u: usize, v: usize) -> Option<&Weight> {
        self.adj.get(u)?.iter().find(|(x, _)| *x == v).map(|(_, k)| &self.edges[*k].2)
    }
}

/// Node-Max-Cut instance: an edge weighs the product of its endpoint weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexWeightedGraph {
    weights: Vec<Weight>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl VertexWeightedGraph {
    pub fn new(weights: Vec<Weight>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = weights.len();
        check_simple(n, edges.iter().copied())?;
        for w in &weights {
            ensure_positive(w, "vertex weight")?;
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Self { weights, edges, adj })
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> &Weight {
        &self.weights[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Same graph with different vertex weights.
    pub fn with_weights(&self, weights: Vec<Weight>) -> Result<Self> {
        if weights.len() != self.weights.len() {
            return Err(Error::DimensionError { expected: self.weights.len(), got: weights.len() });
        }
        for w in &weights {
            ensure_positive(w, "vertex weight")?;
        }
        Ok(Self { weights, edges: self.edges.clone(), adj: self.adj.clone() })
    }

    /// The Max-Cut instance with product edge weights.
    pub fn to_edge_weighted(&self) -> EdgeWeightedGraph {
        let edges = self.edges.iter().map(|&(u, v)| (u, v, &self.weights[u] * &self.weights[v])).collect();
        EdgeWeightedGraph::new(self.weights.len(), edges).expect("product weights of a valid graph are valid")
    }
}

/// Common view of both graph kinds as a weighted cut game.
pub trait CutGraph {
    fn num_vertices(&self) -> usize;
    fn num_edges(&self) -> usize;
    /// `(neighbor, edge weight)` pairs around `v`.
    fn incident(&self, v: usize) -> Box<dyn Iterator<Item = (usize, Weight)> + '_>;
    /// `(u, v, edge weight)` for every edge.
    fn weighted_edges(&self) -> Box<dyn Iterator<Item = (usize, usize, Weight)> + '_>;
}

impl CutGraph for EdgeWeightedGraph {
    fn num_vertices(&self) -> usize {
        self.n
    }
    fn num_edges(&self) -> usize {
        self.edges.len()
    }
    fn incident(&self, v: usize) -> Box<dyn Iterator<Item = (usize, Weight)> + '_> {
        Box::new(self.adj[v].iter().map(move |&(u, k)| (u, self.edges[k].2.clone())))
    }
    fn weighted_edges(&self) -> Box<dyn Iterator<Item = (usize, usize, Weight)> + '_> {
        Box::new(self.edges.iter().cloned())
    }
}

impl CutGraph for VertexWeightedGraph {
    fn num_vertices(&self) -> usize {
        self.weights.len()
    }
    fn num_edges(&self) -> usize {
        self.edges.len()
    }
    fn incident(&self, v: usize) -> Box<dyn Iterator<Item = (usize, Weight)> + '_> {
        let wv = &self.weights[v];
        Box::new(self.adj[v].iter().map(move |&u| (u, wv * &self.weights[u])))
    }
    fn weighted_edges(&self) -> Box<dyn Iterator<Item = (usize, usize, Weight)> + '_> {
        Box::new(self.edges.iter().map(move |&(u, v)| (u, v, &self.weights[u] * &self.weights[v])))
    }
}

/// Two-sided vertex assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    sides: Vec<u8>,
}

impl Cut {
    pub fn new(sides: Vec<u8>) -> Result<Self> {
        if let Some(bad) = sides.iter().find(|&&s| s > 1) {
            return Err(Error::InvalidArgument(format!("side label {bad} is not 0 or 1")));
        }
        Ok(Self { sides })
    }

    pub fn zeros(n: usize) -> Self {
        Self { sides: vec![0; n] }
    }

    /// Bit `v` of `mask` gives the side of vertex `v`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self { sides: (0..n).map(|v| ((mask >> v) & 1) as u8).collect() }
    }

    /// Cut with side 1 exactly on `set`.
    pub fn from_set(n: usize, set: &[usize]) -> Self {
        let mut c = Self::zeros(n);
        for &v in set {
            c.sides[v] = 1;
        }
        c
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn side(&self, v: usize) -> u8 {
        self.sides[v]
    }

    pub fn set_side(&mut self, v: usize, s: u8) {
        self.sides[v] = s & 1;
    }

    pub fn sides(&self) -> &[u8] {
        &self.sides
    }

    pub fn flip(&mut self, v: usize) {
        self.sides[v] ^= 1;
    }

    pub fn flipped(&self, v: usize) -> Self {
        let mut c = self.clone();
        c.flip(v);
        c
    }

    pub fn complement(&self) -> Self {
        Self { sides: self.sides.iter().map(|s| s ^ 1).collect() }
    }

    /// Complement-normalized form with vertex 0 on side 0.
    pub fn canonical(&self) -> Self {
        if self.sides.first() == Some(&1) {
            self.complement()
        } else {
            self.clone()
        }
    }

    /// Vertices on side 1.
    pub fn side_one(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.sides[v] == 1).collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let sides = s
            .trim()
            .chars()
            .enumerate()
            .map(|(i, ch)| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse { line: 1, col: i + 1, msg: format!("unexpected `{ch}` in cut") }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { sides })
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sides {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

fn check_len<G: CutGraph + ?Sized>(g: &G, c: &Cut) -> Result<()> {
    if c.len() != g.num_vertices() {
        Err(Error::DimensionError { expected: g.num_vertices(), got: c.len() })
    } else {
        Ok(())
    }
}

/// `w_u · w_v` for an edge of a Node-Max-Cut instance.
pub fn nmc_edge_weight(g: &VertexWeightedGraph, u: usize, v: usize) -> Result<Weight> {
    if u < g.num_vertices() && g.neighbors(u).contains(&v) {
        Ok(g.weight(u) * g.weight(v))
    } else {
        Err(Error::NotAnEdge(u, v))
    }
}

/// Total weight of edges crossing the cut.
pub fn cut_value<G: CutGraph + ?Sized>(g: &G, c: &Cut) -> Result<Weight> {
    check_len(g, c)?;
    Ok(g.weighted_edges().filter(|(u, v, _)| c.side(*u) != c.side(*v)).map(|e| e.2).sum())
}

/// Sum of all edge weights.
pub fn total_edge_weight<G: CutGraph + ?Sized>(g: &G) -> Weight {
    g.weighted_edges().map(|e| e.2).sum()
}

/// Change of the cut value when `v` switches side.
pub fn flip_gain<G: CutGraph + ?Sized>(g: &G, c: &Cut, v: usize) -> Weight {
    let mut gain = Weight::zero();
    for (u, w) in g.incident(v) {
        if c.side(u) == c.side(v) {
            gain += w;
        } else {
            gain -= w;
        }
    }
    gain
}

/// No single flip increases the cut value.
pub fn is_local_optimum<G: CutGraph + ?Sized>(g: &G, c: &Cut) -> Result<bool> {
    check_len(g, c)?;
    Ok((0..g.num_vertices()).all(|v| !flip_gain(g, c, v).is_positive()))
}

/// `(same-side, opposite-side)` neighbor weight sums of `v`.
pub fn side_sums(g: &VertexWeightedGraph, c: &Cut, v: usize) -> (Weight, Weight) {
    let mut same = Weight::zero();
    let mut opp = Weight::zero();
    for &u in g.neighbors(v) {
        if c.side(u) == c.side(v) {
            same += g.weight(u);
        } else {
            opp += g.weight(u);
        }
    }
    (same, opp)
}

/// Every vertex has same-side neighbor weight at most `(1+eps)` times its opposite-side weight.
pub fn is_approx_equilibrium_nmc(g: &VertexWeightedGraph, c: &Cut, eps: &Weight) -> Result<bool> {
    if eps.is_negative() {
        return Err(Error::InvalidArgument("eps must be nonnegative".into()));
    }
    check_len(g, c)?;
    let factor = Weight::one() + eps;
    Ok((0..g.num_vertices()).all(|v| {
        let (same, opp) = side_sums(g, c, v);
        same <= &factor * opp
    }))
}

/// `|Σ side-1 − Σ side-0|` over neighbors of `i` inside `subset`.
pub fn bias(g: &VertexWeightedGraph, c: &Cut, i: usize, subset: &[usize]) -> Weight {
    let mut d = Weight::zero();
    for &j in g.neighbors(i) {
        if subset.contains(&j) {
            if c.side(j) == 1 {
                d += g.weight(j);
            } else {
                d -= g.weight(j);
            }
        }
    }
    d.abs()
}

/// Sum of `w_u·w_v` over edges with both endpoints on the same side.
pub fn nmc_potential(g: &VertexWeightedGraph, c: &Cut) -> Result<Weight> {
    check_len(g, c)?;
    Ok(g.edges().iter().filter(|(u, v)| c.side(*u) == c.side(*v)).map(|&(u, v)| g.weight(u) * g.weight(v)).sum())
}

/// Order in which improving flips are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipRule {
    /// Lowest-index improving vertex.
    First,
    /// Largest gain, lowest index among ties.
    MaxGain,
    /// Uniform among improving vertices.
    Random,
}

/// Incremental local-search state for the flip neighborhood.
///
/// Edge weights are scaled to integers by their common denominator; gains
/// keep their sign, so the improving set is unchanged.
#[derive(Clone, Debug)]
pub struct FlipEngine {
    adj: Vec<Vec<(usize, BigInt)>>,
    cut: Cut,
    gain: Vec<BigInt>,
    by_gain: BTreeSet<(BigInt, std::cmp::Reverse<usize>)>,
    improving: Vec<usize>,
    pos: Vec<usize>,
    flips: u64,
}

const ABSENT: usize = usize::MAX;

impl FlipEngine {
    pub fn new<G: CutGraph + ?Sized>(g: &G, start: Cut) -> Result<Self> {
        check_len(g, &start)?;
        let n = g.num_vertices();
        let mut den = BigInt::one();
        for (_, _, w) in g.weighted_edges() {
            den = den.lcm(w.denom());
        }
        let mut adj = vec![Vec::new(); n];
        for (u, v, w) in g.weighted_edges() {
            let iw = (w.numer() * &den) / w.denom();
            adj[u].push((v, iw.clone()));
            adj[v].push((u, iw));
        }
        let mut e = Self {
            adj,
            cut: start,
            gain: vec![BigInt::zero(); n],
            by_gain: BTreeSet::new(),
            improving: Vec::new(),
            pos: vec![ABSENT; n],
            flips: 0,
        };
        for v in 0..n {
            let mut s = BigInt::zero();
            for (u, w) in &e.adj[v] {
                if e.cut.side(*u) == e.cut.side(v) {
                    s += w;
                } else {
                    s -= w;
                }
            }
            e.set_gain(v, s);
        }
        Ok(e)
    }

    fn set_gain(&mut self, v: usize, new: BigInt) {
        let old = std::mem::replace(&mut self.gain[v], new);
        if old.is_positive() {
            self.by_gain.remove(&(old, std::cmp::Reverse(v)));
        }
        let now = self.gain[v].is_positive();
        if now {
            self.by_gain.insert((self.gain[v].clone(), std::cmp::Reverse(v)));
            if self.pos[v] == ABSENT {
                self.pos[v] = self.improving.len();
                self.improving.push(v);
            }
        } else if self.pos[v] != ABSENT {
            let p = self.pos[v];
            self.improving.swap_remove(p);
            if p < self.improving.len() {
                let moved = self.improving[p];
                self.pos[moved] = p;
            }
            self.pos[v] = ABSENT;
        }
    }

    pub fn cut(&self) -> &Cut {
        &self.cut
    }

    pub fn into_cut(self) -> Cut {
        self.cut
    }

    pub fn flips(&self) -> u64 {
        self.flips
    }

    /// Scaled gain of flipping `v`.
    pub fn gain(&self, v: usize) -> &BigInt {
        &self.gain[v]
    }

    pub fn is_local_optimum(&self) -> bool {
        self.improving.is_empty()
    }

    pub fn flip(&mut self, v: usize) {
        let sv = self.cut.side(v);
        let nbrs = std::mem::take(&mut self.adj[v]);
        for (u, w) in &nbrs {
            let delta: BigInt = w * 2;
            let g = if self.cut.side(*u) == sv { &self.gain[*u] - delta } else { &self.gain[*u] + delta };
            self.set_gain(*u, g);
        }
        self.adj[v] = nbrs;
        let g = -self.gain[v].clone();
        self.set_gain(v, g);
        self.cut.flip(v);
        self.flips += 1;
    }

    /// Picks an improving vertex, or `None` at a local optimum.
    pub fn pick<R: Rng + ?Sized>(&self, rule: FlipRule, rng: &mut R) -> Option<usize> {
        match rule {
            FlipRule::First => self.improving.iter().copied().min(),
            FlipRule::MaxGain => self.by_gain.iter().next_back().map(|(_, r)| r.0),
            FlipRule::Random => {
                if self.improving.is_empty() {
                    None
                } else {
                    Some(self.improving[rng.gen_range(0..self.improving.len())])
                }
            }
        }
    }

    /// Flips until a local optimum or `max_flips`; returns whether it converged.
    pub fn run<R: Rng + ?Sized>(&mut self, rule: FlipRule, max_flips: u64, rng: &mut R) -> bool {
        let mut done = 0;
        while let Some(v) = self.pick(rule, rng) {
            if done >= max_flips {
                return false;
            }
            self.flip(v);
            done += 1;
        }
        true
    }
}
