//! BridgeGaps: `(1+ε)³`-approximate equilibria for Node-Max-Cut.
//!
//! Weights are rounded down to powers of `1+ε`, normalized so the smallest
//! is 1, split into groups at ratio gaps larger than `⌈n/ε⌉`, and the gaps
//! are shrunk to exactly `⌈n/ε⌉`. ε-best-response flips on the bridged
//! weights then run in pseudo-polynomial time.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::games_core::{is_approx_equilibrium_nmc, Cut, VertexWeightedGraph};
use crate::weight::{ceil_int, floor_log, powi, Weight};

/// Weights rounded down to powers of `1+ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundedInstance {
    pub eps: Weight,
    /// `w'_i = (1+ε)^{exponents[i]}` before normalization.
    pub exponents: Vec<i64>,
    /// Smallest exponent; normalized weights are `(1+ε)^{k_i - min_exponent}`.
    pub min_exponent: i64,
    /// Number of distinct rounded weights.
    pub d_eps: usize,
}

impl RoundedInstance {
    pub fn base(&self) -> Weight {
        Weight::one() + &self.eps
    }

    /// Rounded weight of vertex `i` on the original scale.
    pub fn rounded(&self, i: usize) -> Weight {
        powi(&self.base(), self.exponents[i])
    }

    /// Rounded weight of vertex `i` after dividing by the smallest one.
    pub fn normalized(&self, i: usize) -> Weight {
        powi(&self.base(), self.exponents[i] - self.min_exponent)
    }

    /// The divisor applied by normalization.
    pub fn normalizer(&self) -> Weight {
        powi(&self.base(), self.min_exponent)
    }
}

/// Groups of consecutive sorted weights and their bridged values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupedInstance {
    /// Gap threshold `⌈n/ε⌉` (or `⌈Δ/ε⌉`).
    pub threshold: BigInt,
    /// Vertex ids, lightest group first; each group sorted by weight.
    pub groups: Vec<Vec<usize>>,
    /// Normalized rounded weight per vertex.
    pub normalized: Vec<Weight>,
    /// `d_j` for each seam between groups `j` and `j+1`.
    pub divisors: Vec<Weight>,
    /// Bridged weight `w''` per vertex.
    pub bridged: Vec<Weight>,
}

impl GroupedInstance {
    /// Group index per vertex.
    pub fn group_of(&self) -> Vec<usize> {
        let mut g = vec![0; self.normalized.len()];
        for (j, grp) in self.groups.iter().enumerate() {
            for &v in grp {
                g[v] = j;
            }
        }
        g
    }
}

/// Rounds every weight to the largest power of `1+ε` not above it.
pub fn round_weights(g: &VertexWeightedGraph, eps: &Weight) -> Result<RoundedInstance> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let base = Weight::one() + eps;
    let exponents: Vec<i64> = g.weights().iter().map(|w| floor_log(&base, w)).collect();
    let min_exponent = exponents.iter().copied().min().unwrap_or(0);
    let d_eps = exponents.iter().collect::<BTreeSet<_>>().len();
    Ok(RoundedInstance { eps: eps.clone(), exponents, min_exponent, d_eps })
}

/// `⌈x/ε⌉` for a count `x`.
pub fn gap_threshold(x: usize, eps: &Weight) -> BigInt {
    ceil_int(&(Weight::from_integer(BigInt::from(x)) / eps))
}

/// Greedy grouping with threshold `⌈n/ε⌉`.
pub fn group_weights(r: &RoundedInstance) -> GroupedInstance {
    group_weights_with(r, &gap_threshold(r.exponents.len(), &r.eps))
}

/// Greedy grouping: sorted neighbors share a group iff their ratio is at most `threshold`.
pub fn group_weights_with(r: &RoundedInstance, threshold: &BigInt) -> GroupedInstance {
    let n = r.exponents.len();
    let normalized: Vec<Weight> = (0..n).map(|i| r.normalized(i)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| r.exponents[a].cmp(&r.exponents[b]).then(a.cmp(&b)));
    let t = Weight::from_integer(threshold.clone());
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &v) in order.iter().enumerate() {
        if k > 0 && normalized[v].clone() / &normalized[order[k - 1]] <= t {
            groups.last_mut().unwrap().push(v);
        } else {
            groups.push(vec![v]);
        }
    }
    let mut gi = GroupedInstance {
        threshold: threshold.clone(),
        groups,
        normalized,
        divisors: Vec::new(),
        bridged: Vec::new(),
    };
    let (d, b) = bridge_gaps(&gi);
    gi.divisors = d;
    gi.bridged = b;
    gi
}

/// Divisors `d_j` and bridged weights; every seam ratio becomes the threshold.
pub fn bridge_gaps(gr: &GroupedInstance) -> (Vec<Weight>, Vec<Weight>) {
    let t = Weight::from_integer(gr.threshold.clone());
    let mut bridged = gr.normalized.clone();
    let mut divisors = Vec::new();
    let mut cumulative = Weight::one();
    for j in 0..gr.groups.len() {
        if j > 0 {
            let max_prev = &gr.normalized[*gr.groups[j - 1].last().unwrap()];
            let min_here = &gr.normalized[gr.groups[j][0]];
            let d = min_here / max_prev / &t;
            cumulative *= &d;
            divisors.push(d);
        }
        for &v in &gr.groups[j] {
            bridged[v] = &gr.normalized[v] / &cumulative;
        }
    }
    (divisors, bridged)
}

/// Choice of the violating vertex to flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolatorRule {
    /// Lowest-index violating vertex.
    First,
    /// Largest potential decrease, lowest index on ties.
    MaxGain,
}

/// Options for [`bridgegaps_solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub rule: ViolatorRule,
    /// Use `⌈Δ/ε⌉` with the maximum degree instead of `⌈n/ε⌉`.
    pub delta_variant: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { rule: ViolatorRule::First, delta_variant: false }
    }
}

/// Outcome of a BridgeGaps run.
#[derive(Clone, Debug)]
pub struct Solution {
    pub cut: Cut,
    pub flips: u64,
    pub rounded: RoundedInstance,
    pub grouped: GroupedInstance,
    /// Decrease of the potential on bridged weights, per flip.
    pub drops: Vec<Weight>,
    /// `(m/ε)·T^{2D_ε}`.
    pub flip_bound: Weight,
    /// Output passes the `(1+ε)³` test on the original weights.
    pub verified: bool,
}

impl Solution {
    pub fn min_drop(&self) -> Option<&Weight> {
        self.drops.iter().min()
    }
}

/// Theoretical flip bound `(m/ε)·T^{2D_ε}`.
pub fn flip_bound(m: usize, eps: &Weight, threshold: &BigInt, d_eps: usize) -> Weight {
    let t = Weight::from_integer(threshold.clone());
    Weight::from_integer(BigInt::from(m)) / eps * powi(&t, 2 * d_eps as i64)
}

/// Runs BridgeGaps from `start`.
pub fn bridgegaps_solve(g: &VertexWeightedGraph, eps: &Weight, start: &Cut, opts: SolveOptions) -> Result<Solution> {
    let rounded = round_weights(g, eps)?;
    if start.len() != g.weights().len() {
        return Err(Error::DimensionError { expected: g.weights().len(), got: start.len() });
    }
    let n = g.weights().len();
    let param = if opts.delta_variant { g.max_degree().max(1) } else { n };
    let threshold = gap_threshold(param, eps);
    let grouped = group_weights_with(&rounded, &threshold);
    let w = &grouped.bridged;
    let factor = Weight::one() + eps;
    let mut cut = start.clone();
    let mut same = vec![Weight::zero(); n];
    let mut opp = vec![Weight::zero(); n];
    for &(u, v) in g.edges() {
        if cut.side(u) == cut.side(v) {
            same[u] += &w[v];
            same[v] += &w[u];
        } else {
            opp[u] += &w[v];
            opp[v] += &w[u];
        }
    }
    let violates = |i: usize, same: &[Weight], opp: &[Weight]| same[i] > &factor * &opp[i];
    let mut drops = Vec::new();
    loop {
        let pick = match opts.rule {
            ViolatorRule::First => (0..n).find(|&i| violates(i, &same, &opp)),
            ViolatorRule::MaxGain => {
                let mut best: Option<(usize, Weight)> = None;
                for i in (0..n).filter(|&i| violates(i, &same, &opp)) {
                    let d = &w[i] * (&same[i] - &opp[i]);
                    if best.as_ref().map_or(true, |(_, b)| &d > b) {
                        best = Some((i, d));
                    }
                }
                best.map(|b| b.0)
            }
        };
        let Some(i) = pick else { break };
        drops.push(&w[i] * (&same[i] - &opp[i]));
        for &u in g.neighbors(i) {
            if cut.side(u) == cut.side(i) {
                same[u] -= &w[i];
                opp[u] += &w[i];
            } else {
                opp[u] -= &w[i];
                same[u] += &w[i];
            }
        }
        std::mem::swap(&mut same[i], &mut opp[i]);
        cut.flip(i);
    }
    let cube = &factor * &factor * &factor - Weight::one();
    let verified = is_approx_equilibrium_nmc(g, &cut, &cube)?;
    let flip_bound = flip_bound(g.edges().len(), eps, &threshold, rounded.d_eps);
    Ok(Solution { cut, flips: drops.len() as u64, rounded, grouped, drops, flip_bound, verified })
}

/// Checks `n·w''_j ≤ ε·w''_i` whenever `j` sits in a lighter group than `i`.
pub fn cross_group_domination(gr: &GroupedInstance, count: usize, eps: &Weight) -> bool {
    let c = Weight::from_integer(BigInt::from(count));
    for a in 0..gr.groups.len() {
        for b in a + 1..gr.groups.len() {
            // heaviest of the lighter group against the lightest of the heavier one
            let light = gr.groups[a].iter().map(|&v| &gr.bridged[v]).max().unwrap();
            let heavy = gr.groups[b].iter().map(|&v| &gr.bridged[v]).min().unwrap();
            if &c * light > eps * heavy {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games_core::nmc_potential;
    use crate::weight::{int, ratio};

    fn vw(ws: &[i64], edges: &[(usize, usize)]) -> VertexWeightedGraph {
        VertexWeightedGraph::new(ws.iter().map(|&w| int(w)).collect(), edges.to_vec()).unwrap()
    }

    #[test]
    fn rounding() {
        let g = vw(&[8, 10, 1], &[]);
        let r = round_weights(&g, &int(1)).unwrap();
        assert_eq!(r.rounded(0), int(8));
        assert_eq!(r.rounded(1), int(8));
        assert_eq!(r.rounded(2), int(1));
        assert_eq!(r.d_eps, 2);
        for eps in [ratio(1, 10), ratio(1, 3), int(2)] {
            assert_eq!(round_weights(&vw(&[1], &[]), &eps).unwrap().rounded(0), int(1));
        }
        assert!(round_weights(&g, &int(0)).is_err());
    }

    #[test]
    fn grouping_and_bridging() {
        let g = vw(&[1, 2, 64], &[]);
        let r = round_weights(&g, &int(1)).unwrap();
        let gr = group_weights(&r);
        assert_eq!(gr.threshold, BigInt::from(3));
        assert_eq!(gr.groups, vec![vec![0, 1], vec![2]]);
        assert_eq!(gr.divisors, vec![ratio(32, 3)]);
        assert_eq!(gr.bridged, vec![int(1), int(2), int(6)]);
        assert!(gr.bridged.iter().all(|w| w <= &int(27)));
        let same = group_weights(&round_weights(&vw(&[4, 4, 4], &[]), &int(1)).unwrap());
        assert_eq!(same.groups.len(), 1);
        assert_eq!(same.bridged, vec![int(1); 3]);
        // ratio exactly at the threshold stays in one group: n=2, eps=1 gives 2
        let edge = group_weights(&round_weights(&vw(&[1, 2], &[]), &int(1)).unwrap());
        assert_eq!(edge.groups.len(), 1);
    }

    #[test]
    fn solve_small() {
        let k2 = vw(&[1, 1], &[(0, 1)]);
        let s = bridgegaps_solve(&k2, &ratio(1, 2), &Cut::zeros(2), SolveOptions::default()).unwrap();
        assert_eq!(s.flips, 1);
        assert_eq!(s.cut, Cut::from_set(2, &[0]));
        assert!(s.verified);
        let eq = bridgegaps_solve(&k2, &ratio(1, 2), &Cut::from_set(2, &[1]), SolveOptions::default()).unwrap();
        assert_eq!(eq.flips, 0);
    }

    #[test]
    fn drops_match_potential() {
        let g = vw(&[3, 1, 700, 2, 90, 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 2), (1, 4)]);
        let eps = ratio(1, 2);
        for rule in [ViolatorRule::First, ViolatorRule::MaxGain] {
            let s = bridgegaps_solve(&g, &eps, &Cut::zeros(6), SolveOptions { rule, delta_variant: false }).unwrap();
            assert!(s.verified);
            let bridged = g.with_weights(s.grouped.bridged.clone()).unwrap();
            let total: Weight = s.drops.iter().sum();
            let before = nmc_potential(&bridged, &Cut::zeros(6)).unwrap();
            let after = nmc_potential(&bridged, &s.cut).unwrap();
            assert_eq!(before - after, total);
            assert!(s.drops.iter().all(|d| d >= &eps));
            assert!(cross_group_domination(&s.grouped, 6, &eps));
        }
    }
}
