//! Max-Cut to single-commodity series-parallel congestion games.
//!
//! Vertex `k` (1-based) of the source graph becomes three players of weight
//! `16^k`. The network is two identical copies in parallel, each a series of
//! one block `F_ij` per source edge. In a block, every `k ∉ {i,j}` has a
//! direct edge `D·x/4^k`; `i` and `j` have edges `D·x/4^i`, `D·x/4^j` into a
//! middle vertex that continues with `w_ij·x/(16^i·16^j)`.

use std::collections::HashMap;

use crate::congestion::{sp_realize, CongestionGame, LinearLatency, Path, Player, Profile, SpTerm};
use crate::error::{Error, Result};
use crate::games_core::{Cut, CutGraph, EdgeWeightedGraph};
use crate::weight::{int, powi, Weight};

/// Data needed to map profiles back to cuts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mc2SpMap {
    pub n: usize,
    /// `p_k^u` per source vertex.
    pub upper: Vec<Path>,
    /// `p_k^l` per source vertex.
    pub lower: Vec<Path>,
    /// Source vertex of each player.
    pub class: Vec<usize>,
}

fn label(copy: char, block: usize, what: &str) -> String {
    format!("{copy}{block}:{what}")
}

/// The big constant `16^{n+1}·max w`.
pub fn big_d(h: &EdgeWeightedGraph) -> Weight {
    let n = h.num_vertices();
    let max = h.edges().iter().map(|e| e.2.clone()).max().unwrap_or_else(|| int(1));
    powi(&int(16), n as i64 + 1) * max
}

fn block(h: &EdgeWeightedGraph, copy: char, b: usize, d: &Weight) -> SpTerm {
    let n = h.num_vertices();
    let (i, j, w) = &h.edges()[b];
    let (i, j) = (*i, *j);
    let e_k = |k: usize| {
        let lat = LinearLatency::slope(d / powi(&int(4), k as i64 + 1));
        SpTerm::labeled(lat, label(copy, b, &format!("e{k}")))
    };
    let mut arms: Vec<SpTerm> = (0..n).filter(|&k| k != i && k != j).map(e_k).collect();
    let slope = w / (powi(&int(16), i as i64 + 1) * powi(&int(16), j as i64 + 1));
    let via = SpTerm::series(
        SpTerm::parallel(e_k(i), e_k(j)),
        SpTerm::labeled(LinearLatency::slope(slope), label(copy, b, "eij")),
    );
    arms.push(via);
    SpTerm::parallel_all(arms).expect("at least one arm")
}

/// Composition tree of the compiled network.
pub fn mc2sp_term(h: &EdgeWeightedGraph) -> Result<SpTerm> {
    let n = h.num_vertices();
    if n < 2 {
        return Err(Error::InvalidInstance("need at least two vertices".into()));
    }
    if h.edges().is_empty() {
        return Err(Error::InvalidInstance("need at least one edge".into()));
    }
    let d = big_d(h);
    let copy = |c: char| SpTerm::series_all((0..h.edges().len()).map(|b| block(h, c, b, &d)).collect()).unwrap();
    Ok(SpTerm::parallel(copy('u'), copy('l')))
}

/// Builds the game and its solution map.
pub fn reduce_mc_to_sp(h: &EdgeWeightedGraph) -> Result<(CongestionGame, Mc2SpMap)> {
    let term = mc2sp_term(h)?;
    let sp = sp_realize(&term);
    let n = h.num_vertices();
    let ids: HashMap<String, usize> =
        sp.net.edges().iter().enumerate().filter_map(|(k, e)| e.label.clone().map(|l| (l, k))).collect();
    let path_of = |copy: char, k: usize| -> Path {
        let mut p = Vec::new();
        for (b, (i, j, _)) in h.edges().iter().enumerate() {
            p.push(ids[&label(copy, b, &format!("e{k}"))]);
            if k == *i || k == *j {
                p.push(ids[&label(copy, b, "eij")]);
            }
        }
        p
    };
    let upper = (0..n).map(|k| path_of('u', k)).collect();
    let lower = (0..n).map(|k| path_of('l', k)).collect();
    let mut players = Vec::with_capacity(3 * n);
    let mut class = Vec::with_capacity(3 * n);
    for k in 0..n {
        for _ in 0..3 {
            players.push(Player { w: powi(&int(16), k as i64 + 1), o: sp.o, d: sp.d });
            class.push(k);
        }
    }
    let game = CongestionGame::new(players, sp.net)?;
    Ok((game, Mc2SpMap { n, upper, lower, class }))
}

/// Routes two players of each side-1 vertex through `p_k^u`, one otherwise.
pub fn embed_cut_to_sp(sm: &Mc2SpMap, s: &Cut) -> Result<Profile> {
    if s.len() != sm.n {
        return Err(Error::DimensionError { expected: sm.n, got: s.len() });
    }
    let mut seen = vec![0usize; sm.n];
    let paths = sm
        .class
        .iter()
        .map(|&k| {
            let r = seen[k];
            seen[k] += 1;
            let up = if s.side(k) == 1 { r < 2 } else { r < 1 };
            if up {
                sm.upper[k].clone()
            } else {
                sm.lower[k].clone()
            }
        })
        .collect();
    Ok(Profile::new(paths))
}

/// Side 1 holds the vertices with exactly two players on `p_k^u`.
pub fn map_back_sp(sm: &Mc2SpMap, p: &Profile) -> Result<Cut> {
    if p.paths.len() != sm.class.len() {
        return Err(Error::DimensionError { expected: sm.class.len(), got: p.paths.len() });
    }
    let mut up = vec![0usize; sm.n];
    let mut down = vec![0usize; sm.n];
    for (path, &k) in p.paths.iter().zip(&sm.class) {
        if *path == sm.upper[k] {
            up[k] += 1;
        } else if *path == sm.lower[k] {
            down[k] += 1;
        }
    }
    let mut cut = Cut::zeros(sm.n);
    for k in 0..sm.n {
        match (up[k], down[k]) {
            (2, 1) => cut.set_side(k, 1),
            (1, 2) => {}
            (u, l) => {
                return Err(Error::NotCanonical(format!(
                    "vertex {k}: {u} players on the upper path and {l} on the lower one"
                )))
            }
        }
    }
    Ok(cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congestion::{enumerate_paths, is_pne};

    fn k2(w: i64) -> EdgeWeightedGraph {
        EdgeWeightedGraph::new(2, vec![(0, 1, int(w))]).unwrap()
    }

    #[test]
    fn k2_shape() {
        let h = k2(5);
        assert_eq!(big_d(&h), int(20480));
        let (g, sm) = reduce_mc_to_sp(&h).unwrap();
        let ws: Vec<Weight> = g.players.iter().map(|p| p.w.clone()).collect();
        assert_eq!(ws, vec![int(16), int(16), int(16), int(256), int(256), int(256)]);
        assert_eq!(g.net.num_edges(), 6);
        let paths = enumerate_paths(&g.net, 0, 1, 100).unwrap();
        assert_eq!(paths.len(), 4);
        assert_eq!(sm.upper[0].len(), 2);
    }

    #[test]
    fn path_counts() {
        let h = EdgeWeightedGraph::new(4, vec![(0, 1, int(1)), (1, 2, int(1)), (2, 3, int(1)), (3, 0, int(1))]).unwrap();
        let t = mc2sp_term(&h).unwrap();
        // two copies of four blocks with four paths each
        assert_eq!(t.path_count(), 2 * 256);
        assert_eq!(big_d(&h), powi(&int(16), 5));
    }

    #[test]
    fn round_trip_and_equilibrium() {
        let h = k2(3);
        let (g, sm) = reduce_mc_to_sp(&h).unwrap();
        for set in [&[0usize][..], &[1], &[]] {
            let c = Cut::from_set(2, set);
            let p = embed_cut_to_sp(&sm, &c).unwrap();
            assert_eq!(map_back_sp(&sm, &p).unwrap(), c);
            let locally_optimal = set.len() == 1;
            assert_eq!(is_pne(&g, &p, &int(0)).unwrap(), locally_optimal);
        }
        let all_up = Profile::new(sm.class.iter().map(|&k| sm.upper[k].clone()).collect());
        assert!(matches!(map_back_sp(&sm, &all_up), Err(Error::NotCanonical(_))));
    }
}
