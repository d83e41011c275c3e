//! Brute-force ground truth and reduction verification.

use std::collections::BTreeSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::Circuit;
use crate::congestion::{
    br_dynamics, default_step_cap, enumerate_paths, is_pne, random_profile, CongestionGame, Path, Profile, Schedule,
};
use crate::error::{Error, Result};
use crate::games_core::{is_local_optimum, Cut, CutGraph, EdgeWeightedGraph, VertexWeightedGraph};
use crate::reductions::{
    constants_on_middle, embed_cut_to_multi, embed_cut_to_sp, map_back_multi, map_back_sp, Mc2SpMap, Nmc2MultiMap,
};
use crate::weight::Weight;

pub mod gadgets;

pub use gadgets::{check_gadget_lemma, CheckMode, LemmaId, LemmaOutcome};

/// Largest graph `brute_local_optima` accepts.
pub const MAX_BRUTE_VERTICES: usize = 24;
/// Largest strategy space `brute_pne` accepts.
pub const MAX_BRUTE_PROFILES: u128 = 10_000_000;
/// Path enumeration cap per player inside `brute_pne`.
const PATH_CAP: usize = 100_000;

/// All locally optimal cuts with vertex 0 on side 0.
pub fn brute_local_optima<G: CutGraph + ?Sized>(g: &G) -> Result<Vec<Cut>> {
    let n = g.num_vertices();
    if n > MAX_BRUTE_VERTICES {
        return Err(Error::TooLarge(format!("{n} vertices, at most {MAX_BRUTE_VERTICES} supported")));
    }
    if n == 0 {
        return Ok(vec![Cut::zeros(0)]);
    }
    // incremental per-vertex same-minus-opposite sums over a Gray code walk
    let adj: Vec<Vec<(usize, Weight)>> = (0..n).map(|v| g.incident(v).collect()).collect();
    let mut cut = Cut::zeros(n);
    let mut same: Vec<Weight> = adj.iter().map(|a| a.iter().map(|(_, w)| w.clone()).sum()).collect();
    let mut out = Vec::new();
    let free = n - 1;
    let total: u64 = 1 << free;
    for k in 0..total {
        if k > 0 {
            let v = 1 + k.trailing_zeros() as usize;
            cut.flip(v);
            same[v] = -same[v].clone();
            for (u, w) in &adj[v] {
                if cut.side(*u) == cut.side(v) {
                    same[*u] += w * Weight::from_integer(2.into());
                } else {
                    same[*u] -= w * Weight::from_integer(2.into());
                }
            }
        }
        if same.iter().all(|s| *s <= Weight::from_integer(0.into())) {
            out.push(cut.clone());
        }
    }
    out.sort_by(|a, b| a.sides().cmp(b.sides()));
    Ok(out)
}

/// All exact pure Nash equilibria.
pub fn brute_pne(g: &CongestionGame) -> Result<Vec<Profile>> {
    let mut per: Vec<Vec<Path>> = Vec::with_capacity(g.players.len());
    let mut size: u128 = 1;
    for p in &g.players {
        let paths = enumerate_paths(&g.net, p.o, p.d, PATH_CAP)
            .map_err(|_| Error::TooLarge(format!("more than {PATH_CAP} paths for one player")))?;
        size = size.saturating_mul(paths.len() as u128);
        if size > MAX_BRUTE_PROFILES {
            return Err(Error::TooLarge(format!("more than {MAX_BRUTE_PROFILES} profiles")));
        }
        per.push(paths);
    }
    let zero = Weight::from_integer(0.into());
    let mut out = Vec::new();
    let mut idx = vec![0usize; per.len()];
    loop {
        let prof = Profile::new(idx.iter().zip(&per).map(|(&k, ps)| ps[k].clone()).collect());
        if is_pne(g, &prof, &zero)? {
            out.push(prof);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < per[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Which half of the reduction contract a report covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Source local optima embed to target solutions.
    Forward,
    /// Target local optima map back to source local optima.
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// Outcome of one verification run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub instance: String,
    pub direction: Direction,
    pub checked: usize,
    /// Runs that did not reach an equilibrium within the step cap.
    pub unconverged: usize,
    pub counterexamples: Vec<String>,
}

impl VerificationReport {
    pub(crate) fn new(instance: &str, direction: Direction) -> Self {
        Self { instance: instance.to_string(), direction, checked: 0, unconverged: 0, counterexamples: Vec::new() }
    }

    pub fn success(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Verification strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every local optimum of the source embeds to a target local optimum.
    EmbedCheck,
    /// Seeded dynamics on the target, mapped back and checked on the source.
    DynamicsSample { runs: usize, seed: u64 },
    /// Every target local optimum maps back to a source local optimum.
    Exhaustive,
}

/// A source instance together with its compiled form.
#[derive(Clone, Copy, Debug)]
pub enum ReductionInstance<'a> {
    Mc2Sp { source: &'a EdgeWeightedGraph, game: &'a CongestionGame, map: &'a Mc2SpMap },
    Nmc2Multi { source: &'a VertexWeightedGraph, game: &'a CongestionGame, map: &'a Nmc2MultiMap },
    Cf2Nmc { source: &'a Circuit, compiled: &'a crate::reductions::CfInstance },
}

/// Checks one direction of a reduction on one instance.
pub fn verify_reduction(id: &str, inst: ReductionInstance<'_>, mode: VerifyMode) -> Result<VerificationReport> {
    match inst {
        ReductionInstance::Mc2Sp { source, game, map } => {
            let embed = |c: &Cut| embed_cut_to_sp(map, c);
            let back = |p: &Profile| map_back_sp(map, p);
            verify_game(id, source, game, mode, &embed, &back, &|_| true)
        }
        ReductionInstance::Nmc2Multi { source, game, map } => {
            let embed = |c: &Cut| embed_cut_to_multi(map, c);
            let back = |p: &Profile| map_back_multi(map, p);
            verify_game(id, source, game, mode, &embed, &back, &|p| constants_on_middle(map, p))
        }
        ReductionInstance::Cf2Nmc { source, compiled } => crate::reductions::cf2nmc::verify(id, source, compiled, mode),
    }
}

type EmbedFn<'a> = dyn Fn(&Cut) -> Result<Profile> + 'a;
type BackFn<'a> = dyn Fn(&Profile) -> Result<Cut> + 'a;

fn verify_game<G: CutGraph + ?Sized>(
    id: &str,
    source: &G,
    game: &CongestionGame,
    mode: VerifyMode,
    embed: &EmbedFn<'_>,
    back: &BackFn<'_>,
    extra: &dyn Fn(&Profile) -> bool,
) -> Result<VerificationReport> {
    let zero = Weight::from_integer(0.into());
    match mode {
        VerifyMode::EmbedCheck => {
            let mut rep = VerificationReport::new(id, Direction::Forward);
            for c in brute_local_optima(source)? {
                // both orientations of a canonical cut
                for s in [c.clone(), c.complement()] {
                    rep.checked += 1;
                    let p = embed(&s)?;
                    if !is_pne(game, &p, &zero)? {
                        rep.counterexamples.push(format!("cut {s} embeds to a non-equilibrium"));
                    }
                }
            }
            Ok(rep)
        }
        VerifyMode::DynamicsSample { runs, seed } => {
            let mut rep = VerificationReport::new(id, Direction::Backward);
            let cap = default_step_cap();
            for r in 0..runs {
                let s = seed.wrapping_add(r as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let start = random_profile(game, &mut rng);
                match br_dynamics(game, &start, Schedule::Random(s), &zero, cap) {
                    Ok((end, _)) => {
                        rep.checked += 1;
                        check_back(source, &end, back, extra, &mut rep, &format!("seed {s}"))?;
                    }
                    Err(Error::StepCapExceeded { .. }) => rep.unconverged += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(rep)
        }
        VerifyMode::Exhaustive => {
            let mut rep = VerificationReport::new(id, Direction::Backward);
            for p in brute_pne(game)? {
                rep.checked += 1;
                check_back(source, &p, back, extra, &mut rep, "equilibrium")?;
            }
            Ok(rep)
        }
    }
}

fn check_back<G: CutGraph + ?Sized>(
    source: &G,
    p: &Profile,
    back: &BackFn<'_>,
    extra: &dyn Fn(&Profile) -> bool,
    rep: &mut VerificationReport,
    what: &str,
) -> Result<()> {
    match back(p) {
        Ok(c) => {
            if !is_local_optimum(source, &c)? {
                rep.counterexamples.push(format!("{what}: maps back to {c}, not locally optimal"));
            }
            if !extra(p) {
                rep.counterexamples.push(format!("{what}: complementary player off its middle edge"));
            }
        }
        Err(Error::NotCanonical(msg)) => rep.counterexamples.push(format!("{what}: {msg}")),
        Err(e) => return Err(e),
    }
    Ok(())
}

/// Distinct canonical cuts, for set comparisons in tests.
pub fn canonical_set(cuts: &[Cut]) -> BTreeSet<Vec<u8>> {
    cuts.iter().map(|c| c.canonical().sides().to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congestion::{sp_realize, LinearLatency, Player, SpTerm};
    use crate::weight::int;

    fn unit_nmc(n: usize, edges: Vec<(usize, usize)>) -> VertexWeightedGraph {
        VertexWeightedGraph::new(vec![int(1); n], edges).unwrap()
    }

    #[test]
    fn local_optima_small_graphs() {
        let k2 = unit_nmc(2, vec![(0, 1)]);
        assert_eq!(brute_local_optima(&k2).unwrap(), vec![Cut::new(vec![0, 1]).unwrap()]);
        let empty = unit_nmc(3, vec![]);
        assert_eq!(brute_local_optima(&empty).unwrap().len(), 4);
        let tri = unit_nmc(3, vec![(0, 1), (1, 2), (0, 2)]);
        let got: Vec<String> = brute_local_optima(&tri).unwrap().iter().map(|c| c.to_string()).collect();
        assert_eq!(got, vec!["001", "010", "011"]);
        let big = unit_nmc(25, vec![]);
        assert!(matches!(brute_local_optima(&big), Err(Error::TooLarge(_))));
    }

    #[test]
    fn pne_small_games() {
        let t = SpTerm::parallel(SpTerm::leaf(LinearLatency::identity()), SpTerm::leaf(LinearLatency::identity()));
        let sp = sp_realize(&t);
        let pl = Player { w: int(1), o: sp.o, d: sp.d };
        let g = CongestionGame::new(vec![pl.clone(), pl.clone()], sp.net.clone()).unwrap();
        let eq = brute_pne(&g).unwrap();
        assert_eq!(eq, vec![Profile::new(vec![vec![1], vec![0]]), Profile::new(vec![vec![0], vec![1]])]);
        let one = CongestionGame::new(vec![pl], sp.net.clone()).unwrap();
        assert_eq!(brute_pne(&one).unwrap().len(), 2);
        let none = CongestionGame::new(vec![], sp.net).unwrap();
        assert_eq!(brute_pne(&none).unwrap(), vec![Profile::new(vec![])]);
    }
}
