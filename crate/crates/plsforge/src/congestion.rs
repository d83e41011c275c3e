//! Weighted network congestion games with linear latencies.

mod engine;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::weight::{ensure_positive, Weight};
use engine::{Engine, Num, Scaled};

/// `ℓ(x) = a·x + b` with `a, b ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearLatency {
    pub a: Weight,
    pub b: Weight,
}

impl LinearLatency {
    pub fn new(a: Weight, b: Weight) -> Result<Self> {
        if a.is_negative() || b.is_negative() {
            return Err(Error::InvalidArgument("latency coefficients must be nonnegative".into()));
        }
        Ok(Self { a, b })
    }

    /// `ℓ(x) = x`.
    pub fn identity() -> Self {
        Self { a: Weight::one(), b: Weight::zero() }
    }

    /// `ℓ(x) = a·x`.
    pub fn slope(a: Weight) -> Self {
        Self { a, b: Weight::zero() }
    }

    pub fn eval(&self, x: &Weight) -> Weight {
        &self.a * x + &self.b
    }
}

/// Undirected edge with a latency and an optional label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetEdge {
    pub u: usize,
    pub v: usize,
    pub latency: LinearLatency,
    pub label: Option<String>,
}

/// Undirected multigraph of resources.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Network {
    n: usize,
    edges: Vec<NetEdge>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl Network {
    pub fn new(n: usize) -> Self {
        Self { n, edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.n += 1;
        self.n - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, latency: LinearLatency, label: Option<String>) -> Result<usize> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidInstance(format!("edge {{{u},{v}}} outside 0..{}", self.n)));
        }
        if u == v {
            return Err(Error::InvalidInstance(format!("self-loop at {u}")));
        }
        let id = self.edges.len();
        self.edges.push(NetEdge { u, v, latency, label });
        self.adj[u].push((v, id));
        self.adj[v].push((u, id));
        Ok(id)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[NetEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &NetEdge {
        &self.edges[e]
    }

    /// `(neighbor, edge id)` pairs in insertion order.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// Id of the first edge with this label.
    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.label.as_deref() == Some(label))
    }

    /// Vertex sequence of an edge path starting at `o`, if it is a walk.
    pub fn walk_vertices(&self, o: usize, path: &[usize]) -> Option<Vec<usize>> {
        let mut at = o;
        let mut seq = vec![o];
        for &e in path {
            let ed = self.edges.get(e)?;
            at = if ed.u == at {
                ed.v
            } else if ed.v == at {
                ed.u
            } else {
                return None;
            };
            seq.push(at);
        }
        Some(seq)
    }

    /// Checks that `path` is a simple `o`–`d` path.
    pub fn is_simple_path(&self, o: usize, d: usize, path: &[usize]) -> bool {
        match self.walk_vertices(o, path) {
            Some(seq) => {
                let mut seen = vec![false; self.n];
                for &v in &seq {
                    if seen[v] {
                        return false;
                    }
                    seen[v] = true;
                }
                *seq.last().unwrap() == d
            }
            None => false,
        }
    }
}

/// Series-parallel composition tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpTerm {
    Leaf(LinearLatency, Option<String>),
    Series(Box<SpTerm>, Box<SpTerm>),
    Parallel(Box<SpTerm>, Box<SpTerm>),
}

impl SpTerm {
    pub fn leaf(l: LinearLatency) -> Self {
        SpTerm::Leaf(l, None)
    }

    pub fn labeled(l: LinearLatency, label: impl Into<String>) -> Self {
        SpTerm::Leaf(l, Some(label.into()))
    }

    pub fn series(a: SpTerm, b: SpTerm) -> Self {
        SpTerm::Series(Box::new(a), Box::new(b))
    }

    pub fn parallel(a: SpTerm, b: SpTerm) -> Self {
        SpTerm::Parallel(Box::new(a), Box::new(b))
    }

    /// Left-nested series of all terms; `None` on empty input.
    pub fn series_all(terms: Vec<SpTerm>) -> Option<Self> {
        terms.into_iter().reduce(SpTerm::series)
    }

    /// Left-nested parallel of all terms; `None` on empty input.
    pub fn parallel_all(terms: Vec<SpTerm>) -> Option<Self> {
        terms.into_iter().reduce(SpTerm::parallel)
    }

    /// Number of o–d paths of the realization.
    pub fn path_count(&self) -> u128 {
        match self {
            SpTerm::Leaf(..) => 1,
            SpTerm::Series(a, b) => a.path_count().saturating_mul(b.path_count()),
            SpTerm::Parallel(a, b) => a.path_count().saturating_add(b.path_count()),
        }
    }
}

/// Realized series-parallel network with its terminals.
#[derive(Clone, Debug)]
pub struct SpNetwork {
    pub net: Network,
    pub o: usize,
    pub d: usize,
}

/// Builds the network of a composition tree; leaf edges are added left to right.
pub fn sp_realize(t: &SpTerm) -> SpNetwork {
    fn go(t: &SpTerm, net: &mut Network, o: usize, d: usize) {
        match t {
            SpTerm::Leaf(l, label) => {
                net.add_edge(o, d, l.clone(), label.clone()).expect("terminals are distinct");
            }
            SpTerm::Series(a, b) => {
                let mid = net.add_vertex();
                go(a, net, o, mid);
                go(b, net, mid, d);
            }
            SpTerm::Parallel(a, b) => {
                go(a, net, o, d);
                go(b, net, o, d);
            }
        }
    }
    let mut net = Network::new(2);
    go(t, &mut net, 0, 1);
    SpNetwork { net, o: 0, d: 1 }
}

/// Path as a sequence of edge ids.
pub type Path = Vec<usize>;

/// All simple `o`–`d` paths in lexicographic order of edge ids; fails beyond `cap`.
pub fn enumerate_paths(net: &Network, o: usize, d: usize, cap: usize) -> Result<Vec<Path>> {
    if o == d {
        return Err(Error::InvalidArgument("origin equals destination".into()));
    }
    let sorted_adj: Vec<Vec<(usize, usize)>> = (0..net.n)
        .map(|v| {
            let mut a: Vec<(usize, usize)> = net.adj[v].iter().map(|&(u, e)| (e, u)).collect();
            a.sort();
            a
        })
        .collect();
    let mut out = Vec::new();
    let mut on_path = vec![false; net.n];
    let mut path = Vec::new();
    // explicit stack of (vertex, next adjacency position)
    let mut stack = vec![(o, 0usize)];
    on_path[o] = true;
    while let Some(&mut (v, ref mut k)) = stack.last_mut() {
        if v == d {
            out.push(path.clone());
            if out.len() > cap {
                return Err(Error::TooLarge(format!("more than {cap} simple paths")));
            }
            on_path[v] = false;
            stack.pop();
            path.pop();
            continue;
        }
        if *k < sorted_adj[v].len() {
            let (e, u) = sorted_adj[v][*k];
            *k += 1;
            if !on_path[u] {
                on_path[u] = true;
                path.push(e);
                stack.push((u, 0));
            }
        } else {
            on_path[v] = false;
            stack.pop();
            path.pop();
        }
    }
    Ok(out)
}

/// Player with a weight and a commodity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Player {
    pub w: Weight,
    pub o: usize,
    pub d: usize,
}

/// Weighted congestion game on a network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongestionGame {
    pub players: Vec<Player>,
    pub net: Network,
}

impl CongestionGame {
    pub fn new(players: Vec<Player>, net: Network) -> Result<Self> {
        for (i, p) in players.iter().enumerate() {
            ensure_positive(&p.w, "player weight")?;
            if p.o >= net.n || p.d >= net.n || p.o == p.d {
                return Err(Error::InvalidInstance(format!("player {i} has an invalid commodity")));
            }
            if !connected(&net, p.o, p.d) {
                return Err(Error::InvalidInstance(format!("player {i} has no path")));
            }
        }
        Ok(Self { players, net })
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }
}

fn connected(net: &Network, o: usize, d: usize) -> bool {
    let mut seen = vec![false; net.n];
    let mut stack = vec![o];
    seen[o] = true;
    while let Some(v) = stack.pop() {
        if v == d {
            return true;
        }
        for &(u, _) in &net.adj[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    false
}

/// One path per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    pub paths: Vec<Path>,
}

impl Profile {
    pub fn new(paths: Vec<Path>) -> Self {
        Self { paths }
    }

    /// Checks each path is a simple path of its player.
    pub fn validate(&self, g: &CongestionGame) -> Result<()> {
        if self.paths.len() != g.players.len() {
            return Err(Error::DimensionError { expected: g.players.len(), got: self.paths.len() });
        }
        for (i, (p, pl)) in self.paths.iter().zip(&g.players).enumerate() {
            if !g.net.is_simple_path(pl.o, pl.d, p) {
                return Err(Error::InvalidArgument(format!("path of player {i} is not a simple o-d path")));
            }
        }
        Ok(())
    }
}

/// Per-edge congestion `s_e`.
pub fn loads(g: &CongestionGame, p: &Profile) -> Vec<Weight> {
    let mut s = vec![Weight::zero(); g.net.num_edges()];
    for (path, pl) in p.paths.iter().zip(&g.players) {
        for &e in path {
            s[e] += &pl.w;
        }
    }
    s
}

fn path_cost(g: &CongestionGame, s: &[Weight], path: &[usize]) -> Weight {
    path.iter().map(|&e| g.net.edges[e].latency.eval(&s[e])).sum()
}

/// Per-edge congestion and per-player cost.
pub fn congestion_and_costs(g: &CongestionGame, p: &Profile) -> Result<(Vec<Weight>, Vec<Weight>)> {
    p.validate(g)?;
    let s = loads(g, p);
    let c = p.paths.iter().map(|path| path_cost(g, &s, path)).collect();
    Ok((s, c))
}

/// `Φ = Σ_e (a_e s_e² + b_e s_e) + Σ_i w_i Σ_{e∈s_i} (a_e w_i + b_e)`.
pub fn potential_wcg(g: &CongestionGame, p: &Profile) -> Result<Weight> {
    p.validate(g)?;
    Ok(potential_unchecked(g, p, &loads(g, p)))
}

fn potential_unchecked(g: &CongestionGame, p: &Profile, s: &[Weight]) -> Weight {
    let mut phi = Weight::zero();
    for (e, ed) in g.net.edges.iter().enumerate() {
        phi += &ed.latency.a * &s[e] * &s[e] + &ed.latency.b * &s[e];
    }
    for (path, pl) in p.paths.iter().zip(&g.players) {
        for &e in path {
            let l = &g.net.edges[e].latency;
            phi += &pl.w * (&l.a * &pl.w + &l.b);
        }
    }
    phi
}

/// Random simple path per player, by randomized depth-first search.
pub fn random_profile<R: Rng + ?Sized>(g: &CongestionGame, rng: &mut R) -> Profile {
    let paths = g
        .players
        .iter()
        .map(|pl| {
            let n = g.net.num_vertices();
            let mut seen = vec![false; n];
            let mut stack: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
            let mut path = Vec::new();
            let shuffled = |v: usize, rng: &mut R| {
                let mut a = g.net.incident(v).to_vec();
                for k in (1..a.len()).rev() {
                    a.swap(k, rng.gen_range(0..=k));
                }
                a
            };
            seen[pl.o] = true;
            stack.push((pl.o, shuffled(pl.o, rng)));
            while let Some((v, cand)) = stack.last_mut() {
                if *v == pl.d {
                    break;
                }
                match cand.pop() {
                    Some((u, e)) if !seen[u] => {
                        seen[u] = true;
                        path.push(e);
                        let c = shuffled(u, rng);
                        stack.push((u, c));
                    }
                    Some(_) => {}
                    None => {
                        stack.pop();
                        path.pop();
                    }
                }
            }
            path
        })
        .collect();
    Profile::new(paths)
}

fn check_eps(eps: &Weight) -> Result<()> {
    if eps.is_negative() {
        Err(Error::InvalidArgument("eps must be nonnegative".into()))
    } else {
        Ok(())
    }
}

/// Runs `f` on an engine over `i128` when the game is small enough, else `BigInt`.
macro_rules! with_engine {
    ($g:expr, $p:expr, $eps:expr, |$sc:ident, $en:ident| $body:expr) => {{
        let $sc = Scaled::new($g);
        if $sc.fits_i128($eps.numer(), $eps.denom()) {
            let mut $en = Engine::<i128>::new($g, &$sc, $p, $eps);
            $body
        } else {
            let mut $en = Engine::<BigInt>::new($g, &$sc, $p, $eps);
            $body
        }
    }};
}

/// Minimum-cost path for player `i` with everyone else fixed.
///
/// Ties go to the lexicographically smallest edge-id sequence.
pub fn best_response(g: &CongestionGame, p: &Profile, i: usize) -> Result<(Path, Weight)> {
    p.validate(g)?;
    if i >= g.players.len() {
        return Err(Error::InvalidArgument(format!("no player {i}")));
    }
    let zero = Weight::zero();
    Ok(with_engine!(g, p, &zero, |sc, en| {
        let (q, c) = en.cheapest(i);
        (q, sc.to_weight(&c.to_big()))
    }))
}

/// No player can lower her cost by more than a factor `1+eps`.
pub fn is_pne(g: &CongestionGame, p: &Profile, eps: &Weight) -> Result<bool> {
    check_eps(eps)?;
    p.validate(g)?;
    Ok(with_engine!(g, p, eps, |sc, en| {
        let _ = &sc;
        (0..en.num_players()).all(|i| en.improving(i).is_none())
    }))
}

/// Order in which deviating players are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// Next player after the last mover that can improve.
    RoundRobin,
    /// Player with the largest cost decrease, lowest index on ties.
    MaxGain,
    /// Players scanned in a fresh seeded random order each step; first improver moves.
    Random(u64),
}

/// One executed move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub player: usize,
    pub old_cost: Weight,
    pub new_cost: Weight,
    /// Potential after the move.
    pub potential: Weight,
}

/// Default dynamics step cap; overridden by `PLSFORGE_STEP_CAP`.
pub fn default_step_cap() -> usize {
    std::env::var("PLSFORGE_STEP_CAP").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(1_000_000)
}

fn dynamics_loop<T: Num>(
    en: &mut Engine<'_, T>,
    sc: &Scaled,
    g: &CongestionGame,
    start: &Profile,
    schedule: Schedule,
    max_steps: usize,
) -> Result<(Profile, Vec<Step>)> {
    let np = en.num_players();
    let mut phi = potential_unchecked(g, start, &loads(g, start));
    let mut trace = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(match schedule {
        Schedule::Random(seed) => seed,
        _ => 0,
    });
    let mut order: Vec<usize> = (0..np).collect();
    let mut last = np.saturating_sub(1);
    let two = Weight::from_integer(2.into());
    loop {
        let mv = match schedule {
            Schedule::RoundRobin => (1..=np).map(|k| (last + k) % np).find_map(|i| en.improving(i).map(|m| (i, m))),
            Schedule::MaxGain => {
                let mut best: Option<(usize, (Path, T, T))> = None;
                for i in 0..np {
                    if let Some(m) = en.improving(i) {
                        let gain = m.1.clone() - m.2.clone();
                        if best.as_ref().map_or(true, |(_, b)| gain > b.1.clone() - b.2.clone()) {
                            best = Some((i, m));
                        }
                    }
                }
                best
            }
            Schedule::Random(_) => {
                for k in (1..np).rev() {
                    order.swap(k, rng.gen_range(0..=k));
                }
                order.clone().into_iter().find_map(|i| en.improving(i).map(|m| (i, m)))
            }
        };
        let Some((i, (q, old, new))) = mv else {
            return Ok((Profile::new(en.paths.clone()), trace));
        };
        if trace.len() >= max_steps {
            return Err(Error::StepCapExceeded { steps: max_steps, last: en.paths.clone() });
        }
        let old_cost = sc.to_weight(&old.to_big());
        let new_cost = sc.to_weight(&new.to_big());
        // Φ drops by exactly 2·w_i·(c_i − c_i')
        phi -= &two * &g.players[i].w * (&old_cost - &new_cost);
        en.apply(i, q);
        trace.push(Step { player: i, old_cost, new_cost, potential: phi.clone() });
        last = i;
    }
}

/// Best-response dynamics until an `eps`-equilibrium or the step cap.
///
/// Each move sends the chosen player to her best response. The trace
/// records the mover, her costs before and after, and the potential.
pub fn br_dynamics(
    g: &CongestionGame,
    start: &Profile,
    schedule: Schedule,
    eps: &Weight,
    max_steps: usize,
) -> Result<(Profile, Vec<Step>)> {
    if max_steps == 0 {
        return Err(Error::InvalidArgument("max_steps must be positive".into()));
    }
    check_eps(eps)?;
    start.validate(g)?;
    with_engine!(g, start, eps, |sc, en| dynamics_loop(&mut en, &sc, g, start, schedule, max_steps))
}
