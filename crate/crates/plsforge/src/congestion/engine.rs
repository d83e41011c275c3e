//! Integer-scaled state for best responses and dynamics.
//!
//! Weights are scaled by the lcm `Lw` of their denominators and latency
//! coefficients by the lcm `L` of theirs, so every path cost becomes an
//! integer equal to `L·Lw` times the true cost.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{enumerate_paths, CongestionGame, Path, Profile};
use crate::weight::Weight;

pub(crate) trait Num:
    Clone + Ord + Debug + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn from_big(x: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
}

impl Num for i128 {
    fn from_big(x: &BigInt) -> Self {
        x.to_i128().expect("range checked before selecting i128")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Num for BigInt {
    fn from_big(x: &BigInt) -> Self {
        x.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Integer data of a game, independent of the number type.
pub(crate) struct Scaled {
    pub a: Vec<BigInt>,
    pub b: Vec<BigInt>,
    pub w: Vec<BigInt>,
    /// True cost = scaled cost / scale.
    pub scale: BigInt,
    /// Upper bound on any scaled path cost.
    pub bound: BigInt,
}

impl Scaled {
    pub fn new(g: &CongestionGame) -> Self {
        let mut lw = BigInt::one();
        for p in &g.players {
            lw = lw.lcm(p.w.denom());
        }
        let mut l = BigInt::one();
        for e in g.net.edges() {
            l = l.lcm(e.latency.a.denom()).lcm(e.latency.b.denom());
        }
        let to_int = |x: &Weight, k: &BigInt| (x.numer() * k) / x.denom();
        let w: Vec<BigInt> = g.players.iter().map(|p| to_int(&p.w, &lw)).collect();
        let lwl = &lw * &l;
        let a: Vec<BigInt> = g.net.edges().iter().map(|e| to_int(&e.latency.a, &l)).collect();
        let b: Vec<BigInt> = g.net.edges().iter().map(|e| to_int(&e.latency.b, &lwl)).collect();
        let total: BigInt = w.iter().sum();
        let bound = a.iter().zip(&b).map(|(a, b)| a * &total + b).sum();
        Self { a, b, w, scale: lwl, bound }
    }

    /// Small enough for `i128` with an `eps = p/q` comparison.
    pub fn fits_i128(&self, eps_num: &BigInt, eps_den: &BigInt) -> bool {
        let worst = &self.bound * (eps_num + eps_den) + BigInt::one();
        worst.bits() < 125
    }

    pub fn to_weight(&self, x: &BigInt) -> Weight {
        Weight::new(x.clone(), self.scale.clone())
    }
}

pub(crate) struct Engine<'g, T: Num> {
    g: &'g CongestionGame,
    a: Vec<T>,
    b: Vec<T>,
    w: Vec<T>,
    loads: Vec<T>,
    pub paths: Vec<Path>,
    eps_num: T,
    eps_den: T,
    mark: Vec<u32>,
    stamp: u32,
}

impl<'g, T: Num> Engine<'g, T> {
    pub fn new(g: &'g CongestionGame, sc: &Scaled, p: &Profile, eps: &Weight) -> Self {
        let a: Vec<T> = sc.a.iter().map(T::from_big).collect();
        let b: Vec<T> = sc.b.iter().map(T::from_big).collect();
        let w: Vec<T> = sc.w.iter().map(T::from_big).collect();
        let mut loads = vec![T::zero(); g.net.num_edges()];
        for (path, wi) in p.paths.iter().zip(&w) {
            for &e in path {
                loads[e] = loads[e].clone() + wi.clone();
            }
        }
        Self {
            g,
            a,
            b,
            w,
            loads,
            paths: p.paths.clone(),
            eps_num: T::from_big(eps.numer()),
            eps_den: T::from_big(eps.denom()),
            mark: vec![0; g.net.num_edges()],
            stamp: 0,
        }
    }

    fn edge_cost(&self, e: usize, load: T) -> T {
        self.a[e].clone() * load + self.b[e].clone()
    }

    pub fn cost(&self, i: usize) -> T {
        self.paths[i].iter().fold(T::zero(), |acc, &e| acc + self.edge_cost(e, self.loads[e].clone()))
    }

    /// Cheapest path of `i` against the others; lexicographic tie-break on edge ids.
    pub fn cheapest(&mut self, i: usize) -> (Path, T) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.stamp = 1;
        }
        for &e in &self.paths[i] {
            self.mark[e] = self.stamp;
        }
        let wi = self.w[i].clone();
        let ne = self.g.net.num_edges();
        let costs: Vec<T> = (0..ne)
            .map(|e| {
                let load = if self.mark[e] == self.stamp { self.loads[e].clone() } else { self.loads[e].clone() + wi.clone() };
                self.edge_cost(e, load)
            })
            .collect();
        let pl = &self.g.players[i];
        let n = self.g.net.num_vertices();
        let mut dist: Vec<Option<T>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[pl.d] = Some(T::zero());
        heap.push(Reverse((T::zero(), pl.d)));
        while let Some(Reverse((dv, v))) = heap.pop() {
            if dist[v].as_ref().is_some_and(|x| x < &dv) {
                continue;
            }
            for &(u, e) in self.g.net.incident(v) {
                let nd = dv.clone() + costs[e].clone();
                if dist[u].as_ref().map_or(true, |x| &nd < x) {
                    dist[u] = Some(nd.clone());
                    heap.push(Reverse((nd, u)));
                }
            }
        }
        let total = dist[pl.o].clone().expect("players are connected");
        let mut path = Vec::new();
        let mut at = pl.o;
        let mut visited = vec![false; n];
        visited[at] = true;
        while at != pl.d {
            let here = dist[at].clone().expect("on a shortest path");
            let mut best: Option<(usize, usize)> = None;
            for &(u, e) in self.g.net.incident(at) {
                if visited[u] {
                    continue;
                }
                if let Some(du) = &dist[u] {
                    if costs[e].clone() + du.clone() == here && best.map_or(true, |(be, _)| e < be) {
                        best = Some((e, u));
                    }
                }
            }
            match best {
                Some((e, u)) => {
                    path.push(e);
                    visited[u] = true;
                    at = u;
                }
                None => {
                    // zero-cost cycles can strand the greedy walk
                    let all = enumerate_paths(&self.g.net, pl.o, pl.d, usize::MAX).expect("unbounded cap");
                    let best = all
                        .into_iter()
                        .map(|q| (q.iter().fold(T::zero(), |acc, &e| acc + costs[e].clone()), q))
                        .min()
                        .expect("players are connected");
                    return (best.1, best.0);
                }
            }
        }
        (path, total)
    }

    /// Best response of `i` if it beats the current cost by more than `1+eps`.
    pub fn improving(&mut self, i: usize) -> Option<(Path, T, T)> {
        let c = self.cost(i);
        let (q, bc) = self.cheapest(i);
        let lhs = self.eps_den.clone() * c.clone();
        let rhs = (self.eps_den.clone() + self.eps_num.clone()) * bc.clone();
        if lhs > rhs {
            Some((q, c, bc))
        } else {
            None
        }
    }

    pub fn apply(&mut self, i: usize, q: Path) {
        let wi = self.w[i].clone();
        for &e in &self.paths[i] {
            self.loads[e] = self.loads[e].clone() - wi.clone();
        }
        for &e in &q {
            self.loads[e] = self.loads[e].clone() + wi.clone();
        }
        self.paths[i] = q;
    }

    pub fn num_players(&self) -> usize {
        self.w.len()
    }
}
