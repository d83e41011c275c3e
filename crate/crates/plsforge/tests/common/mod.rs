//! Shared generators and corpora for the integration tests.
#![allow(dead_code)]

use plsforge::circuit::{Circuit, Operand, Operand::Gate, Operand::Input};
use plsforge::congestion::{CongestionGame, LinearLatency, Network, Player};
use plsforge::games_core::{EdgeWeightedGraph, VertexWeightedGraph};
use plsforge::weight::{int, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_weight(r: &mut ChaCha8Rng, max_bits: u32) -> Weight {
    let bits = r.gen_range(1..=max_bits);
    let hi: u128 = if bits >= 64 { u64::MAX as u128 } else { (1u128 << bits) - 1 };
    Weight::from_integer(r.gen_range(1..=hi).into())
}

pub fn random_edges(r: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                e.push((u, v));
            }
        }
    }
    e
}

pub fn random_nmc(seed: u64, n: usize, max_bits: u32) -> VertexWeightedGraph {
    let mut r = rng(seed);
    let w = (0..n).map(|_| random_weight(&mut r, max_bits)).collect();
    let p = r.gen_range(0.1..0.9);
    let e = random_edges(&mut r, n, p);
    VertexWeightedGraph::new(w, e).unwrap()
}

pub fn random_mc(seed: u64, n: usize, max_w: i64) -> EdgeWeightedGraph {
    let mut r = rng(seed);
    let p = r.gen_range(0.2..0.9);
    let e = random_edges(&mut r, n, p).into_iter().map(|(u, v)| (u, v, int(r.gen_range(1..=max_w)))).collect();
    EdgeWeightedGraph::new(n, e).unwrap()
}

/// Random connected multigraph game with a few players.
pub fn random_game(seed: u64) -> CongestionGame {
    let mut r = rng(seed);
    let nv = r.gen_range(2..=5);
    let mut net = Network::new(nv);
    // spanning path keeps every commodity routable
    for v in 1..nv {
        let lat = LinearLatency::new(int(r.gen_range(0..4)), int(r.gen_range(0..4))).unwrap();
        net.add_edge(v - 1, v, lat, None).unwrap();
    }
    for _ in 0..r.gen_range(0..5) {
        let u = r.gen_range(0..nv);
        let v = r.gen_range(0..nv);
        if u != v {
            let lat = LinearLatency::new(int(r.gen_range(0..4)), int(r.gen_range(0..4))).unwrap();
            net.add_edge(u, v, lat, None).unwrap();
        }
    }
    let players = (0..r.gen_range(1..=4))
        .map(|_| {
            let o = r.gen_range(0..nv);
            let mut d = r.gen_range(0..nv);
            while d == o {
                d = r.gen_range(0..nv);
            }
            Player { w: int(r.gen_range(1..=4)), o, d }
        })
        .collect();
    CongestionGame::new(players, net).unwrap()
}

/// Every connected labeled simple graph on `n` vertices with at most `max_m` edges.
pub fn connected_graphs(n: usize, max_m: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        if mask.count_ones() as usize > max_m {
            continue;
        }
        let e: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &p)| p).collect();
        if is_connected(n, &e) {
            out.push(e);
        }
    }
    out
}

fn is_connected(n: usize, e: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in e {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Small-graph corpus: every connected graph with 2..=`max_n` vertices and
/// at most 6 edges, each with `draws` seeded weight assignments from 1..=5.
pub fn small_graph_corpus(max_n: usize, draws: u64) -> Vec<(usize, Vec<(usize, usize)>, Vec<i64>)> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for (k, e) in connected_graphs(n, 6).into_iter().enumerate() {
            for d in 0..draws {
                let mut r = rng(1000 * n as u64 + 10 * k as u64 + d);
                let w = (0..e.len().max(n)).map(|_| r.gen_range(1..=5)).collect();
                out.push((n, e.clone(), w));
            }
        }
    }
    out
}

fn nor(a: Operand, b: Operand) -> (Operand, Operand) {
    (a, b)
}

/// Twenty NOR circuits with at most three inputs and six gates.
pub fn circuit_corpus() -> Vec<(&'static str, Circuit)> {
    let x = Input;
    let g = Gate;
    let c = |n, gates: Vec<(Operand, Operand)>, out: Vec<usize>| Circuit::new(n, gates, out).unwrap();
    vec![
        ("not", c(1, vec![nor(x(0), x(0))], vec![0])),
        ("buf", c(1, vec![nor(x(0), x(0)), nor(g(0), g(0))], vec![1])),
        ("not-buf", c(1, vec![nor(x(0), x(0)), nor(g(0), g(0))], vec![0, 1])),
        ("nor2", c(2, vec![nor(x(0), x(1))], vec![0])),
        ("or2", c(2, vec![nor(x(0), x(1)), nor(g(0), g(0))], vec![1])),
        ("and2", c(2, vec![nor(x(0), x(0)), nor(x(1), x(1)), nor(g(0), g(1))], vec![2])),
        ("id2", c(2, vec![nor(x(0), x(0)), nor(g(0), g(0)), nor(x(1), x(1)), nor(g(2), g(2))], vec![1, 3])),
        ("swap2", c(2, vec![nor(x(1), x(1)), nor(g(0), g(0)), nor(x(0), x(0)), nor(g(2), g(2))], vec![1, 3])),
        ("neg2", c(2, vec![nor(x(0), x(0)), nor(x(1), x(1))], vec![0, 1])),
        ("xnor2", c(2, vec![nor(x(0), x(1)), nor(x(0), g(0)), nor(x(1), g(0)), nor(g(1), g(2))], vec![3])),
        ("xor2", c(2, vec![nor(x(0), x(1)), nor(x(0), g(0)), nor(x(1), g(0)), nor(g(1), g(2)), nor(g(3), g(3))], vec![4])),
        ("nor-or", c(2, vec![nor(x(0), x(1)), nor(g(0), g(0))], vec![0, 1])),
        ("nor3", c(3, vec![nor(x(0), x(1)), nor(g(0), g(0)), nor(g(1), x(2))], vec![2])),
        ("or3", c(3, vec![nor(x(0), x(1)), nor(g(0), g(0)), nor(g(1), x(2)), nor(g(2), g(2))], vec![3])),
        ("maj-ish", c(3, vec![nor(x(0), x(1)), nor(x(1), x(2)), nor(g(0), g(1))], vec![2])),
        ("pass3", c(3, vec![nor(x(0), x(0)), nor(x(1), x(1)), nor(x(2), x(2))], vec![0, 1, 2])),
        ("mix3", c(3, vec![nor(x(0), x(1)), nor(x(1), x(2)), nor(g(0), g(1)), nor(g(2), x(0))], vec![3, 2])),
        ("chain3", c(3, vec![nor(x(0), x(1)), nor(g(0), x(2)), nor(g(1), x(0)), nor(g(2), x(1))], vec![3])),
        ("two-out3", c(3, vec![nor(x(0), x(2)), nor(x(1), x(1)), nor(g(0), g(1)), nor(g(2), g(2))], vec![3, 1])),
        (
            "deep3",
            c(3, vec![nor(x(0), x(1)), nor(x(1), x(2)), nor(g(0), g(1)), nor(g(2), x(0)), nor(g(3), g(1)), nor(g(4), g(2))], vec![5, 4, 3]),
        ),
    ]
}
