//! Happiness checks, restricted settling and max-gain dynamics on the
//! compact instance.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::games_core::Cut;

use super::{CfInstance, Pow2Sum};

impl CfInstance {
    /// Same-side minus opposite-side neighbor weight; positive means a flip improves.
    pub fn same_minus_opposite(&self, sides: &[u8], v: usize) -> Pow2Sum {
        let mut ids: Vec<(u32, i64)> = self
            .neighbors(v)
            .iter()
            .map(|&u| (self.weight_id[u as usize], if sides[u as usize] == sides[v] { 1 } else { -1 }))
            .collect();
        ids.sort_unstable_by_key(|t| t.0);
        let mut terms = Vec::new();
        let mut k = 0;
        while k < ids.len() {
            let id = ids[k].0;
            let mut c = 0i64;
            while k < ids.len() && ids[k].0 == id {
                c += ids[k].1;
                k += 1;
            }
            if c != 0 {
                terms.extend(self.weight_table[id as usize].terms().map(|(e, x)| (e, x * c)));
            }
        }
        Pow2Sum::from_terms(terms)
    }

    pub fn is_happy(&self, sides: &[u8], v: usize) -> bool {
        self.same_minus_opposite(sides, v).signum() <= 0
    }

    /// Every vertex that would gain by flipping.
    pub fn unhappy(&self, sides: &[u8]) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&v| !self.is_happy(sides, v)).collect()
    }

    pub fn is_local_optimum(&self, cut: &Cut) -> Result<bool> {
        if cut.len() != self.num_vertices() {
            return Err(Error::DimensionError { expected: self.num_vertices(), got: cut.len() });
        }
        Ok((0..self.num_vertices()).all(|v| self.is_happy(cut.sides(), v)))
    }

    /// First-improvement flips restricted to vertices with `free[v]`.
    /// Returns the number of flips, or `None` if `cap` ran out.
    pub fn settle(&self, sides: &mut [u8], free: &[bool], cap: usize) -> Option<usize> {
        let mut queued: Vec<bool> = free.to_vec();
        let mut work: VecDeque<usize> = (0..self.num_vertices()).filter(|&v| free[v]).collect();
        let mut flips = 0;
        while let Some(v) = work.pop_front() {
            queued[v] = false;
            if self.is_happy(sides, v) {
                continue;
            }
            if flips == cap {
                return None;
            }
            sides[v] ^= 1;
            flips += 1;
            for &u in self.neighbors(v) {
                let u = u as usize;
                if free[u] && !queued[u] {
                    queued[u] = true;
                    work.push_back(u);
                }
            }
        }
        Some(flips)
    }
}

/// How a dynamics run ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicsOutcome {
    pub cut: Cut,
    pub steps: usize,
    pub converged: bool,
}

/// Max-gain flip dynamics: always flip the vertex whose move improves its
/// payoff the most, ties broken by the larger vertex id.
pub struct MaxGainDynamics<'a> {
    inst: &'a CfInstance,
    sides: Vec<u8>,
    // a vertex is queued exactly when its bias is positive; the key is
    // recomputed on removal rather than stored twice
    bias: Vec<Pow2Sum>,
    queue: BTreeSet<(Pow2Sum, u32)>,
}

impl<'a> MaxGainDynamics<'a> {
    pub fn new(inst: &'a CfInstance, start: &Cut) -> Result<Self> {
        let n = inst.num_vertices();
        if start.len() != n {
            return Err(Error::DimensionError { expected: n, got: start.len() });
        }
        let sides = start.sides().to_vec();
        let bias: Vec<Pow2Sum> = (0..n).map(|v| inst.same_minus_opposite(&sides, v)).collect();
        let mut d = Self { inst, sides, bias, queue: BTreeSet::new() };
        for v in 0..n {
            d.enqueue(v);
        }
        Ok(d)
    }

    fn key(&self, v: usize) -> (Pow2Sum, u32) {
        (self.inst.weight(v) * &self.bias[v], v as u32)
    }

    fn enqueue(&mut self, v: usize) {
        if self.bias[v].signum() > 0 {
            self.queue.insert(self.key(v));
        }
    }

    fn dequeue(&mut self, v: usize) {
        if self.bias[v].signum() > 0 {
            let removed = self.queue.remove(&self.key(v));
            debug_assert!(removed);
        }
    }

    fn flip(&mut self, v: usize) {
        self.dequeue(v);
        self.sides[v] ^= 1;
        self.bias[v] = -&self.bias[v];
        let w2 = self.inst.weight(v).scale(2);
        for k in 0..self.inst.neighbors(v).len() {
            let u = self.inst.neighbors(v)[k] as usize;
            self.dequeue(u);
            self.bias[u] = if self.sides[u] == self.sides[v] { &self.bias[u] + &w2 } else { &self.bias[u] - &w2 };
            self.enqueue(u);
        }
    }

    /// Runs until no vertex gains or `cap` flips were made.
    pub fn run(mut self, cap: usize) -> DynamicsOutcome {
        let mut steps = 0;
        while let Some(&(_, v)) = self.queue.iter().next_back() {
            if steps == cap {
                return DynamicsOutcome { cut: Cut::new(self.sides).expect("binary sides"), steps, converged: false };
            }
            self.flip(v as usize);
            steps += 1;
        }
        DynamicsOutcome { cut: Cut::new(self.sides).expect("binary sides"), steps, converged: true }
    }
}
