//! Intended configurations and reduction verification.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{bits_of, bits_to_string, is_flip_local_opt, reverse_topological_order, Circuit};
use crate::congestion::default_step_cap;
use crate::error::{Error, Result};
use crate::games_core::Cut;
use crate::oracle::{Direction, VerificationReport, VerifyMode, MAX_BRUTE_VERTICES};

use super::{map_back_cf, CfInstance, MaxGainDynamics, NorName, VertexRole};

/// Largest input count enumerated by the embedding check.
const MAX_EMBED_INPUTS: usize = 20;

/// The configuration a circuit local optimum is meant to embed to.
#[derive(Clone, Debug)]
pub struct IntendedReport {
    pub cut: Cut,
    /// Flips made while settling the undetermined vertices.
    pub flips: usize,
    /// False if settling ran out of its flip budget.
    pub settled: bool,
    /// Vertices left unhappy, with their roles.
    pub unhappy: Vec<(usize, VertexRole)>,
}

impl IntendedReport {
    pub fn is_local_optimum(&self) -> bool {
        self.settled && self.unhappy.is_empty()
    }

    /// Unhappy vertices counted by role category.
    pub fn unhappy_by_category(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for (_, r) in &self.unhappy {
            *m.entry(r.category()).or_insert(0) += 1;
        }
        m
    }
}

fn set_gates(c: &Circuit, gates: &[[u32; 19]], x: &[u8], sides: &mut [u8]) -> Result<()> {
    let vals = c.gate_values(x)?;
    let order = reverse_topological_order(c)?;
    for (gid, &num) in order.index.iter().enumerate() {
        let g = &gates[num - 1];
        sides[g[NorName::G as usize] as usize] = vals[gid];
        for name in [NorName::Y1, NorName::Y2, NorName::Y3] {
            sides[g[name as usize] as usize] = 1;
        }
        for name in [NorName::Z1, NorName::Z2, NorName::Z3] {
            sides[g[name as usize] as usize] = 0;
        }
    }
    Ok(())
}

/// Builds the intended configuration for input `x`: `Flag = 1`, both input
/// blocks `x`, both circuits evaluated, controls natural, `Control = 1`.
/// Gadget internals not fixed by that are settled by restricted local search.
pub fn intended_configuration(inst: &CfInstance, x: &[u8]) -> Result<IntendedReport> {
    let lay = &inst.layout;
    let n = inst.num_vertices();
    if x.len() != lay.a.inputs.len() {
        return Err(Error::DimensionError { expected: lay.a.inputs.len(), got: x.len() });
    }
    let mut sides = vec![0u8; n];
    let mut free = vec![false; n];
    sides[lay.super_one as usize] = 1;
    for &(k, val) in &lay.constants {
        sides[k as usize] = val;
    }
    sides[lay.flag as usize] = 1;
    set_gates(&inst.circuit_a, &lay.a.gates, x, &mut sides)?;
    set_gates(&inst.circuit_b, &lay.b.gates, x, &mut sides)?;
    let m = inst.circuit_a.n_outputs();
    for hl in [&lay.a, &lay.b] {
        for (k, &v) in hl.inputs.iter().enumerate() {
            sides[v as usize] = x[k];
        }
        sides[hl.control as usize] = 1;
        sides[hl.not_control as usize] = 0;
    }
    // copy A passive, copy B writes its neighbor output
    for (k, (&eta, &t)) in lay.a.eta.iter().zip(&lay.a.t).enumerate() {
        sides[lay.a.f[k] as usize] = 0;
        sides[eta as usize] = 1;
        sides[t as usize] = 0;
    }
    for (k, (&eta, &t)) in lay.b.eta.iter().zip(&lay.b.t).enumerate() {
        let next = sides[lay.b.gates[m + k][NorName::G as usize] as usize];
        sides[lay.b.f[k] as usize] = 0;
        sides[eta as usize] = 1 - next;
        sides[t as usize] = next;
    }
    for (me, other) in [(&lay.a, &lay.b), (&lay.b, &lay.a)] {
        for (k, e) in me.eq.iter().enumerate() {
            let i = sides[me.inputs[k] as usize];
            let t = sides[other.t[k] as usize];
            let vals = [1 - i, i, 1 - t, u8::from(i == t), u8::from(i == t), u8::from(i != t)];
            for (v, val) in e.iter().zip(vals) {
                sides[*v as usize] = val;
                free[*v as usize] = true;
            }
        }
    }
    for site in &lay.leverages {
        let a = sides[site.a as usize];
        for k in 0..=site.x {
            let base = (site.first + 4 * k) as usize;
            for j in 0..4 {
                sides[base + j] = if j < 2 { 1 - a } else { a };
                free[base + j] = true;
            }
        }
    }
    for (v, r) in inst.roles.iter().enumerate() {
        match r {
            VertexRole::NorInternal { name, .. } => {
                use NorName::*;
                if !matches!(name, G | Y1 | Y2 | Y3 | Z1 | Z2 | Z3) {
                    free[v] = true;
                }
            }
            VertexRole::Aux => free[v] = true,
            _ => {}
        }
    }
    for &(k, _) in &lay.constants {
        free[k as usize] = false;
    }
    let budget = 50 * free.iter().filter(|&&f| f).count() + 1000;
    let (flips, settled) = match inst.settle(&mut sides, &free, budget) {
        Some(f) => (f, true),
        None => (budget, false),
    };
    let unhappy = inst.unhappy(&sides).into_iter().map(|v| (v, inst.roles[v])).collect();
    Ok(IntendedReport { cut: Cut::new(sides)?, flips, settled, unhappy })
}

fn summarize(rep: &IntendedReport) -> String {
    let cats: Vec<String> = rep.unhappy_by_category().iter().map(|(c, k)| format!("{c}:{k}")).collect();
    let first: Vec<String> = rep.unhappy.iter().take(3).map(|(v, r)| format!("{v} ({r})")).collect();
    let mut s = format!("{} unhappy [{}], e.g. {}", rep.unhappy.len(), cats.join(" "), first.join(", "));
    if !rep.settled {
        s.push_str("; settling hit its flip budget");
    }
    s
}

/// Checks the compiled instance against its source circuit.
pub fn verify(id: &str, source: &Circuit, inst: &CfInstance, mode: VerifyMode) -> Result<VerificationReport> {
    match mode {
        VerifyMode::EmbedCheck => {
            let n = source.n_inputs();
            if n > MAX_EMBED_INPUTS {
                return Err(Error::TooLarge(format!("{n} inputs, at most {MAX_EMBED_INPUTS} enumerated")));
            }
            let mut rep = VerificationReport::new(id, Direction::Forward);
            for k in 0..1u64 << n {
                let x = bits_of(k, n);
                if !is_flip_local_opt(source, &x)? {
                    continue;
                }
                rep.checked += 1;
                let r = intended_configuration(inst, &x)?;
                if !r.is_local_optimum() {
                    rep.counterexamples.push(format!("input {}: {}", bits_to_string(&x), summarize(&r)));
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
                let start: Vec<u8> = (0..inst.num_vertices()).map(|_| rng.gen_range(0..2u8)).collect();
                let out = MaxGainDynamics::new(inst, &Cut::new(start)?)?.run(cap);
                if !out.converged {
                    rep.unconverged += 1;
                    continue;
                }
                rep.checked += 1;
                let bits = map_back_cf(&inst.map(), &out.cut)?;
                if !is_flip_local_opt(source, &bits)? {
                    rep.counterexamples.push(format!(
                        "seed {s}: local optimum after {} flips maps back to {}, not flip-optimal",
                        out.steps,
                        bits_to_string(&bits)
                    ));
                }
            }
            Ok(rep)
        }
        VerifyMode::Exhaustive => {
            let n = inst.num_vertices();
            if n > MAX_BRUTE_VERTICES {
                return Err(Error::TooLarge(format!(
                    "compiled instance has {n} vertices, exhaustive search handles {MAX_BRUTE_VERTICES}"
                )));
            }
            let g = inst.to_graph(1 << 20)?;
            let mut rep = VerificationReport::new(id, Direction::Backward);
            for c in crate::oracle::brute_local_optima(&g)? {
                for s in [c.clone(), c.complement()] {
                    rep.checked += 1;
                    let bits = map_back_cf(&inst.map(), &s)?;
                    if !is_flip_local_opt(source, &bits)? {
                        rep.counterexamples.push(format!("cut {s} maps back to {}", bits_to_string(&bits)));
                    }
                }
            }
            Ok(rep)
        }
    }
}
