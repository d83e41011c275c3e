//! Circuit-Flip instances over NOR netlists.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Gate operand: a circuit input or an earlier gate (both 0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    Input(usize),
    Gate(usize),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Input(i) => write!(f, "x{}", i + 1),
            Operand::Gate(g) => write!(f, "g{}", g + 1),
        }
    }
}

/// Bits of an input or output string.
pub type BitString = Vec<u8>;

/// Formats bits as a `0`/`1` string.
pub fn bits_to_string(b: &[u8]) -> String {
    b.iter().map(|x| if *x == 1 { '1' } else { '0' }).collect()
}

/// `k` as an `n`-bit string, most significant bit first.
pub fn bits_of(k: u64, n: usize) -> BitString {
    (0..n).map(|i| ((k >> (n - 1 - i)) & 1) as u8).collect()
}

/// NOR netlist with `n` inputs and `m` value outputs (most significant first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    n_inputs: usize,
    gates: Vec<(Operand, Operand)>,
    outputs: Vec<usize>,
    next_outputs: Option<Vec<usize>>,
}

impl Circuit {
    /// Every gate may reference only inputs and lower-listed gates.
    pub fn new(n_inputs: usize, gates: Vec<(Operand, Operand)>, outputs: Vec<usize>) -> Result<Self> {
        let c = Self { n_inputs, gates, outputs, next_outputs: None };
        c.validate()?;
        Ok(c)
    }

    /// Circuit that also declares `n` improving-neighbor outputs.
    pub fn with_next_outputs(mut self, next: Vec<usize>) -> Result<Self> {
        self.next_outputs = Some(next);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        for (k, (a, b)) in self.gates.iter().enumerate() {
            for op in [a, b] {
                match *op {
                    Operand::Input(i) if i >= self.n_inputs => {
                        return Err(Error::InvalidInstance(format!("gate g{} reads missing input x{}", k + 1, i + 1)))
                    }
                    Operand::Gate(g) if g >= k => {
                        return Err(Error::InvalidInstance(format!("gate g{} reads g{} which is not listed earlier", k + 1, g + 1)))
                    }
                    _ => {}
                }
            }
        }
        let all = self.outputs.iter().chain(self.next_outputs.iter().flatten());
        for &o in all {
            if o >= self.gates.len() {
                return Err(Error::InvalidInstance(format!("output g{} does not exist", o + 1)));
            }
        }
        if let Some(nx) = &self.next_outputs {
            if nx.len() != self.n_inputs {
                return Err(Error::DimensionError { expected: self.n_inputs, got: nx.len() });
            }
        }
        Ok(())
    }

    /// Builds a circuit from gates listed in any order, sorting them topologically.
    pub fn from_unordered(
        n_inputs: usize,
        gates: Vec<(Operand, Operand)>,
        outputs: Vec<usize>,
        next_outputs: Option<Vec<usize>>,
    ) -> Result<Self> {
        let g = gates.len();
        for (k, (a, b)) in gates.iter().enumerate() {
            for op in [a, b] {
                match *op {
                    Operand::Input(i) if i >= n_inputs => {
                        return Err(Error::InvalidInstance(format!("gate g{} reads missing input x{}", k + 1, i + 1)))
                    }
                    Operand::Gate(j) if j >= g => {
                        return Err(Error::InvalidInstance(format!("gate g{} reads missing gate g{}", k + 1, j + 1)))
                    }
                    _ => {}
                }
            }
        }
        // iterative DFS with colors
        let mut state = vec![0u8; g];
        let mut order = Vec::with_capacity(g);
        for root in 0..g {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some((v, child)) = stack.pop() {
                let ops = [gates[v].0, gates[v].1];
                if child < 2 {
                    stack.push((v, child + 1));
                    if let Operand::Gate(u) = ops[child] {
                        match state[u] {
                            0 => {
                                state[u] = 1;
                                stack.push((u, 0));
                            }
                            1 => return Err(Error::NotADag(u)),
                            _ => {}
                        }
                    }
                } else {
                    state[v] = 2;
                    order.push(v);
                }
            }
        }
        let mut new_id = vec![0; g];
        for (pos, &old) in order.iter().enumerate() {
            new_id[old] = pos;
        }
        let remap = |op: Operand| match op {
            Operand::Gate(j) => Operand::Gate(new_id[j]),
            x => x,
        };
        let sorted = order.iter().map(|&old| (remap(gates[old].0), remap(gates[old].1))).collect();
        let c = Circuit::new(n_inputs, sorted, outputs.iter().map(|&o| new_id[o]).collect())?;
        match next_outputs {
            Some(nx) => c.with_next_outputs(nx.iter().map(|&o| new_id[o]).collect()),
            None => Ok(c),
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn gates(&self) -> &[(Operand, Operand)] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn next_outputs(&self) -> Option<&[usize]> {
        self.next_outputs.as_deref()
    }

    fn check_input(&self, s: &[u8]) -> Result<()> {
        if s.len() != self.n_inputs {
            Err(Error::DimensionError { expected: self.n_inputs, got: s.len() })
        } else {
            Ok(())
        }
    }

    /// Values of every gate on input `s`.
    pub fn gate_values(&self, s: &[u8]) -> Result<Vec<u8>> {
        self.check_input(s)?;
        let mut val = Vec::with_capacity(self.gates.len());
        for &(a, b) in &self.gates {
            let get = |op: Operand, val: &Vec<u8>| match op {
                Operand::Input(i) => s[i],
                Operand::Gate(g) => val[g],
            };
            let x = get(a, &val) | get(b, &val);
            val.push(1 - x);
        }
        Ok(val)
    }

    /// Value outputs on input `s`, most significant first.
    pub fn eval(&self, s: &[u8]) -> Result<BitString> {
        let v = self.gate_values(s)?;
        Ok(self.outputs.iter().map(|&o| v[o]).collect())
    }

    /// Declared neighbor outputs on input `s`.
    pub fn eval_next(&self, s: &[u8]) -> Result<Option<BitString>> {
        let v = self.gate_values(s)?;
        Ok(self.next_outputs.as_ref().map(|nx| nx.iter().map(|&o| v[o]).collect()))
    }
}

fn to_int(bits: &[u8]) -> BigUint {
    let mut acc = BigUint::zero();
    for &b in bits {
        acc <<= 1u32;
        if b == 1 {
            acc += 1u32;
        }
    }
    acc
}

/// Gate-by-gate evaluation; output bits most significant first.
pub fn eval(c: &Circuit, input: &[u8]) -> Result<BitString> {
    c.eval(input)
}

/// Integer encoded by the outputs on `s`.
pub fn real_val(c: &Circuit, s: &[u8]) -> Result<BigUint> {
    Ok(to_int(&c.eval(s)?))
}

/// Lowest-index one-bit flip of `s` with strictly larger value, or `s` itself.
pub fn real_next(c: &Circuit, s: &[u8]) -> Result<BitString> {
    let base = real_val(c, s)?;
    for i in 0..s.len() {
        let mut t = s.to_vec();
        t[i] ^= 1;
        if real_val(c, &t)? > base {
            return Ok(t);
        }
    }
    Ok(s.to_vec())
}

/// No one-bit flip of `s` strictly increases the value.
pub fn is_flip_local_opt(c: &Circuit, s: &[u8]) -> Result<bool> {
    Ok(real_next(c, s)? == s)
}

/// Gate numbering used by the Node-Max-Cut compiler.
///
/// `index[g]` is the 1-based number of gate `g`. Value bit of significance
/// `2^(k-1)` is numbered `k`, neighbor outputs follow in input order, and
/// every gate reads only gates with larger numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateOrder {
    pub index: Vec<usize>,
}

impl GateOrder {
    /// Gate id for each number, position 0 unused.
    pub fn by_index(&self) -> Vec<usize> {
        let mut v = vec![usize::MAX; self.index.len() + 1];
        for (g, &i) in self.index.iter().enumerate() {
            v[i] = g;
        }
        v
    }
}

/// Reverse topological numbering with value bits first.
pub fn reverse_topological_order(c: &Circuit) -> Result<GateOrder> {
    let g = c.gates.len();
    let mut fanout = vec![0usize; g];
    for &(a, b) in &c.gates {
        for op in [a, b] {
            if let Operand::Gate(j) = op {
                fanout[j] += 1;
            }
        }
    }
    let m = c.outputs.len();
    let mut index = vec![0usize; g];
    let mut fixed: Vec<usize> = Vec::new();
    for (pos, &o) in c.outputs.iter().enumerate() {
        fixed.push(o);
        if index[o] != 0 {
            return Err(Error::InvalidInstance(format!("gate g{} drives two outputs", o + 1)));
        }
        index[o] = m - pos;
    }
    if let Some(nx) = &c.next_outputs {
        for (j, &o) in nx.iter().enumerate() {
            if index[o] != 0 {
                return Err(Error::InvalidInstance(format!("gate g{} drives two outputs", o + 1)));
            }
            index[o] = m + 1 + j;
            fixed.push(o);
        }
    }
    for &o in &fixed {
        if fanout[o] > 0 {
            return Err(Error::InvalidInstance(format!("output gate g{} feeds other gates", o + 1)));
        }
    }
    // remaining gates: later-listed gates get smaller numbers
    let mut next = fixed.len() + 1;
    for k in (0..g).rev() {
        if index[k] == 0 {
            index[k] = next;
            next += 1;
        }
    }
    Ok(GateOrder { index })
}

/// NOR-only circuit builder with structural hashing.
#[derive(Default)]
struct Builder {
    gates: Vec<(Operand, Operand)>,
    memo: HashMap<(Operand, Operand), Operand>,
}

impl Builder {
    fn nor(&mut self, a: Operand, b: Operand) -> Operand {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&g) = self.memo.get(&key) {
            return g;
        }
        self.gates.push(key);
        let g = Operand::Gate(self.gates.len() - 1);
        self.memo.insert(key, g);
        g
    }
    /// Fresh gate never shared with other logic.
    fn nor_fresh(&mut self, a: Operand, b: Operand) -> usize {
        self.gates.push((a, b));
        self.gates.len() - 1
    }
    fn not(&mut self, a: Operand) -> Operand {
        // NOR(NOR(x,x), NOR(x,x)) = x
        if let Operand::Gate(g) = a {
            let (x, y) = self.gates[g];
            if x == y {
                return x;
            }
        }
        self.nor(a, a)
    }
    fn or(&mut self, a: Operand, b: Operand) -> Operand {
        let t = self.nor(a, b);
        self.not(t)
    }
    fn and(&mut self, a: Operand, b: Operand) -> Operand {
        let na = self.not(a);
        let nb = self.not(b);
        self.nor(na, nb)
    }
    fn xor(&mut self, a: Operand, b: Operand) -> Operand {
        // NOR(NOR(a,b), AND(a,b))
        let both = self.and(a, b);
        let none = self.nor(a, b);
        self.nor(none, both)
    }
    fn xnor(&mut self, a: Operand, b: Operand) -> Operand {
        let x = self.xor(a, b);
        self.not(x)
    }
    /// Copies `c` with input `i` replaced by `inputs[i]`; returns value outputs.
    fn instantiate(&mut self, c: &Circuit, inputs: &[Operand]) -> Vec<Operand> {
        let mut map = Vec::with_capacity(c.gates.len());
        for &(a, b) in &c.gates {
            let tr = |op: Operand, map: &Vec<Operand>| match op {
                Operand::Input(i) => inputs[i],
                Operand::Gate(g) => map[g],
            };
            let (x, y) = (tr(a, &map), tr(b, &map));
            map.push(self.nor(x, y));
        }
        c.outputs.iter().map(|&o| map[o]).collect()
    }
    /// `a > b` for equal-length MSB-first operands.
    fn greater(&mut self, a: &[Operand], b: &[Operand]) -> Operand {
        let nb0 = self.not(b[0]);
        let mut gt = self.and(a[0], nb0);
        let mut eq = self.xnor(a[0], b[0]);
        for k in 1..a.len() {
            let nbk = self.not(b[k]);
            let here = self.and(a[k], nbk);
            let step = self.and(eq, here);
            gt = self.or(gt, step);
            let e = self.xnor(a[k], b[k]);
            eq = self.and(eq, e);
        }
        gt
    }
    /// Sink gate equal to `a` (or its complement when `negate`).
    fn sink(&mut self, a: Operand, negate: bool) -> usize {
        if negate {
            self.nor_fresh(a, a)
        } else {
            let t = self.not(a);
            self.nor_fresh(t, t)
        }
    }
}

/// Circuit computing both the value and the improving neighbor of its input.
///
/// The result has the same value outputs as `c` plus `n` neighbor outputs
/// equal to `real_next(c, s)`. All outputs are sink gates. With
/// `complement_value` the value outputs are negated.
pub fn augment_next_val_with(c: &Circuit, complement_value: bool) -> Circuit {
    let n = c.n_inputs;
    let mut b = Builder::default();
    let xs: Vec<Operand> = (0..n).map(Operand::Input).collect();
    let base = b.instantiate(c, &xs);
    let mut gts = Vec::with_capacity(n);
    for i in 0..n {
        let mut ys = xs.clone();
        ys[i] = b.not(xs[i]);
        let vi = b.instantiate(c, &ys);
        gts.push(if c.outputs.is_empty() { None } else { Some(b.greater(&vi, &base)) });
    }
    let mut next_bits = Vec::with_capacity(n);
    let mut any_before: Option<Operand> = None;
    for i in 0..n {
        let bit = match gts[i] {
            None => xs[i],
            Some(gt) => {
                let sel = match any_before {
                    None => gt,
                    Some(prev) => {
                        let np = b.not(prev);
                        b.and(gt, np)
                    }
                };
                any_before = Some(match any_before {
                    None => gt,
                    Some(prev) => b.or(prev, gt),
                });
                b.xor(xs[i], sel)
            }
        };
        next_bits.push(bit);
    }
    let outputs: Vec<usize> = base.iter().map(|&o| b.sink(o, complement_value)).collect();
    let next: Vec<usize> = next_bits.iter().map(|&o| b.sink(o, false)).collect();
    Circuit { n_inputs: n, gates: b.gates, outputs, next_outputs: Some(next) }
}

/// [`augment_next_val_with`] keeping the value outputs as they are.
pub fn augment_next_val(c: &Circuit) -> Circuit {
    augment_next_val_with(c, false)
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit {} {}", self.n_inputs, self.outputs.len())?;
        for (k, (a, b)) in self.gates.iter().enumerate() {
            writeln!(f, "g {} NOR {} {}", k + 1, a, b)?;
        }
        write!(f, "outputs")?;
        for o in &self.outputs {
            write!(f, " g{}", o + 1)?;
        }
        writeln!(f)?;
        if let Some(nx) = &self.next_outputs {
            write!(f, "next-outputs")?;
            for o in nx {
                write!(f, " g{}", o + 1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
