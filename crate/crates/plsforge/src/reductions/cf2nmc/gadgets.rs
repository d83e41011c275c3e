//! Gadget builders and the full compiler.

use crate::circuit::{augment_next_val, augment_next_val_with, reverse_topological_order, Circuit, Operand};
use crate::error::{Error, Result};

use super::{
    Builder, CfInstance, CopyName, EqName, Half, HalfLayout, Layout, NorName, NorVertices, Pow2Sum, VertexRole,
    WeightScale,
};

/// Largest scale tried by [`n_min`].
const MAX_SCALE: u32 = 4096;

/// Value-bit gates use the smaller scale so that next-output gates dominate them.
fn gate_scale(i: u32, m: u32) -> i64 {
    if i <= m {
        90
    } else {
        100
    }
}

/// Weight of NOR vertex `name` in gate `i` with scale exponent `s`.
pub(crate) fn nor_weight(sc: &WeightScale, name: NorName, i: u32, s: i64) -> Pow2Sum {
    use NorName::*;
    let delta = match name {
        B1 | B2 | B3 | C1 | C2 | C3 | V | G => 0,
        A1 | A2 | D1 | D2 => 10,
        Y1 | Z1 => -20,
        Y2 | Z2 => -10,
        Y3 | Z3 => -50,
        Rho => return sc.eps(),
    };
    sc.gate(s, i, delta)
}

/// One NOR gadget reading `inputs`. Controls get no leverage here.
pub(crate) fn nor_gadget(
    b: &mut Builder,
    half: Half,
    i: u32,
    s: i64,
    g_role: VertexRole,
    inputs: [u32; 2],
) -> NorVertices {
    use NorName::*;
    let sc = b.scale;
    let mut v = [0u32; 19];
    for &name in NorName::ALL {
        let role = if name == G { g_role } else { VertexRole::NorInternal { half, gate: i, name } };
        v[name as usize] = b.vertex(nor_weight(&sc, name, i, s), role);
    }
    let at = |n: NorName| v[n as usize];
    let unit = sc.gate(s, i, 0);
    let heavy = sc.gate(s, i, 10);
    let aux = VertexRole::Aux;
    for (t, (a, bb, c, d)) in [(A1, B1, C1, D1), (A2, B2, C2, D2)].into_iter().enumerate() {
        let input = inputs[t];
        let w_in = b.weight(input).clone();
        b.edge(input, at(a));
        b.constant(1, w_in.clone(), at(a), aux);
        b.edge(at(a), at(bb));
        b.edge(at(a), at(Rho));
        b.constant(0, heavy.clone(), at(bb), aux);
        b.edge(at(bb), at(G));
        b.edge(at(bb), at(c));
        b.edge(at(c), at(G));
        b.constant(0, unit.clone(), at(c), aux);
        b.edge(at(c), at(Z2));
        b.edge(input, at(d));
        b.constant(0, w_in, at(d), aux);
        b.edge(at(d), at(B3));
        b.edge(at(d), at(V));
    }
    b.edge(at(B3), at(G));
    b.edge(at(B3), at(C3));
    b.edge(at(C3), at(G));
    b.edge(at(C3), at(Y2));
    b.constant(1, unit.clone(), at(C3), aux);
    b.constant(0, unit.clone(), at(Z2), aux);
    b.constant(0, unit.clone(), at(Z2), aux);
    b.constant(1, unit.clone(), at(Y2), aux);
    b.edge(at(Rho), at(G));
    b.constant(0, heavy, at(Rho), aux);
    for t in [A1, A2, C1, C2, B3, V] {
        b.aux_bias(at(Y1), at(t));
    }
    for t in [B1, B2, D1, D2, C3] {
        b.aux_bias(at(Z1), at(t));
    }
    for (u, w) in [(Y1, Z1), (Z1, Y2), (Y2, Z2), (Z2, Y3), (Y3, Z3)] {
        chain_link(b, at(u), at(w), is_y(u), is_y(w));
    }
    v
}

fn is_y(n: NorName) -> bool {
    matches!(n, NorName::Y1 | NorName::Y2 | NorName::Y3)
}

/// Link `u -> w` of the control chain. A `y` is naturally 1, a `z` naturally 0.
/// `w` hears `u`'s unnatural value; `u` hears `w`'s natural value.
pub(crate) fn chain_link(b: &mut Builder, u: u32, w: u32, u_is_y: bool, w_is_y: bool) {
    b.edge(u, w);
    let wu = b.weight(u).clone();
    let ww = b.weight(w).clone();
    b.constant(u8::from(!u_is_y), wu, w, VertexRole::Aux);
    b.constant(u8::from(w_is_y), ww, u, VertexRole::Aux);
}

/// One Equality bit comparing `input` with `t`, reporting to `control`.
pub(crate) fn equality_bit(b: &mut Builder, half: Half, bit: u32, input: u32, t: u32, control: u32) -> [u32; 6] {
    use EqName::*;
    let sc = b.scale;
    let mut e = [0u32; 6];
    for &name in EqName::ALL {
        let w = match name {
            E1 | E2 | E3 => sc.e(30),
            E4 | E5 => sc.e(20),
            R => sc.e(9),
        };
        e[name as usize] = b.vertex(w, VertexRole::EqualityInternal { half, bit, name });
    }
    let at = |n: EqName| e[n as usize];
    let aux = VertexRole::Aux;
    b.edge(input, at(E1));
    b.edge(at(E1), at(E2));
    b.edge(at(E1), at(E4));
    b.edge(at(E2), at(E5));
    b.edge(t, at(E3));
    b.edge(at(E3), at(E5));
    b.edge(t, at(E4));
    b.constant(0, sc.e(20), at(E4), aux);
    b.edge(at(E4), at(R));
    b.constant(0, sc.e(20), at(E5), aux);
    b.edge(at(E5), at(R));
    b.constant(0, sc.e(20), at(R), aux);
    b.edge(at(R), control);
    e
}

/// One Copy bit of half `half`: `next` is written to `t` and, through a
/// leverage, to `target`. Without `flag` the `f` vertex is left unattached.
pub(crate) fn copy_bit(
    b: &mut Builder,
    half: Half,
    bit: u32,
    next: u32,
    flag: Option<u32>,
    target: Option<u32>,
) -> (u32, u32, u32) {
    let sc = b.scale;
    let f = b.vertex(sc.e(110), VertexRole::CopyInternal { half, bit, name: CopyName::F });
    let eta = b.vertex(sc.e(40), VertexRole::CopyInternal { half, bit, name: CopyName::Eta });
    let t = b.vertex(sc.e(30), VertexRole::T { half, bit });
    let pol = match half {
        Half::A => 0,
        Half::B => 1,
    };
    b.edge(f, eta);
    b.constant(pol, sc.e(110), eta, VertexRole::Aux);
    b.edge(next, eta);
    b.constant(pol, sc.e(40), next, VertexRole::Aux);
    b.edge(eta, t);
    let x = 30 * sc.n;
    if let Some(flag) = flag {
        b.leverage(flag, f, x);
    }
    if let Some(target) = target {
        b.leverage(eta, target, x);
    }
    (f, eta, t)
}

/// Adds `vertex` to the Comparator: an edge to `Flag` and a companion of
/// `Flag`'s weight, 0 for half `A` and 1 for half `B`.
pub(crate) fn comparator_member(b: &mut Builder, flag: u32, half: Half, vertex: u32) {
    b.edge(flag, vertex);
    let w = b.weight(flag).clone();
    let val = u8::from(half == Half::B);
    b.constant(val, w, vertex, VertexRole::Aux);
}

/// Structure of the augmented circuit a half evaluates.
struct Plan {
    circuit: Circuit,
    /// Gate id for each number `1..=M`.
    by_number: Vec<usize>,
    /// Number of each gate id.
    number: Vec<usize>,
}

impl Plan {
    fn new(c: &Circuit, complement: bool) -> Result<Self> {
        let circuit = if complement { augment_next_val_with(c, true) } else { augment_next_val(c) };
        let order = reverse_topological_order(&circuit)?;
        let by_number = order.by_index();
        Ok(Self { circuit, by_number, number: order.index })
    }

    fn gates(&self) -> u32 {
        self.number.len() as u32
    }
}

fn plans(c: &Circuit) -> Result<(Plan, Plan)> {
    if c.n_inputs() == 0 {
        return Err(Error::InvalidInstance("circuit has no inputs".into()));
    }
    Ok((Plan::new(c, false)?, Plan::new(c, true)?))
}

/// One sufficient condition on the scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub name: &'static str,
    pub lhs: Pow2Sum,
    pub rhs: Pow2Sum,
}

impl Inequality {
    pub fn holds(&self) -> bool {
        self.lhs > self.rhs
    }
}

/// Dominance conditions the gadgets rely on, for `M` gates, `n` inputs and scale `N`.
pub fn dominance_inequalities(gates: u32, n_inputs: u32, n: u32) -> Result<Vec<Inequality>> {
    let sc = WeightScale::new(n)?;
    let nn = n as i64;
    let m = gates as i64;
    let eps2 = sc.eps().scale(2);
    let control_back = (&sc.e(6) + &eps2).scale(3 * m);
    // smallest control bias reaches the heaviest controlled vertex
    let wmax = sc.gate(100, gates, -20);
    let x = (wmax.ceil_log2() - sc.e(6).floor_log2()).max(0);
    let min_bias = &sc.e(7).shl(-x) + &eps2;
    Ok(vec![
        Inequality { name: "gate offsets stay positive", lhs: Pow2Sum::pow2(nn + 1), rhs: Pow2Sum::from_int(50) },
        Inequality {
            name: "inputs dominate every gate",
            lhs: sc.e(105),
            rhs: sc.e(100).shl(nn + m + 2),
        },
        Inequality { name: "control outweighs its leverages", lhs: sc.e(7), rhs: control_back.clone() },
        Inequality { name: "equality outweighs control", lhs: sc.e(9), rhs: &sc.e(7) + &control_back },
        Inequality {
            name: "lowest value bit outweighs copy feedback on flag",
            lhs: sc.e(90).shl(nn + 2),
            rhs: (&sc.e(80) + &eps2).scale(2 * n_inputs as i64),
        },
        Inequality { name: "control bias outweighs aux vertices", lhs: min_bias, rhs: sc.e(-200).scale(16) },
    ])
}

/// Smallest scale for which every dominance condition holds.
pub fn n_min(c: &Circuit) -> Result<u32> {
    let (pa, pb) = plans(c)?;
    n_min_for(pa.gates().max(pb.gates()), c.n_inputs() as u32)
}

fn n_min_for(gates: u32, n_inputs: u32) -> Result<u32> {
    for n in 1..=MAX_SCALE {
        if dominance_inequalities(gates, n_inputs, n)?.iter().all(Inequality::holds) {
            return Ok(n);
        }
    }
    Err(Error::TooLarge(format!("no scale up to {MAX_SCALE} satisfies the dominance conditions")))
}

/// Smallest `x` with `w / 2^x <= E(6)`.
pub(crate) fn control_x(sc: &WeightScale, w: &Pow2Sum) -> u32 {
    let target = sc.e(6);
    let mut x = (w.ceil_log2() - target.floor_log2()).max(0);
    while x > 0 && w.shl(-(x - 1)) <= target {
        x -= 1;
    }
    while w.shl(-x) > target {
        x += 1;
    }
    x as u32
}

/// Vertex count of the compiled instance, computed without building it.
pub fn vertex_count(c: &Circuit, n: u32) -> Result<u64> {
    let sc = WeightScale::new(n)?;
    let (pa, pb) = plans(c)?;
    let ni = c.n_inputs() as u64;
    let m = c.n_outputs() as u32;
    // supervertices and flag
    let mut total = 3u64;
    for p in [&pa, &pb] {
        let mm = p.gates();
        // inputs, control pair and its constant
        total += ni + 2 + u64::from(ni >= 2);
        for i in 1..=mm {
            total += 19 + 13 + 10 + 11;
            if i < mm {
                total += 2;
            }
            let s = gate_scale(i, m);
            for name in [NorName::Y1, NorName::Y2, NorName::Y3, NorName::Z1, NorName::Z2, NorName::Z3] {
                total += 4 * (u64::from(control_x(&sc, &nor_weight(&sc, name, i, s))) + 1);
            }
        }
        // copy: f, eta, t, two constants, two leverages
        total += ni * (5 + 2 * 4 * (30 * n as u64 + 1));
        // equality: six vertices, three constants
        total += ni * 9;
        // comparator companions: value bits, their controls, one next control
        total += 2 * m as u64 + 1;
    }
    Ok(total)
}

/// Compiles `c` at scale `n`.
pub fn reduce_cf_to_nmc(c: &Circuit, n: u32) -> Result<CfInstance> {
    let sc = WeightScale::new(n)?;
    let (pa, pb) = plans(c)?;
    let need = n_min_for(pa.gates().max(pb.gates()), c.n_inputs() as u32)?;
    if n < need {
        return Err(Error::ScaleTooSmall { n, n_min: need });
    }
    let ni = c.n_inputs();
    let m = c.n_outputs() as u32;
    let mut b = Builder::new(sc, true);
    let (super_one, super_zero) = b.supers.expect("built with supervertices");
    let flag = b.vertex(sc.e(80), VertexRole::Flag);
    let mut halves = Vec::with_capacity(2);
    for (half, plan) in [(Half::A, &pa), (Half::B, &pb)] {
        let mut hl = HalfLayout {
            inputs: (0..ni).map(|k| b.vertex(sc.e(105), VertexRole::Input { half, bit: k as u32 })).collect(),
            ..HalfLayout::default()
        };
        hl.control = b.vertex(sc.e(7), VertexRole::Control(half));
        hl.not_control = b.vertex(sc.e(7), VertexRole::NotControl(half));
        b.edge(hl.control, hl.not_control);
        if ni >= 2 {
            b.constant(1, sc.e(9).scale(ni as i64 - 1), hl.control, VertexRole::Aux);
        }
        let mm = plan.gates();
        let mut gates: Vec<NorVertices> = vec![[0; 19]; mm as usize];
        for i in (1..=mm).rev() {
            let gid = plan.by_number[i as usize];
            let (x, y) = plan.circuit.gates()[gid];
            let op = |o: Operand| match o {
                Operand::Input(k) => hl.inputs[k],
                Operand::Gate(j) => gates[plan.number[j] - 1][NorName::G as usize],
            };
            let inputs = [op(x), op(y)];
            let g_role = if i <= m {
                VertexRole::ValOut { half, bit: i - 1 }
            } else if i <= m + ni as u32 {
                VertexRole::NextOut { half, bit: i - m - 1 }
            } else {
                VertexRole::NorInternal { half, gate: i, name: NorName::G }
            };
            let v = nor_gadget(&mut b, half, i, gate_scale(i, m), g_role, inputs);
            if i < mm {
                let prev = &gates[i as usize];
                chain_link(&mut b, prev[NorName::Z3 as usize], v[NorName::Y1 as usize], false, true);
            }
            for name in [NorName::Y1, NorName::Y2, NorName::Y3] {
                let t = v[name as usize];
                let x = control_x(&sc, b.weight(t));
                b.leverage(hl.not_control, t, x);
            }
            for name in [NorName::Z1, NorName::Z2, NorName::Z3] {
                let t = v[name as usize];
                let x = control_x(&sc, b.weight(t));
                b.leverage(hl.control, t, x);
            }
            gates[i as usize - 1] = v;
        }
        hl.gates = gates;
        halves.push(hl);
    }
    let (mut la, mut lb) = {
        let mut it = halves.into_iter();
        (it.next().unwrap(), it.next().unwrap())
    };
    for half in [Half::A, Half::B] {
        let (src, dst) = match half {
            Half::A => (&mut la, &lb),
            Half::B => (&mut lb, &la),
        };
        for k in 0..ni {
            let next = src.gates[m as usize + k][NorName::G as usize];
            let (f, eta, t) = copy_bit(&mut b, half, k as u32, next, Some(flag), Some(dst.inputs[k]));
            src.f.push(f);
            src.eta.push(eta);
            src.t.push(t);
        }
    }
    for half in [Half::A, Half::B] {
        let (me, other) = match half {
            Half::A => (&mut la, &lb),
            Half::B => (&mut lb, &la),
        };
        for k in 0..ni {
            let e = equality_bit(&mut b, half, k as u32, me.inputs[k], other.t[k], me.control);
            me.eq.push(e);
        }
    }
    for (half, hl) in [(Half::A, &la), (Half::B, &lb)] {
        let ctl = if half == Half::A { NorName::Y3 } else { NorName::Z3 };
        for i in 1..=m as usize {
            comparator_member(&mut b, flag, half, hl.gates[i - 1][NorName::G as usize]);
            comparator_member(&mut b, flag, half, hl.gates[i - 1][ctl as usize]);
        }
        comparator_member(&mut b, flag, half, hl.gates[m as usize][ctl as usize]);
    }
    let (offsets, targets) = b.finish_adjacency()?;
    let layout = Layout {
        a: la,
        b: lb,
        flag,
        super_one,
        super_zero,
        leverages: std::mem::take(&mut b.leverages),
        constants: std::mem::take(&mut b.constants),
    };
    let weight_id = std::mem::take(&mut b.weight_id);
    let roles = std::mem::take(&mut b.roles);
    Ok(CfInstance {
        scale: sc,
        weight_table: b.into_table(),
        weight_id,
        roles,
        offsets,
        targets,
        layout,
        circuit_a: pa.circuit,
        circuit_b: pb.circuit,
    })
}
