//! Node-Max-Cut to multi-commodity congestion games with identity latencies.
//!
//! Each part (upper and lower) is a half grid: row `r` holds cells
//! `(r,1)..(r,r)`. Player `i` enters at `(i,1)`, runs along row `i` to the
//! diagonal, then down column `i` and leaves from `(n,i)`. For a source
//! edge `{i,j}`, `i<j`, cell `(j,i)` is split in two by a shared edge
//! `e_ij`. Every constant-latency edge `{x,y}` is replaced by the path
//! `x - o_xy - d_xy - y` with a complementary player of weight equal to the
//! constant: `D` for origin, destination and vertical edges, `r·d` for
//! horizontal edges on row `r`, where `d = n³·Σw` and `D = n³·d`.

use std::collections::HashMap;

use crate::congestion::{CongestionGame, LinearLatency, Network, Path, Player, Profile};
use crate::error::{Error, Result};
use crate::games_core::{Cut, VertexWeightedGraph};
use crate::weight::{int, Weight};

/// Constant-cost edge realized by a complementary player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantEdge {
    pub x: usize,
    pub y: usize,
    /// Edge ids `x–o`, `o–d`, `d–y`.
    pub edges: [usize; 3],
    pub player: usize,
    pub constant: Weight,
}

impl ConstantEdge {
    fn walk_from(&self, from: usize) -> [usize; 3] {
        let [a, b, c] = self.edges;
        if from == self.x {
            [a, b, c]
        } else {
            [c, b, a]
        }
    }
}

/// Data needed to map profiles back to cuts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nmc2MultiMap {
    pub n: usize,
    /// `p_i^u` per primary player.
    pub upper: Vec<Path>,
    /// `p_i^l` per primary player.
    pub lower: Vec<Path>,
    /// Complementary players and their middle edges.
    pub constants: Vec<ConstantEdge>,
    pub d_small: Weight,
    pub d_big: Weight,
}

impl Nmc2MultiMap {
    /// The intended cost `2D + i(i−1)d + (n−i)D` of player `i` (1-based) without shared edges.
    pub fn intended_base_cost(&self, i: usize) -> Weight {
        let n = self.n as i64;
        let i = i as i64;
        int(2) * &self.d_big + int(i * (i - 1)) * &self.d_small + int(n - i) * &self.d_big
    }
}

struct Part {
    /// First and second vertex of each cell, indexed by (row, col) 1-based.
    cells: HashMap<(usize, usize), (usize, usize)>,
    /// Shared edge inside split cells.
    split: HashMap<(usize, usize), usize>,
    /// Constant edge between consecutive cells, keyed by the unordered cell pair.
    links: HashMap<((usize, usize), (usize, usize)), usize>,
    entry: Vec<usize>,
    exit: Vec<usize>,
}

struct Builder {
    net: Network,
    players: Vec<Player>,
    constants: Vec<ConstantEdge>,
}

impl Builder {
    fn constant(&mut self, x: usize, y: usize, c: Weight) -> usize {
        let o = self.net.add_vertex();
        let d = self.net.add_vertex();
        let id = LinearLatency::identity;
        let e1 = self.net.add_edge(x, o, id(), None).unwrap();
        let e2 = self.net.add_edge(o, d, id(), Some(format!("const{}", self.constants.len()))).unwrap();
        let e3 = self.net.add_edge(d, y, id(), None).unwrap();
        let player = self.players.len();
        self.players.push(Player { w: c.clone(), o, d });
        self.constants.push(ConstantEdge { x, y, edges: [e1, e2, e3], player, constant: c });
        self.constants.len() - 1
    }
}

fn build_part(
    b: &mut Builder,
    h: &VertexWeightedGraph,
    origins: &[usize],
    dests: &[usize],
    d_small: &Weight,
    d_big: &Weight,
    tag: char,
) -> Part {
    let n = origins.len();
    let adjacent = |i: usize, j: usize| h.neighbors(i - 1).contains(&(j - 1));
    let mut cells = HashMap::new();
    let mut split = HashMap::new();
    for r in 1..=n {
        for c in 1..=r {
            let first = b.net.add_vertex();
            if c < r && adjacent(c, r) {
                let second = b.net.add_vertex();
                let e = b.net.add_edge(first, second, LinearLatency::identity(), Some(format!("{tag}e{c},{r}"))).unwrap();
                split.insert((r, c), e);
                cells.insert((r, c), (first, second));
            } else {
                cells.insert((r, c), (first, first));
            }
        }
    }
    let mut links = HashMap::new();
    for r in 1..=n {
        for c in 1..r {
            // horizontal (r,c) -> (r,c+1) costs r·d
            let k = b.constant(cells[&(r, c)].1, cells[&(r, c + 1)].0, int(r as i64) * d_small);
            links.insert(((r, c), (r, c + 1)), k);
        }
    }
    for c in 1..=n {
        for r in c..n {
            // vertical (r,c) -> (r+1,c) costs D
            let k = b.constant(cells[&(r, c)].1, cells[&(r + 1, c)].0, d_big.clone());
            links.insert(((r, c), (r + 1, c)), k);
        }
    }
    let entry = (1..=n).map(|i| b.constant(origins[i - 1], cells[&(i, 1)].0, d_big.clone())).collect();
    let exit = (1..=n).map(|i| b.constant(cells[&(n, i)].1, dests[i - 1], d_big.clone())).collect();
    Part { cells, split, links, entry, exit }
}

fn intended_path(b: &Builder, part: &Part, n: usize, i: usize, origin: usize) -> Path {
    let mut cellseq: Vec<(usize, usize)> = (1..=i).map(|c| (i, c)).collect();
    cellseq.extend((i + 1..=n).map(|r| (r, i)));
    let mut path = Vec::new();
    let entry = &b.constants[part.entry[i - 1]];
    path.extend(entry.walk_from(origin));
    for (k, cell) in cellseq.iter().enumerate() {
        if let Some(&e) = part.split.get(cell) {
            path.push(e);
        }
        if let Some(next) = cellseq.get(k + 1) {
            let link = &b.constants[part.links[&(*cell, *next)]];
            path.extend(link.walk_from(part.cells[cell].1));
        }
    }
    let exit = &b.constants[part.exit[i - 1]];
    path.extend(exit.walk_from(part.cells[&(n, i)].1));
    path
}

/// Builds the game and its solution map.
pub fn reduce_nmc_to_multi(h: &VertexWeightedGraph) -> Result<(CongestionGame, Nmc2MultiMap)> {
    let n = h.weights().len();
    if n < 2 {
        return Err(Error::InvalidInstance("need at least two vertices".into()));
    }
    let total: Weight = h.weights().iter().sum();
    let n3 = int((n * n * n) as i64);
    let d_small = &n3 * &total;
    let d_big = &n3 * &d_small;
    let mut b = Builder { net: Network::new(0), players: Vec::new(), constants: Vec::new() };
    let origins: Vec<usize> = (0..n).map(|_| b.net.add_vertex()).collect();
    let dests: Vec<usize> = (0..n).map(|_| b.net.add_vertex()).collect();
    for i in 0..n {
        b.players.push(Player { w: h.weight(i).clone(), o: origins[i], d: dests[i] });
    }
    let up = build_part(&mut b, h, &origins, &dests, &d_small, &d_big, 'u');
    let low = build_part(&mut b, h, &origins, &dests, &d_small, &d_big, 'l');
    let upper = (1..=n).map(|i| intended_path(&b, &up, n, i, origins[i - 1])).collect();
    let lower = (1..=n).map(|i| intended_path(&b, &low, n, i, origins[i - 1])).collect();
    let game = CongestionGame::new(b.players, b.net)?;
    Ok((game, Nmc2MultiMap { n, upper, lower, constants: b.constants, d_small, d_big }))
}

/// Primary players on `p^u` for side 1, `p^l` otherwise; complementary players on their middle edge.
pub fn embed_cut_to_multi(sm: &Nmc2MultiMap, s: &Cut) -> Result<Profile> {
    if s.len() != sm.n {
        return Err(Error::DimensionError { expected: sm.n, got: s.len() });
    }
    let mut paths: Vec<Path> =
        (0..sm.n).map(|i| if s.side(i) == 1 { sm.upper[i].clone() } else { sm.lower[i].clone() }).collect();
    paths.extend(sm.constants.iter().map(|c| vec![c.edges[1]]));
    Ok(Profile::new(paths))
}

/// Side 1 holds the primary players routed on `p^u`.
pub fn map_back_multi(sm: &Nmc2MultiMap, p: &Profile) -> Result<Cut> {
    if p.paths.len() != sm.n + sm.constants.len() {
        return Err(Error::DimensionError { expected: sm.n + sm.constants.len(), got: p.paths.len() });
    }
    let mut cut = Cut::zeros(sm.n);
    for i in 0..sm.n {
        if p.paths[i] == sm.upper[i] {
            cut.set_side(i, 1);
        } else if p.paths[i] != sm.lower[i] {
            return Err(Error::NotCanonical(format!("player {i} is on neither designated path")));
        }
    }
    Ok(cut)
}

/// Complementary players all on their middle edges.
pub fn constants_on_middle(sm: &Nmc2MultiMap, p: &Profile) -> bool {
    sm.constants.iter().all(|c| p.paths.get(c.player) == Some(&vec![c.edges[1]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congestion::{congestion_and_costs, is_pne};

    #[test]
    fn constants_of_k2() {
        let h = VertexWeightedGraph::new(vec![int(1), int(1)], vec![(0, 1)]).unwrap();
        let (g, sm) = reduce_nmc_to_multi(&h).unwrap();
        assert_eq!(sm.d_small, int(16));
        assert_eq!(sm.d_big, int(128));
        // per part: 2 entries, 2 exits, 1 horizontal, 1 vertical
        assert_eq!(sm.constants.len(), 12);
        assert_eq!(g.players.len(), 2 + sm.constants.len());
    }

    #[test]
    fn intended_costs() {
        let h = VertexWeightedGraph::new(vec![int(2), int(1), int(3)], vec![(0, 2), (1, 2)]).unwrap();
        let (g, sm) = reduce_nmc_to_multi(&h).unwrap();
        let cut = Cut::from_set(3, &[2]);
        let p = embed_cut_to_multi(&sm, &cut).unwrap();
        assert!(constants_on_middle(&sm, &p));
        let (_, costs) = congestion_and_costs(&g, &p).unwrap();
        // every constant edge adds 3 identity edges: 2·load on the ends plus the constant in the middle
        for i in 0..3 {
            let path = if cut.side(i) == 1 { &sm.upper[i] } else { &sm.lower[i] };
            assert!(g.net.is_simple_path(g.players[i].o, g.players[i].d, path));
            let base = sm.intended_base_cost(i + 1);
            assert!(costs[i] >= base);
        }
        assert_eq!(map_back_multi(&sm, &p).unwrap(), cut);
        assert!(is_pne(&g, &p, &int(0)).unwrap());
    }
}
