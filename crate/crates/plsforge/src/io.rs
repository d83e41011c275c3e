//! Text formats for every artifact, each behind a one-line manifest header.
//!
//! ```text
//! %plsforge v1 <kind> sha256:<hex or -> [provenance ...]
//! ```
//!
//! The checksum covers the body (everything after the header line). `-`
//! skips the check, which is handy for hand-written files. Blank lines and
//! lines starting with `#` are ignored in bodies.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::circuit::{Circuit, Operand};
use crate::congestion::{CongestionGame, LinearLatency, Network, Path, Player, Profile};
use crate::error::{Error, Result};
use crate::games_core::{Cut, CutGraph, EdgeWeightedGraph, VertexWeightedGraph};
use crate::oracle::{Direction, VerificationReport};
use crate::reductions::cf2nmc::{CfInstance, VertexRole};
use crate::reductions::nmc2multi::ConstantEdge;
use crate::reductions::{Mc2SpMap, Nmc2MultiMap};
use crate::weight::{format_weight, parse_weight, Weight};

pub const FORMAT_VERSION: &str = "v1";
const MAGIC: &str = "%plsforge";

/// What a file holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Graph,
    Cut,
    Netlist,
    Game,
    Profile,
    Roles,
    Report,
}

impl Kind {
    pub const ALL: [Kind; 7] = [Kind::Graph, Kind::Cut, Kind::Netlist, Kind::Game, Kind::Profile, Kind::Roles, Kind::Report];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Graph => "graph",
            Kind::Cut => "cut",
            Kind::Netlist => "netlist",
            Kind::Game => "game",
            Kind::Profile => "profile",
            Kind::Roles => "roles",
            Kind::Report => "report",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Kind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| format!("unknown kind `{s}`"))
    }
}

/// File header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub version: String,
    pub kind: Kind,
    /// Hex SHA-256 of the body, or `None` when the file opts out.
    pub checksum: Option<String>,
    /// Which tool, reduction or seed produced the file.
    pub provenance: String,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn sha256_hex(body: &str) -> String {
    Sha256::digest(body.as_bytes()).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Prepends a manifest to `body`.
pub fn wrap(kind: Kind, provenance: &str, body: &str) -> String {
    let prov = provenance.replace(['\n', '\r'], " ");
    let mut out = format!("{MAGIC} {FORMAT_VERSION} {kind} sha256:{}", sha256_hex(body));
    if !prov.trim().is_empty() {
        out.push(' ');
        out.push_str(prov.trim());
    }
    out.push('\n');
    out.push_str(body);
    out
}

/// Splits off and checks the manifest. Returns it with the body.
pub fn unwrap(text: &str, expected: Kind) -> Result<(Manifest, &str)> {
    let (head, body) = match text.split_once('\n') {
        Some((h, b)) => (h.trim_end_matches('\r'), b),
        None => (text, ""),
    };
    let toks = tokens(head);
    let at = |k: usize, toks: &[(usize, &str)]| toks.get(k).map_or(head.len() + 1, |t| t.0);
    match toks.first() {
        Some((_, m)) if *m == MAGIC => {}
        _ => return Err(perr(1, 1, format!("missing `{MAGIC}` header"))),
    }
    let version = toks.get(1).map(|t| t.1).ok_or_else(|| perr(1, at(1, &toks), "missing version"))?;
    if version != FORMAT_VERSION {
        return Err(perr(1, at(1, &toks), format!("unsupported format version `{version}`")));
    }
    let kind_tok = toks.get(2).map(|t| t.1).ok_or_else(|| perr(1, at(2, &toks), "missing kind"))?;
    let kind: Kind = kind_tok.parse().map_err(|e: String| perr(1, at(2, &toks), e))?;
    if kind != expected {
        return Err(perr(1, at(2, &toks), format!("expected a {expected} file, got {kind}")));
    }
    let sum = toks.get(3).map(|t| t.1).ok_or_else(|| perr(1, at(3, &toks), "missing checksum"))?;
    let sum = sum.strip_prefix("sha256:").ok_or_else(|| perr(1, at(3, &toks), "checksum must start with `sha256:`"))?;
    let checksum = if sum == "-" {
        None
    } else {
        let actual = sha256_hex(body);
        if !sum.eq_ignore_ascii_case(&actual) {
            return Err(perr(1, at(3, &toks), "checksum does not match the body"));
        }
        Some(actual)
    };
    let provenance = match toks.get(4) {
        Some(&(col, _)) => head[col - 1..].trim().to_string(),
        None => String::new(),
    };
    Ok((Manifest { version: version.to_string(), kind, checksum, provenance }, body))
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// One meaningful body line.
struct Line<'a> {
    no: usize,
    toks: Vec<(usize, &'a str)>,
    eol: usize,
}

impl<'a> Line<'a> {
    fn err(&self, k: usize, msg: impl Into<String>) -> Error {
        let col = self.toks.get(k).map_or(self.eol, |t| t.0);
        perr(self.no, col, msg)
    }

    fn tok(&self, k: usize, what: &str) -> Result<&'a str> {
        self.toks.get(k).map(|t| t.1).ok_or_else(|| self.err(k, format!("missing {what}")))
    }

    fn num<T: FromStr>(&self, k: usize, what: &str) -> Result<T> {
        let t = self.tok(k, what)?;
        t.parse().map_err(|_| self.err(k, format!("bad {what} `{t}`")))
    }

    fn weight(&self, k: usize, what: &str) -> Result<Weight> {
        let t = self.tok(k, what)?;
        parse_weight_expr(t).map_err(|e| self.err(k, format!("bad {what}: {e}")))
    }

    fn arity(&self, lo: usize, hi: usize) -> Result<()> {
        if self.toks.len() < lo {
            return Err(self.err(self.toks.len(), "too few fields"));
        }
        if self.toks.len() > hi {
            return Err(self.err(hi, "unexpected trailing field"));
        }
        Ok(())
    }

    fn head(&self) -> &'a str {
        self.toks[0].1
    }

    fn rest_from(&self, raw: &'a str, k: usize) -> &'a str {
        self.toks.get(k).map_or("", |t| &raw[t.0 - 1..])
    }
}

struct Body<'a> {
    lines: Vec<(Line<'a>, &'a str)>,
    pos: usize,
    last: usize,
}

impl<'a> Body<'a> {
    /// `first` is the file line number of the body's first line.
    fn new(body: &'a str, first: usize) -> Self {
        let mut lines = Vec::new();
        let mut last = first;
        for (k, raw) in body.lines().enumerate() {
            let raw = raw.trim_end_matches('\r');
            last = first + k;
            let t = raw.trim_start();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            lines.push((Line { no: first + k, toks: tokens(raw), eol: raw.len() + 1 }, raw));
        }
        Self { lines, pos: 0, last }
    }

    fn next(&mut self, what: &str) -> Result<&(Line<'a>, &'a str)> {
        let last = self.last;
        let l = self.lines.get(self.pos).ok_or_else(|| perr(last, 1, format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok(l)
    }

    fn peek_head(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|l| l.0.head())
    }

    fn finish(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            Some((l, _)) => Err(l.err(0, "unexpected extra line")),
            None => Ok(()),
        }
    }
}

fn expect_head(l: &Line<'_>, head: &str) -> Result<()> {
    if l.head() == head {
        Ok(())
    } else {
        Err(l.err(0, format!("expected `{head}`, got `{}`", l.head())))
    }
}

/// Parses a weight that may be a signed sum of literals, such as
/// `2^700-2^602+2^600` or `3/4+2^-10`.
pub fn parse_weight_expr(s: &str) -> std::result::Result<Weight, String> {
    let b = s.as_bytes();
    let mut total = Weight::from_integer(0.into());
    let mut start = 0;
    let mut neg = false;
    if b.first() == Some(&b'-') {
        neg = true;
        start = 1;
    }
    let mut k = start;
    loop {
        let end = k == b.len();
        let split = !end && (b[k] == b'+' || b[k] == b'-') && k > start && b[k - 1] != b'^';
        if end || split {
            let term = parse_weight(&s[start..k])?;
            if neg {
                total -= term;
            } else {
                total += term;
            }
            if end {
                return Ok(total);
            }
            neg = b[k] == b'-';
            start = k + 1;
        }
        k += 1;
    }
}

// ---- graphs -------------------------------------------------------------

/// A graph file: Max-Cut with edge weights or Node-Max-Cut with vertex weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphFile {
    Mc(EdgeWeightedGraph),
    Nmc(VertexWeightedGraph),
}

pub fn emit_graph(g: &GraphFile) -> String {
    let mut s = String::new();
    match g {
        GraphFile::Mc(h) => {
            let _ = writeln!(s, "mc {} {}", h.num_vertices(), h.edges().len());
            for v in 0..h.num_vertices() {
                let _ = writeln!(s, "v {v}");
            }
            for (u, v, w) in h.edges() {
                let _ = writeln!(s, "e {u} {v} {}", format_weight(w));
            }
        }
        GraphFile::Nmc(h) => {
            let _ = writeln!(s, "nmc {} {}", h.weights().len(), h.edges().len());
            for (v, w) in h.weights().iter().enumerate() {
                let _ = writeln!(s, "v {v} {}", format_weight(w));
            }
            for (u, v) in h.edges() {
                let _ = writeln!(s, "e {u} {v}");
            }
        }
    }
    s
}

/// Node-Max-Cut file straight from a compiled circuit instance, with
/// exponent-coded weights.
pub fn emit_cf_graph(inst: &CfInstance) -> String {
    let mut s = String::with_capacity(inst.num_vertices() * 32 + inst.num_edges() * 16);
    let _ = writeln!(s, "nmc {} {}", inst.num_vertices(), inst.num_edges());
    for v in 0..inst.num_vertices() {
        let _ = writeln!(s, "v {v} {}", inst.weight(v));
    }
    for (u, v) in inst.edges() {
        let _ = writeln!(s, "e {u} {v}");
    }
    s
}

fn parse_graph_body(body: &str, first: usize) -> Result<GraphFile> {
    let mut b = Body::new(body, first);
    let (h, _) = b.next("a `mc` or `nmc` header")?;
    let nmc = match h.head() {
        "mc" => false,
        "nmc" => true,
        other => return Err(h.err(0, format!("expected `mc` or `nmc`, got `{other}`"))),
    };
    h.arity(3, 3)?;
    let n: usize = h.num(1, "vertex count")?;
    let m: usize = h.num(2, "edge count")?;
    let header_line = h.no;
    let mut weights: Vec<Option<Weight>> = vec![None; n];
    let mut seen = vec![false; n];
    for _ in 0..n {
        let (l, _) = b.next("a vertex line")?;
        expect_head(l, "v")?;
        if nmc {
            l.arity(3, 3)?;
        } else {
            l.arity(2, 3)?;
        }
        let id: usize = l.num(1, "vertex id")?;
        if id >= n {
            return Err(l.err(1, format!("vertex {id} out of range 0..{n}")));
        }
        if seen[id] {
            return Err(l.err(1, format!("vertex {id} listed twice")));
        }
        seen[id] = true;
        if l.toks.len() == 3 {
            weights[id] = Some(l.weight(2, "vertex weight")?);
        }
    }
    let mut mc_edges = Vec::new();
    let mut nmc_edges = Vec::new();
    let mut edge_lines = Vec::new();
    for _ in 0..m {
        let (l, _) = b.next("an edge line")?;
        expect_head(l, "e")?;
        if nmc {
            if l.toks.len() == 4 {
                return Err(l.err(3, "edge weights are not allowed in an nmc graph"));
            }
            l.arity(3, 3)?;
        } else {
            if l.toks.len() == 3 {
                return Err(l.err(3, "edge weight required in an mc graph"));
            }
            l.arity(4, 4)?;
        }
        let u: usize = l.num(1, "endpoint")?;
        let v: usize = l.num(2, "endpoint")?;
        for (k, x) in [(1, u), (2, v)] {
            if x >= n {
                return Err(l.err(k, format!("vertex {x} out of range 0..{n}")));
            }
        }
        edge_lines.push(l.no);
        if nmc {
            nmc_edges.push((u, v));
        } else {
            mc_edges.push((u, v, l.weight(3, "edge weight")?));
        }
    }
    b.finish()?;
    let blame = |e: Error| -> Error {
        match e {
            Error::Parse { .. } => e,
            other => perr(header_line, 1, other.to_string()),
        }
    };
    if nmc {
        let w: Vec<Weight> = weights.into_iter().map(|w| w.expect("nmc vertex lines carry weights")).collect();
        VertexWeightedGraph::new(w, nmc_edges).map(GraphFile::Nmc).map_err(blame)
    } else {
        EdgeWeightedGraph::new(n, mc_edges).map(GraphFile::Mc).map_err(blame)
    }
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let (_, body) = unwrap(text, Kind::Graph)?;
    parse_graph_body(body, 2)
}

// ---- cuts ---------------------------------------------------------------

pub fn emit_cut(c: &Cut) -> String {
    format!("{c}\n")
}

pub fn parse_cut(text: &str) -> Result<Cut> {
    let (_, body) = unwrap(text, Kind::Cut)?;
    let mut b = Body::new(body, 2);
    let (l, raw) = b.next("a cut line")?;
    l.arity(1, 1)?;
    let t = raw.trim();
    let col = l.toks[0].0;
    if let Some(k) = t.bytes().position(|c| c != b'0' && c != b'1') {
        return Err(perr(l.no, col + k, "cut characters must be 0 or 1"));
    }
    let cut = Cut::new(t.bytes().map(|c| c - b'0').collect())?;
    b.finish()?;
    Ok(cut)
}

// ---- netlists -----------------------------------------------------------

pub fn emit_netlist(c: &Circuit) -> String {
    c.to_string()
}

fn gate_ref(l: &Line<'_>, k: usize, gates: usize) -> Result<usize> {
    let t = l.tok(k, "gate reference")?;
    let id: usize = t.strip_prefix('g').and_then(|d| d.parse().ok()).ok_or_else(|| l.err(k, format!("bad gate reference `{t}`")))?;
    if id == 0 || id > gates {
        return Err(l.err(k, format!("gate g{id} out of range g1..g{gates}")));
    }
    Ok(id - 1)
}

pub fn parse_netlist(text: &str) -> Result<Circuit> {
    let (_, body) = unwrap(text, Kind::Netlist)?;
    let mut b = Body::new(body, 2);
    let (h, _) = b.next("a `circuit` header")?;
    expect_head(h, "circuit")?;
    h.arity(3, 3)?;
    let n: usize = h.num(1, "input count")?;
    let m: usize = h.num(2, "output count")?;
    let mut gates: Vec<(usize, Operand, Operand, usize)> = Vec::new();
    while b.peek_head() == Some("g") {
        let (l, _) = b.next("a gate")?;
        l.arity(5, 5)?;
        let id: usize = l.tok(1, "gate id")?.parse().map_err(|_| l.err(1, "bad gate id"))?;
        if l.tok(2, "gate type")? != "NOR" {
            return Err(l.err(2, "only NOR gates are supported"));
        }
        let op = |k: usize| -> Result<(Operand, usize)> {
            let t = l.tok(k, "operand")?;
            let (kind, d) = t.split_at(1.min(t.len()));
            let x: usize = d.parse().map_err(|_| l.err(k, format!("bad operand `{t}`")))?;
            match kind {
                _ if x == 0 => Err(l.err(k, format!("operand `{t}`: numbering starts at 1"))),
                "x" if x > n => Err(l.err(k, format!("input x{x} out of range x1..x{n}"))),
                "x" => Ok((Operand::Input(x - 1), k)),
                "g" => Ok((Operand::Gate(x - 1), k)),
                _ => Err(l.err(k, format!("bad operand `{t}`"))),
            }
        };
        gates.push((id, op(3)?.0, op(4)?.0, l.no));
    }
    let count = gates.len();
    let mut slot = vec![None; count];
    for &(id, a, bb, no) in &gates {
        if id == 0 || id > count {
            return Err(perr(no, 3, format!("gate id {id} out of range 1..{count}")));
        }
        if slot[id - 1].is_some() {
            return Err(perr(no, 3, format!("gate g{id} defined twice")));
        }
        for op in [a, bb] {
            if let Operand::Gate(j) = op {
                if j >= count {
                    return Err(perr(no, 1, format!("gate g{id} reads undefined gate g{}", j + 1)));
                }
            }
        }
        slot[id - 1] = Some((a, bb));
    }
    let (l, _) = b.next("an `outputs` line")?;
    expect_head(l, "outputs")?;
    if l.toks.len() != m + 1 {
        return Err(l.err(l.toks.len().min(m + 1), format!("expected {m} outputs")));
    }
    let outputs = (1..=m).map(|k| gate_ref(l, k, count)).collect::<Result<Vec<_>>>()?;
    let out_line = l.no;
    let mut next = None;
    if b.peek_head() == Some("next-outputs") {
        let (l, _) = b.next("next outputs")?;
        if l.toks.len() != n + 1 {
            return Err(l.err(l.toks.len().min(n + 1), format!("expected {n} next outputs")));
        }
        next = Some((1..=n).map(|k| gate_ref(l, k, count)).collect::<Result<Vec<_>>>()?);
    }
    b.finish()?;
    let gates: Vec<(Operand, Operand)> = slot.into_iter().map(|s| s.expect("every slot filled")).collect();
    Circuit::from_unordered(n, gates, outputs, next).map_err(|e| perr(out_line, 1, e.to_string()))
}

// ---- games and profiles -------------------------------------------------

pub fn emit_game(g: &CongestionGame) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "wcg {} {} {}", g.players.len(), g.net.num_vertices(), g.net.num_edges());
    for p in &g.players {
        let _ = writeln!(s, "p {} {} {}", format_weight(&p.w), p.o, p.d);
    }
    for e in g.net.edges() {
        let _ = write!(s, "e {} {} {} {}", e.u, e.v, format_weight(&e.latency.a), format_weight(&e.latency.b));
        if let Some(l) = &e.label {
            let _ = write!(s, " {l}");
        }
        s.push('\n');
    }
    s
}

pub fn parse_game(text: &str) -> Result<CongestionGame> {
    let (_, body) = unwrap(text, Kind::Game)?;
    let mut b = Body::new(body, 2);
    let (h, _) = b.next("a `wcg` header")?;
    expect_head(h, "wcg")?;
    h.arity(4, 4)?;
    let np: usize = h.num(1, "player count")?;
    let nv: usize = h.num(2, "vertex count")?;
    let ne: usize = h.num(3, "edge count")?;
    let header = h.no;
    let mut players = Vec::with_capacity(np);
    for _ in 0..np {
        let (l, _) = b.next("a player line")?;
        expect_head(l, "p")?;
        l.arity(4, 4)?;
        let w = l.weight(1, "player weight")?;
        let o: usize = l.num(2, "origin")?;
        let d: usize = l.num(3, "destination")?;
        for (k, x) in [(2, o), (3, d)] {
            if x >= nv {
                return Err(l.err(k, format!("vertex {x} out of range 0..{nv}")));
            }
        }
        players.push(Player { w, o, d });
    }
    let mut net = Network::new(nv);
    for _ in 0..ne {
        let (l, _) = b.next("an edge line")?;
        expect_head(l, "e")?;
        l.arity(5, 6)?;
        let u: usize = l.num(1, "endpoint")?;
        let v: usize = l.num(2, "endpoint")?;
        let a = l.weight(3, "latency slope")?;
        let c = l.weight(4, "latency offset")?;
        let lat = LinearLatency::new(a, c).map_err(|e| l.err(3, e.to_string()))?;
        let label = l.toks.get(5).map(|t| t.1.to_string());
        net.add_edge(u, v, lat, label).map_err(|e| l.err(1, e.to_string()))?;
    }
    b.finish()?;
    CongestionGame::new(players, net).map_err(|e| perr(header, 1, e.to_string()))
}

/// One line per player: the edge ids of its path, in order. Edge ids rather
/// than vertices because networks may have parallel edges.
pub fn emit_profile(p: &Profile) -> String {
    let mut s = format!("profile {}\n", p.paths.len());
    for path in &p.paths {
        let ids: Vec<String> = path.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(s, "{}", ids.join(" "));
    }
    s
}

pub fn parse_profile(text: &str) -> Result<Profile> {
    let (_, body) = unwrap(text, Kind::Profile)?;
    let mut b = Body::new(body, 2);
    let (h, _) = b.next("a `profile` header")?;
    expect_head(h, "profile")?;
    h.arity(2, 2)?;
    let np: usize = h.num(1, "player count")?;
    let mut paths = Vec::with_capacity(np);
    for _ in 0..np {
        let (l, _) = b.next("a path line")?;
        let path: Path = (0..l.toks.len()).map(|k| l.num(k, "edge id")).collect::<Result<_>>()?;
        paths.push(path);
    }
    b.finish()?;
    Ok(Profile::new(paths))
}

// ---- roles --------------------------------------------------------------

/// What a compiled instance's vertices or players stand for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RolesFile {
    Mc2Sp(Mc2SpMap),
    Nmc2Multi(Nmc2MultiMap),
    Cf2Nmc(Vec<VertexRole>),
}

impl RolesFile {
    pub fn kind(&self) -> &'static str {
        match self {
            RolesFile::Mc2Sp(_) => "mc2sp",
            RolesFile::Nmc2Multi(_) => "nmc2multi",
            RolesFile::Cf2Nmc(_) => "cf2nmc",
        }
    }
}

fn join(p: &[usize]) -> String {
    p.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn emit_roles(r: &RolesFile) -> String {
    let mut s = String::new();
    match r {
        RolesFile::Mc2Sp(m) => {
            let _ = writeln!(s, "roles mc2sp {} {}", m.n, m.class.len());
            for k in 0..m.n {
                let _ = writeln!(s, "u {k} {}", join(&m.upper[k]));
                let _ = writeln!(s, "l {k} {}", join(&m.lower[k]));
            }
            let _ = writeln!(s, "class {}", join(&m.class));
        }
        RolesFile::Nmc2Multi(m) => {
            let _ = writeln!(s, "roles nmc2multi {} {}", m.n, m.constants.len());
            let _ = writeln!(s, "d {} {}", format_weight(&m.d_small), format_weight(&m.d_big));
            for k in 0..m.n {
                let _ = writeln!(s, "u {k} {}", join(&m.upper[k]));
                let _ = writeln!(s, "l {k} {}", join(&m.lower[k]));
            }
            for c in &m.constants {
                let [a, b, d] = c.edges;
                let _ = writeln!(s, "k {} {} {a} {b} {d} {} {}", c.x, c.y, c.player, format_weight(&c.constant));
            }
        }
        RolesFile::Cf2Nmc(roles) => {
            let _ = writeln!(s, "roles cf2nmc {}", roles.len());
            for (v, role) in roles.iter().enumerate() {
                let _ = writeln!(s, "r {v} {role}");
            }
        }
    }
    s
}

fn path_line(l: &Line<'_>, head: &str, k: usize) -> Result<Path> {
    expect_head(l, head)?;
    let id: usize = l.num(1, "index")?;
    if id != k {
        return Err(l.err(1, format!("expected index {k}")));
    }
    (2..l.toks.len()).map(|j| l.num(j, "edge id")).collect()
}

pub fn parse_roles(text: &str) -> Result<RolesFile> {
    let (_, body) = unwrap(text, Kind::Roles)?;
    let mut b = Body::new(body, 2);
    let (h, _) = b.next("a `roles` header")?;
    expect_head(h, "roles")?;
    let kind = h.tok(1, "reduction kind")?;
    let out = match kind {
        "mc2sp" => {
            h.arity(4, 4)?;
            let n: usize = h.num(2, "vertex count")?;
            let players: usize = h.num(3, "player count")?;
            let (mut upper, mut lower) = (Vec::new(), Vec::new());
            for k in 0..n {
                upper.push(path_line(&b.next("a `u` line")?.0, "u", k)?);
                lower.push(path_line(&b.next("an `l` line")?.0, "l", k)?);
            }
            let (l, _) = b.next("a `class` line")?;
            expect_head(l, "class")?;
            l.arity(players + 1, players + 1)?;
            let class: Vec<usize> = (1..=players).map(|j| l.num(j, "vertex")).collect::<Result<_>>()?;
            if let Some(j) = class.iter().position(|&c| c >= n) {
                return Err(l.err(j + 1, "vertex out of range"));
            }
            RolesFile::Mc2Sp(Mc2SpMap { n, upper, lower, class })
        }
        "nmc2multi" => {
            h.arity(4, 4)?;
            let n: usize = h.num(2, "vertex count")?;
            let nc: usize = h.num(3, "constant count")?;
            let (l, _) = b.next("a `d` line")?;
            expect_head(l, "d")?;
            l.arity(3, 3)?;
            let d_small = l.weight(1, "small constant")?;
            let d_big = l.weight(2, "big constant")?;
            let (mut upper, mut lower) = (Vec::new(), Vec::new());
            for k in 0..n {
                upper.push(path_line(&b.next("a `u` line")?.0, "u", k)?);
                lower.push(path_line(&b.next("an `l` line")?.0, "l", k)?);
            }
            let mut constants = Vec::with_capacity(nc);
            for _ in 0..nc {
                let (l, _) = b.next("a `k` line")?;
                expect_head(l, "k")?;
                l.arity(8, 8)?;
                constants.push(ConstantEdge {
                    x: l.num(1, "endpoint")?,
                    y: l.num(2, "endpoint")?,
                    edges: [l.num(3, "edge id")?, l.num(4, "edge id")?, l.num(5, "edge id")?],
                    player: l.num(6, "player")?,
                    constant: l.weight(7, "constant")?,
                });
            }
            RolesFile::Nmc2Multi(Nmc2MultiMap { n, upper, lower, constants, d_small, d_big })
        }
        "cf2nmc" => {
            h.arity(3, 3)?;
            let n: usize = h.num(2, "vertex count")?;
            let mut roles = Vec::with_capacity(n);
            for v in 0..n {
                let (l, raw) = b.next("an `r` line")?;
                expect_head(l, "r")?;
                let id: usize = l.num(1, "vertex id")?;
                if id != v {
                    return Err(l.err(1, format!("expected vertex {v}")));
                }
                let role: VertexRole = l.rest_from(raw, 2).parse().map_err(|e: String| l.err(2, e))?;
                roles.push(role);
            }
            RolesFile::Cf2Nmc(roles)
        }
        other => return Err(h.err(1, format!("unknown reduction kind `{other}`"))),
    };
    b.finish()?;
    Ok(out)
}

// ---- reports ------------------------------------------------------------

pub fn emit_report(r: &VerificationReport) -> String {
    let id = if r.instance.is_empty() { "-".to_string() } else { r.instance.split_whitespace().collect::<Vec<_>>().join("_") };
    let mut s = format!(
        "report {id} {} checked {} unconverged {} counterexamples {}\n",
        r.direction,
        r.checked,
        r.unconverged,
        r.counterexamples.len()
    );
    for c in &r.counterexamples {
        let _ = writeln!(s, "x {}", c.replace(['\n', '\r'], " "));
    }
    s
}

pub fn parse_report(text: &str) -> Result<VerificationReport> {
    let (_, body) = unwrap(text, Kind::Report)?;
    let mut b = Body::new(body, 2);
    let (h, _) = b.next("a `report` header")?;
    expect_head(h, "report")?;
    h.arity(9, 9)?;
    let instance = match h.tok(1, "instance id")? {
        "-" => String::new(),
        s => s.to_string(),
    };
    let direction = match h.tok(2, "direction")? {
        "forward" => Direction::Forward,
        "backward" => Direction::Backward,
        other => return Err(h.err(2, format!("unknown direction `{other}`"))),
    };
    for (k, word) in [(3, "checked"), (5, "unconverged"), (7, "counterexamples")] {
        if h.tok(k, word)? != word {
            return Err(h.err(k, format!("expected `{word}`")));
        }
    }
    let checked: usize = h.num(4, "count")?;
    let unconverged: usize = h.num(6, "count")?;
    let nc: usize = h.num(8, "count")?;
    let mut counterexamples = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (l, raw) = b.next("a counterexample line")?;
        expect_head(l, "x")?;
        counterexamples.push(l.rest_from(raw, 1).trim_end().to_string());
    }
    b.finish()?;
    Ok(VerificationReport { instance, direction, checked, unconverged, counterexamples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::{int, pow2};

    fn k2() -> GraphFile {
        GraphFile::Nmc(VertexWeightedGraph::new(vec![int(1), int(3)], vec![(0, 1)]).unwrap())
    }

    #[test]
    fn graph_round_trip() {
        let g = k2();
        let text = wrap(Kind::Graph, "test", &emit_graph(&g));
        assert_eq!(parse_graph(&text).unwrap(), g);
        let mc = GraphFile::Mc(EdgeWeightedGraph::new(3, vec![(0, 1, int(2)), (1, 2, pow2(4000))]).unwrap());
        assert_eq!(parse_graph(&wrap(Kind::Graph, "", &emit_graph(&mc))).unwrap(), mc);
    }

    #[test]
    fn exponent_literal_is_exact() {
        let text = "%plsforge v1 graph sha256:-\nnmc 1 0\nv 0 2^4000\n";
        match parse_graph(text).unwrap() {
            GraphFile::Nmc(g) => assert_eq!(g.weight(0), &pow2(4000)),
            _ => panic!("expected nmc"),
        }
        assert_eq!(parse_weight_expr("2^700-2^602+2^600").unwrap(), pow2(700) - pow2(602) + pow2(600));
        assert_eq!(parse_weight_expr("2^-3+1/8").unwrap(), int(1) / int(4));
        assert_eq!(parse_weight_expr("-5").unwrap(), int(-5));
    }

    #[test]
    fn malformed_edge_has_position() {
        let text = "%plsforge v1 graph sha256:-\nnmc 2 1\nv 0 1\nv 1 1\ne 0 x\n";
        match parse_graph(text) {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (5, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn manifest_checks() {
        let body = emit_graph(&k2());
        let good = wrap(Kind::Graph, "seed 7", &body);
        let (m, _) = unwrap(&good, Kind::Graph).unwrap();
        assert_eq!(m.provenance, "seed 7");
        assert!(m.checksum.is_some());
        assert!(unwrap(&good.replace(" v1 ", " v9 "), Kind::Graph).is_err());
        assert!(unwrap(&good, Kind::Cut).is_err());
        let tampered = good.replace("v 1 3", "v 1 4");
        assert!(matches!(parse_graph(&tampered), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_graph(&body), Err(Error::Parse { line: 1, col: 1, .. })));
    }

    #[test]
    fn mc_needs_edge_weights() {
        let text = "%plsforge v1 graph sha256:-\nmc 2 1\nv 0\nv 1\ne 0 1\n";
        assert!(matches!(parse_graph(text), Err(Error::Parse { line: 5, .. })));
        let text = "%plsforge v1 graph sha256:-\nnmc 2 1\nv 0 1\nv 1 1\ne 0 1 5\n";
        assert!(matches!(parse_graph(text), Err(Error::Parse { line: 5, col: 7, .. })));
    }

    #[test]
    fn cut_and_report_round_trip() {
        let c = Cut::parse("0110").unwrap();
        assert_eq!(parse_cut(&wrap(Kind::Cut, "", &emit_cut(&c))).unwrap(), c);
        let r = VerificationReport {
            instance: "k2".into(),
            direction: Direction::Backward,
            checked: 3,
            unconverged: 1,
            counterexamples: vec!["seed 4: maps back to 01".into()],
        };
        assert_eq!(parse_report(&wrap(Kind::Report, "", &emit_report(&r))).unwrap(), r);
    }
}
