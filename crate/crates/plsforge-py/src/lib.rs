//! Python bindings for plsforge.
//!
//! Weights cross the boundary as strings (`"3"`, `"5/2"`, `"2^4000"`) so
//! nothing is rounded. Cuts and bit strings are `0`/`1` strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use plsforge::bridgegaps::{bridgegaps_solve, SolveOptions, ViolatorRule};
use plsforge::circuit::{bits_to_string, is_flip_local_opt, Circuit as RsCircuit};
use plsforge::congestion::{br_dynamics, is_pne, potential_wcg, random_profile, CongestionGame, Profile, Schedule};
use plsforge::games_core::{self, CutGraph, Cut, EdgeWeightedGraph, FlipEngine, FlipRule, VertexWeightedGraph};
use plsforge::io::{self, GraphFile, Kind, RolesFile};
use plsforge::oracle::gadgets::check_lemma_all_cases;
use plsforge::oracle::{self, check_gadget_lemma, verify_reduction, LemmaId, ReductionInstance, VerifyMode};
use plsforge::reductions::cf2nmc::{intended_configuration, n_min};
use plsforge::reductions::{self, map_back_cf, CfInstance, Mc2SpMap, Nmc2MultiMap};
use plsforge::weight::{format_weight, parse_weight, Weight};
use plsforge::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Parse { .. } | Error::InvalidArgument(_) | Error::InvalidInstance(_) | Error::DimensionError { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn weight(s: &str) -> PyResult<Weight> {
    parse_weight(s).map_err(PyValueError::new_err)
}

fn cut(s: &str) -> PyResult<Cut> {
    Cut::parse(s).map_err(err)
}

fn bits(s: &str) -> PyResult<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(PyValueError::new_err(format!("expected a 0/1 string, got `{s}`"))),
        })
        .collect()
}

fn random_cut(n: usize, seed: u64) -> Cut {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Cut::new((0..n).map(|_| rng.gen_range(0..2u8)).collect()).expect("binary sides")
}

fn verify_mode(mode: &str, runs: usize, seed: u64) -> PyResult<VerifyMode> {
    match mode {
        "embed" => Ok(VerifyMode::EmbedCheck),
        "dynamics" => Ok(VerifyMode::DynamicsSample { runs, seed }),
        "exhaustive" => Ok(VerifyMode::Exhaustive),
        other => Err(PyValueError::new_err(format!("unknown mode `{other}`"))),
    }
}

fn report_dict<'py>(py: Python<'py>, r: &oracle::VerificationReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("instance", &r.instance)?;
    d.set_item("direction", r.direction.to_string())?;
    d.set_item("checked", r.checked)?;
    d.set_item("unconverged", r.unconverged)?;
    d.set_item("counterexamples", r.counterexamples.clone())?;
    d.set_item("success", r.success())?;
    Ok(d)
}

/// Max-Cut (`mc`) or Node-Max-Cut (`nmc`) instance.
#[pyclass(module = "plsforge_py", skip_from_py_object)]
#[derive(Clone)]
pub struct Graph {
    inner: GraphFile,
}

impl Graph {
    fn with<T>(&self, f: impl Fn(&dyn CutGraph) -> T) -> T {
        match &self.inner {
            GraphFile::Mc(g) => f(g),
            GraphFile::Nmc(g) => f(g),
        }
    }

    fn nmc_ref(&self) -> PyResult<&VertexWeightedGraph> {
        match &self.inner {
            GraphFile::Nmc(g) => Ok(g),
            GraphFile::Mc(_) => Err(PyValueError::new_err("expected a Node-Max-Cut graph")),
        }
    }

    fn edge_weighted(&self) -> EdgeWeightedGraph {
        match &self.inner {
            GraphFile::Mc(g) => g.clone(),
            GraphFile::Nmc(g) => g.to_edge_weighted(),
        }
    }
}

#[pymethods]
impl Graph {
    /// Node-Max-Cut graph from vertex weights and edges.
    #[staticmethod]
    fn nmc(weights: Vec<String>, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let w = weights.iter().map(|s| weight(s)).collect::<PyResult<Vec<_>>>()?;
        Ok(Self { inner: GraphFile::Nmc(VertexWeightedGraph::new(w, edges).map_err(err)?) })
    }

    /// Max-Cut graph from weighted edges.
    #[staticmethod]
    fn mc(n: usize, edges: Vec<(usize, usize, String)>) -> PyResult<Self> {
        let e = edges.into_iter().map(|(u, v, w)| Ok((u, v, weight(&w)?))).collect::<PyResult<Vec<_>>>()?;
        Ok(Self { inner: GraphFile::Mc(EdgeWeightedGraph::new(n, e).map_err(err)?) })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: io::parse_graph(text).map_err(err)? })
    }

    #[pyo3(signature = (provenance = ""))]
    fn to_text(&self, provenance: &str) -> String {
        io::wrap(Kind::Graph, provenance, &io::emit_graph(&self.inner))
    }

    #[getter]
    fn is_nmc(&self) -> bool {
        matches!(self.inner, GraphFile::Nmc(_))
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.with(|g| g.num_vertices())
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.with(|g| g.num_edges())
    }

    fn cut_value(&self, c: &str) -> PyResult<String> {
        let c = cut(c)?;
        self.with(|g| games_core::cut_value(g, &c)).map(|w| format_weight(&w)).map_err(err)
    }

    fn is_local_optimum(&self, c: &str) -> PyResult<bool> {
        let c = cut(c)?;
        self.with(|g| games_core::is_local_optimum(g, &c)).map_err(err)
    }

    /// Whether no vertex gains more than a `1+eps` factor by flipping.
    fn is_approx_equilibrium(&self, c: &str, eps: &str) -> PyResult<bool> {
        games_core::is_approx_equilibrium_nmc(self.nmc_ref()?, &cut(c)?, &weight(eps)?).map_err(err)
    }

    /// Flip local search from a seeded random cut; returns `(cut, flips)`.
    #[pyo3(signature = (seed = 0, rule = "max-gain", max_flips = 1_000_000))]
    fn local_search(&self, seed: u64, rule: &str, max_flips: u64) -> PyResult<(String, u64)> {
        let rule = match rule {
            "first" => FlipRule::First,
            "max-gain" => FlipRule::MaxGain,
            "random" => FlipRule::Random,
            other => return Err(PyValueError::new_err(format!("unknown rule `{other}`"))),
        };
        let start = random_cut(self.num_vertices(), seed);
        let mut en = self.with(|g| FlipEngine::new(g, start.clone())).map_err(err)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if !en.run(rule, max_flips, &mut rng) {
            return Err(PyRuntimeError::new_err(format!("no local optimum within {max_flips} flips")));
        }
        Ok((en.cut().to_string(), en.flips()))
    }

    /// Every canonical locally optimal cut.
    fn brute_local_optima(&self) -> PyResult<Vec<String>> {
        let cuts = match &self.inner {
            GraphFile::Mc(g) => oracle::brute_local_optima(g),
            GraphFile::Nmc(g) => oracle::brute_local_optima(g),
        }
        .map_err(err)?;
        Ok(cuts.iter().map(|c| c.to_string()).collect())
    }

    /// BridgeGaps from a seeded random cut.
    #[pyo3(signature = (eps, seed = 0, delta_variant = false, max_gain = false))]
    fn bridgegaps<'py>(&self, py: Python<'py>, eps: &str, seed: u64, delta_variant: bool, max_gain: bool) -> PyResult<Bound<'py, PyDict>> {
        let g = self.nmc_ref()?;
        let rule = if max_gain { ViolatorRule::MaxGain } else { ViolatorRule::First };
        let eps = weight(eps)?;
        let sol = bridgegaps_solve(g, &eps, &random_cut(g.weights().len(), seed), SolveOptions { rule, delta_variant })
            .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("cut", sol.cut.to_string())?;
        d.set_item("flips", sol.flips)?;
        d.set_item("d_eps", sol.rounded.d_eps)?;
        d.set_item("flip_bound", format_weight(&sol.flip_bound))?;
        d.set_item("verified", sol.verified)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let k = if self.is_nmc() { "nmc" } else { "mc" };
        format!("Graph({k}, n={}, m={})", self.num_vertices(), self.num_edges())
    }
}

/// NOR netlist.
#[pyclass(module = "plsforge_py", skip_from_py_object)]
#[derive(Clone)]
pub struct Circuit {
    inner: RsCircuit,
}

#[pymethods]
impl Circuit {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: io::parse_netlist(text).map_err(err)? })
    }

    #[pyo3(signature = (provenance = ""))]
    fn to_text(&self, provenance: &str) -> String {
        io::wrap(Kind::Netlist, provenance, &io::emit_netlist(&self.inner))
    }

    #[getter]
    fn n_inputs(&self) -> usize {
        self.inner.n_inputs()
    }

    #[getter]
    fn n_outputs(&self) -> usize {
        self.inner.n_outputs()
    }

    #[getter]
    fn n_gates(&self) -> usize {
        self.inner.gates().len()
    }

    fn eval(&self, x: &str) -> PyResult<String> {
        Ok(bits_to_string(&self.inner.eval(&bits(x)?).map_err(err)?))
    }

    fn is_flip_local_opt(&self, x: &str) -> PyResult<bool> {
        is_flip_local_opt(&self.inner, &bits(x)?).map_err(err)
    }

    /// Smallest weight scale the cf2nmc compiler accepts.
    fn n_min(&self) -> PyResult<u32> {
        n_min(&self.inner).map_err(err)
    }
}

/// Weighted congestion game with linear latencies. Paths are edge-id lists.
#[pyclass(module = "plsforge_py", skip_from_py_object)]
#[derive(Clone)]
pub struct Game {
    inner: CongestionGame,
}

#[pymethods]
impl Game {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: io::parse_game(text).map_err(err)? })
    }

    #[pyo3(signature = (provenance = ""))]
    fn to_text(&self, provenance: &str) -> String {
        io::wrap(Kind::Game, provenance, &io::emit_game(&self.inner))
    }

    #[getter]
    fn num_players(&self) -> usize {
        self.inner.num_players()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.net.num_edges()
    }

    fn potential(&self, profile: Vec<Vec<usize>>) -> PyResult<String> {
        potential_wcg(&self.inner, &Profile::new(profile)).map(|w| format_weight(&w)).map_err(err)
    }

    #[pyo3(signature = (profile, eps = "0"))]
    fn is_pne(&self, profile: Vec<Vec<usize>>, eps: &str) -> PyResult<bool> {
        is_pne(&self.inner, &Profile::new(profile), &weight(eps)?).map_err(err)
    }

    fn brute_pne(&self) -> PyResult<Vec<Vec<Vec<usize>>>> {
        Ok(oracle::brute_pne(&self.inner).map_err(err)?.into_iter().map(|p| p.paths).collect())
    }

    /// Seeded best-response dynamics; returns `(profile, steps)`.
    #[pyo3(signature = (seed = 0, max_steps = 1_000_000))]
    fn dynamics(&self, seed: u64, max_steps: usize) -> PyResult<(Vec<Vec<usize>>, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = random_profile(&self.inner, &mut rng);
        let zero = Weight::from_integer(0.into());
        let (end, trace) = br_dynamics(&self.inner, &start, Schedule::Random(seed), &zero, max_steps).map_err(err)?;
        Ok((end.paths, trace.len()))
    }
}

/// Compiled game with the data to map its profiles back to cuts.
#[pyclass(module = "plsforge_py")]
pub struct GameReduction {
    source: Graph,
    #[pyo3(get)]
    game: Game,
    map: RolesFile,
}

impl GameReduction {
    fn instance(&self) -> PyResult<ReductionInstance<'_>> {
        match (&self.map, &self.source.inner) {
            (RolesFile::Mc2Sp(m), GraphFile::Mc(s)) => Ok(ReductionInstance::Mc2Sp { source: s, game: &self.game.inner, map: m }),
            (RolesFile::Nmc2Multi(m), GraphFile::Nmc(s)) => {
                Ok(ReductionInstance::Nmc2Multi { source: s, game: &self.game.inner, map: m })
            }
            _ => Err(PyRuntimeError::new_err("source and map disagree")),
        }
    }
}

#[pymethods]
impl GameReduction {
    fn roles_text(&self) -> String {
        io::wrap(Kind::Roles, self.map.kind(), &io::emit_roles(&self.map))
    }

    fn map_back(&self, profile: Vec<Vec<usize>>) -> PyResult<String> {
        let p = Profile::new(profile);
        let c = match &self.map {
            RolesFile::Mc2Sp(m) => reductions::map_back_sp(m, &p),
            RolesFile::Nmc2Multi(m) => reductions::map_back_multi(m, &p),
            RolesFile::Cf2Nmc(_) => unreachable!("game reductions only"),
        };
        Ok(c.map_err(err)?.to_string())
    }

    fn embed(&self, c: &str) -> PyResult<Vec<Vec<usize>>> {
        let c = cut(c)?;
        let p = match &self.map {
            RolesFile::Mc2Sp(m) => reductions::embed_cut_to_sp(m, &c),
            RolesFile::Nmc2Multi(m) => reductions::embed_cut_to_multi(m, &c),
            RolesFile::Cf2Nmc(_) => unreachable!("game reductions only"),
        };
        Ok(p.map_err(err)?.paths)
    }

    /// `mode` is `embed`, `dynamics` or `exhaustive`.
    #[pyo3(signature = (mode = "embed", runs = 20, seed = 0))]
    fn verify<'py>(&self, py: Python<'py>, mode: &str, runs: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let r = verify_reduction(self.map.kind(), self.instance()?, verify_mode(mode, runs, seed)?).map_err(err)?;
        report_dict(py, &r)
    }
}

fn game_reduction(source: Graph, game: CongestionGame, map: RolesFile) -> GameReduction {
    GameReduction { source, game: Game { inner: game }, map }
}

/// Max-Cut to a series-parallel congestion game.
#[pyfunction]
fn reduce_mc2sp(g: &Graph) -> PyResult<GameReduction> {
    let h = g.edge_weighted();
    let (game, map): (CongestionGame, Mc2SpMap) = reductions::reduce_mc_to_sp(&h).map_err(err)?;
    Ok(game_reduction(Graph { inner: GraphFile::Mc(h) }, game, RolesFile::Mc2Sp(map)))
}

/// Node-Max-Cut to a multi-commodity congestion game.
#[pyfunction]
fn reduce_nmc2multi(g: &Graph) -> PyResult<GameReduction> {
    let h = g.nmc_ref()?.clone();
    let (game, map): (CongestionGame, Nmc2MultiMap) = reductions::reduce_nmc_to_multi(&h).map_err(err)?;
    Ok(game_reduction(Graph { inner: GraphFile::Nmc(h) }, game, RolesFile::Nmc2Multi(map)))
}

/// Node-Max-Cut instance compiled from a circuit.
#[pyclass(module = "plsforge_py")]
pub struct CfReduction {
    source: RsCircuit,
    inner: CfInstance,
}

#[pymethods]
impl CfReduction {
    #[getter]
    fn scale(&self) -> u32 {
        self.inner.scale.n
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    /// Role of vertex `v`, such as `nor A 3 b1`.
    fn role(&self, v: usize) -> PyResult<String> {
        self.inner.roles.get(v).map(|r| r.to_string()).ok_or_else(|| PyValueError::new_err("vertex out of range"))
    }

    fn graph_text(&self) -> String {
        io::wrap(Kind::Graph, "cf2nmc", &io::emit_cf_graph(&self.inner))
    }

    fn roles_text(&self) -> String {
        io::wrap(Kind::Roles, "cf2nmc", &io::emit_roles(&RolesFile::Cf2Nmc(self.inner.roles.clone())))
    }

    fn is_local_optimum(&self, c: &str) -> PyResult<bool> {
        self.inner.is_local_optimum(&cut(c)?).map_err(err)
    }

    /// Circuit input read off a cut of the compiled graph.
    fn map_back(&self, c: &str) -> PyResult<String> {
        Ok(bits_to_string(&map_back_cf(&self.inner.map(), &cut(c)?).map_err(err)?))
    }

    /// Intended configuration for input `x`: `(cut, is_local_optimum, unhappy roles)`.
    fn intended(&self, x: &str) -> PyResult<(String, bool, Vec<String>)> {
        let r = intended_configuration(&self.inner, &bits(x)?).map_err(err)?;
        let unhappy = r.unhappy.iter().map(|(v, role)| format!("{v} {role}")).collect();
        Ok((r.cut.to_string(), r.is_local_optimum(), unhappy))
    }

    #[pyo3(signature = (mode = "embed", runs = 1, seed = 0))]
    fn verify<'py>(&self, py: Python<'py>, mode: &str, runs: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let inst = ReductionInstance::Cf2Nmc { source: &self.source, compiled: &self.inner };
        let r = verify_reduction("cf2nmc", inst, verify_mode(mode, runs, seed)?).map_err(err)?;
        report_dict(py, &r)
    }
}

/// Circuit-Flip to Node-Max-Cut; `scale` defaults to the smallest valid one.
#[pyfunction]
#[pyo3(signature = (c, scale = None))]
fn reduce_cf2nmc(c: &Circuit, scale: Option<u32>) -> PyResult<CfReduction> {
    let n = match scale {
        Some(n) => n,
        None => n_min(&c.inner).map_err(err)?,
    };
    let inner = reductions::reduce_cf_to_nmc(&c.inner, n).map_err(err)?;
    Ok(CfReduction { source: c.inner.clone(), inner })
}

/// Checks a gadget lemma; all boundary assignments when `boundary` is `None`.
#[pyfunction]
#[pyo3(signature = (lemma, scale, boundary = None))]
fn gadget_check<'py>(py: Python<'py>, lemma: &str, scale: u32, boundary: Option<&str>) -> PyResult<Bound<'py, PyDict>> {
    let id: LemmaId = lemma.parse().map_err(err)?;
    let o = match boundary {
        Some(b) => check_gadget_lemma(id, &bits(b)?, scale),
        None => check_lemma_all_cases(id, scale),
    }
    .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lemma", o.lemma.to_string())?;
    d.set_item("mode", o.mode.to_string())?;
    d.set_item("cases", o.cases)?;
    d.set_item("optima", o.optima)?;
    d.set_item("holds", o.holds)?;
    d.set_item("detail", o.detail)?;
    Ok(d)
}

/// Lemma ids accepted by `gadget_check`.
#[pyfunction]
fn lemma_ids() -> Vec<&'static str> {
    LemmaId::ALL.iter().map(|l| l.as_str()).collect()
}

/// Canonical form of a weight literal.
#[pyfunction]
fn normalize_weight(s: &str) -> PyResult<String> {
    Ok(format_weight(&io::parse_weight_expr(s).map_err(PyValueError::new_err)?))
}

#[pymodule]
fn plsforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Circuit>()?;
    m.add_class::<Game>()?;
    m.add_class::<GameReduction>()?;
    m.add_class::<CfReduction>()?;
    m.add_function(wrap_pyfunction!(reduce_mc2sp, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_nmc2multi, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_cf2nmc, m)?)?;
    m.add_function(wrap_pyfunction!(gadget_check, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_ids, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_weight, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
