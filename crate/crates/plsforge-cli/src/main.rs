//! `plsforge` command-line front end.
//!
//! Exit codes: 0 success, 1 a verification or lemma check failed, 2 usage,
//! parse or other errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use plsforge::bridgegaps::{bridgegaps_solve, SolveOptions, ViolatorRule};
use plsforge::circuit::bits_to_string;
use plsforge::congestion::{br_dynamics, default_step_cap, potential_wcg, random_profile, Schedule};
use plsforge::games_core::{cut_value, is_local_optimum, CutGraph, Cut, FlipEngine, FlipRule, VertexWeightedGraph};
use plsforge::io::{self, GraphFile, Kind, RolesFile};
use plsforge::oracle::gadgets::check_lemma_all_cases;
use plsforge::oracle::{brute_local_optima, brute_pne, check_gadget_lemma, verify_reduction, LemmaId, ReductionInstance, VerifyMode};
use plsforge::reductions::cf2nmc::n_min;
use plsforge::reductions::{
    map_back_cf, map_back_multi, map_back_sp, reduce_cf_to_nmc, reduce_mc_to_sp, reduce_nmc_to_multi, CfMap,
};
use plsforge::weight::{format_weight, int, parse_weight, Weight};
use plsforge::Error;

#[derive(Parser)]
#[command(name = "plsforge", version, about = "Local-search games, PLS reductions and brute-force oracles")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    First,
    MaxGain,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    First,
    MaxGain,
}

#[derive(Clone, Copy, ValueEnum)]
enum GameSchedule {
    RoundRobin,
    MaxGain,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReductionKind {
    Mc2sp,
    Nmc2multi,
    Cf2nmc,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Embed,
    Dynamics,
    Exhaustive,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Every canonical locally optimal cut of a graph.
    LocalOptima { graph: PathBuf },
    /// Every pure Nash equilibrium of a game.
    Pne { game: PathBuf },
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact flip local search to a local optimum.
    SolveNmc {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = RuleArg::MaxGain)]
        rule: RuleArg,
        /// Seed for the random start cut and the random rule.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start from this cut instead of a random one.
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// (1+eps)^3-approximate equilibrium of a Node-Max-Cut instance.
    Bridgegaps {
        graph: PathBuf,
        #[arg(long, value_parser = parse_eps)]
        eps: Weight,
        /// Gap threshold from the maximum degree instead of n.
        #[arg(long)]
        delta_variant: bool,
        #[arg(long, value_enum, default_value_t = ScheduleArg::First)]
        schedule: ScheduleArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile an instance.
    Reduce {
        #[arg(value_enum)]
        kind: ReductionKind,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Roles file for mapping solutions back.
        #[arg(long)]
        roles: Option<PathBuf>,
        /// Weight scale for cf2nmc; defaults to the smallest valid one.
        #[arg(long)]
        scale: Option<u32>,
    },
    /// Map a solution of a compiled instance back to the source.
    Mapback {
        #[arg(value_enum)]
        kind: ReductionKind,
        roles: PathBuf,
        solution: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Seeded dynamics on a game (best response) or graph (flips).
    Dynamics {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = GameSchedule::Random)]
        schedule: GameSchedule,
        /// Step cap; defaults to PLSFORGE_STEP_CAP or 1000000.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a reduction on one source instance.
    Verify {
        #[arg(value_enum)]
        kind: ReductionKind,
        source: PathBuf,
        /// Compiled file to compare against a fresh compilation.
        compiled: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::Embed)]
        mode: ModeArg,
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        scale: Option<u32>,
        /// Write the report file here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Brute-force enumeration.
    Oracle {
        #[command(subcommand)]
        what: OracleCmd,
    },
    /// Check a gadget lemma on its isolated gadget.
    GadgetCheck {
        lemma: String,
        #[arg(long)]
        scale: u32,
        /// Boundary bits such as `010`; all assignments when omitted.
        #[arg(long)]
        boundary: Option<String>,
    },
    /// Seeded BridgeGaps runs on random instances, fanned out over threads.
    Bench {
        #[arg(long, default_value_t = 32)]
        runs: usize,
        #[arg(long, default_value_t = 30)]
        n: usize,
        #[arg(long, value_parser = parse_eps, default_value = "1/2")]
        eps: Weight,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_eps(s: &str) -> Result<Weight, String> {
    let w = parse_weight(s)?;
    if w <= int(0) {
        return Err("eps must be positive".into());
    }
    Ok(w)
}

/// Key/value output in either style.
struct Out {
    tsv: bool,
}

impl Out {
    fn kv(&self, k: &str, v: impl std::fmt::Display) {
        if self.tsv {
            println!("{k}\t{v}");
        } else {
            println!("{k}: {v}");
        }
    }
}

type CliResult = Result<ExitCode, String>;

fn read(p: &Path) -> Result<String, String> {
    std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn write(p: &Path, text: &str) -> Result<(), String> {
    std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))
}

fn ctx(p: &Path) -> impl Fn(Error) -> String + '_ {
    move |e| format!("{}: {e}", p.display())
}

fn load_graph(p: &Path) -> Result<GraphFile, String> {
    io::parse_graph(&read(p)?).map_err(ctx(p))
}

fn load_nmc(p: &Path) -> Result<VertexWeightedGraph, String> {
    match load_graph(p)? {
        GraphFile::Nmc(g) => Ok(g),
        GraphFile::Mc(_) => Err(format!("{}: expected an nmc graph", p.display())),
    }
}

fn start_cut(n: usize, start: &Option<PathBuf>, seed: u64) -> Result<Cut, String> {
    match start {
        Some(p) => {
            let c = io::parse_cut(&read(p)?).map_err(ctx(p))?;
            if c.len() != n {
                return Err(format!("{}: cut has {} vertices, graph has {n}", p.display(), c.len()));
            }
            Ok(c)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Cut::new((0..n).map(|_| rng.gen_range(0..2u8)).collect()).map_err(|e| e.to_string())
        }
    }
}

fn emit_or_print(out: &Option<PathBuf>, kind: Kind, prov: &str, body: &str) -> Result<(), String> {
    match out {
        Some(p) => write(p, &io::wrap(kind, prov, body)),
        None => Ok(()),
    }
}

fn flip_search<G: CutGraph + ?Sized>(g: &G, start: Cut, rule: RuleArg, seed: u64, cap: u64) -> Result<(Cut, u64, bool), String> {
    let mut en = FlipEngine::new(g, start).map_err(|e| e.to_string())?;
    let rule = match rule {
        RuleArg::First => FlipRule::First,
        RuleArg::MaxGain => FlipRule::MaxGain,
        RuleArg::Random => FlipRule::Random,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let done = en.run(rule, cap, &mut rng);
    let flips = en.flips();
    Ok((en.into_cut(), flips, done))
}

fn solve_nmc(o: &Out, graph: &Path, rule: RuleArg, seed: u64, start: &Option<PathBuf>, output: &Option<PathBuf>) -> CliResult {
    let g = load_graph(graph)?;
    let cap = default_step_cap() as u64;
    let (cut, flips, done, value, ok) = match &g {
        GraphFile::Mc(h) => {
            let (c, f, d) = flip_search(h, start_cut(h.num_vertices(), start, seed)?, rule, seed, cap)?;
            let ok = is_local_optimum(h, &c).map_err(|e| e.to_string())?;
            let v = cut_value(h, &c).map_err(|e| e.to_string())?;
            (c, f, d, v, ok)
        }
        GraphFile::Nmc(h) => {
            let (c, f, d) = flip_search(h, start_cut(h.num_vertices(), start, seed)?, rule, seed, cap)?;
            let ok = is_local_optimum(h, &c).map_err(|e| e.to_string())?;
            let v = cut_value(h, &c).map_err(|e| e.to_string())?;
            (c, f, d, v, ok)
        }
    };
    o.kv("cut", &cut);
    o.kv("flips", flips);
    o.kv("converged", done);
    o.kv("cut_value", format_weight(&value));
    o.kv("local_optimum", ok);
    emit_or_print(output, Kind::Cut, &format!("solve-nmc seed {seed}"), &io::emit_cut(&cut))?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[allow(clippy::too_many_arguments)]
fn bridgegaps(
    o: &Out,
    graph: &Path,
    eps: &Weight,
    delta_variant: bool,
    schedule: ScheduleArg,
    seed: u64,
    start: &Option<PathBuf>,
    output: &Option<PathBuf>,
) -> CliResult {
    let g = load_nmc(graph)?;
    let s = start_cut(g.weights().len(), start, seed)?;
    let rule = match schedule {
        ScheduleArg::First => ViolatorRule::First,
        ScheduleArg::MaxGain => ViolatorRule::MaxGain,
    };
    let sol = bridgegaps_solve(&g, eps, &s, SolveOptions { rule, delta_variant }).map_err(|e| e.to_string())?;
    o.kv("cut", &sol.cut);
    o.kv("flips", sol.flips);
    o.kv("d_eps", sol.rounded.d_eps);
    o.kv("threshold", &sol.grouped.threshold);
    o.kv("flip_bound", format_weight(&sol.flip_bound));
    o.kv("within_bound", Weight::from_integer(sol.flips.into()) <= sol.flip_bound);
    o.kv("verified", sol.verified);
    emit_or_print(output, Kind::Cut, &format!("bridgegaps eps {} seed {seed}", format_weight(eps)), &io::emit_cut(&sol.cut))?;
    Ok(if sol.verified { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn reduce(o: &Out, kind: ReductionKind, input: &Path, output: &Path, roles: &Option<PathBuf>, scale: Option<u32>) -> CliResult {
    let prov = format!("reduce {} {}", kind_name(kind), input.display());
    let (kind_out, body, roles_file) = match kind {
        ReductionKind::Mc2sp => {
            let h = match load_graph(input)? {
                GraphFile::Mc(h) => h,
                GraphFile::Nmc(h) => h.to_edge_weighted(),
            };
            let (game, map) = reduce_mc_to_sp(&h).map_err(|e| e.to_string())?;
            o.kv("players", game.num_players());
            o.kv("edges", game.net.num_edges());
            (Kind::Game, io::emit_game(&game), RolesFile::Mc2Sp(map))
        }
        ReductionKind::Nmc2multi => {
            let h = load_nmc(input)?;
            let (game, map) = reduce_nmc_to_multi(&h).map_err(|e| e.to_string())?;
            o.kv("players", game.num_players());
            o.kv("edges", game.net.num_edges());
            (Kind::Game, io::emit_game(&game), RolesFile::Nmc2Multi(map))
        }
        ReductionKind::Cf2nmc => {
            let c = io::parse_netlist(&read(input)?).map_err(ctx(input))?;
            let n = match scale {
                Some(n) => n,
                None => n_min(&c).map_err(|e| e.to_string())?,
            };
            let inst = reduce_cf_to_nmc(&c, n).map_err(|e| e.to_string())?;
            o.kv("scale", n);
            o.kv("vertices", inst.num_vertices());
            o.kv("edges", inst.num_edges());
            (Kind::Graph, io::emit_cf_graph(&inst), RolesFile::Cf2Nmc(inst.roles.clone()))
        }
    };
    write(output, &io::wrap(kind_out, &prov, &body))?;
    if let Some(r) = roles {
        write(r, &io::wrap(Kind::Roles, &prov, &io::emit_roles(&roles_file)))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn kind_name(k: ReductionKind) -> &'static str {
    match k {
        ReductionKind::Mc2sp => "mc2sp",
        ReductionKind::Nmc2multi => "nmc2multi",
        ReductionKind::Cf2nmc => "cf2nmc",
    }
}

fn mapback(o: &Out, kind: ReductionKind, roles: &Path, solution: &Path, output: &Option<PathBuf>) -> CliResult {
    let r = io::parse_roles(&read(roles)?).map_err(ctx(roles))?;
    if r.kind() != kind_name(kind) {
        return Err(format!("{}: roles file is for {}, not {}", roles.display(), r.kind(), kind_name(kind)));
    }
    let prov = format!("mapback {}", kind_name(kind));
    match r {
        RolesFile::Mc2Sp(m) => {
            let p = io::parse_profile(&read(solution)?).map_err(ctx(solution))?;
            let c = map_back_sp(&m, &p).map_err(|e| e.to_string())?;
            o.kv("cut", &c);
            emit_or_print(output, Kind::Cut, &prov, &io::emit_cut(&c))?;
        }
        RolesFile::Nmc2Multi(m) => {
            let p = io::parse_profile(&read(solution)?).map_err(ctx(solution))?;
            let c = map_back_multi(&m, &p).map_err(|e| e.to_string())?;
            o.kv("cut", &c);
            emit_or_print(output, Kind::Cut, &prov, &io::emit_cut(&c))?;
        }
        RolesFile::Cf2Nmc(roles) => {
            let c = io::parse_cut(&read(solution)?).map_err(ctx(solution))?;
            let m = CfMap::from_roles(&roles).map_err(|e| e.to_string())?;
            let bits = map_back_cf(&m, &c).map_err(|e| e.to_string())?;
            o.kv("input", bits_to_string(&bits));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn dynamics(o: &Out, input: &Path, seed: u64, schedule: GameSchedule, cap: Option<usize>, output: &Option<PathBuf>) -> CliResult {
    let text = read(input)?;
    let cap = cap.unwrap_or_else(default_step_cap);
    let prov = format!("dynamics seed {seed}");
    if text.split_whitespace().nth(2) == Some(Kind::Game.as_str()) {
        let g = io::parse_game(&text).map_err(ctx(input))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = random_profile(&g, &mut rng);
        let sch = match schedule {
            GameSchedule::RoundRobin => Schedule::RoundRobin,
            GameSchedule::MaxGain => Schedule::MaxGain,
            GameSchedule::Random => Schedule::Random(seed),
        };
        match br_dynamics(&g, &start, sch, &int(0), cap) {
            Ok((end, trace)) => {
                o.kv("steps", trace.len());
                o.kv("converged", true);
                o.kv("potential", format_weight(&potential_wcg(&g, &end).map_err(|e| e.to_string())?));
                emit_or_print(output, Kind::Profile, &prov, &io::emit_profile(&end))?;
                Ok(ExitCode::SUCCESS)
            }
            Err(Error::StepCapExceeded { steps, .. }) => {
                o.kv("steps", steps);
                o.kv("converged", false);
                Ok(ExitCode::from(1))
            }
            Err(e) => Err(e.to_string()),
        }
    } else {
        let rule = match schedule {
            GameSchedule::RoundRobin => RuleArg::First,
            GameSchedule::MaxGain => RuleArg::MaxGain,
            GameSchedule::Random => RuleArg::Random,
        };
        solve_or_flip(o, input, rule, seed, cap as u64, output)
    }
}

fn solve_or_flip(o: &Out, input: &Path, rule: RuleArg, seed: u64, cap: u64, output: &Option<PathBuf>) -> CliResult {
    let g = load_graph(input)?;
    let (cut, flips, done) = match &g {
        GraphFile::Mc(h) => flip_search(h, start_cut(h.num_vertices(), &None, seed)?, rule, seed, cap)?,
        GraphFile::Nmc(h) => flip_search(h, start_cut(h.num_vertices(), &None, seed)?, rule, seed, cap)?,
    };
    o.kv("steps", flips);
    o.kv("converged", done);
    o.kv("cut", &cut);
    emit_or_print(output, Kind::Cut, &format!("dynamics seed {seed}"), &io::emit_cut(&cut))?;
    Ok(if done { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[allow(clippy::too_many_arguments)]
fn verify(
    o: &Out,
    kind: ReductionKind,
    source: &Path,
    compiled: &Option<PathBuf>,
    mode: ModeArg,
    runs: usize,
    seed: u64,
    scale: Option<u32>,
    report: &Option<PathBuf>,
) -> CliResult {
    let mode = match mode {
        ModeArg::Embed => VerifyMode::EmbedCheck,
        ModeArg::Dynamics => VerifyMode::DynamicsSample { runs, seed },
        ModeArg::Exhaustive => VerifyMode::Exhaustive,
    };
    let id = source.file_stem().map_or("instance".into(), |s| s.to_string_lossy().into_owned());
    let check_same = |fresh: &str, k: Kind| -> Result<(), String> {
        if let Some(p) = compiled {
            let text = read(p)?;
            let (_, body) = io::unwrap(&text, k).map_err(ctx(p))?;
            if body != fresh {
                return Err(format!("{}: does not match a fresh compilation of {}", p.display(), source.display()));
            }
        }
        Ok(())
    };
    let rep = match kind {
        ReductionKind::Mc2sp => {
            let h = match load_graph(source)? {
                GraphFile::Mc(h) => h,
                GraphFile::Nmc(h) => h.to_edge_weighted(),
            };
            let (game, map) = reduce_mc_to_sp(&h).map_err(|e| e.to_string())?;
            check_same(&io::emit_game(&game), Kind::Game)?;
            verify_reduction(&id, ReductionInstance::Mc2Sp { source: &h, game: &game, map: &map }, mode)
        }
        ReductionKind::Nmc2multi => {
            let h = load_nmc(source)?;
            let (game, map) = reduce_nmc_to_multi(&h).map_err(|e| e.to_string())?;
            check_same(&io::emit_game(&game), Kind::Game)?;
            verify_reduction(&id, ReductionInstance::Nmc2Multi { source: &h, game: &game, map: &map }, mode)
        }
        ReductionKind::Cf2nmc => {
            let c = io::parse_netlist(&read(source)?).map_err(ctx(source))?;
            let n = match scale {
                Some(n) => n,
                None => n_min(&c).map_err(|e| e.to_string())?,
            };
            let inst = reduce_cf_to_nmc(&c, n).map_err(|e| e.to_string())?;
            check_same(&io::emit_cf_graph(&inst), Kind::Graph)?;
            verify_reduction(&id, ReductionInstance::Cf2Nmc { source: &c, compiled: &inst }, mode)
        }
    }
    .map_err(|e| e.to_string())?;
    o.kv("instance", &rep.instance);
    o.kv("direction", rep.direction);
    o.kv("checked", rep.checked);
    o.kv("unconverged", rep.unconverged);
    o.kv("counterexamples", rep.counterexamples.len());
    for c in &rep.counterexamples {
        o.kv("counterexample", c);
    }
    o.kv("success", rep.success());
    if let Some(p) = report {
        write(p, &io::wrap(Kind::Report, &format!("verify {}", kind_name(kind)), &io::emit_report(&rep)))?;
    }
    Ok(if rep.success() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn oracle(o: &Out, what: &OracleCmd) -> CliResult {
    match what {
        OracleCmd::LocalOptima { graph } => {
            let cuts = match load_graph(graph)? {
                GraphFile::Mc(h) => brute_local_optima(&h),
                GraphFile::Nmc(h) => brute_local_optima(&h),
            }
            .map_err(|e| e.to_string())?;
            o.kv("count", cuts.len());
            for c in &cuts {
                o.kv("cut", c);
            }
        }
        OracleCmd::Pne { game } => {
            let g = io::parse_game(&read(game)?).map_err(ctx(game))?;
            let ps = brute_pne(&g).map_err(|e| e.to_string())?;
            o.kv("count", ps.len());
            for p in &ps {
                let paths: Vec<String> = p.paths.iter().map(|q| q.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")).collect();
                o.kv("profile", paths.join(" "));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn gadget_check(o: &Out, lemma: &str, scale: u32, boundary: &Option<String>) -> CliResult {
    let id: LemmaId = lemma.parse().map_err(|e: Error| e.to_string())?;
    let out = match boundary {
        Some(b) => {
            let bits = b
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    _ => Err(format!("boundary must be a 0/1 string, got `{b}`")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            check_gadget_lemma(id, &bits, scale)
        }
        None => check_lemma_all_cases(id, scale),
    }
    .map_err(|e| e.to_string())?;
    o.kv("lemma", out.lemma);
    o.kv("mode", out.mode);
    o.kv("cases", out.cases);
    o.kv("optima", out.optima);
    o.kv("holds", out.holds);
    if !out.detail.is_empty() {
        o.kv("detail", &out.detail);
    }
    Ok(if out.holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn random_nmc(n: usize, seed: u64) -> VertexWeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..n).map(|_| Weight::from_integer(rng.gen_range(1u64..=1 << 20).into())).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.3) {
                edges.push((u, v));
            }
        }
    }
    VertexWeightedGraph::new(weights, edges).expect("simple graph")
}

fn bench(o: &Out, runs: usize, n: usize, eps: &Weight, seed: u64) -> CliResult {
    let t = Instant::now();
    let results: Vec<Result<(u64, bool), String>> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let s = seed.wrapping_add(r as u64);
            let g = random_nmc(n, s);
            let start = start_cut(n, &None, s)?;
            let sol = bridgegaps_solve(&g, eps, &start, SolveOptions::default()).map_err(|e| e.to_string())?;
            Ok((sol.flips, sol.verified))
        })
        .collect();
    let mut flips = 0u64;
    let mut verified = 0usize;
    for r in results {
        let (f, v) = r?;
        flips += f;
        verified += usize::from(v);
    }
    o.kv("runs", runs);
    o.kv("vertices", n);
    o.kv("eps", format_weight(eps));
    o.kv("total_flips", flips);
    o.kv("verified", verified);
    o.kv("elapsed_ms", t.elapsed().as_millis());
    Ok(if verified == runs { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> CliResult {
    let o = Out { tsv: cli.format == Format::Tsv };
    match &cli.cmd {
        Cmd::SolveNmc { graph, rule, seed, start, output } => solve_nmc(&o, graph, *rule, *seed, start, output),
        Cmd::Bridgegaps { graph, eps, delta_variant, schedule, seed, start, output } => {
            bridgegaps(&o, graph, eps, *delta_variant, *schedule, *seed, start, output)
        }
        Cmd::Reduce { kind, input, output, roles, scale } => reduce(&o, *kind, input, output, roles, *scale),
        Cmd::Mapback { kind, roles, solution, output } => mapback(&o, *kind, roles, solution, output),
        Cmd::Dynamics { input, seed, schedule, cap, output } => dynamics(&o, input, *seed, *schedule, *cap, output),
        Cmd::Verify { kind, source, compiled, mode, runs, seed, scale, report } => {
            verify(&o, *kind, source, compiled, *mode, *runs, *seed, *scale, report)
        }
        Cmd::Oracle { what } => oracle(&o, what),
        Cmd::GadgetCheck { lemma, scale, boundary } => gadget_check(&o, lemma, *scale, boundary),
        Cmd::Bench { runs, n, eps, seed } => bench(&o, *runs, *n, eps, *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
