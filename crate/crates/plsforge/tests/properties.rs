//! Property tests for the library invariants.

mod common;

use plsforge::bridgegaps::{bridgegaps_solve, cross_group_domination, group_weights, round_weights, SolveOptions, ViolatorRule};
use plsforge::circuit::{augment_next_val, bits_of, is_flip_local_opt, real_next, real_val, reverse_topological_order, Operand};
use plsforge::congestion::{
    best_response, br_dynamics, congestion_and_costs, enumerate_paths, is_pne, potential_wcg, random_profile, sp_realize,
    LinearLatency, Profile, Schedule, SpTerm,
};
use plsforge::games_core::{
    cut_value, flip_gain, is_approx_equilibrium_nmc, is_local_optimum, nmc_potential, total_edge_weight, Cut, CutGraph,
    FlipEngine, FlipRule,
};
use plsforge::io::{self, GraphFile, Kind};
use plsforge::oracle::{brute_local_optima, brute_pne, canonical_set};
use plsforge::weight::{int, ratio, Weight};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_cut(seed: u64, n: usize) -> Cut {
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    Cut::new((0..n).map(|_| r.gen_range(0..2u8)).collect()).unwrap()
}

fn eps_of(k: u8) -> Weight {
    [ratio(1, 10), ratio(1, 2), int(1), ratio(3, 2)][k as usize % 4].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cut_plus_uncut_is_total(seed in any::<u64>(), n in 1usize..10) {
        let g = common::random_nmc(seed, n, 20);
        let c = random_cut(seed, n);
        // same-side weight recounted from the edge list
        let uncut: Weight = g.edges().iter().filter(|(u, v)| c.side(*u) == c.side(*v)).map(|&(u, v)| g.weight(u) * g.weight(v)).sum();
        prop_assert_eq!(cut_value(&g, &c).unwrap() + &uncut, total_edge_weight(&g));
        prop_assert_eq!(nmc_potential(&g, &c).unwrap(), uncut);
    }

    #[test]
    fn flip_gain_matches_recount(seed in any::<u64>(), n in 1usize..10, v in 0usize..10) {
        let g = common::random_mc(seed, n.max(2), 9);
        let n = g.num_vertices();
        let v = v % n;
        let c = random_cut(seed, n);
        let before = cut_value(&g, &c).unwrap();
        let after = cut_value(&g, &c.flipped(v)).unwrap();
        prop_assert_eq!(flip_gain(&g, &c, v), after - before);
    }

    #[test]
    fn complement_symmetry(seed in any::<u64>(), n in 1usize..10) {
        let g = common::random_nmc(seed, n, 12);
        let c = random_cut(seed, n);
        let k = c.complement();
        prop_assert_eq!(cut_value(&g, &c).unwrap(), cut_value(&g, &k).unwrap());
        prop_assert_eq!(is_local_optimum(&g, &c).unwrap(), is_local_optimum(&g, &k).unwrap());
        prop_assert_eq!(c.canonical(), k.canonical());
    }

    #[test]
    fn approximate_equilibrium_limits(seed in any::<u64>(), n in 1usize..9, a in 0u8..4, b in 0u8..4) {
        let g = common::random_nmc(seed, n, 6);
        let c = random_cut(seed, n);
        prop_assert_eq!(is_approx_equilibrium_nmc(&g, &c, &int(0)).unwrap(), is_local_optimum(&g, &c).unwrap());
        let (lo, hi) = if eps_of(a) <= eps_of(b) { (eps_of(a), eps_of(b)) } else { (eps_of(b), eps_of(a)) };
        if is_approx_equilibrium_nmc(&g, &c, &lo).unwrap() {
            prop_assert!(is_approx_equilibrium_nmc(&g, &c, &hi).unwrap());
        }
    }

    #[test]
    fn local_search_reaches_local_optimum(seed in any::<u64>(), n in 1usize..14, rule in 0u8..3) {
        let g = common::random_nmc(seed, n, 16);
        let rule = [FlipRule::First, FlipRule::MaxGain, FlipRule::Random][rule as usize];
        let mut e = FlipEngine::new(&g, random_cut(seed, n)).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut prev = cut_value(&g, e.cut()).unwrap();
        while let Some(v) = e.pick(rule, &mut r) {
            e.flip(v);
            let now = cut_value(&g, e.cut()).unwrap();
            prop_assert!(now > prev);
            prev = now;
        }
        prop_assert!(is_local_optimum(&g, e.cut()).unwrap());
    }

    #[test]
    fn real_next_strictly_improves(k in 0usize..20, bits in 0u64..8) {
        let corpus = common::circuit_corpus();
        let (_, c) = &corpus[k];
        let s = bits_of(bits % (1 << c.n_inputs()), c.n_inputs());
        let t = real_next(c, &s).unwrap();
        if t == s {
            prop_assert!(is_flip_local_opt(c, &s).unwrap());
            for i in 0..s.len() {
                let mut u = s.clone();
                u[i] ^= 1;
                prop_assert!(real_val(c, &u).unwrap() <= real_val(c, &s).unwrap());
            }
        } else {
            prop_assert_eq!(t.iter().zip(&s).filter(|(a, b)| a != b).count(), 1);
            prop_assert!(real_val(c, &t).unwrap() > real_val(c, &s).unwrap());
        }
    }

    #[test]
    fn gates_read_larger_numbers(k in 0usize..20) {
        let corpus = common::circuit_corpus();
        // the compiler numbers the augmented circuit
        let c = &augment_next_val(&corpus[k].1);
        let o = reverse_topological_order(c).unwrap();
        let mut seen = o.index.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (1..=c.gates().len()).collect::<Vec<_>>());
        for (g, &(a, b)) in c.gates().iter().enumerate() {
            for op in [a, b] {
                if let Operand::Gate(h) = op {
                    prop_assert!(o.index[h] > o.index[g]);
                }
            }
        }
    }

    #[test]
    fn potential_identity(seed in any::<u64>()) {
        let g = common::random_game(seed);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let p = random_profile(&g, &mut r);
        let i = r.gen_range(0..g.num_players());
        let alt = random_profile(&g, &mut r);
        let mut q = p.clone();
        q.paths[i] = alt.paths[i].clone();
        let (_, c1) = congestion_and_costs(&g, &p).unwrap();
        let (_, c2) = congestion_and_costs(&g, &q).unwrap();
        let lhs = potential_wcg(&g, &p).unwrap() - potential_wcg(&g, &q).unwrap();
        prop_assert_eq!(lhs, int(2) * &g.players[i].w * (&c1[i] - &c2[i]));
    }

    #[test]
    fn dynamics_potential_decreases(seed in any::<u64>(), sched in 0u8..3) {
        let g = common::random_game(seed);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let p = random_profile(&g, &mut r);
        let schedule = [Schedule::RoundRobin, Schedule::MaxGain, Schedule::Random(seed)][sched as usize];
        let mut prev = potential_wcg(&g, &p).unwrap();
        prop_assert!(prev >= int(0));
        let (end, trace) = br_dynamics(&g, &p, schedule, &int(0), 100_000).unwrap();
        for s in &trace {
            prop_assert!(s.new_cost < s.old_cost);
            prop_assert!(s.potential < prev);
            prop_assert!(s.potential >= int(0));
            prev = s.potential.clone();
        }
        prop_assert_eq!(potential_wcg(&g, &end).unwrap(), prev);
        prop_assert!(is_pne(&g, &end, &int(0)).unwrap());
    }

    #[test]
    fn pne_iff_no_cheaper_best_response(seed in any::<u64>()) {
        let g = common::random_game(seed);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let p = random_profile(&g, &mut r);
        let (_, cost) = congestion_and_costs(&g, &p).unwrap();
        let stable = (0..g.num_players()).all(|i| best_response(&g, &p, i).unwrap().1 >= cost[i]);
        prop_assert_eq!(is_pne(&g, &p, &int(0)).unwrap(), stable);
    }

    #[test]
    fn sp_path_count_matches_enumeration(shape in prop::collection::vec(0u8..3, 1..9)) {
        // fold a random sequence of leaves into a composition tree
        let leaf = || SpTerm::leaf(LinearLatency::identity());
        let mut t = leaf();
        for s in shape {
            t = match s {
                0 => SpTerm::series(t, leaf()),
                1 => SpTerm::parallel(t, leaf()),
                _ => SpTerm::parallel(SpTerm::series(leaf(), leaf()), t),
            };
        }
        let sp = sp_realize(&t);
        let paths = enumerate_paths(&sp.net, sp.o, sp.d, 100_000).unwrap();
        prop_assert_eq!(paths.len() as u128, t.path_count());
    }

    #[test]
    fn rounding_sandwich(seed in any::<u64>(), n in 1usize..12, k in 0u8..4) {
        let g = common::random_nmc(seed, n, 64);
        let eps = eps_of(k);
        let r = round_weights(&g, &eps).unwrap();
        for i in 0..n {
            let w = g.weight(i);
            prop_assert!(&r.rounded(i) <= w);
            prop_assert!(w < &(r.rounded(i) * r.base()));
        }
        let gr = group_weights(&r);
        prop_assert!(cross_group_domination(&gr, n, &eps));
        prop_assert_eq!(gr.groups.iter().map(Vec::len).sum::<usize>(), n);
    }

    #[test]
    fn bridgegaps_flip_drops(seed in any::<u64>(), n in 2usize..14, k in 0u8..3, maxg in any::<bool>()) {
        let g = common::random_nmc(seed, n, 40);
        let eps = eps_of(k);
        let opts = SolveOptions { rule: if maxg { ViolatorRule::MaxGain } else { ViolatorRule::First }, delta_variant: false };
        let s = bridgegaps_solve(&g, &eps, &random_cut(seed, n), opts).unwrap();
        for d in &s.drops {
            prop_assert!(d >= &eps);
        }
        prop_assert!(Weight::from_integer(s.flips.into()) <= s.flip_bound);
        let cube = (int(1) + &eps) * (int(1) + &eps) * (int(1) + &eps) - int(1);
        prop_assert!(is_approx_equilibrium_nmc(&g, &s.cut, &cube).unwrap());
        prop_assert!(s.verified);
    }

    #[test]
    fn fast_predicates_agree_with_brute_force(seed in any::<u64>(), n in 1usize..9) {
        let g = common::random_nmc(seed, n, 4);
        let lo = canonical_set(&brute_local_optima(&g).unwrap());
        for mask in 0u64..1 << n {
            let c = Cut::from_mask(mask, n);
            prop_assert_eq!(is_local_optimum(&g, &c).unwrap(), lo.contains(c.canonical().sides()));
        }
    }

    #[test]
    fn pne_agrees_with_brute_force(seed in any::<u64>()) {
        let g = common::random_game(seed);
        let all = brute_pne(&g).unwrap();
        prop_assert!(!all.is_empty());
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let p = random_profile(&g, &mut r);
            prop_assert_eq!(is_pne(&g, &p, &int(0)).unwrap(), all.contains(&p));
        }
        for p in &all {
            prop_assert!(is_pne(&g, p, &int(0)).unwrap());
        }
    }

    #[test]
    fn seeded_runs_repeat(seed in any::<u64>(), n in 2usize..12) {
        let g = common::random_nmc(seed, n, 30);
        let start = random_cut(seed, n);
        let a = bridgegaps_solve(&g, &ratio(1, 2), &start, SolveOptions::default()).unwrap();
        let b = bridgegaps_solve(&g, &ratio(1, 2), &start, SolveOptions::default()).unwrap();
        prop_assert_eq!((a.cut, a.flips, a.drops), (b.cut, b.flips, b.drops));
        let h = common::random_game(seed);
        let p = random_profile(&h, &mut ChaCha8Rng::seed_from_u64(seed));
        let x = br_dynamics(&h, &p, Schedule::Random(seed), &int(0), 100_000).unwrap();
        let y = br_dynamics(&h, &p, Schedule::Random(seed), &int(0), 100_000).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn text_formats_round_trip(seed in any::<u64>(), n in 1usize..9) {
        let g = GraphFile::Nmc(common::random_nmc(seed, n, 80));
        let text = io::wrap(Kind::Graph, "test", &io::emit_graph(&g));
        prop_assert_eq!(io::parse_graph(&text).unwrap(), g);
        let h = GraphFile::Mc(common::random_mc(seed, n.max(2), 1000));
        let text = io::wrap(Kind::Graph, "", &io::emit_graph(&h));
        prop_assert_eq!(io::parse_graph(&text).unwrap(), h);
        let c = random_cut(seed, n);
        prop_assert_eq!(io::parse_cut(&io::wrap(Kind::Cut, "", &io::emit_cut(&c))).unwrap(), c);
        let game = common::random_game(seed);
        let text = io::wrap(Kind::Game, "", &io::emit_game(&game));
        prop_assert_eq!(io::parse_game(&text).unwrap(), game.clone());
        let p: Profile = random_profile(&game, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(io::parse_profile(&io::wrap(Kind::Profile, "", &io::emit_profile(&p))).unwrap(), p);
    }

    #[test]
    fn corrupted_checksum_is_rejected(seed in any::<u64>(), n in 2usize..6) {
        let g = GraphFile::Nmc(common::random_nmc(seed, n, 8));
        let text = io::wrap(Kind::Graph, "", &io::emit_graph(&g));
        let tampered = text.replacen("\nv 0 ", "\nv 0 1", 1);
        prop_assert!(io::parse_graph(&tampered).is_err());
    }
}

#[test]
fn netlists_round_trip() {
    for (name, c) in common::circuit_corpus() {
        let text = io::wrap(Kind::Netlist, name, &io::emit_netlist(&c));
        assert_eq!(io::parse_netlist(&text).unwrap(), c, "{name}");
    }
}
