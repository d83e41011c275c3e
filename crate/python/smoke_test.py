"""Smoke test for the plsforge Python bindings.

Build and install first:

    pip install --no-build-isolation -e crates/plsforge-py
    python python/smoke_test.py
"""

import plsforge_py as pf


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL {what}")
    print(f"ok   {what}")


def graphs():
    g = pf.Graph.nmc(["1", "2", "3"], [(0, 1), (1, 2), (0, 2)])
    check(g.num_vertices == 3 and g.is_nmc, "nmc graph built")
    again = pf.Graph.parse(g.to_text("smoke"))
    check(again.to_text() == g.to_text(), "graph text round trip")
    optima = g.brute_local_optima()
    check(optima == ["001"], f"triangle local optima {optima}")
    cut, _ = g.local_search(seed=3)
    check(g.is_local_optimum(cut), "local search reaches a local optimum")
    sol = g.bridgegaps("1/2", seed=1)
    check(sol["verified"] and g.is_approx_equilibrium(sol["cut"], "27/8"), "bridgegaps output is approximate")
    big = pf.Graph.nmc(["2^4000", "1"], [(0, 1)])
    check(big.cut_value("10") == "2^4000", "exponent weights stay exact")
    try:
        pf.Graph.parse("%plsforge v1 graph sha256:-\nnmc 2 1\nv 0 1\nv 1 1\ne 0 x\n")
        check(False, "malformed edge rejected")
    except ValueError as e:
        check("line 5" in str(e), f"malformed edge rejected ({e})")


def reductions():
    k2 = pf.Graph.mc(2, [(0, 1, "3")])
    red = pf.reduce_mc2sp(k2)
    check(red.game.num_players == 6, "mc2sp has three players per vertex")
    check(red.verify("exhaustive")["success"], "mc2sp exhaustive verification")
    profile, _ = red.game.dynamics(seed=2)
    check(k2.is_local_optimum(red.map_back(profile)), "mc2sp dynamics maps back to a local optimum")

    tri = pf.Graph.nmc(["1", "2", "3"], [(0, 1), (1, 2), (0, 2)])
    multi = pf.reduce_nmc2multi(tri)
    check(multi.verify("embed")["success"], "nmc2multi embedding")

    c = pf.Circuit.parse("%plsforge v1 netlist sha256:-\ncircuit 1 1\ng 1 NOR x1 x1\noutputs g1\n")
    check(c.eval("0") == "1" and c.is_flip_local_opt("0"), "NOT circuit evaluates")
    n = c.n_min()
    cf = pf.reduce_cf2nmc(c)
    check(cf.scale == n and cf.num_vertices > 0, f"cf2nmc compiles at N={n} ({cf.num_vertices} vertices)")
    check(cf.role(0) in ("super1", "super0", "flag"), f"vertex 0 role {cf.role(0)}")


def lemmas():
    ids = pf.lemma_ids()
    check(len(ids) == 11, "eleven gadget lemmas")
    out = pf.gadget_check("super_comparison", 6)
    check(out["holds"], f"super_comparison holds ({out['mode']}, {out['cases']} cases)")
    check(pf.normalize_weight("2^3+2^3") == "16", "weight sums normalize")


if __name__ == "__main__":
    graphs()
    reductions()
    lemmas()
    print("all smoke checks passed")
