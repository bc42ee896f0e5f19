import random

import pytest

from degsnd.cuts import CapGraph, max_flow
from degsnd.instance import gen_fixture, gen_random
from degsnd.rational import Rat, as_rat
from degsnd.rounding import initial_state, solve, solve_cut_lp
from degsnd.verify import (
    AuditInputError,
    BruteForceLimitError,
    audit,
    brute_force_opt,
    check_guarantee,
)

from helpers import brute_min_st_cut, mk


def test_audit_k4_end_to_end():
    inst = gen_fixture("k4", rho=1, bound=1)
    solution, _ = solve(inst)
    report = audit(inst, solution.picked, lp_value=solution.root_lp_value)
    assert report.overall
    text = report.render()
    assert "overall pass" in text
    assert all(line.endswith("pass") for line in text.splitlines())


def test_audit_recomputes_lp_value_when_missing():
    inst = gen_fixture("k4", rho=1, bound=1)
    solution, _ = solve(inst)
    report = audit(inst, solution.picked)
    assert report.cost.lp_value == 2


def test_audit_tree_fails_two_connectivity():
    inst = mk(
        4,
        [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)],
        req={(0, 2): 2},
    )
    report = audit(inst, [0, 1], lp_value=Rat(4))
    (pair,) = report.connectivity
    assert pair.required == 2 and pair.achieved == 1 and not pair.ok
    assert not report.overall
    assert "FAIL" in report.render()


def test_audit_empty_solution_trivial_instance():
    inst = mk(3, [(0, 1, 1)])
    report = audit(inst, [], lp_value=Rat(0))
    assert report.overall
    assert report.cost.cost == 0
    assert report.cost.ratio is None


def test_audit_degree_and_lower_checks():
    inst = mk(3, [(0, 1, 1), (0, 1, 1), (0, 2, 1)], bounds={0: 0}, lower={2: 1})
    report = audit(inst, [0, 1], lp_value=Rat(1))
    (deg,) = report.degrees
    assert deg.limit == 2 and deg.degree == 2 and deg.ok
    (low,) = report.lower_bounds
    assert low.degree == 0 and not low.ok
    assert not report.overall


def test_audit_rejects_unknown_and_duplicate_edges():
    inst = mk(3, [(0, 1, 1)])
    with pytest.raises(AuditInputError):
        audit(inst, [99], lp_value=Rat(0))
    with pytest.raises(AuditInputError):
        audit(inst, [0, 0], lp_value=Rat(0))


def test_brute_k4_spanning_tree():
    inst = gen_fixture("k4", rho=1)
    ids, cost = brute_force_opt(inst)
    assert cost == 3
    assert ids == (0, 1, 2)  # lexicographically smallest spanning tree


def test_brute_k4_unit_bounds_infeasible():
    inst = gen_fixture("k4", rho=1, bound=1)
    assert brute_force_opt(inst, relax=0) is None
    # with a +1 slack a Hamiltonian path exists
    assert brute_force_opt(inst, relax=1) is not None


def test_brute_five_cycle():
    inst = gen_fixture("cycle", n=5, rho=2)
    ids, cost = brute_force_opt(inst)
    assert ids == (0, 1, 2, 3, 4) and cost == 5


def test_brute_edge_limit_guard():
    inst = mk(3, [(0, 1, 1)] * 23)
    with pytest.raises(BruteForceLimitError):
        brute_force_opt(inst)


def test_brute_general_costs_and_tie_break():
    inst = mk(2, [(0, 1, 1), (0, 1, 1)], req={(0, 1): 1})
    ids, cost = brute_force_opt(inst)
    assert ids == (0,) and cost == 1
    inst2 = mk(3, [(0, 1, 5), (0, 1, 2), (1, 2, 3)], req={(0, 1): 1})
    ids2, cost2 = brute_force_opt(inst2)
    assert ids2 == (1,) and cost2 == 2


def test_brute_respects_lower_bounds():
    inst = mk(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], lower={0: 2})
    ids, cost = brute_force_opt(inst)
    assert cost == 2
    assert sum(1 for e in ids if inst.edges[e].touches(0)) == 2


def test_lp_value_is_lower_bound_on_opt():
    for seed in range(12):
        inst = gen_random(n=5, m=8, seed=400 + seed, bound_fraction=0.4)
        oracle = brute_force_opt(inst, relax=0)
        if oracle is None:
            continue
        lp = solve_cut_lp(initial_state(inst)).value
        assert lp <= oracle[1]


def test_menger_consistency():
    # edge-disjoint path count == unit max-flow == brute-force min cut
    rng = random.Random(17)
    for _ in range(25):
        n = rng.randint(3, 8)
        m = rng.randint(n - 1, 12)
        edges = []
        for _ in range(m):
            u, v = rng.sample(range(n), 2)
            edges.append((min(u, v), max(u, v), 1))
        inst = mk(n, edges)
        picked = [e for e in range(m) if rng.random() < 0.6]
        arcs = tuple((inst.edges[e].u, inst.edges[e].v, 1) for e in picked)
        u, v = rng.sample(range(n), 2)
        flow, _ = max_flow(CapGraph(n, arcs), u, v)
        assert flow == brute_min_st_cut(n, arcs, u, v)


def test_check_guarantee_vacuous_opt():
    inst = gen_fixture("k4", rho=1, bound=1)
    solution, _ = solve(inst)
    report = check_guarantee(inst, solution, brute_force_opt(inst))
    assert report.opt_cost is None and report.opt_ok is None
    assert report.lp_ok and report.overall
    assert "vacuous" in report.render()


def test_check_guarantee_pure_sndp():
    hits = 0
    for seed in range(10):
        inst = gen_random(n=5, m=8, seed=600 + seed, bound_fraction=0.0)
        assert not inst.bounds
        solution, _ = solve(inst)
        oracle = brute_force_opt(inst)
        assert oracle is not None  # no degree bounds: LP-feasible implies solvable
        report = check_guarantee(inst, solution, oracle)
        assert report.opt_ok and report.lp_ok and report.overall
        hits += 1
    assert hits == 10
