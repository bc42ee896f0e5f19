"""Shared test oracles, deliberately independent of the solver internals.

The LP oracle enumerates basic points by solving square rational systems
with its own Gaussian elimination; the flow oracle enumerates all s-t cuts;
the separation oracle enumerates all proper cuts.  None of them call into
the simplex, the augmenting-path code, or the row generation they check.
"""

from __future__ import annotations

import itertools
import random

from degsnd.instance import Cut, Instance, crossing_edge_ids, cut_requirement
from degsnd.ratlp import GE, LE, LpProblem, Row
from degsnd.rational import Rat, ZERO, as_rat


def gauss_solve(matrix, rhs):
    """Solve a square rational system; None when singular."""
    n = len(matrix)
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        piv = aug[col][col]
        aug[col] = [a / piv for a in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def lp_row_dense(row: Row, n: int):
    vec = [ZERO] * n
    for j, c in row.coeffs.items():
        vec[j] = as_rat(c)
    return vec


def feasible_point(problem: LpProblem, x) -> bool:
    if any(v < 0 for v in x):
        return False
    for row in problem.rows:
        lhs = sum((c * x[j] for j, c in row.coeffs.items()), ZERO)
        if row.sense == GE and lhs < row.rhs:
            return False
        if row.sense == LE and lhs > row.rhs:
            return False
    return True


def enumerate_basic_points(problem: LpProblem):
    """Yield every feasible basic point (vertex candidate) of the LP."""
    n = problem.num_vars
    candidates = [("row", i) for i in range(len(problem.rows))]
    candidates += [("nonneg", j) for j in range(n)]
    seen = set()
    for combo in itertools.combinations(candidates, n):
        matrix, rhs = [], []
        for kind, idx in combo:
            if kind == "row":
                matrix.append(lp_row_dense(problem.rows[idx], n))
                rhs.append(as_rat(problem.rows[idx].rhs))
            else:
                vec = [ZERO] * n
                vec[idx] = as_rat(1)
                matrix.append(vec)
                rhs.append(ZERO)
        x = gauss_solve(matrix, rhs)
        if x is None:
            continue
        key = tuple(x)
        if key in seen:
            continue
        seen.add(key)
        if feasible_point(problem, x):
            yield x


def basic_point_optimum(problem: LpProblem):
    """Exact LP optimum by exhaustive vertex enumeration; None if infeasible."""
    best = None
    for x in enumerate_basic_points(problem):
        value = sum((c * v for c, v in zip(problem.objective, x)), ZERO)
        if best is None or value < best:
            best = value
    return best


def brute_min_st_cut(n, arcs, s, t):
    """Minimum s-t cut capacity by enumerating all 2^(n-2) sides."""
    others = [v for v in range(n) if v not in (s, t)]
    best = None
    for k in range(len(others) + 1):
        for extra in itertools.combinations(others, k):
            side = {s, *extra}
            cap = sum((c for u, v, c in arcs if (u in side) != (v in side)), ZERO)
            if best is None or cap < best:
                best = cap
    return best


def all_proper_cuts(n):
    """Every canonical proper cut: nonempty subsets avoiding vertex 0."""
    others = range(1, n)
    for k in range(1, n):
        for members in itertools.combinations(others, k):
            yield Cut(frozenset(members))


def violated_cuts_exhaustive(x, state):
    """All residual cut rows the fractional solution fails, by enumeration."""
    from degsnd.cuts import residual_requirement

    inst = state.inst
    active = sorted(state.active)
    out = []
    for cut in all_proper_cuts(inst.n):
        need = residual_requirement(state, cut)
        if need == 0:
            continue
        mass = sum((x.get(e, ZERO) for e in crossing_edge_ids(inst, cut, active)), ZERO)
        if mass < need:
            out.append(cut)
    return out


def random_capgraph(rng: random.Random, n: int, rational=True):
    """Connected-ish random capacity graph for flow oracle tests."""
    arcs = []
    m = rng.randint(n - 1, 2 * n)
    for _ in range(m):
        u, v = rng.sample(range(n), 2)
        if rational and rng.random() < 0.5:
            cap = Rat(rng.randint(1, 9), rng.randint(1, 4))
        else:
            cap = rng.randint(0, 6)
        arcs.append((min(u, v), max(u, v), cap))
    return n, tuple(arcs)


def mk(n, edges, req=None, bounds=None, lower=None) -> Instance:
    return Instance.create(n, edges, req, bounds, lower)
