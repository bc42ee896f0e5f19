"""Independent auditors and brute-force oracles.

Everything here is recomputed from the instance and the picked edge list;
no solver-carried number is trusted except an optionally supplied LP value
(which can also be recomputed).  Connectivity is checked by unit-capacity
max-flow, i.e. by counting edge-disjoint paths.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .cuts import CapGraph, max_flow
from .instance import Instance
from .rational import Rat, ZERO, as_rat, rat_str


class AuditInputError(ValueError):
    """The proposed solution references edges the instance does not have."""


class BruteForceLimitError(ValueError):
    """Instance too large for exhaustive subset enumeration."""


BRUTE_FORCE_EDGE_LIMIT = 22


@dataclass(frozen=True)
class PairCheck:
    u: int
    v: int
    required: int
    achieved: int

    @property
    def ok(self) -> bool:
        return self.achieved >= self.required


@dataclass(frozen=True)
class DegreeCheck:
    vertex: int
    degree: int
    bound: int
    limit: int  # 2 * bound + 2

    @property
    def ok(self) -> bool:
        return self.degree <= self.limit


@dataclass(frozen=True)
class LowerCheck:
    vertex: int
    degree: int
    required: int

    @property
    def ok(self) -> bool:
        return self.degree >= self.required


@dataclass(frozen=True)
class CostCheck:
    cost: Rat
    lp_value: Rat
    ratio: Rat | None  # None when the LP value is 0

    @property
    def ok(self) -> bool:
        return self.cost <= 2 * self.lp_value


@dataclass(frozen=True)
class AuditReport:
    connectivity: tuple[PairCheck, ...]
    degrees: tuple[DegreeCheck, ...]
    lower_bounds: tuple[LowerCheck, ...]
    cost: CostCheck

    @property
    def overall(self) -> bool:
        return (
            all(c.ok for c in self.connectivity)
            and all(d.ok for d in self.degrees)
            and all(l.ok for l in self.lower_bounds)
            and self.cost.ok
        )

    def render(self) -> str:
        lines = []
        for c in self.connectivity:
            lines.append(
                f"connectivity {c.u} {c.v} required={c.required} "
                f"achieved={c.achieved} {'pass' if c.ok else 'FAIL'}"
            )
        for d in self.degrees:
            lines.append(
                f"degree {d.vertex} deg={d.degree} bound={d.bound} "
                f"limit={d.limit} {'pass' if d.ok else 'FAIL'}"
            )
        for l in self.lower_bounds:
            lines.append(
                f"lower {l.vertex} deg={l.degree} required={l.required} "
                f"{'pass' if l.ok else 'FAIL'}"
            )
        ratio = "none" if self.cost.ratio is None else rat_str(self.cost.ratio)
        lines.append(
            f"cost value={rat_str(self.cost.cost)} lp={rat_str(self.cost.lp_value)} "
            f"ratio={ratio} {'pass' if self.cost.ok else 'FAIL'}"
        )
        lines.append(f"overall {'pass' if self.overall else 'FAIL'}")
        return "\n".join(lines)


def _check_picked(inst: Instance, picked: Iterable[int]) -> tuple[int, ...]:
    ids = tuple(picked)
    seen = set()
    for e in ids:
        if not 0 <= e < len(inst.edges):
            raise AuditInputError(f"unknown edge id {e}")
        if e in seen:
            raise AuditInputError(f"duplicate edge id {e}")
        seen.add(e)
    return tuple(sorted(ids))


def _degree(inst: Instance, picked: Sequence[int], v: int) -> int:
    return sum(1 for e in picked if inst.edges[e].touches(v))


def _disjoint_paths(inst: Instance, picked: Sequence[int], u: int, v: int) -> int:
    arcs = tuple((inst.edges[e].u, inst.edges[e].v, 1) for e in picked)
    value, _ = max_flow(CapGraph(inst.n, arcs), u, v)
    if as_rat(value).denominator != 1:
        raise RuntimeError("unit-capacity flow must be integral")
    return int(value)


def audit(inst: Instance, picked: Iterable[int], lp_value: Rat | None = None) -> AuditReport:
    """Certify a proposed edge set against every guarantee.

    Checks per-pair edge-disjoint path counts, per-vertex degrees against
    2 b(v) + 2, degree lower bounds, and cost against twice the LP value.
    When ``lp_value`` is omitted it is recomputed from a fresh LP solve.
    """
    ids = _check_picked(inst, picked)
    if lp_value is None:
        from .rounding import initial_state, solve_cut_lp

        lp_value = solve_cut_lp(initial_state(inst)).value
    connectivity = tuple(
        PairCheck(u, v, need, _disjoint_paths(inst, ids, u, v))
        for (u, v), need in sorted(inst.req.items())
    )
    degrees = tuple(
        DegreeCheck(v, _degree(inst, ids, v), b, 2 * b + 2)
        for v, b in sorted(inst.bounds.items())
    )
    lowers = tuple(
        LowerCheck(v, _degree(inst, ids, v), l) for v, l in sorted(inst.lower.items())
    )
    cost = inst.total_cost(ids)
    lp_value = as_rat(lp_value)
    ratio = None if lp_value == 0 else cost / lp_value
    return AuditReport(
        connectivity=connectivity,
        degrees=degrees,
        lower_bounds=lowers,
        cost=CostCheck(cost, lp_value, ratio),
    )


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------


def _mask_feasible(inst, mask_ids, inc_masks, mask, relax) -> bool:
    for v, b in inst.bounds.items():
        if (mask & inc_masks[v]).bit_count() > b + relax:
            return False
    for v, l in inst.lower.items():
        if (mask & inc_masks[v]).bit_count() < l:
            return False
    if not inst.req:
        return True
    # cheap connectivity screen first, exact flows only for survivors
    parent = list(range(inst.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in mask_ids:
        ra, rb = find(inst.edges[e].u), find(inst.edges[e].v)
        if ra != rb:
            parent[ra] = rb
    for (u, v), need in inst.req.items():
        if find(u) != find(v):
            return False
    for (u, v), need in inst.req.items():
        if need >= 2:
            arcs = tuple((inst.edges[e].u, inst.edges[e].v, 1) for e in mask_ids)
            value, _ = max_flow(CapGraph(inst.n, arcs), u, v)
            if value < need:
                return False
    return True


def brute_force_opt(inst: Instance, relax: int = 0):
    """Exhaustive minimum-cost feasible edge subset, or None.

    Feasibility means all pairwise requirements, all lower bounds, and
    deg(v) <= b(v) + relax on degree-constrained vertices.  Ties are broken
    by the lexicographically smallest edge-id set.  Under unit costs the
    search runs cardinality level by level and stops at the first feasible
    level; general costs force a full scan.  Guarded at |E| <= 22.
    """
    m = len(inst.edges)
    if m > BRUTE_FORCE_EDGE_LIMIT:
        raise BruteForceLimitError(
            f"|E| = {m} exceeds the brute-force limit of {BRUTE_FORCE_EDGE_LIMIT}"
        )
    inc_masks = [0] * inst.n
    for i, e in enumerate(inst.edges):
        inc_masks[e.u] |= 1 << i
        inc_masks[e.v] |= 1 << i

    unit = all(e.cost == 1 for e in inst.edges)
    if unit:
        for k in range(m + 1):
            for combo in itertools.combinations(range(m), k):
                mask = 0
                for i in combo:
                    mask |= 1 << i
                if _mask_feasible(inst, combo, inc_masks, mask, relax):
                    return combo, as_rat(k)
        return None

    best_cost = None
    best_ids = None
    for mask in range(1 << m):
        ids = tuple(i for i in range(m) if mask >> i & 1)
        cost = inst.total_cost(ids)
        if best_cost is not None and (
            cost > best_cost or (cost == best_cost and ids >= best_ids)
        ):
            continue
        if _mask_feasible(inst, ids, inc_masks, mask, relax):
            best_cost, best_ids = cost, ids
    if best_ids is None:
        return None
    return best_ids, best_cost


@dataclass(frozen=True)
class GuaranteeReport:
    cost: Rat
    lp_value: Rat
    opt_cost: Rat | None  # None when the exact oracle found no solution

    @property
    def lp_ok(self) -> bool:
        return self.cost <= 2 * self.lp_value

    @property
    def opt_ok(self) -> bool | None:
        if self.opt_cost is None:
            return None
        return self.cost <= 2 * self.opt_cost

    @property
    def overall(self) -> bool:
        return self.lp_ok and self.opt_ok is not False

    def render(self) -> str:
        lines = [
            f"cost {rat_str(self.cost)}",
            f"lp {rat_str(self.lp_value)} twice-lp-margin "
            f"{rat_str(2 * self.lp_value - self.cost)} "
            f"{'pass' if self.lp_ok else 'FAIL'}",
        ]
        if self.opt_cost is None:
            lines.append("opt none (exact oracle infeasible; clause vacuous)")
        else:
            lines.append(
                f"opt {rat_str(self.opt_cost)} twice-opt-margin "
                f"{rat_str(2 * self.opt_cost - self.cost)} "
                f"{'pass' if self.opt_ok else 'FAIL'}"
            )
        lines.append(f"overall {'pass' if self.overall else 'FAIL'}")
        return "\n".join(lines)


def check_guarantee(inst: Instance, solution, oracle) -> GuaranteeReport:
    """Compare a solver Solution against the exact brute-force oracle.

    Asserts cost <= 2 * OPT whenever the oracle found a feasible subset, and
    always asserts cost <= 2 * LP value.
    """
    opt_cost = None if oracle is None else as_rat(oracle[1])
    return GuaranteeReport(
        cost=as_rat(solution.cost),
        lp_value=as_rat(solution.root_lp_value),
        opt_cost=opt_cost,
    )
