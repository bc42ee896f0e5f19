"""Exact max-flow/min-cut and the cut-constraint separation oracle.

Connectivity rows of the cut LP are exponentially many, so they are never
materialized: a violated one is found (or ruled out) by running exact
max-flow between every required pair, with picked edges contributing unit
capacity alongside the fractional values on active edges.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping

from .instance import Cut, Instance, crossing_edge_ids, cut_requirement
from .rational import Rat, ZERO

if TYPE_CHECKING:  # pragma: no cover
    from .rounding import RoundingState


@dataclass(frozen=True)
class CapGraph:
    """Undirected capacitated multigraph; capacities are exact (int or Rat)."""

    n: int
    arcs: tuple[tuple[int, int, object], ...]

    def __post_init__(self):
        for u, v, c in self.arcs:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError("arc endpoint out of range")
            if c < 0:
                raise ValueError("negative capacity")


@dataclass(frozen=True)
class Violation:
    """A cut row the current fractional solution fails to cover."""

    cut: Cut
    required: int
    actual: Rat

    @property
    def deficit(self):
        return self.required - self.actual

    def __post_init__(self):
        if self.deficit <= 0:
            raise ValueError("not a violation: deficit must be positive")


def max_flow(g: CapGraph, s: int, t: int) -> tuple[Rat, Cut]:
    """Exact max s-t flow via shortest augmenting paths.

    Returns the flow value and the min cut given by the vertices reachable
    from s in the final residual graph (canonicalized).  The max-flow/min-cut
    certificate is checked internally: the value must equal the capacity
    crossing the returned cut.
    """
    if s == t:
        raise ValueError("source and sink must differ")
    to: list[int] = []
    cap: list = []
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for u, v, c in g.arcs:
        if c == 0 or u == v:
            continue
        adj[u].append(len(to))
        to.append(v)
        cap.append(c)
        adj[v].append(len(to))
        to.append(u)
        cap.append(c)

    value = ZERO
    parent = [-1] * g.n
    while True:
        for i in range(g.n):
            parent[i] = -1
        parent[s] = -2
        queue = deque([s])
        while queue and parent[t] == -1:
            u = queue.popleft()
            for aid in adj[u]:
                w = to[aid]
                if parent[w] == -1 and cap[aid] > 0:
                    parent[w] = aid
                    queue.append(w)
        if parent[t] == -1:
            break
        bottleneck = None
        w = t
        while w != s:
            aid = parent[w]
            r = cap[aid]
            if bottleneck is None or r < bottleneck:
                bottleneck = r
            w = to[aid ^ 1]
        w = t
        while w != s:
            aid = parent[w]
            cap[aid] -= bottleneck
            cap[aid ^ 1] += bottleneck
            w = to[aid ^ 1]
        value += bottleneck

    reachable = {u for u in range(g.n) if parent[u] != -1}
    crossing = sum(
        (c for u, v, c in g.arcs if (u in reachable) != (v in reachable)), ZERO
    )
    if crossing != value:
        raise RuntimeError("max-flow/min-cut certificate failed")
    return value, Cut.canonical(reachable, g.n)


def _merged_caps(inst: Instance, contributions) -> CapGraph:
    caps: dict[tuple[int, int], Rat] = {}
    for edge_id, c in contributions:
        e = inst.edges[edge_id]
        key = (min(e.u, e.v), max(e.u, e.v))
        caps[key] = caps.get(key, ZERO) + c
    arcs = tuple((u, v, c) for (u, v), c in sorted(caps.items()))
    return CapGraph(inst.n, arcs)


def residual_requirement(state: "RoundingState", cut: Cut) -> int:
    """Connectivity still owed across the cut after crediting picked edges."""
    picked_crossing = len(
        crossing_edge_ids(state.inst, cut, [e for e, _ in state.picked])
    )
    return max(0, cut_requirement(state.inst, cut) - picked_crossing)


def find_violated_cut(x: Mapping[int, Rat], state: "RoundingState"):
    """Separation oracle for the residual cut LP.

    Builds a capacity graph with x_e on active edges plus 1 per picked edge,
    then scans requirement pairs in lexicographic order (rho is symmetric, so
    scanning u < v finds the same first violation as the full ordered-pair
    scan) followed by degree-lower-bound singletons in vertex order.  Returns
    the first Violation, or None iff every cut row of the full LP holds.
    """
    inst = state.inst
    contributions = [(e, x.get(e, ZERO)) for e in sorted(state.active)]
    contributions += [(e, 1) for e, _ in state.picked]
    g = _merged_caps(inst, contributions)

    def active_mass(cut: Cut) -> Rat:
        ids = crossing_edge_ids(inst, cut, sorted(state.active))
        return sum((x.get(e, ZERO) for e in ids), ZERO)

    for (u, v), need in sorted(inst.req.items()):
        value, cut = max_flow(g, u, v)
        if value < need:
            required = residual_requirement(state, cut)
            return Violation(cut=cut, required=required, actual=active_mass(cut))
    for w in sorted(inst.lower):
        if inst.n < 2:
            break
        cut = Cut.canonical({w}, inst.n)
        required = residual_requirement(state, cut)
        actual = active_mass(cut)
        if actual < required:
            return Violation(cut=cut, required=required, actual=actual)
    return None


def is_feasible(state: "RoundingState") -> bool:
    """True iff the picked edges alone satisfy every requirement.

    Each required pair must have rho(u, v) edge-disjoint paths inside the
    picked set (unit-capacity max-flow), and every degree lower bound must be
    met by the picked degree.
    """
    inst = state.inst
    picked_ids = [e for e, _ in state.picked]
    g = _merged_caps(inst, [(e, 1) for e in picked_ids])
    for (u, v), need in sorted(inst.req.items()):
        value, _ = max_flow(g, u, v)
        if value < need:
            return False
    for w, l in sorted(inst.lower.items()):
        degree = sum(1 for e in picked_ids if inst.edges[e].touches(w))
        if degree < l:
            return False
    return True


def lp_feasible(inst: Instance) -> bool:
    """Feasibility of the full cut LP, decided by the row-generation loop."""
    from .rounding import initial_state, try_solve_cut_lp

    return try_solve_cut_lp(initial_state(inst)) is not None
