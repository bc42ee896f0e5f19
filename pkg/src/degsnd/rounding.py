"""The iterative rounding engine.

Each iteration solves the residual cut LP to a vertex optimum by row
generation, classifies the optimum into one of four cases (an edge at 0, an
edge at 1, a pickable heavy edge, or a degree constraint that can be
relaxed), applies exactly one case, and repeats until the picked edges
satisfy every requirement.  For weakly supermodular requirements a vertex
optimum always admits one of the four cases; hitting none is a hard error
that indicates an LP solver defect and is reported with a tight-rank audit.

Applying one case per LP solve (rather than sweeping all edges of a kind)
keeps every action justified by a vertex optimum of the exact current LP;
batch application could invalidate the preconditions of later actions in
the same sweep.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .cuts import find_violated_cut, is_feasible, residual_requirement
from .instance import Cut, Instance, crossing_edge_ids
from .ratlp import (
    GE,
    LE,
    BasicSolution,
    BoundRow,
    CutRow,
    DegreeRow,
    LpProblem,
    Row,
    Status,
    solve_restricted,
    verify_vertex,
)
from .rational import HALF, ONE, THREE_HALVES, ZERO, Rat, as_rat, rat_str

FracSolution = dict  # edge id -> Rat in [0, 1]


class LpInfeasibleError(Exception):
    """The instance's cut LP has no fractional solution."""


class ResidualInfeasibleError(RuntimeError):
    """A residual LP went infeasible mid-run; the update rules preserve
    feasibility, so this indicates an implementation bug."""


class VertexStructureError(RuntimeError):
    """A vertex optimum offered none of the four rounding cases.

    This cannot happen for weakly supermodular requirements, so it points at
    a defect in the LP solver; the exception carries the fractional solution,
    a state summary, and (when available) the tight-rank report.
    """

    def __init__(self, message, x=None, state=None, rank_report=None):
        super().__init__(message)
        self.x = x
        self.state = state
        self.rank_report = rank_report


class InvariantBreach(RuntimeError):
    """An internal invariant failed (progress, bounds, iteration cap)."""


class _EmptyRowInfeasible(Exception):
    """A cut still demands coverage but no active edge crosses it, so the
    restricted LP is infeasible without even solving it."""


class CaseKind(Enum):
    ZERO_EDGE = "zero_edge"
    ONE_EDGE = "one_edge"
    HEAVY_EDGE = "heavy_edge"
    RELAX_VERTEX = "relax_vertex"
    NONE_FOUND = "none_found"


@dataclass(frozen=True)
class RoundingCase:
    """One applicable action: the kind plus its witness edge or vertex id."""

    kind: CaseKind
    witness: int | None = None


@dataclass(frozen=True)
class RoundingState:
    """Mutable-by-replacement loop state; `apply_case` returns a new one.

    active edges are still LP variables, picked edges are committed (with
    the fractional value they carried when picked), constrained vertices
    still have a degree row, and bounds holds their current half-integral
    b' values.
    """

    inst: Instance
    active: frozenset[int]
    picked: tuple[tuple[int, Rat], ...]
    constrained: frozenset[int]
    bounds: Mapping[int, Rat]
    iteration: int = 0

    def picked_ids(self) -> list[int]:
        return [e for e, _ in self.picked]


def initial_state(inst: Instance) -> RoundingState:
    return RoundingState(
        inst=inst,
        active=frozenset(range(len(inst.edges))),
        picked=(),
        constrained=frozenset(inst.bounds),
        bounds={v: as_rat(b) for v, b in inst.bounds.items()},
        iteration=0,
    )


@dataclass(frozen=True)
class AppliedAction:
    case: RoundingCase
    value: Rat | None
    bounds_before: tuple[tuple[int, Rat], ...]
    bounds_after: tuple[tuple[int, Rat], ...]


@dataclass(frozen=True)
class IterationRecord:
    index: int
    lp_value: Rat
    support_size: int
    actions: tuple[AppliedAction, ...]
    active_after: int
    constrained_after: int


@dataclass(frozen=True)
class DegreeLine:
    vertex: int
    degree: int
    bound: int
    limit: int

    @property
    def slack(self) -> int:
        return self.limit - self.degree


@dataclass(frozen=True)
class Solution:
    picked: tuple[int, ...]
    cost: Rat
    root_lp_value: Rat
    degree_report: tuple[DegreeLine, ...]


@dataclass(frozen=True)
class CutLpResult:
    """A vertex optimum of the full residual cut LP plus its certificate."""

    x: FracSolution
    value: Rat
    problem: LpProblem
    basic: BasicSolution
    var_edges: tuple[int, ...]
    cuts_generated: int


def _singleton_cut(inst: Instance, v: int) -> Cut:
    return Cut.canonical({v}, inst.n)


def _build_problem(
    state: RoundingState, pool: Sequence[Cut]
) -> tuple[LpProblem, tuple[int, ...], set[frozenset[int]]]:
    """Restricted LP over active edges: degree rows, singleton cut rows,
    x_e <= 1 rows, plus the pooled separated cuts.

    Vacuous rows (cut rhs 0, or a degree bound no subset of incident unit
    edges can reach) are omitted; they cannot be violated or tight, so the
    polytope and the tight-rank accounting are unchanged.
    """
    inst = state.inst
    active = tuple(sorted(state.active))
    var_of = {e: i for i, e in enumerate(active)}
    objective = tuple(inst.edges[e].cost for e in active)
    rows: list[Row] = []
    present: set[frozenset[int]] = set()

    for v in sorted(state.constrained):
        coeffs = {var_of[e]: ONE for e in active if inst.edges[e].touches(v)}
        if coeffs and state.bounds[v] < len(coeffs):
            rows.append(Row(coeffs, LE, state.bounds[v], DegreeRow(v)))

    def cut_row(cut: Cut):
        need = residual_requirement(state, cut)
        if need == 0:
            return
        ids = crossing_edge_ids(inst, cut, active)
        if not ids:
            raise _EmptyRowInfeasible(
                f"cut {cut.ids()} still needs {need} but no active edge crosses it"
            )
        if cut.members in present:
            return
        coeffs = {var_of[e]: ONE for e in ids}
        rows.append(Row(coeffs, GE, as_rat(need), CutRow(cut.ids())))
        present.add(cut.members)

    if inst.n >= 2:
        for v in range(inst.n):
            cut_row(_singleton_cut(inst, v))
    for cut in pool:
        cut_row(cut)
    for e in active:
        rows.append(Row({var_of[e]: ONE}, LE, ONE, BoundRow(e)))

    return LpProblem(len(active), objective, tuple(rows)), active, present


def try_solve_cut_lp(
    state: RoundingState, pool: list[Cut] | None = None
) -> CutLpResult | None:
    """Row generation: solve, separate, add the violated row, repeat.

    Returns None when the residual LP is infeasible.  The final restricted
    optimum is feasible for the full cut LP and a vertex of an outer
    relaxation of it, hence a vertex of the full LP's polytope.  Every
    restricted optimum is audited for vertexhood (tight-constraint rank);
    ``pool`` collects the separated cuts so later solves can seed with them.
    """
    if pool is None:
        pool = []
    max_rounds = 2 ** max(state.inst.n - 1, 1) + 1
    for _ in range(max_rounds):
        try:
            problem, var_edges, present = _build_problem(state, pool)
        except _EmptyRowInfeasible:
            return None
        basic = solve_restricted(problem)
        if basic.status is Status.INFEASIBLE:
            return None
        if basic.status is Status.UNBOUNDED:
            raise InvariantBreach("cut LP unbounded despite nonnegative costs")
        report = verify_vertex(problem, basic)
        if not report.ok:
            raise InvariantBreach(
                "restricted LP solution failed the vertex audit:\n" + report.render()
            )
        x = {e: basic.values[i] for i, e in enumerate(var_edges)}
        violation = find_violated_cut(x, state)
        if violation is None:
            return CutLpResult(
                x=x,
                value=basic.objective_value,
                problem=problem,
                basic=basic,
                var_edges=var_edges,
                cuts_generated=len(pool),
            )
        if violation.cut.members in present:
            raise InvariantBreach(
                f"separation returned a cut already present: {violation.cut.ids()}"
            )
        pool.append(violation.cut)
    raise InvariantBreach("row generation failed to converge")


def solve_cut_lp(state: RoundingState, pool: list[Cut] | None = None) -> CutLpResult:
    """Vertex optimum of the full residual cut LP, or a typed failure."""
    result = try_solve_cut_lp(state, pool)
    if result is not None:
        return result
    if state.iteration == 0 and not state.picked:
        raise LpInfeasibleError("LP infeasible")
    raise ResidualInfeasibleError(
        f"residual LP infeasible at iteration {state.iteration} "
        f"(picked={state.picked_ids()}, active={sorted(state.active)})"
    )


def support_degree(x: FracSolution, state: RoundingState, v: int) -> int:
    inst = state.inst
    return sum(
        1 for e in state.active if x.get(e, ZERO) > 0 and inst.edges[e].touches(v)
    )


def classify(x: FracSolution, state: RoundingState) -> RoundingCase:
    """Pick the action a vertex optimum admits.

    Fixed priority zero-edge, one-edge, heavy-edge, relax-vertex with the
    lowest-index witness inside each class, which makes runs reproducible.
    A heavy edge (1/2 <= x < 1) is pickable only when each degree-constrained
    endpoint still has b' > 1; a constrained vertex is relaxable when its
    support degree is at most 2b' + 2.
    """
    active = sorted(state.active)
    for e in active:
        if x[e] == 0:
            return RoundingCase(CaseKind.ZERO_EDGE, e)
    for e in active:
        if x[e] == ONE:
            return RoundingCase(CaseKind.ONE_EDGE, e)
    for e in active:
        val = x[e]
        if HALF <= val < ONE:
            u, v = state.inst.edges[e].endpoints()
            if (u not in state.constrained or state.bounds[u] > ONE) and (
                v not in state.constrained or state.bounds[v] > ONE
            ):
                return RoundingCase(CaseKind.HEAVY_EDGE, e)
    for v in sorted(state.constrained):
        if support_degree(x, state, v) <= 2 * state.bounds[v] + 2:
            return RoundingCase(CaseKind.RELAX_VERTEX, v)
    raise VertexStructureError(
        "vertex optimum admits no rounding case",
        x=dict(x),
        state=state,
    )


def _drop_one_unit(b: Rat) -> Rat:
    # Picking a unit edge consumes a whole unit of the bound, except from
    # 3/2 where only the guaranteed half is charged so b' never drops below 1.
    return ONE if b == THREE_HALVES else b - ONE


def apply_case(
    case: RoundingCase, x: FracSolution, state: RoundingState
) -> RoundingState:
    """Apply exactly one case, returning the updated state."""
    kind = case.kind
    if kind is CaseKind.RELAX_VERTEX:
        v = case.witness
        if v not in state.constrained:
            raise InvariantBreach(f"relax target {v} is not constrained")
        return RoundingState(
            inst=state.inst,
            active=state.active,
            picked=state.picked,
            constrained=state.constrained - {v},
            bounds=dict(state.bounds),
            iteration=state.iteration + 1,
        )

    e = case.witness
    if e not in state.active:
        raise InvariantBreach(f"witness edge {e} is not active")
    val = x[e]
    active = state.active - {e}
    picked = state.picked
    bounds = dict(state.bounds)

    if kind is CaseKind.ZERO_EDGE:
        if val != 0:
            raise InvariantBreach(f"edge {e} has x={rat_str(val)}, not 0")
    elif kind is CaseKind.ONE_EDGE:
        if val != ONE:
            raise InvariantBreach(f"edge {e} has x={rat_str(val)}, not 1")
        picked = picked + ((e, val),)
        for w in state.inst.edges[e].endpoints():
            if w in state.constrained:
                bounds[w] = _drop_one_unit(bounds[w])
    elif kind is CaseKind.HEAVY_EDGE:
        if not HALF <= val < ONE:
            raise InvariantBreach(f"edge {e} has x={rat_str(val)}, not heavy")
        picked = picked + ((e, val),)
        for w in state.inst.edges[e].endpoints():
            if w in state.constrained:
                bounds[w] = bounds[w] - HALF
    else:
        raise InvariantBreach(f"cannot apply case kind {kind}")

    for w, b in bounds.items():
        if b < 0:
            raise InvariantBreach(f"bound of vertex {w} driven below 0")
    return RoundingState(
        inst=state.inst,
        active=active,
        picked=picked,
        constrained=state.constrained,
        bounds=bounds,
        iteration=state.iteration + 1,
    )


def solve(inst: Instance) -> tuple[Solution, tuple[IterationRecord, ...]]:
    """Run the full rounding loop and return the audited integral solution.

    Raises LpInfeasibleError when the root LP has no fractional solution.
    Guarantees on return: every requirement is met by the picked edges, the
    cost is at most twice the root LP value, and every degree-constrained
    vertex has picked degree at most 2 b(v) + 2.  Each iteration removes an
    edge or a constraint, so at most |E| + |W0| iterations run.
    """
    state = initial_state(inst)
    cap = len(inst.edges) + len(inst.bounds)
    pool: list[Cut] = []
    records: list[IterationRecord] = []
    root_value: Rat | None = None

    while not is_feasible(state):
        result = try_solve_cut_lp(state, pool)
        if result is None:
            if state.iteration == 0:
                raise LpInfeasibleError("LP infeasible")
            raise ResidualInfeasibleError(
                f"residual LP infeasible at iteration {state.iteration}"
            )
        if root_value is None:
            root_value = result.value
        try:
            case = classify(result.x, state)
        except VertexStructureError as exc:
            exc.rank_report = verify_vertex(result.problem, result.basic)
            raise
        touched = _touched_vertices(case, state)
        before = tuple((w, state.bounds[w]) for w in touched)
        new_state = apply_case(case, result.x, state)
        after = tuple((w, new_state.bounds[w]) for w in touched)
        value = None if case.kind is CaseKind.RELAX_VERTEX else result.x[case.witness]
        support = sum(1 for e in state.active if result.x[e] > 0)
        records.append(
            IterationRecord(
                index=new_state.iteration,
                lp_value=result.value,
                support_size=support,
                actions=(AppliedAction(case, value, before, after),),
                active_after=len(new_state.active),
                constrained_after=len(new_state.constrained),
            )
        )
        old_measure = len(state.active) + len(state.constrained)
        new_measure = len(new_state.active) + len(new_state.constrained)
        if new_measure >= old_measure:
            raise InvariantBreach("iteration made no progress")
        state = new_state
        if state.iteration > cap:
            raise InvariantBreach(f"exceeded iteration cap {cap}")

    if root_value is None:
        root_value = ZERO
    picked_ids = tuple(sorted(state.picked_ids()))
    degree_report = []
    for v in sorted(inst.bounds):
        degree = sum(1 for e in picked_ids if inst.edges[e].touches(v))
        b = inst.bounds[v]
        degree_report.append(DegreeLine(v, degree, b, 2 * b + 2))
    solution = Solution(
        picked=picked_ids,
        cost=inst.total_cost(picked_ids),
        root_lp_value=root_value,
        degree_report=tuple(degree_report),
    )

    from .verify import audit  # deferred: verify also consumes this module

    report = audit(inst, solution.picked, lp_value=root_value)
    if not report.overall:
        raise InvariantBreach("solution failed its own audit:\n" + report.render())
    return solution, tuple(records)


def _touched_vertices(case: RoundingCase, state: RoundingState) -> tuple[int, ...]:
    if case.kind in (CaseKind.ONE_EDGE, CaseKind.HEAVY_EDGE):
        u, v = state.inst.edges[case.witness].endpoints()
        return tuple(w for w in sorted({u, v}) if w in state.constrained)
    return ()


# ---------------------------------------------------------------------------
# Trace format
# ---------------------------------------------------------------------------
#
# One line per iteration:
#   iter=3 lp=7/2 support=9 action=heavy_edge witness=4 active=10 constrained=2
# with an optional trailing "bprime=u:3/2->1,v:2->3/2" field when the action
# changed degree bounds.  Keys are fixed so external tooling can parse lines
# without positional assumptions.


def trace_line(record: IterationRecord) -> str:
    action = record.actions[0]
    parts = [
        f"iter={record.index}",
        f"lp={rat_str(record.lp_value)}",
        f"support={record.support_size}",
        f"action={action.case.kind.value}",
        f"witness={action.case.witness}",
        f"active={record.active_after}",
        f"constrained={record.constrained_after}",
    ]
    if action.bounds_before:
        changes = ",".join(
            f"{w}:{rat_str(b)}->{rat_str(after)}"
            for (w, b), (_, after) in zip(action.bounds_before, action.bounds_after)
        )
        parts.append(f"bprime={changes}")
    return " ".join(parts)


def format_trace(records: Sequence[IterationRecord]) -> str:
    return "".join(trace_line(r) + "\n" for r in records)


def parse_trace(text: str) -> list[dict]:
    """Parse trace lines back into dicts (values kept as strings)."""
    out = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = {}
        for token in line.split():
            key, sep, value = token.partition("=")
            if not sep:
                raise ValueError(f"trace line {line_no}: bad token {token!r}")
            fields[key] = value
        for needed in ("iter", "lp", "support", "action", "witness", "active", "constrained"):
            if needed not in fields:
                raise ValueError(f"trace line {line_no}: missing field {needed!r}")
        out.append(fields)
    return out
