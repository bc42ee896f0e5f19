"""Exact rational linear programming.

Minimize c.x subject to sparse >=/<= rows and the implicit bounds x >= 0.
There are no implicit upper bounds: if a model wants x <= 1 it must say so
with an explicit row.  The solver is a dense two-phase primal simplex with
Bland's smallest-index anti-cycling rule, so it terminates on every input
and is deterministic.  All arithmetic is exact; a returned Optimal solution
satisfies every row with no tolerance, and is a vertex of the row-defined
polyhedron (tight constraints have full rank).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Mapping, Sequence

from .rational import ONE, ZERO, Rat, as_rat, rat_str

GE = ">="
LE = "<="


@dataclass(frozen=True)
class CutRow:
    """Provenance tag: connectivity row across the cut with these members."""

    members: tuple[int, ...]

    def __str__(self):
        return "cut {%s}" % ",".join(map(str, self.members))


@dataclass(frozen=True)
class DegreeRow:
    """Provenance tag: degree bound row of a vertex."""

    vertex: int

    def __str__(self):
        return f"degree v{self.vertex}"


@dataclass(frozen=True)
class BoundRow:
    """Provenance tag: upper bound row of a single edge variable."""

    edge: int

    def __str__(self):
        return f"bound e{self.edge}"


@dataclass(frozen=True)
class Row:
    coeffs: Mapping[int, Rat]
    sense: str
    rhs: Rat
    tag: object = None


@dataclass(frozen=True)
class LpProblem:
    num_vars: int
    objective: tuple[Rat, ...]
    rows: tuple[Row, ...]

    def __post_init__(self):
        if len(self.objective) != self.num_vars:
            raise ValueError("objective length must equal num_vars")
        for i, row in enumerate(self.rows):
            if not row.coeffs:
                raise ValueError(f"row {i} is empty")
            if row.sense not in (GE, LE):
                raise ValueError(f"row {i}: bad sense {row.sense!r}")
            for j, c in row.coeffs.items():
                if not 0 <= j < self.num_vars:
                    raise ValueError(f"row {i}: variable {j} out of range")
                if c == 0:
                    raise ValueError(f"row {i}: zero coefficient for variable {j}")


class Status(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class BasicSolution:
    """Result of a solve; values/objective are present only when optimal.

    ``tight_rows`` are the row indices satisfied with equality and ``basis``
    is a linearly independent tight subset of size num_vars (entries are
    ("row", i) or ("nonneg", j)) certifying that the point is a vertex.
    """

    status: Status
    values: tuple[Rat, ...] | None = None
    objective_value: Rat | None = None
    tight_rows: tuple[int, ...] = ()
    basis: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class VertexReport:
    """Rank audit of the tight constraints at a claimed solution."""

    num_vars: int
    rank: int
    tight_rows: tuple[int, ...]
    zero_vars: tuple[int, ...]
    null_direction: tuple[Rat, ...] | None

    @property
    def ok(self) -> bool:
        return self.rank == self.num_vars

    def render(self) -> str:
        head = f"tight-rank {self.rank} of {self.num_vars}: " + (
            "vertex" if self.ok else "NOT a vertex"
        )
        if self.null_direction is None:
            return head
        direction = ", ".join(rat_str(d) for d in self.null_direction)
        return head + f"\nconvex-combination direction: ({direction})"


# ---------------------------------------------------------------------------
# Simplex
# ---------------------------------------------------------------------------
#
# Tableau convention: one list per constraint row, slack/surplus columns after
# the structural ones, artificials last, rhs at index -1.  Exactly-zero
# entries may be stored as int 0; every nonzero entry is a Rat, so a pivot
# element is never subject to integer division.


def _pivot(tab, obj, basis, pi, pj):
    prow = tab[pi]
    piv = prow[pj]
    if piv != ONE:
        inv = ONE / piv
        prow = [v * inv if v else 0 for v in prow]
        tab[pi] = prow
    for k in range(len(tab)):
        if k == pi:
            continue
        row = tab[k]
        f = row[pj]
        if f:
            tab[k] = [a - f * b if b else a for a, b in zip(row, prow)]
    f = obj[pj]
    if f:
        obj[:] = [a - f * b if b else a for a, b in zip(obj, prow)]
    basis[pi] = pj


def _bland(tab, obj, basis, ncols) -> str:
    while True:
        pj = -1
        for j in range(ncols):
            if obj[j] < 0:
                pj = j
                break
        if pj < 0:
            return "optimal"
        best_key = None
        best_i = -1
        for i, trow in enumerate(tab):
            a = trow[pj]
            if a > 0:
                key = (trow[-1] / a, basis[i])
                if best_key is None or key < best_key:
                    best_key, best_i = key, i
        if best_i < 0:
            return "unbounded"
        _pivot(tab, obj, basis, best_i, pj)


def _reduced_cost_row(costs, tab, basis, width):
    obj = list(costs) + [0] * (width + 1 - len(costs))
    for i, b in enumerate(basis):
        cb = costs[b] if b < len(costs) else 0
        if cb:
            trow = tab[i]
            obj = [a - cb * t if t else a for a, t in zip(obj, trow)]
    return obj


def solve_restricted(problem: LpProblem) -> BasicSolution:
    """Solve to an optimal basic (vertex) solution, or report in/unboundedness."""
    n = problem.num_vars
    m = len(problem.rows)
    if m == 0:
        if any(c < 0 for c in problem.objective):
            return BasicSolution(status=Status.UNBOUNDED)
        return _finish(problem, (ZERO,) * n)

    prepared = []
    art_rows = []
    for i, row in enumerate(problem.rows):
        vec = [0] * n
        for j, c in row.coeffs.items():
            vec[j] = as_rat(c)
        slack = 1 if row.sense == LE else -1
        rhs = as_rat(row.rhs)
        if rhs < 0:
            vec = [-c if c else 0 for c in vec]
            slack = -slack
            rhs = -rhs
        prepared.append((vec, slack, rhs))
        if slack == -1:
            art_rows.append(i)

    art_start = n + m
    n_art = len(art_rows)
    art_col = {r: art_start + k for k, r in enumerate(art_rows)}
    width = art_start + n_art

    tab = []
    basis = []
    for i, (vec, slack, rhs) in enumerate(prepared):
        trow = vec + [0] * (m + n_art) + [rhs]
        trow[n + i] = ONE if slack == 1 else -ONE
        if i in art_col:
            trow[art_col[i]] = ONE
            basis.append(art_col[i])
        else:
            basis.append(n + i)
        tab.append(trow)

    if n_art:
        phase1_costs = [0] * art_start + [ONE] * n_art
        obj = _reduced_cost_row(phase1_costs, tab, basis, width)
        status = _bland(tab, obj, basis, width)
        if status != "optimal":
            raise RuntimeError("phase-1 objective is bounded; cannot be unbounded")
        if obj[-1] != 0:  # obj[-1] = -sum of artificials
            return BasicSolution(status=Status.INFEASIBLE)
        for i in range(m):
            if basis[i] >= art_start:
                # rhs is 0 here; the row's own slack column is never zeroed
                # by pivots on other rows, so a pivot column always exists.
                pj = next((j for j in range(art_start) if tab[i][j]), None)
                if pj is None:
                    raise RuntimeError("row lost its slack column")
                _pivot(tab, obj, basis, i, pj)
        for i in range(m):
            tab[i] = tab[i][:art_start] + [tab[i][-1]]
        width = art_start

    costs = [as_rat(c) for c in problem.objective]
    obj = _reduced_cost_row(costs, tab, basis, width)
    status = _bland(tab, obj, basis, width)
    if status == "unbounded":
        return BasicSolution(status=Status.UNBOUNDED)

    values = [ZERO] * n
    for i, b in enumerate(basis):
        if b < n:
            values[b] = tab[i][-1]
    return _finish(problem, tuple(values))


def _dense_row(row: Row, n: int) -> list:
    vec = [0] * n
    for j, c in row.coeffs.items():
        vec[j] = as_rat(c)
    return vec


def _finish(problem: LpProblem, values: tuple[Rat, ...]) -> BasicSolution:
    for j, v in enumerate(values):
        if v < 0:
            raise RuntimeError(f"simplex returned x[{j}] < 0")
    tight = []
    for idx, row in enumerate(problem.rows):
        lhs = sum((c * values[j] for j, c in row.coeffs.items()), ZERO)
        if lhs == row.rhs:
            tight.append(idx)
        elif (row.sense == GE and lhs < row.rhs) or (row.sense == LE and lhs > row.rhs):
            raise RuntimeError(f"simplex returned a point violating row {idx}")
    value = sum((c * v for c, v in zip(problem.objective, values)), ZERO)
    basis = _independent_tight_set(problem, values, tight)
    if len(basis) != problem.num_vars:
        raise RuntimeError(
            f"returned point is not a vertex: tight rank {len(basis)}"
            f" of {problem.num_vars}"
        )
    return BasicSolution(
        status=Status.OPTIMAL,
        values=values,
        objective_value=value,
        tight_rows=tuple(tight),
        basis=basis,
    )


def _independent_tight_set(problem, values, tight) -> tuple[tuple[str, int], ...]:
    """Greedy maximal independent subset of the tight constraints."""
    n = problem.num_vars
    pivots: list[tuple[int, list]] = []
    chosen: list[tuple[str, int]] = []

    def try_add(kind, idx, vec):
        v = vec
        for col, pvec in pivots:
            f = v[col]
            if f:
                v = [a - f * b if b else a for a, b in zip(v, pvec)]
        col = next((c for c, a in enumerate(v) if a), None)
        if col is None:
            return
        piv = v[col]
        if piv != ONE:
            inv = ONE / piv
            v = [a * inv if a else 0 for a in v]
        pivots.append((col, v))
        chosen.append((kind, idx))

    for i in tight:
        try_add("row", i, _dense_row(problem.rows[i], n))
        if len(pivots) == n:
            return tuple(chosen)
    for j in range(n):
        if values[j] == 0:
            vec = [0] * n
            vec[j] = ONE
            try_add("nonneg", j, vec)
            if len(pivots) == n:
                break
    return tuple(chosen)


def _rank_and_null(matrix: list[list], n: int):
    """Rank of the row space and, when rank < n, a nonzero null vector."""
    rref = [list(r) for r in matrix]
    pivot_cols: list[tuple[int, int]] = []  # (row index in rref, column)
    r = 0
    for col in range(n):
        pr = next((i for i in range(r, len(rref)) if rref[i][col]), None)
        if pr is None:
            continue
        rref[r], rref[pr] = rref[pr], rref[r]
        piv = rref[r][col]
        if piv != ONE:
            inv = ONE / piv
            rref[r] = [a * inv if a else 0 for a in rref[r]]
        prow = rref[r]
        for i in range(len(rref)):
            if i != r:
                f = rref[i][col]
                if f:
                    rref[i] = [a - f * b if b else a for a, b in zip(rref[i], prow)]
        pivot_cols.append((r, col))
        r += 1
        if r == n:
            return n, None
    rank = r
    taken = {c for _, c in pivot_cols}
    free = next(c for c in range(n) if c not in taken)
    null = [ZERO] * n
    null[free] = ONE
    for ri, c in pivot_cols:
        null[c] = -rref[ri][free] if rref[ri][free] else ZERO
    for row in matrix:
        if sum((a * d for a, d in zip(row, null) if a), ZERO) != 0:
            raise RuntimeError("null direction check failed")
    return rank, tuple(null)


def verify_vertex(problem: LpProblem, solution: BasicSolution) -> VertexReport:
    """Recompute the tight set from scratch and audit its rank.

    Passes iff the tight rows plus the active x >= 0 bounds have rank equal
    to the number of variables; on failure the report carries a nonzero
    direction along which the point can be perturbed both ways, proving it
    is a convex combination of distinct feasible points.
    """
    if solution.status is not Status.OPTIMAL:
        raise ValueError("can only verify an Optimal solution")
    values = solution.values
    n = problem.num_vars
    tight = []
    matrix = []
    for idx, row in enumerate(problem.rows):
        lhs = sum((c * values[j] for j, c in row.coeffs.items()), ZERO)
        if lhs == row.rhs:
            tight.append(idx)
            matrix.append(_dense_row(row, n))
    zero_vars = [j for j, v in enumerate(values) if v == 0]
    for j in zero_vars:
        vec = [0] * n
        vec[j] = ONE
        matrix.append(vec)
    if not matrix:
        rank, null = 0, tuple(ONE if j == 0 else ZERO for j in range(n))
    else:
        rank, null = _rank_and_null(matrix, n)
    return VertexReport(
        num_vars=n,
        rank=rank,
        tight_rows=tuple(tight),
        zero_vars=tuple(zero_vars),
        null_direction=null,
    )


def dump_lp(problem: LpProblem, stream: IO[str]) -> None:
    """Write an LP-format style text dump with provenance comments.

    For human inspection and cross-checks against third-party solvers; the
    solver itself never reads this.  Coefficients are exact rationals, and
    the default variable domain is x >= 0 with no upper bound.
    """

    def terms(coeffs):
        parts = []
        for j in sorted(coeffs):
            c = coeffs[j]
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if mag == 1:
                parts.append(f"{sign} x{j}")
            else:
                parts.append(f"{sign} {rat_str(mag)} x{j}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text

    stream.write("\\ exact cut LP (variables are x_e >= 0, no implicit uppers)\n")
    stream.write("Minimize\n")
    objective = {j: c for j, c in enumerate(problem.objective) if c != 0}
    stream.write(" obj: " + (terms(objective) or "0") + "\n")
    stream.write("Subject To\n")
    for i, row in enumerate(problem.rows):
        tag = f"  \\ {row.tag}" if row.tag is not None else ""
        stream.write(
            f" r{i}: {terms(dict(row.coeffs))} {row.sense} {rat_str(row.rhs)}{tag}\n"
        )
    stream.write("End\n")
