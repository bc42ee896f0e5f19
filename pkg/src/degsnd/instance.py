"""Problem instances: data model, text format, fixtures, random generation.

An instance is a multigraph with nonnegative edge costs, a symmetric
pairwise connectivity requirement ``rho`` (edge-disjoint path counts), an
optional degree upper bound ``b(v)`` on a subset of vertices, and optional
degree lower bounds ``l(v)``.  Vertices are dense integer ids ``0..n-1``;
edges are identified by their position in the input order so that parallel
edges stay distinguishable throughout the rounding loop.

Text format (UTF-8, line oriented, ``#`` starts a comment):

    vertices <n>            exactly once, first non-comment line
    edge <u> <v> <cost>     cost is a nonnegative integer or p/q rational
    req <u> <v> <rho>       integer >= 1
    bound <v> <b>           integer >= 0
    lower <v> <l>           integer >= 1

Canonical serialization emits the directives in that order, edges in input
order, req pairs with u < v sorted lexicographically, and bound/lower lines
sorted by vertex id.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .rational import Rat, as_rat, parse_rat, rat_str


class InstanceError(ValueError):
    """Invalid instance data: bad ids, negative costs, conflicting lines."""


class ParseError(InstanceError):
    """Malformed instance text; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class GenerationError(RuntimeError):
    """Random instance generation exhausted its retry budget."""


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    cost: Rat

    def touches(self, w: int) -> bool:
        return w == self.u or w == self.v

    def endpoints(self) -> tuple[int, int]:
        return (self.u, self.v)


@dataclass(frozen=True)
class Instance:
    """A validated problem instance; treat as immutable after construction."""

    n: int
    edges: tuple[Edge, ...]
    req: Mapping[tuple[int, int], int]
    bounds: Mapping[int, int]
    lower: Mapping[int, int]

    def __post_init__(self):
        if self.n < 1:
            raise InstanceError("vertex count must be positive")
        for i, e in enumerate(self.edges):
            if not (0 <= e.u < self.n and 0 <= e.v < self.n):
                raise InstanceError(f"edge {i}: vertex id out of range")
            if e.u == e.v:
                raise InstanceError(f"edge {i}: self-loops are not allowed")
            if e.cost < 0:
                raise InstanceError(f"edge {i}: negative cost")
        for (u, v), r in self.req.items():
            if not (0 <= u < v < self.n):
                raise InstanceError(f"req ({u},{v}): invalid vertex pair")
            if r < 1:
                raise InstanceError(f"req ({u},{v}): requirement must be >= 1")
        for v, b in self.bounds.items():
            if not 0 <= v < self.n:
                raise InstanceError(f"bound {v}: vertex id out of range")
            if b < 0:
                raise InstanceError(f"bound {v}: must be >= 0")
        for v, l in self.lower.items():
            if not 0 <= v < self.n:
                raise InstanceError(f"lower {v}: vertex id out of range")
            if l < 1:
                raise InstanceError(f"lower {v}: must be >= 1")

    @classmethod
    def create(
        cls,
        n: int,
        edges: Iterable,
        req: Mapping | None = None,
        bounds: Mapping[int, int] | None = None,
        lower: Mapping[int, int] | None = None,
    ) -> "Instance":
        """Build an instance from loosely-typed parts.

        ``edges`` items may be Edge objects or (u, v, cost) tuples; costs are
        coerced to exact rationals.  ``req`` keys may use either endpoint
        order; zero requirements are dropped, and symmetric duplicates must
        agree on the value.
        """
        norm_edges = []
        for item in edges:
            if isinstance(item, Edge):
                norm_edges.append(Edge(item.u, item.v, as_rat(item.cost)))
            else:
                u, v, cost = item
                norm_edges.append(Edge(int(u), int(v), as_rat(cost)))
        norm_req: dict[tuple[int, int], int] = {}
        for (u, v), r in (req or {}).items():
            r = int(r)
            if r == 0:
                continue
            key = (min(u, v), max(u, v))
            if key in norm_req and norm_req[key] != r:
                raise InstanceError(f"conflicting requirements for pair {key}")
            norm_req[key] = r
        return cls(
            n=int(n),
            edges=tuple(norm_edges),
            req=norm_req,
            bounds={int(v): int(b) for v, b in (bounds or {}).items()},
            lower={int(v): int(l) for v, l in (lower or {}).items() if int(l) != 0},
        )

    def rho(self, u: int, v: int) -> int:
        """Connectivity requirement between u and v (0 when absent)."""
        if u == v:
            return 0
        return self.req.get((min(u, v), max(u, v)), 0)

    def incident(self, v: int) -> list[int]:
        """Ids of edges touching v, ascending."""
        return [i for i, e in enumerate(self.edges) if e.touches(v)]

    def degree_constrained(self) -> frozenset[int]:
        """The vertex set carrying degree upper bounds."""
        return frozenset(self.bounds)

    def total_cost(self, edge_ids: Iterable[int]) -> Rat:
        return sum((self.edges[i].cost for i in edge_ids), as_rat(0))


@dataclass(frozen=True)
class Cut:
    """A proper nonempty vertex subset, stored canonically.

    The canonical representative is the side that does not contain vertex 0,
    so equality of Cut values means equality of the underlying bipartition.
    """

    members: frozenset[int]

    def __post_init__(self):
        if not self.members:
            raise InstanceError("cut must be nonempty")
        if 0 in self.members:
            raise InstanceError("cut is not canonical: contains vertex 0")

    @staticmethod
    def canonical(members: Iterable[int], n: int) -> "Cut":
        s = frozenset(members)
        if any(not 0 <= v < n for v in s):
            raise InstanceError("cut member out of range")
        if not s or len(s) >= n:
            raise InstanceError("cut must be a proper nonempty subset")
        if 0 in s:
            s = frozenset(range(n)) - s
        return Cut(s)

    def ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def separates(self, u: int, v: int) -> bool:
        return (u in self.members) != (v in self.members)


def crossing_edge_ids(
    inst: Instance, cut: Cut, among: Iterable[int] | None = None
) -> list[int]:
    """Edge ids with exactly one endpoint inside the cut.

    ``among`` restricts the scan to a subset of edge ids (e.g. the active or
    the picked set); default is all edges.
    """
    ids = range(len(inst.edges)) if among is None else among
    members = cut.members
    out = []
    for i in ids:
        e = inst.edges[i]
        if (e.u in members) != (e.v in members):
            out.append(i)
    return out


def cut_requirement(inst: Instance, cut: Cut) -> int:
    """Connectivity demanded across the cut.

    The maximum of rho(u, v) over separated pairs, raised to l(w) when one
    side of the cut is the single vertex w (degree lower bounds enter the
    model only through these singleton rows).
    """
    members = cut.members
    best = 0
    for (u, v), r in inst.req.items():
        if r > best and (u in members) != (v in members):
            best = r
    if len(members) == 1:
        (w,) = members
        best = max(best, inst.lower.get(w, 0))
    if len(members) == inst.n - 1:
        (w,) = set(range(inst.n)) - members
        best = max(best, inst.lower.get(w, 0))
    return best


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def _want(parts: Sequence[str], count: int, line_no: int):
    if len(parts) != count:
        raise ParseError(line_no, f"'{parts[0]}' expects {count - 1} fields")


def _int_field(token: str, line_no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(line_no, f"invalid {what}: {token!r}") from None


def parse_instance(text: str) -> Instance:
    """Parse instance text; raises ParseError with the offending line number."""
    n: int | None = None
    edges: list[tuple[int, int, Rat]] = []
    req: dict[tuple[int, int], int] = {}
    bounds: dict[int, int] = {}
    lower: dict[int, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        if n is None:
            if kw != "vertices":
                raise ParseError(line_no, "first directive must be 'vertices'")
            _want(parts, 2, line_no)
            n = _int_field(parts[1], line_no, "vertex count")
            if n < 1:
                raise ParseError(line_no, "vertex count must be positive")
            continue
        if kw == "vertices":
            raise ParseError(line_no, "duplicate 'vertices' directive")
        if kw == "edge":
            _want(parts, 4, line_no)
            u = _int_field(parts[1], line_no, "vertex id")
            v = _int_field(parts[2], line_no, "vertex id")
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(line_no, "vertex id out of range")
            if u == v:
                raise ParseError(line_no, "self-loops are not allowed")
            try:
                cost = parse_rat(parts[3])
            except ValueError:
                raise ParseError(line_no, f"invalid cost: {parts[3]!r}") from None
            if cost < 0:
                raise ParseError(line_no, "negative cost")
            edges.append((u, v, cost))
        elif kw == "req":
            _want(parts, 4, line_no)
            u = _int_field(parts[1], line_no, "vertex id")
            v = _int_field(parts[2], line_no, "vertex id")
            r = _int_field(parts[3], line_no, "requirement")
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(line_no, "vertex id out of range")
            if u == v:
                raise ParseError(line_no, "requirement needs two distinct vertices")
            if r < 1:
                raise ParseError(line_no, "requirement must be >= 1")
            key = (min(u, v), max(u, v))
            if key in req and req[key] != r:
                raise ParseError(line_no, f"conflicting requirement for pair {key}")
            req[key] = r
        elif kw == "bound":
            _want(parts, 3, line_no)
            v = _int_field(parts[1], line_no, "vertex id")
            b = _int_field(parts[2], line_no, "bound")
            if not 0 <= v < n:
                raise ParseError(line_no, "vertex id out of range")
            if b < 0:
                raise ParseError(line_no, "bound must be >= 0")
            if v in bounds and bounds[v] != b:
                raise ParseError(line_no, f"conflicting bound for vertex {v}")
            bounds[v] = b
        elif kw == "lower":
            _want(parts, 3, line_no)
            v = _int_field(parts[1], line_no, "vertex id")
            l = _int_field(parts[2], line_no, "lower bound")
            if not 0 <= v < n:
                raise ParseError(line_no, "vertex id out of range")
            if l < 1:
                raise ParseError(line_no, "lower bound must be >= 1")
            if v in lower and lower[v] != l:
                raise ParseError(line_no, f"conflicting lower bound for vertex {v}")
            lower[v] = l
        else:
            raise ParseError(line_no, f"unknown directive {kw!r}")
    if n is None:
        raise ParseError(1, "missing 'vertices' directive")
    return Instance.create(n, edges, req, bounds, lower)


def serialize_instance(inst: Instance) -> str:
    """Canonical text form; parse(serialize(x)) == x."""
    lines = [f"vertices {inst.n}"]
    for e in inst.edges:
        lines.append(f"edge {e.u} {e.v} {rat_str(e.cost)}")
    for (u, v) in sorted(inst.req):
        lines.append(f"req {u} {v} {inst.req[(u, v)]}")
    for v in sorted(inst.bounds):
        lines.append(f"bound {v} {inst.bounds[v]}")
    for v in sorted(inst.lower):
        lines.append(f"lower {v} {inst.lower[v]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Fixtures and random generation
# ---------------------------------------------------------------------------

FIXTURE_NAMES = ("k4", "petersen", "path", "cycle")


def _petersen_edges() -> list[tuple[int, int]]:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    star = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return sorted(tuple(sorted(e)) for e in outer + spokes + star)


def gen_fixture(
    name: str,
    n: int | None = None,
    rho: int | None = None,
    bound: int | None = None,
) -> Instance:
    """Build a named fixture graph with unit costs.

    ``rho`` installs that requirement on every vertex pair; ``bound`` puts
    that degree bound on every vertex.  ``n`` is required for path/cycle.
    """
    if name == "k4":
        nv = 4
        pairs = list(itertools.combinations(range(4), 2))
    elif name == "petersen":
        nv = 10
        pairs = _petersen_edges()
    elif name == "path":
        if n is None or n < 2:
            raise InstanceError("path fixture needs n >= 2")
        nv = n
        pairs = [(i, i + 1) for i in range(n - 1)]
    elif name == "cycle":
        if n is None or n < 3:
            raise InstanceError("cycle fixture needs n >= 3")
        nv = n
        pairs = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    else:
        raise InstanceError(f"unknown fixture name {name!r}")
    req = {}
    if rho:
        req = {(u, v): rho for u, v in itertools.combinations(range(nv), 2)}
    bounds = {v: bound for v in range(nv)} if bound is not None else {}
    return Instance.create(nv, [(u, v, 1) for u, v in pairs], req, bounds)


def gen_random(
    n: int,
    m: int,
    max_rho: int = 2,
    bound_fraction: float = 0.5,
    seed: int = 0,
    retries: int = 200,
) -> Instance:
    """Draw a random instance whose cut LP is feasible.

    Deterministic for a fixed seed.  Candidate instances are drawn and
    rejected until the LP relaxation is feasible; gives up with a
    GenerationError after ``retries`` attempts.
    """
    if n < 2 or m < 1:
        raise InstanceError("need n >= 2 and m >= 1")
    from .cuts import lp_feasible  # deferred: cuts depends on this module

    rng = random.Random(seed)
    all_pairs = list(itertools.combinations(range(n), 2))
    for _ in range(retries):
        edges = []
        for _ in range(m):
            u, v = rng.sample(range(n), 2)
            edges.append((min(u, v), max(u, v), rng.randint(1, 5)))
        k = rng.randint(1, max(1, n // 2))
        req = {}
        for u, v in rng.sample(all_pairs, min(k, len(all_pairs))):
            req[(u, v)] = rng.randint(1, max_rho)
        bounds = {}
        for v in range(n):
            if rng.random() < bound_fraction:
                bounds[v] = rng.randint(1, 3)
        lower = {}
        if rng.random() < 0.2:
            v = rng.randrange(n)
            lower[v] = rng.randint(1, 2)
        inst = Instance.create(n, edges, req, bounds, lower)
        if lp_feasible(inst):
            return inst
    raise GenerationError(
        f"no LP-feasible instance after {retries} attempts (n={n}, m={m}, seed={seed})"
    )
