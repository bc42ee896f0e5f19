"""Command-line surface: solve, verify, lp, gen, brute, trace.

Exit codes: 0 success, 1 verification failure (including an infeasible LP),
2 usage or parse errors, 3 internal invariant breaches.  All numeric output
is exact rational text; nothing is ever printed as a float.

Solution file format: a ``cost p/q`` header followed by one ``pick <id>``
line per chosen edge in ascending id order.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import rounding, verify
from .instance import (
    FIXTURE_NAMES,
    Instance,
    InstanceError,
    gen_fixture,
    gen_random,
    parse_instance,
    serialize_instance,
)
from .ratlp import Status, dump_lp, solve_restricted
from .rational import Rat, as_rat, parse_rat, rat_str

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

ENUMERATE_CUTS_MAX_N = 12


class SolutionFormatError(ValueError):
    """Malformed solution file."""


def render_solution(cost: Rat, picked) -> str:
    lines = [f"cost {rat_str(cost)}"]
    lines += [f"pick {e}" for e in sorted(picked)]
    return "\n".join(lines) + "\n"


def parse_solution(text: str) -> tuple[Rat, tuple[int, ...]]:
    cost = None
    picked = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "cost":
            if cost is not None or len(parts) != 2:
                raise SolutionFormatError(f"line {line_no}: bad cost line")
            try:
                cost = parse_rat(parts[1])
            except ValueError:
                raise SolutionFormatError(f"line {line_no}: bad cost value") from None
        elif parts[0] == "pick":
            if len(parts) != 2:
                raise SolutionFormatError(f"line {line_no}: bad pick line")
            try:
                picked.append(int(parts[1]))
            except ValueError:
                raise SolutionFormatError(f"line {line_no}: bad edge id") from None
        else:
            raise SolutionFormatError(f"line {line_no}: unknown directive {parts[0]!r}")
    if cost is None:
        raise SolutionFormatError("missing cost line")
    return cost, tuple(picked)


def _load_instance(path: str) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def build_enumerated_lp(inst: Instance):
    """Cut LP with every proper cut materialized (no row generation)."""
    if inst.n > ENUMERATE_CUTS_MAX_N:
        raise InstanceError(
            f"full cut enumeration is limited to n <= {ENUMERATE_CUTS_MAX_N}"
        )
    from itertools import combinations

    from .instance import Cut
    from .cuts import residual_requirement

    state = rounding.initial_state(inst)
    others = [v for v in range(inst.n) if v != 0]
    pool = []
    for size in range(1, len(others) + 1):
        for members in combinations(others, size):
            pool.append(Cut(frozenset(members)))
    problem, var_edges, _ = rounding._build_problem(state, pool)
    return problem, var_edges


def _cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    solution, records = rounding.solve(inst)
    text = render_solution(solution.cost, solution.picked)
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    if args.trace:
        Path(args.trace).write_text(rounding.format_trace(records), encoding="utf-8")
    if args.dump_lp:
        result = rounding.solve_cut_lp(rounding.initial_state(inst))
        with open(args.dump_lp, "w", encoding="utf-8") as fh:
            dump_lp(result.problem, fh)
    report = verify.audit(inst, solution.picked, lp_value=solution.root_lp_value)
    if not report.overall:
        sys.stderr.write(report.render() + "\n")
        return EXIT_VERIFY_FAIL
    sys.stderr.write("audit: pass\n")
    return EXIT_OK


def _cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    declared_cost, picked = parse_solution(
        Path(args.solution).read_text(encoding="utf-8")
    )
    try:
        actual_cost = inst.total_cost(verify._check_picked(inst, picked))
    except verify.AuditInputError as exc:
        raise  # mapped to EXIT_USAGE by main()
    if actual_cost != declared_cost:
        raise SolutionFormatError(
            f"declared cost {rat_str(declared_cost)} does not match "
            f"picked edges ({rat_str(actual_cost)})"
        )
    report = verify.audit(inst, picked)
    sys.stdout.write(report.render() + "\n")
    return EXIT_OK if report.overall else EXIT_VERIFY_FAIL


def _cmd_lp(args) -> int:
    inst = _load_instance(args.instance)
    if args.enumerate_cuts:
        try:
            problem, var_edges = build_enumerated_lp(inst)
        except rounding._EmptyRowInfeasible:
            sys.stdout.write("infeasible\n")
            return EXIT_VERIFY_FAIL
        basic = solve_restricted(problem)
        if basic.status is Status.INFEASIBLE:
            sys.stdout.write("infeasible\n")
            return EXIT_VERIFY_FAIL
        value = basic.objective_value
        support = sum(1 for v in basic.values if v > 0)
        if args.dump_lp:
            with open(args.dump_lp, "w", encoding="utf-8") as fh:
                dump_lp(problem, fh)
    else:
        result = rounding.try_solve_cut_lp(rounding.initial_state(inst))
        if result is None:
            sys.stdout.write("infeasible\n")
            return EXIT_VERIFY_FAIL
        value = result.value
        support = sum(1 for v in result.x.values() if v > 0)
        if args.dump_lp:
            with open(args.dump_lp, "w", encoding="utf-8") as fh:
                dump_lp(result.problem, fh)
    sys.stdout.write(f"value {rat_str(value)}\n")
    sys.stdout.write(f"support {support}\n")
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.name == "random":
        if args.n is None or args.m is None:
            raise InstanceError("gen random needs --n and --m")
        inst = gen_random(
            n=args.n,
            m=args.m,
            max_rho=args.max_rho,
            bound_fraction=args.bound_fraction,
            seed=args.seed,
            retries=args.retries,
        )
    else:
        inst = gen_fixture(args.name, n=args.n, rho=args.rho, bound=args.bound)
    sys.stdout.write(serialize_instance(inst))
    return EXIT_OK


def _cmd_brute(args) -> int:
    inst = _load_instance(args.instance)
    result = verify.brute_force_opt(inst, relax=args.relax)
    if result is None:
        sys.stdout.write("infeasible\n")
        return EXIT_OK
    ids, cost = result
    sys.stdout.write(render_solution(cost, ids))
    return EXIT_OK


def _cmd_trace(args) -> int:
    records = rounding.parse_trace(Path(args.tracefile).read_text(encoding="utf-8"))
    ok = True
    previous = None
    bounds_seen: dict[str, list[str]] = {}
    for rec in records:
        measure = int(rec["active"]) + int(rec["constrained"])
        sys.stdout.write(
            f"iter {rec['iter']}: lp={rec['lp']} support={rec['support']} "
            f"{rec['action']}({rec['witness']}) |E'|={rec['active']} "
            f"|W'|={rec['constrained']}\n"
        )
        if "bprime" in rec:
            for change in rec["bprime"].split(","):
                vertex, _, move = change.partition(":")
                bounds_seen.setdefault(vertex, []).append(move)
        if previous is not None and measure >= previous:
            sys.stdout.write(f"iter {rec['iter']}: |E'|+|W'| did not decrease\n")
            ok = False
        previous = measure
    for vertex in sorted(bounds_seen, key=int):
        sys.stdout.write(f"b' trajectory v{vertex}: {' '.join(bounds_seen[vertex])}\n")
    if not ok:
        sys.stdout.write("progress check FAIL\n")
        return EXIT_VERIFY_FAIL
    sys.stdout.write("progress check pass\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degsnd",
        description="Exact solver for degree-bounded survivable network design.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance and audit the result")
    p.add_argument("instance")
    p.add_argument("-o", "--output", help="also write the solution to this file")
    p.add_argument("--trace", help="write the per-iteration trace to this file")
    p.add_argument("--dump-lp", help="write the root cut LP in LP text form")
    p.add_argument(
        "--seed",
        type=int,
        default=None,
        help="accepted for interface symmetry; solving is deterministic and ignores it",
    )
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="audit a solution file against an instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("lp", help="print the exact LP value and support size")
    p.add_argument("instance")
    p.add_argument(
        "--enumerate-cuts",
        action="store_true",
        help=f"materialize every cut row (n <= {ENUMERATE_CUTS_MAX_N}) instead of row generation",
    )
    p.add_argument("--dump-lp", help="write the solved LP in LP text form")
    p.set_defaults(func=_cmd_lp)

    p = sub.add_parser("gen", help="emit a fixture or random instance")
    p.add_argument("name", choices=FIXTURE_NAMES + ("random",))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--rho", type=int, default=None, help="requirement for all pairs")
    p.add_argument("--bound", type=int, default=None, help="degree bound for all vertices")
    p.add_argument("--max-rho", type=int, default=2)
    p.add_argument("--bound-fraction", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--retries", type=int, default=200)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("brute", help="exhaustive exact optimum (small instances)")
    p.add_argument("instance")
    p.add_argument("--relax", type=int, default=0, help="additive degree slack")
    p.set_defaults(func=_cmd_brute)

    p = sub.add_parser("trace", help="render a trace file and check progress")
    p.add_argument("tracefile")
    p.set_defaults(func=_cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except rounding.LpInfeasibleError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_VERIFY_FAIL
    except (
        InstanceError,
        SolutionFormatError,
        verify.AuditInputError,
        verify.BruteForceLimitError,
        FileNotFoundError,
        ValueError,
    ) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (
        rounding.VertexStructureError,
        rounding.ResidualInfeasibleError,
        rounding.InvariantBreach,
        RuntimeError,
    ) as exc:
        sys.stderr.write(f"internal error: {exc}\n")
        if isinstance(exc, rounding.VertexStructureError) and exc.rank_report:
            sys.stderr.write(exc.rank_report.render() + "\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
