"""Command-line front end.

Exit codes: 0 completed, 1 usage error, 2 budget exhausted or verdict unknown.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import bounds as bd
from .construct import (ConstructionError, ConstructionIParams, bu_spread, construction_I,
                        construction_II, refine_smallest)
from .derive import FeasibilityChecker, Reason, classify
from .gfq import prime_power
from .hyperplane import PackingViolated, build_polytope
from .intfeas import Status, default_max_nodes, farkas_holds, lp_feasible, solve_system, system_to_lp
from .partition import (ExplicitPartition, PartitionType, TooLargeToVerify, necessary_conditions,
                        verify_partition)

EXIT_OK, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _prime_power(text: str) -> int:
    try:
        q = int(text)
        prime_power(q)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a prime power") from None
    return q


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = 0
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _refine_spec(text: str) -> tuple[int | None, int]:
    """"d'" or "d:d'"."""
    try:
        if ":" in text:
            d, d2 = text.split(":")
            return int(d), int(d2)
        return None, int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --refine value {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vspart", description="Vector space partition toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def type_args(sp):
        sp.add_argument("--n", type=_positive, required=True, help="ambient dimension")
        sp.add_argument("--q", type=_prime_power, required=True, help="field size")
        sp.add_argument("--type", required=True, dest="type_",
                        help="counts m_k,...,m_1, highest dimension first")

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    def search(sp):
        sp.add_argument("--max-nodes", type=_positive, default=None,
                        help="branch-and-bound node budget (default $VSPART_MAX_NODES or 10^6)")
        sp.add_argument("--lemma-depth", type=_positive, default=2,
                        help="highest order of incidence relations in the polytope")

    sp = sub.add_parser("check", help="necessary conditions and recursive feasibility")
    type_args(sp), common(sp), search(sp)
    sp.add_argument("--max-depth", type=int, default=None, help="recursion cutoff")
    sp.add_argument("--no-bounds", action="store_true", help="skip the closed-form bounds")
    sp.add_argument("--splits", action="store_true", help="also use splitting derivations")

    sp = sub.add_parser("bounds", help="closed-form bounds on a for V(2t, q)")
    type_args(sp), common(sp)

    sp = sub.add_parser("polytope", help="print the hyperplane-count constraint system")
    type_args(sp), common(sp), search(sp)
    sp.add_argument("--solve", action="store_true", help="also search for an integer point")

    sp = sub.add_parser("construct", help="emit an explicit partition as JSON")
    csub = sp.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    c = csub.add_parser("bu", help="the spread {beta GF(q^t)}")
    c.add_argument("--k", type=_positive, required=True)
    c.add_argument("--t", type=_positive, required=True)
    c.add_argument("--q", type=_prime_power, required=True)
    c = csub.add_parser("c1", help="spread with parallel classes switched")
    c.add_argument("--k", type=_positive, required=True)
    c.add_argument("--t", type=_positive, required=True)
    c.add_argument("--q", type=_prime_power, required=True)
    c.add_argument("--l", type=_positive, required=True)
    c.add_argument("--dimw", type=int, required=True)
    c = csub.add_parser("c2", help="the V(8,q) partition with 2q^2 planes")
    c.add_argument("--q", type=_prime_power, required=True)
    for c in csub.choices.values():
        c.add_argument("--refine", type=_refine_spec, action="append", default=[],
                       metavar="[D:]D'", help="split a member down to dimension D' (repeatable)")
        c.add_argument("--json", action="store_true", help="accepted for symmetry; output is JSON")

    sp = sub.add_parser("verify", help="exhaustively verify a partition JSON file ('-' for stdin)")
    sp.add_argument("file")
    common(sp)

    sp = sub.add_parser("classify", help="feasibility of every type of V(n, q)")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--q", type=_prime_power, required=True)
    sp.add_argument("--max-depth", type=int, default=None)
    sp.add_argument("--no-bounds", action="store_true")
    common(sp), search(sp)
    return p


def _type(args) -> PartitionType:
    try:
        return PartitionType.parse(args.n, args.q, args.type_)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(out, obj):
    out.write(json.dumps(obj, ensure_ascii=False) + "\n")


def cmd_check(args, out) -> int:
    T = _type(args)
    checker = FeasibilityChecker(use_bounds=not args.no_bounds, lemma_depth=args.lemma_depth,
                                 max_nodes=args.max_nodes, max_depth=args.max_depth,
                                 use_splits=args.splits)
    reports = necessary_conditions(T)
    v = checker(T)
    if args.json:
        _emit(out, {"type": list(T.descending()), "n": T.n, "q": T.q,
                    "conditions": [r.to_json() for r in reports], "feasibility": v.to_json()})
    else:
        out.write(f"type {T} of V({T.n},{T.q})\n")
        for r in reports:
            out.write(f"  {r}\n")
        if v.feasible and v.reason is not Reason.BASE_CASE:
            out.write("  (feasible means not excluded; it does not prove existence)\n")
        out.write(v.summary() + "\n")
    return EXIT_UNKNOWN if v.status is Status.UNKNOWN else EXIT_OK


def cmd_bounds(args, out) -> int:
    T = _type(args)
    reports = bd.all_bounds(T)
    if args.json:
        _emit(out, {"type": list(T.descending()), "n": T.n, "q": T.q,
                    "bounds": [r.to_json() for r in reports]})
        return EXIT_OK
    if not reports:
        out.write(f"no bound applies to {T} in V({T.n},{T.q})\n")
    for r in reports:
        out.write(f"{r}\n")
    return EXIT_OK


def cmd_polytope(args, out) -> int:
    T = _type(args)
    try:
        S = build_polytope(T, args.lemma_depth)
    except PackingViolated as exc:
        raise UsageError(str(exc)) from None
    result = solve_system(S, args.max_nodes) if args.solve else None
    if args.json:
        obj = S.to_json()
        if result is not None:
            obj["solve"] = {"status": result.status.value, "nodes": result.nodes,
                            "witness": result.witness}
            if result.status is Status.INFEASIBLE:
                L = system_to_lp(S)
                lp = lp_feasible(L)
                if not lp.feasible and farkas_holds(L, lp.certificate):
                    obj["solve"]["farkas"] = [str(y) for y in lp.certificate]
        _emit(out, obj)
    else:
        out.write(f"polytope of {T} in V({T.n},{T.q}): {len(S.variables)} variables, "
                  f"{len(S.rows)} rows\n")
        for i, b in enumerate(S.variables):
            out.write(f"  x{i} = s_{tuple(reversed(b))}\n")
        for r in S.rows:
            terms = " + ".join(f"{c}*x{i}" for i, c in enumerate(r.coeffs) if c) or "0"
            out.write(f"  [{r.label}] {terms} {r.relation} {r.rhs}\n")
        if result is not None:
            out.write(f"integer point: {result.status.value} after {result.nodes} nodes\n")
            if result.witness is not None:
                out.write(f"  {result.witness}\n")
    if result is not None and result.status is Status.UNKNOWN:
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_construct(args, out) -> int:
    try:
        if args.kind == "bu":
            P = bu_spread(args.k, args.t, args.q)
        elif args.kind == "c1":
            P = construction_I(ConstructionIParams(args.k, args.t, args.q, args.l, args.dimw))
        else:
            P = construction_II(args.q).partition
        for dim, d2 in args.refine:
            P = refine_smallest(P, d2, dim)
    except (ConstructionError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    _emit(out, P.to_json())
    return EXIT_OK


def cmd_verify(args, out) -> int:
    try:
        if args.file == "-":
            obj = json.load(sys.stdin)
        else:
            with open(args.file, encoding="utf-8") as fh:
                obj = json.load(fh)
        P = ExplicitPartition.from_json(obj)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read partition: {exc}") from None
    try:
        ok, T = verify_partition(P)
    except TooLargeToVerify as exc:
        out.write(f"UNKNOWN ({exc})\n")
        return EXIT_UNKNOWN
    if args.json:
        _emit(out, {"ok": ok, "type": list(T.descending()), "n": T.n, "q": T.q})
    else:
        out.write(f"OK, type {T}\n" if ok else f"NOT A PARTITION (member type {T})\n")
    return EXIT_OK if ok else EXIT_UNKNOWN


def cmd_classify(args, out) -> int:
    checker = FeasibilityChecker(use_bounds=not args.no_bounds, lemma_depth=args.lemma_depth,
                                 max_nodes=args.max_nodes, max_depth=args.max_depth)
    unknown = False
    for row in classify(args.n, args.q, checker):
        v = row.verdict
        unknown |= v.status is Status.UNKNOWN
        if args.json:
            _emit(out, row.to_json())
        else:
            exp = {None: "-", True: "realizable", False: "not realizable"}[row.expected]
            flag = "" if row.agrees is not False else "  MISMATCH"
            out.write(f"{str(v.type):<24} {v.summary():<60} depth {v.depth}  known: {exp}{flag}\n")
        out.flush()
    return EXIT_UNKNOWN if unknown else EXIT_OK


COMMANDS = {"check": cmd_check, "bounds": cmd_bounds, "polytope": cmd_polytope,
            "construct": cmd_construct, "verify": cmd_verify, "classify": cmd_classify}


def run(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        if hasattr(args, "max_nodes") and args.max_nodes is None:
            try:
                args.max_nodes = default_max_nodes()
            except ValueError:
                raise UsageError("VSPART_MAX_NODES must be an integer") from None
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
