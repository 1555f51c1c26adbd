"""Command-line front end.

Subcommands: enumerate (stream systems/covers/operators), verify (run the
count-verification table), export (DOT diagrams), fusion-count (the
four-term breakdown), rank-two (closed form plus block census).

Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 size
guard breached.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import serialize
from .characteristic import enumerate_interior_operators, fiber_decomposition
from .counting import bmt_decompose, count_tr_fusion, tr_rank_two
from .covers import enumerate_saturated_covers, find_cover_violation
from .errors import InvariantViolation, SizeLimit, TrsysError
from .lattice import (
    boolean_cube,
    chain,
    iterated_fusion,
    lattice_to_dot,
    load_lattice,
    product,
    sub_cp_cp,
)
from .transfer import (
    enumerate_saturated_systems,
    enumerate_transfer_systems,
    find_violation,
)
from .verify import ALL_CHECKS, run_checks

HARD_TR_GUARD = 26


def _add_lattice_args(parser):
    parser.add_argument(
        "--family",
        choices=["chain", "cube", "rect", "fuse2", "subcpcp", "json"],
        required=True,
        help="builtin lattice family, or 'json' to load one",
    )
    parser.add_argument("--n", type=int, default=None, help="size parameter")
    parser.add_argument("--m", type=int, default=None, help="second size parameter (rect)")
    parser.add_argument("--p", type=int, default=None, help="prime parameter (subcpcp)")
    parser.add_argument("--json", dest="json_path", default=None, help="lattice JSON path")
    parser.add_argument("--unsafe-guard", action="store_true", help="lift the size guards")
    parser.add_argument("--jobs", type=int, default=1, help="parallel search branches")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized commands")


def _build_lattice(args, parser):
    fam = args.family
    if fam == "chain":
        _require(parser, args.n is not None, "--family chain needs --n")
        return chain(args.n)
    if fam == "cube":
        _require(parser, args.n is not None, "--family cube needs --n")
        return boolean_cube(args.n)
    if fam == "rect":
        _require(parser, args.m is not None and args.n is not None, "--family rect needs --m and --n")
        return product(chain(args.m), chain(args.n))
    if fam == "fuse2":
        _require(parser, args.n is not None, "--family fuse2 needs --n")
        return iterated_fusion(chain(2), args.n)
    if fam == "subcpcp":
        _require(parser, args.p is not None, "--family subcpcp needs --p")
        return sub_cp_cp(args.p)
    _require(parser, args.json_path is not None, "--family json needs --json PATH")
    return load_lattice(args.json_path)


def _require(parser, condition, message):
    if not condition:
        parser.error(message)


def _guard(args):
    return None if args.unsafe_guard else HARD_TR_GUARD


def cmd_enumerate(args, parser):
    lat = _build_lattice(args, parser)
    if args.report == "fibers":
        return _print_fiber_report(lat, args)
    kind = args.kind
    if kind == "transfer":
        items = list(enumerate_transfer_systems(lat, guard=_guard(args), jobs=args.jobs))
        _revalidate_systems(lat, items)
        rows = [item.pairs() for item in items]
        dots = [serialize.system_to_dot(s, f"transfer-{i:04d}") for i, s in enumerate(items)]
        payload = [serialize.system_to_json(s) for s in items]
    elif kind == "saturated":
        items = enumerate_saturated_systems(lat, guard=None if args.unsafe_guard else 80, jobs=args.jobs)
        _revalidate_systems(lat, items)
        rows = [item.pairs() for item in items]
        dots = [serialize.system_to_dot(s, f"saturated-{i:04d}") for i, s in enumerate(items)]
        payload = [serialize.system_to_json(s) for s in items]
    elif kind == "covers":
        items = enumerate_saturated_covers(lat, guard=None if args.unsafe_guard else 64, jobs=args.jobs)
        for cover in items:
            if find_cover_violation(lat, cover.bits) is not None:
                raise InvariantViolation("enumerated cover failed re-validation")
        rows = [item.edges() for item in items]
        dots = [serialize.cover_to_dot(c, f"cover-{i:04d}") for i, c in enumerate(items)]
        payload = [serialize.cover_to_json(c) for c in items]
    else:  # interior
        items = enumerate_interior_operators(lat, max_elements=lat.n if args.unsafe_guard else 16)
        rows = [list(op.image) for op in items]
        dots = None
        payload = [serialize.operator_to_json(op) for op in items]

    if args.format == "table":
        for row in rows:
            if kind == "interior":
                print(" ".join(map(str, row)))
            else:
                print(" ".join(f"{a}<{b}" for a, b in row) or "(none)")
    elif args.format == "json":
        for entry in payload:
            print(json.dumps(entry, sort_keys=True))
    else:  # dot
        if dots is None:
            parser.error("--format dot is not defined for interior operators")
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            for i, text in enumerate(dots):
                with open(os.path.join(args.out, f"{kind}_{i:04d}.dot"), "w", encoding="utf-8") as fh:
                    fh.write(text)
        else:
            for text in dots:
                print(text)
    print(f"{len(rows)} items", file=sys.stderr)
    return 0


def _revalidate_systems(lat, items):
    for system in items:
        if find_violation(lat, system.bits) is not None:
            raise InvariantViolation("enumerated system failed re-validation")


def _print_fiber_report(lat, args):
    tr = enumerate_transfer_systems(lat, guard=_guard(args), jobs=args.jobs)
    fibers = fiber_decomposition(lat, tr=tr)
    if args.format == "json":
        for fiber in fibers:
            print(json.dumps(serialize.fiber_to_json(fiber), sort_keys=True))
    else:
        print(f"{'operator':<24} {'size':>4}  least / greatest")
        for fiber in fibers:
            op = ",".join(map(str, fiber.operator.image))
            least = " ".join(f"{a}<{b}" for a, b in fiber.least.pairs()) or "(none)"
            greatest = " ".join(f"{a}<{b}" for a, b in fiber.greatest.pairs()) or "(none)"
            print(f"{op:<24} {len(fiber.members):>4}  {least} / {greatest}")
    print(f"{len(fibers)} fibers", file=sys.stderr)
    return 0


def cmd_verify(args, parser):
    names = [args.check] if args.check else None
    if names and names[0] not in ALL_CHECKS:
        parser.error(f"unknown check {names[0]!r}; choose from {sorted(ALL_CHECKS)}")
    results = run_checks(names, max_n=args.max)
    failed = 0
    for result in results:
        print(("PASS" if result.ok else "FAIL") + f" {result.name}")
        for line in result.lines:
            if args.verbose or not result.ok:
                print("  " + line)
        failed += 0 if result.ok else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def cmd_export(args, parser):
    lat = _build_lattice(args, parser)
    os.makedirs(args.out, exist_ok=True)
    written = []
    if args.what == "hasse":
        path = os.path.join(args.out, "hasse.dot")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(lattice_to_dot(lat))
        written.append(path)
    elif args.what == "tr-hasse":
        tr = enumerate_transfer_systems(lat, guard=_guard(args), jobs=args.jobs)
        lines = ['digraph "tr-hasse" {', "  rankdir=BT;", "  node [shape=box];"]
        for i, system in enumerate(tr):
            label = " ".join(f"{a}<{b}" for a, b in system.pairs()) or "discrete"
            lines.append(f'  t{i} [label="{label}"];')
        for i, j in tr.covers:
            lines.append(f"  t{i} -> t{j};")
        lines.append("}")
        path = os.path.join(args.out, "tr_hasse.dot")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        written.append(path)
    elif args.what == "systems":
        tr = enumerate_transfer_systems(lat, guard=_guard(args), jobs=args.jobs)
        for i, system in enumerate(tr):
            path = os.path.join(args.out, f"system_{i:04d}.dot")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(serialize.system_to_dot(system, f"system-{i:04d}"))
            written.append(path)
    else:  # covers
        covers = enumerate_saturated_covers(lat, guard=None if args.unsafe_guard else 64)
        for i, cover in enumerate(covers):
            path = os.path.join(args.out, f"cover_{i:04d}.dot")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(serialize.cover_to_dot(cover, f"cover-{i:04d}"))
            written.append(path)
    for path in written:
        print(path)
    return 0


def cmd_fusion_count(args, parser):
    left = load_lattice(args.left)
    right = load_lattice(args.right)
    breakdown = count_tr_fusion(left, right, guard=None if args.unsafe_guard else HARD_TR_GUARD)
    print(f"top term        {breakdown.top_term}")
    print(f"bottom term     {breakdown.bottom_term}")
    for a, c in breakdown.middle_terms_left:
        print(f"left fibrant {a}  {c}")
    for b, c in breakdown.middle_terms_right:
        print(f"right fibrant {b} {c}")
    print(f"total           {breakdown.total}")
    return 0


def cmd_rank_two(args, parser):
    p = args.p
    count = tr_rank_two(p)
    print(f"transfer systems for C_{p} x C_{p}: {count}")
    n = p + 1
    if 2 * n + 1 <= HARD_TR_GUARD or args.unsafe_guard:
        dec = bmt_decompose(n, guard=None if args.unsafe_guard else HARD_TR_GUARD)
        print(
            f"census: bottom cube {len(dec.bottom_cube)}, middle {len(dec.middle)}, "
            f"top cube {len(dec.top_cube)} (total {len(dec.tr)})"
        )
    else:
        print("census skipped: lattice exceeds the enumeration guard")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="trsys", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_enum = sub.add_parser("enumerate", help="stream transfer systems, covers, or operators")
    _add_lattice_args(p_enum)
    p_enum.add_argument("--kind", choices=["transfer", "saturated", "covers", "interior"], default="transfer")
    p_enum.add_argument("--report", choices=["fibers"], default=None,
                        help="print the chi-fiber table instead of streaming items")
    p_enum.add_argument("--format", choices=["table", "json", "dot"], default="table")
    p_enum.add_argument("--out", default=None, help="output directory for dot format")
    p_enum.set_defaults(func=cmd_enumerate)

    p_verify = sub.add_parser("verify", help="run the count-verification table")
    p_verify.add_argument("--check", default=None, help="run a single named check")
    p_verify.add_argument("--max", type=int, default=None, help="cap the family size where applicable")
    p_verify.add_argument("--verbose", action="store_true", help="print per-line detail")
    p_verify.set_defaults(func=cmd_verify)

    p_export = sub.add_parser("export", help="write DOT diagrams")
    _add_lattice_args(p_export)
    p_export.add_argument("--what", choices=["hasse", "tr-hasse", "systems", "covers"], default="tr-hasse")
    p_export.add_argument("--out", required=True, help="output directory")
    p_export.set_defaults(func=cmd_export)

    p_fusion = sub.add_parser("fusion-count", help="four-term fusion breakdown")
    p_fusion.add_argument("--left", required=True, help="left lattice JSON")
    p_fusion.add_argument("--right", required=True, help="right lattice JSON")
    p_fusion.add_argument("--unsafe-guard", action="store_true")
    p_fusion.set_defaults(func=cmd_fusion_count)

    p_rank = sub.add_parser("rank-two", help="closed form and block census for C_p x C_p")
    p_rank.add_argument("--p", type=int, required=True)
    p_rank.add_argument("--unsafe-guard", action="store_true")
    p_rank.set_defaults(func=cmd_rank_two)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except SizeLimit as exc:
        print(f"guard breached: {exc}", file=sys.stderr)
        return 3
    except TrsysError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
