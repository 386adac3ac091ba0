"""Command-line front end: ``graphcomply validate|member|check``.

Exit codes: 0 check passed, 1 check failed, 2 input or usage error,
3 undecided (search budget exhausted).
"""

from __future__ import annotations

import argparse
import sys
from enum import IntEnum
from pathlib import Path
from typing import Sequence

from graphcomply import __version__
from graphcomply.compliance import (
    BudgetExceeded,
    ComplianceMode,
    all_witnesses,
    default_budget,
    find_compliance,
)
from graphcomply.graphtext import ParseResult, emit_report, parse_class_graph, parse_object_graph
from graphcomply.membership import MembershipKind, explain, is_member


class ExitStatus(IntEnum):
    PASSED = 0
    FAILED = 1
    USAGE = 2
    UNDECIDED = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 already; keep the message on stderr
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphcomply", description="Check object graphs against class graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("validate", help="parse .og/.cg files and report diagnostics")
    p.add_argument("paths", nargs="*", metavar="FILE")

    p = sub.add_parser("member", help="test one membership relation")
    p.add_argument("graph")
    p.add_argument("schema")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--node")
    target.add_argument("--arc")
    p.add_argument("--class", dest="class_id", required=True)
    p.add_argument("--kind", required=True, choices=["strict", "left", "right", "full", "relational"])

    p = sub.add_parser("check", help="search for a compliance relation")
    p.add_argument("graph")
    p.add_argument("schema")
    p.add_argument("--mode", choices=[m.value for m in ComplianceMode], default="normal")
    p.add_argument("--report", metavar="OUT.json")
    p.add_argument("--budget", type=int, help="node-expansion limit for the search")
    p.add_argument("--all", action="store_true", help="list every minimal witness")
    return parser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from None


def _parse_file(path: str) -> ParseResult:
    suffix = Path(path).suffix
    if suffix == ".og":
        return parse_object_graph(_read(path), path)
    if suffix == ".cg":
        return parse_class_graph(_read(path), path)
    raise _UsageError(f"{path}: unknown file type (expected .og or .cg)")


def _print_diagnostics(result: ParseResult) -> None:
    for d in result.diagnostics:
        print(d, file=sys.stderr)


def _load_pair(graph_path: str, schema_path: str):
    if Path(graph_path).suffix != ".og" or Path(schema_path).suffix != ".cg":
        raise _UsageError("expected an .og graph followed by a .cg schema")
    g, s = _parse_file(graph_path), _parse_file(schema_path)
    failed = False
    for result in (g, s):
        if not result.ok:
            _print_diagnostics(result)
            failed = True
    if failed:
        raise _UsageError("input files contain errors")
    return g.value, s.value


def cmd_validate(args) -> ExitStatus:
    if not args.paths:
        raise _UsageError("validate needs at least one file")
    status = ExitStatus.PASSED
    for path in args.paths:
        result = _parse_file(path)
        _print_diagnostics(result)
        if result.ok:
            print(f"{path}: ok")
        else:
            status = ExitStatus.FAILED
    return status


_KINDS = {
    ("node", "strict"): MembershipKind.NODE_STRICT,
    ("node", "relational"): MembershipKind.NODE_RELATIONAL,
    ("arc", "strict"): MembershipKind.ARC_STRICT,
    ("arc", "left"): MembershipKind.ARC_LEFT,
    ("arc", "right"): MembershipKind.ARC_RIGHT,
    ("arc", "full"): MembershipKind.ARC_FULL,
}


def cmd_member(args) -> ExitStatus:
    what = "node" if args.node is not None else "arc"
    kind = _KINDS.get((what, args.kind))
    if kind is None:
        raise _UsageError(f"--kind {args.kind} does not apply to --{what}")
    g, s = _load_pair(args.graph, args.schema)
    if what == "node":
        if not g.has_node(args.node):
            raise _UsageError(f"unknown node {args.node!r}")
        if not s.has_class(args.class_id):
            raise _UsageError(f"unknown class {args.class_id!r}")
        entity, cls = g.node(args.node), s.class_(args.class_id)
    else:
        if not g.has_arc(args.arc):
            raise _UsageError(f"unknown arc {args.arc!r}")
        if not s.has_arc(args.class_id):
            raise _UsageError(f"unknown class arc {args.class_id!r}")
        entity, cls = g.arc(args.arc), s.arc(args.class_id)
    if is_member(kind, entity, cls, g, s):
        print("true")
        return ExitStatus.PASSED
    print("false")
    print(f"reason: {explain(kind, entity, cls, g, s)}")
    return ExitStatus.FAILED


def cmd_check(args) -> ExitStatus:
    g, s = _load_pair(args.graph, args.schema)
    mode = ComplianceMode(args.mode)
    if args.budget is not None and args.budget <= 0:
        raise _UsageError("--budget must be positive")
    try:
        budget = args.budget if args.budget is not None else default_budget()
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    report = find_compliance(g, s, mode, budget)
    if args.report:
        try:
            Path(args.report).write_text(emit_report(report), encoding="utf-8")
        except OSError as exc:
            raise _UsageError(f"cannot write {args.report}: {exc}") from None

    if report.undecided:
        print(f"undecided ({mode.value}): search budget of {budget} expansions exhausted")
        return ExitStatus.UNDECIDED
    if report.compliant:
        print(f"compliant ({mode.value})")
        if args.all:
            try:
                witnesses = all_witnesses(g, s, mode, budget)
            except BudgetExceeded:
                print(f"undecided: budget exhausted while listing witnesses")
                return ExitStatus.UNDECIDED
            for i, w in enumerate(witnesses, 1):
                print(f"witness {i}:")
                for pair in w:
                    print(f"  {pair}")
        else:
            print("witness:")
            for pair in report.witness:
                print(f"  {pair}")
        if mode is ComplianceMode.PARTIAL:
            for c in report.uncovered_classes:
                print(f"uncovered class: {c}")
        return ExitStatus.PASSED

    print(f"not compliant ({mode.value})")
    for c in report.uncovered_classes:
        print(f"uncovered class: {c}")
    for n in report.uncovered_nodes:
        print(f"uncovered node: {n}")
    for conflict in report.conflicts:
        print(f"conflict: {conflict}")
    return ExitStatus.FAILED


_COMMANDS = {"validate": cmd_validate, "member": cmd_member, "check": cmd_check}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            raise _UsageError("missing command")
        return int(_COMMANDS[args.command](args))
    except _UsageError as exc:
        print(f"graphcomply: error: {exc}", file=sys.stderr)
        return int(ExitStatus.USAGE)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
