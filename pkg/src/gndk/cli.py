"""Batch command line for the grounding kernel.

Exit status: 0 on success, 1 on domain errors (with a machine-readable
``ERROR <code>: <message>`` line on stdout), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import analysis, operators, rewrite
from .calculus import CalculusSpec, load_calculus_file, packaged_calculus
from .derivation import check, parse_derivation, print_derivation
from .errors import BudgetExhausted, KernelError, UnsupportedFormula
from .syntax import Immediate, parse_formula, print_formula


class CheckFailed(KernelError):
    pass


def _resolve_calculus(path: str) -> CalculusSpec:
    if os.path.exists(path):
        return load_calculus_file(path)
    try:
        return packaged_calculus(path)
    except FileNotFoundError:
        raise KernelError(f"no calculus file or packaged calculus named {path!r}") from None


def _load_proof(path: str, spec: CalculusSpec):
    with open(path, encoding="utf-8") as fh:
        return parse_derivation(fh.read(), spec)


def _checked(d, spec, out, json_mode: bool):
    report = check(d, spec)
    if not report.ok:
        if json_mode:
            print(json.dumps(_report_json(report), sort_keys=True), file=out)
        else:
            for path, kind, msg in report.failures:
                print(f"FAIL {_path_str(path)} {kind}: {msg}", file=out)
        raise CheckFailed(f"derivation has {len(report.failures)} invalid nodes")
    return report


def _report_json(report):
    return {
        "ok": report.ok,
        "failures": [
            {"path": _path_str(p), "rule": k, "message": m} for p, k, m in report.failures
        ],
        "warnings": list(report.warnings),
    }


def _path_str(path: tuple[int, ...]) -> str:
    return "/" + "/".join(str(i) for i in path)


def _triple_str(t) -> str:
    return f"({t.m},{t.n},{t.u})"


def _print_trace(trace, initial, out) -> None:
    before = initial
    for i, (redex, after) in enumerate(trace):
        print(
            f"{i}\t{redex.kind}\t{_path_str(redex.location)}\t"
            f"{_triple_str(before)}\t{_triple_str(after)}",
            file=out,
        )
        before = after


def _cmd_check(args, out) -> int:
    spec = _resolve_calculus(args.calculus)
    results = []
    ok_all = True
    for path in args.proof:
        d = _load_proof(path, spec)
        report = check(d, spec)
        results.append((path, report))
        ok_all = ok_all and report.ok
    if args.json:
        payload = [{"file": p, **_report_json(r)} for p, r in results]
        print(json.dumps(payload if len(payload) > 1 else payload[0], sort_keys=True), file=out)
    else:
        for path, report in results:
            prefix = f"{path}: " if len(results) > 1 else ""
            if report.ok:
                print(f"{prefix}OK", file=out)
            else:
                for npath, kind, msg in report.failures:
                    print(f"{prefix}FAIL {_path_str(npath)} {kind}: {msg}", file=out)
            for w in report.warnings:
                print(f"{prefix}WARNING: {w}", file=out)
    if not ok_all:
        bad = sum(1 for _, r in results if not r.ok)
        raise CheckFailed(f"{bad} of {len(results)} proofs failed")
    return 0


def _cmd_normalize(args, out) -> int:
    spec = _resolve_calculus(args.calculus)
    d = _load_proof(args.proof, spec)
    _checked(d, spec, out, args.json)
    initial = rewrite.strategy_complexity(d, args.with_mediate)
    result, trace = rewrite.normalize(d, args.with_mediate, args.budget)
    if args.trace:
        _print_trace(trace, initial, out)
    if args.json:
        print(
            json.dumps(
                {
                    "steps": len(trace),
                    "normal": rewrite.is_normal(result),
                    "proof": print_derivation(result),
                },
                sort_keys=True,
            ),
            file=out,
        )
    else:
        print(print_derivation(result), end="", file=out)
    return 0


def _cmd_reduce(args, out) -> int:
    spec = _resolve_calculus(args.calculus)
    d = _load_proof(args.proof, spec)
    _checked(d, spec, out, args.json)
    initial = rewrite.strategy_complexity(d, args.with_mediate)
    result, trace = rewrite.normalize(d, args.with_mediate, step_budget=1)
    if args.trace:
        _print_trace(trace, initial, out)
    print(print_derivation(result), end="", file=out)
    return 0


def _cmd_bars(args, out) -> int:
    spec = _resolve_calculus(args.calculus)
    d = _load_proof(args.proof, spec)
    _checked(d, spec, out, args.json)
    found = analysis.bars(d)
    if args.json:
        payload = [
            {
                "grounds": sorted(print_formula(f) for f in b.grounds()),
                "conditions": sorted(print_formula(f) for f in b.conditions()),
                "crosses_condition": b.crosses_condition(),
            }
            for b in found
        ]
        print(json.dumps(payload, sort_keys=True), file=out)
    else:
        for b in found:
            entries = sorted(
                (print_formula(o.formula), o.is_condition) for o in b.occurrences
            )
            print(", ".join(f"[{s}]" if cond else s for s, cond in entries), file=out)
    return 0


def _cmd_to_tree(args, out) -> int:
    spec = _resolve_calculus(args.calculus)
    d = _load_proof(args.proof, spec)
    _checked(d, spec, out, args.json)
    claim = analysis.derivation_to_tree(d)
    print(print_formula(claim), file=out)
    return 0


def _cmd_from_tree(args, out) -> int:
    spec = _resolve_calculus(args.calculus)
    claim = parse_formula(args.formula)
    d = analysis.tree_to_derivation(claim, spec)
    print(print_derivation(d), end="", file=out)
    return 0


def _cmd_wdoi(args, out) -> int:
    spec = _resolve_calculus(args.calculus)
    claim = parse_formula(args.formula)
    if not isinstance(claim, Immediate):
        raise UnsupportedFormula(
            "identity witnesses exist for immediate grounding claims only"
        )
    if claim.has_tree_entry():
        witness = operators.wdoi_tree(claim, args.entry)
    else:
        witness = operators.wdoi_immediate(claim, spec)
    if args.json:
        print(
            json.dumps(
                {"elim_count": witness.elim_count, "proof": print_derivation(witness.derivation)},
                sort_keys=True,
            ),
            file=out,
        )
    else:
        print(print_derivation(witness.derivation), end="", file=out)
    return 0


def _cmd_decompose(args, out) -> int:
    spec = _resolve_calculus(args.calculus)
    claim = parse_formula(args.formula)
    parts = operators.decompose_tree(claim)
    if args.json:
        payload = [
            {"claim": print_formula(c), "proof": print_derivation(d)} for c, d in parts
        ]
        print(json.dumps(payload, sort_keys=True), file=out)
    else:
        for c, _ in parts:
            print(print_formula(c), file=out)
    return 0


def _cmd_recompose(args, out) -> int:
    spec = _resolve_calculus(args.calculus)
    target = parse_formula(args.target)
    parts = [parse_formula(p) for p in args.part]
    d = operators.recompose_tree(parts, target)
    print(print_derivation(d), end="", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gndk", description="proof kernel for grounding calculi"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument(
            "--calculus",
            required=True,
            metavar="PATH",
            help="calculus file (or the name of a packaged calculus, e.g. gc-core)",
        )
        p.add_argument("--json", action="store_true", help="structured output")

    p = sub.add_parser("check", help="validate proof files")
    p.add_argument("proof", nargs="+")
    common(p)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("normalize", help="reduce a proof to normal form")
    p.add_argument("proof")
    common(p)
    p.add_argument("--trace", action="store_true", help="one line per reduction step")
    p.add_argument("--with-mediate", action="store_true", help="also reduce >> detours")
    p.add_argument("--budget", type=int, default=10000, metavar="N")
    p.set_defaults(fn=_cmd_normalize)

    p = sub.add_parser("reduce", help="apply a single reduction step")
    p.add_argument("proof")
    common(p)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--with-mediate", action="store_true")
    p.set_defaults(fn=_cmd_reduce)

    p = sub.add_parser("bars", help="enumerate the bars of a grounding derivation")
    p.add_argument("proof")
    common(p)
    p.set_defaults(fn=_cmd_bars)

    p = sub.add_parser("to-tree", help="the tree claim a grounding derivation encodes")
    p.add_argument("proof")
    common(p)
    p.set_defaults(fn=_cmd_to_tree)

    p = sub.add_parser("from-tree", help="rebuild the grounding derivation of a tree claim")
    p.add_argument("formula")
    common(p)
    p.set_defaults(fn=_cmd_from_tree)

    p = sub.add_parser("wdoi", help="identity witness for a claim")
    p.add_argument("formula")
    common(p)
    p.add_argument("--entry", type=int, default=None, help="tree entry to rebuild through")
    p.set_defaults(fn=_cmd_wdoi)

    p = sub.add_parser("decompose", help="one-step claims encoded by a tree claim")
    p.add_argument("formula")
    common(p)
    p.set_defaults(fn=_cmd_decompose)

    p = sub.add_parser("recompose", help="rebuild a tree claim from its parts")
    p.add_argument("target")
    p.add_argument("part", nargs="*")
    common(p)
    p.set_defaults(fn=_cmd_recompose)

    return parser


def run(argv: list[str], out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return args.fn(args, out)
    except BudgetExhausted as e:
        print(f"ERROR {e.code}: {e}", file=out)
        return 1
    except KernelError as e:
        print(f"ERROR {e.code}: {e}", file=out)
        return 1
    except FileNotFoundError as e:
        print(f"ERROR FileNotFound: {e}", file=out)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))
