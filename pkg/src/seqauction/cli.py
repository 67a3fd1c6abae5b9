"""Command-line entry point: ``seqauction {solve,trace,table,sweep,verify}``.

Every rational crosses the command line as an ``"p/q"`` (or integer)
string; decimals are rejected.  Output goes to stdout unless ``--out`` is
given.  All commands are deterministic for fixed arguments.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .canonical import OutcomeTrace, canonical_trace
from .clinching import ClinchingTrace, clinching_trace, fraction_curve
from .core import parse_rat, render_rat
from .instances import random_instances
from .phases import ENGINES, phase_table
from .verify import check_consistency, compare_canonical_vs_grid, grid_backward_induction
from .verify.deviation import one_shot_deviation_check
from .verify.suites import first_failure, phi_suite, tie_suite

FORMATS = ("pretty", "json", "csv")
SWEEP_HEADER = ("p", "item_fraction_clinching", "item_fraction_sequential", "approx_formula")
VERIFY_MODES = ("deviations", "grid", "phi", "ties")


class CliError(Exception):
    """User-facing failure; the message is printed and the exit code is 2."""


def _rat(text: str) -> Fraction:
    try:
        return parse_rat(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _budgets(args) -> tuple[Fraction, Fraction]:
    if args.b1 is None or args.b2 is None:
        raise CliError("--b1 and --b2 are required")
    if args.b1 <= 0 or args.b2 <= 0:
        raise CliError("budgets must be positive")
    return args.b1, args.b2


def _require_items(args) -> int:
    if args.items is None or args.items < 1:
        raise CliError("--items must be an integer >= 1")
    return args.items


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _csv(rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# solve / trace


def _clinching_json(b1: Fraction, b2: Fraction, k: int, tr: ClinchingTrace) -> dict:
    return {
        "engine": "clinching",
        "items": k,
        "b1": render_rat(b1),
        "b2": render_rat(b2),
        "rounds": [
            {"round": i, "winner": w, "price": render_rat(p)}
            for i, (w, p) in enumerate(tr.rounds, start=1)
        ],
        "items_won": list(tr.items_won),
        "final_budgets": [render_rat(b) for b in tr.final_budgets],
    }


def _budget_path(b1: Fraction, b2: Fraction, rounds) -> list[tuple[Fraction, Fraction]]:
    path = []
    left = [b1, b2]
    for winner, price in rounds:
        left[winner - 1] -= price
        path.append((left[0], left[1]))
    return path


def _case_text(case) -> str:
    parts = []
    for f in dataclasses.fields(case):
        v = getattr(case, f.name)
        parts.append(f"{f.name}={render_rat(v) if isinstance(v, Fraction) else v}")
    return f"{case.tag} ({', '.join(parts)})"


def _pretty_sequential(tr: OutcomeTrace, detailed: bool) -> str:
    lines = [
        f"items: {tr.items}  budgets: B1 = {render_rat(tr.b1)}, B2 = {render_rat(tr.b2)}",
        f"case: {_case_text(tr.case)}",
    ]
    path = _budget_path(tr.b1, tr.b2, [(r.winner, r.price) for r in tr.rounds])
    for rnd, (x, y) in zip(tr.rounds, path):
        line = f"round {rnd.round_index}: {rnd.winner} @ {render_rat(rnd.price)}"
        if detailed:
            bids = ", ".join(str(b) for b in rnd.bids)
            line += f"  bids ({bids})  budgets after ({render_rat(x)}, {render_rat(y)})"
        lines.append(line)
    if tr.tie is not None:
        lines.append(
            f"tie from round {tr.tie.start_round}: {tr.tie.case.tag} at p* = "
            f"{render_rat(tr.tie.p_star)}"
        )
        if detailed:
            lines.append(f"  until: {tr.tie.stopping_rule}")
            lines.append(f"  then: {tr.tie.residual}")
    for agent, u in ((1, tr.expected_utility_1), (2, tr.expected_utility_2)):
        lines.append(
            f"utility {agent}: items {render_rat(u.items)}, money {render_rat(u.money)}"
        )
    if tr.final_budgets is not None:
        fb = ", ".join(render_rat(b) for b in tr.final_budgets)
        lines.append(f"final budgets: {fb}")
    else:
        lines.append("final budgets: random (coin-flip tie)")
    return "\n".join(lines) + "\n"


def _pretty_clinching(b1, b2, k, tr: ClinchingTrace, detailed: bool) -> str:
    lines = [
        f"items: {k}  budgets: B1 = {render_rat(b1)}, B2 = {render_rat(b2)}",
        "engine: clinching",
    ]
    path = _budget_path(b1, b2, tr.rounds)
    for i, ((w, p), (x, y)) in enumerate(zip(tr.rounds, path), start=1):
        line = f"round {i}: {w} @ {render_rat(p)}"
        if detailed:
            line += f"  budgets after ({render_rat(x)}, {render_rat(y)})"
        lines.append(line)
    lines.append(f"items won: {tr.items_won[0]}, {tr.items_won[1]}")
    lines.append("final budgets: " + ", ".join(render_rat(b) for b in tr.final_budgets))
    return "\n".join(lines) + "\n"


def _rounds_csv(b1, b2, rounds) -> str:
    rows = [("round", "winner", "price", "budget_1", "budget_2")]
    for i, ((w, p), (x, y)) in enumerate(zip(rounds, _budget_path(b1, b2, rounds)), start=1):
        rows.append((i, w, render_rat(p), render_rat(x), render_rat(y)))
    return _csv(rows)


def _cmd_solve(args, detailed: bool = False) -> str:
    b1, b2 = _budgets(args)
    k = _require_items(args)
    engine = args.engine or "sequential"
    if engine == "clinching":
        tr = clinching_trace(b1, b2, k)
        if args.format == "json":
            return _dump(_clinching_json(b1, b2, k, tr))
        if args.format == "csv":
            return _rounds_csv(b1, b2, tr.rounds)
        return _pretty_clinching(b1, b2, k, tr, detailed)
    trace = canonical_trace(b1, b2, k)
    if args.format == "json":
        return _dump(trace.to_json())
    if args.format == "csv":
        return _rounds_csv(b1, b2, [(r.winner, r.price) for r in trace.rounds])
    return _pretty_sequential(trace, detailed)


def _cmd_trace(args) -> str:
    return _cmd_solve(args, detailed=True)


# ---------------------------------------------------------------------------
# table / sweep


def _cmd_table(args) -> str:
    k = _require_items(args)
    engine = args.engine or "sequential"
    try:
        rows = phase_table(k, engine)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.format == "json":
        return _dump({"engine": engine, "items": k, "phases": [r.to_json() for r in rows]})
    if args.format == "csv":
        out = [("low", "high", "sample") + tuple(f"round_{i}" for i in range(1, k + 1))]
        for r in rows:
            out.append(
                (render_rat(r.low), render_rat(r.high), render_rat(r.sample))
                + tuple(_cell(r, i) for i in range(k))
            )
        return _csv(out)
    lines = [f"{engine} auction, k = {k}, B1/B2 in (0, 1]"]
    lines.append("boundaries: " + ", ".join(render_rat(r.high) for r in rows[:-1]))
    for r in rows:
        cells = "; ".join(_cell(r, i) for i in range(k))
        lines.append(f"({render_rat(r.low)}, {render_rat(r.high)}): {cells}")
    return "\n".join(lines) + "\n"


def _cell(row, i: int) -> str:
    if i < len(row.winners):
        return f"{row.winners[i]} wins at {row.prices[i]}"
    if row.tie is not None and i == len(row.winners):
        return f"{row.tie} tie at {row.prices[i]}"
    return "-"


def _cmd_sweep(args) -> str:
    k = _require_items(args)
    samples = args.samples if args.samples is not None else 99
    if samples < 2:
        raise CliError("--samples must be >= 2")
    rows = [SWEEP_HEADER]
    for pt in fraction_curve(k, samples):
        rows.append(
            (
                render_rat(pt.p),
                render_rat(pt.item_fraction),
                render_rat(pt.sequential_fraction),
                f"{pt.approx:.12f}",
            )
        )
    return _csv(rows)


# ---------------------------------------------------------------------------
# verify


class VerifyResult:
    def __init__(self, mode: str, passed: bool, report: dict, failure: Optional[str]):
        self.mode = mode
        self.passed = passed
        self.report = report
        self.failure = failure

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return _dump({"mode": self.mode, "passed": self.passed, **self.report})
        lines = [f"verify {self.mode}: {'PASS' if self.passed else 'FAIL'}"]
        for key, value in self.report.items():
            if not isinstance(value, (list, dict)):
                lines.append(f"  {key}: {value}")
        if self.failure:
            lines.append(f"  first failure: {self.failure}")
        return "\n".join(lines) + "\n"


def _verify_deviations(args) -> VerifyResult:
    k = _require_items(args)
    count = args.instances if args.instances is not None else 100
    seed = args.seed if args.seed is not None else 0
    instances = random_instances(k, count, seed)
    reports = [one_shot_deviation_check(b1, b2, k) for b1, b2, _ in instances]
    bad = next((r for r in reports if not r.passed), None)
    failure = None
    if bad is not None:
        fw = bad.to_json()["first_worst"]
        failure = (
            f"({render_rat(bad.instance[0])}, {render_rat(bad.instance[1])}) round "
            f"{fw['round']} agent {fw['agent']} bid {fw['bid']}"
        )
    report = {
        "items": k,
        "instances": count,
        "seed": seed,
        "checks": sum(len(r.checks) for r in reports),
        "reports": [r.to_json() for r in reports],
    }
    return VerifyResult("deviations", bad is None, report, failure)


def _verify_grid(args) -> VerifyResult:
    b1, b2 = _budgets(args)
    k = _require_items(args)
    if args.delta is None or args.delta <= 0:
        raise CliError("--delta must be a positive rational")
    cmp = compare_canonical_vs_grid(b1, b2, k, args.delta)
    problems = check_consistency(grid_backward_induction(b1, b2, k, args.delta))
    passed = cmp.passed and not problems
    failure = None
    if problems:
        failure = problems[0]
    elif not cmp.winner_match:
        failure = f"winners {cmp.grid_winners} vs canonical {cmp.canonical_winners}"
    elif not cmp.passed:
        failure = f"price gap {render_rat(cmp.max_price_gap)} > {render_rat(cmp.tolerance)}"
    report = {
        "b1": render_rat(b1),
        "b2": render_rat(b2),
        "items": k,
        "delta": render_rat(args.delta),
        "winner_match": cmp.winner_match,
        "max_price_gap": None if cmp.max_price_gap is None else render_rat(cmp.max_price_gap),
        "tolerance": render_rat(cmp.tolerance),
        "utility_gap": [render_rat(g) for g in cmp.utility_gap],
        "consistency_problems": len(problems),
        "canonical_winners": cmp.canonical_winners,
        "grid_winners": cmp.grid_winners,
    }
    return VerifyResult("grid", passed, report, failure)


def _suite_result(mode: str, checks, extra: dict) -> VerifyResult:
    bad = first_failure(checks)
    report = {**extra, "checks": len(checks), "failed": sum(not c.passed for c in checks)}
    failure = None if bad is None else f"{bad.name}: {bad.detail}"
    return VerifyResult(mode, bad is None, report, failure)


def _verify_phi(args) -> VerifyResult:
    top = args.max if args.max is not None else 12
    try:
        checks = phi_suite(top)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    return _suite_result("phi", checks, {"max": top})


def _verify_ties(args) -> VerifyResult:
    k = args.items if args.items is not None else 6
    if k < 1:
        raise CliError("--items must be an integer >= 1")
    return _suite_result("ties", tie_suite(k), {"items": k})


_VERIFY: dict[str, Callable] = {
    "deviations": _verify_deviations,
    "grid": _verify_grid,
    "phi": _verify_phi,
    "ties": _verify_ties,
}


# ---------------------------------------------------------------------------
# parser and main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqauction",
        description="Exact equilibrium outcomes of two-bidder sequential auctions.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--b1", type=_rat, help="agent 1's budget, e.g. 3/4")
    common.add_argument("--b2", type=_rat, help="agent 2's budget, e.g. 1")
    common.add_argument("--items", type=int, help="number of items k")
    common.add_argument("--engine", choices=ENGINES, help="auction format")
    common.add_argument("--format", choices=FORMATS, default="pretty")
    common.add_argument("--out", help="write output to this path instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="outcome summary for one instance")
    sub.add_parser("trace", parents=[common], help="round-by-round detail for one instance")
    sub.add_parser("table", parents=[common], help="phase table for k = 2 or 3")
    sweep = sub.add_parser("sweep", parents=[common], help="item-fraction curve as CSV")
    sweep.add_argument("--samples", type=int)
    verify = sub.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("mode", choices=VERIFY_MODES)
    verify.add_argument("--delta", type=_rat)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--instances", type=int)
    verify.add_argument("--include-ties", action="store_true",
                        help="accepted for symmetry; audits need deterministic traces")
    verify.add_argument("--max", type=int, help="largest index for the phi suite")
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror or exc}") from None


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            if args.mode == "deviations" and args.include_ties:
                raise CliError("deviation audits need deterministic traces; drop --include-ties")
            result = _VERIFY[args.mode](args)
            _emit(result.render(args.format), args.out)
            if not result.passed:
                print(f"error: {result.failure}", file=sys.stderr)
                return 1
            return 0
        handler = {
            "solve": _cmd_solve,
            "trace": _cmd_trace,
            "table": _cmd_table,
            "sweep": _cmd_sweep,
        }[args.command]
        _emit(handler(args), args.out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
