"""``trustquant`` command-line interface.

Exit codes: 0 success, 1 validation or domain error, 2 I/O or format error.
Every failure writes exactly one line to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence, TextIO

from . import fair_trade as ft
from . import scenarios as sc
from . import score as scoring
from . import timeseries as ts
from .errors import FormatError, TrustQuantError

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # single-line diagnostic instead of usage dump
        raise UsageError(f"{self.prog}: {message}")


def _precision(text: str) -> int | None:
    if text == "full":
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'full', got {text!r}") from None
    if not 0 <= n <= 17:
        raise argparse.ArgumentTypeError(f"precision must be in 0..17, got {n}")
    return n


def _point(text: str) -> tuple[float, float]:
    try:
        n, a = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N,A, got {text!r}") from None
    if not (math.isfinite(n) and math.isfinite(a)):
        raise argparse.ArgumentTypeError(f"point must be finite, got {text!r}")
    return n, a


def _timestamp(text: str) -> datetime:
    try:
        return ts.parse_timestamp(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--out", type=Path, help="write the main output to this file")
    shared.add_argument("--format", choices=("csv", "json"), default=None)
    shared.add_argument(
        "--precision", type=_precision, default=6, metavar="N",
        help="fractional digits in printed numbers, or 'full' (default 6)",
    )

    parser = _Parser(prog="trustquant", description="Trust-game simulation, trust scores and fair-trade analysis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[shared], help="run a scenario file")
    p.add_argument("scenario", help="scenario JSON, or the name of a bundled one (simulation1..4)")

    p = sub.add_parser("score", parents=[shared], help="compute the trust score")
    p.add_argument("metrics", type=Path)
    p.add_argument("--weights", type=Path, help="weights JSON; default: 'weights' in the metrics file")
    p.add_argument("--history", type=Path, help="append the score to this JSONL history")
    p.add_argument("--normalize", action="store_true", help="cap count metrics that declare 'cap'")
    p.add_argument("--timestamp", type=_timestamp, help="RFC 3339 time for the record (default: now)")

    p = sub.add_parser("fairtrade", parents=[shared], help="eigen-analysis of the exchange matrix")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--point", type=_point, metavar="N,A")
    p.add_argument("--tolerance", type=float, default=1e-6)

    p = sub.add_parser("history", parents=[shared], help="fluctuation report for a score history")
    p.add_argument("history", type=Path)
    p.add_argument("--window", type=int, default=ts.DEFAULT_WINDOW)
    p.add_argument("--threshold", type=float, default=ts.DEFAULT_ABRUPT_THRESHOLD)
    return parser


def _emit(text: str, out: Path | None, stdout: TextIO) -> None:
    if out is None:
        stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def cmd_simulate(args, stdout: TextIO) -> int:
    path = Path(args.scenario)
    if not path.exists() and args.scenario in sc.BUILTIN:
        path = sc.builtin_path(args.scenario)
    scenario = sc.load_scenario(path)
    traj = sc.run_scenario(scenario)
    fmt = args.format or "csv"
    body = sc.to_csv(traj, args.precision) if fmt == "csv" else sc.to_json(traj)
    _emit(body, args.out, stdout)

    num = lambda x: sc.format_number(x, args.precision)  # noqa: E731
    regimes = list(dict.fromkeys(sc.regime_of(c.K).value for c in scenario.cycles))
    prefix = "" if args.out is not None else "# "
    stdout.write(f"{prefix}scenario: {scenario.name}\n")
    stdout.write(f"{prefix}cycles: {len(traj)} ({scenario.mode.value})\n")
    stdout.write(f"{prefix}final trustor gain: {num(traj.final.trustor_gain)}\n")
    stdout.write(f"{prefix}final trustee gain: {num(traj.final.trustee_gain)}\n")
    stdout.write(f"{prefix}regime: {', '.join(regimes)}\n")
    return EXIT_OK


def cmd_score(args, stdout: TextIO) -> int:
    metrics, weights = scoring.load_inputs(args.metrics, args.weights)
    report = scoring.validate_metrics(metrics)
    record = scoring.trust_score(
        metrics, weights, normalize=args.normalize,
        timestamp=args.timestamp or datetime.now(timezone.utc),
    )
    breakdown = scoring.category_breakdown(record, metrics)
    notes = list(report.warnings)
    if not math.isclose(weights.total, 1.0, rel_tol=0.0, abs_tol=1e-9):
        notes.append(f"weights sum to {weights.total!r}, not 1")

    if args.history is not None:
        ts.append_history(args.history, record)

    num = lambda x: sc.format_number(x, args.precision)  # noqa: E731
    if args.format == "json":
        body = json.dumps({
            "raw": record.raw_score,
            "clamped": record.clamped_score,
            "categories": {c.value: v for c, v in breakdown.items()},
            "contributions": [{"name": n, "value": v} for n, v in record.contributions],
            "notes": notes,
        }, indent=2) + "\n"
    else:
        lines = [f"raw score: {num(record.raw_score)}", f"clamped score: {num(record.clamped_score)}", "categories:"]
        lines += [f"  {c.value}: {num(v)}" for c, v in breakdown.items()]
        lines += [f"note: {n}" for n in notes]
        body = "\n".join(lines) + "\n"
    _emit(body, args.out, stdout)
    return EXIT_OK


def cmd_fairtrade(args, stdout: TextIO) -> int:
    num = lambda x: sc.format_number(x, args.precision)  # noqa: E731
    m = ft.build_matrix(args.p, args.q, args.K)
    (a, b), (c, d) = m.entries
    lines = [
        f"matrix: [[{num(a)}, {num(b)}], [{num(c)}, {num(d)}]]",
        f"rows linearly independent: {'yes' if ft.rows_linearly_independent(m) else 'no'}",
    ]
    stdout.write("\n".join(lines) + "\n")
    first, second = ft.eigen_decompose(m)
    line = ft.fair_trade_line(m)
    v1, v2 = first.eigenvector
    lines = [
        f"eigenvalues: {num(first.eigenvalue)} {num(second.eigenvalue)}",
        f"dominant eigenvector: ({num(v1)}, {num(v2)})",
        f"line: y = {num(line.slope)} x",
    ]
    if args.point is not None:
        n, a_ = args.point
        verdict = ft.classify_point(line, args.point, args.tolerance)
        lines.append(f"point ({num(n)}, {num(a_)}): {verdict.value}")
    stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_history(args, stdout: TextIO) -> int:
    series = ts.load_history(args.history)
    rep = ts.fluctuation(series, window=args.window, abrupt_threshold=args.threshold)
    num = lambda x: sc.format_number(x, args.precision)  # noqa: E731
    if args.format == "json":
        body = json.dumps({
            "records": len(series),
            "window": rep.window,
            "max_abs_delta": rep.max_abs_delta,
            "range": rep.range,
            "std_dev": rep.std_dev,
            "verdict": rep.verdict.value,
        }, indent=2) + "\n"
    else:
        body = "\n".join([
            f"records: {len(series)}",
            f"window: {rep.window}",
            f"max abs delta: {num(rep.max_abs_delta)}",
            f"range: {num(rep.range)}",
            f"std dev: {num(rep.std_dev)}",
            f"verdict: {rep.verdict.value}",
        ]) + "\n"
    _emit(body, args.out, stdout)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "score": cmd_score,
    "fairtrade": cmd_fairtrade,
    "history": cmd_history,
}


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    logging.getLogger("trustquant").setLevel(logging.ERROR)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_IO
    try:
        return COMMANDS[args.command](args, stdout)
    except (OSError, json.JSONDecodeError, FormatError, UnicodeDecodeError) as exc:
        if isinstance(exc, OSError) and exc.filename:
            msg = f"{exc.strerror or exc}: {exc.filename}"
        else:
            msg = str(exc)
        print(f"error: {msg}", file=stderr)
        return EXIT_IO
    except (TrustQuantError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
