"""Command-line entry point: ``calabi {verify,jet,matrix,diag,paper-table}``.

Exit codes: 0 when a verdict or table was computed, 1 on internal failure or
a reproduction mismatch, 2 on bad arguments.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from math import comb

from . import __version__
from .catalog import MetricSpec
from .engine import catalog_matrix, diagonal_derivative, diagonal_entry, first_obstruction, psd_check
from .profile_ode import lee2_ode, lee3_ode, solve_profile_jet
from .report import matrix_to_csv, matrix_to_json, paper_table, verify_payload
from .series import as_rational, format_rational

MAX_BASIS = 500
METRICS = ["flat", "fs", "lee2", "lee3", "taubnut"]


class UsageError(Exception):
    pass


def _spec(args) -> MetricSpec:
    metric = args.metric
    if metric is None:
        raise UsageError("--metric is required")
    if metric in ("lee2", "lee3"):
        if args.n is None:
            raise UsageError(f"--n is required for metric {metric}")
        return MetricSpec(metric, args.n)
    if metric in ("flat", "fs"):
        if args.dim is None:
            raise UsageError(f"--dim is required for metric {metric}")
        return MetricSpec(metric, args.dim)
    if args.m is None:
        raise UsageError("--m is required for metric taubnut")
    try:
        m = as_rational(args.m)
    except (ValueError, TypeError):
        raise UsageError(f"--m must be a rational p/q, got {args.m!r}") from None
    return MetricSpec.taubnut(m)


def _emit(text: str, args) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _rows_csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _flatten(payload: dict, prefix: str = "") -> list[tuple[str, str]]:
    out = []
    for k, v in payload.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.extend(_flatten(v, key + "."))
        elif isinstance(v, list):
            out.append((key, " ".join(str(x) for x in v)))
        else:
            out.append((key, str(v)))
    return out


def cmd_verify(args) -> int:
    spec = _spec(args)
    _guard_basis(spec, args.degree)
    if args.mode == "diag":
        verdict = first_obstruction(spec, args.degree)
        matrix = None
    else:
        matrix = catalog_matrix(spec, args.degree)
        verdict = psd_check(matrix)
    oracle = None
    if args.oracle:
        from .oracle import numeric_report

        if matrix is None:
            matrix = catalog_matrix(spec, args.degree)
        oracle = numeric_report(spec, matrix, verdict)
    payload = verify_payload(spec, args.degree, args.mode, verdict, oracle)
    if args.format == "json":
        text = json.dumps(payload, indent=2)
    elif args.format == "csv":
        text = _rows_csv([("field", "value")] + _flatten(payload))
    else:
        v = payload["verdict"]
        detail = ", ".join(f"{k}={val}" for k, val in v.items() if k != "kind")
        text = f"{spec} degree={args.degree} mode={args.mode}: {v['kind']} ({detail})"
        if oracle is not None:
            text += f"\noracle: eigen_min={oracle.eigen_min:.6g} consistent={oracle.consistent}"
    _emit(text, args)
    return 0


def cmd_jet(args) -> int:
    if args.metric not in ("lee2", "lee3"):
        raise UsageError("jet is only defined for --metric lee2 or lee3")
    if args.n is None:
        raise UsageError("--n is required")
    if args.order < 1:
        raise UsageError("--order must be >= 1")
    ode = lee2_ode(args.n) if args.metric == "lee2" else lee3_ode(args.n)
    jet = solve_profile_jet(ode, args.order)
    values = [(k, format_rational(jet.derivative(k))) for k in range(1, args.order + 1)]
    if args.format == "json":
        text = json.dumps(
            {
                "metric": args.metric,
                "params": {"n": args.n},
                "order": args.order,
                "normalization": "f(1)=0",
                "derivatives": [{"k": k, "value": v} for k, v in values],
            },
            indent=2,
        )
    elif args.format == "csv":
        text = _rows_csv([("k", "value")] + values)
    else:
        text = "\n".join(f"f^({k})(1) = {v}" for k, v in values)
    _emit(text, args)
    return 0


def _guard_basis(spec: MetricSpec, degree: int) -> None:
    if degree < 1:
        raise UsageError("--degree must be >= 1")
    size = comb(spec.var_count + degree, degree)
    if size > MAX_BASIS:
        raise UsageError(
            f"basis of {size} monomials exceeds the limit of {MAX_BASIS}; lower --degree"
        )


def cmd_matrix(args) -> int:
    spec = _spec(args)
    _guard_basis(spec, args.degree)
    matrix = catalog_matrix(spec, args.degree)
    if args.format == "json":
        text = matrix_to_json(matrix, spec)
    elif args.format == "csv":
        text = matrix_to_csv(matrix)
    else:
        labels = matrix.labels()
        width = max(len(l) for l in labels)
        lines = [
            f"{l:>{width}}  " + " ".join(format_rational(x) for x in row)
            for l, row in zip(labels, matrix.entries)
        ]
        text = "\n".join(lines)
    _emit(text, args)
    return 0


def cmd_diag(args) -> int:
    spec = _spec(args)
    try:
        i = spec.variable_index(args.var)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    entry = diagonal_entry(spec, i, args.k)
    derivative = diagonal_derivative(spec, i, args.k)
    payload = {
        "metric": spec.kind,
        "params": spec.params(),
        "variable": args.var,
        "k": args.k,
        "entry": format_rational(entry),
        "derivative": format_rational(derivative),
    }
    if args.format == "json":
        text = json.dumps(payload, indent=2)
    elif args.format == "csv":
        text = _rows_csv([("field", "value")] + _flatten(payload))
    else:
        text = f"d^{2 * args.k} e^D0 / d{args.var}^{args.k} d{args.var}bar^{args.k} at 0 = {payload['derivative']} (matrix entry {payload['entry']})"
    _emit(text, args)
    return 0


def cmd_paper_table(args) -> int:
    rows = paper_table(corrupt=args.inject_mismatch)
    if args.format == "json":
        text = json.dumps([r.to_dict() for r in rows], indent=2)
    elif args.format == "csv":
        text = _rows_csv([("anchor", "expected", "computed", "match")] + [
            (r.anchor, r.expected, r.computed, "MATCH" if r.match else "MISMATCH") for r in rows
        ])
    else:
        text = "\n".join(
            f"{'MATCH   ' if r.match else 'MISMATCH'}  {r.anchor}: expected {r.expected}; computed {r.computed}"
            for r in rows
        )
    _emit(text, args)
    return 0 if all(r.match for r in rows) else 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("metric_name", nargs="?", choices=METRICS, metavar="METRIC", help="same as --metric")
    common.add_argument("--metric", choices=METRICS)
    common.add_argument("--n", type=int, help="family index for lee2/lee3")
    common.add_argument("--dim", type=int, help="dimension for flat/fs")
    common.add_argument("--m", help="Taub-NUT parameter as p/q")
    common.add_argument("--format", choices=["json", "csv", "text"], default="text")
    common.add_argument("--out", help="write the report to this file instead of stdout")

    parser = _Parser(prog="calabi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("verify", parents=[common], help="search for an obstruction to projective inducibility")
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--mode", choices=["diag", "full"], default="diag")
    p.add_argument("--oracle", action="store_true", help="attach floating-point cross-checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("jet", parents=[common], help="Taylor jet of the profile function at N=1")
    p.add_argument("--order", type=int, default=4)
    p.set_defaults(func=cmd_jet)

    p = sub.add_parser("matrix", parents=[common], help="dump the Calabi coefficient matrix")
    p.add_argument("--degree", type=int, default=2)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("diag", parents=[common], help="diagonal derivative at the origin")
    p.add_argument("--var", default="z1", help="variable label, e.g. z1 or w2")
    p.add_argument("--k", type=int, default=4)
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("paper-table", parents=[common], help="recompute the reproduced values")
    p.add_argument("--inject-mismatch", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_paper_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.metric_name is not None:
            if args.metric not in (None, args.metric_name):
                raise UsageError("positional METRIC and --metric disagree")
            args.metric = args.metric_name
        return args.func(args)
    except UsageError as exc:
        print(f"calabi: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"calabi: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
