"""Serialization of verdicts, jets and matrices, and the reproduction table.

Rationals always travel as ``p/q`` strings so every artifact round-trips
exactly.
"""
from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .catalog import MetricSpec
from .engine import (
    CalabiMatrix,
    NoObstructionUpTo,
    ObstructedDiagonal,
    ObstructedMinor,
    diagonal_derivative,
    monomial_label,
)
from .profile_ode import bell_bracket, lee2_ode, lee3_ode, mii_closed_jet, solve_profile_jet
from .series import Jet, as_rational, format_rational

__all__ = [
    "verdict_to_dict",
    "verify_payload",
    "matrix_to_csv",
    "matrix_to_json",
    "matrix_from_csv",
    "matrix_from_json",
    "parse_monomial_label",
    "AnchorRow",
    "paper_table",
]

_LABEL = re.compile(r"^([a-z]+\d+)(?:\^(\d+))?$")


def verdict_to_dict(verdict, names: Sequence[str] | None = None) -> dict:
    out: dict = {"kind": verdict.kind}
    if isinstance(verdict, ObstructedDiagonal):
        out["monomial"] = monomial_label(verdict.monomial, names)
        out["degree"] = verdict.degree
        out["entry"] = format_rational(verdict.entry)
        out["derivative"] = format_rational(verdict.derivative)
    elif isinstance(verdict, ObstructedMinor):
        out["minor_size"] = len(verdict.indices)
        out["leading_size"] = verdict.leading_size
        out["minor_value"] = format_rational(verdict.minor_value)
        out["indices"] = list(verdict.indices)
    elif isinstance(verdict, NoObstructionUpTo):
        out["degree"] = verdict.degree
        out["rank"] = verdict.rank
    return out


def verify_payload(spec: MetricSpec, degree: int, mode: str, verdict, oracle=None) -> dict:
    payload = {
        "metric": spec.kind,
        "params": spec.params(),
        "degree": degree,
        "mode": mode,
        "verdict": verdict_to_dict(verdict, spec.variable_names),
    }
    if oracle is not None:
        payload["oracle"] = {
            "eigen_min": oracle.eigen_min,
            "max_relative_error": oracle.max_relative_error,
            "checked_coefficients": oracle.checked_coefficients,
            "consistent": oracle.consistent,
        }
    return payload


def parse_monomial_label(label: str, names: Sequence[str]) -> tuple[int, ...]:
    """Inverse of :func:`calabi.engine.monomial_label`."""
    exps = [0] * len(names)
    if label == "1":
        return tuple(exps)
    for factor in label.split("*"):
        m = _LABEL.match(factor)
        if not m or m.group(1) not in names:
            raise ValueError(f"bad monomial label {label!r}")
        exps[names.index(m.group(1))] += int(m.group(2) or 1)
    return tuple(exps)


def matrix_to_csv(matrix: CalabiMatrix) -> str:
    labels = matrix.labels()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + labels)
    for label, row in zip(labels, matrix.entries):
        writer.writerow([label] + [format_rational(x) for x in row])
    return buf.getvalue()


def matrix_to_json(matrix: CalabiMatrix, spec: MetricSpec | None = None) -> str:
    payload = {
        "degree": matrix.degree,
        "variables": list(matrix.names or [f"z{i + 1}" for i in range(len(matrix.basis[0]))]),
        "basis": matrix.labels(),
        "entries": [[format_rational(x) for x in row] for row in matrix.entries],
    }
    if spec is not None:
        payload = {"metric": spec.kind, "params": spec.params(), **payload}
    return json.dumps(payload, indent=2)


def _matrix_from_rows(labels, rows, names, degree=None) -> CalabiMatrix:
    basis = tuple(parse_monomial_label(l, names) for l in labels)
    entries = tuple(tuple(as_rational(x) for x in row) for row in rows)
    if degree is None:
        degree = max(sum(a) for a in basis)
    return CalabiMatrix(basis, entries, degree, tuple(names))


def matrix_from_csv(text: str, names: Sequence[str]) -> CalabiMatrix:
    reader = list(csv.reader(io.StringIO(text)))
    labels = reader[0][1:]
    rows = [r[1:] for r in reader[1:]]
    if [r[0] for r in reader[1:]] != labels:
        raise ValueError("row and column labels differ")
    return _matrix_from_rows(labels, rows, list(names))


def matrix_from_json(text: str) -> CalabiMatrix:
    data = json.loads(text)
    return _matrix_from_rows(data["basis"], data["entries"], data["variables"], data["degree"])


@dataclass(frozen=True)
class AnchorRow:
    anchor: str
    expected: str
    computed: str

    @property
    def match(self) -> bool:
        return self.expected == self.computed

    def to_dict(self) -> dict:
        return {"anchor": self.anchor, "expected": self.expected, "computed": self.computed, "match": self.match}


def _fmt(values) -> str:
    if isinstance(values, (list, tuple)):
        return ", ".join(format_rational(v) for v in values)
    return format_rational(values)


def _corrupted(jet: Jet) -> Jet:
    coeffs = list(jet.coeffs)
    coeffs[-1] += 1
    return Jet(coeffs, jet.basepoint)


def paper_table(max_n: int = 10, corrupt: bool = False) -> list[AnchorRow]:
    """Recompute every reproduced value; ``corrupt`` perturbs the M_III n=1 jet (negative control)."""
    rows: list[AnchorRow] = []

    def lee3_jet(n, order):
        jet = solve_profile_jet(lee3_ode(n), order)
        return _corrupted(jet) if corrupt and n == 1 else jet

    lee2_values = [mpq(1), mpq(-1, 2), mpq(3, 4), mpq(-15, 8)]
    for n in range(1, max_n + 1):
        jet = solve_profile_jet(lee2_ode(n), 4)
        rows.append(AnchorRow(f"M_II jet f'..f'''' (n={n})", _fmt(lee2_values), _fmt(jet.derivatives()[1:])))
    closed = mii_closed_jet(8)
    rows.append(
        AnchorRow(
            "M_II jet equals closed form f'=N^(-1/2) (order 8)",
            _fmt(closed.derivatives()),
            _fmt(solve_profile_jet(lee2_ode(1), 8).derivatives()),
        )
    )

    for n in range(1, max_n + 1):
        expected = [
            mpq(-n, 2 * n + 1),
            mpq(6 * n * n + 2 * n + 1, 2 * (2 * n + 1) ** 2),
            mpq(-(30 * n**3 + 22 * n**2 + 15 * n + 2), 2 * (2 * n + 1) ** 3),
        ]
        jet = lee3_jet(n, 4)
        rows.append(AnchorRow(f"M_III jet f''..f'''' (n={n})", _fmt(expected), _fmt(jet.derivatives()[2:])))

    lee3_n1_values = [mpq(-1, 3), mpq(1, 2), mpq(-23, 18), mpq(493, 108), mpq(-2255, 108)]
    rows.append(AnchorRow("M_III jet f''..f^(6) (n=1)", _fmt(lee3_n1_values), _fmt(lee3_jet(1, 6).derivatives()[2:])))

    for n in range(1, min(max_n, 5) + 1):
        rows.append(
            AnchorRow(
                f"M_II d^8 e^f / dz1^4 dzbar1^4 at 0 (n={n})",
                "-3",
                _fmt(diagonal_derivative(MetricSpec.lee2(n), 0, 4)),
            )
        )

    for n in range(1, max_n + 1):
        expected = mpq(-24 * n**3 + 12 * n + 48, (2 * n + 1) ** 3)
        computed = diagonal_derivative(MetricSpec.lee3(n), 0, 4)
        if corrupt and n == 1:
            computed = 24 * bell_bracket(lee3_jet(1, 4), 4)
        rows.append(AnchorRow(f"M_III d^8 e^f / dz1^4 dzbar1^4 at 0 (n={n})", _fmt(expected), _fmt(computed)))
        sign = "positive" if n == 1 else "negative"
        rows.append(
            AnchorRow(
                f"M_III k=4 derivative sign (n={n})",
                sign,
                "positive" if computed > 0 else "negative" if computed < 0 else "zero",
            )
        )

    bracket = bell_bracket(lee3_jet(1, 6), 6)
    rows.append(AnchorRow("M_III k=6 bracket (n=1)", "-359/108", _fmt(bracket)))
    rows.append(
        AnchorRow(
            "M_III d^12 e^f / dz1^6 dzbar1^6 at 0 (n=1)",
            _fmt(mpq(-359, 108) * 720),
            _fmt(diagonal_derivative(MetricSpec.lee3(1), 0, 6) if not corrupt else bracket * 720),
        )
    )
    return rows
