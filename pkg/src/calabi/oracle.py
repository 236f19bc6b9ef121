"""Floating-point cross-checks of the exact pipeline.

Nothing here feeds back into exact verdicts; these routines only confirm
them.  Potentials are evaluated with :mod:`mpmath` at 50 significant digits
so that fourth-order finite differences survive cancellation.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb, factorial, prod
from typing import Sequence

import mpmath
import numpy as np

from .catalog import MetricSpec, extension, profile_jet
from .engine import CalabiMatrix, NoObstructionUpTo

__all__ = [
    "NumericError",
    "NumericReport",
    "FiniteDifferenceResult",
    "numeric_potential",
    "finite_difference_check",
    "numeric_psd",
    "numeric_report",
]

DPS = 50
DEAD_BAND = 1e-10
JET_ORDER = 24


class NumericError(RuntimeError):
    pass


@dataclass(frozen=True)
class FiniteDifferenceResult:
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    exact: float
    approx: float
    relative_error: float


@dataclass(frozen=True)
class NumericReport:
    checked_coefficients: int
    max_relative_error: float
    eigen_min: float
    consistent: bool


def _horner(coeffs, x):
    acc = mpmath.mpf(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _profile(kind: str, n: int, N):
    jet = profile_jet(kind, n, JET_ORDER)
    coeffs = [mpmath.mpf(int(c.numerator)) / int(c.denominator) for c in jet.coeffs]
    return _horner(coeffs, N - 1)


def _taubnut(m, z1, z2):
    m = mpmath.mpf(int(m.numerator)) / int(m.denominator)
    s, t = abs(z1) ** 2, abs(z2) ** 2
    if s == 0 and t == 0:
        return mpmath.mpf(0)

    def F(x, y):
        return [x * mpmath.exp(2 * m * (x + y)) - s, y * mpmath.exp(2 * m * (y - x)) - t]

    try:
        x, y = mpmath.findroot(F, (s, t), tol=mpmath.mpf(10) ** (-2 * DPS + 10))
    except (ValueError, ZeroDivisionError) as exc:
        raise NumericError(f"Newton iteration failed for Taub-NUT at ({z1}, {z2})") from exc
    if max(abs(r) for r in F(x, y)) > mpmath.mpf(10) ** -20:
        raise NumericError("Newton iteration did not reach residual 1e-20")
    return x + y + m * (x * x + y * y)


def numeric_potential(spec: MetricSpec, point: Sequence[complex]):
    """Kähler potential of ``spec`` at a complex point near the chart origin.

    Returns an ``mpmath.mpf``.  Lee profiles are evaluated by their Taylor
    polynomial at N = 1, so the point must stay well inside the unit
    polydisc (radius 1/4 is ample).
    """
    if len(point) != spec.var_count:
        raise ValueError(f"{spec} expects {spec.var_count} coordinates, got {len(point)}")
    with mpmath.workdps(DPS):
        z = [mpmath.mpc(p) for p in point]
        if spec.kind == "flat":
            return mpmath.fsum(abs(x) ** 2 for x in z)
        if spec.kind == "fs":
            return mpmath.log(1 + mpmath.fsum(abs(x) ** 2 for x in z))
        if spec.kind == "taubnut":
            return _taubnut(spec.param, z[0], z[1])
        n = spec.param
        if spec.kind == "lee2":
            zs, ws = z[:n], z[n:]
            num = (1 + mpmath.fsum(abs(x) ** 2 for x in zs)) * (1 + mpmath.fsum(abs(x) ** 2 for x in ws))
            den = abs(1 + mpmath.fsum(a * b for a, b in zip(zs, ws))) ** 2
        else:
            zs, ws = z[: 2 * n], z[2 * n :]
            cross = mpmath.fsum(a * mpmath.conj(b) for a, b in zip(zs, ws))
            num = (1 + mpmath.fsum(abs(x) ** 2 for x in zs)) * (
                1 + mpmath.fsum(abs(x) ** 2 for x in ws)
            ) - abs(cross) ** 2
            sigma = mpmath.fsum(
                zs[2 * j + 1] * ws[2 * j] - zs[2 * j] * ws[2 * j + 1] for j in range(n)
            )
            den = abs(sigma - 1) ** 2
        return _profile(spec.kind, n, num / den)


def _wirtinger_stencil(a: int, b: int):
    """Real-partial expansion of ``d^a/dz^a d^b/dzbar^b`` as ``{(px, py): weight}``.

    Uses ``d/dz = (dx - i dy)/2`` and ``d/dzbar = (dx + i dy)/2``.
    """
    out: dict[tuple[int, int], complex] = {}
    for i in range(a + 1):
        for j in range(b + 1):
            w = comb(a, i) * comb(b, j) * (-1j) ** (a - i) * (1j) ** (b - j)
            key = (i + j, a + b - i - j)
            out[key] = out.get(key, 0) + w / 2 ** (a + b)
    return {k: v for k, v in out.items() if v != 0}


def _central(order: int, h):
    """Nodes and weights of the central difference of given order with step h."""
    return [
        ((mpmath.mpf(order) / 2 - k) * h, (-1) ** k * comb(order, k) / h**order)
        for k in range(order + 1)
    ]


def _mixed_derivative(spec: MetricSpec, alpha, beta, h):
    V = spec.var_count
    per_var = [_wirtinger_stencil(alpha[i], beta[i]) for i in range(V)]
    total = mpmath.mpc(0)
    for choice in product(*(list(s.items()) for s in per_var)):
        weight = prod(w for _, w in choice)
        axes = []
        for i, ((px, py), _) in enumerate(choice):
            axes.append((i, "x", px))
            axes.append((i, "y", py))
        grids = [_central(order, h) for _, _, order in axes]
        acc = mpmath.mpc(0)
        for nodes in product(*grids):
            point = [mpmath.mpc(0)] * V
            w = mpmath.mpf(1)
            for (i, part, _), (offset, wk) in zip(axes, nodes):
                point[i] += offset if part == "x" else 1j * offset
                w *= wk
            acc += w * numeric_potential(spec, point)
        total += mpmath.mpc(weight) * acc
    return total


def finite_difference_check(
    spec: MetricSpec, alpha: Sequence[int], beta: Sequence[int], h: float = 1e-3
) -> FiniteDifferenceResult:
    """Compare a Richardson-extrapolated central difference with ``alpha! beta! c[alpha, beta]``."""
    alpha, beta = tuple(alpha), tuple(beta)
    if sum(alpha) > 4 or sum(beta) > 4:
        raise ValueError("finite differences are limited to |alpha|, |beta| <= 4")
    cutoff = max(sum(alpha), sum(beta), 1)
    exact_coef = extension(spec, cutoff).coefficient(alpha, beta)
    scale = prod(factorial(e) for e in alpha) * prod(factorial(e) for e in beta)
    exact = exact_coef * scale
    with mpmath.workdps(DPS):
        hh = mpmath.mpf(h)
        coarse = _mixed_derivative(spec, alpha, beta, hh)
        fine = _mixed_derivative(spec, alpha, beta, hh / 2)
        approx = (4 * fine - coarse) / 3
        ex = mpmath.mpf(int(exact.numerator)) / int(exact.denominator)
        err = abs(approx - ex)
        rel = err / abs(ex) if ex != 0 else err
        return FiniteDifferenceResult(alpha, beta, float(ex), float(approx.real), float(rel))


def numeric_psd(matrix: CalabiMatrix, verdict=None) -> NumericReport:
    """Smallest eigenvalue of the float matrix without its identically zero constant row.

    When ``verdict`` is given, ``consistent`` reports whether the eigenvalue
    sign agrees with it (within ``DEAD_BAND``).
    """
    if matrix.size > 500:
        raise ValueError("numeric_psd is limited to matrices of size <= 500")
    keep = [i for i, a in enumerate(matrix.basis) if any(a)]
    arr = np.array([[float(matrix.entries[i][j]) for j in keep] for i in keep], dtype=float)
    eigen_min = float(np.linalg.eigvalsh(arr).min()) if keep else 0.0
    consistent = True
    if verdict is not None:
        consistent = _sign_agrees(eigen_min, verdict)
    return NumericReport(0, 0.0, eigen_min, consistent)


def _sign_agrees(eigen_min: float, verdict) -> bool:
    if isinstance(verdict, NoObstructionUpTo):
        return eigen_min > -DEAD_BAND
    return eigen_min < DEAD_BAND


def numeric_report(
    spec: MetricSpec,
    matrix: CalabiMatrix,
    verdict,
    max_order: int = 2,
    tolerance: float = 1e-6,
    h: float = 1e-3,
) -> NumericReport:
    """Finite-difference checks on every coefficient with ``|alpha|, |beta| <= max_order``
    on the first variable pair, plus the eigenvalue sign check of ``matrix``."""
    V = spec.var_count
    errors = []
    for a in range(1, max_order + 1):
        for b in range(1, max_order + 1):
            alpha = (a,) + (0,) * (V - 1)
            beta = (b,) + (0,) * (V - 1)
            errors.append(finite_difference_check(spec, alpha, beta, h).relative_error)
    eig = numeric_psd(matrix, verdict)
    worst = max(errors) if errors else 0.0
    return NumericReport(
        len(errors), worst, eig.eigen_min, worst <= tolerance and eig.consistent
    )
