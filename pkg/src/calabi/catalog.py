"""Analytic extensions of the catalog Kähler potentials around the chart origin.

Every potential is returned as a :class:`~calabi.series.BiSeries` in which the
``zeta`` block stands for the conjugated coordinates.  Variable order is the
z-block followed by the w-block, each by ascending subscript:

=============  ==========  ==============================
metric         var_count   variable names
=============  ==========  ==============================
Flat(d)        d           z1..zd
FubiniStudy(d) d           z1..zd
LeeII(n)       2n          z1..zn, w1..wn
LeeIII(n)      4n          z1..z2n, w1..w2n
TaubNut(m)     2           z1, z2
=============  ==========  ==============================
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .profile_ode import lee2_ode, lee3_ode, solve_profile_jet
from .series import (
    BiSeries,
    Rational,
    as_rational,
    implicit_series_solve,
    jet_compose,
    series_exp,
    series_log,
    series_reciprocal,
)

__all__ = [
    "MetricSpec",
    "n_series_II",
    "n_series_III",
    "extension",
    "taubnut_extension",
    "profile_jet",
]

KINDS = ("flat", "fs", "lee2", "lee3", "taubnut")


@dataclass(frozen=True)
class MetricSpec:
    """Catalog descriptor.  Use the classmethods rather than the raw constructor."""

    kind: str
    param: int | Rational

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.kind == "taubnut":
            m = as_rational(self.param)
            if m < 0:
                raise ValueError("Taub-NUT parameter m must be >= 0")
            object.__setattr__(self, "param", m)
        elif not isinstance(self.param, int) or self.param < 1:
            raise ValueError(f"{self.kind} needs a positive integer parameter, got {self.param!r}")

    @classmethod
    def flat(cls, dim: int) -> "MetricSpec":
        return cls("flat", dim)

    @classmethod
    def fubini_study(cls, dim: int) -> "MetricSpec":
        return cls("fs", dim)

    @classmethod
    def lee2(cls, n: int) -> "MetricSpec":
        return cls("lee2", n)

    @classmethod
    def lee3(cls, n: int) -> "MetricSpec":
        return cls("lee3", n)

    @classmethod
    def taubnut(cls, m) -> "MetricSpec":
        return cls("taubnut", as_rational(m))

    @property
    def var_count(self) -> int:
        if self.kind in ("flat", "fs"):
            return self.param
        if self.kind == "lee2":
            return 2 * self.param
        if self.kind == "lee3":
            return 4 * self.param
        return 2

    @property
    def variable_names(self) -> tuple[str, ...]:
        if self.kind == "lee2":
            half = self.param
        elif self.kind == "lee3":
            half = 2 * self.param
        else:
            return tuple(f"z{i + 1}" for i in range(self.var_count))
        return tuple(f"z{i + 1}" for i in range(half)) + tuple(f"w{i + 1}" for i in range(half))

    def variable_index(self, name: str) -> int:
        try:
            return self.variable_names.index(name)
        except ValueError:
            raise ValueError(f"{name!r} is not a variable of {self}") from None

    def params(self) -> dict:
        key = {"flat": "dim", "fs": "dim", "lee2": "n", "lee3": "n", "taubnut": "m"}[self.kind]
        return {key: str(self.param) if self.kind == "taubnut" else self.param}

    def __str__(self):
        label = {"flat": "Flat", "fs": "FubiniStudy", "lee2": "LeeII", "lee3": "LeeIII", "taubnut": "TaubNut"}
        return f"{label[self.kind]}({self.param})"


def _keep(variables: Iterable[int] | None, var_count: int) -> frozenset[int]:
    if variables is None:
        return frozenset(range(var_count))
    keep = frozenset(variables)
    if any(not 0 <= i < var_count for i in keep):
        raise ValueError(f"variable indices {sorted(keep)} out of range for {var_count} variables")
    return keep


def _linear_sum(pairs, V, D, keep, sign=1) -> BiSeries:
    """``sum sign_k * x_k * y_k`` where each factor is ('z'|'zeta', index)."""
    out = BiSeries.zero(V, D)
    for coef, left, right in pairs:
        if left[1] not in keep or right[1] not in keep:
            continue
        out = out + _var(V, D, left) * _var(V, D, right) * coef
    return out


def _var(V, D, spec) -> BiSeries:
    side, i = spec
    return BiSeries.z(V, D, i) if side == "z" else BiSeries.zeta(V, D, i)


def n_series_II(n: int, cutoff: int, variables: Iterable[int] | None = None) -> BiSeries:
    """Analytic extension of the M_II invariant ``N`` around the chart origin.

    Holomorphic variables are ``z_1..z_n`` (indices ``0..n-1``) and ``w_1..w_n``
    (indices ``n..2n-1``).  ``variables`` optionally keeps only a subset of
    variable pairs, which is the same as restricting the full result.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    V = 2 * n
    keep = _keep(variables, V)
    zs = range(n)
    ws = range(n, 2 * n)
    first = 1 + _linear_sum([(1, ("z", j), ("zeta", j)) for j in zs], V, cutoff, keep)
    second = 1 + _linear_sum([(1, ("z", j), ("zeta", j)) for j in ws], V, cutoff, keep)
    den_hol = 1 + _linear_sum([(1, ("z", j), ("z", j + n)) for j in zs], V, cutoff, keep)
    den_anti = 1 + _linear_sum([(1, ("zeta", j), ("zeta", j + n)) for j in zs], V, cutoff, keep)
    return first * second * series_reciprocal(den_hol * den_anti)


def n_series_III(n: int, cutoff: int, variables: Iterable[int] | None = None) -> BiSeries:
    """Analytic extension of the M_III invariant ``N`` around the chart origin.

    Holomorphic variables are ``z_1..z_2n`` (indices ``0..2n-1``) and
    ``w_1..w_2n`` (indices ``2n..4n-1``).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    V = 4 * n
    keep = _keep(variables, V)
    half = 2 * n
    zs = range(half)
    z_norm = _linear_sum([(1, ("z", j), ("zeta", j)) for j in zs], V, cutoff, keep)
    w_norm = _linear_sum([(1, ("z", j + half), ("zeta", j + half)) for j in zs], V, cutoff, keep)
    # sum_j z_j conj(w_j) and sum_k conj(z_k) w_k
    zw_bar = _linear_sum([(1, ("z", j), ("zeta", j + half)) for j in zs], V, cutoff, keep)
    z_bar_w = _linear_sum([(1, ("zeta", j), ("z", j + half)) for j in zs], V, cutoff, keep)
    numerator = (1 + z_norm) * (1 + w_norm) - zw_bar * z_bar_w
    # sum_j (z_{2j} w_{2j-1} - z_{2j-1} w_{2j}), 1-based subscripts
    symplectic = []
    for j in range(n):
        odd, even = 2 * j, 2 * j + 1
        symplectic.append((1, ("z", even), ("z", odd + half)))
        symplectic.append((-1, ("z", odd), ("z", even + half)))
    hol = _linear_sum(symplectic, V, cutoff, keep)
    anti = _linear_sum(
        [(c, ("zeta", a[1]), ("zeta", b[1])) for c, a, b in symplectic], V, cutoff, keep
    )
    # |sigma - 1|^2 = (1 - sigma)(1 - conj sigma)
    return numerator * series_reciprocal((1 - hol) * (1 - anti))


@lru_cache(maxsize=None)
def profile_jet(kind: str, n: int, order: int):
    """Cached profile jet of order ``order`` for ``kind`` in {"lee2", "lee3"}."""
    ode = lee2_ode(n) if kind == "lee2" else lee3_ode(n)
    return solve_profile_jet(ode, order)


def taubnut_extension(m, cutoff: int, variables: Iterable[int] | None = None) -> BiSeries:
    """Taub-NUT potential ``x + y + m(x^2 + y^2)`` with ``x = u^2``, ``y = v^2``.

    ``x`` and ``y`` solve ``s = x exp(2m(x + y))``, ``t = y exp(2m(y - x))``
    where ``s = |z_1|^2`` and ``t = |z_2|^2``.
    """
    m = as_rational(m)
    if m < 0:
        raise ValueError("m must be >= 0")
    keep = _keep(variables, 2)
    V = 2
    s = BiSeries.z(V, cutoff, 0) * BiSeries.zeta(V, cutoff, 0) if 0 in keep else BiSeries.zero(V, cutoff)
    t = BiSeries.z(V, cutoff, 1) * BiSeries.zeta(V, cutoff, 1) if 1 in keep else BiSeries.zero(V, cutoff)

    def residual(xs):
        x, y = xs
        return [
            x * series_exp((x + y) * (2 * m)) - s,
            y * series_exp((y - x) * (2 * m)) - t,
        ]

    x, y = implicit_series_solve(residual, [0, 0], V, cutoff)
    return x + y + (x * x + y * y) * m


def extension(spec: MetricSpec, cutoff: int, variables: Iterable[int] | None = None) -> BiSeries:
    """Analytic extension of the catalog potential of ``spec`` in its chart.

    Lee profiles are normalized by ``f(1) = 0``.  ``variables`` restricts the
    result to the listed variable pairs (0-based); restriction commutes with
    every step, so this equals restricting the full extension, only cheaper.
    """
    V = spec.var_count
    keep = _keep(variables, V)
    if spec.kind in ("flat", "fs"):
        norm = BiSeries.zero(V, cutoff)
        for j in sorted(keep):
            norm = norm + BiSeries.z(V, cutoff, j) * BiSeries.zeta(V, cutoff, j)
        return norm if spec.kind == "flat" else series_log(1 + norm)
    if spec.kind == "lee2":
        inner = n_series_II(spec.param, cutoff, keep)
    elif spec.kind == "lee3":
        inner = n_series_III(spec.param, cutoff, keep)
    else:
        return taubnut_extension(spec.param, cutoff, keep)
    return jet_compose(profile_jet(spec.kind, spec.param, 2 * cutoff), inner)
