"""Calabi's coefficient matrix, the exact PSD test and the diagonal shortcut.

The matrix ``a[j][k]`` collects the coefficients of ``exp(D_0) - 1`` on the
monomials ``z^{m_j} zeta^{m_k}``, where ``D_0`` is the diastasis centred at
the origin.  A neighbourhood of the origin admits a Kähler immersion into
complex projective space iff this (infinite) matrix is positive semidefinite,
so any negative diagonal entry or negative principal minor of a finite block
certifies that the metric is not projectively induced.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import factorial, prod
from typing import Sequence

from gmpy2 import mpq

from .catalog import MetricSpec, extension
from .series import BiSeries, Rational, series_exp

__all__ = [
    "CalabiMatrix",
    "ObstructedDiagonal",
    "ObstructedMinor",
    "NoObstructionUpTo",
    "Verdict",
    "diastasis_at_origin",
    "monomial_basis",
    "monomial_label",
    "calabi_matrix",
    "catalog_matrix",
    "psd_check",
    "diagonal_derivative",
    "diagonal_entry",
    "first_obstruction",
]


def monomial_label(alpha: Sequence[int], names: Sequence[str] | None = None) -> str:
    """``z1^2*w1`` style label; the empty monomial is ``1``."""
    if names is None:
        names = [f"z{i + 1}" for i in range(len(alpha))]
    parts = []
    for name, e in zip(names, alpha):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) or "1"


@dataclass(frozen=True)
class ObstructedDiagonal:
    monomial: tuple[int, ...]
    entry: Rational
    kind: str = field(default="obstructed_diagonal", init=False)

    def __post_init__(self):
        if not self.entry < 0:
            raise ValueError("an obstructing diagonal entry must be negative")

    @property
    def derivative(self) -> Rational:
        """``d^alpha dbar^alpha exp(D_0)`` at 0, i.e. ``(alpha!)^2`` times the entry."""
        return self.entry * prod(factorial(e) for e in self.monomial) ** 2

    @property
    def degree(self) -> int:
        return sum(self.monomial)


@dataclass(frozen=True)
class ObstructedMinor:
    """A principal submatrix with negative determinant.

    ``indices`` are basis positions; when they form a leading block,
    ``leading_size`` equals ``len(indices)``.
    """

    leading_size: int
    minor_value: Rational
    indices: tuple[int, ...] = ()
    kind: str = field(default="obstructed_minor", init=False)

    def __post_init__(self):
        if not self.minor_value < 0:
            raise ValueError("an obstructing minor must be negative")


@dataclass(frozen=True)
class NoObstructionUpTo:
    degree: int
    rank: int
    kind: str = field(default="no_obstruction_up_to", init=False)


Verdict = ObstructedDiagonal | ObstructedMinor | NoObstructionUpTo


def is_obstructed(verdict) -> bool:
    return not isinstance(verdict, NoObstructionUpTo)


@dataclass(frozen=True)
class CalabiMatrix:
    basis: tuple[tuple[int, ...], ...]
    entries: tuple[tuple[Rational, ...], ...]
    degree: int
    names: tuple[str, ...] | None = None

    @property
    def size(self) -> int:
        return len(self.basis)

    def labels(self) -> list[str]:
        return [monomial_label(a, self.names) for a in self.basis]

    def diagonal(self) -> list[Rational]:
        return [self.entries[i][i] for i in range(self.size)]

    def entry(self, alpha: Sequence[int], beta: Sequence[int]) -> Rational:
        idx = {a: i for i, a in enumerate(self.basis)}
        return self.entries[idx[tuple(alpha)]][idx[tuple(beta)]]

    def leading_block(self, degree: int) -> "CalabiMatrix":
        """Rows and columns of monomials of degree ``<= degree``."""
        n = sum(1 for a in self.basis if sum(a) <= degree)
        return CalabiMatrix(
            self.basis[:n], tuple(row[:n] for row in self.entries[:n]), degree, self.names
        )

    def permuted(self, order: Sequence[int]) -> "CalabiMatrix":
        return CalabiMatrix(
            tuple(self.basis[i] for i in order),
            tuple(tuple(self.entries[i][j] for j in order) for i in order),
            self.degree,
            self.names,
        )


def diastasis_at_origin(phi: BiSeries) -> BiSeries:
    """``D_0(z, zeta) = phi(z, zeta) - phi(z, 0) - phi(0, zeta) + phi(0, 0)``.

    On coefficients this deletes every purely holomorphic or purely
    antiholomorphic term, the constant included.
    """
    zero = (0,) * phi.var_count
    return phi.map_terms(lambda a, b: a != zero and b != zero)


def monomial_basis(var_count: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of degree ``0..degree`` in graded-lex order.

    Within a degree, a larger exponent of an earlier variable comes first:
    ``1, z1, z2, z1^2, z1*z2, z2^2, ...``.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    out = []
    for d in range(degree + 1):
        block = []
        for combo in combinations_with_replacement(range(var_count), d):
            e = [0] * var_count
            for i in combo:
                e[i] += 1
            block.append(tuple(e))
        block.sort(reverse=True)
        out.extend(block)
    return out


def calabi_matrix(d0: BiSeries, degree: int, names: Sequence[str] | None = None) -> CalabiMatrix:
    """Coefficients of ``exp(d0) - 1`` over the graded-lex basis up to ``degree``."""
    if d0.cutoff < degree:
        raise IndexError(f"series cutoff {d0.cutoff} is smaller than matrix degree {degree}")
    e = series_exp(d0)
    basis = monomial_basis(d0.var_count, degree)
    one = mpq(1)
    rows = []
    for a in basis:
        row = []
        for b in basis:
            c = e.coefficient(a, b)
            if not any(a) and not any(b):
                c -= one
            row.append(c)
        rows.append(tuple(row))
    return CalabiMatrix(tuple(basis), tuple(rows), degree, tuple(names) if names else None)


def catalog_matrix(spec: MetricSpec, degree: int) -> CalabiMatrix:
    """Calabi matrix of a catalog metric on all its variables."""
    d0 = diastasis_at_origin(extension(spec, degree))
    return calabi_matrix(d0, degree, spec.variable_names)


def psd_check(matrix: CalabiMatrix) -> Verdict:
    """Exact positive-semidefiniteness test by symmetric elimination in basis order.

    A negative diagonal entry is reported first.  Otherwise each pivot of the
    running Schur complement is inspected: a negative pivot yields the negative
    principal minor on the pivots used so far; a zero pivot with a nonzero
    entry in its residual row yields the 2x2 violation ``[[0, x], [x, d]]``
    bordered by the earlier pivots.
    """
    n = matrix.size
    for i, d in enumerate(matrix.diagonal()):
        if d < 0:
            return ObstructedDiagonal(matrix.basis[i], d)

    work = [list(row) for row in matrix.entries]
    used: list[int] = []
    pivot_product = mpq(1)
    rank = 0
    for i in range(n):
        p = work[i][i]
        if p < 0:
            idx = tuple(used + [i])
            return ObstructedMinor(_leading(idx), pivot_product * p, idx)
        if p == 0:
            j = next((j for j in range(i + 1, n) if work[i][j]), None)
            if j is None:
                continue
            x = work[i][j]
            idx = tuple(sorted(used + [i, j]))
            return ObstructedMinor(_leading(idx), -pivot_product * x * x, idx)
        used.append(i)
        pivot_product *= p
        rank += 1
        row_i = work[i]
        inv = 1 / p
        for r in range(i + 1, n):
            f = work[r][i]
            if not f:
                continue
            f = f * inv
            row_r = work[r]
            for c in range(i + 1, n):
                if row_i[c]:
                    row_r[c] -= f * row_i[c]
    return NoObstructionUpTo(matrix.degree, rank)


def _leading(idx: tuple[int, ...]) -> int:
    return len(idx) if idx == tuple(range(len(idx))) else 0


def diagonal_entry(spec: MetricSpec, i: int, k: int) -> Rational:
    """Coefficient of ``z_i^k zeta_i^k`` in ``exp(D_0)`` (0-based variable index)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    V = spec.var_count
    if not 0 <= i < V:
        raise ValueError(f"variable index {i} out of range for {spec}")
    d0 = diastasis_at_origin(extension(spec, k, variables=[i]))
    e = [0] * V
    e[i] = k
    return series_exp(d0).coefficient(e, e)


def diagonal_derivative(spec: MetricSpec, i: int, k: int) -> Rational:
    """``d^{2k} exp(D_0) / dz_i^k dzbar_i^k`` at the origin, i.e. ``(k!)^2`` times the entry."""
    return diagonal_entry(spec, i, k) * factorial(k) ** 2


def first_obstruction(spec: MetricSpec, max_degree: int) -> Verdict:
    """First negative diagonal entry in basis order, else the full PSD verdict.

    Diagonal entries are gathered per support set of the monomial, so the
    scan never needs more variables than the monomial uses; the full matrix
    is only built when no diagonal obstruction exists up to ``max_degree``.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    V = spec.var_count
    cache: dict[frozenset, BiSeries] = {}
    for alpha in monomial_basis(V, max_degree)[1:]:
        support = frozenset(i for i, e in enumerate(alpha) if e)
        e = cache.get(support)
        if e is None:
            e = series_exp(diastasis_at_origin(extension(spec, max_degree, variables=support)))
            cache[support] = e
        d = e.coefficient(alpha, alpha)
        if d < 0:
            return ObstructedDiagonal(alpha, d)
    return psd_check(catalog_matrix(spec, max_degree))
