"""Taylor jets at N = 1 of the profile functions of the Ricci-flat lee2 and lee3 metrics.

Both families are governed by an implicit ODE of the shape

    (2N - 1) N^a (f')^p + 2 (N - 1) N^(a+1) (f')^(p-1) f'' = 1

with ``(a, p) = (n - 1, 2n)`` on M_II^{2n} and ``(2n - 2, 4n)`` on M_III^{4n}.
The jet is extracted by substituting the truncated Taylor polynomial of ``f``
into the left-hand side as a series in ``x = N - 1``; every new coefficient
enters linearly, so one exact division per order suffices.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from gmpy2 import mpq

from .series import ArityError, BiSeries, Jet, Rational, SeriesError, as_rational

__all__ = [
    "OdeTerm",
    "ImplicitProfileODE",
    "DegenerateJetError",
    "lee2_ode",
    "lee3_ode",
    "solve_profile_jet",
    "mii_closed_jet",
    "ode_residual",
    "bell_bracket",
]


class DegenerateJetError(SeriesError):
    def __init__(self, order: int):
        self.order = order
        super().__init__(f"degenerate jet recursion at order {order}")


@dataclass(frozen=True)
class OdeTerm:
    """``poly(N) * (f')^p * (f'')^q``; ``poly`` lists coefficients of ``N^0, N^1, ...``."""

    poly: tuple[Rational, ...]
    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q not in (0, 1):
            raise ValueError(f"unsupported term exponents p={self.p}, q={self.q}")
        object.__setattr__(self, "poly", tuple(as_rational(c) for c in self.poly))

    def poly_at(self, value) -> Rational:
        value = as_rational(value)
        return sum((c * value**i for i, c in enumerate(self.poly)), mpq(0))


@dataclass(frozen=True)
class ImplicitProfileODE:
    terms: tuple[OdeTerm, ...]
    rhs: Rational = mpq(1)
    name: str = ""

    def evaluate_at_basepoint(self, fprime, fsecond=0) -> Rational:
        """Left-hand side at ``N = 1`` for given values of ``f'`` and ``f''``."""
        fprime, fsecond = as_rational(fprime), as_rational(fsecond)
        return sum(
            (t.poly_at(1) * fprime**t.p * fsecond**t.q for t in self.terms), mpq(0)
        )


def _poly_mul(a, b):
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def _monomial(k):
    return tuple([mpq(0)] * k + [mpq(1)])


def _lee_ode(a: int, p: int, name: str) -> ImplicitProfileODE:
    first = _poly_mul((mpq(-1), mpq(2)), _monomial(a))
    second = _poly_mul((mpq(-2), mpq(2)), _monomial(a + 1))
    return ImplicitProfileODE(
        terms=(OdeTerm(first, p, 0), OdeTerm(second, p - 1, 1)), name=name
    )


def lee2_ode(n: int) -> ImplicitProfileODE:
    """Profile ODE of the Ricci-flat metric on M_II^{2n}."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return _lee_ode(n - 1, 2 * n, f"lee2(n={n})")


def lee3_ode(n: int) -> ImplicitProfileODE:
    """Profile ODE of the Ricci-flat metric on M_III^{4n}."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return _lee_ode(2 * n - 2, 4 * n, f"lee3(n={n})")


def _lhs(ode: ImplicitProfileODE, coeffs, order: int) -> list[Rational]:
    """Left-hand side as a series in x = N - 1, exact through x^order."""
    x = BiSeries.z(1, order, 0)
    zero = (0,)
    fp = BiSeries.zero(1, order)
    fpp = BiSeries.zero(1, order)
    for k in range(1, len(coeffs)):
        if k - 1 <= order:
            fp = fp + x ** (k - 1) * (coeffs[k] * k)
        if 2 <= k and k - 2 <= order:
            fpp = fpp + x ** (k - 2) * (coeffs[k] * k * (k - 1))
    # poly(N) re-expanded around N = 1
    total = BiSeries.zero(1, order)
    one_plus_x = 1 + x
    for term in ode.terms:
        poly = sum((one_plus_x**i * c for i, c in enumerate(term.poly) if c), BiSeries.zero(1, order))
        piece = poly * fp**term.p
        if term.q:
            piece = piece * fpp
        total = total + piece
    return [total.coefficient((j,), zero) for j in range(order + 1)]


def solve_profile_jet(ode: ImplicitProfileODE, order: int) -> Jet:
    """Jet of order ``order`` at N = 1 with ``f(1) = 0`` and ``f'(1) = 1``.

    Coefficient ``c_{j+1}`` is fixed by the ``x^j`` equation for ``j >= 1``;
    the ``x^0`` equation only checks the root ``f'(1) = 1``.
    """
    if order < 1:
        raise ArityError("jet order must be >= 1")
    if ode.evaluate_at_basepoint(1) != ode.rhs:
        raise DegenerateJetError(1)
    coeffs = [mpq(0), mpq(1)]
    for j in range(1, order):
        trial = coeffs + [mpq(0)]
        base = _lhs(ode, trial, j)[j]
        trial[-1] = mpq(1)
        slope = _lhs(ode, trial, j)[j] - base
        if not slope:
            raise DegenerateJetError(j + 1)
        coeffs.append(-base / slope)
    return Jet(coeffs, basepoint=1)


def mii_closed_jet(order: int) -> Jet:
    """Jet of ``f`` with ``f' = N^(-1/2)`` and ``f(1) = 0``."""
    if order < 1:
        raise ArityError("jet order must be >= 1")
    derivs = [mpq(0)]
    value = mpq(1)
    derivs.append(value)
    for i in range(order - 1):
        value *= mpq(-1, 2) - i
        derivs.append(value)
    return Jet.from_derivatives(derivs)


def ode_residual(ode: ImplicitProfileODE, jet: Jet) -> tuple[Rational, ...]:
    """Coefficients of the ODE left-hand side on ``jet``, through ``(N-1)^(K-2)``."""
    if jet.order < 2:
        raise ArityError("residual needs a jet of order >= 2")
    if jet.basepoint != 1:
        raise ValueError("profile jets are taken at N = 1")
    return tuple(_lhs(ode, list(jet.coeffs), jet.order - 2))


def bell_bracket(jet: Jet, k: int) -> Rational:
    """``e^{-f} d^k/dt^k e^{f(1+t)}`` at ``t = 0``: the complete Bell polynomial in f', f'', ...

    Computed through the recurrence ``B_{m+1} = sum_i C(m, i) f^{(i+1)} B_{m-i}``.
    """
    if jet.order < k:
        raise ArityError(f"bracket of order {k} needs a jet of order >= {k}")
    d = jet.derivatives()
    bell = [mpq(1)]
    for m in range(k):
        acc = mpq(0)
        for i in range(m + 1):
            acc += factorial(m) // (factorial(i) * factorial(m - i)) * d[i + 1] * bell[m - i]
        bell.append(acc)
    return bell[k]
