"""Exact truncated power series in paired holomorphic/antiholomorphic variables.

A :class:`BiSeries` is a finite sum ``sum c[a, b] z^a zeta^b`` where ``z`` and
``zeta`` are two blocks of ``var_count`` variables each and the exponent
vectors satisfy ``|a| <= cutoff`` and ``|b| <= cutoff``.  The box is closed
under multiplication (degrees on each side only add), so every coefficient
kept is the exact coefficient of the infinite series.

Coefficients are :class:`gmpy2.mpq` rationals.  Internally each index pair is
packed into a single integer so that multiplying monomials is integer
addition; the packing base ``2*cutoff + 1`` guarantees no carries.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

Rational = type(mpq(0))

__all__ = [
    "Rational",
    "as_rational",
    "format_rational",
    "SeriesError",
    "ShapeError",
    "SeriesDomainError",
    "ArityError",
    "DegenerateReversionError",
    "BiSeries",
    "Jet",
    "series_exp",
    "series_log",
    "series_reciprocal",
    "jet_compose",
    "implicit_series_solve",
    "coefficient",
]

ZERO = mpq(0)
ONE = mpq(1)


def as_rational(x) -> Rational:
    """Convert an int, Fraction, mpq or ``"p/q"`` string to an exact rational."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact coefficients")
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(x.strip())
    return mpq(x)


def format_rational(x) -> str:
    """Lossless ``p/q`` (or ``p``) string for a rational."""
    return str(as_rational(x))


class SeriesError(ValueError):
    pass


class ShapeError(SeriesError):
    pass


class SeriesDomainError(SeriesError):
    pass


class ArityError(SeriesError):
    pass


class DegenerateReversionError(SeriesError):
    def __init__(self, degree: int, message: str = ""):
        self.degree = degree
        super().__init__(message or f"degenerate reversion at degree {degree}")


class _Layout:
    """Packing of index pairs (a, b) into integers for a fixed (var_count, cutoff)."""

    _cache: dict = {}

    def __new__(cls, var_count: int, cutoff: int):
        key = (var_count, cutoff)
        inst = cls._cache.get(key)
        if inst is None:
            inst = super().__new__(cls)
            inst.var_count = var_count
            inst.cutoff = cutoff
            inst.base = 2 * cutoff + 1
            inst.half = inst.base ** var_count
            inst._degree_cache = {}
            cls._cache[key] = inst
        return inst

    def encode_side(self, exps: Sequence[int]) -> int:
        code = 0
        for e in reversed(exps):
            code = code * self.base + e
        return code

    def decode_side(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.var_count):
            code, e = divmod(code, self.base)
            out.append(e)
        return tuple(out)

    def encode(self, alpha: Sequence[int], beta: Sequence[int]) -> int:
        return self.encode_side(alpha) + self.half * self.encode_side(beta)

    def decode(self, key: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        b, a = divmod(key, self.half)
        return self.decode_side(a), self.decode_side(b)

    def bidegree(self, key: int) -> tuple[int, int]:
        deg = self._degree_cache.get(key)
        if deg is None:
            a, b = self.decode(key)
            deg = (sum(a), sum(b))
            self._degree_cache[key] = deg
        return deg


def _check_index(exps: Sequence[int], var_count: int) -> tuple[int, ...]:
    exps = tuple(int(e) for e in exps)
    if len(exps) != var_count:
        raise ShapeError(f"multi-index {exps} has length {len(exps)}, expected {var_count}")
    if any(e < 0 for e in exps):
        raise ShapeError(f"negative exponent in {exps}")
    return exps


class BiSeries:
    """Truncated series in ``z_1..z_V`` and ``zeta_1..zeta_V`` with box cutoff ``D``.

    Instances are immutable.  Build them with :meth:`from_terms`,
    :meth:`constant`, :meth:`z` and :meth:`zeta`, then combine with ``+``,
    ``-``, ``*`` and ``**``.

    >>> s = BiSeries.z(1, 2, 0) * BiSeries.zeta(1, 2, 0)
    >>> (1 + s) * (1 - s) == 1 - s * s
    True
    """

    __slots__ = ("var_count", "cutoff", "_layout", "_terms", "_graded")

    def __init__(self, var_count: int, cutoff: int, _terms: dict | None = None):
        if var_count < 1:
            raise ShapeError("var_count must be >= 1")
        if cutoff < 0:
            raise ShapeError("cutoff must be >= 0")
        self.var_count = var_count
        self.cutoff = cutoff
        self._layout = _Layout(var_count, cutoff)
        self._terms = {} if _terms is None else _terms
        self._graded = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_terms(cls, var_count: int, cutoff: int, terms: Mapping) -> "BiSeries":
        """Series from a mapping ``{(alpha, beta): coefficient}``.

        Terms outside the box are discarded; repeated keys are not possible in
        a mapping, zero coefficients are dropped.
        """
        layout = _Layout(var_count, cutoff)
        out = {}
        for (alpha, beta), c in terms.items():
            alpha = _check_index(alpha, var_count)
            beta = _check_index(beta, var_count)
            if sum(alpha) > cutoff or sum(beta) > cutoff:
                continue
            c = as_rational(c)
            if c:
                key = layout.encode(alpha, beta)
                out[key] = out.get(key, ZERO) + c
        return cls(var_count, cutoff, {k: v for k, v in out.items() if v})

    @classmethod
    def zero(cls, var_count: int, cutoff: int) -> "BiSeries":
        return cls(var_count, cutoff)

    @classmethod
    def constant(cls, var_count: int, cutoff: int, value) -> "BiSeries":
        value = as_rational(value)
        return cls(var_count, cutoff, {0: value} if value else {})

    @classmethod
    def one(cls, var_count: int, cutoff: int) -> "BiSeries":
        return cls.constant(var_count, cutoff, 1)

    @classmethod
    def z(cls, var_count: int, cutoff: int, i: int) -> "BiSeries":
        """The holomorphic variable ``z_i`` (0-based index)."""
        alpha = [0] * var_count
        alpha[i] = 1
        return cls.from_terms(var_count, cutoff, {(tuple(alpha), (0,) * var_count): 1})

    @classmethod
    def zeta(cls, var_count: int, cutoff: int, i: int) -> "BiSeries":
        """The antiholomorphic (conjugate) variable ``zeta_i`` (0-based index)."""
        beta = [0] * var_count
        beta[i] = 1
        return cls.from_terms(var_count, cutoff, {((0,) * var_count, tuple(beta)): 1})

    # -- inspection -------------------------------------------------------

    def __len__(self) -> int:
        return len(self._terms)

    def items(self) -> Iterator[tuple[tuple[tuple[int, ...], tuple[int, ...]], Rational]]:
        decode = self._layout.decode
        for key, c in self._terms.items():
            yield decode(key), c

    def to_dict(self) -> dict:
        return dict(self.items())

    def coefficient(self, alpha: Sequence[int], beta: Sequence[int]) -> Rational:
        alpha = _check_index(alpha, self.var_count)
        beta = _check_index(beta, self.var_count)
        if sum(alpha) > self.cutoff or sum(beta) > self.cutoff:
            raise IndexError(
                f"index ({alpha}, {beta}) lies outside the cutoff box D={self.cutoff}"
            )
        return self._terms.get(self._layout.encode(alpha, beta), ZERO)

    @property
    def constant_term(self) -> Rational:
        return self._terms.get(0, ZERO)

    def min_total_degree(self) -> int | None:
        """Smallest ``|alpha| + |beta|`` among stored terms, None for the zero series."""
        if not self._terms:
            return None
        return min(sum(bd) for bd in self._grades())

    def is_zero(self) -> bool:
        return not self._terms

    # -- structural maps --------------------------------------------------

    def map_terms(self, keep: Callable[[tuple[int, ...], tuple[int, ...]], bool]) -> "BiSeries":
        decode = self._layout.decode
        return BiSeries(
            self.var_count,
            self.cutoff,
            {k: c for k, c in self._terms.items() if keep(*decode(k))},
        )

    def restrict(self, variables: Iterable[int]) -> "BiSeries":
        """Set every variable pair not listed in ``variables`` to zero."""
        keep = set(variables)
        drop = [i for i in range(self.var_count) if i not in keep]
        return self.map_terms(
            lambda a, b: all(a[i] == 0 and b[i] == 0 for i in drop)
        )

    def truncate(self, cutoff: int) -> "BiSeries":
        """Restrict to the smaller box ``|alpha|, |beta| <= cutoff``."""
        if cutoff > self.cutoff:
            raise ShapeError("cannot extend a truncated series to a larger cutoff")
        return BiSeries.from_terms(
            self.var_count,
            cutoff,
            {ab: c for ab, c in self.items() if sum(ab[0]) <= cutoff and sum(ab[1]) <= cutoff},
        )

    def swap_sides(self) -> "BiSeries":
        """Exchange the roles of ``z`` and ``zeta`` (formal conjugation for real data)."""
        return BiSeries.from_terms(
            self.var_count, self.cutoff, {(b, a): c for (a, b), c in self.items()}
        )

    def substitute_permutation(self, perm: Sequence[int]) -> "BiSeries":
        """Rename variable ``i`` to ``perm[i]`` on both sides."""
        def move(e):
            out = [0] * self.var_count
            for i, x in enumerate(e):
                out[perm[i]] = x
            return out

        return BiSeries.from_terms(
            self.var_count, self.cutoff, {(tuple(move(a)), tuple(move(b))): c for (a, b), c in self.items()}
        )

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "BiSeries":
        if isinstance(other, BiSeries):
            if other.var_count != self.var_count or other.cutoff != self.cutoff:
                raise ShapeError(
                    f"series shapes differ: (V={self.var_count}, D={self.cutoff}) vs "
                    f"(V={other.var_count}, D={other.cutoff})"
                )
            return other
        if isinstance(other, (int, Fraction, Rational, str)):
            return BiSeries.constant(self.var_count, self.cutoff, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, ZERO) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return BiSeries(self.var_count, self.cutoff, out)

    __radd__ = __add__

    def __neg__(self):
        return BiSeries(self.var_count, self.cutoff, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, factor) -> "BiSeries":
        factor = as_rational(factor)
        if not factor:
            return BiSeries(self.var_count, self.cutoff)
        return BiSeries(self.var_count, self.cutoff, {k: c * factor for k, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Rational)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict = {}
        for grade in _product_grades(self, other, self.cutoff):
            _accumulate(acc, *grade)
        return BiSeries(self.var_count, self.cutoff, {k: v for k, v in acc.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise SeriesDomainError("only non-negative integer powers are supported")
        result = BiSeries.one(self.var_count, self.cutoff)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Rational)):
            other = BiSeries.constant(self.var_count, self.cutoff, other)
        if not isinstance(other, BiSeries):
            return NotImplemented
        return (
            self.var_count == other.var_count
            and self.cutoff == other.cutoff
            and self._terms == other._terms
        )

    __hash__ = None

    def __repr__(self):
        if not self._terms:
            body = "0"
        else:
            parts = []
            for (a, b), c in sorted(self.items(), key=lambda t: (sum(t[0][0]) + sum(t[0][1]), t[0]))[:8]:
                parts.append(f"{c}*{_monomial_repr(a, b)}")
            body = " + ".join(parts) + (" + ..." if len(self._terms) > 8 else "")
        return f"BiSeries(V={self.var_count}, D={self.cutoff}: {body})"

    # -- graded views -----------------------------------------------------

    def _grades(self) -> dict:
        """Terms bucketed by bidegree ``(|alpha|, |beta|)``; cached."""
        if self._graded is None:
            graded: dict = {}
            bidegree = self._layout.bidegree
            for k, c in self._terms.items():
                graded.setdefault(bidegree(k), []).append((k, c))
            self._graded = graded
        return self._graded


def _monomial_repr(a, b) -> str:
    parts = [f"z{i + 1}^{e}" for i, e in enumerate(a) if e] + [
        f"zeta{i + 1}^{e}" for i, e in enumerate(b) if e
    ]
    return "*".join(parts) or "1"


def _accumulate(acc: dict, left: list, right: list, factor=None) -> None:
    get = acc.get
    if factor is None:
        for ka, ca in left:
            for kb, cb in right:
                k = ka + kb
                acc[k] = get(k, ZERO) + ca * cb
    else:
        for ka, ca in left:
            ca = ca * factor
            for kb, cb in right:
                k = ka + kb
                acc[k] = get(k, ZERO) + ca * cb


def _product_grades(a: BiSeries, b: BiSeries, cutoff: int):
    gb = b._grades()
    for (p1, q1), left in a._grades().items():
        for (p2, q2), right in gb.items():
            if p1 + p2 <= cutoff and q1 + q2 <= cutoff:
                yield left, right


class _Graded:
    """Series split by total degree ``|alpha| + |beta|``, each part bucketed by bidegree.

    Used by the degree-recursive algorithms (exp, log, reciprocal): the
    coefficient of total degree ``t`` only depends on strictly lower parts.
    """

    def __init__(self, var_count: int, cutoff: int):
        self.var_count = var_count
        self.cutoff = cutoff
        self.parts: list[dict] = [dict() for _ in range(2 * cutoff + 1)]

    @classmethod
    def of(cls, s: BiSeries) -> "_Graded":
        g = cls(s.var_count, s.cutoff)
        for bd, terms in s._grades().items():
            g.parts[bd[0] + bd[1]][bd] = list(terms)
        return g

    def set_part(self, t: int, acc: dict, layout: _Layout) -> None:
        buckets: dict = {}
        bidegree = layout.bidegree
        for k, c in acc.items():
            if c:
                buckets.setdefault(bidegree(k), []).append((k, c))
        self.parts[t] = buckets

    def convolve(self, other: "_Graded", t: int, weight=None, start: int = 1) -> dict:
        """Sum over ``j = start..t`` of ``w(j) * self_j * other_{t-j}`` as a raw dict."""
        acc: dict = {}
        cutoff = self.cutoff
        for j in range(start, t + 1):
            left_part = self.parts[j]
            right_part = other.parts[t - j]
            if not left_part or not right_part:
                continue
            factor = None if weight is None else mpq(weight(j))
            for (p1, q1), left in left_part.items():
                for (p2, q2), right in right_part.items():
                    if p1 + p2 <= cutoff and q1 + q2 <= cutoff:
                        _accumulate(acc, left, right, factor)
        return acc

    def to_series(self) -> BiSeries:
        terms = {}
        for part in self.parts:
            for bucket in part.values():
                for k, c in bucket:
                    terms[k] = c
        return BiSeries(self.var_count, self.cutoff, terms)


def series_exp(s: BiSeries) -> BiSeries:
    """Truncated ``exp(s)`` for a series with zero constant term.

    Uses the Euler-operator identity ``theta(E) = theta(s) * E`` graded by
    total degree, which reproduces ``sum s^k / k!`` exactly in the box.
    """
    if s.constant_term:
        raise SeriesDomainError("series_exp requires a zero constant term")
    layout = s._layout
    sg = _Graded.of(s)
    e = _Graded(s.var_count, s.cutoff)
    e.parts[0] = {(0, 0): [(0, ONE)]}
    for t in range(1, 2 * s.cutoff + 1):
        acc = sg.convolve(e, t, weight=lambda j: j)
        inv = mpq(1, t)
        e.set_part(t, {k: c * inv for k, c in acc.items()}, layout)
    return e.to_series()


def series_log(s: BiSeries) -> BiSeries:
    """Truncated ``log(s)`` for a series with constant term 1."""
    if s.constant_term != ONE:
        raise SeriesDomainError("series_log requires constant term 1")
    layout = s._layout
    sg = _Graded.of(s)
    sg.parts[0] = {}
    # dl holds theta(log s): theta(s) = s * theta(L)
    dl = _Graded(s.var_count, s.cutoff)
    for t in range(1, 2 * s.cutoff + 1):
        acc = {}
        for bucket in sg.parts[t].values():
            for k, c in bucket:
                acc[k] = c * t
        for k, c in sg.convolve(dl, t, start=1).items():
            acc[k] = acc.get(k, ZERO) - c
        dl.set_part(t, acc, layout)
    out = {}
    for t, part in enumerate(dl.parts):
        if t == 0:
            continue
        inv = mpq(1, t)
        for bucket in part.values():
            for k, c in bucket:
                out[k] = c * inv
    return BiSeries(s.var_count, s.cutoff, out)


def series_reciprocal(s: BiSeries) -> BiSeries:
    """Truncated ``1/s`` for a series with constant term 1."""
    if s.constant_term != ONE:
        raise SeriesDomainError("series_reciprocal requires constant term 1")
    layout = s._layout
    sg = _Graded.of(s)
    sg.parts[0] = {}
    r = _Graded(s.var_count, s.cutoff)
    r.parts[0] = {(0, 0): [(0, ONE)]}
    for t in range(1, 2 * s.cutoff + 1):
        acc = sg.convolve(r, t)
        r.set_part(t, {k: -c for k, c in acc.items()}, layout)
    return r.to_series()


class Jet:
    """Taylor coefficients ``c_0..c_K`` of a univariate function at a basepoint.

    ``derivative(k)`` returns ``k! * c_k``.
    """

    __slots__ = ("basepoint", "coeffs")

    def __init__(self, coeffs: Iterable, basepoint=1):
        self.coeffs = tuple(as_rational(c) for c in coeffs)
        if not self.coeffs:
            raise ArityError("a jet needs at least one coefficient")
        self.basepoint = as_rational(basepoint)

    @classmethod
    def from_derivatives(cls, derivatives: Iterable, basepoint=1) -> "Jet":
        return cls(
            (as_rational(d) / factorial(k) for k, d in enumerate(derivatives)), basepoint
        )

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def derivative(self, k: int) -> Rational:
        return self.coeffs[k] * factorial(k)

    def derivatives(self) -> tuple[Rational, ...]:
        return tuple(self.derivative(k) for k in range(len(self.coeffs)))

    def truncate(self, order: int) -> "Jet":
        return Jet(self.coeffs[: order + 1], self.basepoint)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self.basepoint == other.basepoint and self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        return f"Jet(at={self.basepoint}, derivatives={[str(d) for d in self.derivatives()]})"


def jet_compose(f: Jet, g: BiSeries) -> BiSeries:
    """``sum_k c_k (g - basepoint)^k`` truncated to the box of ``g``."""
    if g.constant_term != f.basepoint:
        raise SeriesDomainError(
            f"constant term {g.constant_term} of the inner series differs from the jet "
            f"basepoint {f.basepoint}"
        )
    if f.order < 2 * g.cutoff:
        raise ArityError(
            f"jet of order {f.order} cannot saturate a box of cutoff {g.cutoff}; "
            f"need order >= {2 * g.cutoff}"
        )
    h = g - f.basepoint
    m = h.min_total_degree()
    top = 0 if m is None else min(f.order, (2 * g.cutoff) // m)
    acc = BiSeries.constant(g.var_count, g.cutoff, f.coeffs[top])
    for k in range(top - 1, -1, -1):
        acc = acc * h + f.coeffs[k]
    return acc


def coefficient(s: BiSeries, alpha: Sequence[int], beta: Sequence[int]) -> Rational:
    """Stored coefficient of ``z^alpha zeta^beta`` or exact zero; IndexError outside the box."""
    return s.coefficient(alpha, beta)


def _solve_linear(matrix: list[list[Rational]], rhs: list[Rational]) -> list[Rational] | None:
    """Gauss-Jordan over the rationals; None when the matrix is singular."""
    n = len(matrix)
    m = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                fac = m[r][col]
                m[r] = [x - fac * y for x, y in zip(m[r], m[col])]
    return [row[n] for row in m]


def implicit_series_solve(
    residual: Callable[[list[BiSeries]], Sequence[BiSeries]],
    initial: Sequence,
    var_count: int,
    cutoff: int,
) -> list[BiSeries]:
    """Solve ``residual(X) = 0`` for series unknowns ``X`` degree by degree.

    ``initial`` gives the constant terms of the unknowns.  The linear part of
    the system at the constant solution is recovered by probing with a
    degree-one monomial and must be invertible whenever a correction is
    required; each total degree is then fixed by one exact linear solve.

    Raises :class:`DegenerateReversionError` naming the first degree at which
    a correction was needed but the linear step is singular, or at which the
    system fails to be solvable degree by degree.
    """
    n = len(initial)
    xs = [BiSeries.constant(var_count, cutoff, c) for c in initial]
    base = list(residual(xs))
    if len(base) != n:
        raise ShapeError("number of relations must equal number of unknowns")
    for r in base:
        if r.constant_term:
            raise DegenerateReversionError(0, "initial values do not satisfy the system")
    if cutoff == 0:
        return xs

    probe = BiSeries.z(var_count, cutoff, 0)
    alpha1 = (1,) + (0,) * (var_count - 1)
    alpha0 = (0,) * var_count
    jac = [[ZERO] * n for _ in range(n)]
    for j in range(n):
        bumped = list(xs)
        bumped[j] = xs[j] + probe
        shifted = residual(bumped)
        for i in range(n):
            jac[i][j] = (shifted[i] - base[i]).coefficient(alpha1, alpha0)

    layout = _Layout(var_count, cutoff)
    current = base
    for t in range(1, 2 * cutoff + 1):
        parts = [
            {k: c for k, c in r._terms.items() if sum(layout.bidegree(k)) == t}
            for r in current
        ]
        keys = sorted(set().union(*parts))
        if not keys:
            continue
        updates = [dict() for _ in range(n)]
        for key in keys:
            sol = _solve_linear(jac, [-p.get(key, ZERO) for p in parts])
            if sol is None:
                raise DegenerateReversionError(t)
            for j, v in enumerate(sol):
                if v:
                    updates[j][key] = v
        xs = [x + BiSeries(var_count, cutoff, u) for x, u in zip(xs, updates)]
        current = list(residual(xs))
        if any(
            sum(layout.bidegree(k)) <= t for r in current for k in r._terms
        ):
            raise DegenerateReversionError(t, f"system is not triangular-solvable at degree {t}")
    return xs
