from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from calabi.series import (
    ArityError,
    BiSeries,
    DegenerateReversionError,
    Jet,
    SeriesDomainError,
    ShapeError,
    as_rational,
    coefficient,
    format_rational,
    implicit_series_solve,
    jet_compose,
    series_exp,
    series_log,
    series_reciprocal,
)


def z(V, D, i):
    return BiSeries.z(V, D, i)


def zeta(V, D, i):
    return BiSeries.zeta(V, D, i)


def exp_by_powers(s):
    """Reference exponential: sum of s^k / k! for k <= 2D."""
    out = BiSeries.one(s.var_count, s.cutoff)
    power = BiSeries.one(s.var_count, s.cutoff)
    for k in range(1, 2 * s.cutoff + 1):
        power = power * s
        out = out + power * Fraction(1, factorial(k))
    return out


def log_by_powers(s):
    h = s - 1
    out = BiSeries.zero(s.var_count, s.cutoff)
    power = BiSeries.one(s.var_count, s.cutoff)
    for k in range(1, 2 * s.cutoff + 1):
        power = power * h
        out = out + power * Fraction((-1) ** (k + 1), k)
    return out


@st.composite
def series(draw, V=2, D=2, constant=None):
    terms = {}
    n = draw(st.integers(0, 6))
    for _ in range(n):
        a = tuple(draw(st.integers(0, D)) for _ in range(V))
        b = tuple(draw(st.integers(0, D)) for _ in range(V))
        c = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
        terms[(a, b)] = c
    s = BiSeries.from_terms(V, D, terms)
    if constant is not None:
        s = s - s.constant_term + constant
    return s


# -- construction and storage ----------------------------------------------


def test_rational_helpers():
    assert as_rational("3/4") == Fraction(3, 4)
    assert as_rational(Fraction(-1, 2)) == Fraction(-1, 2)
    assert format_rational(Fraction(-2, 4)) == "-1/2"
    assert format_rational(5) == "5"
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_zero_coefficients_are_not_stored():
    s = BiSeries.from_terms(1, 2, {((1,), (1,)): 0, ((0,), (0,)): 1})
    assert len(s) == 1
    assert len(z(1, 2, 0) - z(1, 2, 0)) == 0


def test_out_of_box_terms_are_dropped():
    s = BiSeries.from_terms(1, 2, {((3,), (0,)): 1, ((2,), (2,)): 1})
    assert s.to_dict() == {((2,), (2,)): 1}


def test_coefficient_lookup_and_range():
    s = 1 + z(1, 3, 0) * zeta(1, 3, 0)
    assert coefficient(s, (0,), (0,)) == 1
    assert coefficient(s, (1,), (1,)) == 1
    assert coefficient(s, (2,), (1,)) == 0
    with pytest.raises(IndexError):
        coefficient(s, (4,), (0,))


def test_coefficient_of_exp():
    s = z(1, 3, 0) * zeta(1, 3, 0)
    assert coefficient(series_exp(s), (2,), (2,)) == Fraction(1, 2)


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        z(1, 2, 0) + z(2, 2, 0)
    with pytest.raises(ShapeError):
        z(1, 2, 0) * z(1, 3, 0)
    with pytest.raises(ShapeError):
        BiSeries.from_terms(2, 2, {((1,), (0, 0)): 1})


# -- ring operations --------------------------------------------------------


def test_difference_of_squares():
    s = z(1, 4, 0) * zeta(1, 4, 0)
    assert (1 + s) * (1 - s) == 1 - s * s


def test_additive_identity():
    s = 3 + z(2, 2, 1) * zeta(2, 2, 0) * Fraction(2, 7)
    assert s + BiSeries.zero(2, 2) == s


def test_four_term_product():
    # (1 + z1 w1)(1 + zeta1 omega1), variables z1=0, w1=1
    V, D = 2, 2
    s = (1 + z(V, D, 0) * z(V, D, 1)) * (1 + zeta(V, D, 0) * zeta(V, D, 1))
    assert s.coefficient((1, 1), (1, 1)) == 1
    assert len(s) == 4


def test_product_respects_box():
    s = z(1, 2, 0) ** 2
    assert (s * z(1, 2, 0)).is_zero()


@settings(max_examples=40, deadline=None)
@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a + b) - b == a


@settings(max_examples=30, deadline=None)
@given(series(V=2, D=3), st.integers(1, 2))
def test_truncation_exactness(s, smaller):
    t = s * s + s
    assert t.truncate(smaller) == s.truncate(smaller) * s.truncate(smaller) + s.truncate(smaller)


# -- exp / log / reciprocal --------------------------------------------------


def test_exp_of_zero():
    assert series_exp(BiSeries.zero(2, 3)) == 1


def test_exp_diagonal():
    D = 5
    e = series_exp(z(1, D, 0) * zeta(1, D, 0))
    for k in range(D + 1):
        assert e.coefficient((k,), (k,)) == Fraction(1, factorial(k))


def test_exp_rejects_constant():
    with pytest.raises(SeriesDomainError):
        series_exp(1 + z(1, 2, 0))


@settings(max_examples=30, deadline=None)
@given(series(V=2, D=2, constant=0))
def test_exp_matches_powering(s):
    assert series_exp(s) == exp_by_powers(s)


@settings(max_examples=30, deadline=None)
@given(series(V=2, D=2, constant=1))
def test_log_matches_powering(s):
    assert series_log(s) == log_by_powers(s)


def test_log_of_one():
    assert series_log(BiSeries.one(1, 3)).is_zero()


def test_mercator():
    D = 6
    L = series_log(1 + z(1, D, 0) * zeta(1, D, 0))
    for k in range(1, D + 1):
        assert L.coefficient((k,), (k,)) == Fraction((-1) ** (k + 1), k)


def test_log_two_variables():
    V, D = 2, 2
    s = 1 + z(V, D, 0) * zeta(V, D, 0) + z(V, D, 1) * zeta(V, D, 1)
    assert series_log(s).coefficient((1, 1), (1, 1)) == -1


def test_log_rejects_bad_constant():
    with pytest.raises(SeriesDomainError):
        series_log(2 + z(1, 2, 0))
    with pytest.raises(SeriesDomainError):
        series_log(z(1, 2, 0))


@settings(max_examples=30, deadline=None)
@given(series(V=2, D=2, constant=0))
def test_log_exp_roundtrip(s):
    assert series_log(series_exp(s)) == s


@settings(max_examples=30, deadline=None)
@given(series(V=2, D=2, constant=1))
def test_exp_log_roundtrip(s):
    assert series_exp(series_log(s)) == s


def test_reciprocal_examples():
    D = 4
    assert series_reciprocal(BiSeries.one(1, D)) == 1
    g = series_reciprocal(1 - z(1, D, 0) * zeta(1, D, 0))
    for k in range(D + 1):
        assert g.coefficient((k,), (k,)) == 1
    V = 2
    den = (1 + z(V, D, 0) * z(V, D, 1)) * (1 + zeta(V, D, 0) * zeta(V, D, 1))
    assert series_reciprocal(den).coefficient((1, 1), (0, 0)) == -1


@settings(max_examples=30, deadline=None)
@given(series(V=2, D=3, constant=1))
def test_reciprocal_identity(s):
    assert series_reciprocal(s) * s == 1


def test_reciprocal_rejects_bad_constant():
    with pytest.raises(SeriesDomainError):
        series_reciprocal(BiSeries.zero(1, 2))


# -- jets and composition ----------------------------------------------------


def test_jet_basics():
    j = Jet.from_derivatives([0, 1, Fraction(-1, 2), Fraction(3, 4)])
    assert j.order == 3
    assert j.coeffs[2] == Fraction(-1, 4)
    assert j.derivative(3) == Fraction(3, 4)


def test_compose_identity_jet():
    D = 3
    s = z(1, D, 0) * zeta(1, D, 0)
    ident = Jet([0, 1] + [0] * (2 * D - 1))
    assert jet_compose(ident, 1 + s) == s


def test_compose_lee2_second_coefficient():
    D = 3
    f = Jet.from_derivatives([0, 1, Fraction(-1, 2), Fraction(3, 4), Fraction(-15, 8), 0, 0])
    out = jet_compose(f, 1 + z(1, D, 0) * zeta(1, D, 0))
    assert out.coefficient((2,), (2,)) == Fraction(-1, 4)


def test_compose_log_jet_agrees_with_series_log():
    D = 4
    log_jet = Jet([0] + [Fraction((-1) ** (k + 1), k) for k in range(1, 2 * D + 1)])
    V = 2
    g = 1 + z(V, D, 0) * zeta(V, D, 0) + z(V, D, 1) * zeta(V, D, 0) * Fraction(1, 3) - z(V, D, 0)
    assert jet_compose(log_jet, g) == series_log(g)


def test_compose_errors():
    D = 2
    s = 1 + z(1, D, 0) * zeta(1, D, 0)
    with pytest.raises(SeriesDomainError):
        jet_compose(Jet([0, 1, 0, 0, 0]), s + 1)
    with pytest.raises(ArityError):
        jet_compose(Jet([0, 1, 0]), s)


# -- implicit solving ------------------------------------------------------------


def test_implicit_identity_system():
    V, D = 1, 3
    s = z(V, D, 0) * zeta(V, D, 0)
    (x,) = implicit_series_solve(lambda xs: [xs[0] - s], [0], V, D)
    assert x == s


def taubnut_residual(m, s, t):
    m = Fraction(m)

    def residual(xs):
        x, y = xs
        return [x * series_exp((x + y) * (2 * m)) - s, y * series_exp((y - x) * (2 * m)) - t]

    return residual


def test_implicit_taubnut_m0_is_flat():
    V, D = 2, 3
    s = z(V, D, 0) * zeta(V, D, 0)
    t = z(V, D, 1) * zeta(V, D, 1)
    x, y = implicit_series_solve(taubnut_residual(0, s, t), [0, 0], V, D)
    assert x == s and y == t


def test_implicit_taubnut_second_order():
    # hand reversion: x = s - 2m s(s + t), y = t - 2m t(t - s)
    V, D = 2, 2
    m = Fraction(3, 7)
    s = z(V, D, 0) * zeta(V, D, 0)
    t = z(V, D, 1) * zeta(V, D, 1)
    x, y = implicit_series_solve(taubnut_residual(m, s, t), [0, 0], V, D)
    def low(u):
        return u.map_terms(lambda a, b: sum(a) + sum(b) <= 4)

    assert low(x) == low(s - s * (s + t) * (2 * m))
    assert low(y) == low(t - t * (t - s) * (2 * m))


def test_implicit_degenerate():
    V, D = 1, 2
    s = z(V, D, 0) * zeta(V, D, 0)
    with pytest.raises(DegenerateReversionError) as info:
        implicit_series_solve(lambda xs: [xs[0] * xs[0] - s], [0], V, D)
    assert info.value.degree == 2
