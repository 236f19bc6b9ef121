from fractions import Fraction as F

import pytest
import sympy as sp

from calabi.profile_ode import (
    DegenerateJetError,
    ImplicitProfileODE,
    OdeTerm,
    bell_bracket,
    lee2_ode,
    lee3_ode,
    mii_closed_jet,
    ode_residual,
    solve_profile_jet,
)
from calabi.series import Jet


def test_lee2_ode_terms():
    ode = lee2_ode(1)
    first, second = ode.terms
    assert (first.poly, first.p, first.q) == ((-1, 2), 2, 0)
    assert (second.poly, second.p, second.q) == ((0, -2, 2), 1, 1)
    ode = lee2_ode(2)
    assert ode.terms[0].poly == (0, -1, 2) and ode.terms[0].p == 4
    assert ode.terms[1].poly == (0, 0, -2, 2) and ode.terms[1].p == 3


def test_lee3_ode_terms():
    first, second = lee3_ode(1).terms
    assert (first.poly, first.p) == ((-1, 2), 4)
    assert (second.poly, second.p, second.q) == ((0, -2, 2), 3, 1)
    first, second = lee3_ode(2).terms
    assert (first.p, second.p, second.q) == (8, 7, 1)


@pytest.mark.parametrize("make", [lee2_ode, lee3_ode])
@pytest.mark.parametrize("n", [1, 2, 5])
def test_basepoint_evaluation(make, n):
    assert make(n).evaluate_at_basepoint(1, F(7, 3)) == 1


@pytest.mark.parametrize("make", [lee2_ode, lee3_ode])
def test_bad_n(make):
    with pytest.raises(ValueError):
        make(0)


def test_term_validation():
    with pytest.raises(ValueError):
        OdeTerm((1,), 1, 2)


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_lee2_jet(n):
    jet = solve_profile_jet(lee2_ode(n), 4)
    assert jet.derivatives() == (0, 1, F(-1, 2), F(3, 4), F(-15, 8))


def test_lee3_n1_jet():
    jet = solve_profile_jet(lee3_ode(1), 6)
    assert jet.derivatives()[2:] == (F(-1, 3), F(1, 2), F(-23, 18), F(493, 108), F(-2255, 108))


def test_lee3_n2_jet():
    jet = solve_profile_jet(lee3_ode(2), 4)
    assert jet.derivatives()[2:] == (F(-2, 5), F(29, 50), F(-36, 25))


@pytest.mark.parametrize("n", range(1, 11))
def test_lee3_formulas(n):
    d = solve_profile_jet(lee3_ode(n), 4).derivatives()
    assert d[2] == F(-n, 2 * n + 1)
    assert d[3] == F(6 * n**2 + 2 * n + 1, 2 * (2 * n + 1) ** 2)
    assert d[4] == F(-(30 * n**3 + 22 * n**2 + 15 * n + 2), 2 * (2 * n + 1) ** 3)


def test_closed_jet_against_symbolic_derivatives():
    N = sp.symbols("N")
    fp = N ** sp.Rational(-1, 2)
    expected = [0]
    for k in range(8):
        expected.append(sp.diff(fp, N, k).subs(N, 1))
    got = mii_closed_jet(8).derivatives()
    assert [F(str(e)) for e in expected] == list(got)
    assert got[5] == F(105, 16)


@pytest.mark.parametrize("n", range(1, 11))
@pytest.mark.parametrize("K", [2, 5, 8])
def test_lee2_jets_are_n_independent(n, K):
    assert solve_profile_jet(lee2_ode(n), K) == mii_closed_jet(K)


@pytest.mark.parametrize("make", [lee2_ode, lee3_ode])
@pytest.mark.parametrize("n", [1, 2, 4, 10])
@pytest.mark.parametrize("K", [2, 6, 8])
def test_residual_identity(make, n, K):
    ode = make(n)
    res = ode_residual(ode, solve_profile_jet(ode, K))
    assert res == (1,) + (0,) * (K - 2)


def test_residual_examples():
    assert ode_residual(lee2_ode(1), solve_profile_jet(lee2_ode(1), 6)) == (1, 0, 0, 0, 0)
    assert ode_residual(lee3_ode(1), Jet([0, 1, 0, 0]))[:2] == (1, 2)
    assert ode_residual(lee2_ode(2), mii_closed_jet(6)) == (1, 0, 0, 0, 0)


def test_residual_independent_of_solver():
    # the first-order condition 2n + (4n+2) f'' = 0, derived by hand
    for n in (1, 3):
        f2 = F(-2 * n, 4 * n + 2)
        jet = Jet.from_derivatives([0, 1, f2, 0])
        assert ode_residual(lee3_ode(n), jet)[1] == 0


def test_degenerate_recursion():
    # (f')^2 - 2(N-1) f' f'' = 1: slope of c_2 at order 1 is 2(2 - 2) = 0
    ode = ImplicitProfileODE((OdeTerm((1,), 2, 0), OdeTerm((2, -2), 1, 1)))
    with pytest.raises(DegenerateJetError) as info:
        solve_profile_jet(ode, 3)
    assert info.value.order == 2


def test_bell_brackets():
    jet = solve_profile_jet(lee2_ode(1), 4)
    assert bell_bracket(jet, 4) == F(-1, 8)
    jet = solve_profile_jet(lee3_ode(1), 6)
    assert [bell_bracket(jet, k) for k in (4, 5, 6)] == [F(1, 18), F(91, 108), F(-359, 108)]


def test_bell_bracket_against_explicit_polynomial():
    # f'^4 + 6 f'^2 f'' + 3 f''^2 + 4 f' f''' + f''''
    d = [0, F(2), F(-3, 5), F(7, 2), F(1, 9)]
    explicit = d[1] ** 4 + 6 * d[1] ** 2 * d[2] + 3 * d[2] ** 2 + 4 * d[1] * d[3] + d[4]
    assert bell_bracket(Jet.from_derivatives(d), 4) == explicit
