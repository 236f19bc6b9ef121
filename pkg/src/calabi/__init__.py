"""Exact test of Calabi's criterion for projectively induced Kähler metrics."""

from .catalog import MetricSpec, extension, n_series_II, n_series_III, taubnut_extension
from .engine import (
    CalabiMatrix,
    NoObstructionUpTo,
    ObstructedDiagonal,
    ObstructedMinor,
    calabi_matrix,
    catalog_matrix,
    diagonal_derivative,
    diagonal_entry,
    diastasis_at_origin,
    first_obstruction,
    monomial_basis,
    psd_check,
)
from .profile_ode import (
    ImplicitProfileODE,
    bell_bracket,
    lee2_ode,
    lee3_ode,
    mii_closed_jet,
    ode_residual,
    solve_profile_jet,
)
from .series import (
    BiSeries,
    Jet,
    Rational,
    as_rational,
    coefficient,
    implicit_series_solve,
    jet_compose,
    series_exp,
    series_log,
    series_reciprocal,
)

__version__ = "0.1.0"
