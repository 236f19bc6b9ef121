"""
Taylor jets of the profile functions
====================================

The potentials of both Lee families are f(N) for an explicit real function
N on the manifold. f is only known through an implicit second-order ODE,
but its Taylor jet at N = 1 follows exactly, one coefficient at a time.
"""

from calabi import lee2_ode, lee3_ode, mii_closed_jet, ode_residual, solve_profile_jet
from calabi.series import format_rational

# For the second family the jet does not depend on n, and it matches the
# closed form f'(N) = N^(-1/2).
for n in (1, 2, 5):
    jet = solve_profile_jet(lee2_ode(n), 6)
    print(f"lee2 n={n}:", [format_rational(d) for d in jet.derivatives()[1:]])
print("closed   :", [format_rational(d) for d in mii_closed_jet(6).derivatives()[1:]])

# The third family depends on n. f''(1) = -n/(2n+1) already shows it.
for n in (1, 2, 3):
    jet = solve_profile_jet(lee3_ode(n), 6)
    print(f"lee3 n={n}:", [format_rational(d) for d in jet.derivatives()[1:]])

# Plugging the jet back into the ODE leaves exactly the right-hand side 1
# through order K - 2.
ode = lee3_ode(4)
print("residual:", [format_rational(c) for c in ode_residual(ode, solve_profile_jet(ode, 8))])
