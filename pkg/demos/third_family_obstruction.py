"""
The third family and its exceptional case n = 1
===============================================

For n >= 2 the degree-4 diagonal entry is already negative and equals
(-24 n^3 + 12 n + 48) / (2n+1)^3 after the (4!)^2 scaling. For n = 1 that
number is +4/3, degree 5 is positive as well, and the sign change happens
only at degree 6.
"""

from calabi import MetricSpec, bell_bracket, diagonal_derivative, first_obstruction, lee3_ode, solve_profile_jet
from calabi.series import format_rational

for n in range(1, 7):
    d = diagonal_derivative(MetricSpec.lee3(n), 0, 4)
    print(f"n={n}: k=4 derivative {format_rational(d)}")

# On the slice D0 is f(1 + |x|^2), so the derivative is k! times a complete
# Bell polynomial in the jet of f.
jet = solve_profile_jet(lee3_ode(1), 6)
for k in (4, 5, 6):
    print(f"n=1, k={k}: bracket {format_rational(bell_bracket(jet, k))}")

# The engine finds the same witness without knowing about the slice.
print(first_obstruction(MetricSpec.lee3(1), 6))
