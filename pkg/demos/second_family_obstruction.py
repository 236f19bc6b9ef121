"""
Why the second family is not projectively induced
=================================================

A metric is projectively induced when the matrix of diastasis coefficients
at a point is positive semidefinite. On the slice z1 = x, all other
variables zero, the only diagonal entry that matters at degree k is
(k!)^-2 times the 2k-th derivative of exp(D0) at the origin.
"""

from calabi import MetricSpec, diagonal_derivative, diagonal_entry, first_obstruction
from calabi.series import format_rational

spec = MetricSpec.lee2(1)

# The entries stay positive up to degree 3 ...
for k in range(1, 5):
    print(f"k={k}: entry {format_rational(diagonal_entry(spec, 0, k))}, "
          f"derivative {format_rational(diagonal_derivative(spec, 0, k))}")

# ... and turn negative at degree 4, for every n.
for n in range(1, 6):
    print(f"n={n}:", format_rational(diagonal_derivative(MetricSpec.lee2(n), 0, 4)))

print(first_obstruction(spec, 4))
