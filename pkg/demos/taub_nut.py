"""
Taub-NUT in implicit coordinates
================================

The Taub-NUT potential x + y + m(x^2 + y^2) is given through
|z1|^2 = x exp(2m(x+y)) and |z2|^2 = y exp(2m(y-x)). The series is found by
reversion, and the degree-2 diagonal entry comes out as 1/2 - m.
"""

from fractions import Fraction

from calabi import MetricSpec, diagonal_entry, first_obstruction
from calabi.series import format_rational

for m in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)):
    spec = MetricSpec.taubnut(m)
    print(f"m={m}: z1^2 entry {format_rational(diagonal_entry(spec, 0, 2))}")

# m = 1/4 passes degree 2 but fails at degree 4
print(first_obstruction(MetricSpec.taubnut(Fraction(1, 4)), 2))
print(first_obstruction(MetricSpec.taubnut(Fraction(1, 4)), 4))
