"""
Sanity checks on projectively induced metrics
=============================================

Flat space and complex projective space are the positive controls: their
matrices are PSD at every degree. The flat matrix is diagonal with entries
1/alpha!, and Fubini-Study has the identity on degree-one monomials and
zeros elsewhere.
"""

from calabi import MetricSpec, catalog_matrix, first_obstruction, psd_check
from calabi.series import format_rational

flat = catalog_matrix(MetricSpec.flat(2), 3)
for label, row in zip(flat.labels(), flat.entries):
    print(f"{label:>8}", " ".join(format_rational(x) for x in row))

print(psd_check(catalog_matrix(MetricSpec.flat(2), 6)))
print(first_obstruction(MetricSpec.fubini_study(2), 4))
