"""
Cross-checking exact results with floating point
================================================

Every exact coefficient can be checked against finite differences of the
potential itself, evaluated in extended precision. The smallest eigenvalue
of the float matrix must also have the same sign as the exact verdict.
"""

from calabi import MetricSpec, catalog_matrix, psd_check
from calabi.oracle import finite_difference_check, numeric_potential, numeric_psd

spec = MetricSpec.lee2(1)

# f(N) = 2(sqrt(N) - 1), so f(1.01) is about 0.0099751
print("potential:", numeric_potential(spec, [0.1, 0.0]))

for alpha, beta in [((1, 0), (1, 0)), ((2, 0), (2, 0)), ((1, 1), (1, 1))]:
    r = finite_difference_check(spec, alpha, beta)
    print(alpha, beta, "exact", r.exact, "approx", r.approx, "rel", f"{r.relative_error:.1e}")

m = catalog_matrix(spec, 4)
print(numeric_psd(m, psd_check(m)))
