"""
Reduced polynomials, exactly
============================

For a prefactor x^m the reduction replaces x^m by a polynomial q_m of the
same degree whose lower coefficients depend only on the pole data.  With
rational poles everything is computed in exact arithmetic.  The last column
re-derives q_m(u0) from the branch roots alone, as an independent check.
"""

from fractions import Fraction

from meroreduce import PoleSet, oracle_qm, poly_eval, reduce_monomial

poles = PoleSet.new([(Fraction(1, 2), -1), (2, Fraction(1, 3)), (1, 4)])
print(f"alpha1 = {poles.alpha1}, sum a*b = {poles.sum_ab}")

u0 = 0.75
print(f"{'m':>2}  {'q_m(x)':<60} {'|q_m(u0) - branch sum|':>24}")
for m in range(7):
    q = reduce_monomial(poles, m)
    gap = abs(float(poly_eval(q, Fraction(u0))) - oracle_qm(poles, m, u0))
    print(f"{m:>2}  {q.to_text():<60} {gap:>24.2e}")
