"""
Iterating the map
=================

The class of maps x - sum a_k/(x - b_k) with a_k > 0 is closed under
composition, so x - 1/x composed with itself is again in the class, now
with three poles.  Each iterate therefore preserves the Gaussian integral.
"""

import math

from meroreduce import IntegrandSpec, MeroTransform, Poly, iterate, verify_identity

base = MeroTransform.from_terms([(1, 0)])
for k in (1, 2, 3, 4):
    t = iterate(base, k)
    rep = verify_identity(t, Poly.new([1.0]), IntegrandSpec.gaussian(1.0), 1e-10, 1e-7)
    print(f"k={k}: {t.n:>2} poles, integral={rep.lhs.value:.14f}, "
          f"|integral - sqrt(pi)|={abs(rep.lhs.value - math.sqrt(math.pi)):.1e}")

second = iterate(base, 2)
print(f"second iterate: {second.rational}")
print(f"poles (a, b): {[(str(a), str(b)) for a, b in second.poles.terms]}")
