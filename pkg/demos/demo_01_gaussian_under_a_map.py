"""
A Gaussian under x - 1/x
========================

The map u(x) = x - 1/x sends each half line onto the whole line, and the
two pieces together preserve the integral of any decaying F.  Here that is
checked for F(u) = exp(-u^2), whose integral over the line is sqrt(pi).
"""

import math

import numpy as np

from meroreduce import IntegrandSpec, MeroTransform, Poly, branches, integrate_lhs

# one pole at the origin with weight 1
t = MeroTransform.from_terms([(1, 0)])

# every level u has one preimage on each side of the pole
for u in (-2.0, 0.0, 3.0):
    print(f"u = {u:+.1f}: branches {np.round(branches(t, u).roots, 6)}")

result = integrate_lhs(Poly.new([1.0]), t, IntegrandSpec.gaussian(1.0), tol=1e-12)
print(f"integral of exp(-(x - 1/x)^2) = {result.value:.15f}")
print(f"sqrt(pi)                      = {math.sqrt(math.pi):.15f}")
print(f"segments used: {result.segments_used}, evaluations: {result.evaluations}")
