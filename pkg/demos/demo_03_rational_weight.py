"""
A rational weight against a Gaussian
====================================

Two poles at +-sqrt(b) sharing the weight (a - b)/2 give the map
u(x) = x (x^2 - a) / (x^2 - b).  With p = x^2 the reduction gives
q = x^2 + a - b, so the integral of x^2 exp(-u(x)^2) is
sqrt(pi) (a - b + 1/2) for every 0 < b < a.
"""

import math

from meroreduce import run_fixture

for a, b in [(2.0, 1.0), (5.0, 0.5), (3.0, 2.9)]:
    rep = run_fixture("I1", a=a, b=b)
    closed = math.sqrt(math.pi) * (a - b + 0.5)
    print(f"a={a:<4} b={b:<4} lhs={rep.lhs.value:.12f} rhs={rep.rhs.value:.12f} "
          f"closed form={closed:.12f} rel diff={rep.rel_diff:.1e}")
