"""
Principal values through a truncated cotangent
==============================================

u_N(x) = x - 1/x - sum_{k=1}^N [1/(x-k) + 1/(x+k)] approaches x - pi cot(pi x).
The integrand x csch(u_N(x)) blows up wherever u_N vanishes, once in each
of the 2N+2 segments, so the left side is a principal value.  The reduced
side is the plain integral of x csch(x), which is pi^2/2 for every N.
"""

import math
import time

from meroreduce import IntegrandSpec, Poly, cot_truncation, verify_identity

target = math.pi ** 2 / 2
for N in (0, 2, 8, 32):
    start = time.perf_counter()
    rep = verify_identity(cot_truncation(N), Poly.new([0.0, 1.0]), IntegrandSpec.csch(), 1e-10, 1e-5)
    print(f"N={N:<3} PV points={len(rep.lhs.pv_points):<3} lhs={rep.lhs.value:.12f} "
          f"error vs pi^2/2={abs(rep.lhs.value - target):.1e} ({time.perf_counter() - start:.2f}s)")
