"""
A quartic prefactor with two symmetric poles
============================================

With poles at +-3 of weight pi and p = x^4 + 4x^2 + 1 the reduced
polynomial is x^4 + (6 pi + 4) x^2 + 4 pi^2 + 26 pi + 1.  Against
exp(-2x^2) the moments give a closed form; both quadratures agree with it.
"""

import math

from meroreduce import run_fixture

rep = run_fixture("I3")
print(f"q(x)        = {rep.q.to_text()}")
print(f"lhs         = {rep.lhs.value:.13f}")
print(f"rhs         = {rep.rhs.value:.13f}")
print(f"moments     = {rep.closed_form:.13f}")
half = rep.extras["half_line"]
print(f"half line   = {half['computed']:.13f}")
print(f"printed     = {half['printed']:.13f}   (reported only: {half['note']})")
print(f"sqrt(pi/2)*(4pi^2 + 55pi/2 + 35/16) = "
      f"{math.sqrt(math.pi / 2) * (4 * math.pi ** 2 + 27.5 * math.pi + 35 / 16):.13f}")
