"""The ten acceptance criteria, one test each; a summary line per criterion is printed at the end."""

from __future__ import annotations

import math
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import random_float_poles
from meroreduce.polyalg import EXACT, FLOAT, Poly, poly_eval
from meroreduce.quad import IntegrandSpec
from meroreduce.reduce import reduce_monomial
from meroreduce.symm import PoleSet, power_sums_direct, sigma_from_roots, tau_from_sigma
from meroreduce.transform import MeroTransform, compose, cot_truncation, from_rational
from meroreduce.verify import (SQRT_PI, gaussian_moment_rhs, i1_poles, oracle_qm, run_fixture,
                               verify_identity)

HERE = Path(__file__).parent


def _pairwise_rel(*vals: float) -> float:
    return max(abs(a - b) / max(abs(a), abs(b)) for i, a in enumerate(vals) for b in vals[i + 1:])


def _rand_fraction(rng: random.Random, lo: int, hi: int, den: int = 12) -> Fraction:
    d = rng.randint(1, den)
    return Fraction(rng.randint(lo * d, hi * d), d)


def test_criterion_01_symbolic_low_order_reductions():
    rng = random.Random(1)
    X = Poly.x(EXACT)
    for _ in range(50):
        n = rng.randint(0, 6)
        bs: set = set()
        while len(bs) < n:
            bs.add(_rand_fraction(rng, -10, 10))
        terms = []
        for b in sorted(bs):
            a = Fraction(0)
            while a <= 0:
                a = _rand_fraction(rng, 0, 10)
            terms.append((a, b))
        ps = PoleSet.new(terms, EXACT)
        assert ps.field == EXACT
        assert reduce_monomial(ps, 0) == Poly.one(EXACT)
        assert reduce_monomial(ps, 1) == X
        assert reduce_monomial(ps, 2) == X ** 2 + Poly.new([ps.alpha1], EXACT)
        assert reduce_monomial(ps, 3) == X ** 3 + X.scale(2 * ps.alpha1) + Poly.new([ps.sum_ab], EXACT)


def test_criterion_02_symmetric_pair_polynomials():
    pi = math.pi
    ps = PoleSet.new([(pi, 3.0), (pi, -3.0)], FLOAT)
    q2 = reduce_monomial(ps, 2)
    q4 = reduce_monomial(ps, 4)
    assert q2.degree() == 2 and q4.degree() == 4
    for got, want in zip(q2.coeffs, [2 * pi, 0.0, 1.0]):
        assert abs(got - want) <= 1e-12
    for got, want in zip(q4.coeffs, [4 * pi ** 2 + 18 * pi, 0.0, 6 * pi, 0.0, 1.0]):
        assert abs(got - want) <= 1e-12


def test_criterion_03_branch_oracle_sweep():
    rng = random.Random(3)
    worst = 0.0
    for n in range(6):
        for _ in range(3):
            ps = PoleSet.new(random_float_poles(rng, n, a_max=3.0, b_range=5.0))
            for m in range(7):
                q = reduce_monomial(ps, m)
                for _ in range(100):
                    u0 = rng.uniform(-10, 10)
                    worst = max(worst, abs(oracle_qm(ps, m, u0) - poly_eval(q, u0)))
    assert worst <= 1e-8, worst


def test_criterion_04_newton_identity_oracle():
    rng = random.Random(4)
    for _ in range(200):
        roots = [_rand_fraction(rng, -10, 10) for _ in range(rng.randint(1, 6))]
        M = rng.randint(1, 12)
        tau = tau_from_sigma(sigma_from_roots(roots, EXACT), M)
        assert [tau[j].coeff(0) for j in range(1, M + 1)] == power_sums_direct(roots, M)


@pytest.mark.parametrize("a,b", [(2.0, 1.0), (5.0, 0.5)])
def test_criterion_05_rational_weight_gaussian(a, b):
    t0 = time.perf_counter()
    rep = run_fixture("I1", a=a, b=b)
    elapsed = time.perf_counter() - t0
    assert rep.error is None
    assert _pairwise_rel(rep.lhs.value, rep.rhs.value, SQRT_PI * (a - b + 0.5)) <= 1e-7
    assert rep.passed
    assert elapsed < 1.0


def test_criterion_06_symmetric_pair_end_to_end():
    pi = math.pi
    ps = PoleSet.new([(pi, 3.0), (pi, -3.0)], FLOAT)
    p = Poly.new([1.0, 0.0, 4.0, 0.0, 1.0])
    rep = verify_identity(ps, p, IntegrandSpec.gaussian(2.0), 1e-10, 1e-7)
    q = reduce_monomial(ps, 4) + reduce_monomial(ps, 2).scale(4.0) + Poly.one(FLOAT)
    moments = gaussian_moment_rhs(q, 2.0)
    assert rep.error is None
    assert _pairwise_rel(rep.lhs.value, rep.rhs.value, moments) <= 1e-7


@pytest.mark.parametrize("N", [2, 8, 32])
def test_criterion_07_principal_value_csch(N):
    t0 = time.perf_counter()
    rep = verify_identity(cot_truncation(N), Poly.new([0.0, 1.0]), IntegrandSpec.csch(), 1e-10, 1e-5)
    elapsed = time.perf_counter() - t0
    target = math.pi ** 2 / 2
    assert rep.error is None
    assert abs(rep.lhs.value - target) <= 1e-5 * target
    assert abs(rep.rhs.value - target) <= 1e-5 * target
    assert len(rep.lhs.pv_points) == 2 * N + 2
    if N == 32:
        assert elapsed < 30.0


def test_criterion_08_iteration():
    base = MeroTransform.from_terms([(Fraction(1), Fraction(0))])
    first = verify_identity(base, Poly.new([1]), IntegrandSpec.gaussian(1.0), 1e-10, 1e-8)
    assert abs(first.lhs.value - SQRT_PI) <= 1e-8 * SQRT_PI and first.passed
    r = base.rational.compose(base.rational)
    assert r.num == Poly.new([1, 0, -3, 0, 1]) and r.den == Poly.new([0, -1, 0, 1])
    second = from_rational(r)
    assert second.poles.b == (-1, 0, 1) and all(a > 0 for a in second.poles.a)
    assert second == compose(base, base)
    rep = verify_identity(second, Poly.new([1]), IntegrandSpec.gaussian(1.0), 1e-10, 1e-7)
    assert rep.passed and abs(rep.lhs.value - SQRT_PI) <= 1e-7 * SQRT_PI


def test_criterion_09_random_identity_certification():
    rng = random.Random(9)
    failures = []
    for i in range(25):
        t = MeroTransform.from_terms(random_float_poles(rng, rng.randint(0, 4)))
        # p = r^2 + c keeps the integral away from zero, so the relative test is meaningful
        r = Poly.new([rng.uniform(-2, 2) for _ in range(rng.randint(1, 3))], FLOAT)
        p = r * r + Poly.new([rng.uniform(0.1, 2.0)], FLOAT)
        F = IntegrandSpec.gaussian(rng.uniform(0.5, 2.0))
        rep = verify_identity(t, p, F, 1e-10, 1e-6)
        if not rep.passed:
            failures.append((i, rep.to_dict()))
    assert not failures, failures


def test_criterion_10_property_suites():
    suites = sorted(str(p) for p in HERE.glob("test_*.py") if p.name != Path(__file__).name)
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *suites],
                          capture_output=True, text=True, cwd=HERE)
    assert proc.returncode == 0, proc.stdout[-4000:]
