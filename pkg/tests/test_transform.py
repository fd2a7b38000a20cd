from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_float_poles
from meroreduce.polyalg import EXACT, Poly, RationalFn
from meroreduce.symm import PoleSet
from meroreduce.transform import (MeroTransform, NotInClassError, PoleHitError, branch_derivative,
                                  branches, compose, cot_truncation, derivative_u, eval_u,
                                  from_rational, iterate)

CS = MeroTransform.from_terms([(1, 0)])
seeds = st.integers(0, 2 ** 32 - 1)


def _random_transform(seed: int, max_n: int = 5) -> tuple[random.Random, MeroTransform]:
    rng = random.Random(seed)
    return rng, MeroTransform.from_terms(random_float_poles(rng, rng.randint(1, max_n)))


class TestEval:
    def test_simple(self):
        assert eval_u(CS, 2.0) == 1.5

    def test_exact(self):
        assert eval_u(CS, Fraction(2)) == Fraction(3, 2)

    def test_array(self):
        np.testing.assert_allclose(eval_u(CS, np.array([1.0, 2.0])), [0.0, 1.5])

    def test_pole_hit(self):
        with pytest.raises(PoleHitError):
            eval_u(CS, 0.0)
        with pytest.raises(ZeroDivisionError):
            derivative_u(CS, 0.0)

    @settings(max_examples=100)
    @given(st.lists(st.tuples(st.fractions(Fraction(1, 16), 3, max_denominator=16),
                              st.fractions(-5, 5, max_denominator=16)),
                    min_size=1, max_size=5, unique_by=lambda t: t[1]),
           st.lists(st.floats(-8, 8), min_size=1, max_size=10))
    def test_agrees_with_rational_form(self, terms, xs):
        t = MeroTransform.from_terms(terms)
        tf = MeroTransform(t.poles.to_float())
        r = t.rational
        for x in xs:
            if min(abs(x - float(b)) for b in t.poles.b) < 1e-3:
                continue
            exact = float(r(Fraction(x)))
            assert eval_u(tf, x) == pytest.approx(exact, rel=1e-11, abs=1e-11)


class TestBranches:
    def test_zero_level(self):
        assert branches(CS, 0.0).roots == pytest.approx((-1.0, 1.0))

    @pytest.mark.parametrize("u", [-7.5, -1.0, 0.3, 4.0, 100.0])
    def test_quadratic_formula(self, u):
        d = math.sqrt(u * u + 4)
        assert branches(CS, u).roots == pytest.approx(((u - d) / 2, (u + d) / 2), rel=1e-13)

    def test_slope(self):
        assert derivative_u(CS, 1.0) == 2.0 and branch_derivative(CS, 1.0) == 0.5

    def test_no_poles(self):
        assert branches(MeroTransform(PoleSet.new([])), 2.5).roots == (2.5,)

    @settings(max_examples=50)
    @given(seeds)
    def test_monotone_on_segments(self, seed):
        rng, t = _random_transform(seed)
        edges = [-50.0] + sorted(float(b) for b in t.poles.b) + [50.0]
        k = rng.randrange(len(edges) - 1)
        lo, hi = edges[k], edges[k + 1]
        x1, x2 = sorted(rng.uniform(lo, hi) for _ in range(2))
        if lo < x1 < x2 < hi:
            assert eval_u(t, x1) < eval_u(t, x2)

    @settings(max_examples=50)
    @given(seeds)
    def test_round_trip(self, seed):
        rng, t = _random_transform(seed)
        u = rng.uniform(-10, 10)
        bs = branches(t, u)
        assert len(bs.roots) == t.n + 1
        for r in bs.roots:
            assert abs(eval_u(t, r) - u) <= 1e-10 * (1 + abs(u))

    @settings(max_examples=50)
    @given(seeds)
    def test_branch_slopes_sum_to_one(self, seed):
        rng, t = _random_transform(seed)
        roots = branches(t, rng.uniform(-10, 10)).roots
        assert math.fsum(branch_derivative(t, r) for r in roots) == pytest.approx(1.0, abs=1e-9)


class TestRationalForm:
    def test_x_minus_inverse(self):
        r = RationalFn.new(Poly.new([-1, 0, 1]), Poly.new([0, 1]))
        t = from_rational(r)
        assert t.poles.terms == ((1, 0),) and t.poles.field == EXACT

    def test_second_iterate(self):
        r = RationalFn.new(Poly.new([1, 0, -3, 0, 1]), Poly.new([0, -1, 0, 1]))
        t = from_rational(r)
        assert t.poles.b == (-1, 0, 1)
        assert t.poles.a == (Fraction(1, 2), 1, Fraction(1, 2))

    def test_wrong_sign_residue(self):
        with pytest.raises(NotInClassError) as exc:
            from_rational(RationalFn.new(Poly.new([1, 0, 1]), Poly.new([0, 1])))
        assert "residue" in exc.value.condition

    def test_degree_condition(self):
        with pytest.raises(NotInClassError):
            from_rational(RationalFn.new(Poly.new([1, 1]), Poly.new([0, 1])))

    def test_constant_term(self):
        # x + 1 - 1/x
        with pytest.raises(NotInClassError):
            from_rational(RationalFn.new(Poly.new([-1, 1, 1]), Poly.new([0, 1])))

    def test_complex_denominator(self):
        # x - 1/(x^2 + 1) * x ... denominator with no real roots
        with pytest.raises(NotInClassError):
            from_rational(RationalFn.new(Poly.new([0, 0, 0, 1]), Poly.new([1, 0, 1])))

    def test_irrational_split_falls_back(self):
        # x - 1/(x - sqrt2) - 1/(x + sqrt2) = (x^3 - 4x) / (x^2 - 2)
        t = from_rational(RationalFn.new(Poly.new([0, -4, 0, 1]), Poly.new([-2, 0, 1])))
        assert t.poles.b == pytest.approx((-math.sqrt(2), math.sqrt(2)))
        assert t.poles.a == pytest.approx((1.0, 1.0))


class TestComposition:
    def test_compose_self(self):
        t = compose(CS, CS)
        assert t.poles.b == (-1, 0, 1) and all(a > 0 for a in t.poles.a)

    def test_iterate(self):
        assert iterate(CS, 1) is CS
        assert iterate(CS, 2) == compose(CS, CS)
        with pytest.raises(ValueError):
            iterate(CS, 0)

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_closed_under_composition(self, seed):
        rng, t = _random_transform(seed, max_n=2)
        s = MeroTransform.from_terms(random_float_poles(rng, rng.randint(1, 2)))
        c = compose(t, s)
        assert c.n == s.n + t.n * (s.n + 1)
        assert all(a > 0 for a in c.poles.a)

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_associativity_on_evaluation(self, seed):
        rng, t = _random_transform(seed, max_n=2)
        ttt = compose(compose(t, t), t)
        for _ in range(5):
            x = rng.uniform(-6, 6)
            try:
                direct = eval_u(t, eval_u(t, eval_u(t, x)))
            except ZeroDivisionError:
                continue
            inner = [x, eval_u(t, x), eval_u(t, eval_u(t, x))]
            if min(abs(v - b) for v in inner for b in t.poles.b) < 1e-3:
                continue
            assert eval_u(ttt, x) == pytest.approx(direct, rel=1e-9, abs=1e-9)


class TestCotTruncation:
    def test_n0(self):
        assert cot_truncation(0).poles.terms == ((1, 0),)

    def test_n1(self):
        t = cot_truncation(1)
        assert t.poles.b == (-1, 0, 1) and t.poles.a == (1, 1, 1)

    def test_converges_to_cot(self):
        x = 0.25
        limit = x - math.pi / math.tan(math.pi * x)
        errs = [abs(eval_u(cot_truncation(N), x) - limit) for N in (50, 200)]
        assert errs[1] < errs[0] and errs[1] < 2.0 / 200

    def test_negative(self):
        with pytest.raises(ValueError):
            cot_truncation(-1)
