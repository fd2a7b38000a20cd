from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_float_poles
from meroreduce.polyalg import FLOAT, Poly, poly_eval
from meroreduce.quad import IntegrandSpec, integrate_line
from meroreduce.reduce import reduce_monomial
from meroreduce.symm import PoleSet
from meroreduce.verify import (FIXTURES, I3_PRINTED, SQRT_PI, gaussian_moment_rhs, i1_poles,
                               oracle_qm, run_fixture, verify_identity)

CS = [(1.0, 0.0)]
I3 = [(math.pi, 3.0), (math.pi, -3.0)]


class TestVerifyIdentity:
    def test_cauchy_schlomilch(self):
        rep = verify_identity(CS, Poly.new([1.0]), IntegrandSpec.gaussian(1.0), 1e-10, 1e-7)
        assert rep.passed
        assert rep.lhs.value == pytest.approx(SQRT_PI) and rep.rhs.value == pytest.approx(SQRT_PI)

    def test_symmetric_quartic(self):
        rep = verify_identity(I3, Poly.new([1.0, 0, 4, 0, 1]), IntegrandSpec.gaussian(2.0), 1e-10, 1e-7)
        assert rep.passed and rep.rel_diff <= 1e-7

    def test_pv_identity(self):
        rep = verify_identity(CS, Poly.new([0.0, 1.0]), IntegrandSpec.csch(), 1e-10, 1e-6)
        assert rep.passed
        assert rep.lhs.value == pytest.approx(math.pi ** 2 / 2, rel=1e-6)
        assert len(rep.lhs.pv_points) == 2

    def test_relative_difference_definition(self):
        rep = verify_identity(CS, Poly.new([1.0]), IntegrandSpec.gaussian(1.0))
        expected = abs(rep.lhs.value - rep.rhs.value) / max(abs(rep.lhs.value), abs(rep.rhs.value), 1e-300)
        assert rep.rel_diff == expected

    def test_quadrature_failure_is_reported(self):
        F = IntegrandSpec.from_expr("1/(1+x^2)^0.25")
        rep = verify_identity(CS, Poly.new([1.0]), F)
        assert not rep.passed and rep.error_kind == "quadrature"
        assert rep.to_dict()["error"]["kind"] == "quadrature"

    def test_report_serializes(self):
        d = verify_identity(I3, Poly.new([1.0, 0, 4, 0, 1]), IntegrandSpec.gaussian(2.0)).to_dict()
        assert {"lhs", "rhs", "abs_diff", "rel_diff", "pass", "q", "elapsed_s"} <= set(d)
        assert "pv_points" in d["lhs"]


class TestOracle:
    def test_q0(self):
        assert oracle_qm(CS, 0, 7.0) == pytest.approx(1.0, abs=1e-14)

    def test_q2_at_zero(self):
        assert oracle_qm(CS, 2, 0.0) == pytest.approx(1.0, abs=1e-14)

    def test_symmetric_q4(self):
        pi = math.pi
        assert oracle_qm(I3, 4, 1.0) == pytest.approx(1 + 6 * pi + 4 * pi ** 2 + 18 * pi, abs=1e-8)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_agrees_with_reduction(self, seed):
        rng = random.Random(seed)
        ps = PoleSet.new(random_float_poles(rng, rng.randint(1, 5)))
        for m in range(7):
            q = reduce_monomial(ps, m)
            u0 = rng.uniform(-10, 10)
            assert abs(oracle_qm(ps, m, u0) - poly_eval(q, u0)) <= 1e-8


class TestGaussianMoments:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.7])
    def test_against_quadrature(self, alpha):
        q = Poly.new([1.5, -2.0, 0.25, 3.0, 1.0, 0.0, 0.5], FLOAT)
        c = [float(v) for v in q.coeffs]
        num = integrate_line(lambda x: np.polyval(c[::-1], x) * np.exp(-alpha * x * x), 1e-13).value
        assert gaussian_moment_rhs(q, alpha) == pytest.approx(num, rel=1e-9)

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            gaussian_moment_rhs(Poly.new([1.0]), 0.0)


class TestFixtures:
    @pytest.mark.parametrize("name", FIXTURES)
    def test_fixture_passes(self, name):
        rep = run_fixture(name)
        assert rep.passed, rep.to_dict()

    def test_i1_value(self):
        rep = run_fixture("I1")
        assert rep.lhs.value == pytest.approx(2.6586807763, abs=1e-9)

    def test_i1_poles(self):
        assert i1_poles(2.0, 1.0) == [(0.5, -1.0), (0.5, 1.0)]
        with pytest.raises(ValueError):
            i1_poles(1.0, 2.0)

    def test_i3_half_line_report(self):
        rep = run_fixture("I3")
        half = rep.extras["half_line"]
        assert half["computed"] == pytest.approx(rep.closed_form / 2)
        assert half["printed"] == I3_PRINTED
        # the printed constant is reported, and it is not what the reduction gives
        assert abs(half["printed"] - half["computed"]) > 1.0

    def test_i3_closed_form(self):
        pi = math.pi
        assert run_fixture("I3").closed_form == pytest.approx(
            math.sqrt(pi / 2) * (4 * pi ** 2 + 27.5 * pi + 35 / 16), rel=1e-14)

    def test_iterate2_poles(self):
        rep = run_fixture("iterate2")
        assert [b for _, b in rep.extras["transform"]["poles"]] == ["-1", "0", "1"]

    def test_unknown(self):
        with pytest.raises(KeyError):
            run_fixture("nope")
