from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from meroreduce.polyalg import EXACT, Poly
from meroreduce.symm import PoleSet

fractions = st.fractions(min_value=-10, max_value=10, max_denominator=12)
positive_fractions = st.fractions(min_value=Fraction(1, 12), max_value=10, max_denominator=12)


@st.composite
def exact_polys(draw, max_degree: int = 6):
    coeffs = draw(st.lists(fractions, min_size=0, max_size=max_degree + 1))
    return Poly.new(coeffs, EXACT)


@st.composite
def exact_polesets(draw, max_n: int = 6):
    bs = draw(st.lists(fractions, min_size=0, max_size=max_n, unique=True))
    as_ = draw(st.lists(positive_fractions, min_size=len(bs), max_size=len(bs)))
    return PoleSet.new(list(zip(as_, bs)), EXACT)


def random_float_poles(rng: random.Random, n: int, a_max: float = 3.0, b_range: float = 5.0,
                       min_gap: float = 0.05):
    """``n`` poles with a in (0, a_max] and distinct b in [-b_range, b_range]."""
    bs: list[float] = []
    while len(bs) < n:
        b = rng.uniform(-b_range, b_range)
        if all(abs(b - c) >= min_gap for c in bs):
            bs.append(b)
    return [(rng.uniform(0.05, a_max), b) for b in bs]


@pytest.fixture
def rng():
    return random.Random(20240531)


# -- acceptance summary -------------------------------------------------------------

_ACCEPTANCE: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and "::test_criterion_" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
            _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    merged: dict = {}
    for name, outcome in _ACCEPTANCE.items():
        num, _, rest = name[len("test_criterion_"):].partition("_")
        label = rest.split("[", 1)[0].replace("_", " ")
        ok, _ = merged.get(int(num), (True, label))
        merged[int(num)] = (ok and outcome == "passed", label)
    terminalreporter.section("acceptance criteria")
    for num in sorted(merged):
        ok, label = merged[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {label}")
