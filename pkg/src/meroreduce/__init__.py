"""Reduce integrals of ``p(x) F(u(x))`` with ``u(x) = x - sum a_k/(x - b_k)`` to ``q(x) F(x)``."""

from __future__ import annotations

from .polyalg import EXACT, FLOAT, Poly, RationalFn, poly_eval
from .quad import IntegrandSpec, QuadratureError, QuadResult, integrate_lhs, integrate_line, integrate_pv
from .reduce import Reduction, reduce_monomial, reduce_poly
from .symm import PoleSet, branch_polynomial, power_sums_direct, sigma_from_poles, tau_from_sigma
from .transform import (MeroTransform, NotInClassError, branches, compose, cot_truncation,
                        from_rational, iterate)
from .verify import VerificationReport, oracle_qm, run_fixture, verify_identity

__version__ = "0.1.0"

__all__ = [
    "EXACT", "FLOAT", "Poly", "RationalFn", "poly_eval",
    "IntegrandSpec", "QuadratureError", "QuadResult", "integrate_lhs", "integrate_line", "integrate_pv",
    "Reduction", "reduce_monomial", "reduce_poly",
    "PoleSet", "branch_polynomial", "power_sums_direct", "sigma_from_poles", "tau_from_sigma",
    "MeroTransform", "NotInClassError", "branches", "compose", "cot_truncation", "from_rational", "iterate",
    "VerificationReport", "oracle_qm", "run_fixture", "verify_identity",
]
