"""Meromorphic reduction: ``int p(x) F(u(x)) dx = int q(x) F(x) dx``.

For the monomial ``x^m`` the reduced polynomial is
``q_m(u) = tau_{m+1}'(u) / (m+1)``, where ``tau_j`` is the j-th power sum of
the branch roots; ``q`` follows by linearity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .polyalg import EXACT, FLOAT, Poly
from .symm import PoleSet, TauSeq, sigma_from_poles, tau_from_sigma


@dataclass(frozen=True)
class Reduction:
    poles: PoleSet
    p: Poly
    q: Poly
    per_monomial: tuple

    def to_dict(self) -> dict:
        from .polyalg import format_scalar

        def enc(poly: Poly):
            if poly.field == EXACT:
                return [format_scalar(c) for c in poly.coeffs]
            return [float(c) for c in poly.coeffs]

        return {
            "p": enc(self.p),
            "q": enc(self.q),
            "q_text": self.q.to_text(),
            "per_monomial": [enc(qm) for qm in self.per_monomial],
        }


def _match_fields(poles: PoleSet, p: Poly | None = None):
    if poles.field == FLOAT or (p is not None and p.field == FLOAT):
        poles = poles.to_float() if poles.field != FLOAT else poles
        if p is not None and p.field != FLOAT:
            p = p.to_float()
    return poles, p


def _monomials_from_tau(tau: TauSeq, top: int) -> list[Poly]:
    out = []
    for m in range(top + 1):
        d = tau[m + 1].derivative()
        out.append(d.scale(Fraction(1, m + 1) if d.field == EXACT else 1.0 / (m + 1)))
    return out


def reduce_monomial(poles: PoleSet, m: int) -> Poly:
    """Reduced polynomial ``q_m`` for the prefactor ``x^m``; monic of degree ``m``."""
    if m < 0:
        raise ValueError("monomial degree must be nonnegative")
    tau = tau_from_sigma(sigma_from_poles(poles), m + 1)
    return _monomials_from_tau(tau, m)[m]


def reduce_poly(poles: PoleSet, p: Poly) -> Reduction:
    """Reduce a polynomial prefactor.

    If either the poles or ``p`` are float, both are promoted to float.
    """
    if p.is_zero():
        raise ValueError("cannot reduce the zero polynomial")
    poles, p = _match_fields(poles, p)
    top = int(p.degree())
    tau = tau_from_sigma(sigma_from_poles(poles), top + 1)
    per = _monomials_from_tau(tau, top)
    q = Poly.zero(p.field)
    for m, c in enumerate(p.coeffs):
        if c != 0:
            q = q + per[m].scale(c)
    return Reduction(poles, p, q, tuple(per))
