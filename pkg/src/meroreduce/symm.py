"""Pole data, elementary symmetric functions of the branch roots, power sums.

For ``u = x - sum_k a_k/(x - b_k)`` the n+1 branch roots ``x_k(u)`` are the
roots of the monic degree-(n+1) polynomial obtained by clearing
denominators in ``u - x + sum_k a_k/(x - b_k) = 0``.  Its coefficients are
affine in ``u``, so is every elementary symmetric function ``sigma_k(u)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .polyalg import EXACT, FLOAT, Poly, coerce_scalar, field_of


class PoleSetError(ValueError):
    """Invalid pole data (non-positive residue weight, non-finite value...)."""


@dataclass(frozen=True)
class PoleSet:
    """Canonical list of ``(a_k, b_k)`` pairs with ``a_k > 0``, ``b`` ascending.

    Construct through :meth:`PoleSet.new`, which sorts by ``b`` and merges
    repeated ``b`` values by summing their weights.
    """

    terms: tuple
    field: str = EXACT

    @classmethod
    def new(cls, terms: Iterable[Sequence] = (), field: str | None = None) -> "PoleSet":
        terms = [tuple(t) for t in terms]
        for t in terms:
            if len(t) != 2:
                raise PoleSetError(f"pole term must be an (a, b) pair, got {t!r}")
        if field is None:
            field = field_of([v for t in terms for v in t])
        merged: dict = {}
        for a, b in terms:
            a = coerce_scalar(a, field)
            b = coerce_scalar(b, field)
            if field == FLOAT and not (np.isfinite(a) and np.isfinite(b)):
                raise PoleSetError(f"non-finite pole data (a={a}, b={b})")
            if not a > 0:
                raise PoleSetError(f"pole weight a must be > 0, got a={a} at b={b}")
            merged[b] = merged.get(b, 0) + a
        return cls(tuple((merged[b], b) for b in sorted(merged)), field)

    @property
    def n(self) -> int:
        return len(self.terms)

    @property
    def a(self) -> tuple:
        return tuple(t[0] for t in self.terms)

    @property
    def b(self) -> tuple:
        return tuple(t[1] for t in self.terms)

    def _sum(self, vals):
        return sum(vals, Fraction(0) if self.field == EXACT else 0.0)

    @property
    def alpha1(self):
        """Sum of the weights ``a_k``."""
        return self._sum(self.a)

    @property
    def beta1(self):
        """Sum of the pole locations ``b_k``."""
        return self._sum(self.b)

    @property
    def beta2(self):
        """Second elementary symmetric function of the ``b_k``."""
        b = self.b
        return self._sum(b[i] * b[j] for i in range(len(b)) for j in range(i + 1, len(b)))

    @property
    def sum_ab(self):
        return self._sum(a * b for a, b in self.terms)

    def to_float(self) -> "PoleSet":
        return PoleSet.new([(float(a), float(b)) for a, b in self.terms], FLOAT)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Weights and locations as float arrays."""
        return (np.array([float(a) for a in self.a], dtype=float),
                np.array([float(b) for b in self.b], dtype=float))

    def denominator(self) -> Poly:
        """``prod_k (x - b_k)``."""
        return Poly.from_roots(self.b, self.field)


@dataclass(frozen=True)
class SigmaSeq:
    """``sigma_0 .. sigma_{n+1}`` as polynomials in ``u``."""

    sigma: tuple

    def __getitem__(self, k: int) -> Poly:
        if k < len(self.sigma):
            return self.sigma[k]
        return Poly.zero(self.sigma[0].field)

    def __len__(self):
        return len(self.sigma)

    def at(self, u0):
        """Numeric sigma values at ``u = u0``."""
        return [s(u0) for s in self.sigma]


@dataclass(frozen=True)
class TauSeq:
    """Power sums ``tau_1 .. tau_M`` as polynomials in ``u`` (``tau[j-1]`` is ``tau_j``)."""

    tau: tuple

    def __getitem__(self, j: int) -> Poly:
        if j < 1:
            raise IndexError("power sums are indexed from 1")
        return self.tau[j - 1]

    def __len__(self):
        return len(self.tau)


def branch_polynomial(poles: PoleSet) -> list[Poly]:
    """Coefficients (ascending in x) of the monic x-polynomial whose roots are the branches.

    Expands ``(u - x) prod(x - b_k) + sum_k a_k prod_{l != k}(x - b_l)`` and
    flips the sign so the ``x^{n+1}`` coefficient is 1.  Each entry is an
    affine polynomial in ``u``.
    """
    field = poles.field
    P = poles.denominator()
    n = poles.n
    S = Poly.zero(field)
    for a, b in poles.terms:
        cofactor, rem = P.divmod(Poly.new([-b, 1], field))
        S = S + cofactor.scale(a)
    u = Poly.x(field)
    out = []
    for j in range(n + 2):
        # coefficient of x^j in E(x), negated
        c = u.scale(P.coeff(j)) - Poly.new([P.coeff(j - 1) if j >= 1 else 0], field) + S.coeff(j)
        out.append(-c)
    return out


def sigma_from_poles(poles: PoleSet) -> SigmaSeq:
    """Elementary symmetric polynomials of the n+1 branch roots, via Vieta."""
    coeffs = branch_polynomial(poles)
    n1 = poles.n + 1
    sig = []
    for k in range(n1 + 1):
        c = coeffs[n1 - k]
        sig.append(c if k % 2 == 0 else -c)
    return SigmaSeq(tuple(sig))


def sigma_from_roots(roots: Sequence, field: str | None = None) -> SigmaSeq:
    """Elementary symmetric functions of explicit roots, as constant polynomials."""
    if field is None:
        field = field_of(roots)
    e = [coerce_scalar(1, field)] + [coerce_scalar(0, field)] * len(roots)
    for r in roots:
        r = coerce_scalar(r, field)
        for k in range(len(e) - 1, 0, -1):
            e[k] = e[k] + r * e[k - 1]
    return SigmaSeq(tuple(Poly.new([c], field) for c in e))


def tau_from_sigma(sigmas: SigmaSeq, M: int) -> TauSeq:
    """Power sums from elementary symmetric functions by Newton's identities.

    ``tau_m = sum_{i=1}^{m-1} (-1)^(i-1) sigma_i tau_{m-i} + (-1)^(m-1) m sigma_m``,
    with ``sigma_k = 0`` beyond the last stored index.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    tau: list[Poly] = []
    for m in range(1, M + 1):
        acc = sigmas[m].scale(m if m % 2 == 1 else -m)
        for i in range(1, m):
            term = sigmas[i] * tau[m - i - 1]
            acc = acc + term if i % 2 == 1 else acc - term
        tau.append(acc)
    return TauSeq(tuple(tau))


def power_sums_direct(roots: Sequence, M: int) -> list:
    """Brute-force ``[sum r^j for j in 1..M]``."""
    out = []
    for j in range(1, M + 1):
        acc = 0
        for r in roots:
            acc = acc + r ** j
        out.append(acc)
    return out
