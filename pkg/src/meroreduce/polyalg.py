"""Dense univariate polynomials over an exact-rational or binary64 field.

Coefficients are stored in ascending order, ``coeffs[i]`` multiplying
``x**i``.  Two field instantiations share one implementation:

* ``"exact"`` -- :class:`fractions.Fraction` coefficients, exact arithmetic;
* ``"float"`` -- Python floats.

Mixing fields in a ring operation raises :class:`FieldMismatchError`; use
:meth:`Poly.to_float` to promote explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

EXACT = "exact"
FLOAT = "float"

# relative threshold used to trim round-off leading coefficients in float mode
FLOAT_TRIM = 1e-13


class FieldMismatchError(TypeError):
    """Raised when polynomials (or scalars) from different fields are combined."""


def field_of(values: Iterable) -> str:
    """Return ``"exact"`` if every value is rational (int/Fraction), else ``"float"``."""
    for v in values:
        if isinstance(v, bool) or not isinstance(v, Rational):
            return FLOAT
    return EXACT


def coerce_scalar(c, field: str):
    """Convert ``c`` into the scalar type of ``field``.

    Floats are rejected in exact mode; write ``Fraction(1, 2)`` rather
    than ``0.5``.
    """
    if field == EXACT:
        if isinstance(c, bool) or not isinstance(c, Rational):
            raise FieldMismatchError(f"non-rational scalar {c!r} in exact mode")
        return Fraction(c)
    if field == FLOAT:
        return float(c)
    raise ValueError(f"unknown field {field!r}")


def _trim(coeffs: list, field: str, scales: Sequence | None = None) -> tuple:
    """Drop vanishing leading coefficients.

    In float mode a coefficient counts as zero when it is within
    ``FLOAT_TRIM`` of the magnitude of the terms that produced it
    (``scales``); without ``scales`` only exact zeros are dropped.
    """
    if field == EXACT or scales is None:
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return tuple(coeffs)
    while coeffs and abs(coeffs[-1]) <= FLOAT_TRIM * scales[len(coeffs) - 1]:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class Poly:
    """Immutable dense polynomial.

    Use :meth:`Poly.new` to build from arbitrary numbers; the field is
    inferred from the coefficient types unless given.
    """

    coeffs: tuple
    field: str = EXACT

    @classmethod
    def new(cls, coeffs: Sequence = (), field: str | None = None) -> "Poly":
        coeffs = list(coeffs)
        if field is None:
            field = field_of(coeffs)
        return cls(_trim([coerce_scalar(c, field) for c in coeffs], field), field)

    @classmethod
    def zero(cls, field: str = EXACT) -> "Poly":
        return cls((), field)

    @classmethod
    def one(cls, field: str = EXACT) -> "Poly":
        return cls.new([1], field)

    @classmethod
    def x(cls, field: str = EXACT) -> "Poly":
        return cls.new([0, 1], field)

    @classmethod
    def from_roots(cls, roots: Sequence, field: str | None = None) -> "Poly":
        """Monic polynomial ``prod(x - r)``."""
        if field is None:
            field = field_of(roots)
        out = cls.one(field)
        for r in roots:
            out = out * cls.new([-coerce_scalar(r, field), 1], field)
        return out

    # -- basic properties ---------------------------------------------------
    def degree(self) -> float | int:
        """Degree, with ``-inf`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else self._zero()

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self._zero()

    def _zero(self):
        return Fraction(0) if self.field == EXACT else 0.0

    def to_float(self) -> "Poly":
        return Poly.new([float(c) for c in self.coeffs], FLOAT)

    def _check(self, other: "Poly") -> None:
        if self.field != other.field:
            raise FieldMismatchError(f"cannot combine {self.field} and {other.field} polynomials")

    # -- ring operations ------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.new([other], self.field)
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        out = [self.coeff(i) + other.coeff(i) for i in range(n)]
        scales = None
        if self.field == FLOAT:
            scales = [max(abs(self.coeff(i)), abs(other.coeff(i))) for i in range(n)]
        return Poly(_trim(out, self.field, scales), self.field)

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs), self.field)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.new([other], self.field)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.field)
        out = [self._zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        mag = [0.0] * len(out)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
                if self.field == FLOAT:
                    mag[i + j] += abs(a * b)
        return Poly(_trim(out, self.field, mag if self.field == FLOAT else None), self.field)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.one(self.field)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "Poly":
        c = coerce_scalar(c, self.field)
        return Poly(_trim([c * a for a in self.coeffs], self.field), self.field)

    def derivative(self) -> "Poly":
        return Poly(_trim([i * self.coeffs[i] for i in range(1, len(self.coeffs))], self.field), self.field)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Euclidean division ``self = q*other + r`` with ``deg r < deg other``."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        d = len(other.coeffs) - 1
        lead = other.coeffs[-1]
        if len(rem) - 1 < d:
            return Poly.zero(self.field), self
        quo = [self._zero()] * (len(rem) - d)
        mag = [abs(c) for c in rem] if self.field == FLOAT else None
        for k in range(len(rem) - 1 - d, -1, -1):
            c = rem[k + d] / lead
            quo[k] = c
            for j in range(d + 1):
                rem[k + j] -= c * other.coeffs[j]
                if mag is not None:
                    mag[k + j] = max(mag[k + j], abs(c * other.coeffs[j]))
        rem = rem[:d]
        return (Poly(_trim(quo, self.field), self.field),
                Poly(_trim(rem, self.field, None if mag is None else mag[:d]), self.field))

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(1 / self.lead if self.field == FLOAT else Fraction(1) / self.lead)

    def compose(self, inner: "Poly") -> "Poly":
        """Return ``self(inner(x))`` by Horner's scheme."""
        self._check(inner)
        out = Poly.zero(self.field)
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out

    def __call__(self, x):
        return poly_eval(self, x)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.field == other.field and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.field))

    def to_text(self, var: str = "x") -> str:
        """Human-readable form, highest degree first, e.g. ``"x^2 + 1"``."""
        if self.is_zero():
            return "0"
        parts: list[str] = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            neg = c < 0
            mag = -c if neg else c
            cs = format_scalar(mag)
            if i == 0:
                body = cs
            else:
                mono = var if i == 1 else f"{var}^{i}"
                if mag == 1:
                    body = mono
                elif "/" in cs:
                    body = f"({cs})*{mono}"
                else:
                    body = f"{cs}*{mono}"
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(parts)

    def __str__(self):
        return self.to_text()


def format_scalar(c) -> str:
    """Serialize a scalar: ``"num/den"`` (or integer) for Fractions, repr-exact floats."""
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return repr(float(c))


def poly_eval(p: Poly, x):
    """Horner evaluation; works on scalars, Fractions and numpy arrays."""
    if isinstance(x, np.ndarray):
        out = np.zeros_like(x, dtype=float)
        for c in reversed(p.coeffs):
            out = out * x + float(c)
        return out
    if p.field == EXACT and isinstance(x, Rational):
        acc = Fraction(0)
    else:
        acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * x + (c if isinstance(acc, Fraction) else float(c))
    return acc


def poly_derivative(p: Poly) -> Poly:
    return p.derivative()


def poly_mul(p: Poly, q: Poly) -> Poly:
    return p * q


def poly_add(p: Poly, q: Poly) -> Poly:
    return p + q


def poly_scale(p: Poly, c) -> Poly:
    return p.scale(c)


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd of two exact polynomials (Euclid)."""
    if p.field != EXACT or q.field != EXACT:
        raise FieldMismatchError("gcd is only defined for exact polynomials")
    while not q.is_zero():
        p, q = q, p.divmod(q)[1]
    return p.monic() if not p.is_zero() else p


@dataclass(frozen=True)
class RationalFn:
    """Normalized quotient ``num/den``.

    The denominator is monic.  In exact mode common factors are cancelled;
    in float mode only the monic scaling is applied.
    """

    num: Poly
    den: Poly

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if self.num.field != self.den.field:
            raise FieldMismatchError("numerator and denominator fields differ")

    @classmethod
    def new(cls, num: Poly, den: Poly) -> "RationalFn":
        if num.field != den.field:
            num, den = num.to_float(), den.to_float()
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.field == EXACT and not num.is_zero():
            g = poly_gcd(num, den)
            if g.degree() > 0:
                num, den = num.divmod(g)[0], den.divmod(g)[0]
        inv = (1 / den.lead) if den.field == FLOAT else Fraction(1) / den.lead
        return cls(num.scale(inv), den.scale(inv))

    @property
    def field(self) -> str:
        return self.num.field

    def to_float(self) -> "RationalFn":
        return RationalFn.new(self.num.to_float(), self.den.to_float())

    def __call__(self, x):
        return poly_eval(self.num, x) / poly_eval(self.den, x)

    def compose(self, inner: "RationalFn") -> "RationalFn":
        """Return ``self(inner(x))`` as a normalized rational function."""
        outer = self
        if outer.field != inner.field:
            outer, inner = outer.to_float(), inner.to_float()
        n_i, d_i = inner.num, inner.den
        deg = max(len(outer.num.coeffs), len(outer.den.coeffs)) - 1
        # outer(N/D) = [sum c_j N^j D^(deg-j)] / [sum e_j N^j D^(deg-j)]
        npow = [Poly.one(n_i.field)]
        dpow = [Poly.one(n_i.field)]
        for _ in range(deg):
            npow.append(npow[-1] * n_i)
            dpow.append(dpow[-1] * d_i)

        def homog(p: Poly) -> Poly:
            acc = Poly.zero(n_i.field)
            for j, c in enumerate(p.coeffs):
                acc = acc + (npow[j] * dpow[deg - j]).scale(c)
            return acc

        return RationalFn.new(homog(outer.num), homog(outer.den))

    def __str__(self):
        return f"({self.num}) / ({self.den})"
