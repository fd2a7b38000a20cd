"""The meromorphic map ``u(x) = x - sum_k a_k/(x - b_k)``.

On each of the n+1 open intervals cut out by the poles ``u`` increases
strictly from -inf to +inf, so every ``u0`` has exactly one preimage per
interval.  These preimages (the *branches*) are located by bracketed
bisection with safeguarded Newton steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Sequence

import numpy as np

from .polyalg import EXACT, FLOAT, Poly, RationalFn, poly_eval
from .symm import PoleSet

ROOT_TOL = 1e-12
CLASS_TOL = 1e-10


class PoleHitError(ZeroDivisionError):
    """``u`` (or its derivative) was evaluated exactly at a pole."""


class BracketingError(RuntimeError):
    """A branch root could not be bracketed; carries diagnostics."""

    def __init__(self, msg: str, **diagnostics):
        super().__init__(msg)
        self.diagnostics = diagnostics


class NotInClassError(ValueError):
    """A rational function is not of the form ``x - sum a_k/(x - b_k)`` with ``a_k > 0``."""

    def __init__(self, condition: str, detail: str = "", rational: RationalFn | None = None):
        msg = f"not in class: {condition}" + (f" ({detail})" if detail else "")
        super().__init__(msg)
        self.condition = condition
        self.rational = rational


@dataclass(frozen=True)
class BranchSet:
    u: float
    roots: tuple

    @property
    def root_sum(self) -> float:
        return math.fsum(self.roots)


@dataclass(frozen=True)
class MeroTransform:
    poles: PoleSet
    _arrays: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_arrays", self.poles.arrays())

    @classmethod
    def from_terms(cls, terms, field: str | None = None) -> "MeroTransform":
        return cls(PoleSet.new(terms, field))

    @cached_property
    def rational(self) -> RationalFn:
        """``(x*D(x) - sum_k a_k D(x)/(x-b_k)) / D(x)`` with ``D = prod(x - b_k)``."""
        fld = self.poles.field
        D = self.poles.denominator()
        num = D * Poly.x(fld)
        for a, b in self.poles.terms:
            cof, _ = D.divmod(Poly.new([-b, 1], fld))
            num = num - cof.scale(a)
        return RationalFn(num, D)

    @property
    def n(self) -> int:
        return self.poles.n

    def __call__(self, x):
        return eval_u(self, x)


def eval_u(t: MeroTransform, x):
    """Evaluate ``u`` from the pole-sum form.

    Accepts floats, numpy arrays, and (for exact pole data) rationals, which
    are evaluated exactly.
    """
    if t.poles.field == EXACT and isinstance(x, Rational) and not isinstance(x, bool):
        x = Fraction(x)
        acc = x
        for a, b in t.poles.terms:
            if x == b:
                raise PoleHitError(f"u evaluated at pole b={b}")
            acc -= a / (x - b)
        return acc
    a, b = t._arrays
    if isinstance(x, np.ndarray):
        d = x[..., None] - b
        if np.any(d == 0):
            raise PoleHitError("u evaluated at a pole")
        return x - np.sum(a / d, axis=-1)
    x = float(x)
    d = x - b
    if np.any(d == 0):
        raise PoleHitError(f"u evaluated at pole x={x}")
    return x - float(np.sum(a / d))


def derivative_u(t: MeroTransform, x):
    """``u'(x) = 1 + sum a_k/(x - b_k)^2``."""
    a, b = t._arrays
    if isinstance(x, np.ndarray):
        d = x[..., None] - b
        if np.any(d == 0):
            raise PoleHitError("u' evaluated at a pole")
        return 1.0 + np.sum(a / d ** 2, axis=-1)
    d = float(x) - b
    if np.any(d == 0):
        raise PoleHitError(f"u' evaluated at pole x={x}")
    return 1.0 + float(np.sum(a / (d * d)))


def branch_derivative(t: MeroTransform, x):
    """Slope ``dx/du = 1/u'(x)`` of the branch through ``x``; always in (0, 1]."""
    return 1.0 / derivative_u(t, x)


def _solve_bracket(a, b, u0: float, lo: float, hi: float) -> float:
    """Root of ``u(x) = u0`` in ``(lo, hi)`` where ``u(lo+) < u0 < u(hi-)``."""

    def g(x):
        d = x - b
        return x - float(np.sum(a / d)) - u0, 1.0 + float(np.sum(a / (d * d)))

    tol = ROOT_TOL * (1.0 + abs(u0))
    x = 0.5 * (lo + hi)
    for _ in range(400):
        gx, dg = g(x)
        if gx == 0.0:
            return x
        if gx < 0:
            lo = x
        else:
            hi = x
        step = x - gx / dg
        if abs(gx) <= tol:
            # one polishing step if it stays inside the bracket
            return step if lo < step < hi else x
        if not (lo < step < hi):
            step = 0.5 * (lo + hi)
        if step == x or hi - lo <= 4 * np.spacing(max(abs(lo), abs(hi))):
            return x
        x = step
    return x


def branches(t: MeroTransform, u) -> BranchSet:
    """The n+1 preimages of ``u``, one per monotone interval, ascending."""
    u = float(u)
    a, b = t._arrays
    n = len(b)
    if n == 0:
        return BranchSet(u, (u,))
    alpha = float(np.sum(a))
    roots = []
    # left unbounded interval: u(x) > x there, so the root lies left of min(u, b_1)
    left_edge = b[0]
    gap = (b[1] - b[0]) if n > 1 else 1.0
    step = 1.0 + alpha / gap
    base = min(u, left_edge)
    for _ in range(2000):
        lo = base - step
        if lo - float(np.sum(a / (lo - b))) < u:
            break
        step *= 2.0
    else:  # pragma: no cover - excluded by monotonicity
        raise BracketingError("left interval", u=u, lo=lo, step=step)
    roots.append(_solve_bracket(a, b, u, lo, left_edge))
    for k in range(n - 1):
        roots.append(_solve_bracket(a, b, u, b[k], b[k + 1]))
    right_edge = b[-1]
    gap = (b[-1] - b[-2]) if n > 1 else 1.0
    step = 1.0 + alpha / gap
    base = max(u, right_edge)
    for _ in range(2000):
        hi = base + step
        if hi - float(np.sum(a / (hi - b))) > u:
            break
        step *= 2.0
    else:  # pragma: no cover
        raise BracketingError("right interval", u=u, hi=hi, step=step)
    roots.append(_solve_bracket(a, b, u, right_edge, hi))
    for k, r in enumerate(roots):
        lo_k = -math.inf if k == 0 else b[k - 1]
        hi_k = math.inf if k == n else b[k]
        if not (lo_k < r < hi_k):
            raise BracketingError("root escaped its interval", u=u, k=k, root=r, interval=(lo_k, hi_k))
    return BranchSet(u, tuple(float(r) for r in roots))


# -- rational form --------------------------------------------------------------

def _real_distinct_roots(den: Poly) -> list:
    """Real roots of a monic float polynomial, polished; raises if complex/repeated."""
    deg = int(den.degree())
    if deg <= 0:
        return []
    c = np.array([float(v) for v in reversed(den.coeffs)])
    raw = np.roots(c)
    scale = 1.0 + float(np.max(np.abs(raw)))
    if np.any(np.abs(raw.imag) > 1e-7 * scale):
        raise NotInClassError("denominator has complex roots", f"roots={raw}")
    roots = np.sort(raw.real)
    dp = den.derivative()
    polished = []
    for r in roots:
        for _ in range(3):
            d = poly_eval(dp, r)
            if d == 0:
                break
            r = r - poly_eval(den, r) / d
        polished.append(float(r))
    polished.sort()
    if len(polished) > 1 and np.min(np.diff(polished)) <= 1e-9 * scale:
        raise NotInClassError("denominator has repeated roots", f"roots={polished}")
    return polished


def _rational_roots(den: Poly) -> list | None:
    """Exact roots if the exact monic ``den`` splits into distinct rational factors."""
    deg = int(den.degree())
    if deg <= 0:
        return []
    try:
        approx = _real_distinct_roots(den.to_float())
    except NotInClassError:
        return None
    out = []
    for r in approx:
        found = None
        for lim in (10, 10 ** 3, 10 ** 6, 10 ** 9, 10 ** 12):
            cand = Fraction(r).limit_denominator(lim)
            if poly_eval(den, cand) == 0:
                found = cand
                break
        if found is None:
            return None
        out.append(found)
    if len(set(out)) != deg:
        return None
    return sorted(out)


def from_rational(r: RationalFn) -> MeroTransform:
    """Recover the pole set of ``r = x - sum a_k/(x - b_k)``.

    Exact rational functions are decomposed exactly when the denominator
    splits over the rationals; otherwise the computation falls back to float.
    """
    r = RationalFn.new(r.num, r.den)
    num, den = r.num, r.den
    exact = r.field == EXACT
    if num.is_zero() or num.degree() != den.degree() + 1:
        raise NotInClassError("degree condition", f"deg num={num.degree()}, deg den={den.degree()}", r)
    if exact:
        if num.lead != 1:
            raise NotInClassError("leading coefficient ratio must be 1", f"got {num.lead}", r)
    elif abs(num.lead - 1.0) > CLASS_TOL:
        raise NotInClassError("leading coefficient ratio must be 1", f"got {num.lead}", r)
    quo, rem = num.divmod(den)
    c = -quo.coeff(0)
    if (exact and c != 0) or (not exact and abs(c) > CLASS_TOL):
        raise NotInClassError("constant term must vanish", f"c={c}", r)
    roots = _rational_roots(den) if exact else None
    if roots is None:
        if exact:
            return from_rational(r.to_float())
        roots = _real_distinct_roots(den)
    dd = den.derivative()
    terms = []
    for bk in roots:
        residue = poly_eval(rem, bk) / poly_eval(dd, bk)
        ak = -residue
        if (exact and not ak > 0) or (not exact and ak <= CLASS_TOL):
            raise NotInClassError("residues must be negative (a_k > 0)", f"a={ak} at b={bk}", r)
        terms.append((ak, bk))
    return MeroTransform(PoleSet.new(terms, EXACT if exact else FLOAT))


def _compose_poles(outer: MeroTransform, inner: MeroTransform) -> MeroTransform:
    # Inner poles keep their weights; each preimage xi of an outer pole b_o
    # becomes a pole with weight a_o / inner'(xi).  Both are positive, and
    # the constant term cancels, so the class is closed.
    terms = [(float(a), float(b)) for a, b in inner.poles.terms]
    for a_o, b_o in outer.poles.terms:
        for xi in branches(inner, b_o).roots:
            terms.append((float(a_o) * branch_derivative(inner, xi), xi))
    return MeroTransform(PoleSet.new(terms, FLOAT))


def compose(outer: MeroTransform, inner: MeroTransform) -> MeroTransform:
    """The transform ``x -> outer(inner(x))``.

    Exact pole data is composed exactly when the result splits over the
    rationals; otherwise the new poles are the inner poles plus the branch
    preimages of the outer poles, computed in float.
    """
    if outer.poles.field == EXACT and inner.poles.field == EXACT:
        r = outer.rational.compose(inner.rational)
        try:
            t = from_rational(r)
        except NotInClassError as exc:  # pragma: no cover - excluded by closure
            if exc.rational is None:
                exc.rational = r
            raise
        if t.poles.field == EXACT:
            return t
    return _compose_poles(outer, inner)


def iterate(t: MeroTransform, times: int) -> MeroTransform:
    """``t`` composed with itself ``times`` times (``times=1`` returns ``t``)."""
    if times < 1:
        raise ValueError("times must be >= 1")
    out = t
    for _ in range(times - 1):
        out = compose(t, out)
    return out


def cot_truncation(N: int) -> MeroTransform:
    """``x - [1/x + sum_{k=1}^N (1/(x-k) + 1/(x+k))]``, a truncation of ``x - pi*cot(pi*x)``."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return MeroTransform(PoleSet.new([(1, k) for k in range(-N, N + 1)]))
