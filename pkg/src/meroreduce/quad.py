"""Real-line quadrature for both sides of a reduction identity.

The engine combines three rules:

* tanh-sinh (double exponential) on finite pieces, with bisection when a
  piece fails to converge -- its endpoint clustering handles the poles
  ``b_k`` where ``F(u(x))`` decays as ``u -> -+inf``;
* exp-sinh on the two unbounded tails;
* adaptive Gauss-Kronrod (7/15) on principal-value windows.

A simple pole ``s`` of the integrand is handled by subtracting
``rho*w(x)/(x - s)`` with an even bump ``w``; the subtracted term has zero
principal value over the window.  The window integral is evaluated folded,
``int_0^h [g(s+d) + g(s-d)] dd``, so the interior nodes never approach ``s``
more closely than the Kronrod abscissae allow.

All integrands must accept and return numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .polyalg import Poly
from .transform import MeroTransform, branches, derivative_u

EPS = float(np.finfo(float).eps)
DEFAULT_TOL = 1e-10
DEFAULT_MAX_DEPTH = 48
MAX_EVALS = 4_000_000

_T_MAX = 4.0
_MIN_LEVEL = 3
_MAX_LEVEL = 8

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_GK_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GK_WG = np.zeros(15)
_GK_WG[1:7:2] = _WG[:3]
_GK_WG[7] = _WG[3]
_GK_WG[9:14:2] = _WG[2::-1]


class QuadratureError(RuntimeError):
    """Non-convergence; carries the best estimate and diagnostics."""

    def __init__(self, msg: str, value: float = math.nan, abs_error_estimate: float = math.inf,
                 **diagnostics):
        super().__init__(msg)
        self.value = value
        self.abs_error_estimate = abs_error_estimate
        self.diagnostics = diagnostics


class ResidueError(QuadratureError):
    """The scaled limit ``(x - s) f(x)`` did not converge: not a simple pole."""


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    segments_used: int
    pv_points: tuple = ()
    evaluations: int = 0
    pieces: int = 0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "abs_error_estimate": self.abs_error_estimate,
            "segments_used": self.segments_used,
            "pv_points": list(self.pv_points),
            "evaluations": self.evaluations,
            "pieces": self.pieces,
        }


# -- integrand family -------------------------------------------------------

def _csch(u):
    with np.errstate(over="ignore", divide="ignore"):
        e = np.exp(-np.abs(u))
        return np.sign(u) * 2.0 * e / -np.expm1(-2.0 * np.abs(u))


def _sech(u):
    with np.errstate(over="ignore"):
        e = np.exp(-np.abs(u))
        return 2.0 * e / (1.0 + e * e)


@dataclass(frozen=True)
class IntegrandSpec:
    """The outer function ``F`` together with its real simple poles.

    ``residues`` gives the residue of ``F`` at each singularity when known
    analytically; ``None`` means "estimate numerically".
    """

    kind: str
    alpha: float = 1.0
    expr: object = None
    singularities: tuple = ()
    residues: tuple | None = None
    source: str | None = None

    @classmethod
    def gaussian(cls, alpha: float = 1.0) -> "IntegrandSpec":
        if not alpha > 0:
            raise ValueError("gaussian alpha must be > 0")
        return cls("gaussian", alpha=float(alpha))

    @classmethod
    def csch(cls) -> "IntegrandSpec":
        return cls("csch", singularities=(0.0,), residues=(1.0,))

    @classmethod
    def sech(cls) -> "IntegrandSpec":
        return cls("sech")

    @classmethod
    def from_expr(cls, src, poles: Sequence[float] = (), residues: Sequence[float] | None = None):
        """``F`` given as an expression in ``x``; simple poles must be declared."""
        from .exprparse import Expr, parse_expression, to_source

        e = src if isinstance(src, Expr) else parse_expression(src)
        text = src if isinstance(src, str) else to_source(e)
        if residues is not None and len(residues) != len(poles):
            raise ValueError("one residue per declared pole is required")
        return cls("expr", expr=e, singularities=tuple(float(p) for p in sorted(poles)),
                   residues=None if residues is None else tuple(float(r) for r in residues),
                   source=text)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-self.alpha * u * u)
        if self.kind == "csch":
            return _csch(u)
        if self.kind == "sech":
            return _sech(u)
        if self.kind == "expr":
            from .exprparse import eval_expr

            return np.asarray(eval_expr(self.expr, u), dtype=float) * np.ones_like(u)
        raise ValueError(f"unknown integrand kind {self.kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "gaussian":
            return {"kind": "gaussian", "alpha": self.alpha}
        if self.kind in ("csch", "sech"):
            return {"kind": self.kind}
        out = {"expr": self.source, "poles": list(self.singularities)}
        if self.residues is not None:
            out["residues"] = list(self.residues)
        return out


# -- rules ------------------------------------------------------------------

_LEVEL_CACHE: dict = {}


def _level_t(level: int) -> np.ndarray:
    """Abscissae in ``t`` added at ``level`` (all of them at level 0)."""
    if level not in _LEVEL_CACHE:
        h = 2.0 ** -level
        J = int(math.floor(_T_MAX / h))
        j = np.arange(-J, J + 1)
        if level > 0:
            j = j[j % 2 != 0]
        _LEVEL_CACHE[level] = j * h
    return _LEVEL_CACHE[level]


def _tanh_sinh_nodes(a: float, b: float, t: np.ndarray):
    half = 0.5 * (b - a)
    z = 0.5 * math.pi * np.sinh(t)
    with np.errstate(over="ignore"):
        d_left = 2.0 / (1.0 + np.exp(-2.0 * z))   # 1 + tanh z
        d_right = 2.0 / (1.0 + np.exp(2.0 * z))   # 1 - tanh z
    w = half * 0.5 * math.pi * np.cosh(t) * d_left * d_right
    left = t < 0
    dist = np.where(left, half * d_left, half * d_right)
    x = np.where(left, a + dist, b - dist)
    end = np.where(left, abs(a), abs(b))
    keep = (dist > 4.0 * EPS * end) & (dist > 0) & (x > a) & (x < b)
    return x[keep], w[keep]


def _exp_sinh_nodes(c: float, sign: float, t: np.ndarray):
    with np.errstate(over="ignore"):
        dist = np.exp(0.5 * math.pi * np.sinh(t))
    w = 0.5 * math.pi * np.cosh(t) * dist
    x = c + sign * dist
    keep = (dist > 4.0 * EPS * abs(c)) & np.isfinite(w) & (x != c)
    return x[keep], w[keep]


@dataclass
class _Engine:
    tol: float = DEFAULT_TOL
    max_depth: int = DEFAULT_MAX_DEPTH
    max_evals: int = MAX_EVALS
    evals: int = 0
    pieces: int = 0
    context: dict = field(default_factory=dict)

    def _call(self, f, x: np.ndarray) -> np.ndarray:
        self.evals += x.size
        if self.evals > self.max_evals:
            raise QuadratureError("evaluation budget exhausted", evals=self.evals, **self.context)
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape)
        if not np.all(np.isfinite(y)):
            bad = x[~np.isfinite(y)]
            raise QuadratureError("non-finite integrand value", bad_points=bad[:5].tolist(), **self.context)
        return y

    def _de(self, f, nodes, target_rel: float):
        """Level-doubling trapezoid on a DE-mapped line; returns (value, err, converged)."""
        total = 0.0
        total_abs = 0.0
        prev = None
        value = 0.0
        err = math.inf
        for level in range(_MAX_LEVEL + 1):
            x, w = nodes(_level_t(level))
            if x.size:
                fx = self._call(f, x)
                total += float(np.dot(fx, w))
                total_abs += float(np.dot(np.abs(fx), w))
            h = 2.0 ** -level
            value = total * h
            if prev is not None:
                err = abs(value - prev)
                floor = 64.0 * EPS * total_abs * h
                if level >= _MIN_LEVEL and err <= max(target_rel * max(1.0, abs(value)), floor):
                    return value, max(err, floor), True
            prev = value
        return value, err, False

    def finite(self, f, a: float, b: float, tol: float, depth: int = 0):
        value, err, ok = self._de(f, lambda t: _tanh_sinh_nodes(a, b, t), tol)
        if ok:
            self.pieces += 1
            return value, err
        if depth >= self.max_depth:
            raise QuadratureError("max depth reached on finite piece", value=value,
                                  abs_error_estimate=err, interval=(a, b), **self.context)
        m = 0.5 * (a + b)
        v1, e1 = self.finite(f, a, m, tol / 2, depth + 1)
        v2, e2 = self.finite(f, m, b, tol / 2, depth + 1)
        return v1 + v2, e1 + e2

    def tail(self, f, c: float, sign: float, tol: float, depth: int = 0):
        value, err, ok = self._de(f, lambda t: _exp_sinh_nodes(c, sign, t), tol)
        if ok:
            # truncation at the last node: |f(X)| X approximates the neglected tail
            xf, _ = _exp_sinh_nodes(c, sign, np.array([_T_MAX]))
            if not xf.size:
                xf = np.array([c])
            if np.isfinite(xf[0]):
                trunc = abs(float(self._call(f, xf)[0])) * abs(float(xf[0]))
                if trunc > max(tol * max(1.0, abs(value)), 64.0 * EPS * abs(value)):
                    raise QuadratureError("integrand does not decay fast enough at infinity",
                                          value=value, abs_error_estimate=max(err, trunc),
                                          start=c, **self.context)
            self.pieces += 1
            return value, err
        if depth >= self.max_depth:
            raise QuadratureError("max depth reached on tail", value=value,
                                  abs_error_estimate=err, start=c, **self.context)
        L = 2.0 ** depth * max(1.0, abs(c))
        c2 = c + sign * L
        v1, e1 = self.finite(f, min(c, c2), max(c, c2), tol / 2, depth + 1)
        v2, e2 = self.tail(f, c2, sign, tol / 2, depth + 1)
        return v1 + v2, e1 + e2

    def kronrod(self, f, a: float, b: float, tol: float, depth: int = 0):
        half = 0.5 * (b - a)
        x = 0.5 * (a + b) + half * _GK_NODES
        fx = self._call(f, x)
        k = half * float(np.dot(_GK_WK, fx))
        g = half * float(np.dot(_GK_WG, fx))
        err = abs(k - g)
        floor = 50.0 * EPS * abs(half) * float(np.dot(_GK_WK, np.abs(fx)))
        if err <= max(tol * max(1.0, abs(k)), floor):
            self.pieces += 1
            return k, max(err, floor)
        if depth >= self.max_depth:
            raise QuadratureError("max depth reached in PV window", value=k,
                                  abs_error_estimate=err, interval=(a, b), **self.context)
        m = 0.5 * (a + b)
        v1, e1 = self.kronrod(f, a, m, tol / 2, depth + 1)
        v2, e2 = self.kronrod(f, m, b, tol / 2, depth + 1)
        return v1 + v2, e1 + e2


# -- principal value windows ---------------------------------------------------

def _smooth_step(tau):
    """C-infinity step: 0 for tau <= 0, 1 for tau >= 1."""
    tau = np.clip(tau, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        p = np.where(tau > 0, np.exp(-1.0 / np.where(tau > 0, tau, 1.0)), 0.0)
        q = np.where(tau < 1, np.exp(-1.0 / np.where(tau < 1, 1.0 - tau, 1.0)), 0.0)
    return p / (p + q)


def bump(d, h: float):
    """Even bump in the offset ``d``: 1 for ``|d| <= h/2``, 0 for ``|d| >= h``."""
    return _smooth_step((h - np.abs(d)) / (0.5 * h))


@dataclass(frozen=True)
class _PVWindow:
    s: float
    h: float
    residue: float
    local: Callable  # local(d) = integrand at s + d, for an array of signed offsets


def estimate_residue(local: Callable, s: float, h: float) -> float:
    """Residue ``lim (x-s) f(x)`` by symmetric averaging plus Richardson (offsets h, h/2)."""
    delta = 1e-3 * h

    def one_sided(d):
        vals = np.asarray(local(np.array([d, -d])), dtype=float)
        return d * vals[0], -d * vals[1]

    rp1, rm1 = one_sided(delta)
    rp2, rm2 = one_sided(delta / 2)
    rp4, rm4 = one_sided(delta / 4)
    if not all(np.isfinite(v) for v in (rp1, rm1, rp2, rm2, rp4, rm4)):
        raise ResidueError(f"residue estimate at pole {s} is not finite", pole=s)
    sym1 = 0.5 * (rp1 + rm1)
    sym2 = 0.5 * (rp2 + rm2)
    rho = (4.0 * sym2 - sym1) / 3.0
    spread1 = abs(rp1 - rm1)
    spread4 = abs(rp4 - rm4)
    if spread4 > 0.5 * spread1 + 1e-8 * (1.0 + abs(rho)):
        raise ResidueError(f"pole at {s} is not simple: (x-s)f(x) does not converge", pole=s,
                           spread=(spread1, spread4))
    return rho


def _window_integrand(win: _PVWindow):
    def folded(d):
        w = bump(d, win.h)
        sub = win.residue * w / d
        plus = np.asarray(win.local(d), dtype=float) - sub
        minus = np.asarray(win.local(-d), dtype=float) + sub
        return plus + minus
    return folded


def _integrate_span(eng: _Engine, f, lo: float, hi: float, points: Sequence[float],
                    windows: Sequence[_PVWindow], tol: float):
    """Integrate over ``(lo, hi)`` (endpoints may be infinite) and return ``(value, err)``."""
    windows = sorted(windows, key=lambda w: w.s)
    spans = [(w.s - w.h, w.s + w.h) for w in windows]

    def inside(p):
        return any(l <= p <= r for l, r in spans)

    bps = sorted({float(p) for p in points if lo < p < hi and not inside(p)}
                 | {e for span in spans for e in span})
    if not bps:
        if math.isinf(lo) and math.isinf(hi):
            bps = [0.0]
        elif math.isinf(lo):
            bps = [hi - 1.0]
        elif math.isinf(hi):
            bps = [lo + 1.0]
    value = 0.0
    err = 0.0
    if math.isinf(lo) and math.isinf(hi):
        # symmetric core, tails folded: the limit at infinity is taken symmetrically
        L = max(abs(bps[0]), abs(bps[-1]), 1.0)
        bps = sorted(set(bps) | {-L, L})
        v, e = eng.tail(lambda x: f(x) + f(-x), L, 1.0, tol)
        value += v
        err += e
        lo, hi = -L, L
    edges = [lo] + bps + [hi]
    widx = 0
    for left, right in zip(edges[:-1], edges[1:]):
        if right <= left:
            continue
        if widx < len(windows) and left == spans[widx][0] and right == spans[widx][1]:
            win = windows[widx]
            widx += 1
            v, e = eng.kronrod(_window_integrand(win), 0.0, win.h, tol)
        elif math.isinf(left):
            v, e = eng.tail(f, right, -1.0, tol)
        elif math.isinf(right):
            v, e = eng.tail(f, left, 1.0, tol)
        else:
            v, e = eng.finite(f, left, right, tol)
        value += v
        err += e
    return value, err


def _window_halfwidth(s: float, neighbours: Sequence[float], scale: float = 1.0) -> float:
    gaps = [abs(s - q) for q in neighbours if q != s and not math.isinf(q)]
    nearest = min(gaps) if gaps else math.inf
    return scale * min(1.0, nearest / 2.0) / 2.0


# -- public operations ----------------------------------------------------------

def integrate_line(f: Callable, tol: float = DEFAULT_TOL, *, points: Sequence[float] = (),
                   max_depth: int = DEFAULT_MAX_DEPTH) -> QuadResult:
    """``int_{-inf}^{inf} f(x) dx`` for a smooth, decaying ``f``.

    ``points`` are optional interior breakpoints (peaks, kinks).  The core
    ``[min(points, -1), max(points, 1)]``, split at 0 and at ``points``, is integrated by tanh-sinh with
    bisection, the tails by exp-sinh.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    eng = _Engine(tol=tol, max_depth=max_depth)
    pts = sorted(set(float(p) for p in points) | {-1.0, 0.0, 1.0})
    value, err = _integrate_span(eng, f, -math.inf, math.inf, pts, (), tol)
    return QuadResult(value, err, 1, (), eng.evals, eng.pieces)


def integrate_pv(f: Callable, simple_poles: Sequence[float], tol: float = DEFAULT_TOL, *,
                 residues: Sequence[float] | None = None, points: Sequence[float] = (),
                 interval: tuple[float, float] = (-math.inf, math.inf),
                 max_depth: int = DEFAULT_MAX_DEPTH, bump_scale: float = 1.0,
                 local: Callable | None = None) -> QuadResult:
    """Principal-value integral of ``f`` with the given simple poles.

    Integrates over the whole line unless ``interval`` is given; on the
    whole line the limit at infinity is also taken symmetrically.
    Residues are estimated numerically unless supplied.  ``local(s, d)``
    may provide an accurate evaluation of ``f(s + d)`` near a pole.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    poles = sorted(float(s) for s in simple_poles)
    if any(q - p <= 1e-6 for p, q in zip(poles[:-1], poles[1:])):
        raise ValueError("simple poles must be separated by more than 1e-6")
    if residues is not None and len(residues) != len(poles):
        raise ValueError("one residue per pole is required")
    lo, hi = (float(v) for v in interval)
    if not lo < hi:
        raise ValueError("empty interval")
    if any(not lo < s < hi for s in poles):
        raise ValueError("poles must lie strictly inside the interval")
    eng = _Engine(tol=tol, max_depth=max_depth)
    windows = []
    for i, s in enumerate(poles):
        h = _window_halfwidth(s, list(poles) + [lo, hi], bump_scale)
        loc = (lambda d, s=s: f(s + d)) if local is None else (lambda d, s=s: local(s, d))
        rho = residues[i] if residues is not None else estimate_residue(loc, s, h)
        windows.append(_PVWindow(s, h, float(rho), loc))
    pts = sorted(set(float(p) for p in points) | {-1.0, 1.0})
    value, err = _integrate_span(eng, f, lo, hi, pts, windows, tol)
    return QuadResult(value, err, 1, tuple(poles), eng.evals, eng.pieces)


def lhs_integrand(p: Poly, t: MeroTransform, F: IntegrandSpec) -> Callable:
    """Vectorized ``x -> p(x) F(u(x))``."""
    coeffs = [float(c) for c in p.coeffs]
    a, b = t._arrays

    def f(x):
        x = np.asarray(x, dtype=float)
        d = x[..., None] - b
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            u = x - np.sum(a / d, axis=-1) if b.size else x
            Fu = F(u)
            pv = np.zeros_like(x)
            for c in reversed(coeffs):
                pv = pv * x + c
            return np.where(Fu == 0, 0.0, pv * Fu)

    return f


def _lhs_local(p: Poly, t: MeroTransform, F: IntegrandSpec, x0: float, s: float):
    """Evaluate ``p(x0+d) F(u(x0+d))`` using ``u(x0+d) = s + d*(1 + sum a/((x0-b)(x0+d-b)))``."""
    coeffs = [float(c) for c in p.coeffs]
    a, b = t._arrays
    c0 = x0 - b

    def local(d):
        d = np.asarray(d, dtype=float)
        x = x0 + d
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            slope = 1.0 + np.sum(a / (c0 * (c0 + d[..., None])), axis=-1) if b.size else 1.0
            Fu = F(s + d * slope)
            pv = np.zeros_like(x)
            for c in reversed(coeffs):
                pv = pv * x + c
            return np.where(Fu == 0, 0.0, pv * Fu)

    return local


def integrate_lhs(p: Poly, t: MeroTransform, F: IntegrandSpec, tol: float = DEFAULT_TOL, *,
                  max_depth: int = DEFAULT_MAX_DEPTH, bump_scale: float = 1.0) -> QuadResult:
    """``int p(x) F(u(x)) dx`` split at the poles of ``u`` (n+1 segments).

    Simple poles of ``F`` at ``s`` pull back to the branch roots of ``u = s``,
    one per segment, each treated as a principal value.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    f = lhs_integrand(p, t, F)
    b = [float(v) for v in t.poles.b]
    edges = [-math.inf] + b + [math.inf]
    n_seg = len(edges) - 1
    peaks = branches(t, 0.0).roots
    pv_roots = [branches(t, s).roots for s in F.singularities]
    eng = _Engine(tol=tol, max_depth=max_depth)
    total = 0.0
    err = 0.0
    pv_points = []
    for k in range(n_seg):
        lo, hi = edges[k], edges[k + 1]
        own = sorted((roots[k], s, i) for i, (s, roots) in enumerate(zip(F.singularities, pv_roots)))
        xs = [x0 for x0, _, _ in own]
        windows = []
        for x0, s, i in own:
            h = _window_halfwidth(x0, xs + [lo, hi], bump_scale)
            loc = _lhs_local(p, t, F, x0, s)
            if F.residues is not None:
                rho = float(p(x0)) * F.residues[i] / float(derivative_u(t, x0))
            else:
                rho = estimate_residue(loc, x0, h)
            windows.append(_PVWindow(x0, h, rho, loc))
            pv_points.append(x0)
        eng.context = {"segment": k, "interval": (lo, hi)}
        pts = [peaks[k]] if peaks else []
        v, e = _integrate_span(eng, f, lo, hi, pts, windows, tol)
        total += v
        err += e
    return QuadResult(total, err, n_seg, tuple(pv_points), eng.evals, eng.pieces)
