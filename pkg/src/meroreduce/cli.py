"""Command-line entry point: ``mero {reduce,verify,fixture,branches,iterate}``.

Problem files are JSON documents::

    {
      "transform": [{"a": "pi", "b": 3}, {"a": "pi", "b": -3}],
      "p": [1, 0, 4, 0, 1],
      "F": {"kind": "gaussian", "alpha": 2},
      "quadrature": {"tol": 1e-10, "max_depth": 48},
      "threshold": 1e-7
    }

``transform`` may instead be ``{"cot_truncation": N}`` or
``{"compose": [outer, inner]}``.  ``p`` may be ``{"expr": "x^4 + 4*x^2 + 1"}``;
``F`` may be ``{"expr": "...", "poles": [...], "residues": [...]}``.
Scalars accept numbers or expression strings such as ``"pi"``, ``"2*pi"``, ``"1/3"``.

Exit codes: 0 pass, 1 problem-file error, 2 quadrature failure,
3 identity not certified at the requested threshold.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import exprparse
from .polyalg import EXACT, FLOAT, Poly, format_scalar
from .quad import DEFAULT_MAX_DEPTH, DEFAULT_TOL, IntegrandSpec, QuadratureError, lhs_integrand
from .reduce import reduce_poly
from .symm import PoleSet, PoleSetError
from .transform import MeroTransform, NotInClassError, branch_derivative, branches, compose, \
    cot_truncation, iterate
from .verify import FIXTURES, run_fixture, verify_identity

EXIT_PASS, EXIT_PROBLEM, EXIT_QUAD, EXIT_FAIL = 0, 1, 2, 3


class ProblemError(ValueError):
    def __init__(self, msg: str, where: str = "", line: int | None = None, column: int | None = None):
        loc = f" at {where}" if where else ""
        if line is not None:
            loc += f" (line {line}, column {column})"
        super().__init__(msg + loc)
        self.where = where
        self.line = line
        self.column = column


def parse_scalar(v: Any, where: str, exact: bool = True):
    """Number or constant expression; Fractions when exact and rational."""
    if isinstance(v, bool):
        raise ProblemError("boolean is not a number", where)
    if isinstance(v, int):
        return Fraction(v) if exact else float(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ProblemError("non-finite number", where)
        return Fraction(repr(v)) if exact else v
    if isinstance(v, str):
        try:
            e = exprparse.parse_expression(v)
            val = exprparse.eval_constant(e, exact=exact)
        except exprparse.ExprError as exc:
            raise ProblemError(f"bad scalar {v!r}: {exc}", where) from exc
        if isinstance(val, float) and not math.isfinite(val):
            raise ProblemError(f"non-finite scalar {v!r}", where)
        return val
    raise ProblemError(f"expected a number or expression string, got {type(v).__name__}", where)


@dataclass
class ProblemSpec:
    transform: Any
    p: Any = field(default_factory=lambda: [1])
    F: dict = field(default_factory=lambda: {"kind": "gaussian", "alpha": 1})
    quadrature: dict = field(default_factory=dict)
    threshold: float = 1e-7

    @classmethod
    def from_dict(cls, data: Any) -> "ProblemSpec":
        if not isinstance(data, dict):
            raise ProblemError("problem file must be a JSON object")
        if "transform" not in data:
            raise ProblemError("missing 'transform'")
        unknown = set(data) - {"transform", "p", "F", "quadrature", "threshold"}
        if unknown:
            raise ProblemError(f"unknown keys {sorted(unknown)}")
        spec = cls(
            transform=data["transform"],
            p=data.get("p", [1]),
            F=data.get("F", {"kind": "gaussian", "alpha": 1}),
            quadrature=dict(data.get("quadrature", {})),
            threshold=data.get("threshold", 1e-7),
        )
        spec.validate()
        return spec

    def to_dict(self) -> dict:
        return {"transform": self.transform, "p": self.p, "F": self.F,
                "quadrature": self.quadrature, "threshold": self.threshold}

    def validate(self) -> None:
        _check_transform(self.transform, "transform")
        self.build_p(FLOAT)
        self.build_F()
        q = self.quadrature
        if not isinstance(q, dict) or set(q) - {"tol", "max_depth"}:
            raise ProblemError("quadrature accepts only 'tol' and 'max_depth'", "quadrature")
        if "tol" in q and not (isinstance(q["tol"], (int, float)) and q["tol"] > 0):
            raise ProblemError("tol must be a positive number", "quadrature.tol")
        if "max_depth" in q and not (isinstance(q["max_depth"], int) and q["max_depth"] > 0):
            raise ProblemError("max_depth must be a positive integer", "quadrature.max_depth")
        if not (isinstance(self.threshold, (int, float)) and self.threshold > 0):
            raise ProblemError("threshold must be a positive number", "threshold")

    # -- builders ------------------------------------------------------------
    def pole_data_rational(self) -> bool:
        try:
            self.build_transform(EXACT)
            self.build_p(EXACT)
        except ProblemError:
            return False
        return True

    def resolve_mode(self, mode: str) -> str:
        if mode == "auto":
            return EXACT if self.pole_data_rational() else FLOAT
        if mode == EXACT and not self.pole_data_rational():
            raise ProblemError("exact mode requires rational pole data and coefficients", "transform")
        return mode

    def build_transform(self, mode: str = FLOAT) -> MeroTransform:
        return _build_transform(self.transform, "transform", mode)

    def build_p(self, mode: str = FLOAT) -> Poly:
        p = self.p
        if isinstance(p, dict):
            if set(p) != {"expr"} or not isinstance(p["expr"], str):
                raise ProblemError("p must be a coefficient list or {'expr': ...}", "p")
            try:
                poly = exprparse.to_poly(exprparse.parse_expression(p["expr"]), mode)
            except exprparse.ExprError as exc:
                raise ProblemError(f"bad polynomial: {exc}", "p.expr") from exc
        elif isinstance(p, list) and p:
            coeffs = [parse_scalar(c, f"p[{i}]", exact=mode == EXACT) for i, c in enumerate(p)]
            if mode == EXACT and any(isinstance(c, float) for c in coeffs):
                raise ProblemError("irrational coefficient in exact mode", "p")
            poly = Poly.new(coeffs, mode)
        else:
            raise ProblemError("p must be a non-empty coefficient list or {'expr': ...}", "p")
        if poly.is_zero():
            raise ProblemError("p must be a nonzero polynomial", "p")
        return poly

    def build_F(self) -> IntegrandSpec:
        F = self.F
        if not isinstance(F, dict):
            raise ProblemError("F must be an object", "F")
        if "expr" in F:
            if set(F) - {"expr", "poles", "residues"}:
                raise ProblemError("F.expr accepts only 'poles' and 'residues'", "F")
            poles = [float(parse_scalar(v, f"F.poles[{i}]", exact=False))
                     for i, v in enumerate(F.get("poles", []))]
            res = F.get("residues")
            if res is not None:
                res = [float(parse_scalar(v, f"F.residues[{i}]", exact=False)) for i, v in enumerate(res)]
            try:
                return IntegrandSpec.from_expr(F["expr"], poles, res)
            except exprparse.ExprError as exc:
                raise ProblemError(f"bad F expression: {exc}", "F.expr") from exc
            except ValueError as exc:
                raise ProblemError(str(exc), "F") from exc
        kind = F.get("kind")
        if kind == "gaussian":
            if set(F) - {"kind", "alpha"}:
                raise ProblemError("gaussian accepts only 'alpha'", "F")
            alpha = float(parse_scalar(F.get("alpha", 1), "F.alpha", exact=False))
            if not alpha > 0:
                raise ProblemError("alpha must be > 0", "F.alpha")
            return IntegrandSpec.gaussian(alpha)
        if kind in ("csch", "sech"):
            if set(F) != {"kind"}:
                raise ProblemError(f"{kind} takes no parameters", "F")
            return IntegrandSpec.csch() if kind == "csch" else IntegrandSpec.sech()
        raise ProblemError(f"unknown F kind {kind!r}", "F.kind")

    def tol(self, override: float | None = None) -> float:
        return float(override if override is not None else self.quadrature.get("tol", DEFAULT_TOL))

    def max_depth(self) -> int:
        return env_max_depth(int(self.quadrature.get("max_depth", DEFAULT_MAX_DEPTH)))


def env_max_depth(default: int) -> int:
    """``MERO_MAX_DEPTH`` if set, else ``default``."""
    env = os.environ.get("MERO_MAX_DEPTH")
    if not env:
        return default
    try:
        depth = int(env)
    except ValueError as exc:
        raise ProblemError(f"MERO_MAX_DEPTH must be an integer, got {env!r}") from exc
    if depth < 1:
        raise ProblemError(f"MERO_MAX_DEPTH must be >= 1, got {depth}")
    return depth


def _check_transform(spec: Any, where: str) -> None:
    if isinstance(spec, list):
        for i, term in enumerate(spec):
            if not isinstance(term, dict) or set(term) != {"a", "b"}:
                raise ProblemError("pole term must be an object with exactly 'a' and 'b'", f"{where}[{i}]")
            parse_scalar(term["a"], f"{where}[{i}].a", exact=False)
            parse_scalar(term["b"], f"{where}[{i}].b", exact=False)
        return
    if isinstance(spec, dict):
        if len(spec) != 1:
            raise ProblemError("exactly one transform form is required", where)
        (key, val), = spec.items()
        if key == "cot_truncation":
            if isinstance(val, bool) or not isinstance(val, int) or val < 0:
                raise ProblemError("cot_truncation needs a nonnegative integer", f"{where}.cot_truncation")
            return
        if key == "compose":
            if not isinstance(val, list) or len(val) != 2:
                raise ProblemError("compose needs [outer, inner]", f"{where}.compose")
            _check_transform(val[0], f"{where}.compose[0]")
            _check_transform(val[1], f"{where}.compose[1]")
            return
        raise ProblemError(f"unknown transform form {key!r}", where)
    raise ProblemError("transform must be a pole list or an object", where)


def _build_transform(spec: Any, where: str, mode: str) -> MeroTransform:
    exact = mode == EXACT
    if isinstance(spec, list):
        terms = []
        for i, term in enumerate(spec):
            a = parse_scalar(term["a"], f"{where}[{i}].a", exact=exact)
            b = parse_scalar(term["b"], f"{where}[{i}].b", exact=exact)
            if exact and (isinstance(a, float) or isinstance(b, float)):
                raise ProblemError("irrational pole data in exact mode", f"{where}[{i}]")
            terms.append((a, b))
        try:
            return MeroTransform(PoleSet.new(terms, mode))
        except PoleSetError as exc:
            raise ProblemError(str(exc), where) from exc
    (key, val), = spec.items()
    if key == "cot_truncation":
        t = cot_truncation(val)
        return t if exact else MeroTransform(t.poles.to_float())
    outer = _build_transform(val[0], f"{where}.compose[0]", mode)
    inner = _build_transform(val[1], f"{where}.compose[1]", mode)
    return compose(outer, inner)


def load_spec(path: str) -> ProblemSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemError(f"cannot read problem file: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON: {exc.msg}", path, exc.lineno, exc.colno) from exc
    return ProblemSpec.from_dict(data)


# -- report helpers ---------------------------------------------------------------

def _enc_poly(p: Poly):
    return [format_scalar(c) for c in p.coeffs] if p.field == EXACT else [float(c) for c in p.coeffs]


def _enc_poles(t: MeroTransform):
    if t.poles.field == EXACT:
        return [{"a": format_scalar(a), "b": format_scalar(b)} for a, b in t.poles.terms]
    return [{"a": float(a), "b": float(b)} for a, b in t.poles.terms]


def _json_safe(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return _json_safe(obj.item())
    if isinstance(obj, Fraction):
        return format_scalar(obj)
    return obj


def _emit(report: dict, output: str | None) -> None:
    text = json.dumps(_json_safe(report), indent=2)
    print(text)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def write_plot_csv(path: str, t: MeroTransform, p: Poly, q: Poly, F: IntegrandSpec,
                   samples: int = 2001) -> None:
    """Samples of ``x, p(x) F(u(x)), q(x) F(x)`` on a window covering the poles."""
    b = [float(v) for v in t.poles.b]
    L = max([abs(v) for v in b] + [0.0]) + 5.0
    xs = np.linspace(-L, L, samples)
    xs = xs[np.all(xs[:, None] != np.array(b + [math.nan])[None, :], axis=1)] if b else xs
    lhs = lhs_integrand(p, MeroTransform(t.poles.to_float()), F)(xs)
    qc = [float(c) for c in q.coeffs]
    qx = np.zeros_like(xs)
    for c in reversed(qc):
        qx = qx * xs + c
    with np.errstate(all="ignore"):
        rhs = qx * F(xs)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "lhs_integrand", "rhs_integrand"])
        for row in zip(xs, lhs, rhs):
            w.writerow([repr(float(v)) for v in row])


# -- commands ------------------------------------------------------------------------

def cmd_reduce(args) -> int:
    spec = load_spec(args.spec)
    mode = spec.resolve_mode(args.mode)
    t = spec.build_transform(mode)
    p = spec.build_p(mode)
    red = reduce_poly(t.poles, p)
    report = {"command": "reduce", "problem": spec.to_dict(), "mode": red.q.field,
              "poles": _enc_poles(t), **red.to_dict()}
    _emit(report, args.output)
    return EXIT_PASS


def _verify_report(spec: ProblemSpec, t: MeroTransform, args, command: str, extra: dict | None = None):
    p = spec.build_p(FLOAT)
    F = spec.build_F()
    threshold = args.threshold if args.threshold is not None else spec.threshold
    rep = verify_identity(t, p, F, spec.tol(args.tol), threshold, max_depth=spec.max_depth(),
                          problem=spec.to_dict())
    out = {"command": command, **rep.to_dict(), "poles": _enc_poles(t)}
    if extra:
        out.update(extra)
    if getattr(args, "plot_csv", None):
        write_plot_csv(args.plot_csv, t, p, rep.q, F)
        out["plot_csv"] = args.plot_csv
    _emit(out, args.output)
    if rep.error_kind == "quadrature":
        return EXIT_QUAD
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    spec = load_spec(args.spec)
    t = spec.build_transform(spec.resolve_mode(args.mode))
    return _verify_report(spec, t, args, "verify")


def cmd_iterate(args) -> int:
    spec = load_spec(args.spec)
    t = spec.build_transform(spec.resolve_mode(args.mode))
    if args.times < 1:
        raise ProblemError("--times must be >= 1", "--times")
    tk = iterate(t, args.times)
    return _verify_report(spec, tk, args, "iterate", {"times": args.times,
                                                       "rational": str(tk.rational)})


def cmd_fixture(args) -> int:
    kw = {}
    if args.a is not None:
        kw["a"] = args.a
    if args.b is not None:
        kw["b"] = args.b
    if args.N is not None:
        kw["N"] = args.N
    depth = env_max_depth(DEFAULT_MAX_DEPTH)
    t0 = time.perf_counter()
    try:
        rep = run_fixture(args.name, tol=args.tol or DEFAULT_TOL, max_depth=depth, **kw)
    except (KeyError, ValueError) as exc:
        raise ProblemError(str(exc), "fixture") from exc
    if args.threshold is not None:
        rep.threshold = args.threshold
    out = {"command": "fixture", "name": args.name, **rep.to_dict(),
           "timing_s": time.perf_counter() - t0}
    _emit(out, args.output)
    if rep.error_kind == "quadrature":
        return EXIT_QUAD
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_branches(args) -> int:
    spec = load_spec(args.spec)
    t = spec.build_transform(spec.resolve_mode(args.mode))
    bs = branches(t, args.u)
    beta1 = float(t.poles.beta1)
    rows = [{"segment": k, "root": r, "dx_du": branch_derivative(t, r)} for k, r in enumerate(bs.roots)]
    target = args.u + beta1
    ok = abs(bs.root_sum - target) <= 1e-9 * (1.0 + abs(target))
    out = {"command": "branches", "problem": spec.to_dict(), "u": args.u, "table": rows,
           "root_sum": bs.root_sum, "u_plus_beta1": target, "sigma1_check": ok}
    _emit(out, args.output)
    return EXIT_PASS if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mero", description="Meromorphic reduction of integrals.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("spec", metavar="PROBLEM", help="problem file (JSON)")
            p.add_argument("--mode", choices=["auto", EXACT, FLOAT], default="auto")
        p.add_argument("--output", help="also write the report to this path")

    def quad_flags(p):
        p.add_argument("--tol", type=float)
        p.add_argument("--threshold", type=float)

    p = sub.add_parser("reduce", help="print the reduced polynomial q")
    common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="integrate both sides and compare")
    common(p)
    quad_flags(p)
    p.add_argument("--plot-csv", dest="plot_csv")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("iterate", help="verify the identity for the k-fold self-composition")
    common(p)
    quad_flags(p)
    p.add_argument("--times", type=int, default=2)
    p.add_argument("--plot-csv", dest="plot_csv")
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("fixture", help="run a worked example")
    p.add_argument("name", choices=FIXTURES)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--N", type=int)
    quad_flags(p)
    common(p, spec=False)
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("branches", help="list the branch roots x_k(u)")
    common(p)
    p.add_argument("--u", type=float, required=True)
    p.set_defaults(func=cmd_branches)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ProblemError, PoleSetError, NotInClassError) as exc:
        _emit({"command": args.command, "error": {"kind": "problem", "message": str(exc)}}, None)
        return EXIT_PROBLEM
    except QuadratureError as exc:
        _emit({"command": args.command, "error": {"kind": "quadrature", "message": str(exc),
                                                   "best_estimate": exc.value}}, None)
        return EXIT_QUAD


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
