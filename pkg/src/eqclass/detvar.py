"""Local Hirzebruch classes of the determinant hypersurface, by induction on n.

The codimension-one Schubert variety X_n = {V : V meets C^n_s} in
Gr_n(C^n_s + C^n_t) contains the germ {det = 0} at the plane C^n_s.  At a
fixed plane with m s-indices A the germ is an m x m determinant germ (entry
weights s_a + t_b for b among the t-indices outside the plane) times a
smooth factor, so the unknown class D_n at C^n_s is chi_y(X_n) minus the
contributions of the smaller germs.

A *frame* fixes the variables: ``"full"`` keeps S1..Sn, T1..Tn; ``"curve"``
restricts to S_a = x^(a-1), T_b = T*x^(b-1), which keeps every denominator
nonzero and makes n = 4 with symbolic y affordable.  The radial
specialization (S = 1, T_b = T) of a normal form is the same either way.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Sequence

from .arith.context import VarContext
from .arith.expr import _parse_coeff, _poly_json
from .arith.poly import LaurentPoly
from .arith.ratfun import RatFun, ratfun_eq, rsum, substitute, sum_or_zero
from .localization import class_context, csm_limit, normal_form, smooth_local_class
from .motivic import Frame, resolve_pushforward
from .torus import (Weight, cell_chi_y, det_chars, schubert_cells, schubert_split,
                    subset_label)

log = logging.getLogger(__name__)

CACHE_ENV = "EQCLASS_CACHE"
CURVE_CTX = VarContext(("x", "T", "y"))
RADIAL_CTX = VarContext(("T", "y"))


class ConsistencyError(ArithmeticError):
    """A closed-form identity failed (signals an upstream error)."""


# ----------------------------------------------------------------- germs
@dataclass(frozen=True)
class GermDescriptor:
    m: int
    det_block_s: tuple[int, ...]     # 1-based s-indices
    det_block_t: tuple[int, ...]     # 1-based t-indices
    smooth_factor_weights: tuple[Weight, ...]
    block_weights: tuple[Weight, ...] = ()


def classify_fixed_point(n: int, I: Sequence[int]) -> GermDescriptor:
    """``I`` holds 0-based indices into (-s1..-sn, t1..tn)."""
    I = tuple(sorted(I))
    if len(I) != n or len(set(I)) != n or not all(0 <= i < 2 * n for i in I):
        raise ValueError(f"{I} is not an n-subset of the 2n characters")
    chars, _ = det_chars(n)
    A, B, block, rest = schubert_split(I, chars, range(n))
    return GermDescriptor(len(A), tuple(a + 1 for a in A), tuple(b - n + 1 for b in B),
                          tuple(rest), tuple(block))


def det_names(n: int) -> tuple[str, ...]:
    return det_chars(n)[1]


def full_context(n: int) -> VarContext:
    return class_context(det_names(n))


def _y_key(y_mode) -> str:
    return "y" if y_mode == "y" else str(Fraction(y_mode))


def _check_y_mode(y_mode):
    if y_mode == "y":
        return "y"
    try:
        return Fraction(y_mode)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"y mode must be 'y' or a rational number, got {y_mode!r}") from exc


# ---------------------------------------------------------------- frames
def _curve_images(n: int) -> list[tuple[int, int]]:
    """Monomial images of S1..Sn, T1..Tn, y in the curve context."""
    ims = []
    for a in range(n):
        ims.append((CURVE_CTX.pack((a, 0, 0)), 1))
    for b in range(n):
        ims.append((CURVE_CTX.pack((b, 1, 0)), 1))
    ims.append((CURVE_CTX.var_key("y"), 1))
    return ims


def _to_frame(f: RatFun, n: int, frame: str) -> RatFun:
    """Carry a full-variable class over (S1..Sn, T1..Tn, y) into ``frame``."""
    if frame == "full":
        return f
    ims = _curve_images(n)
    num = f.num.monomial_map(CURVE_CTX, ims)
    dens = [(g.monomial_map(CURVE_CTX, ims), m) for g, m in f.factors]
    return RatFun.from_parts(num, dens)


def _frame_ctx(n: int, frame: str) -> VarContext:
    return full_context(n) if frame == "full" else CURVE_CTX


def _apply_y(f: RatFun, y_mode) -> RatFun:
    if y_mode == "y":
        return f
    return substitute(f, {"y": y_mode})


def _relabel(small: RatFun, m: int, n: int, germ: GermDescriptor) -> RatFun:
    """Rename S_i -> S_{A[i]}, T_j -> T_{B'[j]} from the size-m context into size n."""
    target = full_context(n)
    mapping = {f"S{i + 1}": f"S{a}" for i, a in enumerate(germ.det_block_s)}
    mapping.update({f"T{j + 1}": f"T{b}" for j, b in enumerate(germ.det_block_t)})
    return small.rename(target, mapping)


def _smooth(weights, n: int, y_mode) -> RatFun:
    ctx = full_context(n)
    f = smooth_local_class(weights, ctx, det_names(n), with_y=(y_mode != 0))
    return f if y_mode in ("y", 0) else substitute(f, {"y": y_mode})


def _contribution(args) -> RatFun:
    small, n, germ, y_mode, frame = args
    c = _relabel(small, germ.m, n, germ) * _smooth(germ.smooth_factor_weights, n, y_mode)
    return _to_frame(c, n, frame)


# ----------------------------------------------------------------- table
def _ratfun_to_store(f: RatFun) -> dict:
    return {"vars": list(f.ctx.names), "num": _poly_json(f.num),
            "factors": [{"poly": _poly_json(g), "mult": m} for g, m in f.factors]}


def _ratfun_from_store(obj: dict) -> RatFun:
    ctx = VarContext(obj["vars"])
    n = ctx.nvars

    def poly(rows):
        return LaurentPoly.from_exps(ctx, [([int(e) for e in r[:n]], _parse_coeff(r[n]))
                                           for r in rows])

    return RatFun.from_parts(poly(obj["num"]), [(poly(f["poly"]), int(f["mult"]))
                                                  for f in obj["factors"]])


class DetClassTable:
    """Write-once memo of D_n keyed by (n, y mode, frame), optionally on disk."""

    def __init__(self, cache_dir: str | os.PathLike | None = None, parallel: int = 1):
        if cache_dir is None:
            cache_dir = os.environ.get(CACHE_ENV) or None
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.parallel = max(1, int(parallel))
        self._classes: dict[tuple, RatFun] = {}
        self._lock = threading.RLock()

    def _path(self, key) -> Path | None:
        if self.cache_dir is None:
            return None
        n, y, frame = key
        return self.cache_dir / f"det_n{n}_y{y.replace('/', '_')}_{frame}.json"

    def _load(self, key) -> RatFun | None:
        path = self._path(key)
        if path is None or not path.exists():
            return None
        try:
            return _ratfun_from_store(json.loads(path.read_text()))
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("ignoring unreadable cache file %s: %s", path, exc)
            return None

    def _store(self, key, f: RatFun):
        path = self._path(key)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(_ratfun_to_store(f), separators=(",", ":")))
        tmp.replace(path)

    def get(self, n: int, y_mode="y", frame: str = "full") -> RatFun:
        y_mode = _check_y_mode(y_mode)
        if frame not in ("full", "curve"):
            raise ValueError(f"unknown frame {frame!r}")
        if n < 1:
            raise ValueError("n must be positive")
        key = (n, _y_key(y_mode), frame)
        with self._lock:
            if key in self._classes:
                return self._classes[key]
            f = self._load(key)
            if f is None:
                f = self._compute(n, y_mode, frame)
                self._store(key, f)
            self._classes[key] = f
            return f

    def _compute(self, n: int, y_mode, frame: str) -> RatFun:
        ctx = _frame_ctx(n, frame)
        if n == 1:
            return RatFun.const(ctx, 1)
        chi = cell_chi_y(schubert_cells(n))
        if y_mode != "y":
            chi_val = chi.evaluate({"y": y_mode})
            terms = [RatFun.const(ctx, chi_val)]
        else:
            terms = [RatFun(chi.monomial_map(ctx, [(ctx.var_key("y"), 1)]))]
        jobs = []
        for I in combinations(range(2 * n), n):
            germ = classify_fixed_point(n, I)
            if 1 <= germ.m < n:
                jobs.append((self.get(germ.m, y_mode, "full"), n, germ, y_mode, frame))
        if self.parallel > 1:
            with ProcessPoolExecutor(self.parallel) as ex:
                contribs = list(ex.map(_contribution, jobs, chunksize=4))
                total = rsum(terms + [-c for c in contribs], reduce=False, mapper=ex.map)
        else:
            contribs = [_contribution(j) for j in jobs]
            total = rsum(terms + [-c for c in contribs], reduce=False)
        return total.reduce()


_DEFAULT_TABLE: DetClassTable | None = None


def default_table() -> DetClassTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = DetClassTable()
    return _DEFAULT_TABLE


# ------------------------------------------------------------ operations
def det_local_class(n: int, y_mode="y", frame: str = "full",
                    table: DetClassTable | None = None) -> RatFun:
    return (table or default_table()).get(n, y_mode, frame)


def ambient_weights(n: int) -> list[Weight]:
    """Weights s_a + t_b of the matrix entries, a-major."""
    return [tuple(int(j == a) + int(j == n + b) for j in range(2 * n))
            for a in range(n) for b in range(n)]


def ambient_class(n: int, y_mode="y", frame: str = "full") -> RatFun:
    y_mode = _check_y_mode(y_mode)
    return _to_frame(_smooth(ambient_weights(n), n, y_mode), n, frame)


def open_cell_class(n: int, y_mode="y", frame: str = "full",
                    table: DetClassTable | None = None) -> RatFun:
    d = det_local_class(n, y_mode, frame, table)
    return (ambient_class(n, y_mode, frame) - d).reduce()


def det_normal_form(n: int, y_mode="y", frame: str = "full",
                    table: DetClassTable | None = None) -> LaurentPoly:
    """W with D_n = W / prod(1 - S_a T_b)."""
    d = det_local_class(n, y_mode, frame, table)
    if frame == "full":
        return normal_form(d, ambient_weights(n), det_names(n)).W
    one = LaurentPoly.const(CURVE_CTX, 1)
    dens = [one - LaurentPoly.monomial(CURVE_CTX, (a + b, 1, 0))
            for a in range(n) for b in range(n)]
    f = d
    for g in dens:
        f = f * g
    f = f.reduce()
    if not f.is_polynomial():
        raise ConsistencyError(f"curve numerator is not polynomial: {f}")
    return f.num


def y0_closed_form(n: int) -> RatFun:
    ctx = full_context(n)
    one = LaurentPoly.const(ctx, 1)
    prod = LaurentPoly.monomial(ctx, [1] * (2 * n) + [0])
    dens = [(one - LaurentPoly.monomial(ctx, w + (0,)), 1) for w in ambient_weights(n)]
    return RatFun.from_parts(one - prod, dens)


def y1_closed_form(n: int) -> RatFun:
    """2^n prod(S_i+S_j) prod(T_i+T_j) prod(S_i T_i) / prod(1 - S_a T_b)."""
    ctx = full_context(n)
    S = [LaurentPoly.var(ctx, f"S{i}") for i in range(1, n + 1)]
    T = [LaurentPoly.var(ctx, f"T{i}") for i in range(1, n + 1)]
    num = LaurentPoly.const(ctx, 2**n)
    for i, j in combinations(range(n), 2):
        num = num * (S[i] + S[j]) * (T[i] + T[j])
    for i in range(n):
        num = num * S[i] * T[i]
    one = LaurentPoly.const(ctx, 1)
    dens = [(one - LaurentPoly.monomial(ctx, w + (0,)), 1) for w in ambient_weights(n)]
    return RatFun.from_parts(num, dens)


def lclass_check(n: int, frame: str = "full", table: DetClassTable | None = None) -> bool:
    oc = open_cell_class(n, 1, frame, table)
    target = _to_frame(y1_closed_form(n), n, frame)
    return ratfun_eq(oc, target)


def radial_open_numerator(n: int, table: DetClassTable | None = None,
                          frame: str | None = None) -> LaurentPoly:
    """P(T, y) with the radial open-cell class equal to P / (1 - T)^(n^2)."""
    frame = frame or ("curve" if n >= 4 else "full")
    W = det_normal_form(n, "y", frame, table)
    if frame == "full":
        ims = [(0, 1)] * n + [(RADIAL_CTX.var_key("T"), 1)] * n + [(RADIAL_CTX.var_key("y"), 1)]
    else:
        ims = [(0, 1), (RADIAL_CTX.var_key("T"), 1), (RADIAL_CTX.var_key("y"), 1)]
    w_rad = W.monomial_map(RADIAL_CTX, ims)
    one = LaurentPoly.const(RADIAL_CTX, 1)
    ambient = (one + LaurentPoly.var(RADIAL_CTX, "y") * LaurentPoly.var(RADIAL_CTX, "T")) ** (n * n)
    return ambient - w_rad


def radial_table(n: int, table: DetClassTable | None = None,
                 frame: str | None = None) -> list[LaurentPoly]:
    """Coefficients p_0..p_{n(n-1)} (polynomials in y) of the radial open-cell sum."""
    P = radial_open_numerator(n, table, frame)
    one = LaurentPoly.const(RADIAL_CTX, 1)
    common = (one + LaurentPoly.var(RADIAL_CTX, "y")) ** n * LaurentPoly.var(RADIAL_CTX, "T") ** n
    Q = P.try_div(common)
    if Q is None:
        raise ConsistencyError("(1+y)^n T^n does not divide the radial numerator")
    y_ctx = VarContext(("y",))
    coeffs = Q.coefficients_in("T")
    top = n * (n - 1)
    if coeffs and (min(coeffs) < 0 or max(coeffs) > top):
        raise ConsistencyError(f"radial sum has T-degrees outside 0..{top}")
    zero = LaurentPoly.zero(y_ctx)
    return [coeffs[k].rename(y_ctx) if k in coeffs else zero for k in range(top + 1)]


def radial_sum(coeffs: Sequence[LaurentPoly]) -> LaurentPoly:
    out = LaurentPoly.zero(RADIAL_CTX)
    Tk = LaurentPoly.const(RADIAL_CTX, 1)
    T = LaurentPoly.var(RADIAL_CTX, "T")
    for p in coeffs:
        if p:
            out = out + p.monomial_map(RADIAL_CTX, [(RADIAL_CTX.var_key("y"), 1)]) * Tk
        Tk = Tk * T
    return out


def positivity_check(poly: LaurentPoly | Sequence[LaurentPoly]) -> bool:
    """True iff substituting y = -1 - delta, T = 1 + S leaves only nonnegative coefficients.

    Accepts a polynomial over (T, y) or a radial coefficient list.
    """
    if not isinstance(poly, LaurentPoly):
        poly = radial_sum(poly)
    ctx = VarContext(("S", "delta"))
    one = LaurentPoly.const(ctx, 1)
    t_img = RatFun(one + LaurentPoly.var(ctx, "S"))
    y_img = RatFun(-one - LaurentPoly.var(ctx, "delta"))
    names = poly.ctx.names
    bindings = {}
    for name in names:
        if name == "T":
            bindings[name] = t_img
        elif name == "y":
            bindings[name] = y_img
        elif name in poly.variables():
            raise ValueError(f"unexpected variable {name!r}")
        else:
            bindings[name] = RatFun.const(ctx, 1)
    r = substitute(RatFun(poly), bindings, ctx)
    if not r.is_polynomial() or min(r.num.min_exponents(), default=0) < 0:
        raise ValueError("positivity check needs a polynomial input")
    return all(c >= 0 for c in r.num.terms.values())


def radial_class(n: int, which: str = "det", table: DetClassTable | None = None) -> RatFun:
    """Radial (S = 1, T_b = T) specialization over (T, y) of D_n or the open cell."""
    frame = "curve" if n >= 4 else "full"
    if which == "det":
        W = det_normal_form(n, "y", frame, table)
        ims = ([(0, 1)] * n + [(RADIAL_CTX.var_key("T"), 1)] * n if frame == "full"
               else [(0, 1), (RADIAL_CTX.var_key("T"), 1)]) + [(RADIAL_CTX.var_key("y"), 1)]
        num = W.monomial_map(RADIAL_CTX, ims)
    elif which == "open":
        num = radial_open_numerator(n, table, frame)
    else:
        raise ValueError(f"unknown class {which!r}")
    one = LaurentPoly.const(RADIAL_CTX, 1)
    return RatFun.from_parts(num, [(one - LaurentPoly.var(RADIAL_CTX, "T"), n * n)])


def csm_det(n: int, which: str = "det", table: DetClassTable | None = None) -> RatFun:
    """CSM limit (T = exp(-u t), y = u - 1, u -> 0) of the radial class."""
    tau = VarContext(("t",))
    f = radial_class(n, which, table)
    return csm_limit(f, {"T": LaurentPoly.var(tau, "t")}, tau)


def kempf_det2(y_mode="y") -> RatFun:
    """D_2 from the resolution {(l, A) : A l = 0} over P^1 = P(C^2_s).

    Over the germ: D_2 = (resolution) - (fiber P^1 over 0) + (the point 0).
    """
    y_mode = _check_y_mode(y_mode)
    frame = Frame(det_names(2), full_context(2), y_mode != 0)
    s1, s2, t1, t2 = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
    add = lambda *ws: tuple(sum(c) for c in zip(*ws))
    neg = lambda w: tuple(-c for c in w)
    at_e1 = (add(s1, neg(s2)), add(s2, t1), add(s2, t2))
    at_e2 = (add(s2, neg(s1)), add(s1, t1), add(s1, t2))
    resolution = resolve_pushforward([at_e1, at_e2], frame)
    fiber = resolve_pushforward([at_e1[:1], at_e2[:1]], frame)
    out = sum_or_zero([resolution, -fiber, RatFun.const(frame.ctx, 1)], frame.ctx).reduce()
    return _apply_y(out, y_mode) if y_mode not in ("y", 0) else out


def extraction_resum(n: int, y_mode="y", table: DetClassTable | None = None) -> bool:
    """Sum of all contributions on X_n (including D_n) equals the cell chi_y."""
    y_mode = _check_y_mode(y_mode)
    ctx = full_context(n)
    total = [det_local_class(n, y_mode, "full", table)]
    for I in combinations(range(2 * n), n):
        germ = classify_fixed_point(n, I)
        if 1 <= germ.m < n:
            total.append(_contribution((det_local_class(germ.m, y_mode, "full", table),
                                        n, germ, y_mode, "full")))
    s = rsum(total)
    chi = cell_chi_y(schubert_cells(n))
    if y_mode == "y":
        target = RatFun(chi.monomial_map(ctx, [(ctx.var_key("y"), 1)]))
    else:
        target = RatFun.const(ctx, chi.evaluate({"y": y_mode}))
    return ratfun_eq(s, target)


def point_label(I: Sequence[int], n: int) -> str:
    names = [f"-s{i + 1}" if i < n else f"t{i - n + 1}" for i in I]
    return "{" + ",".join(names) + "}"


__all__ = [
    "ConsistencyError", "DetClassTable", "GermDescriptor", "ambient_class",
    "ambient_weights", "classify_fixed_point", "csm_det", "det_local_class",
    "det_normal_form", "extraction_resum", "kempf_det2", "lclass_check",
    "open_cell_class", "point_label", "positivity_check", "radial_class",
    "radial_sum", "radial_table", "subset_label", "y0_closed_form", "y1_closed_form",
]
