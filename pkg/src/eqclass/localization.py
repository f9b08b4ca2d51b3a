"""Fixed-point localization: local classes, integrals, residues, normal forms.

Localized classes live over multiplicative variables only (``T1.., y``);
additive variables (``t1..``) appear in Euler classes, integrals and the
outputs of :func:`csm_limit`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .arith.context import VarContext
from .arith.poly import LaurentPoly
from .arith.ratfun import RatFun, canonical_factor, substitute, sum_or_zero
from .arith.series import PoleError, PowerSeries, series_exp, series_expand
from .torus import (Y_CTX, SpaceModel, Weight, check_weight, linear_form, mult_name,
                    weight_monomial)


class NotPolynomialError(ArithmeticError):
    """A result that must be a (Laurent) polynomial kept a denominator."""


def class_context(names: Sequence[str], extra: Sequence[str] = ()) -> VarContext:
    """Context of multiplicative partners of ``names`` followed by ``extra`` and y."""
    out = [mult_name(n) for n in names] + [n for n in extra if n != "y"]
    return VarContext(out + ["y"])


def additive_context(names: Sequence[str]) -> VarContext:
    return VarContext(tuple(names))


@dataclass(frozen=True)
class LocalizedClass:
    """td_y(X -> M)|_p / e(p) as a rational function; ``label`` names the point."""

    value: RatFun
    label: str = ""

    def __str__(self):
        return str(self.value)

    def at_y(self, v) -> RatFun:
        return specialize_y(self.value, v)


@dataclass(frozen=True)
class NormalForm:
    W: LaurentPoly
    weights: tuple[Weight, ...]


def _value(c) -> RatFun:
    return c.value if isinstance(c, LocalizedClass) else c


def specialize_y(f: RatFun, v) -> RatFun:
    if "y" not in f.ctx:
        return f
    return substitute(f, {"y": v})


# ------------------------------------------------------------ local classes
def euler_class(weights: Iterable[Sequence[int]], ctx: VarContext,
                names: Sequence[str] | None = None) -> RatFun:
    """Product of the additive forms of ``weights`` over ``ctx``."""
    names = names or ctx.names
    out = LaurentPoly.const(ctx, 1)
    for w in weights:
        out = out * linear_form(check_weight(w), ctx, names)
    return RatFun(out)


def smooth_local_class(weights: Iterable[Sequence[int]], ctx: VarContext,
                       names: Sequence[str], with_y: bool = True) -> RatFun:
    """prod (1 + y m(w)) / (1 - m(w)); ``names`` are the additive names of the
    weight coordinates, whose multiplicative partners must lie in ``ctx``."""
    one = LaurentPoly.const(ctx, 1)
    num = one
    dens = []
    yv = LaurentPoly.var(ctx, "y") if with_y and "y" in ctx else None
    for w in weights:
        m = weight_monomial(check_weight(w), ctx, names)
        if yv is not None:
            num = num * (one + yv * m)
        dens.append((one - m, 1))
    return RatFun.from_parts(num, dens)


# --------------------------------------------------------------- integrals
def over_euler(a: RatFun, weights: Iterable[Sequence[int]], ctx: VarContext,
               names: Sequence[str]) -> RatFun:
    """a / e(p), keeping each linear form as its own denominator factor."""
    dens = list(a.factors) + [(linear_form(check_weight(w), ctx, names), 1) for w in weights]
    return RatFun.from_parts(a.num, dens)


def integrate(space: SpaceModel, restrictions: Mapping[str, RatFun] | Callable,
              ctx: VarContext | None = None, require_polynomial: bool = True,
              mapper: Callable | None = None) -> RatFun:
    """sum_p a|_p / e(p) over the fixed points (additive convention).

    ``restrictions`` maps labels to values or is a callable on FixedPoint.
    """
    ctx = ctx or additive_context(space.names)
    terms = []
    for p in space.points:
        a = restrictions(p) if callable(restrictions) else restrictions[p.label]
        if not isinstance(a, RatFun):
            a = RatFun.const(ctx, a) if not isinstance(a, LaurentPoly) else RatFun(a)
        terms.append(over_euler(a, p.ambient, ctx, space.names))
    total = sum_or_zero(terms, ctx, mapper=mapper)
    if require_polynomial and not total.is_polynomial():
        raise NotPolynomialError(f"integral is not polynomial: {total}")
    return total


def _as_y_poly(f: RatFun, what: str) -> LaurentPoly:
    if not f.is_polynomial():
        raise NotPolynomialError(f"{what} is not polynomial: {f}")
    extra = f.num.variables() - {"y"}
    if extra:
        raise NotPolynomialError(f"{what} still depends on {sorted(extra)}")
    if not f.num:
        return LaurentPoly.zero(Y_CTX)
    return f.num.rename(Y_CTX)


def chi_y_genus(space: SpaceModel, tangent: Mapping[str, Sequence[Weight]] | None = None,
                mapper: Callable | None = None) -> LaurentPoly:
    """sum_p prod (1 + y m)/(1 - m) over smooth points; a polynomial in y."""
    ctx = class_context(space.names)
    terms = []
    for p in space.points:
        ws = tangent[p.label] if tangent is not None else p.tangent
        if ws is None:
            raise ValueError(f"point {p.label} has no tangent weights")
        terms.append(smooth_local_class(ws, ctx, space.names))
    return _as_y_poly(sum_or_zero(terms, ctx, mapper=mapper), "chi_y genus")


def residue_at_infinity(f: RatFun, z: str) -> RatFun:
    """Res_{z=inf} f = -(coefficient of 1/z in the expansion of f at infinity)."""
    ctx = f.ctx
    num = f.num.coefficients_in(z)
    den = f.den.coefficients_in(z)
    if not num:
        return RatFun.zero(ctx)
    a = max(num)
    b = max(den)
    # f(1/w) = w^(b-a) * N~(w)/D~(w); the 1/z coefficient is [w^(1-b+a)] N~/D~
    k = 1 - b + a
    if k < 0:
        return RatFun.zero(ctx)
    zero = LaurentPoly.zero(ctx)
    nrev = [RatFun(num.get(a - i, zero)) for i in range(k + 1)]
    drev = [RatFun(den.get(b - i, zero)) for i in range(k + 1)]
    d0 = drev[0].inverse()
    q: list[RatFun] = []
    for i in range(k + 1):
        acc = nrev[i]
        for j in range(1, i + 1):
            if drev[j]:
                acc = acc - drev[j] * q[i - j]
        q.append((acc * d0).reduce())
    return -q[k]


def extract_singular(global_chi_y: LaurentPoly | RatFun, smooth_contribs: Iterable,
                     ctx: VarContext, label: str = "") -> LocalizedClass:
    """global chi_y minus the smooth contributions: the class at the one singular point."""
    g = global_chi_y
    if isinstance(g, LaurentPoly):
        g = RatFun(g.rename(ctx)) if g.ctx is not ctx else RatFun(g)
    terms = [g] + [-_value(c) for c in smooth_contribs]
    return LocalizedClass(sum_or_zero(terms, ctx), label)


def normal_form(c, weights: Sequence[Weight], names: Sequence[str]) -> NormalForm:
    """W = c * prod(1 - m(w)); raises NotPolynomialError if W keeps a denominator."""
    f = _value(c)
    ctx = f.ctx
    one = LaurentPoly.const(ctx, 1)
    for w in weights:
        unit, canon = canonical_factor(one - weight_monomial(check_weight(w), ctx, names))
        f = f.cancel_against(canon) * unit if canon != 1 else f * unit
    f = f.reduce()
    if not f.is_polynomial():
        raise NotPolynomialError(f"numerator over the given weights is not polynomial: {f}")
    return NormalForm(f.num, tuple(tuple(w) for w in weights))


# -------------------------------------------------------------- CSM limit
def csm_limit(c, direction: Mapping[str, LaurentPoly], tau_ctx: VarContext,
              max_cap: int = 256) -> RatFun:
    """lim_{u->0} c(y = u - 1, T_i = exp(-u tau_i)) as a rational function over ``tau_ctx``.

    ``direction`` maps each multiplicative variable of ``c`` (other than y) to
    a linear form over ``tau_ctx``.  Raises PoleError with the pole order.
    """
    f = _value(c)
    u_ctx = VarContext(("u",))
    one = LaurentPoly.const(tau_ctx, 1)

    def exp_binding(form: LaurentPoly):
        return lambda cap: series_exp(PowerSeries(u_ctx, cap, {(1,): -form}))

    bindings = {}
    for name in f.ctx.names:
        if name == "y":
            bindings[name] = lambda cap: PowerSeries(u_ctx, cap, {(0,): -one, (1,): one})
        elif name in direction:
            form = direction[name]
            if form.ctx is not tau_ctx:
                raise ValueError(f"direction for {name} is not over {tau_ctx}")
            bindings[name] = exp_binding(form)
        elif name in f.num.variables() or any(name in g.variables() for g, _ in f.factors):
            raise ValueError(f"no direction given for {name}")
    if not bindings:
        return RatFun(f.num.rename(tau_ctx)) if f.num.is_const() or not f.num else f
    s = series_expand(f, bindings, 0, coeff_ctx=tau_ctx, max_cap=max_cap)
    c0 = s.constant()
    if isinstance(c0, RatFun):
        return c0.reduce()
    if isinstance(c0, LaurentPoly):
        return RatFun(c0)
    return RatFun.const(tau_ctx, c0)


__all__ = [
    "LocalizedClass", "NormalForm", "NotPolynomialError", "PoleError",
    "additive_context", "chi_y_genus", "class_context", "csm_limit", "euler_class",
    "extract_singular", "integrate", "over_euler", "normal_form", "residue_at_infinity",
    "smooth_local_class", "specialize_y",
]
