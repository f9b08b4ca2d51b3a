"""Truncated multivariate power series.

Coefficients are exact rationals, or polynomials / rational functions over a
separate coefficient context (used for limits where some symbols stay
symbolic).  A series carries a total-degree ``cap``; every term of higher
degree is unknown, and arithmetic never claims more precision than its
operands.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Mapping, Sequence

from .context import VarContext
from .poly import LaurentPoly, qnorm
from .ratfun import RatFun


class PoleError(ArithmeticError):
    """Raised when a quotient has a pole at the expansion point."""

    def __init__(self, message: str, order: int | None = None):
        super().__init__(message)
        self.order = order


def _inv(c):
    if isinstance(c, (int, Fraction)):
        return qnorm(Fraction(1) / c)
    if isinstance(c, LaurentPoly):
        if c.is_const():
            return LaurentPoly.const(c.ctx, Fraction(1) / c.const_value())
        return RatFun._raw(c, ()).inverse()
    return 1 / c


class PowerSeries:
    __slots__ = ("ctx", "cap", "terms")

    def __init__(self, ctx: VarContext, cap: int, terms: Mapping[tuple, object] | None = None):
        if cap < 0:
            raise ValueError("cap must be nonnegative")
        self.ctx = ctx
        self.cap = cap
        self.terms = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != ctx.nvars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e}")
            if sum(e) <= cap and c:
                self.terms[e] = qnorm(c) if isinstance(c, (int, Fraction)) else c

    @classmethod
    def const(cls, ctx, cap, c):
        return cls(ctx, cap, {(0,) * ctx.nvars: c})

    @classmethod
    def var(cls, ctx, cap, name):
        e = [0] * ctx.nvars
        e[ctx.index[name]] = 1
        return cls(ctx, cap, {tuple(e): 1})

    def __repr__(self):
        return f"PowerSeries(cap={self.cap}, terms={self.terms!r})"

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, exps: Sequence[int]):
        exps = tuple(exps)
        if sum(exps) > self.cap:
            raise ValueError("coefficient beyond the truncation order")
        return self.terms.get(exps, 0)

    def coefficients(self) -> list:
        """Univariate coefficient list c_0..c_cap."""
        if self.ctx.nvars != 1:
            raise ValueError("coefficients() needs a single series variable")
        return [self.terms.get((k,), 0) for k in range(self.cap + 1)]

    def constant(self):
        return self.terms.get((0,) * self.ctx.nvars, 0)

    def valuation(self) -> int | None:
        """Lowest total degree present, or None if zero to this order."""
        if not self.terms:
            return None
        return min(sum(e) for e in self.terms)

    def truncate(self, cap: int) -> "PowerSeries":
        return PowerSeries(self.ctx, min(cap, self.cap), self.terms)

    # -------------------------------------------------------- arithmetic
    def _other(self, other):
        if isinstance(other, PowerSeries):
            if other.ctx is not self.ctx:
                raise ValueError("series over different variables")
            return other
        return PowerSeries.const(self.ctx, self.cap, other)

    def __add__(self, other):
        other = self._other(other)
        cap = min(self.cap, other.cap)
        out = {}
        for src in (self.terms, other.terms):
            for e, c in src.items():
                if sum(e) <= cap:
                    out[e] = out[e] + c if e in out else c
        return PowerSeries(self.ctx, cap, out)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(self.ctx, self.cap, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(self.ctx, self.cap,
                               {e: c * other for e, c in self.terms.items()})
        other = self._other(other)
        cap = min(self.cap, other.cap)
        out: dict = {}
        b_items = [(e, sum(e), c) for e, c in other.terms.items()]
        for ea, ca in self.terms.items():
            da = sum(ea)
            for eb, db, cb in b_items:
                if da + db > cap:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out[e] + ca * cb if e in out else ca * cb
        return PowerSeries(self.ctx, cap, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = PowerSeries.const(self.ctx, self.cap, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self) -> "PowerSeries":
        c0 = self.constant()
        if not c0:
            raise PoleError("series with zero constant term is not invertible",
                            self.valuation())
        inv0 = _inv(c0)
        h = self * inv0 - 1
        result = PowerSeries.const(self.ctx, self.cap, 1)
        term = PowerSeries.const(self.ctx, self.cap, 1)
        for _ in range(self.cap):
            term = term * (-h)
            if not term:
                break
            result = result + term
        return result * inv0

    def divide_monomial(self, exps: Sequence[int]) -> "PowerSeries":
        """Exact division by a monomial; precision drops by its degree."""
        d = sum(exps)
        out = {}
        for e, c in self.terms.items():
            q = tuple(x - y for x, y in zip(e, exps))
            if any(x < 0 for x in q):
                raise PoleError("series is not divisible by the monomial",
                                max(y - x for x, y in zip(e, exps)))
            out[q] = c
        return PowerSeries(self.ctx, self.cap - d, out)


def series_exp(s: PowerSeries) -> PowerSeries:
    """exp(s) truncated at ``s.cap``; ``s`` must have zero constant term."""
    if s.constant():
        raise ValueError("exp needs a series with zero constant term")
    result = PowerSeries.const(s.ctx, s.cap, 1)
    term = PowerSeries.const(s.ctx, s.cap, 1)
    for k in range(1, s.cap + 1):
        term = term * s
        if not term:
            break
        result = result + term * Fraction(1, factorial(k))
    return result


def _binding_at(b, cap: int) -> PowerSeries:
    if callable(b):
        return b(cap)
    if b.cap < cap:
        raise ValueError(f"binding carries precision {b.cap}, need at least {cap}")
    return b.truncate(cap)


def _poly_series(p: LaurentPoly, bindings: Mapping[str, PowerSeries],
                 series_ctx: VarContext, coeff_ctx: VarContext | None, cap: int,
                 power_cache: dict) -> PowerSeries:
    names = p.ctx.names
    coeff_images = None
    if coeff_ctx is not None:
        coeff_images = [(coeff_ctx.var_key(n), 1) if n in coeff_ctx else None for n in names]
    total = PowerSeries(series_ctx, cap)
    one = PowerSeries.const(series_ctx, cap, 1)
    for exps, c in p.items():
        term = one
        cmono = [0] * len(names)
        for i, (name, e) in enumerate(zip(names, exps)):
            if not e:
                continue
            if name in bindings:
                key = (name, e, cap)
                if key not in power_cache:
                    power_cache[key] = _binding_at(bindings[name], cap) ** e
                term = term * power_cache[key]
            else:
                cmono[i] = e
        if any(cmono):
            if coeff_images is None or any(
                    e and coeff_images[i] is None for i, e in enumerate(cmono)):
                raise ValueError("unbound variable with no coefficient context")
            cpoly = LaurentPoly(p.ctx, {p.ctx.pack(cmono): c}, None, True)
            term = term * cpoly.monomial_map(coeff_ctx, [
                im if im is not None else (0, 1) for im in coeff_images])
        elif coeff_ctx is not None:
            term = term * LaurentPoly.const(coeff_ctx, c)
        else:
            term = term * c
        total = total + term
    return total


def _split_negative(f: RatFun, bindings) -> tuple[LaurentPoly, list, list[int]]:
    """Move negative powers of bound variables out of the numerator/factors.

    Returns (numerator, [(factor, mult)], net exponent vector) where the
    original value equals num/prod(factors) * prod(var**net).
    """
    bound = [n in bindings for n in f.ctx.names]
    net = [0] * f.ctx.nvars

    def cleared(p: LaurentPoly):
        mins = p.min_exponents()
        shift = [-m if (b and m < 0) else 0 for m, b in zip(mins, bound)]
        return p.shift(shift), shift

    num, shift = cleared(f.num)
    for i, x in enumerate(shift):
        net[i] -= x
    factors = []
    for g, m in f.factors:
        g2, shift = cleared(g)
        for i, x in enumerate(shift):
            net[i] += m * x
        factors.append((g2, m))
    return num, factors, net


def series_expand(f: RatFun, bindings: Mapping[str, "PowerSeries | Callable"], cap: int,
                  coeff_ctx: VarContext | None = None,
                  max_cap: int = 4096) -> PowerSeries:
    """Truncated series of ``f`` after substituting series for variables.

    A binding is a PowerSeries or a callable returning the series at a
    requested precision (needed when the precision has to grow).  Variables
    without a binding become coefficients over ``coeff_ctx``.
    A common monomial is cancelled from numerator and denominator before
    inversion; the working precision is raised until the denominator's
    valuation is visible.  Raises PoleError on a genuine pole.
    """
    if not bindings:
        raise ValueError("series_expand needs at least one binding")
    probes = [_binding_at(b, 0) for b in bindings.values()]
    series_ctx = probes[0].ctx
    if any(p.ctx is not series_ctx for p in probes):
        raise ValueError("all bindings must be series over the same variables")
    for name in bindings:
        if name not in f.ctx:
            raise ValueError(f"cannot bind {name!r}: not a variable of {f.ctx}")
    fixed = [b.cap for b in bindings.values() if not callable(b)]
    input_cap = min(fixed) if fixed else max_cap
    num, factors, net = _split_negative(f, bindings)
    ctx = f.ctx
    num_mono = [0] * ctx.nvars
    den_mono = [0] * ctx.nvars
    for i, e in enumerate(net):
        if e > 0:
            num_mono[i] = e
        elif e < 0:
            den_mono[i] = -e
    num = num.shift(num_mono)
    den_extra = LaurentPoly.monomial(ctx, den_mono)
    work = cap
    while True:
        if work > input_cap:
            raise ValueError(
                f"bindings carry precision {input_cap}, need at least {work}")
        cache: dict = {}
        d = _poly_series(den_extra, bindings, series_ctx, coeff_ctx, work, cache)
        for g, m in factors:
            d = d * _poly_series(g, bindings, series_ctx, coeff_ctx, work, cache) ** m
        v = d.valuation()
        if v is None or v + cap > work:
            if work >= max_cap:
                raise PoleError("denominator vanishes to the working precision")
            work = min(max_cap, max(2 * work, (v or 0) + cap, 1))
            continue
        break
    low = [(e, c) for e, c in d.terms.items() if sum(e) == v]
    if len(low) != 1:
        raise PoleError("lowest part of the denominator is not a monomial", v)
    alpha = low[0][0]
    n = _poly_series(num, bindings, series_ctx, coeff_ctx, work, cache)
    nq = n.divide_monomial(alpha)
    dq = d.divide_monomial(alpha)
    return (nq * dq.inverse()).truncate(cap)
