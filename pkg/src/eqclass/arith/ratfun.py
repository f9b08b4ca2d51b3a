"""Exact multivariate rational functions.

A :class:`RatFun` keeps its denominator as a list of canonical factors with
multiplicities.  A canonical factor has no monomial content, coprime integer
coefficients and a positive leading coefficient (graded lex), so the same
factor arising from different places (``1 - S1/S2`` and ``1 - S2/S1``) is
recognised by plain equality.  Sums are formed over the least common
multiple of the factor lists; nothing here ever computes a polynomial GCD.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .context import ContextError, VarContext
from .poly import Coeff, LaurentPoly, poly_product, qdiv, qnorm

Factors = tuple[tuple[LaurentPoly, int], ...]


def canonical_factor(p: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Split ``p`` as ``unit * canon`` with ``unit`` a scaled monomial.

    ``canon`` is the constant 1 when ``p`` itself is a monomial.
    """
    if not p:
        raise ZeroDivisionError("zero polynomial has no canonical form")
    ctx = p.ctx
    if len(p.terms) == 1:
        return p, LaurentPoly.const(ctx, 1)
    mins = p.min_exponents()
    shift = ctx.pack(mins) if any(mins) else 0
    content = p.content()
    lead = max(p.terms)
    if p.terms[lead] < 0:
        content = -content
    terms = {k - shift: qdiv(c, content) for k, c in p.terms.items()}
    canon = LaurentPoly(ctx, terms, None, True)
    unit = LaurentPoly(ctx, {shift: qnorm(content)}, None, True)
    return unit, canon


def factor_sort_key(f: LaurentPoly):
    lead = max(f.terms)
    return (f.ctx.degree(lead), -lead, len(f.terms),
            sorted((-k, str(c)) for k, c in f.terms.items()))


class RatFun:
    """Immutable rational function ``num / prod(factor**mult)``."""

    __slots__ = ("ctx", "num", "factors")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        self.ctx = num.ctx
        if den is None or den == 1:
            self.num = num
            self.factors = ()
            return
        if den.ctx is not num.ctx:
            raise ContextError("numerator and denominator contexts differ")
        r = RatFun.from_parts(num, [(den, 1)])
        self.num, self.factors = r.num, r.factors

    @classmethod
    def _raw(cls, num: LaurentPoly, factors: Factors) -> "RatFun":
        r = object.__new__(cls)
        r.ctx = num.ctx
        if not num:
            r.num, r.factors = num, ()
        else:
            r.num, r.factors = num, factors
        return r

    @classmethod
    def from_parts(cls, num: LaurentPoly, dens: Iterable[tuple[LaurentPoly, int]]
                   ) -> "RatFun":
        """Build ``num / prod(d**m)`` from arbitrary nonzero polynomials ``d``;
        factor order is kept (first occurrence wins)."""
        units: list[LaurentPoly] = []
        counts: dict[LaurentPoly, int] = {}
        for d, m in dens:
            if d.ctx is not num.ctx:
                raise ContextError("denominator factor over a different context")
            if not d:
                raise ZeroDivisionError("denominator factor is zero")
            unit, canon = canonical_factor(d)
            units.append(unit**m)
            if canon != 1:
                counts[canon] = counts.get(canon, 0) + m
        n = num
        for u in units:
            n = n.exact_div(u)
        return cls._raw(n, tuple((f, m) for f, m in counts.items() if m))

    @classmethod
    def const(cls, ctx: VarContext, c) -> "RatFun":
        return cls._raw(LaurentPoly.const(ctx, c), ())

    @classmethod
    def zero(cls, ctx: VarContext) -> "RatFun":
        return cls._raw(LaurentPoly.zero(ctx), ())

    @classmethod
    def var(cls, ctx: VarContext, name: str) -> "RatFun":
        return cls._raw(LaurentPoly.var(ctx, name), ())

    # ---------------------------------------------------------- inspection
    @property
    def den(self) -> LaurentPoly:
        return poly_product((f**m for f, m in self.factors), self.ctx)

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return not self.factors

    def is_const(self) -> bool:
        return not self.factors and self.num.is_const()

    def factor_dict(self) -> dict[LaurentPoly, int]:
        return dict(self.factors)

    def normalized(self) -> tuple[LaurentPoly, LaurentPoly]:
        """(num, den) with den expanded and its leading coefficient positive."""
        den = self.den
        _, lc = den.leading()
        if lc < 0:
            return -self.num, -den
        return self.num, den

    def __repr__(self):
        from .expr import format_expr

        return f"RatFun({format_expr(self, 'factored')!r})"

    def __str__(self):
        from .expr import format_expr

        return format_expr(self, "factored")

    # ---------------------------------------------------------- arithmetic
    def _coerce(self, other) -> "RatFun | None":
        if isinstance(other, RatFun):
            if other.ctx is not self.ctx:
                raise ContextError(f"context mismatch: {self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, LaurentPoly):
            if other.ctx is not self.ctx:
                raise ContextError(f"context mismatch: {self.ctx} vs {other.ctx}")
            return RatFun._raw(other, ())
        if isinstance(other, (int, Fraction)):
            return RatFun.const(self.ctx, other)
        return None

    def __neg__(self):
        return RatFun._raw(-self.num, self.factors)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return sum_or_zero([self, other], self.ctx, reduce=False)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return sum_or_zero([self, -other], self.ctx, reduce=False)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return sum_or_zero([other, -self], self.ctx, reduce=False)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self.num or not other.num:
            return RatFun.zero(self.ctx)
        counts = dict(self.factors)
        for f, m in other.factors:
            counts[f] = counts.get(f, 0) + m
        return RatFun._raw(self.num * other.num, tuple(counts.items()))

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if not self.num:
            raise ZeroDivisionError("division by the zero rational function")
        unit, canon = canonical_factor(self.num)
        num = poly_product((f**m for f, m in self.factors), self.ctx).exact_div(unit)
        if canon == 1:
            return RatFun._raw(num, ())
        return RatFun._raw(num, ((canon, 1),))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return RatFun.const(self.ctx, 1)
        return RatFun._raw(self.num**e, tuple((f, m * e) for f, m in self.factors))

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ratfun_eq(self, other)

    __hash__ = None

    # ------------------------------------------------------- simplification
    def reduce(self, candidates: Iterable[LaurentPoly] | None = None) -> "RatFun":
        """Cancel denominator factors that divide the numerator exactly."""
        if not self.factors:
            return self
        if not self.num:
            return RatFun.zero(self.ctx)
        allowed = None if candidates is None else set(candidates)
        num = self.num
        kept = []
        for f, m in self.factors:
            if allowed is None or f in allowed:
                while m:
                    q = num.try_div(f)
                    if q is None:
                        break
                    num = q
                    m -= 1
            if m:
                kept.append((f, m))
        return RatFun._raw(num, tuple(kept))

    def cancel_against(self, factor: LaurentPoly, power: int = 1) -> "RatFun":
        """Multiply by ``factor**power`` where ``factor`` is canonical."""
        counts = dict(self.factors)
        have = counts.get(factor, 0)
        use = min(have, power)
        if use:
            counts[factor] = have - use
        num = self.num * factor ** (power - use) if power > use else self.num
        return RatFun._raw(num, tuple((f, m) for f, m in counts.items() if m))

    def rename(self, target: VarContext, mapping: Mapping[str, str] | None = None
               ) -> "RatFun":
        """Re-express over ``target`` (renaming variables by ``mapping``)."""
        num = self.num.rename(target, mapping)
        dens = [(f.rename(target, mapping), m) for f, m in self.factors]
        return RatFun.from_parts(num, dens)


def _merge_lcm(items: Sequence[RatFun]) -> dict[LaurentPoly, int]:
    lcm: dict[LaurentPoly, int] = {}
    for r in items:
        for f, m in r.factors:
            if lcm.get(f, 0) < m:
                lcm[f] = m
    return lcm


def _scaled_numerator(args) -> LaurentPoly:
    r, lcm = args
    have = dict(r.factors)
    extra = []
    for f, m in lcm.items():
        k = m - have.get(f, 0)
        if k:
            extra.append(f**k if k > 1 else f)
    if not extra:
        return r.num
    return poly_product([r.num] + extra, r.ctx)


def rsum(items: Iterable[RatFun], reduce: bool = True,
         mapper: Callable | None = None,
         candidates: Iterable[LaurentPoly] | None = None) -> RatFun:
    """Exact sum over the least common multiple of the denominators.

    ``mapper`` (e.g. ``Executor.map``) may parallelise the numerator
    scaling; the reduction is sequential so the result is deterministic.
    With ``reduce`` the superfluous LCM factors are cancelled afterwards.
    """
    items = [r for r in items if r.num]
    if not items:
        raise ValueError("rsum needs a context; use RatFun.zero for empty sums")
    ctx = items[0].ctx
    for r in items:
        if r.ctx is not ctx:
            raise ContextError(f"context mismatch: {ctx} vs {r.ctx}")
    lcm = _merge_lcm(items)
    jobs = [(r, lcm) for r in items]
    nums = list(mapper(_scaled_numerator, jobs)) if mapper else [
        _scaled_numerator(j) for j in jobs]
    total_terms: dict[int, Coeff] = {}
    for n in nums:
        for k, c in n.terms.items():
            v = total_terms.get(k, 0) + c
            if v:
                total_terms[k] = v
            else:
                del total_terms[k]
    total = LaurentPoly(ctx, total_terms, None, True)
    order = sorted(lcm, key=factor_sort_key)
    out = RatFun._raw(total, tuple((f, lcm[f]) for f in order))
    return out.reduce(candidates) if reduce else out


def sum_or_zero(items: Iterable[RatFun], ctx: VarContext, **kw) -> RatFun:
    items = [r for r in items if r.num]
    if not items:
        return RatFun.zero(ctx)
    return rsum(items, **kw)


def ratfun_eq(a: RatFun, b: RatFun) -> bool:
    """Equality by cross-multiplication after dropping shared factors."""
    if a.ctx is not b.ctx:
        raise ContextError(f"context mismatch: {a.ctx} vs {b.ctx}")
    fa = dict(a.factors)
    fb = dict(b.factors)
    for f in list(fa):
        if f in fb:
            c = min(fa[f], fb[f])
            fa[f] -= c
            fb[f] -= c
    ra = [f**m for f, m in fa.items() if m]
    rb = [g**m for g, m in fb.items() if m]
    lhs = poly_product([a.num] + rb, a.ctx) if rb else a.num
    rhs = poly_product([b.num] + ra, b.ctx) if ra else b.num
    return lhs == rhs


def ratfun_arith(a: RatFun, b: RatFun, op: str) -> RatFun:
    if a.ctx is not b.ctx:
        raise ContextError(f"context mismatch: {a.ctx} vs {b.ctx}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ------------------------------------------------------------ substitution
def _as_scaled_monomial(r: RatFun) -> tuple[int, Coeff] | None:
    if r.factors:
        return None
    if not r.num:
        return (0, 0)
    if len(r.num.terms) == 1:
        (k, c), = r.num.terms.items()
        return (k, c)
    return None


def substitute(f: RatFun, bindings: Mapping[str, RatFun | LaurentPoly | int | Fraction],
               target: VarContext | None = None) -> RatFun:
    """Simultaneous substitution of variables by rational functions.

    Binding values live over ``target`` (default: ``f``'s own context);
    unbound variables are carried over by name.
    """
    src = f.ctx
    target = target or src
    vals: dict[str, RatFun] = {}
    for name, v in bindings.items():
        if name not in src:
            raise ContextError(f"cannot bind {name!r}: not a variable of {src}")
        if isinstance(v, RatFun):
            r = v
        elif isinstance(v, LaurentPoly):
            r = RatFun._raw(v, ())
        else:
            r = RatFun.const(target, v)
        if r.ctx is not target:
            raise ContextError(f"binding for {name!r} is over {r.ctx}, expected {target}")
        vals[name] = r
    images = []
    for name in src.names:
        if name in vals:
            images.append(_as_scaled_monomial(vals[name]))
        elif name in target:
            images.append((target.var_key(name), 1))
        else:
            images.append(None if name in f.num.variables()
                          or any(name in g.variables() for g, _ in f.factors)
                          else (0, 1))
            if images[-1] is None:
                raise ContextError(f"unbound variable {name!r} has no image in {target}")
    if all(im is not None for im in images):
        num = f.num.monomial_map(target, images)
        dens = []
        for g, m in f.factors:
            h = g.monomial_map(target, images)
            if not h:
                raise ZeroDivisionError(
                    "denominator vanishes identically after substitution")
            dens.append((h, m))
        return RatFun.from_parts(num, dens)
    # general path: evaluate numerator and each factor by RatFun arithmetic
    out = _subst_poly(f.num, vals, target)
    for g, m in f.factors:
        h = _subst_poly(g, vals, target)
        if not h:
            raise ZeroDivisionError("denominator vanishes identically after substitution")
        out = out / h**m
    return out


def _subst_poly(p: LaurentPoly, vals: Mapping[str, RatFun], target: VarContext) -> RatFun:
    src = p.ctx
    powers: dict[tuple[str, int], RatFun] = {}

    def power(name, e):
        key = (name, e)
        if key not in powers:
            powers[key] = vals[name] ** e
        return powers[key]

    terms = []
    for exps, c in p.items():
        mono = [0] * target.nvars
        term = RatFun.const(target, c)
        for name, e in zip(src.names, exps):
            if not e:
                continue
            if name in vals:
                term = term * power(name, e)
            else:
                mono[target.index[name]] += e
        if any(mono):
            term = term * LaurentPoly.monomial(target, mono)
        terms.append(term)
    return sum_or_zero(terms, target)
