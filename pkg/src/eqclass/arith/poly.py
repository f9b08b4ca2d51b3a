"""Sparse multivariate Laurent polynomials with exact rational coefficients."""

from __future__ import annotations

import heapq
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .context import EXPONENT_LIMIT, ContextError, VarContext

Coeff = int | Fraction


def qnorm(c) -> Coeff:
    """Return ``c`` as an int when integral, else as a Fraction."""
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return qnorm(Fraction(c.numerator, c.denominator))
    raise TypeError(f"not an exact rational: {c!r}")


def qdiv(a: Coeff, b: Coeff) -> Coeff:
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r == 0:
            return q
        return Fraction(a, b)
    return qnorm(Fraction(a) / b)


class NotDivisibleError(ArithmeticError):
    pass


class LaurentPoly:
    """Immutable sparse Laurent polynomial.

    ``terms`` maps packed monomial keys (see :mod:`.context`) to nonzero
    int/Fraction coefficients.
    """

    __slots__ = ("ctx", "terms", "_bound", "_hash")

    def __init__(self, ctx: VarContext, terms: Mapping[int, Coeff] | None = None,
                 bound: int | None = None, _clean: bool = False):
        self.ctx = ctx
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            self.terms = {k: qnorm(c) for k, c in terms.items() if c}
        self._bound = bound
        self._hash = None

    # ------------------------------------------------------------ builders
    @classmethod
    def zero(cls, ctx):
        return cls(ctx, {}, 0, True)

    @classmethod
    def const(cls, ctx, c):
        c = qnorm(c)
        return cls(ctx, {0: c} if c else {}, 0, True)

    @classmethod
    def monomial(cls, ctx, exps: Sequence[int], c=1):
        c = qnorm(c)
        if not c:
            return cls.zero(ctx)
        bound = max([abs(e) for e in exps] + [abs(sum(exps))]) if exps else 0
        return cls(ctx, {ctx.pack(exps): c}, bound, True)

    @classmethod
    def var(cls, ctx, name: str):
        if name not in ctx:
            raise ContextError(f"unknown variable {name!r} in {ctx}")
        return cls(ctx, {ctx.var_key(name): 1}, 1, True)

    @classmethod
    def from_exps(cls, ctx, items: Iterable[tuple[Sequence[int], Coeff]]):
        terms: dict[int, Coeff] = {}
        bound = 0
        for exps, c in items:
            k = ctx.pack(exps)
            bound = max([bound, abs(sum(exps))] + [abs(e) for e in exps])
            terms[k] = terms.get(k, 0) + c
        return cls(ctx, terms, bound)

    # ---------------------------------------------------------- inspection
    @property
    def bound(self) -> int:
        if self._bound is None:
            b = 0
            for k in self.terms:
                exps = self.ctx.unpack(k)
                b = max([b, abs(sum(exps))] + [abs(e) for e in exps])
            self._bound = b
        return self._bound

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def const_value(self) -> Coeff:
        if not self.is_const():
            raise ValueError("not a constant")
        return self.terms.get(0, 0)

    def constant_term(self) -> Coeff:
        return self.terms.get(0, 0)

    def items(self):
        """(exponent tuple, coefficient) pairs, unordered."""
        unpack = self.ctx.unpack
        return [(unpack(k), c) for k, c in self.terms.items()]

    def sorted_items(self, descending: bool = False):
        """Terms in display order: ascending total degree, then lex."""
        unpack = self.ctx.unpack
        keys = sorted(self.terms, key=lambda k: (self.ctx.degree(k), -k))
        if descending:
            keys.reverse()
        return [(unpack(k), self.terms[k]) for k in keys]

    def leading(self) -> tuple[int, Coeff]:
        """Leading (key, coefficient) in graded lex order."""
        k = max(self.terms)
        return k, self.terms[k]

    def min_exponents(self) -> tuple[int, ...]:
        if not self.terms:
            return (0,) * self.ctx.nvars
        it = iter(self.terms)
        mins = list(self.ctx.unpack(next(it)))
        for k in it:
            for i, e in enumerate(self.ctx.unpack(k)):
                if e < mins[i]:
                    mins[i] = e
        return tuple(mins)

    def max_exponents(self) -> tuple[int, ...]:
        if not self.terms:
            return (0,) * self.ctx.nvars
        it = iter(self.terms)
        maxs = list(self.ctx.unpack(next(it)))
        for k in it:
            for i, e in enumerate(self.ctx.unpack(k)):
                if e > maxs[i]:
                    maxs[i] = e
        return tuple(maxs)

    def degree_in(self, name: str) -> int:
        i = self.ctx.index[name]
        return max(self.ctx.unpack(k)[i] for k in self.terms)

    def variables(self) -> set[str]:
        used = set()
        for k in self.terms:
            for name, e in zip(self.ctx.names, self.ctx.unpack(k)):
                if e:
                    used.add(name)
        return used

    # ------------------------------------------------------------ equality
    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.ctx is other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_const() and self.terms.get(0, 0) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.names, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        from .expr import format_poly

        return f"LaurentPoly({format_poly(self)!r})"

    def __str__(self):
        from .expr import format_poly

        return format_poly(self)

    # ---------------------------------------------------------- arithmetic
    def _check(self, other):
        if other.ctx is not self.ctx:
            raise ContextError(f"context mismatch: {self.ctx} vs {other.ctx}")

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.const(self.ctx, other)
        return None

    def __neg__(self):
        return LaurentPoly(self.ctx, {k: -c for k, c in self.terms.items()},
                           self._bound, True)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for k, c in b.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return LaurentPoly(self.ctx, out, _max_bound(self, other), True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) - c
            if v:
                out[k] = v
            else:
                del out[k]
        return LaurentPoly(self.ctx, out, _max_bound(self, other), True)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def scale(self, c) -> "LaurentPoly":
        c = qnorm(c)
        if not c:
            return LaurentPoly.zero(self.ctx)
        if c == 1:
            return self
        return LaurentPoly(self.ctx, {k: v * c for k, v in self.terms.items()},
                           self._bound, True)

    def shift(self, exps: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial with exponent vector ``exps``."""
        if not any(exps):
            return self
        m = self.ctx.pack(exps)
        b = max([abs(e) for e in exps] + [abs(sum(exps))])
        return self._shift_key(m, b)

    def _shift_key(self, m: int, b: int) -> "LaurentPoly":
        bound = self.bound + b
        if bound > EXPONENT_LIMIT:
            raise OverflowError("exponent overflow in monomial shift")
        return LaurentPoly(self.ctx, {k + m: c for k, c in self.terms.items()},
                           bound, True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._check(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return LaurentPoly.zero(self.ctx)
        bound = self.bound + other.bound
        if bound > EXPONENT_LIMIT:
            raise OverflowError("exponent overflow in multiplication")
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (kb, cb), = b.items()
            if cb == 1:
                return LaurentPoly(self.ctx, {k + kb: c for k, c in a.items()},
                                   bound, True)
            return LaurentPoly(self.ctx, {k + kb: c * cb for k, c in a.items()},
                               bound, True)
        out: dict[int, Coeff] = {}
        get = out.get
        bitems = list(b.items())
        for ka, ca in a.items():
            for kb, cb in bitems:
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return LaurentPoly(self.ctx, {k: c for k, c in out.items() if c},
                           bound, True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            if not self.is_monomial():
                raise ValueError("negative power of a non-monomial Laurent polynomial")
            (k, c), = self.terms.items()
            if self.bound * -e > EXPONENT_LIMIT:
                raise OverflowError("exponent overflow in power")
            return LaurentPoly(self.ctx, {k * e: qdiv(1, c) ** -e}, self.bound * -e, True)
        if self.bound * e > EXPONENT_LIMIT:
            raise OverflowError("exponent overflow in power")
        if len(self.terms) == 1:
            (k, c), = self.terms.items()
            return LaurentPoly(self.ctx, {k * e: c**e}, self.bound * e, True)
        result = LaurentPoly.const(self.ctx, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # ------------------------------------------------------------ division
    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Quotient ``self / other``; raises NotDivisibleError if inexact."""
        q = self.try_div(other)
        if q is None:
            raise NotDivisibleError("polynomial division is not exact")
        return q

    def try_div(self, other: "LaurentPoly") -> "LaurentPoly | None":
        self._check(other)
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self:
            return self
        ctx = self.ctx
        if len(other.terms) == 1:
            (k, c), = other.terms.items()
            return LaurentPoly(ctx, {kk - k: qdiv(v, c) for kk, v in self.terms.items()},
                               self.bound + other.bound, True)
        # shift both operands into the polynomial ring, then divide there
        sa = self.min_exponents()
        sb = other.min_exponents()
        ka = ctx.pack(sa) if any(sa) else 0
        kb = ctx.pack(sb) if any(sb) else 0
        num = {k - ka: c for k, c in self.terms.items()}
        den = {k - kb: c for k, c in other.terms.items()}
        lead = max(den)
        lc = den[lead]
        lead_exps = ctx.unpack(lead)
        rest = [(k - lead, c) for k, c in den.items() if k != lead]
        heap = [-k for k in num]
        heapq.heapify(heap)
        quot: dict[int, Coeff] = {}
        unpack = ctx.unpack
        while heap:
            k = -heapq.heappop(heap)
            c = num.pop(k, 0)
            if not c:
                continue
            qk = k - lead
            # lt(remainder) must be divisible by lt(divisor)
            for e, f in zip(unpack(k), lead_exps):
                if e < f:
                    return None
            qc = qdiv(c, lc)
            quot[qk] = qc
            for dk, dc in rest:
                kk = qk + lead + dk
                old = num.get(kk)
                if old is None:
                    num[kk] = -qc * dc
                    heapq.heappush(heap, -kk)
                else:
                    v = old - qc * dc
                    if v:
                        num[kk] = v
                    else:
                        del num[kk]
        shift = ka - kb
        return LaurentPoly(ctx, {k + shift: c for k, c in quot.items()},
                           self.bound + other.bound, True)

    def content(self) -> Fraction:
        """Positive rational c with self / c having coprime integer coefficients."""
        from math import gcd, lcm

        g = 0
        l = 1
        for c in self.terms.values():
            if isinstance(c, int):
                g = gcd(g, c)
            else:
                g = gcd(g, c.numerator)
                l = lcm(l, c.denominator)
        return Fraction(g, l) if g else Fraction(1)

    # ------------------------------------------------------ substitution
    def monomial_map(self, target: VarContext, images: Sequence[tuple[int, Coeff]]
                     ) -> "LaurentPoly":
        """Substitute variable i -> coefficient * monomial, given as packed
        (key in ``target``, coefficient) pairs, one per source variable."""
        unpack = self.ctx.unpack
        out: dict[int, Coeff] = {}
        get = out.get
        zero_vars = [c == 0 for _, c in images]
        for k, c in self.terms.items():
            key = 0
            coef = c
            for e, (ik, ic), z in zip(unpack(k), images, zero_vars):
                if not e:
                    continue
                if z:
                    if e < 0:
                        raise ZeroDivisionError("negative power of a variable bound to 0")
                    coef = 0
                    break
                key += e * ik
                if ic != 1:
                    coef = coef * ic**e if e > 0 else qdiv(coef, ic ** -e)
            if coef:
                out[key] = get(key, 0) + coef
        return LaurentPoly(target, {k: qnorm(c) for k, c in out.items() if c})

    def rename(self, target: VarContext, mapping: Mapping[str, str] | None = None
               ) -> "LaurentPoly":
        """Re-express over ``target``, renaming variables by ``mapping``."""
        mapping = mapping or {}
        used = self.variables()
        images = []
        for name in self.ctx.names:
            new = mapping.get(name, name)
            if new in target:
                images.append((target.var_key(new), 1))
            elif name in used:
                raise ContextError(f"variable {name!r} missing from {target}")
            else:
                images.append((0, 1))
        return self.monomial_map(target, images)

    def evaluate(self, values: Mapping[str, Coeff]) -> Coeff:
        """Evaluate at rational values for every variable that occurs."""
        vals = [values.get(n) for n in self.ctx.names]
        total = 0
        for exps, c in self.items():
            t = c
            for e, v in zip(exps, vals):
                if e:
                    if v is None:
                        raise KeyError("missing value for a variable")
                    t = t * v**e if e > 0 else qdiv(t, v ** -e)
            total += t
        return qnorm(total)

    def coefficients_in(self, name: str) -> dict[int, "LaurentPoly"]:
        """Split as sum_k coeff_k * name**k with coefficients free of ``name``."""
        i = self.ctx.index[name]
        vk = self.ctx.var_keys[i]
        parts: dict[int, dict[int, Coeff]] = {}
        for k, c in self.terms.items():
            e = self.ctx.unpack(k)[i]
            parts.setdefault(e, {})[k - e * vk] = c
        return {e: LaurentPoly(self.ctx, t, None, True) for e, t in parts.items()}


def _max_bound(a: LaurentPoly, b: LaurentPoly):
    if a._bound is None or b._bound is None:
        return None
    return max(a._bound, b._bound)


def poly_product(factors: Iterable[LaurentPoly], ctx: VarContext) -> LaurentPoly:
    """Product of polynomials, smallest operands first."""
    fs = sorted(factors, key=len)
    if not fs:
        return LaurentPoly.const(ctx, 1)
    while len(fs) > 1:
        a = fs.pop(0)
        b = fs.pop(0)
        p = a * b
        # keep the queue ordered by size
        i = 0
        while i < len(fs) and len(fs[i]) < len(p):
            i += 1
        fs.insert(i, p)
    return fs[0]
