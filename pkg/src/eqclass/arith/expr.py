"""Text and JSON forms of polynomials and rational functions.

Grammar (whitespace insignificant)::

    expr     := term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := base ('^' int)?
    base     := rational | var | '(' expr ')' | '-' base
    rational := int ('/' posint)?
    var      := letter (letter|digit|'_')*

Unary minus binds tighter than ``^`` (``-x^2`` is ``(-x)^2``); the
formatters never emit text where this matters.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from .context import VarContext, sorted_context
from .poly import LaurentPoly, qnorm
from .ratfun import RatFun

STYLES = ("plain", "factored", "json")


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if not text[pos:].strip():
            break
        m = _TOKEN.match(text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("int", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("var", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start)
            toks.append(("op", ch, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Prod:
    """Parse value: ``rest * prod(poly**m)`` with the polynomial factors kept
    apart so that division turns them into denominator factors."""

    __slots__ = ("rest", "polys")

    def __init__(self, rest: RatFun, polys=()):
        self.rest = rest
        self.polys = list(polys)

    def ratfun(self) -> RatFun:
        out = self.rest
        for p, m in self.polys:
            out = out * RatFun(p**m)
        return out

    def is_zero(self) -> bool:
        return not self.rest or any(not p for p, _ in self.polys)

    def mul(self, other: "_Prod") -> "_Prod":
        return _Prod(self.rest * other.rest, self.polys + other.polys)

    def inverse(self) -> "_Prod":
        dens = RatFun.from_parts(LaurentPoly.const(self.rest.ctx, 1), self.polys)
        return _Prod(self.rest.inverse() * dens)

    def power(self, e: int) -> "_Prod":
        if e < 0:
            return self.inverse().power(-e)
        return _Prod(self.rest**e, [(p, m * e) for p, m in self.polys])


class _Parser:
    def __init__(self, text: str, ctx: VarContext):
        self.toks = _tokenize(text)
        self.i = 0
        self.ctx = ctx

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2])

    def parse(self) -> RatFun:
        r = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError("unexpected trailing input", t[2])
        return r.ratfun()

    def expr(self) -> _Prod:
        first = self.term()
        total = None
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term().ratfun()
                if total is None:
                    total = first.ratfun()
                total = total + rhs if t[1] == "+" else total - rhs
            else:
                break
        if total is None:
            return first
        if total.is_polynomial() and len(total.num) > 1:
            return _Prod(RatFun.const(self.ctx, 1), [(total.num, 1)])
        return _Prod(total)

    def term(self) -> _Prod:
        r = self.factor()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                rhs = self.factor()
                if t[1] == "*":
                    r = r.mul(rhs)
                else:
                    if rhs.is_zero():
                        raise ParseError("division by zero", t[2])
                    r = r.mul(rhs.inverse())
            else:
                return r

    def factor(self) -> _Prod:
        b = self.base()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            sign = 1
            t = self.peek()
            if t[0] == "op" and t[1] == "-":
                self.take()
                sign = -1
            t = self.take()
            if t[0] != "int":
                raise ParseError("expected an integer exponent", t[2])
            e = sign * t[1]
            if e < 0 and b.is_zero():
                raise ParseError("negative power of zero", t[2])
            b = b.power(e)
        return b

    def base(self) -> _Prod:
        t = self.take()
        kind, val, pos = t
        if kind == "int":
            return _Prod(RatFun.const(self.ctx, val))
        if kind == "var":
            if val not in self.ctx:
                raise ParseError(f"unknown variable {val!r}", pos)
            return _Prod(RatFun.var(self.ctx, val))
        if kind == "op" and val == "(":
            r = self.expr()
            self.expect(")")
            return r
        if kind == "op" and val == "-":
            b = self.base()
            return _Prod(-b.rest, b.polys)
        raise ParseError("unexpected token" if kind != "end" else "unexpected end of input", pos)


def expr_variables(text: str) -> list[str]:
    return [v for k, v, _ in _tokenize(text) if k == "var"]


def parse_expr(text: str, ctx: VarContext | None = None) -> RatFun:
    """Parse ``text``; without ``ctx`` the context is the sorted set of names used."""
    if ctx is None:
        ctx = sorted_context(expr_variables(text))
    return _Parser(text, ctx).parse()


def parse_poly(text: str, ctx: VarContext | None = None) -> LaurentPoly:
    r = parse_expr(text, ctx)
    if r.factors:
        raise ValueError(f"{text!r} is not a Laurent polynomial")
    return r.num


# ---------------------------------------------------------------- format
def _coeff_str(c) -> str:
    c = qnorm(c)
    if isinstance(c, int):
        return str(c)
    return f"{c.numerator}/{c.denominator}"


def _mono_str(names, exps) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(p: LaurentPoly) -> str:
    if not p:
        return "0"
    names = p.ctx.names
    out = []
    for idx, (exps, c) in enumerate(p.sorted_items()):
        mono = _mono_str(names, exps)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = _coeff_str(a)
        elif a == 1:
            body = mono
            # keep "-x^2" from reading as "(-x)^2" at the start of an expression
            if idx == 0 and neg and "^" in mono.split("*")[0]:
                body = "1*" + mono
        else:
            body = f"{_coeff_str(a)}*{mono}"
        if idx == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("-" if neg else "+") + body)
    return "".join(out)


def _factor_display(f: LaurentPoly) -> tuple[str, bool]:
    """Text for a canonical factor; flag True when shown as (1 - m) = -f."""
    if len(f.terms) == 2 and f.terms.get(0) == -1:
        (k, c), = [(k, c) for k, c in f.terms.items() if k != 0]
        if c == 1:
            mono = _mono_str(f.ctx.names, f.ctx.unpack(k))
            return f"(1-{mono})", True
    return f"({format_poly(f)})", False


def format_factored(r: RatFun) -> str:
    if not r.factors:
        return format_poly(r.num)
    flips = 0
    parts = []
    for f, m in r.factors:
        text, flipped = _factor_display(f)
        if flipped and m % 2:
            flips += 1
        parts.append(text if m == 1 else f"{text}^{m}")
    num = -r.num if flips % 2 else r.num
    num_s = format_poly(num)
    if len(num.terms) > 1:
        num_s = f"({num_s})"
    den_s = parts[0] if len(parts) == 1 else "(" + "*".join(parts) + ")"
    return f"{num_s}/{den_s}"


def format_plain(r: RatFun) -> str:
    num, den = r.normalized()
    if den == 1:
        return format_poly(num)
    num_s = format_poly(num)
    den_s = format_poly(den)
    if len(num.terms) > 1:
        num_s = f"({num_s})"
    if len(den.terms) > 1 or "*" in den_s:
        den_s = f"({den_s})"
    return f"{num_s}/{den_s}"


def _poly_json(p: LaurentPoly) -> list:
    return [list(exps) + [_coeff_str(c)] for exps, c in p.sorted_items()]


def ratfun_to_json(r: RatFun) -> dict[str, Any]:
    num, den = r.normalized()
    return {"vars": list(r.ctx.names), "num": _poly_json(num), "den": _poly_json(den)}


def _parse_coeff(s) -> Fraction | int:
    if isinstance(s, int):
        return s
    return qnorm(Fraction(str(s)))


def ratfun_from_json(obj: dict[str, Any]) -> RatFun:
    try:
        ctx = VarContext(obj["vars"])
        n = len(ctx)

        def poly(rows):
            items = []
            for row in rows:
                if len(row) != n + 1:
                    raise ValueError("term row length does not match vars")
                items.append(([int(e) for e in row[:n]], _parse_coeff(row[n])))
            return LaurentPoly.from_exps(ctx, items)

        num = poly(obj["num"])
        den = poly(obj.get("den", [[0] * n + ["1"]]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed RatFun JSON: {exc}") from exc
    if not den:
        raise ZeroDivisionError("zero denominator in RatFun JSON")
    return RatFun(num, den)


def format_expr(r: RatFun, style: str = "plain") -> str:
    if style == "plain":
        return format_plain(r)
    if style == "factored":
        return format_factored(r)
    if style == "json":
        return json.dumps(ratfun_to_json(r), separators=(",", ":"))
    raise ValueError(f"unknown style {style!r}")
