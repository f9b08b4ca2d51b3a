"""Motivic additivity: assemble local classes of strata and resolutions.

Expressions form a DAG of ``smooth`` / ``resolve`` / ``sum`` / ``diff`` /
``lit`` nodes (plus ``ref`` into a table of named definitions).  Every
leaf is evaluated over one class context, so sums are exact.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .arith.context import VarContext
from .arith.expr import parse_expr
from .arith.poly import LaurentPoly
from .arith.ratfun import RatFun, ratfun_eq, sum_or_zero
from .localization import (LocalizedClass, additive_context, class_context, euler_class,
                           smooth_local_class, specialize_y)
from .torus import Weight, check_weight, linear_form, mult_name, weight_monomial

log = logging.getLogger(__name__)


class MotivicError(ValueError):
    """Malformed expression: unknown op, dangling or cyclic reference, bad weights."""


@dataclass(frozen=True)
class Smooth:
    weights: tuple[Weight, ...]


@dataclass(frozen=True)
class Resolve:
    points: tuple[tuple[Weight, ...], ...]


@dataclass(frozen=True)
class Sum:
    children: tuple


@dataclass(frozen=True)
class Diff:
    a: object
    b: object


@dataclass(frozen=True)
class Lit:
    value: RatFun = field(compare=False)
    text: str = ""


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass
class Frame:
    """Where an expression is evaluated: additive names and the class context."""

    names: tuple[str, ...]
    ctx: VarContext
    with_y: bool = True

    @classmethod
    def make(cls, names: Sequence[str], with_y: bool = True) -> "Frame":
        return cls(tuple(names), class_context(names), with_y)


def resolve_pushforward(points: Sequence[Sequence[Weight]], frame: Frame) -> RatFun:
    """Sum of smooth local classes over the resolution's fixed points above the base point."""
    if not points:
        log.warning("resolution has no fixed point over the base point; class is 0")
    return sum_or_zero([smooth_local_class(ws, frame.ctx, frame.names, frame.with_y)
                        for ws in points], frame.ctx)


def evaluate(e, frame: Frame, defs: Mapping[str, object] | None = None,
             _memo: dict | None = None, _stack: tuple = ()) -> RatFun:
    defs = defs or {}
    memo = {} if _memo is None else _memo
    if isinstance(e, Ref):
        if e.name in _stack:
            raise MotivicError(f"cyclic reference through {e.name!r}")
        if e.name not in defs:
            raise MotivicError(f"undefined reference {e.name!r}")
        if e.name not in memo:
            memo[e.name] = evaluate(defs[e.name], frame, defs, memo, _stack + (e.name,))
        return memo[e.name]
    if isinstance(e, Lit):
        if e.value.ctx is not frame.ctx:
            raise MotivicError(f"literal over {e.value.ctx}, expected {frame.ctx}")
        return e.value if frame.with_y else specialize_y(e.value, 0)
    if isinstance(e, Smooth):
        return smooth_local_class(e.weights, frame.ctx, frame.names, frame.with_y)
    if isinstance(e, Resolve):
        return resolve_pushforward(e.points, frame)
    if isinstance(e, Sum):
        return sum_or_zero([evaluate(c, frame, defs, memo, _stack) for c in e.children],
                           frame.ctx)
    if isinstance(e, Diff):
        a = evaluate(e.a, frame, defs, memo, _stack)
        b = evaluate(e.b, frame, defs, memo, _stack)
        return sum_or_zero([a, -b], frame.ctx)
    raise MotivicError(f"not a motivic expression: {e!r}")


# -------------------------------------------------------------------- JSON
def _weights(obj, rank) -> tuple[Weight, ...]:
    try:
        return tuple(check_weight(w, rank) for w in obj)
    except (TypeError, ValueError) as exc:
        raise MotivicError(f"bad weight list {obj!r}: {exc}") from exc


def node_from_json(obj, frame: Frame):
    rank = len(frame.names)
    if not isinstance(obj, dict) or "op" not in obj:
        raise MotivicError(f"expected an object with 'op', got {obj!r}")
    op = obj["op"]
    if op == "smooth":
        return Smooth(_weights(obj.get("weights", []), rank))
    if op == "resolve":
        return Resolve(tuple(_weights(p, rank) for p in obj.get("points", [])))
    if op == "sum":
        return Sum(tuple(node_from_json(c, frame) for c in obj.get("args", [])))
    if op == "diff":
        args = obj.get("args", [])
        if len(args) != 2:
            raise MotivicError("diff takes exactly two arguments")
        return Diff(node_from_json(args[0], frame), node_from_json(args[1], frame))
    if op == "lit":
        text = str(obj.get("expr", "0"))
        try:
            return Lit(parse_expr(text, frame.ctx), text)
        except ValueError as exc:
            raise MotivicError(f"bad literal {text!r}: {exc}") from exc
    if op == "ref":
        return Ref(str(obj["name"]))
    raise MotivicError(f"unknown op {op!r}")


def node_to_json(e):
    if isinstance(e, Smooth):
        return {"op": "smooth", "weights": [list(w) for w in e.weights]}
    if isinstance(e, Resolve):
        return {"op": "resolve", "points": [[list(w) for w in p] for p in e.points]}
    if isinstance(e, Sum):
        return {"op": "sum", "args": [node_to_json(c) for c in e.children]}
    if isinstance(e, Diff):
        return {"op": "diff", "args": [node_to_json(e.a), node_to_json(e.b)]}
    if isinstance(e, Lit):
        return {"op": "lit", "expr": e.text or str(e.value)}
    if isinstance(e, Ref):
        return {"op": "ref", "name": e.name}
    raise MotivicError(f"not a motivic expression: {e!r}")


def load_document(obj) -> tuple[object, Frame, dict]:
    """Parse ``{"vars": [...], "y": bool, "defs": {...}, "expr": node}``."""
    if not isinstance(obj, dict) or "expr" not in obj:
        raise MotivicError("document needs an 'expr' entry")
    names = obj.get("vars") or ["t1"]
    try:
        frame = Frame.make(names, bool(obj.get("y", True)))
    except ValueError as exc:
        raise MotivicError(str(exc)) from exc
    defs = {str(k): node_from_json(v, frame) for k, v in (obj.get("defs") or {}).items()}
    return node_from_json(obj["expr"], frame), frame, defs


def evaluate_document(obj) -> RatFun:
    e, frame, defs = load_document(obj)
    return evaluate(e, frame, defs).reduce()


# ------------------------------------------------- complete intersections
@dataclass(frozen=True)
class CIDescriptor:
    ambient: tuple[Weight, ...]
    degrees: tuple[Weight, ...]

    def __post_init__(self):
        if len(self.degrees) > len(self.ambient):
            raise ValueError("more equations than ambient dimensions")
        for w in self.ambient + self.degrees:
            check_weight(w)


def ci_structure_class(d: CIDescriptor, frame: Frame) -> RatFun:
    """Ambient smooth class times prod(1 - m(deg f_i)), factors kept in weight order."""
    one = LaurentPoly.const(frame.ctx, 1)
    num = one
    yv = LaurentPoly.var(frame.ctx, "y") if frame.with_y else None
    for w in d.ambient:
        if yv is not None:
            num = num * (one + yv * weight_monomial(w, frame.ctx, frame.names))
    for w in d.degrees:
        num = num * (one - weight_monomial(w, frame.ctx, frame.names))
    dens = [(one - weight_monomial(w, frame.ctx, frame.names), 1) for w in d.ambient]
    return RatFun.from_parts(num, dens)


def compare_with_ci(c, d: CIDescriptor, frame: Frame) -> tuple[bool, RatFun]:
    value = c.value if isinstance(c, LocalizedClass) else c
    ci = ci_structure_class(d, frame)
    diff = (value - ci).reduce()
    return ratfun_eq(value, ci), diff


# ------------------------------------------------------------- scenarios
WHITNEY_NAMES = ("t1", "t2")
WHITNEY_AMBIENT = ((1, 1), (1, 0), (0, 2))  # x1 = uv, x2 = u, x3 = v^2
WHITNEY_DEGREE = ((2, 2),)                 # x1^2 - x2^2 x3


def whitney_expr():
    resolution = Resolve((((1, 0), (0, 1)),))   # C^2 with u: t1, v: t2
    exceptional = Smooth(((0, 1),))             # the v-line {u = 0} over Z
    z_axis = Smooth(((0, 2),))                  # Z = {x1 = x2 = 0}
    return Sum((Diff(resolution, exceptional), z_axis))


def whitney_alternative(frame: Frame) -> RatFun:
    """Push the open part forward by multiplying with deg X = 2(t1+t2) / e(C^3)."""
    mixed = VarContext(frame.names + tuple(mult_name(n) for n in frame.names)
                       + (("y",) if frame.with_y else ()))
    open_part = evaluate(Diff(Resolve((((1, 0), (0, 1)),)), Smooth(((0, 1),))),
                         Frame(frame.names, frame.ctx, frame.with_y)).rename(mixed)
    add = additive_context(frame.names)
    e_source = euler_class(((1, 0), (0, 1)), add).rename(mixed)
    e_target = euler_class(WHITNEY_AMBIENT, add).rename(mixed)
    deg = RatFun(linear_form(WHITNEY_DEGREE[0], mixed, frame.names))
    pushed = (open_part * e_source * deg / e_target).reduce()
    z_axis = smooth_local_class(((0, 2),), mixed, frame.names, frame.with_y)
    total = (pushed + z_axis).reduce()
    if total.num.variables() & set(frame.names) or any(
            g.variables() & set(frame.names) for g, _ in total.factors):
        raise ArithmeticError("additive variables survived the pushforward")
    return total.rename(frame.ctx)


@dataclass(frozen=True)
class WhitneyResult:
    value: RatFun
    ci_equal: bool
    alternative_equal: bool


def whitney_pipeline(with_y: bool = False) -> WhitneyResult:
    frame = Frame.make(WHITNEY_NAMES, with_y)
    value = evaluate(whitney_expr(), frame).reduce()
    equal, _ = compare_with_ci(value, CIDescriptor(WHITNEY_AMBIENT, WHITNEY_DEGREE), frame)
    alt = whitney_alternative(frame)
    return WhitneyResult(value, equal, ratfun_eq(alt, value))


@dataclass(frozen=True)
class CuspResult:
    value: RatFun
    ci_class: RatFun
    equal: bool
    difference: RatFun


CUSP_AMBIENT = ((2,), (3,))
CUSP_DEGREE = ((6,),)


def cusp_pipeline() -> CuspResult:
    """x^3 = y^2 with weights x: 2t, y: 3t; the normalization s -> (s^2, s^3) has source weight t."""
    frame = Frame.make(("t",), with_y=False)
    value = evaluate(Resolve((((1,),),)), frame).reduce()
    ci = ci_structure_class(CIDescriptor(CUSP_AMBIENT, CUSP_DEGREE), frame)
    equal, diff = compare_with_ci(value, CIDescriptor(CUSP_AMBIENT, CUSP_DEGREE), frame)
    return CuspResult(value, ci, equal, diff)
