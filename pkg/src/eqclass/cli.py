"""Command line entry point: ``eqclass {series,integrate,scenario,motivic}``.

Exit codes: 0 success, 2 usage or input error, 3 a result that should be
polynomial is not, 4 a built-in identity failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .arith.context import VarContext
from .arith.expr import STYLES, ParseError, _coeff_str, format_expr, parse_expr
from .arith.ratfun import RatFun, ratfun_eq, substitute
from .arith.series import PowerSeries, series_exp, series_expand
from .localization import (NotPolynomialError, additive_context, class_context,
                           extract_singular, integrate, smooth_local_class, specialize_y)
from .motivic import MotivicError, cusp_pipeline, evaluate_document, whitney_pipeline
from .torus import (ModelError, SpaceModel, cell_chi_y, det_chars, grassmannian_space,
                    linear_form, schubert_cells, schubert_membership,
                    schubert_smooth_tangent_weights)

EXIT_OK, EXIT_USAGE, EXIT_NOT_POLY, EXIT_IDENTITY = 0, 2, 3, 4
BUILTIN_DATA = {"p2": "p2.json", "gr24": "gr24.json", "whitney": "whitney.json"}


class UsageError(Exception):
    pass


class IdentityFailure(Exception):
    pass


def _read_input(path: str) -> str:
    p = Path(path)
    if p.exists():
        return p.read_text()
    name = path[len("builtin:"):] if path.startswith("builtin:") else path
    if name in BUILTIN_DATA:
        return resources.files("eqclass.data").joinpath(BUILTIN_DATA[name]).read_text()
    raise UsageError(f"no such file or built-in input: {path}")


def _out(text: str):
    sys.stdout.write(text + "\n")


def _fmt(r: RatFun, style: str) -> str:
    return format_expr(r, style)


@contextmanager
def _mapper(parallel: int):
    if parallel <= 1:
        yield None
    else:
        with ProcessPoolExecutor(parallel) as ex:
            yield ex.map


# ------------------------------------------------------------------ series
def series_coefficients(kind: str, order: int) -> list:
    if order < 0:
        raise UsageError("order must be nonnegative")
    ctx = VarContext(("c",))
    c = PowerSeries.var(ctx, order + 1, "c")
    if kind == "ch":
        return series_exp(c.truncate(order)).coefficients()
    if kind == "todd":
        f = parse_expr("c/(1-C)", VarContext(("c", "C")))
        return series_expand(f, {"c": lambda cap: PowerSeries.var(ctx, cap, "c"),
                                 "C": lambda cap: series_exp(-PowerSeries.var(ctx, cap, "c"))},
                             order).coefficients()
    raise UsageError(f"unknown series {kind!r}")


def cmd_series(args) -> int:
    coeffs = series_coefficients(args.kind, args.order)
    _out(", ".join(_coeff_str(Fraction(x)) for x in coeffs))
    return EXIT_OK


# --------------------------------------------------------------- integrate
def _restriction(text: str, space: SpaceModel, ctx: VarContext, point) -> RatFun:
    names = list(space.names)
    pinned = VarContext(names + ["h"]) if "h" not in names else ctx
    try:
        r = parse_expr(text, pinned)
    except ParseError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from exc
    if pinned is ctx:
        return r
    if "h" in r.num.variables() or any("h" in g.variables() for g, _ in r.factors):
        if point.h is None:
            raise UsageError(f"point {point.label} has no restriction for h")
        h = RatFun(linear_form(point.h, ctx, names).rename(pinned))
        r = substitute(r, {"h": h})
    return r.rename(ctx)


def cmd_integrate(args) -> int:
    try:
        space = SpaceModel.loads(_read_input(args.space))
    except ModelError as exc:
        raise UsageError(str(exc)) from exc
    ctx = additive_context(space.names)
    per_point = {}
    for item in args.at or []:
        label, sep, text = item.partition("=")
        if not sep:
            raise UsageError(f"--at expects LABEL=EXPR, got {item!r}")
        per_point[label] = text
    unknown = set(per_point) - {p.label for p in space.points}
    if unknown:
        raise UsageError(f"unknown fixed points: {sorted(unknown)}")
    restrictions = {}
    for p in space.points:
        text = per_point.get(p.label, args.cls)
        if text is None:
            raise UsageError(f"no class given at point {p.label}")
        restrictions[p.label] = _restriction(text, space, ctx, p)
    with _mapper(args.parallel) as mapper:
        result = integrate(space, restrictions, ctx, mapper=mapper)
    _out(_fmt(result, args.format))
    return EXIT_OK


# ---------------------------------------------------------------- scenarios
def _verdict(name: str, ok: bool, yes: str = "EQUAL", no: str = "NOT-EQUAL") -> str:
    return f"[{name}: {yes if ok else no}]"


def scenario_whitney(args) -> list[str]:
    r = whitney_pipeline(with_y=False)
    if not r.alternative_equal:
        raise IdentityFailure("pushforward routes disagree on the Whitney umbrella")
    if not ratfun_eq(r.value, parse_expr("(1+T1*T2)/((1-T1)*(1-T2^2))", r.value.ctx)):
        raise IdentityFailure("Whitney umbrella class differs from the expected value")
    return [f"{_fmt(r.value, args.format)}  {_verdict('CI-comparison', r.ci_equal)}"]


def scenario_cusp(args) -> list[str]:
    r = cusp_pipeline()
    if r.equal:
        raise IdentityFailure("cusp class unexpectedly equals the complete-intersection class")
    return [f"class: {_fmt(r.value, args.format)}",
            f"ci-class: {_fmt(r.ci_class, args.format)}",
            _verdict("CI-comparison", r.equal)]


def scenario_gr24(args) -> list[str]:
    from .detvar import point_label, y0_closed_form

    y_mode = _y_mode(args, default=Fraction(0))
    chars, names = det_chars(2)
    space = grassmannian_space(2, 4, chars, names)
    ctx = class_context(names)
    lines, smooth = [], []
    singular = None
    for p in space.points:
        label = point_label(p.subset, 2)
        if not schubert_membership(p.subset, (0, 1)):
            lines.append(f"{label}: not on X")
            continue
        try:
            ws = schubert_smooth_tangent_weights(p.subset, chars, (0, 1))
        except ModelError:
            singular = label
            continue
        c = _at_y(smooth_local_class(ws, ctx, names), y_mode)
        smooth.append(c)
        lines.append(f"{label}: {_fmt(c, args.format)}")
    chi = cell_chi_y(schubert_cells(2))
    chi_r = _at_y(RatFun(chi.rename(ctx)), y_mode)
    d = extract_singular(chi_r.num, smooth, ctx, singular).value.reduce()
    lines.append(f"{singular} (singular): {_fmt(d, args.format)}")
    ok = ratfun_eq(specialize_y(d, 0), specialize_y(y0_closed_form(2), 0))
    if not ok:
        raise IdentityFailure("extraction on Gr_2(C^4) misses the closed form at y=0")
    lines.append(_verdict("y=0 closed form", ok))
    return lines


def _y_mode(args, default):
    text = args.y_mode
    if text is None:
        return default
    if text == "y":
        return "y"
    try:
        return Fraction(text)
    except ValueError as exc:
        raise UsageError(f"--y-mode must be 'y' or a rational number, got {text!r}") from exc


def _at_y(f: RatFun, y_mode) -> RatFun:
    return f if y_mode == "y" else specialize_y(f, y_mode)


def scenario_det(args) -> list[str]:
    from . import detvar

    n = args.n
    if not 1 <= n <= 4:
        raise UsageError("--n must be between 1 and 4")
    table = detvar.DetClassTable(args.cache, args.parallel)
    lines = []
    if args.radial or args.positivity:
        coeffs = detvar.radial_table(n, table)
        if args.radial:
            lines.extend(f"T^{k}: {p}" for k, p in enumerate(coeffs))
        if args.positivity:
            ok = detvar.positivity_check(coeffs)
            if not ok:
                raise IdentityFailure("radial sum has a negative coefficient")
            lines.append(_verdict("positivity", ok, "OK", "FAIL"))
        return lines
    y_mode = _y_mode(args, default="y")
    if n == 4 and y_mode not in (0, 1):
        raise UsageError("n=4 is available at --y-mode 0 or 1, or with --radial")
    d = detvar.det_local_class(n, y_mode, "full", table)
    lines.append(_fmt(d, args.format))
    if y_mode in ("y", 0):
        ok = ratfun_eq(specialize_y(d, 0), specialize_y(detvar.y0_closed_form(n), 0))
        if not ok:
            raise IdentityFailure("y=0 closed form fails")
        lines.append(_verdict("y=0 closed form", ok))
    if y_mode in ("y", 1):
        ok = detvar.lclass_check(n, "full", table)
        if not ok:
            raise IdentityFailure("y=1 closed form of the open cell fails")
        lines.append(_verdict("y=1 closed form", ok))
    return lines


SCENARIOS = {"whitney": scenario_whitney, "cusp": scenario_cusp,
             "schubert-gr24": scenario_gr24, "det": scenario_det}


def cmd_scenario(args) -> int:
    for line in SCENARIOS[args.name](args):
        _out(line)
    return EXIT_OK


def cmd_motivic(args) -> int:
    try:
        doc = json.loads(_read_input(args.expr))
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from exc
    _out(_fmt(evaluate_document(doc), args.format))
    return EXIT_OK


# ------------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=STYLES, default="factored",
                        help="output style (default: factored)")
    common.add_argument("--parallel", type=int, default=1, metavar="N",
                        help="worker processes for fixed-point sums (default: 1)")
    common.add_argument("--cache", metavar="DIR", default=None,
                        help="cache directory for determinant classes (env EQCLASS_CACHE)")
    parser = argparse.ArgumentParser(prog="eqclass",
                                     description="Localized equivariant Hirzebruch classes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("series", parents=[common], help="Todd or Chern character series")
    p.add_argument("kind", choices=("todd", "ch"))
    p.add_argument("order", type=int)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("integrate", parents=[common], help="localization integral over a space")
    p.add_argument("space", help="SpaceModel JSON file or built-in name (p2, gr24)")
    p.add_argument("--class", dest="cls", metavar="EXPR",
                   help="class at every point, in additive variables and h")
    p.add_argument("--at", action="append", metavar="LABEL=EXPR",
                   help="class at one fixed point (repeatable)")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("scenario", parents=[common], help="built-in worked examples")
    p.add_argument("name", choices=sorted(SCENARIOS))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--y-mode", default=None, help="'y' (symbolic) or a rational value")
    p.add_argument("--radial", action="store_true", help="print the radial coefficient table")
    p.add_argument("--positivity", action="store_true", help="check radial positivity")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("motivic", parents=[common], help="evaluate a motivic expression")
    p.add_argument("expr", help="MotivicExpr JSON file or built-in name (whitney)")
    p.set_defaults(func=cmd_motivic)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.parallel < 1:
        parser.error("--parallel must be at least 1")
    try:
        return args.func(args)
    except NotPolynomialError as exc:
        print(f"eqclass: {exc}", file=sys.stderr)
        return EXIT_NOT_POLY
    except IdentityFailure as exc:
        print(f"eqclass: identity check failed: {exc}", file=sys.stderr)
        return EXIT_IDENTITY
    except (UsageError, ModelError, MotivicError, ParseError, ValueError,
            ZeroDivisionError, KeyError) as exc:
        print(f"eqclass: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
