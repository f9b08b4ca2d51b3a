import sympy as sp
import pytest
from hypothesis import settings

from eqclass.arith.poly import LaurentPoly
from eqclass.detvar import DetClassTable

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def poly_to_sympy(p: LaurentPoly):
    syms = sp.symbols(p.ctx.names) if p.ctx.nvars > 1 else (sp.Symbol(p.ctx.names[0]),)
    out = sp.Integer(0)
    for exps, c in p.items():
        term = sp.Rational(c.numerator, c.denominator) if not isinstance(c, int) else sp.Integer(c)
        for s, e in zip(syms, exps):
            term *= s**e
        out += term
    return out


def to_sympy(r):
    if isinstance(r, LaurentPoly):
        return poly_to_sympy(r)
    out = poly_to_sympy(r.num)
    for g, m in r.factors:
        out /= poly_to_sympy(g) ** m
    return out


def sympy_equal(a, b) -> bool:
    return sp.simplify(sp.together(a - b)) == 0


@pytest.fixture(scope="session")
def det_table():
    return DetClassTable(cache_dir="", parallel=1)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def record(label: str, ok: bool, detail: str = ""):
        ACCEPTANCE_LINES.append(f"{label}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else ""))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
