"""Variable contexts and packed monomial keys.

A monomial over ``n`` variables is stored as a single Python int: the
exponent vector is written in balanced base ``2**FIELD_BITS`` with the total
degree as the most significant digit, followed by the exponents in context
order.  Packing is additive (multiplying monomials adds keys) and integer
comparison of keys is graded-lexicographic comparison of monomials.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

FIELD_BITS = 32
_BASE = 1 << FIELD_BITS
_HALF = _BASE >> 1
#: largest |exponent| (and |total degree|) a key may carry
EXPONENT_LIMIT = 1 << (FIELD_BITS - 3)

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class ContextError(ValueError):
    """Raised when values over different variable contexts are combined."""


class VarContext:
    """An ordered tuple of distinct variable names.

    Contexts are interned by name tuple, so ``VarContext(("x", "y")) is
    VarContext(("x", "y"))``.
    """

    _cache: dict[tuple[str, ...], "VarContext"] = {}

    def __new__(cls, names: Iterable[str]):
        names = tuple(names)
        ctx = cls._cache.get(names)
        if ctx is not None:
            return ctx
        if len(set(names)) != len(names):
            raise ContextError(f"duplicate variable names in {names}")
        for name in names:
            if not _NAME_RE.match(name):
                raise ContextError(f"invalid variable name {name!r}")
        ctx = super().__new__(cls)
        ctx.names = names
        ctx.nvars = len(names)
        ctx.index = {name: i for i, name in enumerate(names)}
        n = len(names)
        top = _BASE**n
        ctx.var_keys = tuple(_BASE ** (n - 1 - i) + top for i in range(n))
        ctx._top = top
        cls._cache[names] = ctx
        return ctx

    def __reduce__(self):
        return (VarContext, (self.names,))

    def __repr__(self):
        return f"VarContext({list(self.names)})"

    def __len__(self):
        return self.nvars

    def __contains__(self, name):
        return name in self.index

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise ContextError(
                f"exponent vector of length {len(exps)} for {self.nvars} variables"
            )
        key = 0
        deg = 0
        for e, vk in zip(exps, self.var_keys):
            e = int(e)
            if not -EXPONENT_LIMIT <= e <= EXPONENT_LIMIT:
                raise OverflowError(f"exponent {e} exceeds the supported range")
            deg += e
            key += e * vk
        if not -EXPONENT_LIMIT <= deg <= EXPONENT_LIMIT:
            raise OverflowError(f"total degree {deg} exceeds the supported range")
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        out = [0] * self.nvars
        for i in range(self.nvars - 1, -1, -1):
            d = key & (_BASE - 1)
            if d >= _HALF:
                d -= _BASE
            out[i] = d
            key = (key - d) >> FIELD_BITS
        return tuple(out)

    def degree(self, key: int) -> int:
        """Total degree of a packed monomial."""
        d = key // self._top
        rem = key - d * self._top
        if rem >= self._top // 2:
            d += 1
        return d

    def var_key(self, name: str) -> int:
        return self.var_keys[self.index[name]]

    def extend(self, extra: Iterable[str]) -> "VarContext":
        names = list(self.names)
        names.extend(v for v in extra if v not in self.index)
        return VarContext(names)


_NATURAL = re.compile(r"(\d+)")


def natural_key(name: str):
    parts = _NATURAL.split(name)
    return tuple(int(p) if p.isdigit() else p for p in parts)


def sorted_context(names: Iterable[str]) -> VarContext:
    """Context with ``names`` in natural sort order (S2 before S10)."""
    return VarContext(sorted(set(names), key=natural_key))
