"""Torus actions presented by their fixed points.

A weight is a tuple of integers in the character lattice Z^r.  With
additive names ``t1..tr`` it reads ``a1*t1 + ... + ar*tr``; multiplicatively
it is the Laurent monomial ``T1^a1 ... Tr^ar`` (``Tj = exp(-tj)``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .arith.context import VarContext
from .arith.poly import LaurentPoly

Weight = tuple[int, ...]

Y_CTX = VarContext(("y",))


class ModelError(ValueError):
    """Malformed torus data (zero or repeated weights, bad JSON)."""


def mult_name(name: str) -> str:
    """Multiplicative partner of an additive variable: ``t1 -> T1``."""
    return name[0].upper() + name[1:]


def default_names(rank: int) -> tuple[str, ...]:
    return tuple(f"t{i}" for i in range(1, rank + 1))


def check_weight(w: Sequence[int], rank: int | None = None, nonzero: bool = True) -> Weight:
    w = tuple(int(a) for a in w)
    if rank is not None and len(w) != rank:
        raise ModelError(f"weight {w} has length {len(w)}, torus rank is {rank}")
    if nonzero and not any(w):
        raise ModelError("zero weight: the fixed point is not isolated")
    return w


def weight_sub(a: Weight, b: Weight) -> Weight:
    return tuple(x - y for x, y in zip(a, b))


def weight_neg(a: Weight) -> Weight:
    return tuple(-x for x in a)


def linear_form(w: Weight, ctx: VarContext, names: Sequence[str]) -> LaurentPoly:
    """The additive form sum(a_j t_j) over ``ctx``."""
    items = []
    for a, name in zip(w, names):
        if a:
            e = [0] * ctx.nvars
            e[ctx.index[name]] = 1
            items.append((e, a))
    return LaurentPoly.from_exps(ctx, items)


def weight_monomial(w: Weight, ctx: VarContext, names: Sequence[str]) -> LaurentPoly:
    """The monomial prod(Tj^aj) over ``ctx``; ``names`` are the additive names."""
    e = [0] * ctx.nvars
    for a, name in zip(w, names):
        if a:
            e[ctx.index[mult_name(name)]] += a
    return LaurentPoly.monomial(ctx, e)


def format_weight(w: Weight, names: Sequence[str]) -> str:
    parts = []
    for a, name in zip(w, names):
        if not a:
            continue
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        parts.append(f"{sign}{'' if mag == 1 else f'{mag}*'}{name}")
    if not parts:
        return "0"
    s = "".join(parts)
    return s[1:] if s[0] == "+" else s


@dataclass(frozen=True)
class FixedPoint:
    label: str
    ambient: tuple[Weight, ...]
    tangent: tuple[Weight, ...] | None = None
    subset: tuple[int, ...] | None = None
    h: Weight | None = None           # restriction of c1 of the tautological bundle


@dataclass(frozen=True)
class SpaceModel:
    rank: int
    dim: int
    points: tuple[FixedPoint, ...]
    cells: tuple[int, ...] | None = None
    names: tuple[str, ...] = ()
    chars: tuple[Weight, ...] | None = None

    def __post_init__(self):
        if not self.names:
            object.__setattr__(self, "names", default_names(self.rank))
        if len(self.names) != self.rank:
            raise ModelError("variable names do not match the torus rank")
        labels = [p.label for p in self.points]
        if len(set(labels)) != len(labels):
            raise ModelError("fixed point labels must be unique")
        for p in self.points:
            if len(p.ambient) != self.dim:
                raise ModelError(f"point {p.label}: {len(p.ambient)} weights, dim is {self.dim}")
            for w in p.ambient + (p.tangent or ()):
                check_weight(w, self.rank)
            if p.tangent is not None and not _is_submultiset(p.tangent, p.ambient):
                raise ModelError(f"point {p.label}: tangent weights are not ambient weights")

    @property
    def mult_names(self) -> tuple[str, ...]:
        return tuple(mult_name(n) for n in self.names)

    def point(self, label: str) -> FixedPoint:
        for p in self.points:
            if p.label == label:
                return p
        raise KeyError(label)

    def to_json(self) -> dict:
        out = {
            "rank": self.rank,
            "dim": self.dim,
            "vars": list(self.names),
            "points": [self._point_json(p) for p in self.points],
            "cells": None if self.cells is None else list(self.cells),
        }
        if self.chars is not None:
            out["chars"] = [list(c) for c in self.chars]
        return out

    @staticmethod
    def _point_json(p: FixedPoint) -> dict:
        out = {"label": p.label,
               "ambient": [list(w) for w in p.ambient],
               "tangent": None if p.tangent is None else [list(w) for w in p.tangent]}
        if p.subset is not None:
            out["subset"] = list(p.subset)
        if p.h is not None:
            out["h"] = list(p.h)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SpaceModel":
        try:
            rank = int(obj["rank"])
            dim = int(obj["dim"])
            points = []
            for p in obj["points"]:
                tangent = p.get("tangent")
                h = p.get("h")
                subset = p.get("subset")
                points.append(FixedPoint(
                    str(p["label"]),
                    tuple(check_weight(w, rank) for w in p["ambient"]),
                    None if tangent is None else tuple(check_weight(w, rank) for w in tangent),
                    None if subset is None else tuple(int(i) for i in subset),
                    None if h is None else check_weight(h, rank, nonzero=False),
                ))
            cells = obj.get("cells")
            chars = obj.get("chars")
            return cls(rank, dim, tuple(points),
                       None if cells is None else tuple(int(d) for d in cells),
                       tuple(obj.get("vars") or default_names(rank)),
                       None if chars is None else tuple(check_weight(c, rank, False) for c in chars))
        except (KeyError, TypeError) as exc:
            raise ModelError(f"malformed space JSON: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> "SpaceModel":
        try:
            return cls.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ModelError(f"invalid JSON: {exc}") from exc


def _is_submultiset(small: Iterable[Weight], big: Iterable[Weight]) -> bool:
    pool = list(big)
    for w in small:
        if w not in pool:
            return False
        pool.remove(w)
    return True


# ---------------------------------------------------------------- spaces
def _check_chars(chars: Sequence[Sequence[int]]) -> tuple[Weight, ...]:
    chars = tuple(check_weight(c, None, nonzero=False) for c in chars)
    if len({len(c) for c in chars}) > 1:
        raise ModelError("characters of different lengths")
    if len(set(chars)) != len(chars):
        raise ModelError("repeated characters: fixed points are not isolated")
    return chars


def subset_label(I: Sequence[int]) -> str:
    return "{" + ",".join(str(i + 1) for i in I) + "}"


def grassmannian_weights(I: Sequence[int], chars: Sequence[Weight]) -> list[Weight]:
    """Tangent weights chars[j] - chars[i] (i in I, j not in I) at the plane I."""
    inside = set(I)
    return [weight_sub(chars[j], chars[i])
            for i in I for j in range(len(chars)) if j not in inside]


def partitions_in_box(rows: int, cols: int):
    """Partitions with at most ``rows`` parts, each at most ``cols`` (weakly decreasing tuples)."""
    def rec(k, bound):
        if k == 0:
            yield ()
            return
        for first in range(bound, -1, -1):
            for rest in rec(k - 1, first):
                yield (first,) + rest
    for lam in rec(rows, cols):
        yield lam


def grassmannian_space(k: int, n: int, chars: Sequence[Sequence[int]],
                       names: Sequence[str] | None = None) -> SpaceModel:
    if not 0 < k < n:
        raise ModelError("need 0 < k < n")
    chars = _check_chars(chars)
    if len(chars) != n:
        raise ModelError(f"{len(chars)} characters for C^{n}")
    rank = len(chars[0])
    points = []
    for I in combinations(range(n), k):
        ws = tuple(grassmannian_weights(I, chars))
        h = tuple(sum(c) for c in zip(*(chars[i] for i in I)))
        points.append(FixedPoint(subset_label(I), ws, ws, I, h))
    cells = tuple(sorted(sum(lam) for lam in partitions_in_box(k, n - k)))
    return SpaceModel(rank, k * (n - k), tuple(points), cells,
                      tuple(names) if names else default_names(rank), chars)


def projective_space(chars: Sequence[Sequence[int]],
                     names: Sequence[str] | None = None) -> SpaceModel:
    chars = _check_chars(chars)
    n = len(chars) - 1
    rank = len(chars[0]) if chars else 0
    points = []
    for i in range(n + 1):
        ws = tuple(weight_sub(chars[j], chars[i]) for j in range(n + 1) if j != i)
        points.append(FixedPoint(f"p{i}", ws, ws, (i,), chars[i]))
    return SpaceModel(rank, n, tuple(points), tuple(range(n + 1)),
                      tuple(names) if names else default_names(rank), chars)


def standard_chars(rank: int) -> list[Weight]:
    """Basis characters e_1..e_r."""
    return [tuple(int(i == j) for j in range(rank)) for i in range(rank)]


def det_chars(n: int) -> tuple[list[Weight], tuple[str, ...]]:
    """Characters (-s1..-sn, t1..tn) of C^n_s + C^n_t and their names."""
    names = tuple(f"s{i}" for i in range(1, n + 1)) + tuple(f"t{i}" for i in range(1, n + 1))
    chars = [tuple(-int(i == j) for j in range(2 * n)) for i in range(n)]
    chars += [tuple(int(n + i == j) for j in range(2 * n)) for i in range(n)]
    return chars, names


# ------------------------------------------------------- Schubert variety
def schubert_membership(I: Iterable[int], s_indices: Iterable[int]) -> bool:
    return bool(set(I) & set(s_indices))


def schubert_split(I: Sequence[int], chars: Sequence[Weight], s_indices: Iterable[int]
                   ) -> tuple[list[int], list[int], list[Weight], list[Weight]]:
    """Split the Grassmannian tangent weights at I for the codim-1 Schubert variety.

    Returns (A, B', block weights, remaining weights): A = s-indices in I,
    B' = non-s indices outside I, block = {chars[b] - chars[a]}.
    """
    s = set(s_indices)
    inside = set(I)
    A = [i for i in I if i in s]
    B = [j for j in range(len(chars)) if j not in inside and j not in s]
    block = [weight_sub(chars[b], chars[a]) for a in A for b in B]
    rest = list(grassmannian_weights(I, chars))
    for w in block:
        rest.remove(w)
    return A, B, block, rest


def schubert_smooth_tangent_weights(I: Sequence[int], chars: Sequence[Weight],
                                    s_indices: Iterable[int]) -> list[Weight]:
    s_indices = list(s_indices)
    if not schubert_membership(I, s_indices):
        raise ModelError(f"{subset_label(I)} is not a point of the Schubert variety")
    A, B, block, rest = schubert_split(I, chars, s_indices)
    if len(block) != 1:
        raise ModelError(f"{subset_label(I)} is a singular point of the Schubert variety")
    return rest


def schubert_cells(n: int) -> tuple[int, ...]:
    """Cell dimensions of the codim-1 Schubert variety in Gr_n(C^2n)."""
    return tuple(sorted(n * n - sum(lam) for lam in partitions_in_box(n, n) if any(lam)))


def cell_chi_y(dims: Iterable[int]) -> LaurentPoly:
    """sum over cells of (-y)^dim."""
    items = [([d], (-1) ** d) for d in dims]
    return LaurentPoly.from_exps(Y_CTX, items) if items else LaurentPoly.zero(Y_CTX)
