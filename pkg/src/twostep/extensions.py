"""Trivial-coefficient 2-cocycles and the central extensions they define."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from types import MappingProxyType
from typing import Dict, List, Mapping, Tuple, Union

from . import linalg
from .algebra import LieAlgebra, ParseError, format_linear_combination, jacobi_residual, parse_bilinear
from .invariants import Subspace, center

Pair = Tuple[int, int]


class CocycleError(ValueError):
    """The alternating map fails the cocycle condition."""


@dataclass(frozen=True)
class Cocycle:
    """Alternating ``b: C^n x C^n -> C^r``; ``values[(i, j)][s]`` is the
    ``z_s`` coefficient of ``b(e_i, e_j)`` for ``i < j``."""

    n: int
    rank: int
    values: Mapping[Pair, Mapping[int, object]] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        clean = {}
        for (i, j), vec in self.values.items():
            if i == j:
                raise ValueError(f"alternating map has no diagonal entry ({i},{j})")
            for idx in (i, j):
                if not 1 <= idx <= self.n:
                    raise ValueError(f"index {idx} out of range 1..{self.n}")
            sign = 1 if i < j else -1
            key = (min(i, j), max(i, j))
            vec = {s: sign * c for s, c in vec.items() if c}
            if any(not 1 <= s <= self.rank for s in vec):
                raise ValueError(f"slot out of range 1..{self.rank}")
            if vec:
                clean[key] = MappingProxyType(vec)
        object.__setattr__(self, "values", MappingProxyType(clean))

    def __call__(self, i: int, j: int) -> Dict[int, object]:
        if i == j:
            return {}
        if i < j:
            return dict(self.values.get((i, j), {}))
        return {s: -c for s, c in self.values.get((j, i), {}).items()}

    def evaluate(self, x, y) -> list:
        """``b(x, y)`` for dense coordinate vectors, as a length-``rank`` list."""
        out = [Fraction(0)] * self.rank
        for (i, j), vec in self.values.items():
            coef = x[i - 1] * y[j - 1] - x[j - 1] * y[i - 1]
            if coef:
                for s, c in vec.items():
                    out[s - 1] += coef * c
        return out

    @classmethod
    def zero(cls, n: int, rank: int = 1) -> "Cocycle":
        return cls(n, rank, {}, "0")

    @classmethod
    def coboundary(cls, g: LieAlgebra, f: List[List[object]], name: str = "") -> "Cocycle":
        """``b(x, y) = f([x, y])`` for a linear ``f: g -> C^r`` given as ``r x n``."""
        vals = {}
        for (i, j), vec in g.brackets.items():
            img = {s + 1: sum(row[k - 1] * c for k, c in vec.items()) for s, row in enumerate(f)}
            vals[(i, j)] = img
        return cls(g.dim, len(f), vals, name)


def parse_cocycle(text: str, source: str = "") -> Cocycle:
    header, table = parse_bilinear(text, "b", "z", source)
    if "rank" not in header:
        raise ParseError("missing 'rank' directive", 1, 1, source)
    try:
        return Cocycle(int(header["dim"]), int(header["rank"]), table, header.get("name", ""))
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1, source) from None


def load_cocycle(path: Union[str, Path]) -> Cocycle:
    path = Path(path)
    return parse_cocycle(path.read_text(encoding="utf-8"), str(path))


def render_cocycle(b: Cocycle) -> str:
    lines = []
    if b.name:
        lines.append(f"name {b.name}")
    lines += [f"dim {b.n}", f"rank {b.rank}"]
    for (i, j), vec in sorted(b.values.items()):
        lines.append(f"b[{i},{j}] = {format_linear_combination(vec, 'z')}")
    return "\n".join(lines) + "\n"


def _check_dims(g: LieAlgebra, b: Cocycle):
    if b.n != g.dim:
        raise ValueError(f"cocycle on C^{b.n} checked against a {g.dim}-dimensional algebra")


def cocycle_defects(g: LieAlgebra, b: Cocycle) -> List[Tuple[Tuple[int, int, int], List[object]]]:
    """Basis triples where ``b([x,y],z) + b([y,z],x) + b([z,x],y)`` is nonzero."""
    _check_dims(g, b)
    n = g.dim
    basis = [[Fraction(int(k == i)) for k in range(n)] for i in range(n)]
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                x, y, z = basis[i], basis[j], basis[k]
                total = [Fraction(0)] * b.rank
                for u, v, w in ((x, y, z), (y, z, x), (z, x, y)):
                    for s, c in enumerate(b.evaluate(g.bracket(u, v), w)):
                        total[s] += c
                if any(total):
                    out.append(((i + 1, j + 1, k + 1), total))
    return out


def cocycle_check(g: LieAlgebra, b: Cocycle) -> bool:
    return not cocycle_defects(g, b)


def radical(b: Cocycle) -> Subspace:
    """``b^perp = {x : b(x, y) = 0 for all y}``, from ``b`` alone."""
    rows = []
    for s in range(1, b.rank + 1):
        for j in range(1, b.n + 1):
            row = [Fraction(0)] * b.n
            for i in range(1, b.n + 1):
                row[i - 1] = b(i, j).get(s, Fraction(0))
            rows.append(row)
    return Subspace.span(b.n, linalg.nullspace(rows, b.n) if rows else linalg.identity(b.n))


def perp_center_condition(g: LieAlgebra, b: Cocycle) -> Tuple[bool, Subspace]:
    """Whether ``b^perp`` meets the center trivially, and the intersection."""
    _check_dims(g, b)
    meet = radical(b).intersect(center(g))
    return meet.dim == 0, meet


def central_extension(g: LieAlgebra, b: Cocycle, name: str = "") -> LieAlgebra:
    """``g + C^r`` with ``[x, y] = [x, y]_g + sum_s b_s(x, y) z_s``, ``z_s = e_{n+s}``."""
    _check_dims(g, b)
    defects = cocycle_defects(g, b)
    if defects:
        (i, j, k), val = defects[0]
        raise CocycleError(f"cocycle condition fails on (e{i}, e{j}, e{k}): {val}")
    n = g.dim
    out: Dict[Pair, Dict[int, object]] = {key: dict(v) for key, v in g.brackets.items()}
    for key, vec in b.values.items():
        slot = out.setdefault(key, {})
        for s, c in vec.items():
            slot[n + s] = slot.get(n + s, 0) + c
    ext = LieAlgebra(n + b.rank, out, name)
    if jacobi_residual(ext):
        raise CocycleError("extension fails the Jacobi identity")
    return ext


def perp_report(g: LieAlgebra, b: Cocycle) -> dict:
    ok, meet = perp_center_condition(g, b)
    return {
        "cocycle": b.name,
        "radical": radical(b).to_json(),
        "center": center(g).to_json(),
        "intersection": meet.to_json(),
        "condition_holds": ok,
    }
