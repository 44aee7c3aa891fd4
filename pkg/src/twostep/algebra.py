"""Lie algebras given by sparse exact structure constants.

Indices are 1-based throughout, matching the ``[e_i, e_j] = sum c_ij^k e_k``
notation; only pairs with ``i < j`` are stored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .scalars import format_scalar, parse_scalar, simplify

Pair = Tuple[int, int]
SparseVec = Mapping[int, object]


class ParseError(ValueError):
    """Malformed algebra/cocycle text; carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = ""):
        self.line = line
        self.col = col
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{col}: {message}")


def _clean_vec(vec: Mapping[int, object]) -> Dict[int, object]:
    return {k: simplify(v) for k, v in sorted(vec.items()) if v}


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    dim: int
    brackets: Mapping[Pair, SparseVec]
    name: str = field(default="")

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("dimension must be non-negative")
        clean = {}
        for (i, j), vec in self.brackets.items():
            if not (1 <= i <= self.dim and 1 <= j <= self.dim):
                raise IndexError(f"bracket [{i},{j}] out of range for dim {self.dim}")
            if i == j:
                if any(vec.values()):
                    raise ValueError(f"bracket [{i},{i}] of a vector with itself must vanish")
                continue
            for k in vec:
                if not 1 <= k <= self.dim:
                    raise IndexError(f"basis index e{k} out of range for dim {self.dim}")
            if i > j:
                i, j = j, i
                vec = {k: -v for k, v in vec.items()}
            v = _clean_vec(vec)
            if v:
                prev = clean.get((i, j))
                if prev is not None:
                    merged = dict(prev)
                    for k, c in v.items():
                        merged[k] = merged.get(k, 0) + c
                    v = _clean_vec(merged)
                if v:
                    clean[(i, j)] = MappingProxyType(v)
                else:
                    clean.pop((i, j), None)
        object.__setattr__(
            self, "brackets", MappingProxyType(dict(sorted(clean.items())))
        )

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.dim == other.dim and self._key() == other._key()

    def __hash__(self):
        return hash((self.dim, self._key()))

    def _key(self):
        return tuple((p, tuple(v.items())) for p, v in self.brackets.items())

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"LieAlgebra({label}dim={self.dim}, {len(self.brackets)} brackets)"

    def with_name(self, name: str) -> "LieAlgebra":
        return LieAlgebra(self.dim, self.brackets, name)

    def bracket_basis(self, i: int, j: int) -> Dict[int, object]:
        """``[e_i, e_j]`` as a sparse vector (any order of i, j)."""
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), {}))
        return {k: -v for k, v in self.brackets.get((j, i), {}).items()}

    def tensor(self) -> List[List[list]]:
        """Dense 0-based ``c[i][j][k]`` including the skew-symmetric half."""
        n = self.dim
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), vec in self.brackets.items():
            for k, v in vec.items():
                c[i - 1][j - 1][k - 1] = v
                c[j - 1][i - 1][k - 1] = -v
        return c

    def bracket(self, x: Sequence, y: Sequence) -> list:
        """Bracket of two dense coordinate vectors."""
        out = [Fraction(0)] * self.dim
        for (i, j), vec in self.brackets.items():
            coef = x[i - 1] * y[j - 1] - x[j - 1] * y[i - 1]
            if coef:
                for k, v in vec.items():
                    out[k - 1] += coef * v
        return out

    def is_abelian(self) -> bool:
        return not self.brackets

    def padded(self, n: int) -> "LieAlgebra":
        if n < self.dim:
            raise ValueError("cannot pad to a smaller dimension")
        return LieAlgebra(n, self.brackets, self.name)


def abelian(n: int, name: str = "") -> LieAlgebra:
    return LieAlgebra(n, {}, name)


# ---------------------------------------------------------------------------
# text format

_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?:(?P<coef>\([^()]*\)|\d+(?:/\d+)?)\s*\*?\s*)?"
    r"(?P<letter>[a-z])(?P<idx>\d+)\s*"
)


def parse_linear_combination(
    text: str, letter: str, line: int = 0, col0: int = 0, source: str = ""
) -> Dict[int, object]:
    """Parse ``c1*e3 + c2*e5 - e7`` into ``{3: c1, 5: c2, 7: -1}``."""
    out: Dict[int, object] = {}
    pos = 0
    first = True
    stripped = text.rstrip()
    if not stripped.strip():
        raise ParseError("empty right-hand side", line, col0 + 1, source)
    if stripped.strip() == "0":
        return out
    while pos < len(stripped):
        m = _TERM.match(stripped, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse term near {stripped[pos:]!r}", line, col0 + pos + 1, source)
        if not first and m.group("sign") is None:
            raise ParseError("missing '+' or '-' between terms", line, col0 + pos + 1, source)
        if m.group("letter") != letter:
            raise ParseError(
                f"expected basis letter {letter!r}, got {m.group('letter')!r}",
                line, col0 + m.start("letter") + 1, source,
            )
        coef_txt = m.group("coef")
        try:
            coef = parse_scalar(coef_txt.strip("()")) if coef_txt else Fraction(1)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad coefficient {coef_txt!r}: {exc}", line, col0 + m.start("coef") + 1, source)
        if m.group("sign") == "-":
            coef = -coef
        k = int(m.group("idx"))
        out[k] = out.get(k, 0) + coef
        pos = m.end()
        first = False
    return out


def format_linear_combination(vec: Mapping[int, object], letter: str) -> str:
    parts = []
    for k, v in sorted(vec.items()):
        txt = format_scalar(v)
        if any(ch in txt for ch in "i"):
            txt = f"({txt})"
        sign = "-" if txt.startswith("-") else "+"
        mag = txt[1:] if sign == "-" else txt
        parts.append((sign, f"{letter}{k}" if mag == "1" else f"{mag}*{letter}{k}"))
    if not parts:
        return "0"
    head_sign, head = parts[0]
    s = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


_BRACKET = re.compile(r"\s*(?P<prefix>[a-z]?)\[\s*(?P<i>\d+)\s*,\s*(?P<j>\d+)\s*\]\s*=\s*")


_DIRECTIVES = {"name", "dim", "rank", "label", "orbit"}


def _statements(text: str):
    """Yield (line_no, col_offset, statement) with comments stripped."""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        offset = 0
        for piece in body.split(";"):
            if piece.strip():
                lead = len(piece) - len(piece.lstrip())
                yield line_no, offset + lead, piece.strip()
            offset += len(piece) + 1


def parse_bilinear(
    text: str, prefix: str, letter: str, source: str = ""
) -> Tuple[Dict[str, str], Dict[Pair, Dict[int, object]]]:
    """Shared parser for algebra and cocycle files.

    Returns the header fields (``name``, ``dim``, ...) and the bracket table.
    """
    header: Dict[str, str] = {}
    table: Dict[Pair, Dict[int, object]] = {}
    seen: Dict[Pair, int] = {}
    for line_no, col, stmt in _statements(text):
        m = _BRACKET.match(stmt)
        if m:
            if m.group("prefix") != prefix:
                raise ParseError(f"unexpected bracket prefix {m.group('prefix')!r}", line_no, col + 1, source)
            if "dim" not in header:
                raise ParseError("'dim' must precede bracket lines", line_no, col + 1, source)
            n = int(header["dim"])
            i, j = int(m.group("i")), int(m.group("j"))
            for idx in (i, j):
                if not 1 <= idx <= n:
                    raise ParseError(f"index {idx} out of range 1..{n}", line_no, col + 1, source)
            if i == j:
                raise ParseError(f"bracket of a vector with itself: [{i},{j}]", line_no, col + 1, source)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ParseError(
                    f"duplicate bracket entry [{key[0]},{key[1]}] (first on line {seen[key]})",
                    line_no, col + 1, source,
                )
            seen[key] = line_no
            vec = parse_linear_combination(stmt[m.end():], letter, line_no, col + m.end(), source)
            if i > j:
                vec = {k: -v for k, v in vec.items()}
            table[key] = vec
            continue
        word, _, rest = stmt.partition(" ")
        rest = rest.strip()
        if word not in _DIRECTIVES:
            raise ParseError(f"unknown directive {word!r}", line_no, col + 1, source)
        if word in header:
            raise ParseError(f"duplicate {word!r} directive", line_no, col + 1, source)
        if word in {"dim", "rank", "orbit"}:
            if not rest.isdigit():
                raise ParseError(f"'{word}' needs a non-negative integer", line_no, col + len(word) + 2, source)
        elif not rest:
            raise ParseError("'name' needs a value", line_no, col + 1, source)
        header[word] = rest
    if "dim" not in header:
        raise ParseError("missing 'dim' directive", 1, 1, source)
    return header, table


def parse_algebra(text: str, source: str = "") -> LieAlgebra:
    """Parse the catalog text format.

    >>> parse_algebra("dim 3; [2,3]=1*e1").brackets[(2, 3)][1]
    Fraction(1, 1)
    """
    header, table = parse_bilinear(text, "", "e", source)
    n = int(header["dim"])
    for (i, j), vec in table.items():
        for k in vec:
            if not 1 <= k <= n:
                raise ParseError(f"basis vector e{k} out of range 1..{n}", 0, 0, source)
    return LieAlgebra(n, table, header.get("name", ""))


def render_algebra(a: LieAlgebra) -> str:
    lines = []
    if a.name:
        lines.append(f"name {a.name}")
    lines.append(f"dim {a.dim}")
    for (i, j), vec in a.brackets.items():
        lines.append(f"[{i},{j}] = {format_linear_combination(vec, 'e')}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# structural checks


def jacobi_residual(a: LieAlgebra) -> List[Tuple[Tuple[int, int, int], Dict[int, object]]]:
    """Triples ``i<j<l`` whose cyclic sum ``[[ei,ej],el] + [[ej,el],ei] + [[el,ei],ej]`` is nonzero."""
    n = a.dim
    out = []
    for i, j, l in combinations(range(1, n + 1), 3):
        total: Dict[int, object] = {}
        for x, y, z in ((i, j, l), (j, l, i), (l, i, j)):
            for m, c in a.bracket_basis(x, y).items():
                for r, d in a.bracket_basis(m, z).items():
                    total[r] = total.get(r, 0) + c * d
        total = _clean_vec(total)
        if total:
            out.append(((i, j, l), total))
    return out


def is_two_step(a: LieAlgebra) -> bool:
    """True iff ``[g, [g, g]] = 0``: every bracket image is central."""
    for vec in a.brackets.values():
        for l in range(1, a.dim + 1):
            total: Dict[int, object] = {}
            for k, c in vec.items():
                for r, d in a.bracket_basis(k, l).items():
                    total[r] = total.get(r, 0) + c * d
            if any(total.values()):
                return False
    return True


def change_basis(a: LieAlgebra, m: Sequence[Sequence], name: Optional[str] = None) -> LieAlgebra:
    """Transport the bracket along ``g``: ``[x, y]' = g [g^-1 x, g^-1 y]``."""
    n = a.dim
    if len(m) != n or any(len(row) != n for row in m):
        raise ValueError(f"basis change must be {n}x{n}")
    try:
        ginv = linalg.inverse(m)
    except ZeroDivisionError:
        raise ValueError("basis change matrix is singular") from None
    cols = linalg.transpose(ginv)  # cols[i] = g^-1 e_{i+1}
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            v = a.bracket(cols[i], cols[j])
            if any(v):
                w = linalg.matvec(m, v)
                out[(i + 1, j + 1)] = {k + 1: c for k, c in enumerate(w) if c}
    return LieAlgebra(n, out, a.name if name is None else name)


def direct_sum(*parts: LieAlgebra, name: str = "") -> LieAlgebra:
    out = {}
    shift = 0
    for p in parts:
        for (i, j), vec in p.brackets.items():
            out[(i + shift, j + shift)] = {k + shift: v for k, v in vec.items()}
        shift += p.dim
    return LieAlgebra(shift, out, name)


def is_isomorphic_via(a: LieAlgebra, b: LieAlgebra, m: Sequence[Sequence]) -> bool:
    """Certify ``change_basis(a, m) == b`` exactly."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return change_basis(a, m) == b


def permutation_matrix(images: Iterable[int]) -> linalg.Matrix:
    """Matrix sending ``e_i`` to ``e_{images[i-1]}``."""
    images = list(images)
    n = len(images)
    if sorted(images) != list(range(1, n + 1)):
        raise ValueError("not a permutation")
    m = linalg.zeros(n, n)
    for i, k in enumerate(images):
        m[k - 1][i] = Fraction(1)
    return m
