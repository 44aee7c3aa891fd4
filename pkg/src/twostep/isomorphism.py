"""Explicit isomorphism witnesses between presentations.

File format::

    source n5_1+n3_1                  # catalog name or a path to an .alg file
    target n5_1_plus_n3_1_s4.alg      # paths are relative to the witness file
    dim 8
    x1 = -e6                          # image of the source basis vector x1
    x5 = e1

Basis vectors without a line map to themselves.  The matrix acts as an
operator: ``target = change_basis(source, M)``, i.e. ``[M x, M y]_target =
M [x, y]_source``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional, Tuple, Union

from . import linalg
from .algebra import (
    LieAlgebra,
    ParseError,
    _statements,
    change_basis,
    format_linear_combination,
    parse_linear_combination,
)
from .catalog import catalog_algebra, data_path, load_algebra_file


@dataclass(frozen=True)
class IsomorphismWitness:
    source: str
    target: str
    matrix: Tuple[Tuple[object, ...], ...]
    base_dir: Optional[Path] = None

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def resolve(self, ref: str, catalog: Optional[Mapping] = None) -> LieAlgebra:
        if catalog is not None and ref in catalog:
            entry = catalog[ref]
            return getattr(entry, "algebra", entry)
        if ref.endswith(".alg"):
            path = Path(ref)
            if not path.is_absolute() and self.base_dir is not None:
                path = self.base_dir / path
            return load_algebra_file(path)
        return catalog_algebra(ref)

    def check(self, source: Optional[LieAlgebra] = None, target: Optional[LieAlgebra] = None,
              catalog: Optional[Mapping] = None) -> bool:
        a = source if source is not None else self.resolve(self.source, catalog)
        b = target if target is not None else self.resolve(self.target, catalog)
        if a.dim != self.dim or b.dim != self.dim:
            raise ValueError(f"dimension mismatch: {a.dim}, {b.dim} vs matrix {self.dim}")
        return change_basis(a, self.matrix) == b


def parse_isomorphism(text: str, source_name: str = "", base_dir: Optional[Path] = None) -> IsomorphismWitness:
    fields = {}
    images = {}
    for line_no, col, stmt in _statements(text):
        lhs, eq, rhs = stmt.partition("=")
        lhs = lhs.strip()
        if eq and lhs.startswith("x") and lhs[1:].isdigit():
            k = int(lhs[1:])
            if k in images:
                raise ParseError(f"duplicate image for x{k}", line_no, col + 1, source_name)
            images[k] = (parse_linear_combination(rhs, "e", line_no, col + len(lhs) + 1, source_name), line_no)
            continue
        word, _, rest = stmt.partition(" ")
        if word not in ("source", "target", "dim") or not rest.strip():
            raise ParseError(f"unknown or empty directive {word!r}", line_no, col + 1, source_name)
        fields[word] = rest.strip()
    for req in ("source", "target", "dim"):
        if req not in fields:
            raise ParseError(f"missing '{req}' directive", 1, 1, source_name)
    n = int(fields["dim"])
    m = linalg.identity(n)
    for k, (vec, line_no) in images.items():
        if not 1 <= k <= n or any(not 1 <= i <= n for i in vec):
            raise ParseError("basis index out of range", line_no, 1, source_name)
        for i in range(n):
            m[i][k - 1] = vec.get(i + 1, Fraction(0))
    if linalg.rank(m) < n:
        raise ParseError("isomorphism matrix is singular", 1, 1, source_name)
    return IsomorphismWitness(fields["source"], fields["target"], tuple(tuple(r) for r in m), base_dir)


def load_isomorphism(path: Union[str, Path]) -> IsomorphismWitness:
    path = Path(path)
    return parse_isomorphism(path.read_text(encoding="utf-8"), str(path), path.parent)


def render_isomorphism(w: IsomorphismWitness) -> str:
    lines = [f"source {w.source}", f"target {w.target}", f"dim {w.dim}"]
    for k in range(w.dim):
        col = {i + 1: w.matrix[i][k] for i in range(w.dim) if w.matrix[i][k]}
        if col != {k + 1: 1}:
            lines.append(f"x{k + 1} = {format_linear_combination(col, 'e')}")
    return "\n".join(lines) + "\n"


def shipped(name: str) -> IsomorphismWitness:
    """Load an isomorphism witness from the package data directory."""
    return load_isomorphism(data_path("adapted", name))
