"""Degeneration witnesses: one-parameter basis changes over Q(t) and their
limits at ``t = 0``.

A witness matrix ``M`` lists new basis vectors column-wise,
``y_i = sum_j M[j][i] e_j``.  Two readings are supported:

``substitution``
    the brackets of the ``y_i`` are re-expressed in the ``y`` basis,
    i.e. ``mu'(x, y) = M^-1 mu(M x, M y)``;
``operator``
    ``M`` is the operator ``g_t`` acting by ``g mu(g^-1 x, g^-1 y)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import linalg
from .algebra import LieAlgebra, ParseError, change_basis, jacobi_residual
from .ratfunc import RatFunc, RatFuncSyntaxError, parse_ratfunc
from .scalars import format_scalar, parse_scalar

ORIENTATIONS = ("substitution", "operator")


class PoleError(ValueError):
    """A transformed structure constant has a pole at ``t = 0``."""

    def __init__(self, pair: Tuple[int, int], index: int, value: RatFunc):
        self.pair = pair
        self.index = index
        self.value = value
        super().__init__(
            f"pole at t=0 in [y{pair[0]},y{pair[1]}] coefficient of y{index}: {value}"
        )


class MismatchError(ValueError):
    def __init__(self, differences: List[dict]):
        self.differences = differences
        lines = ", ".join(f"[{d['pair'][0]},{d['pair'][1]}]" for d in differences)
        super().__init__(f"limit differs from target at brackets {lines}")


@dataclass(frozen=True)
class DegenerationWitness:
    source: str
    target: str
    matrix: Tuple[Tuple[RatFunc, ...], ...]
    orientation: str = "substitution"
    postiso: Optional[Tuple[Tuple[Fraction, ...], ...]] = None
    provenance: str = ""
    note: str = ""
    path: str = field(default="", compare=False)

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def evaluated(self, t) -> linalg.Matrix:
        return [[x(t) for x in row] for row in self.matrix]

    @classmethod
    def scaling(cls, source: str, target: str, n: int, factor: RatFunc,
                orientation: str = "operator", **kw) -> "DegenerationWitness":
        rows = tuple(
            tuple(factor if i == j else RatFunc() for j in range(n)) for i in range(n)
        )
        return cls(source, target, rows, orientation, **kw)


def _ratfunc_matrix(m: Sequence[Sequence]) -> List[List[RatFunc]]:
    return [[x if isinstance(x, RatFunc) else RatFunc.const(x) for x in row] for row in m]


def _inverse(m: Sequence[Sequence[RatFunc]]) -> List[List[RatFunc]]:
    n = len(m)
    one, zero = RatFunc.const(1), RatFunc()
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(m)]
    red, pivots = linalg.rref(aug, 2 * n)
    if len(red) < n or pivots[:n] != list(range(n)):
        raise ValueError("witness matrix is singular over Q(t)")
    return [row[n:] for row in red]


def _matvec(m, v):
    out = []
    for row in m:
        acc = RatFunc()
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out


def transformed_constants(
    a: LieAlgebra, w: DegenerationWitness
) -> Dict[Tuple[int, int], List[RatFunc]]:
    """Structure constants of ``a`` in the witness basis, exactly over Q(t)."""
    n = a.dim
    if w.dim != n or any(len(r) != n for r in w.matrix):
        raise ValueError(f"witness is {w.dim}x{w.dim}, algebra has dimension {n}")
    m = _ratfunc_matrix(w.matrix)
    minv = _inverse(m)
    inner, outer = (m, minv) if w.orientation == "substitution" else (minv, m)
    cols = [[inner[r][c] for r in range(n)] for c in range(n)]
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            u, v = cols[i], cols[j]
            acc = [RatFunc() for _ in range(n)]
            for (p, q), vec in a.brackets.items():
                coef = u[p - 1] * v[q - 1] - u[q - 1] * v[p - 1]
                if coef:
                    for k, c in vec.items():
                        acc[k - 1] = acc[k - 1] + coef * c
            if any(acc):
                res = _matvec(outer, acc)
                if any(res):
                    out[(i + 1, j + 1)] = res
    return out


def limit(a: LieAlgebra, w: DegenerationWitness, name: str = "") -> LieAlgebra:
    consts = transformed_constants(a, w)
    brackets = {}
    for pair, vec in consts.items():
        entries = {}
        for k, r in enumerate(vec, start=1):
            if r.has_pole_at_zero():
                raise PoleError(pair, k, r)
            v = r.at_zero()
            if v:
                entries[k] = v
        if entries:
            brackets[pair] = entries
    lim = LieAlgebra(a.dim, brackets, name)
    bad = jacobi_residual(lim)
    if bad:  # cannot happen for a genuine witness; guards the arithmetic
        raise ArithmeticError(f"limit violates Jacobi at {bad[0][0]}")
    return lim


def specialize(a: LieAlgebra, w: DegenerationWitness, t) -> LieAlgebra:
    """The transformed algebra at a fixed nonzero parameter value."""
    consts = transformed_constants(a, w)
    return LieAlgebra(
        a.dim,
        {pair: {k: r(t) for k, r in enumerate(vec, start=1) if r} for pair, vec in consts.items()},
    )


def diff_brackets(got: LieAlgebra, want: LieAlgebra) -> List[dict]:
    keys = sorted(set(got.brackets) | set(want.brackets))
    out = []
    for k in keys:
        g = dict(got.brackets.get(k, {}))
        h = dict(want.brackets.get(k, {}))
        if g != h:
            out.append({
                "pair": k,
                "limit": {f"e{i}": format_scalar(v) for i, v in g.items()},
                "target": {f"e{i}": format_scalar(v) for i, v in h.items()},
            })
    return out


# ---------------------------------------------------------------------------
# verification


def monotonicity_violations(src_profile, tgt_profile, distinct: bool = True) -> List[str]:
    """Invariant relations a genuine degeneration must respect."""
    out = []
    if distinct and not src_profile.orbit_dim > tgt_profile.orbit_dim:
        out.append(f"orbit_dim {src_profile.orbit_dim} !> {tgt_profile.orbit_dim}")
    if src_profile.center_dim > tgt_profile.center_dim:
        out.append(f"center_dim {src_profile.center_dim} > {tgt_profile.center_dim}")
    if src_profile.derived_dim < tgt_profile.derived_dim:
        out.append(f"derived_dim {src_profile.derived_dim} < {tgt_profile.derived_dim}")
    for k, (x, y) in enumerate(zip(src_profile.betti, tgt_profile.betti)):
        if x > y:
            out.append(f"betti[{k}] {x} > {y}")
    sa, ta = src_profile.max_abelian, tgt_profile.max_abelian
    if sa.lower > ta.upper:
        out.append(f"max_abelian {sa.lower} > {ta.upper}")
    return out


def verify_degeneration(w: DegenerationWitness, catalog, check_invariants: bool = True) -> dict:
    """Check a witness against the catalog.

    Returns a report dict with ``status`` PASS; raises :class:`PoleError`
    or :class:`MismatchError` otherwise.  ``catalog`` maps names to
    entries exposing ``.algebra`` (or to algebras directly).
    """
    src = _lookup(catalog, w.source)
    tgt = _lookup(catalog, w.target)
    lim = limit(src, w)
    report = {
        "source": w.source,
        "target": w.target,
        "orientation": w.orientation,
        "provenance": w.provenance,
        "limit": _render_table(lim),
        "postiso": w.postiso is not None,
    }
    if lim == tgt:
        aligned = lim
    elif w.postiso is not None:
        aligned = change_basis(lim, [list(r) for r in w.postiso])
        report["aligned"] = _render_table(aligned)
    else:
        raise MismatchError(diff_brackets(lim, tgt))
    if aligned != tgt:
        raise MismatchError(diff_brackets(aligned, tgt))
    report["status"] = "PASS"
    if check_invariants:
        from .invariants import cached_profile

        ps, pt = cached_profile(src), cached_profile(tgt)
        bad = monotonicity_violations(ps, pt, distinct=w.source != w.target)
        report["invariant_violations"] = bad
        if bad:
            report["status"] = "INCONSISTENT"
    return report


def _lookup(catalog, name: str) -> LieAlgebra:
    try:
        entry = catalog[name]
    except KeyError:
        raise KeyError(f"unknown catalog name {name!r}") from None
    return getattr(entry, "algebra", entry)


def _render_table(a: LieAlgebra) -> List[str]:
    from .algebra import format_linear_combination

    return [f"[{i},{j}] = {format_linear_combination(v, 'e')}" for (i, j), v in a.brackets.items()]


def render_constants(consts: Mapping[Tuple[int, int], Sequence[RatFunc]]) -> List[str]:
    lines = []
    for (i, j), vec in sorted(consts.items()):
        terms = []
        for k, r in enumerate(vec, start=1):
            if r:
                terms.append(f"({r})*y{k}")
        lines.append(f"[y{i},y{j}] = " + " + ".join(terms))
    return lines


# ---------------------------------------------------------------------------
# witness files

_Y_LINE = re.compile(r"^y(?P<i>\d+)\s*=\s*(?P<rhs>.+)$")
_E_TAIL = re.compile(r"^(?P<coef>.*?)\s*\*?\s*e(?P<j>\d+)\s*$")


def _split_terms(rhs: str) -> List[Tuple[str, str]]:
    """Split at top-level +/- that are not part of an exponent."""
    terms, depth, start, sign = [], 0, 0, "+"
    s = rhs.strip()
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0:
            prev = s[:i].rstrip()
            if prev and prev[-1] not in "^*/":
                terms.append((sign, s[start:i]))
                sign, start = ch, i + 1
            elif not prev:
                sign, start = ch, i + 1
        i += 1
    terms.append((sign, s[start:]))
    return [(sg, body.strip()) for sg, body in terms]


def parse_witness(text: str, source_name: str = "", dim: int = 8) -> DegenerationWitness:
    header: Dict[str, str] = {}
    cols: Dict[int, Dict[int, RatFunc]] = {}
    postiso_rows: Optional[List[List[Fraction]]] = None
    lines = text.splitlines()
    for line_no, raw in enumerate(lines, start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if postiso_rows is not None and len(postiso_rows) < dim and not body.startswith("y"):
            try:
                row = [parse_scalar(tok) for tok in body.split()]
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"bad postiso row: {exc}", line_no, 1, source_name)
            if len(row) != dim:
                raise ParseError(f"postiso row needs {dim} entries", line_no, 1, source_name)
            postiso_rows.append(row)
            continue
        m = _Y_LINE.match(body)
        if m:
            i = int(m.group("i"))
            if not 1 <= i <= dim:
                raise ParseError(f"y{i} out of range 1..{dim}", line_no, 1, source_name)
            if i in cols:
                raise ParseError(f"duplicate definition of y{i}", line_no, 1, source_name)
            col: Dict[int, RatFunc] = {}
            for sign, term in _split_terms(m.group("rhs")):
                tm = _E_TAIL.match(term)
                if not tm:
                    raise ParseError(f"term {term!r} must end in e<j>", line_no, 1, source_name)
                j = int(tm.group("j"))
                if not 1 <= j <= dim:
                    raise ParseError(f"e{j} out of range 1..{dim}", line_no, 1, source_name)
                coef_txt = tm.group("coef").strip()
                try:
                    coef = parse_ratfunc(coef_txt) if coef_txt else RatFunc.const(1)
                except (RatFuncSyntaxError, ZeroDivisionError) as exc:
                    raise ParseError(f"bad coefficient {coef_txt!r}: {exc}", line_no, 1, source_name)
                if sign == "-":
                    coef = -coef
                col[j] = col.get(j, RatFunc()) + coef
            cols[i] = col
            continue
        word, _, rest = body.partition(" ")
        rest = rest.strip()
        if word == "postiso":
            postiso_rows = []
            continue
        if word == "dim":
            dim = int(rest)
            header[word] = rest
            continue
        if word not in {"source", "target", "orientation", "provenance", "note"}:
            raise ParseError(f"unknown directive {word!r}", line_no, 1, source_name)
        if word == "note" and "note" in header:
            header["note"] += " " + rest.strip('"')
        else:
            header[word] = rest.strip('"')
    for key in ("source", "target"):
        if key not in header:
            raise ParseError(f"missing {key!r}", 1, 1, source_name)
    if postiso_rows is not None and len(postiso_rows) != dim:
        raise ParseError("incomplete postiso block", len(lines), 1, source_name)
    zero, one = RatFunc(), RatFunc.const(1)
    matrix = []
    for r in range(1, dim + 1):
        row = []
        for c in range(1, dim + 1):
            if c in cols:
                row.append(cols[c].get(r, zero))
            else:
                row.append(one if r == c else zero)
        matrix.append(tuple(row))
    return DegenerationWitness(
        source=header["source"],
        target=header["target"],
        matrix=tuple(matrix),
        orientation=header.get("orientation", "substitution"),
        postiso=None if postiso_rows is None else tuple(tuple(r) for r in postiso_rows),
        provenance=header.get("provenance", ""),
        note=header.get("note", ""),
        path=source_name,
    )


def render_witness(w: DegenerationWitness) -> str:
    lines = [f"source {w.source}", f"target {w.target}", f"orientation {w.orientation}"]
    if w.provenance:
        lines.append(f"provenance {w.provenance}")
    if w.note:
        lines.append(f'note "{w.note}"')
    n = w.dim
    if n != 8:
        lines.insert(0, f"dim {n}")
    for c in range(n):
        col = [w.matrix[r][c] for r in range(n)]
        if all((x == 1) if r == c else (not x) for r, x in enumerate(col)):
            continue
        terms = []
        for r, x in enumerate(col):
            if not x:
                continue
            terms.append(f"({x})*e{r + 1}")
        lines.append(f"y{c + 1} = " + " + ".join(terms))
    if w.postiso is not None:
        lines.append("postiso")
        for row in w.postiso:
            lines.append(" ".join(format_scalar(x) for x in row))
    return "\n".join(lines) + "\n"


def load_witness(path: Union[str, Path]) -> DegenerationWitness:
    path = Path(path)
    return parse_witness(path.read_text(encoding="utf-8"), str(path))


def load_corpus(directory: Union[str, Path]) -> List[DegenerationWitness]:
    return [load_witness(p) for p in sorted(Path(directory).rglob("*.wit"))]
