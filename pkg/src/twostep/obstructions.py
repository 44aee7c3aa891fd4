"""Non-degeneration tests from orbit-closure invariants, external facts and
Borel-stable subsets of structure-constant space."""

from __future__ import annotations

import csv
import io
import random
import shlex
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from . import linalg
from .algebra import LieAlgebra, change_basis
from .catalog import CatalogEntry, data_path
from .invariants import InvariantProfile, cached_profile
from .scalars import format_scalar

KINDS = ("OrbitDim", "CenterDim", "DerivedDim", "CohomologyDim", "MaxAbelian", "External")
_CODES = {
    "OrbitDim": "a",
    "CenterDim": "b",
    "DerivedDim": "c",
    "CohomologyDim": "d",
    "MaxAbelian": "e",
    "External": "ext",
}


@dataclass(frozen=True)
class ObstructionReason:
    kind: str
    source_value: Optional[int] = None
    target_value: Optional[int] = None
    degree: Optional[int] = None
    citation: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown obstruction kind {self.kind!r}")

    @property
    def code(self) -> str:
        c = _CODES[self.kind]
        return f"{c}{self.degree}" if self.kind == "CohomologyDim" else c

    def __str__(self):
        if self.kind == "External":
            return f"External({self.citation})"
        head = f"CohomologyDim({self.degree})" if self.kind == "CohomologyDim" else self.kind
        op = "<" if self.kind == "DerivedDim" else ">"
        if self.kind == "OrbitDim":
            op = "<="
        return f"{head}: {self.source_value} {op} {self.target_value}"

    def to_json(self) -> dict:
        out = {"kind": self.kind, "code": self.code}
        if self.kind == "External":
            out["citation"] = self.citation
        else:
            out["source"] = self.source_value
            out["target"] = self.target_value
        if self.degree is not None:
            out["degree"] = self.degree
        return out

    @classmethod
    def from_json(cls, d: Mapping) -> "ObstructionReason":
        return cls(
            kind=d["kind"],
            source_value=d.get("source"),
            target_value=d.get("target"),
            degree=d.get("degree"),
            citation=d.get("citation", ""),
        )


def violated_relations(p: InvariantProfile, q: InvariantProfile) -> List[ObstructionReason]:
    """Every invariant relation a degeneration ``p -> q`` would break, in
    the fixed order orbit, center, derived, cohomology (by degree), abelian."""
    out = []
    if p.orbit_dim <= q.orbit_dim:
        out.append(ObstructionReason("OrbitDim", p.orbit_dim, q.orbit_dim))
    if p.center_dim > q.center_dim:
        out.append(ObstructionReason("CenterDim", p.center_dim, q.center_dim))
    if p.derived_dim < q.derived_dim:
        out.append(ObstructionReason("DerivedDim", p.derived_dim, q.derived_dim))
    for k, (x, y) in enumerate(zip(p.betti, q.betti)):
        if x > y:
            out.append(ObstructionReason("CohomologyDim", x, y, degree=k))
    a, b = p.max_abelian, q.max_abelian
    # only certified values may obstruct
    if a.certified and b.certified and a.lower > b.upper:
        out.append(ObstructionReason("MaxAbelian", a.lower, b.upper))
    return out


def _profiles(catalog: Mapping[str, CatalogEntry], seed: int = 0) -> Dict[str, InvariantProfile]:
    return {name: cached_profile(_alg(e), seed) for name, e in catalog.items()}


def _alg(entry) -> LieAlgebra:
    return getattr(entry, "algebra", entry)


def all_obstructions(g: str, h: str, catalog: Mapping[str, CatalogEntry]) -> List[ObstructionReason]:
    for name in (g, h):
        if name not in catalog:
            raise KeyError(f"unknown catalog name {name!r}")
    if g == h:
        raise ValueError("obstructions compare distinct catalog entries")
    return violated_relations(cached_profile(_alg(catalog[g])), cached_profile(_alg(catalog[h])))


def obstruction(g: str, h: str, catalog: Mapping[str, CatalogEntry]) -> Optional[ObstructionReason]:
    """First violated relation for ``g -> h``, or None if nothing obstructs."""
    found = all_obstructions(g, h, catalog)
    return found[0] if found else None


def obstruction_matrix(
    catalog: Mapping[str, CatalogEntry],
) -> Dict[Tuple[str, str], Optional[ObstructionReason]]:
    names = list(catalog)
    profiles = _profiles(catalog)
    out = {}
    for g in names:
        for h in names:
            if g != h:
                found = violated_relations(profiles[g], profiles[h])
                out[(g, h)] = found[0] if found else None
    return out


def matrix_to_csv(matrix: Mapping[Tuple[str, str], Optional[ObstructionReason]], names: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["g\\h"] + list(names))
    for g in names:
        row = [g]
        for h in names:
            r = matrix.get((g, h)) if g != h else None
            row.append("" if r is None else r.code)
        w.writerow(row)
    return buf.getvalue()


def matrix_to_json(matrix: Mapping[Tuple[str, str], Optional[ObstructionReason]], names: Sequence[str]) -> dict:
    return {
        "names": list(names),
        "pairs": [
            {"source": g, "target": h, "reason": None if r is None else r.to_json()}
            for (g, h), r in sorted(matrix.items(), key=lambda kv: (names.index(kv[0][0]), names.index(kv[0][1])))
        ],
    }


# ---------------------------------------------------------------------------
# external facts


@dataclass(frozen=True)
class ExternalFact:
    source: str
    target: str
    citation: str

    def reason(self) -> ObstructionReason:
        return ObstructionReason("External", citation=self.citation)


def parse_external_facts(text: str, source_name: str = "") -> List[ExternalFact]:
    facts = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip() if not raw.lstrip().startswith("#") else ""
        if not body:
            continue
        parts = shlex.split(body)
        if len(parts) != 4 or parts[0] != "nondeg":
            raise ValueError(f"{source_name}:{line_no}: expected 'nondeg <g> <h> \"<citation>\"'")
        facts.append(ExternalFact(parts[1], parts[2], parts[3]))
    return facts


def load_external_facts(path: Union[str, Path, None] = None) -> List[ExternalFact]:
    path = Path(path) if path is not None else data_path("external.txt")
    return parse_external_facts(path.read_text(encoding="utf-8"), str(path))


def undominated(
    catalog: Mapping[str, CatalogEntry],
    external_facts: Iterable[ExternalFact] = (),
) -> Set[str]:
    """Entries that no algebra of larger orbit dimension can degenerate to."""
    profiles = _profiles(catalog)
    forbidden = {(f.source, f.target) for f in external_facts}
    out = set()
    for h, ph in profiles.items():
        ok = True
        for g, pg in profiles.items():
            if g == h or pg.orbit_dim <= ph.orbit_dim:
                continue
            if (g, h) in forbidden:
                continue
            if not violated_relations(pg, ph):
                ok = False
                break
        if ok:
            out.add(h)
    return out


def undominated_witnesses(
    catalog: Mapping[str, CatalogEntry], external_facts: Iterable[ExternalFact] = ()
) -> Dict[str, List[str]]:
    """For each entry, the larger-orbit entries not ruled out as dominators."""
    profiles = _profiles(catalog)
    forbidden = {(f.source, f.target) for f in external_facts}
    out = {}
    for h, ph in profiles.items():
        out[h] = [
            g for g, pg in profiles.items()
            if g != h and pg.orbit_dim > ph.orbit_dim and (g, h) not in forbidden
            and not violated_relations(pg, ph)
        ]
    return out


# ---------------------------------------------------------------------------
# Borel-stable sets


@dataclass(frozen=True)
class Constraint:
    """``c[lhs] = coef * c[rhs]`` with ``coef`` a named parameter, or ``c[lhs] = 0``.

    Indices are ``(r, s, t)`` meaning the coefficient of ``e_t`` in ``[e_r, e_s]``.
    """

    lhs: Tuple[int, int, int]
    param: Optional[str] = None
    rhs: Optional[Tuple[int, int, int]] = None

    def __str__(self):
        r, s, t = self.lhs
        if self.param is None:
            return f"c_{r}{s}^{t} = 0"
        r2, s2, t2 = self.rhs
        return f"c_{r}{s}^{t} = {self.param} c_{r2}{s2}^{t2}"


@dataclass(frozen=True)
class BStableSet:
    name: str
    params: Tuple[str, ...]
    constraints: Tuple[Constraint, ...]
    reading: str = "literal"

    def describe(self) -> List[str]:
        return [str(c) for c in self.constraints]


def _central_tail(s_from: int, n: int = 8) -> List[Constraint]:
    # c_rs^t = 0 for s_from <= s <= n, 1 <= r < s, every t
    return [Constraint((r, s, t)) for s in range(s_from, n + 1) for r in range(1, s) for t in range(1, n + 1)]


def bstable_sets(s2_reading: str = "literal") -> Dict[str, BStableSet]:
    """The four sets S1..S4 on 8-dimensional structure constants.

    ``s2_reading`` selects ``c_rs^8 = mu c_r4^6`` as printed (``literal``)
    or ``c_rs^8 = mu c_rs^6`` (``corrected``).
    """
    if s2_reading not in ("literal", "corrected"):
        raise ValueError("s2_reading must be 'literal' or 'corrected'")
    s1 = [Constraint((r, 6, 7)) for r in range(1, 6)] + _central_tail(7)
    s2 = []
    for s in (4, 5):
        for r in range(1, s):
            s2.append(Constraint((r, s, 7), "lambda", (r, s, 6)))
    for s in (4, 5):
        for r in range(1, s):
            rhs = (r, 4, 6) if s2_reading == "literal" else (r, s, 6)
            s2.append(Constraint((r, s, 8), "mu", rhs))
    s2 += _central_tail(6)
    s3 = [Constraint((r, s, 6)) for s in (3, 4, 5) for r in range(1, s)]
    s3 += [Constraint((r, 5, 8), "lambda", (r, 5, 7)) for r in range(1, 5)]
    s3 += [Constraint((r, 5, 7), f"mu{r}", (4, 5, 7)) for r in range(1, 4)]
    s3 += _central_tail(6)
    s4 = [Constraint((r, s, 6)) for s in (3, 4, 5) for r in range(1, s)]
    s4 += [Constraint((r, s, 7)) for s in (3, 4, 5) for r in range(2, s)]
    s4 += [Constraint((1, r, 7)) for r in (4, 5)]
    s4 += [Constraint((r, 5, 8), f"mu{r}", (4, 5, 8)) for r in range(1, 4)]
    s4 += _central_tail(6)
    return {
        "S1": BStableSet("S1", (), tuple(s1)),
        "S2": BStableSet("S2", ("lambda", "mu"), tuple(s2), s2_reading),
        "S3": BStableSet("S3", ("lambda", "mu1", "mu2", "mu3"), tuple(s3)),
        "S4": BStableSet("S4", ("mu1", "mu2", "mu3"), tuple(s4)),
    }


def _coeff(a: LieAlgebra, idx: Tuple[int, int, int]):
    r, s, t = idx
    return a.bracket_basis(r, s).get(t, Fraction(0))


def bstable_membership(s: BStableSet, a: LieAlgebra) -> Optional[Dict[str, Fraction]]:
    """Parameter values putting ``a`` (as presented) in ``s``, or None.

    Each constraint is linear in the parameters, so membership is one exact
    linear solve; unconstrained parameters are reported as 0.
    """
    if a.dim != 8:
        raise ValueError("B-stable sets live in 8-dimensional structure constants")
    rows, rhs = [], []
    p_index = {p: i for i, p in enumerate(s.params)}
    for c in s.constraints:
        lhs = _coeff(a, c.lhs)
        row = [Fraction(0)] * len(s.params)
        if c.param is not None:
            row[p_index[c.param]] = _coeff(a, c.rhs)
        if not any(row):
            if lhs:
                return None
            continue
        rows.append(row)
        rhs.append(lhs)
    if not s.params:
        return {}
    if not rows:
        return {p: Fraction(0) for p in s.params}
    sol = linalg.solve(rows, rhs)
    if sol is None:
        return None
    return dict(zip(s.params, sol))


def check_assignment(s: BStableSet, a: LieAlgebra, values: Mapping[str, Fraction]) -> bool:
    for c in s.constraints:
        lhs = _coeff(a, c.lhs)
        rhs = 0 if c.param is None else values[c.param] * _coeff(a, c.rhs)
        if lhs != rhs:
            return False
    return True


def random_triangular(
    n: int, rng: random.Random, borel: str = "upper", mode: str = "full", height: int = 3
) -> linalg.Matrix:
    """Invertible triangular matrix with small rational entries."""
    m = linalg.zeros(n, n)
    for i in range(n):
        if mode == "identity":
            m[i][i] = Fraction(1)
            continue
        d = 0
        while d == 0:
            d = rng.randint(-height, height)
        m[i][i] = Fraction(d, rng.randint(1, 2))
        if mode == "diagonal":
            continue
        for j in range(n):
            if (borel == "upper" and j > i) or (borel == "lower" and j < i):
                m[i][j] = Fraction(rng.randint(-height, height), rng.randint(1, 2))
    return m


def act_on_basis(a: LieAlgebra, b: linalg.Matrix) -> LieAlgebra:
    """Structure constants of ``a`` in the basis ``f_i = sum_j b[i][j] e_j``."""
    return change_basis(a, linalg.inverse(linalg.transpose(b)))


def bstable_fuzz(
    s: BStableSet,
    a: LieAlgebra,
    trials: int = 100,
    seed: int = 0,
    borel: str = "upper",
    mode: str = "full",
) -> dict:
    """Apply random Borel elements and check membership survives.

    A drawn triangular ``B`` acts on the basis, ``f_i = sum_j B[i][j] e_j``,
    and the constants are rewritten in the basis ``f``.  With
    ``borel="upper"`` this is the stabilizer of the flag
    ``<e_n> < <e_{n-1}, e_n> < ...``.  Trial ``i`` draws from
    ``random.Random(f"{seed}:{i}")`` so trials are independent and
    reproducible.
    """
    if borel not in ("upper", "lower"):
        raise ValueError("borel must be 'upper' or 'lower'")
    if bstable_membership(s, a) is None:
        raise ValueError(f"{a.name or 'algebra'} is not in {s.name}")
    counterexamples = []
    for i in range(trials):
        rng = random.Random(f"{seed}:{i}")
        g = random_triangular(a.dim, rng, borel, mode)
        moved = act_on_basis(a, g)
        if bstable_membership(s, moved) is None:
            counterexamples.append({
                "trial": i,
                "matrix": [[format_scalar(x) for x in row] for row in g],
                "violated": [str(c) for c in s.constraints if _violates(c, moved)],
            })
    return {
        "set": s.name,
        "reading": s.reading,
        "algebra": a.name,
        "borel": borel,
        "mode": mode,
        "trials": trials,
        "seed": seed,
        "counterexamples": counterexamples,
        "stable": not counterexamples,
    }


def _violates(c: Constraint, a: LieAlgebra) -> bool:
    if c.param is None:
        return bool(_coeff(a, c.lhs))
    return False  # parametric constraints only fail jointly


# ---------------------------------------------------------------------------
# regression data: the published table of non-degenerations

TABLE_KINDS = {
    "center": "CenterDim",
    "derived": "DerivedDim",
    "cohomology2": "CohomologyDim",
    "cohomology3": "CohomologyDim",
    "cohomology4": "CohomologyDim",
    "abelian": "MaxAbelian",
}


def load_table_pairs(path: Union[str, Path, None] = None) -> List[Tuple[str, str, str]]:
    path = Path(path) if path is not None else data_path("nondegenerations.txt")
    out = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        body = raw.split("#", 1)[0].strip()
        if body:
            reason, g, h = body.split()
            out.append((reason, g, h))
    return out


def listed_inequality(reason: str, p: InvariantProfile, q: InvariantProfile) -> Tuple[bool, int, int]:
    """Evaluate the table's cited inequality directly: (holds, lhs, rhs)."""
    if reason == "center":
        return p.center_dim > q.center_dim, p.center_dim, q.center_dim
    if reason == "derived":
        return p.derived_dim < q.derived_dim, p.derived_dim, q.derived_dim
    if reason.startswith("cohomology"):
        k = int(reason[len("cohomology"):])
        return p.betti[k] > q.betti[k], p.betti[k], q.betti[k]
    if reason == "abelian":
        a, b = p.max_abelian, q.max_abelian
        return a.certified and b.certified and a.lower > b.upper, a.lower, b.upper
    raise ValueError(f"unknown table reason {reason!r}")
