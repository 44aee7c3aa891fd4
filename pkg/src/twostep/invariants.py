"""Orbit-closure invariants: center, derived algebra, derivations, trivial
Chevalley-Eilenberg Betti numbers and the maximal abelian subalgebra
dimension (as a certified interval)."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import comb, gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .algebra import LieAlgebra, is_two_step
from .scalars import GaussianRational, format_scalar

DEFAULT_HEIGHT = 2
DEFAULT_SAMPLES = 50
DEFAULT_NODE_BUDGET = 200_000


@dataclass(frozen=True)
class Subspace:
    """Subspace of ``Q^n`` stored by its canonical reduced-echelon basis.

    ``basis`` holds one row per basis vector, so equal subspaces have
    identical ``basis`` tuples.
    """

    ambient: int
    basis: Tuple[Tuple, ...]

    @classmethod
    def span(cls, ambient: int, vectors: Sequence[Sequence]) -> "Subspace":
        red = linalg.row_space_basis([list(v) for v in vectors if any(v)], ambient)
        return cls(ambient, tuple(tuple(r) for r in red))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def pivots(self) -> List[int]:
        return [next(i for i, x in enumerate(r) if x) for r in self.basis]

    def contains(self, v: Sequence) -> bool:
        return Subspace.span(self.ambient, list(self.basis) + [list(v)]).dim == self.dim

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        # solve sum a_i u_i = sum b_j w_j
        if not self.basis or not other.basis:
            return Subspace(self.ambient, ())
        cols = [list(u) for u in self.basis] + [[-x for x in w] for w in other.basis]
        eqs = linalg.transpose(cols)
        ker = linalg.nullspace(eqs, len(cols))
        d = len(self.basis)
        vecs = []
        for k in ker:
            v = [Fraction(0)] * self.ambient
            for a, u in zip(k[:d], self.basis):
                if a:
                    v = [x + a * y for x, y in zip(v, u)]
            vecs.append(v)
        return Subspace.span(self.ambient, vecs)

    def to_json(self) -> list:
        return [[format_scalar(x) for x in r] for r in self.basis]


@dataclass(frozen=True)
class CertifiedValue:
    lower: int
    upper: int
    witness: Optional[Subspace] = None

    @property
    def certified(self) -> bool:
        return self.lower == self.upper

    @property
    def value(self) -> Optional[int]:
        return self.lower if self.certified else None

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "certified": self.certified,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


@dataclass(frozen=True)
class InvariantProfile:
    orbit_dim: int
    center_dim: int
    derived_dim: int
    betti: Tuple[int, ...]
    max_abelian: CertifiedValue
    nilpotency_class: int
    name: str = field(default="", compare=False)

    def signature(self) -> tuple:
        """The numeric invariants, without witnesses or names."""
        ab = self.max_abelian
        return (self.orbit_dim, self.center_dim, self.derived_dim, self.betti,
                ab.lower, ab.upper, self.nilpotency_class)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "orbit_dim": self.orbit_dim,
            "center_dim": self.center_dim,
            "derived_dim": self.derived_dim,
            "betti": list(self.betti),
            "max_abelian": self.max_abelian.to_json(),
            "nilpotency_class": self.nilpotency_class,
        }


def _unit(n: int, i: int) -> list:
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return v


def center(a: LieAlgebra) -> Subspace:
    n = a.dim
    c = a.tensor()
    # x is central iff sum_i x_i c[i][l][k] = 0 for all l, k
    rows = [[c[i][l][k] for i in range(n)] for l in range(n) for k in range(n)]
    rows = [r for r in rows if any(r)]
    return Subspace.span(n, linalg.nullspace(rows, n))


def derived(a: LieAlgebra) -> Subspace:
    n = a.dim
    vecs = []
    for vec in a.brackets.values():
        v = [Fraction(0)] * n
        for k, x in vec.items():
            v[k - 1] = x
        vecs.append(v)
    return Subspace.span(n, vecs)


def derivation_system(a: LieAlgebra) -> List[list]:
    """Linear equations on the ``n*n`` entries of ``D`` (index ``row*n + col``)."""
    n = a.dim
    c = a.tensor()
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                row = [Fraction(0)] * (n * n)
                # D[e_i, e_j] - [D e_i, e_j] - [e_i, D e_j], component k
                for m in range(n):
                    if c[i][j][m]:
                        row[k * n + m] += c[i][j][m]
                for p in range(n):
                    if c[p][j][k]:
                        row[p * n + i] -= c[p][j][k]
                    if c[i][p][k]:
                        row[p * n + j] -= c[i][p][k]
                if any(row):
                    rows.append(row)
    return rows


def derivation_dim(a: LieAlgebra) -> int:
    n = a.dim
    return n * n - linalg.rank(derivation_system(a))


def orbit_dim(a: LieAlgebra) -> int:
    """``dim GL(n) - dim Der(a)``; the stabilizer of a point is ``Aut(a)``."""
    return a.dim * a.dim - derivation_dim(a)


@lru_cache(maxsize=None)
def _subsets(n: int, k: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(combinations(range(n), k))


def ce_differential(a: LieAlgebra, k: int) -> List[list]:
    """Matrix of ``d_k : C^k -> C^{k+1}`` on lexicographically ordered
    index subsets, with ``(d w)(x_0..x_k) = sum_{p<q} (-1)^(p+q) w([x_p,x_q], ...)``.
    """
    n = a.dim
    if k < 0 or k >= n:
        return []
    cols = {s: idx for idx, s in enumerate(_subsets(n, k))}
    mat = []
    for S in _subsets(n, k + 1):
        row = [Fraction(0)] * len(cols)
        for p, q in combinations(range(k + 1), 2):
            vec = a.bracket_basis(S[p] + 1, S[q] + 1)
            if not vec:
                continue
            rest = [s for t, s in enumerate(S) if t != p and t != q]
            sgn_pq = -1 if (p + q) % 2 else 1
            for m1, coef in vec.items():
                m = m1 - 1
                if m in rest:
                    continue
                below = sum(1 for r in rest if r < m)
                T = tuple(sorted(rest + [m]))
                row[cols[T]] += sgn_pq * (-1 if below % 2 else 1) * coef
        mat.append(row)
    return mat


def ce_ranks(a: LieAlgebra) -> List[int]:
    """``rank d_k`` for ``k = 0..n-1``."""
    return [linalg.rank(ce_differential(a, k)) for k in range(a.dim)]


def betti_numbers(a: LieAlgebra) -> Tuple[int, ...]:
    n = a.dim
    r = ce_ranks(a) + [0]
    return tuple(comb(n, k) - r[k] - (r[k - 1] if k > 0 else 0) for k in range(n + 1))


def ce_betti(a: LieAlgebra, k: int) -> int:
    n = a.dim
    if not 0 <= k <= n:
        raise ValueError(f"degree {k} outside 0..{n}")
    rk = linalg.rank(ce_differential(a, k)) if k < n else 0
    rk_prev = linalg.rank(ce_differential(a, k - 1)) if k > 0 else 0
    return comb(n, k) - rk - rk_prev


def nilpotency_class(a: LieAlgebra) -> int:
    """Length of the lower central series (0 for the zero algebra)."""
    n = a.dim
    if n == 0:
        return 0
    current = Subspace.span(n, [_unit(n, i) for i in range(n)])
    steps = 0
    while current.dim:
        steps += 1
        vecs = [a.bracket(list(u), _unit(n, l)) for u in current.basis for l in range(n)]
        nxt = Subspace.span(n, vecs)
        if nxt.dim == current.dim:
            raise ValueError("algebra is not nilpotent")
        current = nxt
    return steps


# ---------------------------------------------------------------------------
# maximal abelian subalgebras of 2-step algebras


def quotient_forms(a: LieAlgebra) -> Tuple[Subspace, List[int], List[List[list]]]:
    """Center, complement coordinates and component forms on ``g/z``.

    The complement is spanned by the standard basis vectors off the center's
    pivot columns; the forms are coordinates of the bracket with respect to
    the echelon basis of ``[g, g]``.
    """
    n = a.dim
    z = center(a)
    zp = set(z.pivots())
    comp = [i for i in range(n) if i not in zp]
    d = derived(a)
    dpiv = d.pivots()
    m = len(comp)
    forms = [[[Fraction(0)] * m for _ in range(m)] for _ in dpiv]
    for p, i in enumerate(comp):
        for q in range(p + 1, m):
            j = comp[q]
            vec = a.bracket_basis(i + 1, j + 1)
            if not vec:
                continue
            dense = [Fraction(0)] * n
            for k, x in vec.items():
                dense[k - 1] = x
            for s, col in enumerate(dpiv):
                v = dense[col]
                if v:
                    forms[s][p][q] = v
                    forms[s][q][p] = -v
    return z, comp, forms


def _form_value(form, u, v):
    total = Fraction(0)
    for p, up in enumerate(u):
        if not up:
            continue
        row = form[p]
        for q, vq in enumerate(v):
            if vq and row[q]:
                total += up * row[q] * vq
    return total


def isotropic(forms, vectors) -> bool:
    return all(
        not _form_value(f, u, v) for f in forms for u, v in combinations(vectors, 2)
    )


def isotropic_upper_bound(forms, m: int, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> int:
    """``min over sampled combinations w of (m - rank(w)/2)``, capped at ``m``."""
    best = m
    if not forms:
        return best
    rng = random.Random(seed)
    r = len(forms)
    lambdas = [[int(i == s) for i in range(r)] for s in range(r)]
    lambdas.append([1] * r)
    for _ in range(samples):
        lam = [rng.randint(-7, 7) for _ in range(r)]
        if any(lam):
            lambdas.append(lam)
    for lam in lambdas:
        combo = [
            [sum((c * f[p][q] for c, f in zip(lam, forms) if c), Fraction(0)) for q in range(m)]
            for p in range(m)
        ]
        best = min(best, m - linalg.rank(combo) // 2)
    return best


def _integral_forms(forms) -> List[List[list]]:
    """Rescale each form to integer (or Gaussian-integer) entries.

    Isotropy is unaffected by scaling a form.
    """
    out = []
    for f in forms:
        den = 1
        for row in f:
            for x in row:
                parts = (x.re, x.im) if isinstance(x, GaussianRational) else (Fraction(x),)
                for p in parts:
                    den = den * p.denominator // gcd(den, p.denominator)
        out.append([[_to_int(x * den) for x in row] for row in f])
    return out


def _to_int(x):
    if isinstance(x, GaussianRational):
        if x.im == 0:
            return int(x.re)
        return x
    return int(x)


@lru_cache(maxsize=32)
def _candidate_vectors(m: int, height: int, gaussian: bool) -> Tuple[tuple, ...]:
    """Primitive small-height vectors up to sign (or unit), sparsest first."""
    coeffs = list(range(-height, height + 1))
    out = []
    if not gaussian:
        for tup in product(coeffs, repeat=m):
            nz = [x for x in tup if x]
            if not nz or nz[0] < 0:
                continue
            g = 0
            for x in nz:
                g = gcd(g, x)
            if g == 1:
                out.append(tup)
    else:
        i = GaussianRational(0, 1)
        pool = coeffs + [i, -i]
        seen = set()
        for tup in product(pool, repeat=m):
            lead = next((x for x in tup if x), None)
            if lead is None:
                continue
            key = tuple(x / lead for x in tup)
            if key in seen:
                continue
            seen.add(key)
            out.append(tup)
    out.sort(key=lambda v: (sum(1 for x in v if x), [abs(_to_float(x)) for x in v]))
    return tuple(out)


def _to_float(x) -> float:
    if isinstance(x, GaussianRational):
        return float(x.norm())
    return float(x)


def max_isotropic_search(
    forms,
    m: int,
    target: int,
    height: int = DEFAULT_HEIGHT,
    gaussian: bool = False,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> List[list]:
    """Largest isotropic set found by greedy extension with backtracking.

    Stops as soon as ``target`` vectors are found or the node budget runs
    out; each spanned subspace is expanded at most once.
    """
    if m == 0 or target <= 0:
        return []
    iforms = _integral_forms(forms)
    cands = _candidate_vectors(m, height, gaussian)
    # small integer entries: int64 products are exact; Gaussian data stays object
    dtype = object if gaussian or any(
        isinstance(x, GaussianRational) for f in iforms for row in f for x in row
    ) else np.int64
    cmat = np.array(cands, dtype=dtype).reshape(len(cands), m)
    fmat = np.array(iforms, dtype=dtype).reshape(len(iforms), m, m)
    # images[v] stacks omega_s(v, .) for all forms s
    images = np.einsum("vp,spq->vsq", cmat, fmat) if len(iforms) else None

    def orth_filter(a: int, pool: List[int]) -> List[int]:
        if images is None or not pool:
            return list(pool)
        vals = images[a] @ cmat[pool].T
        keep = ~np.any(vals != 0, axis=0)
        return [w for w, k in zip(pool, keep) if k]

    best: List[int] = []
    visited = set()
    budget = [node_budget]

    def extend(chosen: List[int], pool: List[int]):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(best) >= target or budget[0] <= 0:
            return
        if len(chosen) + min(len(pool), m - len(chosen)) <= len(best):
            return
        for pos, idx in enumerate(pool):
            if budget[0] <= 0 or len(best) >= target:
                return
            nxt = chosen + [idx]
            key = tuple(
                tuple(r) for r in linalg.row_space_basis([list(cands[c]) for c in nxt], m)
            )
            if len(key) < len(nxt) or key in visited:
                continue
            visited.add(key)
            budget[0] -= 1
            rest = orth_filter(idx, pool[pos + 1:])
            extend(nxt, rest)

    extend([], list(range(len(cands))))
    return [[Fraction(x) if isinstance(x, int) else x for x in cands[c]] for c in best]


def isotropic_subspace_exists(forms, m: int, d: int) -> bool:
    """Decide over C whether a ``d``-dimensional totally isotropic subspace exists.

    Every subspace is the row space of a unique reduced echelon matrix, so
    enumerating pivot patterns with free entries as unknowns covers them
    all; a pattern is infeasible iff the reduced Groebner basis of its
    bilinear equations is ``{1}``.
    """
    import sympy

    if d <= 1:
        return d <= m
    if d > m:
        return False
    for piv in combinations(range(m), d):
        syms = []
        rows = []
        for a, p in enumerate(piv):
            row = []
            for c in range(m):
                if c == p:
                    row.append(sympy.Integer(1))
                elif c < p or c in piv:
                    row.append(sympy.Integer(0))
                else:
                    s = sympy.Symbol(f"w{a}_{c}")
                    syms.append(s)
                    row.append(s)
            rows.append(row)
        eqs = []
        for f in forms:
            for a, b in combinations(range(d), 2):
                e = sympy.expand(
                    sum(
                        rows[a][p] * _sympify(f[p][q]) * rows[b][q]
                        for p in range(m)
                        for q in range(m)
                        if f[p][q]
                    )
                )
                if e != 0:
                    eqs.append(e)
        if not eqs:
            return True
        if any(e.is_number for e in eqs):
            continue
        basis = sympy.groebner(eqs, *syms, order="grevlex")
        if list(basis.exprs) != [1]:
            return True
    return False


def _sympify(x):
    import sympy

    if isinstance(x, GaussianRational):
        return sympy.Rational(x.re.numerator, x.re.denominator) + sympy.I * sympy.Rational(
            x.im.numerator, x.im.denominator
        )
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def max_abelian(
    a: LieAlgebra,
    height: int = DEFAULT_HEIGHT,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    gaussian: bool = False,
    node_budget: int = DEFAULT_NODE_BUDGET,
    max_quotient: int = 6,
    max_forms: int = 4,
) -> CertifiedValue:
    """Certified interval for the largest abelian subalgebra dimension.

    For 2-step algebras an abelian subalgebra may be enlarged by the center,
    so the problem reduces to totally isotropic subspaces of the bracket on
    ``g/z``.  The lower bound comes from an explicit subspace; the upper
    bound from ranks of sampled combinations of the component forms,
    tightened by echelon-pattern feasibility when the quotient is small.
    """
    if not is_two_step(a):
        raise ValueError("max_abelian reduction requires a 2-step nilpotent algebra")
    n = a.dim
    z, comp, forms = quotient_forms(a)
    m = len(comp)
    upper_iso = isotropic_upper_bound(forms, m, samples, seed)
    small = m <= max_quotient and len(forms) <= max_forms
    found = max_isotropic_search(
        forms, m, upper_iso, height=height, gaussian=gaussian, node_budget=min(node_budget, 200)
    )
    if small and len(found) < upper_iso:
        # smallest infeasible dimension caps the interval
        d = len(found) + 1
        while d <= upper_iso and isotropic_subspace_exists(forms, m, d):
            d += 1
        upper_iso = d - 1
        if len(found) < upper_iso:
            found = max_isotropic_search(
                forms, m, upper_iso, height=height, gaussian=gaussian, node_budget=node_budget
            )
    lifted = []
    for v in found:
        w = [Fraction(0)] * n
        for p, i in enumerate(comp):
            w[i] = v[p]
        lifted.append(w)
    witness = Subspace.span(n, lifted)
    return CertifiedValue(z.dim + witness.dim, z.dim + upper_iso, witness)


def is_abelian_subspace(a: LieAlgebra, vectors: Sequence[Sequence]) -> bool:
    return all(not any(a.bracket(list(u), list(v))) for u, v in combinations(vectors, 2))


def profile(a: LieAlgebra, seed: int = 0, **abelian_opts) -> InvariantProfile:
    if a.dim != 8:
        raise ValueError("profiles are defined for 8-dimensional algebras")
    return InvariantProfile(
        orbit_dim=orbit_dim(a),
        center_dim=center(a).dim,
        derived_dim=derived(a).dim,
        betti=betti_numbers(a),
        max_abelian=max_abelian(a, seed=seed, **abelian_opts),
        nilpotency_class=nilpotency_class(a),
        name=a.name,
    )


_PROFILE_CACHE: Dict[Tuple, InvariantProfile] = {}


def cached_profile(a: LieAlgebra, seed: int = 0) -> InvariantProfile:
    key = (a, seed)
    if key not in _PROFILE_CACHE:
        _PROFILE_CACHE[key] = profile(a, seed=seed)
    p = _PROFILE_CACHE[key]
    if p.name != a.name:
        p = InvariantProfile(p.orbit_dim, p.center_dim, p.derived_dim, p.betti,
                             p.max_abelian, p.nilpotency_class, a.name)
    return p
