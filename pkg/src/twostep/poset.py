"""The degeneration order assembled from verified witnesses and obstructions."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .obstructions import ExternalFact, ObstructionReason

Pair = Tuple[Hashable, Hashable]


class CycleError(ValueError):
    """Verified edges do not form a strict partial order."""


@dataclass(frozen=True)
class DegenerationGraph:
    """Nodes, verified edges (pair -> provenance) and forbidden pairs
    (pair -> reason).  ``orbit_dims`` is optional and only used for
    ordering checks and DOT ranks."""

    nodes: Tuple[Hashable, ...]
    verified: Mapping[Pair, str] = field(default_factory=dict)
    forbidden: Mapping[Pair, ObstructionReason] = field(default_factory=dict)
    orbit_dims: Mapping[Hashable, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        known = set(self.nodes)
        for a, b in list(self.verified) + list(self.forbidden):
            if a not in known or b not in known:
                raise ValueError(f"edge ({a}, {b}) mentions an unknown node")
            if a == b:
                raise ValueError(f"self-loop on {a}")
        for name in ("verified", "forbidden", "orbit_dims"):
            object.__setattr__(self, name, MappingProxyType(dict(getattr(self, name))))

    def with_edges(self, edges: Mapping[Pair, str]) -> "DegenerationGraph":
        merged = dict(self.verified)
        for pair, prov in edges.items():
            merged.setdefault(pair, prov)
        return DegenerationGraph(self.nodes, merged, self.forbidden, self.orbit_dims)

    def with_forbidden(self, pairs: Mapping[Pair, ObstructionReason]) -> "DegenerationGraph":
        merged = dict(self.forbidden)
        for pair, reason in pairs.items():
            merged.setdefault(pair, reason)
        return DegenerationGraph(self.nodes, self.verified, merged, self.orbit_dims)

    def successors(self) -> Dict[Hashable, List[Hashable]]:
        out = defaultdict(list)
        for a, b in self.verified:
            out[a].append(b)
        return out

    def to_json(self) -> dict:
        return {
            "nodes": [str(n) for n in self.nodes],
            "verified": [
                {"source": str(a), "target": str(b), "provenance": p}
                for (a, b), p in sorted(self.verified.items(), key=lambda kv: self._key(kv[0]))
            ],
            "forbidden": [
                {"source": str(a), "target": str(b), "reason": r.to_json()}
                for (a, b), r in sorted(self.forbidden.items(), key=lambda kv: self._key(kv[0]))
            ],
            "orbit_dims": {str(k): v for k, v in self.orbit_dims.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "DegenerationGraph":
        return cls(
            tuple(data["nodes"]),
            {(e["source"], e["target"]): e["provenance"] for e in data["verified"]},
            {(e["source"], e["target"]): ObstructionReason.from_json(e["reason"]) for e in data["forbidden"]},
            dict(data.get("orbit_dims", {})),
        )

    def _key(self, pair: Pair):
        pos = {n: i for i, n in enumerate(self.nodes)}
        return pos[pair[0]], pos[pair[1]]


def _reachability(nodes: Sequence[Hashable], succ: Mapping[Hashable, Sequence[Hashable]]) -> Dict[Hashable, Set]:
    """Strict descendants of every node; raises on a cycle."""
    state: Dict[Hashable, int] = {}
    reach: Dict[Hashable, Set] = {}

    def visit(v, trail):
        st = state.get(v)
        if st == 2:
            return
        if st == 1:
            cycle = trail[trail.index(v):] + [v]
            raise CycleError("cycle among verified edges: " + " -> ".join(map(str, cycle)))
        state[v] = 1
        trail.append(v)
        acc = set()
        for w in succ.get(v, ()):
            visit(w, trail)
            acc.add(w)
            acc |= reach[w]
        trail.pop()
        state[v] = 2
        reach[v] = acc

    for v in nodes:
        visit(v, [])
    return reach


def transitive_closure(g: DegenerationGraph) -> DegenerationGraph:
    """Close the verified edges under composition.

    Composite edges carry provenance ``transitive``.  Forbidden pairs are
    kept as they are; a closure edge that is also forbidden shows up in
    :func:`contradictions`.
    """
    reach = _reachability(g.nodes, g.successors())
    edges = dict(g.verified)
    for a in g.nodes:
        for b in reach[a]:
            edges.setdefault((a, b), "transitive")
    return DegenerationGraph(g.nodes, edges, g.forbidden, g.orbit_dims)


def hasse(g: DegenerationGraph) -> Set[Pair]:
    """Transitive reduction of the closure of the verified edges."""
    reach = _reachability(g.nodes, g.successors())
    out = set()
    for a in g.nodes:
        for b in reach[a]:
            if not any(b in reach[c] for c in reach[a]):
                out.add((a, b))
    return out


def maximal_elements(g: DegenerationGraph) -> Set[Hashable]:
    """Nodes that nothing degenerates to."""
    has_in = {b for (_, b) in g.verified}
    return set(g.nodes) - has_in


def contradictions(g: DegenerationGraph) -> List[dict]:
    """Verified (or composite) edges that are also forbidden."""
    closed = transitive_closure(g)
    out = []
    for pair in sorted(set(closed.verified) & set(closed.forbidden), key=closed._key):
        out.append({
            "source": pair[0],
            "target": pair[1],
            "provenance": closed.verified[pair],
            "reason": str(closed.forbidden[pair]),
        })
    return out


def orbit_violations(g: DegenerationGraph) -> List[Pair]:
    """Closure edges that fail strict orbit-dimension decrease."""
    if not g.orbit_dims:
        return []
    closed = transitive_closure(g)
    return sorted(
        (p for p in closed.verified if not g.orbit_dims[p[0]] > g.orbit_dims[p[1]]),
        key=closed._key,
    )


def consistency_check(
    g: DegenerationGraph,
    obstruction_matrix: Optional[Mapping[Pair, Optional[ObstructionReason]]] = None,
) -> dict:
    """Cross-check verified edges against obstructions and list open pairs.

    Open pairs are ordered pairs that are neither verified (possibly
    through composition) nor forbidden.
    """
    closed = transitive_closure(g)
    forbidden = dict(g.forbidden)
    for pair, reason in (obstruction_matrix or {}).items():
        if reason is not None:
            forbidden.setdefault(pair, reason)
    clash = []
    for pair in sorted(closed.verified, key=closed._key):
        reason = forbidden.get(pair)
        if reason is not None:
            clash.append({
                "source": pair[0],
                "target": pair[1],
                "provenance": closed.verified[pair],
                "reason": str(reason),
                "kind": reason.kind,
            })
    open_pairs = [
        (a, b) for a in g.nodes for b in g.nodes
        if a != b and (a, b) not in closed.verified and (a, b) not in forbidden
    ]
    return {
        "contradictions": clash,
        "orbit_violations": orbit_violations(g),
        "open_pairs": open_pairs,
        "verified": len(closed.verified),
        "forbidden": len(forbidden),
        "consistent": not clash,
    }


def to_dot(g: DegenerationGraph, edges: Optional[Iterable[Pair]] = None, name: str = "degenerations") -> str:
    """Hasse diagram in DOT; one rank per orbit dimension, largest on top."""
    edges = sorted(hasse(g) if edges is None else edges, key=g._key)
    lines = [f"digraph {json.dumps(name)} {{", "  rankdir=TB;", "  node [shape=box];"]
    for n in g.nodes:
        label = f"{n} ({g.orbit_dims[n]})" if n in g.orbit_dims else str(n)
        lines.append(f"  {json.dumps(str(n))} [label={json.dumps(label)}];")
    if g.orbit_dims:
        ranks = defaultdict(list)
        for n in g.nodes:
            ranks[g.orbit_dims.get(n)].append(n)
        for d in sorted((k for k in ranks if k is not None), reverse=True):
            members = " ".join(json.dumps(str(n)) for n in ranks[d])
            lines.append(f"  {{ rank=same; {members} }}")
    for a, b in edges:
        lines.append(f"  {json.dumps(str(a))} -> {json.dumps(str(b))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def build_graph(catalog, witnesses=(), obstruction_matrix=None, external_facts: Iterable[ExternalFact] = ()):
    """Graph over catalog names from PASS witnesses and forbidden pairs.

    Returns ``(graph, witness_reports)``; failing witnesses are reported
    and contribute no edge.
    """
    from .degeneration import verify_degeneration

    names = tuple(catalog)
    edges: Dict[Pair, str] = {}
    reports = []
    for w in witnesses:
        try:
            rep = verify_degeneration(w, catalog)
        except Exception as exc:  # a failed witness is a report outcome
            rep = {"source": w.source, "target": w.target, "status": "FAIL",
                   "error": f"{type(exc).__name__}: {exc}"}
        rep["path"] = str(w.path)
        reports.append(rep)
        if rep["status"] == "PASS" and w.source != w.target:
            edges.setdefault((w.source, w.target), w.provenance or str(w.path))
    forbidden: Dict[Pair, ObstructionReason] = {}
    for pair, reason in (obstruction_matrix or {}).items():
        if reason is not None:
            forbidden[pair] = reason
    for fact in external_facts:
        forbidden.setdefault((fact.source, fact.target), fact.reason())
    orbit = {n: getattr(catalog[n], "orbit_dim", None) for n in names}
    orbit = {k: v for k, v in orbit.items() if v is not None}
    return DegenerationGraph(names, edges, forbidden, orbit), reports
