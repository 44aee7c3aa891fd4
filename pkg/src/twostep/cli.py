"""Command-line entry point: ``twostep <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .algebra import LieAlgebra, ParseError
from .catalog import data_path, default_catalog, load_algebra_file, load_catalog
from .degeneration import MismatchError, PoleError, load_corpus, load_witness, verify_degeneration
from .extensions import CocycleError, central_extension, cocycle_check, load_cocycle, perp_report
from .invariants import cached_profile
from .obstructions import (
    all_obstructions,
    bstable_fuzz,
    bstable_membership,
    bstable_sets,
    listed_inequality,
    load_external_facts,
    load_table_pairs,
    matrix_to_csv,
    matrix_to_json,
    obstruction_matrix,
    undominated,
)
from .poset import build_graph, consistency_check, hasse, maximal_elements, to_dot

EXPECTED_COMPONENTS = ("N1_8_2", "N9_8_3", "N1_8_4")


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    catalog: Optional[Path] = None
    corpus: Optional[Path] = None
    external: Optional[Path] = None
    format: str = "text"
    seed: int = 0
    s2_reading: str = "literal"
    borel: str = "upper"

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(args.command, args.catalog, args.corpus, args.external,
                   args.format, args.seed, args.s2_reading, args.borel)

    def validate(self):
        """Paths must exist; they are resolved against package data as a fallback."""
        for name in ("catalog", "corpus", "external"):
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, resolve_path(str(value)))
        if self.seed < 0:
            raise CliError("seed must be non-negative")


def resolve_path(text: str) -> Path:
    """A path as given, or else relative to the package data directory."""
    p = Path(text)
    if p.exists():
        return p
    alt = data_path(text)
    if alt.exists():
        return alt
    raise CliError(f"no such file: {text}")


def _catalog(args) -> dict:
    if args.catalog is None:
        return default_catalog()
    return load_catalog(resolve_path(str(args.catalog)))


def _algebra(ref: str, catalog) -> LieAlgebra:
    if ref in catalog:
        return catalog[ref].algebra
    if ref.endswith(".alg"):
        return load_algebra_file(resolve_path(ref))
    raise CliError(f"unknown catalog name {ref!r}")


def _external(args):
    if args.external is None:
        return []
    return load_external_facts(resolve_path(str(args.external)))


def _corpus(args):
    path = data_path("corpus") if args.corpus is None else resolve_path(str(args.corpus))
    return load_corpus(path)


def _dump(obj, out: TextIO):
    out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_catalog(args, out) -> int:
    cat = _catalog(args)
    rows = []
    for name, e in cat.items():
        rows.append({"name": name, "label": e.label, "orbit_dim": e.orbit_dim,
                     "brackets": len(e.algebra.brackets)})
    if args.format == "json":
        _dump(rows, out)
    else:
        for r in rows:
            out.write(f"{r['name']:<12} orbit {r['orbit_dim']:>2}  {r['label']}\n")
    return 0


def cmd_profile(args, out) -> int:
    cat = _catalog(args)
    a = _algebra(args.algebra, cat)
    p = cached_profile(a, args.seed)
    data = p.to_json()
    data["name"] = args.algebra
    if args.format == "json":
        _dump(data, out)
    else:
        ab = p.max_abelian
        out.write(f"{args.algebra}\n")
        out.write(f"  orbit dim        {p.orbit_dim}\n")
        out.write(f"  center dim       {p.center_dim}\n")
        out.write(f"  derived dim      {p.derived_dim}\n")
        out.write(f"  betti            {' '.join(map(str, p.betti))}\n")
        out.write(f"  max abelian      [{ab.lower}, {ab.upper}]\n")
        out.write(f"  nilpotency class {p.nilpotency_class}\n")
    return 0


def _witness_report(w, cat) -> dict:
    try:
        rep = verify_degeneration(w, cat)
    except PoleError as exc:
        rep = {"source": w.source, "target": w.target, "status": "FAIL", "error": "pole", "detail": str(exc)}
    except MismatchError as exc:
        rep = {"source": w.source, "target": w.target, "status": "FAIL", "error": "mismatch",
               "detail": str(exc), "differences": [{k: str(v) for k, v in d.items()} for d in exc.differences]}
    except KeyError as exc:
        rep = {"source": w.source, "target": w.target, "status": "FAIL", "error": "unknown", "detail": str(exc)}
    rep["path"] = str(w.path)
    return rep


def cmd_check_witness(args, out) -> int:
    cat = _catalog(args)
    w = load_witness(resolve_path(args.witness))
    rep = _witness_report(w, cat)
    if args.format == "json":
        _dump(rep, out)
    else:
        out.write(f"{rep['status']} {w.source} -> {w.target}\n")
        if "detail" in rep:
            out.write(f"  {rep['detail']}\n")
        for line in rep.get("invariant_violations", []):
            out.write(f"  invariant: {line}\n")
    return 0 if rep["status"] == "PASS" else 1


def cmd_obstructions(args, out) -> int:
    cat = _catalog(args)
    if args.pair:
        g, h = args.pair
        for name in (g, h):
            if name not in cat:
                raise CliError(f"unknown catalog name {name!r}")
        found = all_obstructions(g, h, cat)
        if args.format == "json":
            _dump({"source": g, "target": h, "first": found[0].to_json() if found else None,
                   "all": [r.to_json() for r in found]}, out)
        else:
            out.write(f"{g} -> {h}: {found[0] if found else 'no obstruction'}\n")
            for r in found[1:]:
                out.write(f"  also {r}\n")
        return 0
    m = obstruction_matrix(cat)
    names = list(cat)
    if args.format == "csv":
        out.write(matrix_to_csv(m, names))
    elif args.format == "json":
        _dump(matrix_to_json(m, names), out)
    else:
        for (g, h), r in sorted(m.items(), key=lambda kv: (names.index(kv[0][0]), names.index(kv[0][1]))):
            out.write(f"{g} -> {h}: {r if r is not None else 'no obstruction'}\n")
    return 0


def cmd_rigidity(args, out) -> int:
    cat = _catalog(args)
    facts = _external(args)
    names = [n for n in cat if n in undominated(cat, facts)]
    if args.format == "json":
        _dump({"undominated": names, "external_facts": len(facts)}, out)
    else:
        out.write("undominated: " + ", ".join(names) + "\n")
    return 0


def cmd_bstable(args, out) -> int:
    cat = _catalog(args)
    sets = bstable_sets(args.s2_reading)
    if args.set not in sets:
        raise CliError(f"unknown set {args.set!r}; choose from {', '.join(sets)}")
    s = sets[args.set]
    a = _algebra(args.algebra, cat)
    assignment = bstable_membership(s, a)
    rep = {
        "set": s.name,
        "reading": s.reading,
        "algebra": args.algebra,
        "member": assignment is not None,
        "assignment": None if assignment is None else {k: str(v) for k, v in assignment.items()},
    }
    status = 0 if assignment is not None else 1
    if args.fuzz and assignment is not None:
        fz = bstable_fuzz(s, a, trials=args.fuzz, seed=args.seed, borel=args.borel, mode=args.mode)
        rep["fuzz"] = fz
        if not fz["stable"]:
            status = 1
    if args.format == "json":
        _dump(rep, out)
    else:
        out.write(f"{args.algebra} in {s.name} ({s.reading}): {'yes' if rep['member'] else 'no'}\n")
        if rep["assignment"]:
            out.write("  " + ", ".join(f"{k} = {v}" for k, v in rep["assignment"].items()) + "\n")
        if "fuzz" in rep:
            fz = rep["fuzz"]
            out.write(f"  fuzz: {fz['trials']} {fz['borel']} trials (seed {fz['seed']}), "
                      f"{len(fz['counterexamples'])} counterexamples\n")
            for ce in fz["counterexamples"][:3]:
                out.write(f"    trial {ce['trial']}: {ce['matrix']}\n")
    return status


def cmd_extend(args, out) -> int:
    cat = _catalog(args)
    g = _algebra(args.algebra, cat)
    b = load_cocycle(resolve_path(args.cocycle))
    rep = {"algebra": args.algebra, "cocycle": b.name, "cocycle_condition": cocycle_check(g, b)}
    try:
        ext = central_extension(g, b)
    except CocycleError as exc:
        rep["error"] = str(exc)
        ext = None
    if ext is not None:
        rep["extension"] = [f"[{i},{j}] = {v}" for (i, j), v in
                            ((k, _fmt_vec(vec)) for k, vec in sorted(ext.brackets.items()))]
        if ext.dim == 8:
            rep["profile"] = cached_profile(ext, args.seed).to_json()
            mine = cached_profile(ext, args.seed)
            rep["matches"] = [n for n, e in cat.items()
                              if cached_profile(e.algebra).signature() == mine.signature()]
    if args.check_perp:
        rep["perp"] = perp_report(g, b)
    if args.format == "json":
        _dump(rep, out)
    else:
        out.write(f"cocycle condition: {'ok' if rep['cocycle_condition'] else 'fails'}\n")
        if "error" in rep:
            out.write(f"  {rep['error']}\n")
        for line in rep.get("extension", []):
            out.write(f"  {line}\n")
        if "matches" in rep:
            out.write(f"  profile matches: {', '.join(rep['matches']) or 'none'}\n")
        if "perp" in rep:
            p = rep["perp"]
            out.write(f"  perp meets center trivially: {p['condition_holds']}\n")
            for v in p["intersection"]:
                vec = {k + 1: c for k, c in enumerate(v) if c != "0"}
                out.write(f"    intersection contains {_fmt_vec(vec)}\n")
    return 0 if ext is not None else 1


def _fmt_vec(vec) -> str:
    from .algebra import format_linear_combination

    return format_linear_combination(vec, "e")


def _graph(args):
    cat = _catalog(args)
    m = obstruction_matrix(cat)
    g, reports = build_graph(cat, _corpus(args), m, _external(args))
    return cat, m, g, reports


def cmd_hasse(args, out) -> int:
    cat, m, g, reports = _graph(args)
    edges = sorted(hasse(g), key=g._key)
    dot = to_dot(g, edges)
    if args.dot:
        Path(args.dot).write_text(dot, encoding="utf-8")
    if args.format == "dot":
        out.write(dot)
    elif args.format == "json":
        data = g.to_json()
        data["hasse"] = [list(e) for e in edges]
        data["open_pairs"] = [list(p) for p in consistency_check(g, m)["open_pairs"]]
        _dump(data, out)
    else:
        for a, b in edges:
            out.write(f"{a} -> {b}\n")
    return 0


def cmd_components(args, out) -> int:
    cat, m, g, reports = _graph(args)
    maxi = [n for n in g.nodes if n in maximal_elements(g)]
    rep = consistency_check(g, m)
    if args.format == "json":
        _dump({"maximal": maxi, "contradictions": rep["contradictions"],
               "open_pairs": len(rep["open_pairs"])}, out)
    else:
        out.write("maximal: " + ", ".join(maxi) + "\n")
        out.write(f"open pairs: {len(rep['open_pairs'])}\n")
        for c in rep["contradictions"]:
            out.write(f"contradiction: {c['source']} -> {c['target']} ({c['reason']})\n")
    return 0 if rep["consistent"] else 1


def verify_all(cat, corpus, table_pairs) -> dict:
    """Every machine-checkable claim in one report."""
    sections = {}
    orbit_fail = []
    for name, e in cat.items():
        got = cached_profile(e.algebra).orbit_dim
        if got != e.orbit_dim:
            orbit_fail.append({"name": name, "table": e.orbit_dim, "computed": got})
    sections["orbit_dims"] = {"checked": len(cat), "failures": orbit_fail}

    table_fail = []
    for reason, g, h in table_pairs:
        holds, lhs, rhs = listed_inequality(reason, cached_profile(cat[g].algebra), cached_profile(cat[h].algebra))
        if not holds:
            table_fail.append({"reason": reason, "source": g, "target": h, "lhs": lhs, "rhs": rhs})
    sections["nondegenerations"] = {"checked": len(table_pairs), "failures": table_fail}

    reports = [_witness_report(w, cat) for w in corpus]
    sections["witnesses"] = {
        "checked": len(reports),
        "failures": [r for r in reports if r["status"] != "PASS"],
    }

    und = [n for n in cat if n in undominated(cat)]
    sections["rigidity"] = {
        "components": und,
        "expected": list(EXPECTED_COMPONENTS),
        "failures": [] if set(und) == set(EXPECTED_COMPONENTS) else [{"got": und}],
    }
    ok = all(not s["failures"] for s in sections.values())
    return {"sections": sections, "ok": ok}


def cmd_verify_all(args, out) -> int:
    cat = _catalog(args)
    rep = verify_all(cat, _corpus(args), load_table_pairs())
    if args.format == "json":
        _dump(rep, out)
    else:
        s = rep["sections"]
        for key, title in (("orbit_dims", "orbit dimensions"), ("nondegenerations", "non-degenerations"),
                           ("witnesses", "corpus witnesses")):
            sec = s[key]
            n_ok = sec["checked"] - len(sec["failures"])
            out.write(f"{title}: {n_ok}/{sec['checked']} ok\n")
            for f in sec["failures"]:
                out.write(f"  FAIL {_describe(key, f)}\n")
        out.write("components: " + ", ".join(s["rigidity"]["components"]) + "\n")
        if s["rigidity"]["failures"]:
            out.write("  FAIL expected " + ", ".join(EXPECTED_COMPONENTS) + "\n")
        out.write("verify-all: " + ("PASS" if rep["ok"] else "FAIL") + "\n")
    return 0 if rep["ok"] else 1


def _describe(section: str, f: dict) -> str:
    if section == "orbit_dims":
        return f"{f['name']}: table {f['table']}, computed {f['computed']}"
    if section == "nondegenerations":
        return f"{f['reason']} {f['source']} -/-> {f['target']}: {f['lhs']} vs {f['rhs']}"
    return f"{f.get('path', '')}: {f['source']} -> {f['target']}: {f.get('detail', '')}"


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", type=Path, help="directory of .alg catalog files")
    common.add_argument("--corpus", type=Path, help="directory of .wit witness files")
    common.add_argument("--external", type=Path, help="external non-degeneration facts")
    common.add_argument("--format", choices=["text", "json", "csv", "dot"], default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--s2-reading", choices=["literal", "corrected"], default="literal")
    common.add_argument("--borel", choices=["upper", "lower"], default="upper")

    parser = argparse.ArgumentParser(prog="twostep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", parents=[common], help="list catalog entries")
    p = sub.add_parser("profile", parents=[common], help="invariant profile of an algebra")
    p.add_argument("algebra")
    p = sub.add_parser("check-witness", parents=[common], help="verify a degeneration witness")
    p.add_argument("witness")
    p = sub.add_parser("obstructions", parents=[common], help="invariant obstructions")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--pair", nargs=2, metavar=("G", "H"))
    grp.add_argument("--matrix", action="store_true")
    sub.add_parser("rigidity", parents=[common], help="entries no larger orbit can reach")
    p = sub.add_parser("bstable", parents=[common], help="membership in a Borel-stable set")
    p.add_argument("--set", required=True)
    p.add_argument("--algebra", required=True)
    p.add_argument("--fuzz", type=int, default=0, metavar="N")
    p.add_argument("--mode", choices=["full", "diagonal", "identity"], default="full")
    p = sub.add_parser("extend", parents=[common], help="central extension by a cocycle")
    p.add_argument("--algebra", required=True)
    p.add_argument("--cocycle", required=True)
    p.add_argument("--check-perp", action="store_true")
    p = sub.add_parser("hasse", parents=[common], help="Hasse diagram of verified degenerations")
    p.add_argument("--dot", help="write DOT to this file")
    sub.add_parser("components", parents=[common], help="maximal elements of the verified order")
    sub.add_parser("verify-all", parents=[common], help="full regression")
    return parser


COMMANDS = {
    "catalog": cmd_catalog,
    "profile": cmd_profile,
    "check-witness": cmd_check_witness,
    "obstructions": cmd_obstructions,
    "rigidity": cmd_rigidity,
    "bstable": cmd_bstable,
    "extend": cmd_extend,
    "hasse": cmd_hasse,
    "components": cmd_components,
    "verify-all": cmd_verify_all,
}


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig.from_args(args)
        config.validate()
        args.catalog, args.corpus, args.external = config.catalog, config.corpus, config.external
        return COMMANDS[args.command](args, out)
    except (ParseError, CliError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        err.write(f"error: {msg}\n")
        return 2


def main() -> None:  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
