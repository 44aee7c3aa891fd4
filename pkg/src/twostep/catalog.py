"""The 35 isomorphism classes of 8-dimensional 2-step nilpotent Lie algebras."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Union

from .algebra import LieAlgebra, ParseError, parse_algebra, parse_bilinear

# table order (orbit-dimension column source), used for stable reports
TABLE_ORDER = [
    "N1_8_2", "N2_8_2", "N3_8_2", "N4_8_2", "N5_8_2",
    "N1_8_3", "N2_8_3", "N3_8_3", "N4_8_3", "N5_8_3", "N6_8_3",
    "N7_8_3", "N8_8_3", "N9_8_3", "N10_8_3", "N11_8_3",
    "N1_8_4", "N2_8_4", "N3_8_4",
    "G17", "G27A", "G27B", "G37A", "G37B", "G37C", "G37D",
    "n6_1", "n6_2",
    "n5_1+n3_1", "n5_1", "n5_3+n3_1", "n5_3",
    "n3_1+n3_1", "n3_1",
    "A8",
]


@dataclass(frozen=True)
class CatalogEntry:
    algebra: LieAlgebra
    orbit_dim: int
    label: str

    @property
    def name(self) -> str:
        return self.algebra.name


def data_path(*parts: str) -> Path:
    return Path(str(resources.files("twostep"))).joinpath("data", *parts)


def file_stem(name: str) -> str:
    return name.replace("+", "_plus_")


def load_entry(path: Union[str, Path]) -> CatalogEntry:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    header, _ = parse_bilinear(text, "", "e", str(path))
    if "name" not in header or "orbit" not in header:
        raise ParseError("catalog entry needs 'name' and 'orbit'", 1, 1, str(path))
    alg = parse_algebra(text, str(path))
    return CatalogEntry(alg, int(header["orbit"]), header.get("label", alg.name))


def _sort_key(name: str):
    if name in TABLE_ORDER:
        return (0, TABLE_ORDER.index(name), name)
    return (1, 0, name)


def load_catalog(directory: Optional[Union[str, Path]] = None) -> Dict[str, CatalogEntry]:
    """Read every ``*.alg`` file in ``directory`` (default: the shipped catalog)."""
    directory = Path(directory) if directory is not None else data_path("catalog")
    entries = {}
    for path in directory.glob("*.alg"):
        e = load_entry(path)
        if e.name in entries:
            raise ValueError(f"duplicate catalog name {e.name!r} in {path}")
        entries[e.name] = e
    return {k: entries[k] for k in sorted(entries, key=_sort_key)}


def load_algebra_file(path: Union[str, Path]) -> LieAlgebra:
    path = Path(path)
    return parse_algebra(path.read_text(encoding="utf-8"), str(path))


_CACHE: Dict[str, Dict[str, CatalogEntry]] = {}


def default_catalog() -> Dict[str, CatalogEntry]:
    if "default" not in _CACHE:
        _CACHE["default"] = load_catalog()
    return _CACHE["default"]


def catalog_algebra(name: str) -> LieAlgebra:
    try:
        return default_catalog()[name].algebra
    except KeyError:
        raise KeyError(f"unknown catalog name {name!r}") from None
