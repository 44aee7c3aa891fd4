"""Exact verification toolkit for the degeneration order on 8-dimensional
2-step nilpotent Lie algebras."""

from .algebra import (
    LieAlgebra,
    change_basis,
    direct_sum,
    is_isomorphic_via,
    is_two_step,
    jacobi_residual,
    parse_algebra,
    render_algebra,
)
from .scalars import GaussianRational

__all__ = [
    "GaussianRational",
    "LieAlgebra",
    "change_basis",
    "direct_sum",
    "is_isomorphic_via",
    "is_two_step",
    "jacobi_residual",
    "parse_algebra",
    "render_algebra",
]

__version__ = "0.1.0"
