"""Exact construction of resolution trees for hypersurfaces b = 0."""

from .constraints import ConstraintSet
from .poly import Polynomial, RationalFunction
from .parse_io import parse_polynomial, parse_problem
from .tree import TreeConfig, build_tree, compose_path

__all__ = [
    "ConstraintSet",
    "Polynomial",
    "RationalFunction",
    "TreeConfig",
    "build_tree",
    "compose_path",
    "parse_polynomial",
    "parse_problem",
]
