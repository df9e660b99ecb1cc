"""Layered treewidth, jump grids and coarse-geometry tooling for small graphs."""

from ._kernels import BACKEND
from .errors import BudgetExhausted, GraphFormatError, SpecError, UsageError
from .graph import Graph, Layering, bfs_layering, forest_layering

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetExhausted",
    "GraphFormatError",
    "SpecError",
    "UsageError",
    "Graph",
    "Layering",
    "bfs_layering",
    "forest_layering",
]
