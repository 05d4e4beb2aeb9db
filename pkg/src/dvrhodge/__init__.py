"""Exact spectral-sequence diagnostics over discrete valuation rings."""

from .ring import make_ring
from .linalg import Matrix, snf
from .modules import FinModule, Module, ModuleMap
from .complexes import FreeComplex, cohomology, dualize
from .spectral import FilteredComplex, classify, pages
from .hodge import virtual_hodge_numbers, rational_hodge_numbers, threshold

__all__ = [
    "make_ring",
    "Matrix",
    "snf",
    "FinModule",
    "Module",
    "ModuleMap",
    "FreeComplex",
    "cohomology",
    "dualize",
    "FilteredComplex",
    "classify",
    "pages",
    "virtual_hodge_numbers",
    "rational_hodge_numbers",
    "threshold",
]

__version__ = "0.1.0"
