"""Finite-dimensional noncommutative Lp toolkit.

Weighted Schatten norms, S^1-valued norms with certified bounds, map norms,
complete positivity and Yeadon factorizations of separating maps.
"""

from .algebra import Algebra, Block, Element, SpectralData, polar, power, pseudo_inverse, support, trace
from .config import DEFAULT, INF, OptConfig
from .errors import DomainError, InternalInconsistencyError, PreconditionError, SchemaError, StructuralError
from .map_norms import amplified_norm, op_norm, s1_map_norm
from .maps import LpMap, is_completely_positive
from .s1_solver import S1Result, s1_norm, s1_norm_opt
from .schatten import lp_norm
from .vector_valued import Factorization, GridElement
from .yeadon import classify, extract_triple, generate_isometry, is_isometry

__all__ = [
    "Algebra", "Block", "Element", "SpectralData", "polar", "power", "pseudo_inverse", "support", "trace",
    "DEFAULT", "INF", "OptConfig", "DomainError", "InternalInconsistencyError", "PreconditionError",
    "SchemaError", "StructuralError", "LpMap", "S1Result", "s1_norm", "s1_norm_opt", "lp_norm",
    "Factorization", "GridElement", "op_norm", "amplified_norm", "s1_map_norm", "is_completely_positive",
    "classify", "extract_triple", "generate_isometry", "is_isometry",
]
