"""Field theories built from Thompson's groups F and T acting on tree tensor networks."""

from .errors import TFTError
from .forest import Tree, Forest, parse_tree, parse_forest, compose, join
from .thompson import GroupElement, generator, multiply, inverse, element_to_pl, pl_to_element
from .tensorlab import Isometry3, qutrit, qutrit_system, verify_tensor, verify_blob
from .semicont import LimitState, vacuum, act, inner
from .correlators import npoint, two_point_closed_form, ope_table, brute_force_npoint

__version__ = "0.1.0"

__all__ = [
    "TFTError", "Tree", "Forest", "parse_tree", "parse_forest", "compose", "join",
    "GroupElement", "generator", "multiply", "inverse", "element_to_pl", "pl_to_element",
    "Isometry3", "qutrit", "qutrit_system", "verify_tensor", "verify_blob",
    "LimitState", "vacuum", "act", "inner",
    "npoint", "two_point_closed_form", "ope_table", "brute_force_npoint",
]
