"""Simplicity bias of depth-2 discrete networks on Boolean functions."""

from .boolfn import BooleanFunction, FamilySpec, from_string, generate, hamming_weight, parse_function
from .dnf import Clause, Dnf, dnf_eval, dnf_length, parse_dnf
from .errors import BoolBiasError, BudgetExceeded, DimensionError, MemoryBudgetExceeded

__version__ = "0.1.0"

__all__ = [
    "BooleanFunction", "FamilySpec", "from_string", "generate", "hamming_weight",
    "parse_function", "Clause", "Dnf", "dnf_eval", "dnf_length", "parse_dnf",
    "BoolBiasError", "BudgetExceeded", "DimensionError", "MemoryBudgetExceeded", "__version__",
]
