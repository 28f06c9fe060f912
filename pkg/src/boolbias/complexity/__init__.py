from .lz import k_lz, lz76_words
from .measures import ComplexityReport, complexity_report, k_clause, k_dnf, k_dnf_table, k_theta, sandwich_holds
from .minimize import MAX_EXACT_N, OBJECTIVES, MinDnfRequest, min_dnf, objective_value, prime_implicants

__all__ = [
    "k_lz", "lz76_words", "ComplexityReport", "complexity_report", "k_clause", "k_dnf", "k_dnf_table",
    "k_theta", "sandwich_holds", "MAX_EXACT_N", "OBJECTIVES", "MinDnfRequest", "min_dnf",
    "objective_value", "prime_implicants",
]
