from .bounds import (BoundParams, Bounds, bound_1entropy, bound_constant, bound_entropy_upper, bound_ksparse,
                     bound_parity, bound_qr, entropy_independence_curve, optimal_width, p_clause_covers,
                     pac_bayes_bound)
from .sampling import (PriorEstimate, RankRow, clause_tables, exact_prior, merge, plan_chunks, rank_table,
                       sample_prior, split_plan, zipf_reference)

__all__ = [
    "BoundParams", "Bounds", "bound_1entropy", "bound_constant", "bound_entropy_upper", "bound_ksparse",
    "bound_parity", "bound_qr", "entropy_independence_curve", "optimal_width", "p_clause_covers",
    "pac_bayes_bound", "PriorEstimate", "RankRow", "clause_tables", "exact_prior", "merge", "plan_chunks",
    "rank_table", "sample_prior", "split_plan", "zipf_reference",
]
