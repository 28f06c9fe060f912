"""Complexity measures of Boolean functions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..boolfn import BooleanFunction
from ..dnf import cube_table
from ..errors import BudgetExceeded
from .lz import k_lz
from .minimize import _cube_masks, MAX_EXACT_N, MinDnfRequest, min_dnf, objective_value


def _check(f: BooleanFunction) -> None:
    if f.n > MAX_EXACT_N:
        raise BudgetExceeded(f"exact complexity is limited to n <= {MAX_EXACT_N}, got n={f.n}")


def _minimal(f: BooleanFunction, objective: str) -> int:
    _check(f)
    d = min_dnf(MinDnfRequest.from_function(f, allow_negation=True), objective)
    return objective_value(d, objective)


def k_dnf(f: BooleanFunction) -> int:
    """Fewest literals in any DNF (either polarity) computing ``f``."""
    return _minimal(f, "literals")


def k_theta(f: BooleanFunction) -> int:
    """Fewest literals plus clauses, i.e. the smallest nonzero-weight count of a network."""
    return _minimal(f, "literals_plus_clauses")


def k_clause(f: BooleanFunction) -> int:
    return 2 * _minimal(f, "clauses")


@dataclass(frozen=True)
class ComplexityReport:
    k_dnf: int
    k_theta: int
    k_clause: int
    k_lz: float

    def to_dict(self) -> dict:
        return asdict(self)


def sandwich_holds(n: int, kd: int, kt: int, kc: int) -> bool:
    if kd == 0:
        return True
    upper = kd + 2 ** (math.ceil(1 + math.log2(kd)) - 1)
    lower = kd + math.ceil(kd / n)
    return lower <= kt <= upper and math.ceil(kd / n) <= kc // 2


def complexity_report(f: BooleanFunction) -> ComplexityReport:
    kd, kt, kc = k_dnf(f), k_theta(f), k_clause(f)
    if not sandwich_holds(f.n, kd, kt, kc):
        raise AssertionError(f"complexity sandwich violated: k_dnf={kd} k_theta={kt} k_clause={kc}")
    return ComplexityReport(kd, kt, kc, k_lz(f.to_string()))


def k_dnf_table(n: int, objective: str = "literals") -> np.ndarray:
    """Minimal objective value (either polarity) for every function at once, n <= 4.

    Shortest paths over the function lattice, processed in buckets of equal
    cost: a DNF reaches table ``g | c`` from ``g`` by adding clause ``c``.
    """
    if n > 4:
        raise BudgetExceeded(f"exhaustive complexity tables are limited to n <= 4, got n={n}")
    size = 1 << (1 << n)
    pos, neg = _cube_masks(n)
    lits = np.array([(int(p) | int(q)).bit_count() for p, q in zip(pos, neg)])
    tables = np.array([cube_table(int(p), int(q), n) for p, q in zip(pos, neg)], dtype=np.int64)
    if objective == "literals":
        cost = lits
    elif objective == "clauses":
        cost = np.ones_like(lits)
    elif objective == "literals_plus_clauses":
        cost = lits + 1
    else:
        raise ValueError(f"unknown objective {objective!r}")
    inf = np.iinfo(np.int64).max
    dist = np.full(size, inf, dtype=np.int64)
    dist[0] = 0
    done = np.zeros(size, dtype=bool)
    level = 0
    while not done.all():
        frontier = np.flatnonzero((dist == level) & ~done)
        while frontier.size:
            done[frontier] = True
            for t, c in zip(tables, cost):
                tgt = frontier | t
                np.minimum.at(dist, tgt, level + c)
            frontier = np.flatnonzero((dist == level) & ~done)
        rest = dist[~done]
        if rest.size == 0:
            break
        level = int(rest.min())
    full = size - 1
    return np.minimum(dist, dist[full ^ np.arange(size)])
