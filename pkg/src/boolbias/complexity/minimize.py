"""Exact two-level minimisation with don't-cares.

Prime implicants come from a sweep over the ternary cube lattice: cube
coordinates take value 0 (negated literal), 1 (positive literal) or 2 (free),
and an array of shape ``(3,) * n`` records for every cube whether it touches
the off-set and whether it touches the on-set.  Optimal covers are found by
:mod:`boolbias.complexity.setcover`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from ..dnf import Clause, Dnf
from ..errors import BudgetExceeded, DimensionError
from . import setcover

MAX_EXACT_N = 12
OBJECTIVES = ("literals", "clauses", "literals_plus_clauses")


@dataclass(frozen=True)
class MinDnfRequest:
    n: int
    on_set: frozenset[int] = field(default_factory=frozenset)
    dc_set: frozenset[int] = field(default_factory=frozenset)
    allow_negation: bool = False

    def __post_init__(self):
        if not 1 <= self.n:
            raise DimensionError(f"n must be positive, got {self.n}")
        on = frozenset(int(i) for i in self.on_set)
        dc = frozenset(int(i) for i in self.dc_set)
        size = 1 << self.n
        for s in (on, dc):
            if any(not 0 <= i < size for i in s):
                raise ValueError(f"input index outside [0, {size})")
        if on & dc:
            raise ValueError("on_set and dc_set overlap")
        object.__setattr__(self, "on_set", on)
        object.__setattr__(self, "dc_set", dc)

    @property
    def off_set(self) -> frozenset[int]:
        return frozenset(range(1 << self.n)) - self.on_set - self.dc_set

    @classmethod
    def from_function(cls, f, allow_negation: bool = True) -> "MinDnfRequest":
        on = frozenset(i for i in range(f.size) if f.at(i))
        return cls(f.n, on, frozenset(), allow_negation)


@lru_cache(maxsize=None)
def _cube_masks(n: int) -> tuple[np.ndarray, np.ndarray]:
    """pos/neg masks of every ternary cube, flattened in C order."""
    coords = np.indices((3,) * n).reshape(n, -1)
    weights = (1 << np.arange(n - 1, -1, -1)).astype(np.int64)[:, None]
    pos = ((coords == 1) * weights).sum(axis=0)
    neg = ((coords == 0) * weights).sum(axis=0)
    return pos, neg


def _extend(a: np.ndarray) -> np.ndarray:
    """Lift a (2,)*n membership array to (3,)*n cube 'contains any' flags."""
    for ax in range(a.ndim):
        free = np.take(a, [0], axis=ax) | np.take(a, [1], axis=ax)
        a = np.concatenate([a, free], axis=ax)
    return a


def prime_implicants(n: int, on: Iterable[int], off: Iterable[int]) -> list[Clause]:
    """Primes of the partial function that cover at least one on-set point.

    The all-free cube (a tautology) appears as ``Clause.TRUE`` when the
    off-set is empty.
    """
    size = 1 << n
    on_arr = np.zeros(size, dtype=bool)
    off_arr = np.zeros(size, dtype=bool)
    on_arr[list(on)] = True
    off_arr[list(off)] = True
    shape = (2,) * n
    hits_off = _extend(off_arr.reshape(shape))
    hits_on = _extend(on_arr.reshape(shape))
    implicant = ~hits_off
    expandable = np.zeros_like(implicant)
    for ax in range(n):
        freed = np.take(implicant, [2], axis=ax)
        grow = np.broadcast_to(freed, implicant.shape).copy()
        idx = [slice(None)] * n
        idx[ax] = 2
        grow[tuple(idx)] = False
        expandable |= grow
    prime = (implicant & ~expandable & hits_on).ravel()
    pos, neg = _cube_masks(n)
    out = []
    for k in np.flatnonzero(prime):
        p, q = int(pos[k]), int(neg[k])
        out.append(Clause.TRUE if p == 0 and q == 0 else Clause(p, q))
    return out


def _cost(c: Clause, objective: str) -> int:
    if objective == "literals":
        return len(c)
    if objective == "clauses":
        return 1
    return len(c) + 1


def _coverage(primes: list[Clause], elems: np.ndarray) -> list[int]:
    """Bitmask over positions in ``elems`` covered by each prime."""
    pos = np.array([c.pos_mask for c in primes], dtype=np.int64)[:, None]
    neg = np.array([c.neg_mask for c in primes], dtype=np.int64)[:, None]
    e = elems[None, :]
    hit = ((e & pos) == pos) & ((e & neg) == 0)
    packed = np.packbits(hit, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _minimize_one(n: int, on: frozenset[int], off: frozenset[int], objective: str) -> tuple[int, Dnf]:
    if not on:
        return 0, Dnf(n, 1, ())
    primes = prime_implicants(n, on, off)
    if Clause.TRUE in primes:
        taut = Dnf(n, 1, (Clause.TRUE,))
        return _cost(Clause.TRUE, objective), taut
    primes.sort(key=Clause.sort_key)
    elems = np.array(sorted(on), dtype=np.int64)
    masks = _coverage(primes, elems)
    costs = [_cost(c, objective) for c in primes]
    res = setcover.solve((1 << len(elems)) - 1, masks, costs)
    clauses = tuple(primes[i] for i in res.chosen)
    return sum(costs[i] for i in res.chosen), Dnf(n, 1, clauses)


def min_dnf(req: MinDnfRequest, objective: str = "literals") -> Dnf:
    """Globally optimal DNF for the partial function in ``req``.

    With ``allow_negation`` both polarities are minimised; ties prefer fewer
    clauses, then ``beta = +1``.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")
    n = req.n
    if n > MAX_EXACT_N:
        raise BudgetExceeded(f"exact minimisation is limited to n <= {MAX_EXACT_N}, got n={n}")
    off = req.off_set
    cost_p, best = _minimize_one(n, req.on_set, off, objective)
    if req.allow_negation:
        cost_m, d = _minimize_one(n, off, req.on_set, objective)
        if (cost_m, len(d.clauses)) < (cost_p, len(best.clauses)):
            best = d.negated()
    _check_consistent(best, req.on_set, off)
    return best


def _check_consistent(d: Dnf, on: frozenset[int], off: frozenset[int]) -> None:
    t = d.truth_table().table
    assert all((t >> i) & 1 for i in on), "minimised DNF misses an on-set input"
    assert not any((t >> i) & 1 for i in off), "minimised DNF hits an off-set input"


def objective_value(d: Dnf, objective: str) -> int:
    return sum(_cost(c, objective) for c in d.clauses)
