"""Exact weighted set cover by branch and bound.

Elements and sets are Python-int bitmasks.  Sets must be supplied in their
tie-break order: among covers of equal minimum cost, :func:`solve` returns the
one whose sorted index list is lexicographically smallest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass
class CoverResult:
    cost: float
    chosen: list[int]
    nodes: int


class _Solver:
    def __init__(self, universe: int, masks: Sequence[int], costs: Sequence[float]):
        self.universe = universe
        self.masks = list(masks)
        self.costs = list(costs)
        self.n_elem = universe.bit_length()
        covering = [0] * self.n_elem
        for s, m in enumerate(self.masks):
            for e in _bits(m & universe):
                covering[e] |= 1 << s
        self.covering = covering
        self.nodes = 0

    # bounds ---------------------------------------------------------------

    def lower_bound(self, unc: int, allowed: int) -> float:
        """max(fractional per-element bound, disjoint-element packing bound)."""
        ratio_lb = 0.0
        pack_lb = 0.0
        used_sets = 0
        masks, costs, covering = self.masks, self.costs, self.covering
        for e in _bits(unc):
            cand = covering[e] & allowed
            if not cand:
                return math.inf
            best_ratio = math.inf
            best_cost = math.inf
            for s in _bits(cand):
                c = costs[s]
                r = c / (masks[s] & unc).bit_count()
                if r < best_ratio:
                    best_ratio = r
                if c < best_cost:
                    best_cost = c
            ratio_lb += best_ratio
            if not (cand & used_sets):
                used_sets |= cand
                pack_lb += best_cost
        return max(ratio_lb, pack_lb)

    def greedy(self, unc: int, allowed: int) -> tuple[float, list[int]] | None:
        chosen = []
        cost = 0.0
        while unc:
            best = None
            best_r = math.inf
            for s in _bits(allowed):
                gain = (self.masks[s] & unc).bit_count()
                if gain:
                    r = self.costs[s] / gain
                    if r < best_r:
                        best_r, best = r, s
            if best is None:
                return None
            chosen.append(best)
            cost += self.costs[best]
            unc &= ~self.masks[best]
            allowed &= ~(1 << best)
        return cost, sorted(chosen)

    # search ---------------------------------------------------------------

    def search(self, unc: int, allowed: int, bound: float, strict: bool,
               first: bool) -> tuple[float, list[int]] | None:
        """Cheapest cover of ``unc`` from ``allowed`` beating ``bound``.

        ``strict``: require cost < bound, else cost <= bound.  ``first``: stop
        at the first qualifying cover.
        """
        eps = 1e-9
        best: list = [bound, None]

        def beats(c: float) -> bool:
            return c < best[0] - eps if (strict or best[1] is not None) else c <= best[0] + eps

        def dfs(unc: int, cost: float, allowed: int, chosen: list[int]) -> bool:
            self.nodes += 1
            if not unc:
                if beats(cost):
                    best[0], best[1] = cost, sorted(chosen)
                    return first
                return False
            lb = self.lower_bound(unc, allowed)
            if not beats(cost + lb):
                return False
            pick = -1
            pick_deg = None
            for e in _bits(unc):
                deg = (self.covering[e] & allowed).bit_count()
                if pick_deg is None or deg < pick_deg:
                    pick, pick_deg = e, deg
                    if deg <= 1:
                        break
            cands = list(_bits(self.covering[pick] & allowed))
            cands.sort(key=lambda s: (self.costs[s] / (self.masks[s] & unc).bit_count(), s))
            for s in cands:
                chosen.append(s)
                stop = dfs(unc & ~self.masks[s], cost + self.costs[s], allowed & ~(1 << s), chosen)
                chosen.pop()
                if stop:
                    return True
                allowed &= ~(1 << s)
            return False

        dfs(unc, 0.0, allowed, [])
        if best[1] is None:
            return None
        return best[0], best[1]


def solve(universe: int, masks: Sequence[int], costs: Sequence[float]) -> CoverResult:
    """Minimum-cost cover of every element in ``universe``.

    Ties are broken towards the lexicographically smallest sorted index list,
    so callers order the sets by their preferred key before calling.
    """
    if any(c <= 0 for c in costs):
        raise ValueError("set costs must be positive")
    solver = _Solver(universe, masks, costs)
    if not universe:
        return CoverResult(0.0, [], 0)
    all_sets = (1 << len(masks)) - 1
    reach = 0
    for m in masks:
        reach |= m
    if universe & ~reach:
        raise ValueError("some elements cannot be covered")

    start = solver.greedy(universe, all_sets)
    opt = solver.search(universe, all_sets, start[0], strict=True, first=False)
    best_cost = start[0] if opt is None else opt[0]

    # Lexicographic pass: walk sets in order, keep each one that still admits
    # an optimal completion.
    chosen: list[int] = []
    witness = start[1] if opt is None else opt[1]
    unc = universe
    spent = 0.0
    excluded = 0
    for s in range(len(masks)):
        if not unc:
            break
        if not (masks[s] & unc):
            excluded |= 1 << s
            continue
        rest_allowed = all_sets & ~excluded & ~((1 << (s + 1)) - 1)
        if s in witness:
            ok = True
            new_witness = witness
        else:
            budget = best_cost - spent - costs[s]
            found = solver.search(unc & ~masks[s], rest_allowed, budget, strict=False, first=True)
            ok = found is not None
            new_witness = sorted(chosen + [s] + (found[1] if found else []))
        if ok:
            chosen.append(s)
            spent += costs[s]
            unc &= ~masks[s]
            witness = new_witness
        else:
            excluded |= 1 << s
    assert not unc, "lexicographic pass lost feasibility"
    return CoverResult(spent, chosen, solver.nodes)
