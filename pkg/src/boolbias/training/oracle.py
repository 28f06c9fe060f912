"""Minimum-norm interpolating DNF and the exact weight-decay posterior tilt."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr

from ..boolfn import BooleanFunction
from ..complexity import MinDnfRequest, k_dnf_table, min_dnf
from ..dfcn import width_for
from ..dnf import Dnf
from ..errors import BudgetExceeded
from ..prior.sampling import clause_tables
from .dataset import Dataset


def oracle_train(data: Dataset, objective: str = "literals",
                 allow_negation: bool = False) -> tuple[Dnf, BooleanFunction]:
    """Literal-minimal DNF fitting the training labels, test inputs left free."""
    req = MinDnfRequest(data.n, data.train_on(), frozenset(int(i) for i in data.test_idx), allow_negation)
    d = min_dnf(req, objective)
    return d, d.truth_table()


@dataclass(frozen=True)
class TiltReport:
    lam: float
    correlation: float
    n_interpolators: int
    total_probability: float
    max_abs_log_ratio: float
    functions: np.ndarray
    log_ratio: np.ndarray
    k_dnf: np.ndarray

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "spearman": self.correlation, "n_interpolators": self.n_interpolators,
                "total_probability": self.total_probability, "max_abs_log_ratio": self.max_abs_log_ratio}


def _row_weights(n: int, lam: float, space: str) -> tuple[np.ndarray, np.ndarray]:
    """Per-row (table, weight) pairs with weight exp(-lam * nonzero weights in the row)."""
    full = (1 << (1 << n)) - 1
    tabs, wts = [], []
    coords = np.indices((3,) * n).reshape(n, -1).T
    for c, t in zip(coords, clause_tables(n)):
        lits = int((c != 2).sum())
        zero = lits == 0
        if space == "chain":
            tabs.append(0)
            wts.append(math.exp(-lam * lits))
            tabs.append(full if zero else t)
            wts.append(math.exp(-lam * (lits + 1)))
        else:
            tabs.append(t)
            wts.append(math.exp(-lam * (lits + (0 if zero else 1))))
    return np.array(tabs, dtype=np.int64), np.array(wts)


def _weights(n: int, width: int, lam: float, space: str) -> np.ndarray:
    size = 1 << (1 << n)
    tabs, wts = _row_weights(n, lam, space)
    h = np.zeros(size)
    np.add.at(h, tabs, wts)
    support = np.flatnonzero(h)
    funcs = np.arange(size, dtype=np.int64)
    d = np.zeros(size)
    d[0] = 1.0
    for _ in range(width):
        new = np.zeros(size)
        live = np.flatnonzero(d)
        for t in support:
            np.add.at(new, funcs[live] | t, d[live] * h[t])
        d = new
    return d + d[(size - 1) ^ funcs]


def posterior_tilt_check(target: BooleanFunction | None, data: Dataset, alpha_w: int = 1, lam: float = 0.1,
                         space: str = "chain", width: int | None = None) -> TiltReport:
    """Exact 0-1-likelihood posterior with an ``exp(-lam |theta|)`` factor versus ``lam = 0``.

    ``space="chain"`` weighs every (w1, w2, beta) state equally before the
    tilt, the stationary measure of the training chain; ``"prior"`` ties
    ``w2`` to the nonzero rows as the prior sampler does.  Reports the
    Spearman correlation, over interpolating functions, between
    ``log P_lam(f|S) / P_0(f|S)`` and ``-lam K_DNF(f)``.
    """
    if target is not None and target != data.target:
        raise ValueError("target does not match the dataset's target")
    n = data.n
    if n > 3:
        raise BudgetExceeded(f"exact posterior enumeration is limited to n <= 3, got n={n}")
    if space not in ("chain", "prior"):
        raise ValueError(f"unknown space {space!r}")
    width = width_for(n, alpha_w) if width is None else width
    if width > 8:
        raise BudgetExceeded(f"exact posterior enumeration is limited to width <= 8, got {width}")
    size = 1 << (1 << n)
    funcs = np.arange(size, dtype=np.int64)
    tmask = 0
    tval = 0
    for i in data.train_idx:
        tmask |= 1 << int(i)
        if data.target.at(int(i)):
            tval |= 1 << int(i)
    interp = funcs[(funcs & tmask) == tval]
    w_lam = _weights(n, width, lam, space)[interp]
    w_0 = _weights(n, width, 0.0, space)[interp]
    p_lam = w_lam / w_lam.sum()
    p_0 = w_0 / w_0.sum()
    keep = p_0 > 0
    log_ratio = np.log(p_lam[keep]) - np.log(p_0[keep])
    ks = k_dnf_table(n)[interp[keep]]
    if np.ptp(log_ratio) < 1e-12 or np.ptp(ks) == 0:
        corr = float("nan")
    else:
        corr = float(spearmanr(log_ratio, -lam * ks).statistic)
    return TiltReport(lam, corr, int(keep.sum()), float(p_lam.sum()), float(np.abs(log_ratio).max()),
                      interp[keep], log_ratio, ks)
