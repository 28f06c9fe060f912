"""Depth-2 discrete networks with ternary first-layer weights.

Row ``i`` of ``w1`` holds +1/-1/0 per input; its bias is ``1 - #(+1 entries)``,
so the hidden unit fires exactly when the input agrees with the row's sign
pattern on all nonzero entries.  ``w2`` is stored unsigned (0/1) and the global
sign ``beta`` is applied at evaluation time; the output bias is
``(1 - beta) / 2``.  Biases are always derived, never stored.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .boolfn import BooleanFunction, input_of
from .dnf import Clause, Dnf, cube_table
from .errors import DimensionError
from .rng import as_generator


def width_for(n: int, alpha_w: int) -> int:
    if alpha_w < 1 or int(alpha_w) != alpha_w:
        raise ValueError(f"alpha_w must be a positive integer, got {alpha_w}")
    return int(alpha_w) << (n - 1)


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DfcnParams:
    n: int
    w1: np.ndarray
    w2: np.ndarray
    beta: int = 1

    def __post_init__(self):
        w1 = _frozen(self.w1, np.int8)
        w2 = _frozen(self.w2, np.int8)
        if w1.ndim != 2 or w1.shape[1] != self.n:
            raise DimensionError(f"w1 must be width x {self.n}, got shape {w1.shape}")
        if w2.shape != (w1.shape[0],):
            raise DimensionError(f"w2 must have length {w1.shape[0]}, got {w2.shape}")
        if not np.isin(w1, (-1, 0, 1)).all():
            raise ValueError("w1 entries must be in {-1, 0, +1}")
        if not np.isin(w2, (0, 1)).all():
            raise ValueError("w2 entries must be in {0, 1}")
        if self.beta not in (1, -1):
            raise ValueError(f"beta must be +1 or -1, got {self.beta}")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)
        object.__setattr__(self, "beta", int(self.beta))

    @property
    def width(self) -> int:
        return self.w1.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DfcnParams):
            return NotImplemented
        return (self.n == other.n and self.beta == other.beta
                and np.array_equal(self.w1, other.w1) and np.array_equal(self.w2, other.w2))

    def __hash__(self) -> int:
        return hash((self.n, self.beta, self.w1.tobytes(), self.w2.tobytes()))

    def replace(self, w1=None, w2=None, beta=None) -> "DfcnParams":
        return DfcnParams(self.n, self.w1 if w1 is None else w1,
                          self.w2 if w2 is None else w2,
                          self.beta if beta is None else beta)

    # derived quantities -------------------------------------------------

    @property
    def b1(self) -> np.ndarray:
        return 1 - (self.w1 == 1).sum(axis=1).astype(np.int64)

    @property
    def b2(self) -> int:
        return (1 - self.beta) // 2

    def signed_w2(self) -> np.ndarray:
        return self.beta * self.w2.astype(np.int64)

    def row_masks(self) -> tuple[np.ndarray, np.ndarray]:
        """Positive and negative literal masks per row (bit ``n - j`` for column j)."""
        weights = np.int64(1) << np.arange(self.n - 1, -1, -1, dtype=np.int64)
        pos = ((self.w1 == 1) * weights).sum(axis=1)
        neg = ((self.w1 == -1) * weights).sum(axis=1)
        return pos, neg

    def truth_table(self) -> BooleanFunction:
        return truth_table(self)

    def norm(self) -> "WeightNorm":
        return weight_norm(self)


@dataclass(frozen=True)
class WeightNorm:
    norm_w1: int
    norm_w2: int

    @property
    def total(self) -> int:
        return self.norm_w1 + self.norm_w2


def forward(p: DfcnParams, v: Sequence[int]) -> int:
    """Exact integer forward pass of a single input."""
    if len(v) != p.n:
        raise DimensionError(f"expected {p.n} inputs, got {len(v)}")
    x = np.array(v, dtype=np.int64)
    if not np.isin(x, (0, 1)).all():
        raise ValueError("inputs must be 0/1")
    z = p.w1.astype(np.int64) @ x + p.b1
    hidden = np.maximum(z, 0)
    out = int(p.signed_w2() @ hidden) + p.b2
    return int(out > 0)


def truth_table(p: DfcnParams) -> BooleanFunction:
    """All 2**n outputs at once, one compiled mask pair per active row."""
    n = p.n
    full = (1 << (1 << n)) - 1
    pos, neg = p.row_masks()
    t = 0
    for i in np.flatnonzero(p.w2):
        t |= cube_table(int(pos[i]), int(neg[i]), n)
        if t == full:
            break
    if p.beta == -1:
        t ^= full
    return BooleanFunction(n, t)


def dnf_to_dfcn(d: Dnf, width: int) -> DfcnParams:
    if len(d.clauses) > width:
        raise ValueError(f"{len(d.clauses)} clauses do not fit in width {width}")
    n = d.n
    w1 = np.zeros((width, n), dtype=np.int8)
    w2 = np.zeros(width, dtype=np.int8)
    for i, c in enumerate(d.clauses):
        if c.is_empty:
            continue
        w2[i] = 1
        for j in range(n):
            bit = 1 << (n - 1 - j)
            if c.pos_mask & bit:
                w1[i, j] = 1
            elif c.neg_mask & bit:
                w1[i, j] = -1
    return DfcnParams(n, w1, w2, d.beta)


def dfcn_to_dnf(p: DfcnParams) -> Dnf:
    pos, neg = p.row_masks()
    clauses = []
    for i in np.flatnonzero(p.w2):
        if pos[i] == 0 and neg[i] == 0:
            clauses.append(Clause.TRUE)
        else:
            clauses.append(Clause(int(pos[i]), int(neg[i])))
    return Dnf(p.n, p.beta, tuple(clauses))


def weight_norm(p: DfcnParams) -> WeightNorm:
    return WeightNorm(int(np.count_nonzero(p.w1)), int(np.count_nonzero(p.w2)))


def parameter_space_size(n: int, alpha_w: int = 1) -> int:
    """Number of (w1, beta) states the prior sampler draws from."""
    return 2 * 3 ** (n * width_for(n, alpha_w))


def sample_prior_params(n: int, alpha_w: int = 1, rng=None, width: int | None = None) -> DfcnParams:
    """Uniform ternary ``w1``, fair-coin ``beta``, ``w2`` on exactly the nonzero rows."""
    rng = as_generator(rng)
    width = width_for(n, alpha_w) if width is None else width
    w1 = rng.integers(-1, 2, size=(width, n), dtype=np.int8)
    beta = 1 if rng.integers(0, 2) else -1
    w2 = (w1 != 0).any(axis=1).astype(np.int8)
    return DfcnParams(n, w1, w2, beta)


def init_params(n: int, alpha_w: int = 1, rng=None, width: int | None = None,
                beta: int | None = None) -> DfcnParams:
    """Training initialisation: uniform ``w1``, uniform ``w2`` in {0, 1}, random or fixed ``beta``."""
    rng = as_generator(rng)
    width = width_for(n, alpha_w) if width is None else width
    w1 = rng.integers(-1, 2, size=(width, n), dtype=np.int8)
    w2 = rng.integers(0, 2, size=width, dtype=np.int8)
    if beta is None:
        beta = 1 if rng.integers(0, 2) else -1
    return DfcnParams(n, w1, w2, beta)


def neighbor_count(n: int, width: int, include_beta: bool = False) -> int:
    return 2 * width * n + width + int(include_beta)


def neighbors(p: DfcnParams, include_beta: bool = False) -> Iterator[DfcnParams]:
    """Every parameter vector at Hamming distance one.

    Order: each ``w1`` entry row-major with its two alternative values in
    ascending order, then each ``w2`` toggle, then (optionally) the beta flip.
    """
    w1 = p.w1
    for i in range(p.width):
        for j in range(p.n):
            for val in (-1, 0, 1):
                if val == w1[i, j]:
                    continue
                q = w1.copy()
                q[i, j] = val
                yield p.replace(w1=q)
    for i in range(p.width):
        q = p.w2.copy()
        q[i] ^= 1
        yield p.replace(w2=q)
    if include_beta:
        yield p.replace(beta=-p.beta)


def export_heatmap(p: DfcnParams, path: str | os.PathLike, step: int | None = None,
                   test_accuracy: float | None = None, extra: dict | None = None) -> tuple[Path, Path]:
    """Write ``w1`` as CSV (width rows x n signed columns) plus a JSON sidecar."""
    from .io import atomic_write_text

    path = Path(path)
    header = ",".join(f"x{j + 1}" for j in range(p.n))
    rows = [header] + [",".join(str(int(v)) for v in row) for row in p.w1]
    atomic_write_text(path, "\n".join(rows) + "\n")
    meta = {"beta": p.beta, "w2": [int(v) for v in p.w2], "step": step,
            "test_accuracy": test_accuracy}
    if extra:
        meta.update(extra)
    side = path.with_suffix(".json")
    atomic_write_text(side, json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path, side


def load_heatmap(path: str | os.PathLike) -> tuple[DfcnParams, dict]:
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    w1 = np.array([[int(v) for v in r] for r in rows[1:]], dtype=np.int8)
    meta = json.loads(path.with_suffix(".json").read_text())
    return DfcnParams(w1.shape[1], w1, meta["w2"], meta["beta"]), meta


def forward_all(p: DfcnParams) -> BooleanFunction:
    """Input-by-input forward over all 2**n inputs (reference path)."""
    return BooleanFunction.from_bits(forward(p, input_of(i, p.n)) for i in range(1 << p.n))


__all__ = [
    "DfcnParams", "WeightNorm", "forward", "forward_all", "truth_table", "dnf_to_dfcn",
    "dfcn_to_dnf", "weight_norm", "sample_prior_params", "init_params", "neighbors",
    "neighbor_count", "width_for", "parameter_space_size", "export_heatmap", "load_heatmap",
]
