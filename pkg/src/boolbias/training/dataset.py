"""Train/test splits of the input cube and the scoring helpers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..boolfn import BooleanFunction
from ..dfcn import DfcnParams, truth_table
from ..rng import stream


@dataclass(frozen=True, eq=False)
class Dataset:
    target: BooleanFunction
    train_idx: np.ndarray
    test_idx: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        tr = np.array(self.train_idx, dtype=np.int64)
        te = np.array(self.test_idx, dtype=np.int64)
        size = self.target.size
        both = np.concatenate([tr, te])
        if both.size != size or not np.array_equal(np.sort(both), np.arange(size)):
            raise ValueError("train and test indices must partition the input cube")
        tr.setflags(write=False)
        te.setflags(write=False)
        object.__setattr__(self, "train_idx", tr)
        object.__setattr__(self, "test_idx", te)

    @property
    def n(self) -> int:
        return self.target.n

    @property
    def m(self) -> int:
        return int(self.train_idx.size)

    def labels(self) -> np.ndarray:
        return self.target.to_array()

    def train_on(self) -> frozenset[int]:
        t = self.target
        return frozenset(int(i) for i in self.train_idx if t.at(int(i)))

    def train_off(self) -> frozenset[int]:
        t = self.target
        return frozenset(int(i) for i in self.train_idx if not t.at(int(i)))


def make_dataset(target: BooleanFunction, m: int, seed: int = 0) -> Dataset:
    """Seeded shuffle of all inputs; the first ``m`` form the training set."""
    size = target.size
    if not 0 < m < size:
        raise ValueError(f"need 0 < m < 2**n = {size}, got m={m}")
    perm = stream(seed, 4).permutation(size)
    return Dataset(target, perm[:m], perm[m:], seed)


def dataset_from_indices(target: BooleanFunction, train_idx: Sequence[int]) -> Dataset:
    """Explicit training indices (kept in the given order); everything else is test."""
    tr = [int(i) for i in train_idx]
    if len(set(tr)) != len(tr):
        raise ValueError("duplicate training index")
    if not 0 < len(tr) <= target.size:
        raise ValueError("training set must be non-empty")
    rest = sorted(set(range(target.size)) - set(tr))
    return Dataset(target, np.array(tr, dtype=np.int64), np.array(rest, dtype=np.int64))


def _subset(idx) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("empty index subset")
    return idx


def accuracy(pred: BooleanFunction, target: BooleanFunction, idx_subset) -> float:
    idx = _subset(idx_subset)
    return float((pred.to_array()[idx] == target.to_array()[idx]).mean())


def loss(p: DfcnParams, d: Dataset, idx_subset) -> float:
    """Mean squared error of the network outputs against the target labels."""
    idx = _subset(idx_subset)
    out = truth_table(p).to_array()[idx].astype(float)
    lab = d.labels()[idx].astype(float)
    return float(((out - lab) ** 2).mean())
