"""Mutable array state shared by the compiled trainers."""

from __future__ import annotations

import numpy as np

from ..dfcn import DfcnParams
from .dataset import Dataset
from .kernels import NW1, NW2, TEST_ERR, TRAIN_ERR


class ChainState:
    def __init__(self, p: DfcnParams, data: Dataset):
        n = p.n
        self.n = n
        self.w1 = np.array(p.w1, dtype=np.int8)
        self.w2 = np.array(p.w2, dtype=np.int8)
        self.beta = np.array([p.beta], dtype=np.int64)
        pos, neg = p.row_masks()
        self.pos = np.ascontiguousarray(pos, dtype=np.int64)
        self.neg = np.ascontiguousarray(neg, dtype=np.int64)
        size = 1 << n
        x = np.arange(size, dtype=np.int64)[:, None]
        hits = ((x & self.pos) == self.pos) & ((x & self.neg) == 0) & (self.w2 == 1)
        self.cover = hits.sum(axis=1).astype(np.int32)
        self.pred = ((self.cover > 0).astype(np.uint8) ^ np.uint8(p.beta == -1))
        self.y = data.labels().astype(np.uint8)
        self.role = np.full(size, 2, dtype=np.uint8)
        self.role[data.train_idx] = 0
        self.role[data.test_idx] = 1
        self.train_idx = np.array(data.train_idx, dtype=np.int64)
        self.n_test = int(data.test_idx.size)
        err = self.pred != self.y
        self.cnt = np.zeros(5, dtype=np.int64)
        self.cnt[TRAIN_ERR] = int(err[self.role == 0].sum())
        self.cnt[TEST_ERR] = int(err[self.role == 1].sum())
        self.cnt[NW1] = int(np.count_nonzero(self.w1))
        self.cnt[NW2] = int(np.count_nonzero(self.w2))

    def params(self) -> DfcnParams:
        return DfcnParams(self.n, self.w1.copy(), self.w2.copy(), int(self.beta[0]))

    @property
    def train_acc(self) -> float:
        return 1.0 - self.cnt[TRAIN_ERR] / self.train_idx.size

    @property
    def test_acc(self) -> float:
        return 1.0 - self.cnt[TEST_ERR] / self.n_test if self.n_test else 1.0

    @property
    def norm(self) -> int:
        return int(self.cnt[NW1] + self.cnt[NW2])

    def summary(self) -> dict:
        return {"loss": 1.0 - self.train_acc, "train_acc": self.train_acc, "test_acc": self.test_acc,
                "norm_w1": int(self.cnt[NW1]), "norm_w2": int(self.cnt[NW2]), "norm": self.norm, "steps": 0}
