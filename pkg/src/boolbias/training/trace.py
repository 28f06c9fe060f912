"""Per-step training records and parameter snapshots."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dfcn import DfcnParams

TRACE_COLUMNS = ("step", "loss", "train_acc", "test_acc", "norm_w1", "norm_w2")


@dataclass(frozen=True)
class Snapshot:
    step: int
    params: DfcnParams
    test_accuracy: float
    reason: str = ""


@dataclass
class TrainTrace:
    loss: np.ndarray
    train_acc: np.ndarray
    test_acc: np.ndarray
    norm_w1: np.ndarray
    norm_w2: np.ndarray
    snapshots: list[Snapshot] = field(default_factory=list)
    initial: dict = field(default_factory=dict)

    @classmethod
    def empty(cls, steps: int) -> "TrainTrace":
        return cls(np.zeros(steps), np.zeros(steps), np.zeros(steps),
                   np.zeros(steps, dtype=np.int64), np.zeros(steps, dtype=np.int64))

    def truncate(self, steps: int) -> None:
        for name in ("loss", "train_acc", "test_acc", "norm_w1", "norm_w2"):
            setattr(self, name, getattr(self, name)[:steps].copy())

    def __len__(self) -> int:
        return int(self.loss.size)

    @property
    def steps(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    @property
    def norm(self) -> np.ndarray:
        return self.norm_w1 + self.norm_w2

    def rows(self, every: int = 1):
        for s in range(0, len(self), every):
            yield (s + 1, float(self.loss[s]), float(self.train_acc[s]), float(self.test_acc[s]),
                   int(self.norm_w1[s]), int(self.norm_w2[s]))

    def final(self) -> dict:
        if not len(self):
            return dict(self.initial)
        return {"loss": float(self.loss[-1]), "train_acc": float(self.train_acc[-1]),
                "test_acc": float(self.test_acc[-1]), "norm_w1": int(self.norm_w1[-1]),
                "norm_w2": int(self.norm_w2[-1]), "norm": int(self.norm_w1[-1] + self.norm_w2[-1]),
                "steps": len(self)}

    def equals(self, other: "TrainTrace") -> bool:
        return all(np.array_equal(getattr(self, k), getattr(other, k))
                   for k in ("loss", "train_acc", "test_acc", "norm_w1", "norm_w2"))
