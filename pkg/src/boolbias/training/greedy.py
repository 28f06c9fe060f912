"""Steepest-ascent neighbour search with a minimum-norm selection bias."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..boolfn import BooleanFunction
from ..dfcn import DfcnParams, init_params, neighbor_count, width_for
from ..rng import stream
from . import kernels
from .dataset import Dataset
from .mcmc import _check_target
from .state import ChainState
from .trace import Snapshot, TrainTrace


@dataclass(frozen=True)
class GreedyConfig:
    p: float = 0.3
    steps: int = 2000
    batch: int | None = None
    seed: int = 0
    keep_current: bool = False
    beta_loop: bool = False
    beta: int | None = None
    early_stop: int | None = None
    snapshot_thresholds: tuple[float, ...] = ()
    snapshot_every: int | None = None

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must be in [0, 1], got {self.p}")
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.batch is not None and self.batch < 1:
            raise ValueError(f"batch must be >= 1, got {self.batch}")
        if self.beta not in (None, 1, -1):
            raise ValueError(f"beta must be +1, -1 or unset, got {self.beta}")
        object.__setattr__(self, "snapshot_thresholds", tuple(sorted(self.snapshot_thresholds)))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["snapshot_thresholds"] = list(self.snapshot_thresholds)
        return d


def greedy_train(target: BooleanFunction | None, data: Dataset, alpha_w: int = 1,
                 cfg: GreedyConfig = GreedyConfig(), *, width: int | None = None,
                 init: DfcnParams | None = None) -> tuple[DfcnParams, TrainTrace]:
    """Each step moves to a best-accuracy neighbour on the batch.

    With probability ``p`` the move is drawn uniformly from the lowest-norm
    members of the best set, otherwise uniformly from the whole best set.
    The current state is a candidate only with ``keep_current``; with
    ``beta_loop`` every neighbour is also scored under the flipped sign.
    """
    _check_target(target, data)
    n = data.n
    width = width_for(n, alpha_w) if width is None else width
    if init is None:
        init = init_params(n, alpha_w, stream(cfg.seed, 10), width=width, beta=cfg.beta)
    st = ChainState(init, data)
    m = data.m
    b = m if cfg.batch is None else min(cfg.batch, m)
    n_moves = neighbor_count(n, width, False)
    beta_move = n_moves  # index of the sign flip in the kernel numbering
    correct = np.zeros(n_moves, dtype=np.int64)
    dnorm = np.zeros(n_moves, dtype=np.int64)
    rng = stream(cfg.seed, 12)
    trace = TrainTrace.empty(cfg.steps)
    trace.initial = st.summary()
    thresholds = list(cfg.snapshot_thresholds)
    ti = 0
    streak = 0
    for s in range(cfg.steps):
        batch = st.train_idx if b == m else rng.choice(st.train_idx, size=b, replace=False)
        now = kernels.score_neighbors(st.w1, st.w2, st.pos, st.neg, st.cover, st.pred, st.beta, st.y,
                                      batch, n, False, correct, dnorm)
        cand_correct = [correct]
        cand_norm = [dnorm]
        if cfg.beta_loop:
            cand_correct.append(b - correct)
            cand_norm.append(dnorm)
        if cfg.keep_current:
            cand_correct.append(np.array([now]))
            cand_norm.append(np.array([0]))
        cc = np.concatenate(cand_correct)
        cn = np.concatenate(cand_norm)
        best = cc.max()
        members = np.flatnonzero(cc == best)
        if rng.random() < cfg.p:
            members = members[cn[members] == cn[members].min()]
        pick = int(members[rng.integers(0, members.size)])
        if pick < n_moves:
            kernels.do_move(pick, st.w1, st.w2, st.pos, st.neg, st.cover, st.pred, st.beta, st.y, st.role,
                            st.cnt, n)
        elif cfg.beta_loop and pick < 2 * n_moves:
            kernels.do_move(pick - n_moves, st.w1, st.w2, st.pos, st.neg, st.cover, st.pred, st.beta, st.y,
                            st.role, st.cnt, n)
            kernels.do_move(beta_move, st.w1, st.w2, st.pos, st.neg, st.cover, st.pred, st.beta, st.y,
                            st.role, st.cnt, n)
        trace.loss[s] = 1.0 - best / b
        trace.train_acc[s] = st.train_acc
        trace.test_acc[s] = st.test_acc
        trace.norm_w1[s] = st.cnt[kernels.NW1]
        trace.norm_w2[s] = st.cnt[kernels.NW2]
        step = s + 1
        while ti < len(thresholds) and st.test_acc >= thresholds[ti]:
            trace.snapshots.append(Snapshot(step, st.params(), st.test_acc, f"test_acc>={thresholds[ti]}"))
            ti += 1
        if cfg.snapshot_every and step % cfg.snapshot_every == 0:
            trace.snapshots.append(Snapshot(step, st.params(), st.test_acc, "periodic"))
        streak = streak + 1 if st.cnt[kernels.TRAIN_ERR] == 0 else 0
        if cfg.early_stop and streak >= cfg.early_stop:
            trace.truncate(step)
            break
    return st.params(), trace
