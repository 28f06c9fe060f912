"""Metropolis-Hastings training over single-coordinate moves."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..boolfn import BooleanFunction
from ..dfcn import DfcnParams, init_params, neighbor_count, width_for
from ..rng import stream
from . import kernels
from .dataset import Dataset
from .state import ChainState
from .trace import Snapshot, TrainTrace

CHUNK = 1 << 16


@dataclass(frozen=True)
class McmcConfig:
    kappa: float = 1000.0
    lam: float = 0.0
    steps: int = 200_000
    batch: int | None = None
    seed: int = 0
    allow_beta: bool = False
    beta: int | None = None
    early_stop: int | None = None
    snapshot_thresholds: tuple[float, ...] = ()
    snapshot_every: int | None = None

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if not self.lam >= 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
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


def _check_target(target: BooleanFunction | None, data: Dataset) -> None:
    if target is not None and target != data.target:
        raise ValueError("target does not match the dataset's target")


def mcmc_train(target: BooleanFunction | None, data: Dataset, alpha_w: int = 1, cfg: McmcConfig = McmcConfig(),
               *, width: int | None = None, init: DfcnParams | None = None,
               record_visits: bool = False) -> tuple[DfcnParams, TrainTrace]:
    """Run the chain for ``cfg.steps`` steps (fewer on early stop); return the last state.

    Acceptance is ``min(1, exp(kappa (L_old - L_new) + lam (|theta_old| - |theta_new|)))``
    with ``L`` the batch misclassification rate and ``|theta|`` the count
    of nonzero weights.  With ``record_visits`` the trace gains a
    ``visits`` array indexed by :func:`kernels.state_id` (tiny chains only).
    """
    _check_target(target, data)
    n = data.n
    width = width_for(n, alpha_w) if width is None else width
    if init is None:
        init = init_params(n, alpha_w, stream(cfg.seed, 10), width=width, beta=cfg.beta)
    st = ChainState(init, data)
    m = data.m
    b = m if cfg.batch is None else min(cfg.batch, m)
    minibatch = b < m
    n_moves = neighbor_count(n, width, cfg.allow_beta)
    visits = np.zeros(0, dtype=np.int64)
    if record_visits:
        space = 2 * 3 ** (width * n) * 2 ** width
        if space > 1 << 24:
            raise ValueError("state visit counting is limited to tiny chains")
        visits = np.zeros(space, dtype=np.int64)
    trace = TrainTrace.empty(cfg.steps)
    trace.initial = st.summary()
    rng = stream(cfg.seed, 11)
    perm = st.train_idx.copy()
    thresholds = list(cfg.snapshot_thresholds)
    ti = 0
    while ti < len(thresholds) and st.test_acc >= thresholds[ti]:
        trace.snapshots.append(Snapshot(0, st.params(), st.test_acc, f"test_acc>={thresholds[ti]}"))
        ti += 1
    early = cfg.early_stop or 0
    done = 0
    stopped = False
    while done < cfg.steps and not stopped:
        size = min(CHUNK, cfg.steps - done)
        props = rng.integers(0, n_moves, size=size, dtype=np.int64)
        us = rng.random(size)
        batch_u = rng.random((size, b)) if minibatch else np.zeros((0, 0))
        j = 0
        while j < size:
            stop_acc = thresholds[ti] if ti < len(thresholds) else math.inf
            j1 = size
            if cfg.snapshot_every:
                nxt = ((done + j) // cfg.snapshot_every + 1) * cfg.snapshot_every - done
                j1 = min(j1, nxt)
            j = kernels.mcmc_run(st.w1, st.w2, st.pos, st.neg, st.cover, st.pred, st.beta, st.y, st.role,
                                 st.cnt, st.train_idx, perm, b, n, float(cfg.kappa), float(cfg.lam),
                                 props, us, batch_u, j, j1, done, trace.loss, trace.train_acc,
                                 trace.test_acc, trace.norm_w1, trace.norm_w2, stop_acc, early, visits,
                                 st.n_test)
            step = done + j
            while ti < len(thresholds) and st.test_acc >= thresholds[ti]:
                trace.snapshots.append(Snapshot(step, st.params(), st.test_acc, f"test_acc>={thresholds[ti]}"))
                ti += 1
            if cfg.snapshot_every and step % cfg.snapshot_every == 0:
                trace.snapshots.append(Snapshot(step, st.params(), st.test_acc, "periodic"))
            if early and st.cnt[kernels.STREAK] >= early:
                trace.truncate(step)
                stopped = True
                break
        done += j
    if record_visits:
        trace.visits = visits
    return st.params(), trace


def chain_state_index(p: DfcnParams) -> int:
    return int(kernels.state_id(np.asarray(p.w1), np.asarray(p.w2), np.array([p.beta], dtype=np.int64)))
