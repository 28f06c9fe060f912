"""Compiled inner loops for the local-search trainers.

Chain state is held in flat arrays so a single-coordinate move can be
scored by touching only the inputs whose prediction changes:

* ``pos``/``neg``: literal masks per hidden row (bit ``n-1-j`` for column j);
* ``cover[x]``: number of active rows (``w2 = 1``) firing on input x;
* ``pred[x]``: network output, ``(cover[x] > 0) xor (beta == -1)``;
* ``role[x]``: 0 train input, 1 test input, 2 neither;
* ``cnt``: ``[train_err, test_err, norm_w1, norm_w2, zero_err_streak]``.

Moves are numbered ``0 .. 2*W*n - 1`` for ``w1`` entries (entry ``u >> 1``,
row-major, taking the lower or upper of its two alternative values),
then ``W`` toggles of ``w2``, then the optional beta flip.
"""

from __future__ import annotations

import numpy as np
from numba import njit

TRAIN_ERR, TEST_ERR, NW1, NW2, STREAK = 0, 1, 2, 3, 4


@njit(cache=True, inline="always")
def _covers(pos, neg, x):
    return (x & pos) == pos and (x & neg) == 0


@njit(cache=True)
def _alt_value(old, which):
    if old == -1:
        return 0 if which == 0 else 1
    if old == 0:
        return -1 if which == 0 else 1
    return -1 if which == 0 else 0


@njit(cache=True)
def propose(u, w1, w2, pos, neg, cover, beta, n, diff):
    """Fill ``diff[x]`` with the change of ``cover[x]`` under move ``u``.

    Returns ``(kind, row, col, new_value, d_norm, changed)`` where kind is
    0 (w1 entry), 1 (w2 toggle) or 2 (beta flip).
    """
    W = w1.shape[0]
    size = cover.shape[0]
    nw1 = 2 * W * n
    if u < nw1:
        e = u >> 1
        i = e // n
        col = e - i * n
        old = w1[i, col]
        new = _alt_value(old, u & 1)
        d_norm = (1 if new != 0 else 0) - (1 if old != 0 else 0)
        if w2[i] == 0:
            return 0, i, col, new, d_norm, False
        bit = np.int64(1) << (n - 1 - col)
        p0 = pos[i]
        q0 = neg[i]
        p1 = (p0 & ~bit) | (bit if new == 1 else 0)
        q1 = (q0 & ~bit) | (bit if new == -1 else 0)
        changed = False
        for x in range(size):
            d = (1 if _covers(p1, q1, x) else 0) - (1 if _covers(p0, q0, x) else 0)
            diff[x] = d
            if d != 0:
                changed = True
        return 0, i, col, new, d_norm, changed
    if u < nw1 + W:
        i = u - nw1
        sign = 1 if w2[i] == 0 else -1
        p0 = pos[i]
        q0 = neg[i]
        for x in range(size):
            diff[x] = sign if _covers(p0, q0, x) else 0
        return 1, i, 0, 0, sign, True
    return 2, 0, 0, 0, 0, True


@njit(cache=True)
def _new_pred(kind, x, cover, diff, beta_neg, pred):
    if kind == 2:
        return 1 - pred[x]
    c = cover[x] + diff[x]
    p = 1 if c > 0 else 0
    return p ^ beta_neg


@njit(cache=True)
def apply_move(kind, i, col, new, d_norm, changed, w1, w2, pos, neg, cover, pred, beta, y, role, cnt, diff, n):
    size = cover.shape[0]
    beta_neg = 1 if beta[0] == -1 else 0
    if changed:
        for x in range(size):
            np_ = _new_pred(kind, x, cover, diff, beta_neg, pred)
            if kind != 2:
                cover[x] += diff[x]
            if np_ != pred[x]:
                was_err = pred[x] != y[x]
                delta = -1 if was_err else 1
                if role[x] == 0:
                    cnt[TRAIN_ERR] += delta
                elif role[x] == 1:
                    cnt[TEST_ERR] += delta
                pred[x] = np_
    if kind == 0:
        old = w1[i, col]
        w1[i, col] = new
        bit = np.int64(1) << (n - 1 - col)
        pos[i] = (pos[i] & ~bit) | (bit if new == 1 else 0)
        neg[i] = (neg[i] & ~bit) | (bit if new == -1 else 0)
        cnt[NW1] += (1 if new != 0 else 0) - (1 if old != 0 else 0)
    elif kind == 1:
        w2[i] = 1 - w2[i]
        cnt[NW2] += d_norm
    else:
        beta[0] = -beta[0]


@njit(cache=True)
def batch_error_delta(kind, cover, diff, pred, y, beta_neg, batch, nb, changed):
    """Change in the number of misclassified batch inputs under a scored move."""
    if not changed:
        return 0
    d = 0
    for j in range(nb):
        x = batch[j]
        np_ = _new_pred(kind, x, cover, diff, beta_neg, pred)
        if np_ != pred[x]:
            d += -1 if pred[x] != y[x] else 1
    return d


@njit(cache=True)
def state_id(w1, w2, beta):
    """Mixed-radix index of a full (w1, w2, beta) state, for small chains."""
    code = 0
    W, n = w1.shape
    for i in range(W):
        for j in range(n):
            code = code * 3 + (w1[i, j] + 1)
    for i in range(W):
        code = code * 2 + w2[i]
    return code * 2 + (1 if beta[0] == -1 else 0)


@njit(cache=True)
def mcmc_run(w1, w2, pos, neg, cover, pred, beta, y, role, cnt, train_idx, perm, b, n, kappa, lam,
             props, us, batch_u, j0, j1, base, out_loss, out_train, out_test, out_nw1, out_nw2,
             stop_test_acc, early_stop, visits, n_test):
    """Run Metropolis-Hastings steps ``j0 .. j1-1`` of the current random-number chunk.

    Returns the chunk offset at which the run stopped (``j1`` unless a
    test-accuracy checkpoint or the early-stop streak fired first).
    """
    size = cover.shape[0]
    diff = np.zeros(size, dtype=np.int32)
    m = train_idx.shape[0]
    full = b >= m
    batch = train_idx if full else perm
    for j in range(j0, j1):
        if not full:
            # partial Fisher-Yates over the working permutation of train indices
            for k in range(b):
                r = k + int(batch_u[j, k] * (m - k))
                if r >= m:
                    r = m - 1
                tmp = perm[k]
                perm[k] = perm[r]
                perm[r] = tmp
        nb = m if full else b
        beta_neg = 1 if beta[0] == -1 else 0
        if full:
            err_old = cnt[TRAIN_ERR]
        else:
            err_old = 0
            for k in range(nb):
                x = batch[k]
                if pred[x] != y[x]:
                    err_old += 1
        kind, i, col, new, d_norm, changed = propose(props[j], w1, w2, pos, neg, cover, beta, n, diff)
        d_err = batch_error_delta(kind, cover, diff, pred, y, beta_neg, batch, nb, changed)
        log_alpha = kappa * (-d_err) / nb - lam * d_norm
        accept = log_alpha >= 0.0 or us[j] < np.exp(log_alpha)
        err_now = err_old
        if accept:
            apply_move(kind, i, col, new, d_norm, changed, w1, w2, pos, neg, cover, pred, beta, y, role,
                       cnt, diff, n)
            err_now = err_old + d_err
        s = base + j
        out_loss[s] = err_now / nb
        out_train[s] = 1.0 - cnt[TRAIN_ERR] / m
        out_test[s] = 1.0 - cnt[TEST_ERR] / n_test if n_test > 0 else 1.0
        out_nw1[s] = cnt[NW1]
        out_nw2[s] = cnt[NW2]
        if visits.shape[0] > 0:
            visits[state_id(w1, w2, beta)] += 1
        if cnt[TRAIN_ERR] == 0:
            cnt[STREAK] += 1
        else:
            cnt[STREAK] = 0
        if early_stop > 0 and cnt[STREAK] >= early_stop:
            return j + 1
        if out_test[s] >= stop_test_acc:
            return j + 1
    return j1


@njit(cache=True)
def score_neighbors(w1, w2, pos, neg, cover, pred, beta, y, batch, n, include_beta, out_correct, out_dnorm):
    """Batch-correct counts and norm changes of every single-coordinate move."""
    size = cover.shape[0]
    diff = np.zeros(size, dtype=np.int32)
    nb = batch.shape[0]
    beta_neg = 1 if beta[0] == -1 else 0
    correct = 0
    for k in range(nb):
        x = batch[k]
        if pred[x] == y[x]:
            correct += 1
    W = w1.shape[0]
    total = 2 * W * n + W + (1 if include_beta else 0)
    for u in range(total):
        kind, i, col, new, d_norm, changed = propose(u, w1, w2, pos, neg, cover, beta, n, diff)
        d_err = batch_error_delta(kind, cover, diff, pred, y, beta_neg, batch, nb, changed)
        out_correct[u] = correct - d_err
        out_dnorm[u] = d_norm
    return correct


@njit(cache=True)
def do_move(u, w1, w2, pos, neg, cover, pred, beta, y, role, cnt, n):
    diff = np.zeros(cover.shape[0], dtype=np.int32)
    kind, i, col, new, d_norm, changed = propose(u, w1, w2, pos, neg, cover, beta, n, diff)
    apply_move(kind, i, col, new, d_norm, changed, w1, w2, pos, neg, cover, pred, beta, y, role, cnt, diff, n)
