"""Parameter-space prior over Boolean functions.

A prior draw picks every row of ``w1`` uniformly from the ``3**n`` ternary
patterns and a fair-coin ``beta``; the function is the OR of the row clauses
(zero rows are inactive), complemented when ``beta = -1``.  Drawing a row as
one uniform clause index is the same distribution as drawing its entries
independently, so the sampler works on clause indices and precomputed clause
truth tables.
"""

from __future__ import annotations

import heapq
import itertools
import math
import os
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..boolfn import BooleanFunction
from ..dfcn import width_for
from ..errors import BudgetExceeded, MemoryBudgetExceeded
from ..rng import stream

DEFAULT_CHUNK = 1 << 18
EXACT_STATE_BITS = 25


@lru_cache(maxsize=None)
def clause_tables(n: int) -> tuple[int, ...]:
    """Truth table (as int) of every ternary row pattern; the all-zero row gives 0."""
    coords = np.indices((3,) * n).reshape(n, -1).T  # 0 -> -1 entry, 1 -> +1 entry, 2 -> 0 entry
    inputs = (np.arange(1 << n)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    out = []
    for row in coords:
        if (row == 2).all():
            out.append(0)
            continue
        ok = np.ones(1 << n, dtype=bool)
        for j, c in enumerate(row):
            if c != 2:
                ok &= inputs[:, j] == c
        out.append(int.from_bytes(np.packbits(ok, bitorder="little").tobytes(), "little"))
    return tuple(out)


def _words(n: int) -> int:
    return max(1, (1 << n) // 64)


def _dtype(n: int):
    size = 1 << n
    if size <= 8:
        return np.uint8
    if size <= 16:
        return np.uint16
    if size <= 32:
        return np.uint32
    return np.uint64


@lru_cache(maxsize=None)
def clause_table_array(n: int) -> np.ndarray:
    """Clause tables as an array of shape ``(3**n, words)`` of unsigned ints."""
    words = _words(n)
    dt = _dtype(n)
    arr = np.zeros((3 ** n, words), dtype=dt)
    mask = (1 << 64) - 1
    for i, t in enumerate(clause_tables(n)):
        for w in range(words):
            arr[i, w] = (t >> (64 * w)) & (mask if words > 1 else (1 << (1 << n)) - 1)
    arr.setflags(write=False)
    return arr


def _full_words(n: int) -> np.ndarray:
    words = _words(n)
    dt = _dtype(n)
    if words == 1:
        return np.array([(1 << (1 << n)) - 1], dtype=dt)
    return np.full(words, np.iinfo(np.uint64).max, dtype=np.uint64)


def _join(row: Sequence[int]) -> int:
    t = 0
    for w, v in enumerate(row):
        t |= int(v) << (64 * w)
    return t


@dataclass
class PriorEstimate:
    """Function counts from sampling (``draws`` samples) or exact enumeration.

    ``counts`` maps truth-table ints to occurrence counts; use
    :meth:`hex_counts` for the hex-keyed view.  For exact estimates
    ``draws`` is the total state count and ``beta_counts`` holds the split by
    output sign.
    """

    n: int
    alpha_w: int
    draws: int
    counts: dict[int, int] = field(default_factory=dict)
    exact: bool = False
    width: int | None = None
    beta_counts: tuple[dict[int, int], dict[int, int]] | None = None
    seed: int | None = None
    chunks: tuple[int, int] | None = None

    def __post_init__(self):
        if self.width is None:
            self.width = width_for(self.n, self.alpha_w)

    def probability(self, f: BooleanFunction | int) -> float:
        t = f.table if isinstance(f, BooleanFunction) else int(f)
        return self.counts.get(t, 0) / self.draws

    def conditional(self, f: BooleanFunction | int, beta: int) -> float:
        """P(f | beta) for exact estimates."""
        if self.beta_counts is None:
            raise ValueError("conditional probabilities need an exact estimate")
        t = f.table if isinstance(f, BooleanFunction) else int(f)
        part = self.beta_counts[0 if beta == 1 else 1]
        return part.get(t, 0) / (self.draws // 2)

    def hex_counts(self) -> dict[str, int]:
        return {BooleanFunction(self.n, t).to_hex(): c for t, c in self.counts.items()}

    def observed(self) -> int:
        return len(self.counts)

    def unobserved(self) -> int:
        return (1 << (1 << self.n)) - len(self.counts)

    def total(self) -> int:
        return sum(self.counts.values())


# ---------------------------------------------------------------------------
# sampling


def _sample_chunk(n: int, width: int, size: int, rng: np.random.Generator) -> np.ndarray:
    tables = clause_table_array(n)
    k = 3 ** n
    idx = rng.integers(0, k, size=(size, width), dtype=np.int32 if k < 2 ** 31 else np.int64)
    beta_neg = rng.integers(0, 2, size=size, dtype=np.uint8).astype(bool)
    out = np.bitwise_or.reduce(tables[idx], axis=1)  # (size, words)
    out[beta_neg] ^= _full_words(n)
    return out


class _Counter:
    """Count accumulator: dense array for n <= 4, dict otherwise, optional disk spill."""

    def __init__(self, n: int, cap: int | None, spill_dir: str | os.PathLike | None):
        self.n = n
        self.dense = np.zeros(1 << (1 << n), dtype=np.int64) if n <= 4 else None
        self.map: dict[int, int] = {}
        self.cap = cap
        self.spill_dir = Path(spill_dir) if spill_dir is not None else None
        self.spills: list[Path] = []

    def add(self, chunk: np.ndarray) -> None:
        if self.dense is not None:
            self.dense += np.bincount(chunk[:, 0].astype(np.int64), minlength=self.dense.size)
            return
        if chunk.shape[1] == 1:
            keys, cnt = np.unique(chunk[:, 0], return_counts=True)
            m = self.map
            for key, c in zip(keys.tolist(), cnt.tolist()):
                m[key] = m.get(key, 0) + c
        else:
            keys, cnt = np.unique(chunk, axis=0, return_counts=True)
            m = self.map
            for row, c in zip(keys, cnt.tolist()):
                key = _join(row)
                m[key] = m.get(key, 0) + c
        if self.cap is not None and len(self.map) > self.cap:
            if self.spill_dir is None:
                raise MemoryBudgetExceeded(
                    f"{len(self.map)} distinct functions exceed the cap of {self.cap}; "
                    "raise the cap or pass a spill directory")
            self._spill()

    def _spill(self) -> None:
        self.spill_dir.mkdir(parents=True, exist_ok=True)
        fd, name = tempfile.mkstemp(prefix="spill_", suffix=".txt", dir=self.spill_dir)
        with os.fdopen(fd, "w") as fh:
            for key in sorted(self.map):
                fh.write(f"{key:x} {self.map[key]}\n")
        self.spills.append(Path(name))
        self.map = {}

    def result(self) -> dict[int, int]:
        if self.dense is not None:
            nz = np.flatnonzero(self.dense)
            return dict(zip(nz.tolist(), self.dense[nz].tolist()))
        if not self.spills:
            return self.map
        self._spill()
        merged: dict[int, int] = {}
        streams = [((int(a, 16), int(b)) for a, b in (line.split() for line in open(p))) for p in self.spills]
        for key, group in itertools.groupby(heapq.merge(*streams), key=lambda kv: kv[0]):
            merged[key] = sum(c for _, c in group)
        for p in self.spills:
            p.unlink()
        return merged


def plan_chunks(draws: int, chunk_size: int = DEFAULT_CHUNK) -> list[tuple[int, int]]:
    """(chunk index, size) pairs covering ``draws``; chunk ``c`` always uses stream (seed, c)."""
    if draws < 1:
        raise ValueError("draws must be >= 1")
    full, rest = divmod(int(draws), chunk_size)
    plan = [(c, chunk_size) for c in range(full)]
    if rest:
        plan.append((full, rest))
    return plan


def split_plan(plan: list[tuple[int, int]], parts: int) -> list[list[tuple[int, int]]]:
    """Contiguous near-equal slices of a chunk plan, one per worker."""
    parts = max(1, min(parts, len(plan)))
    bounds = np.linspace(0, len(plan), parts + 1).round().astype(int)
    return [plan[a:b] for a, b in zip(bounds[:-1], bounds[1:])]


def _run_plan(n, alpha_w, width, seed, plan, cap, spill_dir, top_k) -> PriorEstimate:
    counter = _Counter(n, cap, spill_dir)
    for c, size in plan:
        counter.add(_sample_chunk(n, width, size, stream(seed, c)))
    counts = counter.result()
    if top_k is not None and len(counts) > top_k:
        keep = heapq.nlargest(top_k, counts.items(), key=lambda kv: (kv[1], -kv[0]))
        counts = dict(keep)
    span = (plan[0][0], plan[-1][0] + 1) if plan else None
    return PriorEstimate(n, alpha_w, sum(s for _, s in plan), counts, width=width, seed=seed, chunks=span)


def sample_prior(n: int, alpha_w: int = 1, draws: int = 10 ** 6, seed: int = 0, *,
                 width: int | None = None, chunk_size: int = DEFAULT_CHUNK,
                 chunks: Iterable[int] | None = None, workers: int = 1,
                 cap: int | None = None, spill_dir=None, top_k: int | None = None) -> PriorEstimate:
    """Monte Carlo prior estimate.

    Results depend only on ``(seed, chunk_size)`` and the chunk indices
    processed, never on ``workers``.  ``chunks`` restricts the run to a subset
    of the global plan so separate jobs can be merged with :func:`merge`.
    """
    width = width_for(n, alpha_w) if width is None else width
    plan = plan_chunks(draws, chunk_size)
    if chunks is not None:
        wanted = set(chunks)
        plan = [pc for pc in plan if pc[0] in wanted]
    if workers > 1 and len(plan) > 1:
        from concurrent.futures import ProcessPoolExecutor

        parts = split_plan(plan, workers)
        with ProcessPoolExecutor(max_workers=len(parts)) as ex:
            futs = [ex.submit(_run_plan, n, alpha_w, width, seed, part, cap, spill_dir, None) for part in parts]
            est = merge(*(f.result() for f in futs))
        if top_k is not None and len(est.counts) > top_k:
            est.counts = dict(heapq.nlargest(top_k, est.counts.items(), key=lambda kv: (kv[1], -kv[0])))
        return est
    return _run_plan(n, alpha_w, width, seed, plan, cap, spill_dir, top_k)


def merge(*parts: PriorEstimate) -> PriorEstimate:
    """Sum counts of independent sampling runs over the same (n, width)."""
    if not parts:
        raise ValueError("nothing to merge")
    first = parts[0]
    counts: dict[int, int] = {}
    for p in parts:
        if (p.n, p.width) != (first.n, first.width):
            raise ValueError("cannot merge estimates of different shapes")
        for k, c in p.counts.items():
            counts[k] = counts.get(k, 0) + c
    return PriorEstimate(first.n, first.alpha_w, sum(p.draws for p in parts), counts,
                         width=first.width, seed=first.seed)


# ---------------------------------------------------------------------------
# exact prior


def _or_convolve(n: int, width: int) -> np.ndarray:
    """Counts, per truth table, of clause-index tuples whose OR is that table (beta = +1)."""
    size = 1 << (1 << n)
    big = n * width * math.log2(3) >= 62
    if big and size > 256:
        raise BudgetExceeded(f"exact prior counts for n={n}, width={width} overflow 64-bit storage")
    dtype = object if big else np.int64
    h = np.zeros(size, dtype=dtype)
    for t in clause_tables(n):
        h[t] += 1
    support = np.flatnonzero(h)
    funcs = np.arange(size, dtype=np.int64)
    d = np.zeros(size, dtype=dtype)
    d[0] = 1
    for _ in range(width):
        new = np.zeros(size, dtype=dtype)
        live = np.flatnonzero(d)
        for b in support:
            np.add.at(new, funcs[live] | b, d[live] * h[b])
        d = new
    return d


def _enumerate(n: int, width: int) -> np.ndarray:
    """Same counts by walking every clause-index tuple (small spaces only)."""
    tabs = np.array(clause_tables(n), dtype=np.int64)
    k = len(tabs)
    total = k ** width
    out = np.zeros(1 << (1 << n), dtype=np.int64)
    step = 1 << 16
    for start in range(0, total, step):
        ids = np.arange(start, min(total, start + step), dtype=np.int64)
        acc = np.zeros(ids.size, dtype=np.int64)
        for _ in range(width):
            ids, r = np.divmod(ids, k)
            acc |= tabs[r]
        out += np.bincount(acc, minlength=out.size)
    return out


def exact_prior(n: int, alpha_w: int = 1, width: int | None = None, method: str = "convolve") -> PriorEstimate:
    """Exact state counts over all ``2 * 3**(n*width)`` (w1, beta) settings.

    ``method="convolve"`` folds the clause histogram ``width`` times under OR
    and handles function spaces up to ``2**16`` (n <= 4).  ``"enumerate"``
    visits every state and is limited to about ``2**25`` states.
    """
    width = width_for(n, alpha_w) if width is None else width
    if n > 4:
        raise BudgetExceeded(f"exact prior is limited to n <= 4, got n={n}")
    if method == "enumerate":
        bits = n * width * math.log2(3) + 1
        if bits > EXACT_STATE_BITS:
            raise BudgetExceeded(f"state space of ~2^{bits:.1f} exceeds the enumeration budget")
        pos = _enumerate(n, width)
    elif method == "convolve":
        pos = _or_convolve(n, width)
    else:
        raise ValueError(f"unknown method {method!r}")
    full = (1 << (1 << n)) - 1
    neg = pos[full ^ np.arange(pos.size)]
    pos_map = {int(t): int(pos[t]) for t in np.flatnonzero(pos)}
    neg_map = {int(t): int(neg[t]) for t in np.flatnonzero(neg)}
    tot = pos + neg
    counts = {int(t): int(tot[t]) for t in np.flatnonzero(tot)}
    states = 2 * 3 ** (n * width)
    assert sum(counts.values()) == states
    return PriorEstimate(n, alpha_w, states, counts, exact=True, width=width, beta_counts=(pos_map, neg_map))


# ---------------------------------------------------------------------------
# rank table


def zipf_reference(n: int, rank) -> np.ndarray | float:
    return 1.0 / ((1 << n) * math.log(2) * np.asarray(rank, dtype=float)) if np.ndim(rank) else \
        1.0 / ((1 << n) * math.log(2) * rank)


@dataclass(frozen=True)
class RankRow:
    rank: int
    function: str
    count: int
    p_hat: float
    k_dnf: int | None
    zipf_ref: float


def rank_table(est: PriorEstimate, with_k_dnf: bool = True) -> list[RankRow]:
    """Functions by descending count (ties by function string), with the Zipf reference."""
    from ..complexity import k_dnf, k_dnf_table

    table = k_dnf_table(est.n, "literals") if (with_k_dnf and est.n <= 4) else None
    items = [(c, BooleanFunction(est.n, t).to_string(), t) for t, c in est.counts.items()]
    items.sort(key=lambda x: (-x[0], x[1]))
    rows = []
    for r, (c, s, t) in enumerate(items, start=1):
        if not with_k_dnf:
            kd = None
        elif table is not None:
            kd = int(table[t])
        else:
            kd = k_dnf(BooleanFunction(est.n, t))
        rows.append(RankRow(r, BooleanFunction(est.n, t).to_hex(), c, c / est.draws, kd,
                            zipf_reference(est.n, r)))
    return rows
