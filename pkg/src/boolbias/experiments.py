"""Training runs, restartable sweeps and their aggregation, written as plain files.

A run directory holds ``config.json`` (written first), ``trace.csv``,
``snapshots/`` and ``summary.json`` (written last, so its presence marks a
finished run).
"""

from __future__ import annotations

import itertools
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable

import numpy as np

from . import __version__
from .boolfn import FamilySpec, generate
from .dfcn import export_heatmap, truth_table, width_for
from .io import atomic_write_csv, atomic_write_json
from .training import (TRACE_COLUMNS, GreedyConfig, McmcConfig, accuracy, greedy_train, make_dataset,
                       mcmc_train, oracle_train)

log = logging.getLogger(__name__)

ALGOS = ("mcmc", "greedy", "oracle")
FAMILY_PARAM = {"parity": "k", "sparse": "k", "entropy": "t", "repeat": "length", "constant": "value"}

RUN_DEFAULTS = {
    "algo": "mcmc", "n": 7, "alpha_w": 2, "width": None, "m": 64, "seed": 0,
    "kappa": 1000.0, "lambda": 0.0, "steps": None, "batch": None, "allow_beta": False, "beta": None,
    "early_stop": None, "snapshot_thresholds": [], "snapshot_every": None, "trace_every": 1,
    "p": 0.3, "keep_current": False, "beta_loop": False,
    "objective": "literals", "allow_negation": False,
}
DEFAULT_STEPS = {"mcmc": 200_000, "greedy": 2000, "oracle": 0}


def thread_cap(requested: int | None = None) -> int:
    """Worker count, capped by the BOOLBIAS_THREADS environment variable."""
    want = requested if requested else (os.cpu_count() or 1)
    env = os.environ.get("BOOLBIAS_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValueError(f"BOOLBIAS_THREADS must be an integer, got {env!r}") from None
        if cap < 1:
            raise ValueError("BOOLBIAS_THREADS must be >= 1")
        want = min(want, cap)
    return max(1, want)


def run_config(family: dict, **kw) -> dict:
    """Complete, validated run configuration (JSON-compatible)."""
    unknown = set(kw) - set(RUN_DEFAULTS)
    if unknown:
        raise ValueError(f"unknown run option(s): {sorted(unknown)}")
    rc = dict(RUN_DEFAULTS)
    rc.update({k: v for k, v in kw.items() if v is not None})
    if rc["algo"] not in ALGOS:
        raise ValueError(f"unknown algo {rc['algo']!r}; expected one of {ALGOS}")
    if rc["steps"] is None:
        rc["steps"] = DEFAULT_STEPS[rc["algo"]]
    spec = FamilySpec.from_dict(family)
    spec.validate(rc["n"])
    rc["family"] = spec.to_dict()
    rc["snapshot_thresholds"] = sorted(float(x) for x in rc["snapshot_thresholds"])
    if rc["width"] is None:
        rc["width"] = width_for(rc["n"], rc["alpha_w"])
    if not 0 < rc["m"] < (1 << rc["n"]):
        raise ValueError(f"need 0 < m < 2**n, got m={rc['m']}")
    if rc["trace_every"] < 1:
        raise ValueError("trace_every must be >= 1")
    _algo_config(rc)  # raises on invalid hyperparameters
    return rc


def _algo_config(rc: dict):
    common = dict(steps=rc["steps"], batch=rc["batch"], seed=rc["seed"], beta=rc["beta"],
                  early_stop=rc["early_stop"], snapshot_thresholds=tuple(rc["snapshot_thresholds"]),
                  snapshot_every=rc["snapshot_every"])
    if rc["algo"] == "mcmc":
        return McmcConfig(kappa=rc["kappa"], lam=rc["lambda"], allow_beta=rc["allow_beta"], **common)
    if rc["algo"] == "greedy":
        return GreedyConfig(p=rc["p"], keep_current=rc["keep_current"], beta_loop=rc["beta_loop"], **common)
    return None


def run_dir_name(rc: dict) -> Path:
    spec = FamilySpec.from_dict(rc["family"])
    lam = f"lam{rc['lambda']:g}" if rc["algo"] == "mcmc" else (f"p{rc['p']:g}" if rc["algo"] == "greedy" else
                                                               rc["objective"])
    return Path(rc["algo"]) / f"n{rc['n']}" / spec.label() / f"m{rc['m']}" / lam / f"seed{rc['seed']}"


def _trace_rows(trace, every: int) -> list[tuple]:
    """Every ``every``-th step, always ending with the final step."""
    rows = list(trace.rows(every))
    if len(trace) and (len(trace) - 1) % every:
        rows.append(_row(trace, len(trace) - 1))
    return rows


def _row(trace, s: int) -> tuple:
    return (s + 1, float(trace.loss[s]), float(trace.train_acc[s]), float(trace.test_acc[s]),
            int(trace.norm_w1[s]), int(trace.norm_w2[s]))


def run_single(rc: dict, out_dir: str | os.PathLike) -> dict:
    """Execute one configured run and write its artifacts; returns the summary."""
    out = Path(out_dir)
    meta = {"config": rc, "version": __version__, "seed": rc["seed"]}
    atomic_write_json(out / "config.json", meta)
    spec = FamilySpec.from_dict(rc["family"])
    target = generate(spec, rc["n"])
    data = make_dataset(target, rc["m"], rc["seed"])
    algo = rc["algo"]
    summary = {"algo": algo, "target": target.to_hex(), "train_idx": [int(i) for i in data.train_idx]}
    if algo == "oracle":
        dnf, f = oracle_train(data, rc["objective"], rc["allow_negation"])
        lits = sum(len(c) for c in dnf.clauses)
        final = {"train_acc": accuracy(f, target, data.train_idx), "test_acc": accuracy(f, target, data.test_idx),
                 "norm_w1": lits, "norm_w2": len(dnf.clauses), "norm": lits + len(dnf.clauses), "steps": 0}
        summary.update(final=final, function=f.to_hex(), dnf=str(dnf))
        atomic_write_csv(out / "trace.csv", TRACE_COLUMNS,
                         [(0, 1.0 - final["train_acc"], final["train_acc"], final["test_acc"], lits,
                           len(dnf.clauses))])
    else:
        cfg = _algo_config(rc)
        train = mcmc_train if algo == "mcmc" else greedy_train
        params, trace = train(target, data, rc["alpha_w"], cfg, width=rc["width"])
        atomic_write_csv(out / "trace.csv", TRACE_COLUMNS, _trace_rows(trace, rc["trace_every"]))
        for snap in trace.snapshots:
            tag = "periodic" if snap.reason == "periodic" else "threshold"
            export_heatmap(snap.params, out / "snapshots" / f"{tag}_step{snap.step:08d}.csv", snap.step,
                           snap.test_accuracy, {"reason": snap.reason})
        export_heatmap(params, out / "snapshots" / "final.csv", len(trace), trace.final().get("test_acc"),
                       {"reason": "final"})
        summary.update(initial=trace.initial, final=trace.final(), function=truth_table(params).to_hex(),
                       n_snapshots=len(trace.snapshots))
    summary.update(config=rc, version=__version__, seed=rc["seed"])
    atomic_write_json(out / "summary.json", summary)
    return summary


def is_complete(run_path: str | os.PathLike) -> bool:
    return (Path(run_path) / "summary.json").is_file()


def expand_grid(base: dict, family: str, values: Iterable, ms: Iterable[int], lambdas: Iterable[float],
                seeds: Iterable[int], family_extra: dict | None = None) -> list[dict]:
    """Run configs for every (family value, m, lambda-or-p, seed) cell."""
    key = FAMILY_PARAM[family]
    algo = base.get("algo", "mcmc")
    out = []
    for v, m, lam, s in itertools.product(list(values), list(ms), list(lambdas), list(seeds)):
        fam = {"family": family, key: v, "seed": s, **(family_extra or {})}
        kw = dict(base, m=m, seed=s)
        if algo == "greedy":
            kw["p"] = lam
        else:
            kw["lambda"] = lam
        out.append(run_config(fam, **kw))
    return out


def _worker(args):
    rc, path = args
    try:
        run_single(rc, path)
        return path, None
    except Exception as exc:  # reported per cell, the sweep carries on
        return path, f"{type(exc).__name__}: {exc}"


def run_sweep(configs: list[dict], out_root: str | os.PathLike, workers: int = 1) -> dict:
    """Run every config not already completed under ``out_root``.

    Returns counts of run, skipped and failed cells plus failure messages.
    """
    root = Path(out_root)
    todo = []
    skipped = 0
    for rc in configs:
        path = str(root / run_dir_name(rc))
        if is_complete(path):
            skipped += 1
        else:
            todo.append((rc, path))
    failures = {}
    workers = thread_cap(workers)
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_worker, todo))
    else:
        results = [_worker(t) for t in todo]
    for path, err in results:
        if err:
            failures[path] = err
            log.error("run %s failed: %s", path, err)
    return {"run": len(todo) - len(failures), "skipped": skipped, "failed": len(failures), "failures": failures}


AGG_COLUMNS = ("algo", "family", "k", "t", "length", "n", "m", "lambda", "p", "n_runs", "n_incomplete",
               "mean_train_acc", "sd_train_acc", "mean_test_acc", "sd_test_acc", "mean_norm", "sd_norm")


def _cell_key(rc: dict) -> tuple:
    fam = rc["family"]
    return (rc["algo"], fam["family"], fam.get("k", ""), fam.get("t", ""), fam.get("length", ""), rc["n"],
            rc["m"], rc["lambda"] if rc["algo"] == "mcmc" else "", rc["p"] if rc["algo"] == "greedy" else "")


def _sd(x: list[float]) -> float:
    return float(np.std(x, ddof=1)) if len(x) > 1 else 0.0


def sweep_aggregate(run_dir: str | os.PathLike, out: str | os.PathLike | None = None) -> tuple[Path, list[tuple]]:
    """Per-cell mean and standard deviation of final accuracies and norm.

    Runs with a ``config.json`` but no ``summary.json`` are counted in
    ``n_incomplete`` rather than dropped.
    """
    root = Path(run_dir)
    cells: dict[tuple, dict] = {}
    for cfg_path in sorted(root.rglob("config.json")):
        rc = json.loads(cfg_path.read_text())["config"]
        cell = cells.setdefault(_cell_key(rc), {"train": [], "test": [], "norm": [], "incomplete": 0})
        summ = cfg_path.parent / "summary.json"
        if not summ.is_file():
            cell["incomplete"] += 1
            continue
        fin = json.loads(summ.read_text())["final"]
        cell["train"].append(fin["train_acc"])
        cell["test"].append(fin["test_acc"])
        cell["norm"].append(fin["norm"])
    rows = []
    for key in sorted(cells, key=lambda k: tuple((0, v) if isinstance(v, (int, float)) else (1, str(v))
                                                  for v in k)):
        c = cells[key]
        nr = len(c["test"])
        mean = (lambda x: float(np.mean(x)) if x else "")
        sd = (lambda x: _sd(x) if x else "")
        rows.append(key + (nr, c["incomplete"], mean(c["train"]), sd(c["train"]), mean(c["test"]),
                           sd(c["test"]), mean(c["norm"]), sd(c["norm"])))
    path = Path(out) if out is not None else root / "sweep_summary.csv"
    atomic_write_csv(path, AGG_COLUMNS, rows)
    return path, rows
