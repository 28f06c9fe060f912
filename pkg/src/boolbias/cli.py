"""Command-line front end: ``boolbias <command> [flags]``.

Exit codes: 0 success, 1 one or more sweep cells failed, 2 invalid
configuration, 3 computational budget exceeded, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path


from . import __version__
from .boolfn import BooleanFunction, FamilySpec, generate, parse_function
from .errors import BudgetExceeded
from .io import atomic_write_csv, atomic_write_json

log = logging.getLogger("boolbias")

EXIT_OK, EXIT_FAILED_RUNS, EXIT_CONFIG, EXIT_BUDGET, EXIT_IO = 0, 1, 2, 3, 4
PRIOR_COLUMNS = ("function_hex", "count", "p_hat", "k_dnf", "k_theta", "k_clause", "k_lz", "rank", "zipf_ref")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# argument types

def count(text: str) -> int:
    """Non-negative integer, also accepting exact float notation such as ``1e8``."""
    try:
        v = int(text)
    except ValueError:
        f = float(text)
        if not f.is_integer():
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        v = int(f)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return v


def int_list(text: str) -> list[int]:
    """``"1..7"``, ``"16,32,64"`` or a mix such as ``"1..3,7"``."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise argparse.ArgumentTypeError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def float_list(text: str) -> list[float]:
    vals = [float(p) for p in str(text).split(",") if p.strip()]
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def subset(text: str) -> tuple[int, ...]:
    return tuple(int_list(text))


# ---------------------------------------------------------------------------
# parser

def _family_args(p: argparse.ArgumentParser, multi: bool = False) -> None:
    g = p.add_argument_group("target function")
    g.add_argument("--family", default="parity", choices=("constant", "parity", "entropy", "repeat", "sparse"))
    t = int_list if multi else int
    g.add_argument("--k", type=t, help="parity order or sparse support size" + (" (list or a..b)" if multi else ""))
    g.add_argument("--t", type=t, help="number of true outputs for the entropy family")
    g.add_argument("--length", type=t, help="tile length for the repeat family")
    g.add_argument("--value", type=int, choices=(0, 1), help="constant family output")
    g.add_argument("--pattern", help="explicit tile for the repeat family")
    g.add_argument("--subset", type=subset, help="explicit parity variables, 1-based")
    g.add_argument("--subset-mode", default="random", choices=("random", "first"))


def _train_args(p: argparse.ArgumentParser, sweep: bool) -> None:
    p.add_argument("--algo", default="mcmc", choices=("mcmc", "greedy", "oracle"))
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--alpha-w", type=int, default=2)
    p.add_argument("--width", type=int)
    if sweep:
        p.add_argument("--m", type=int_list, default=[16, 32, 64, 96])
        p.add_argument("--lambda", dest="lam", type=float_list, default=[0.0])
        p.add_argument("--p", type=float_list, default=[0.3], help="greedy min-norm probability")
    else:
        p.add_argument("--m", type=int, default=64)
        p.add_argument("--lambda", dest="lam", type=float, default=0.0)
        p.add_argument("--p", type=float, default=0.3, help="greedy min-norm probability")
    p.add_argument("--kappa", type=float, default=1000.0)
    p.add_argument("--steps", type=count, help="default 200000 for mcmc, 2000 for greedy")
    p.add_argument("--batch", type=int)
    p.add_argument("--seeds", type=int, default=1, help="number of seeds")
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--allow-beta", action="store_true", help="include the output-sign flip in the chain")
    p.add_argument("--beta", type=int, choices=(1, -1), help="fix the initial output sign")
    p.add_argument("--early-stop", type=int, help="stop after this many steps at zero training error")
    p.add_argument("--snapshot-thresholds", type=float_list, default=[])
    p.add_argument("--snapshot-every", type=int)
    p.add_argument("--trace-every", type=int, help="write every k-th trace row (default 1, sweeps 100)")
    p.add_argument("--keep-current", action="store_true", help="greedy: current state competes with neighbours")
    p.add_argument("--beta-loop", action="store_true", help="greedy: also score neighbours under flipped sign")
    p.add_argument("--objective", default="literals", choices=("literals", "clauses", "literals_plus_clauses"))
    p.add_argument("--allow-negation", action="store_true", help="oracle: minimise both output polarities")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="runs")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="boolbias", description="Simplicity-bias experiments for discrete networks")
    ap.add_argument("--version", action="version", version=f"boolbias {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON file whose keys override the flags")
        p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
        return p

    p = add("prior", "function distribution of randomly initialised networks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha-w", type=int, default=1)
    p.add_argument("--width", type=int)
    p.add_argument("--draws", type=count, default=10 ** 6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="exhaustive instead of sampled")
    p.add_argument("--method", default="convolve", choices=("convolve", "enumerate"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chunk-size", type=count, default=1 << 18)
    p.add_argument("--cap", type=count, help="maximum distinct functions held in memory")
    p.add_argument("--spill-dir", help="spill counts here instead of failing when --cap is hit")
    p.add_argument("--top-k", type=count)
    p.add_argument("--measure-top", type=count, default=200,
                   help="for n > 4, DNF measures only for this many top-ranked rows")
    p.add_argument("--out", default="prior.csv")

    p = add("complexity", "complexity measures of one function")
    p.add_argument("--fn", required=True, help="truth-table string or hex (hex needs --n)")
    p.add_argument("--n", type=int)
    p.add_argument("--measure", default="all", choices=("all", "dnf", "theta", "clause", "lz"))
    p.add_argument("--out")

    p = add("bounds", "analytic bounds on function probabilities")
    p.add_argument("--family", required=True, choices=("parity", "constant", "1entropy", "entropy", "ksparse"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--alpha-w", type=int, default=1)
    p.add_argument("--out")

    p = add("train", "train networks on a target function")
    _family_args(p)
    _train_args(p, sweep=False)

    p = add("sweep", "grid of training runs plus the aggregate table")
    _family_args(p, multi=True)
    _train_args(p, sweep=True)

    p = add("tilt", "exact weight-decay posterior tilt against DNF complexity")
    _family_args(p)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--alpha-w", type=int, default=1)
    p.add_argument("--width", type=int)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--lambda", dest="lam", type=float, default=0.1)
    p.add_argument("--space", default="chain", choices=("chain", "prior"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = add("aggregate", "summarise a sweep directory")
    p.add_argument("run_dir")
    p.add_argument("--out")
    return ap


def _apply_config(parser: argparse.ArgumentParser, ns: argparse.Namespace) -> None:
    """Override parsed flags with the keys of ``ns.config`` (dashes or underscores)."""
    try:
        data = json.loads(Path(ns.config).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    sub = parser._subparsers._group_actions[0].choices[ns.command]
    actions = {a.dest: a for a in sub._actions}
    alias = {"lambda": "lam"}
    for key, value in data.items():
        dest = alias.get(key.replace("-", "_"), key.replace("-", "_"))
        if dest in ("command", "config") or dest not in actions:
            raise ConfigError(f"unknown key {key!r} for command {ns.command!r}")
        act = actions[dest]
        if isinstance(act, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            if not isinstance(value, bool):
                raise ConfigError(f"{key!r} must be true or false")
        elif value is not None and act.type is not None:
            text = ",".join(map(str, value)) if isinstance(value, list) else str(value)
            try:
                value = act.type(text)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"bad value for {key!r}: {exc}") from None
        if act.choices is not None and value is not None and value not in act.choices:
            raise ConfigError(f"{key!r} must be one of {list(act.choices)}")
        setattr(ns, dest, value)


def _echo(ns: argparse.Namespace) -> dict:
    d = {k: v for k, v in vars(ns).items() if k not in ("func", "verbose")}
    return json.loads(json.dumps(d, default=list))


def _meta(ns) -> dict:
    return {"config": _echo(ns), "version": __version__, "seed": getattr(ns, "seed", None)}


def _emit(obj: dict, out: str | None) -> None:
    if out:
        atomic_write_json(out, obj)
    print(json.dumps(obj, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# commands

def cmd_prior(ns) -> int:
    from .complexity import k_dnf_table, k_lz
    from .prior import exact_prior, rank_table, sample_prior
    from .experiments import thread_cap

    if ns.n < 1 or ns.alpha_w < 1:
        raise ConfigError("need n >= 1 and alpha_w >= 1")
    if not ns.exact and ns.draws < 1:
        raise ConfigError("draws must be >= 1")
    if ns.spill_dir and ns.cap is None:
        raise ConfigError("--spill-dir needs --cap")
    if ns.exact:
        est = exact_prior(ns.n, ns.alpha_w, ns.width, ns.method)
    else:
        est = sample_prior(ns.n, ns.alpha_w, ns.draws, ns.seed, width=ns.width, chunk_size=ns.chunk_size,
                           workers=thread_cap(ns.workers), cap=ns.cap, spill_dir=ns.spill_dir, top_k=ns.top_k)
    rows = rank_table(est, with_k_dnf=False)
    n = ns.n
    tables = {obj: k_dnf_table(n, obj) for obj in ("literals", "literals_plus_clauses", "clauses")} \
        if n <= 4 else None
    out_rows = []
    for r in rows:
        f = BooleanFunction.from_hex(r.function, n)
        if tables is not None:
            kd, kt, kc = (int(tables[o][f.table]) for o in ("literals", "literals_plus_clauses", "clauses"))
            kc *= 2
        elif r.rank <= ns.measure_top:
            from .complexity import k_clause, k_dnf, k_theta
            kd, kt, kc = k_dnf(f), k_theta(f), k_clause(f)
        else:
            kd = kt = kc = ""
        out_rows.append((r.function, r.count, repr(r.p_hat), kd, kt, kc, repr(k_lz(f.to_string())), r.rank,
                         repr(float(r.zipf_ref))))
    atomic_write_csv(ns.out, PRIOR_COLUMNS, out_rows)
    meta = _meta(ns)
    meta.update(n=n, alpha_w=ns.alpha_w, width=est.width, exact=est.exact, total=int(est.draws),
                observed=est.observed(), unobserved=est.unobserved(), rows=len(out_rows))
    atomic_write_json(f"{ns.out}.meta.json", meta)
    print(json.dumps({k: meta[k] for k in ("n", "alpha_w", "exact", "total", "observed", "unobserved")}))
    return EXIT_OK


def cmd_complexity(ns) -> int:
    from .complexity import k_clause, k_dnf, k_lz, k_theta, MinDnfRequest, min_dnf

    try:
        f = parse_function(ns.fn, ns.n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    res = {"function": f.to_string(), "function_hex": f.to_hex(), "n": f.n}
    m = ns.measure
    if m in ("all", "dnf"):
        res["k_dnf"] = k_dnf(f)
        res["min_dnf"] = str(min_dnf(MinDnfRequest.from_function(f), "literals"))
    if m in ("all", "theta"):
        res["k_theta"] = k_theta(f)
    if m in ("all", "clause"):
        res["k_clause"] = k_clause(f)
    if m in ("all", "lz"):
        res["k_lz"] = k_lz(f.to_string())
    if m == "all":
        from .complexity import sandwich_holds
        res["sandwich_holds"] = sandwich_holds(f.n, res["k_dnf"], res["k_theta"], res["k_clause"])
    res["meta"] = _meta(ns)
    _emit(res, ns.out)
    return EXIT_OK


def cmd_bounds(ns) -> int:
    from .prior import (BoundParams, bound_1entropy, bound_constant, bound_entropy_upper, bound_ksparse,
                        bound_parity)

    bp = BoundParams(ns.n, ns.alpha_w, ns.k, ns.t)
    fn = {"parity": bound_parity, "constant": bound_constant, "1entropy": bound_1entropy,
          "entropy": bound_entropy_upper, "ksparse": bound_ksparse}[ns.family]
    b = fn(bp)
    res = {"family": ns.family, "n": ns.n, "alpha_w": ns.alpha_w, "k": ns.k, "t": ns.t, "M": bp.M, "N": bp.N}
    res.update(b.to_dict())
    res["meta"] = _meta(ns)
    _emit(res, ns.out)
    return EXIT_OK


def _family_dict(ns, value=None) -> dict:
    fam = ns.family
    d = {"family": fam, "seed": 0}
    key = {"parity": "k", "sparse": "k", "entropy": "t", "repeat": "length", "constant": "value"}[fam]
    for k in ("k", "t", "length", "value", "pattern", "subset"):
        v = getattr(ns, k, None)
        if v is not None:
            d[k] = list(v) if k == "subset" else v
    if value is not None:
        d[key] = value
    if fam == "parity":
        d["subset_mode"] = ns.subset_mode
    return d


def _run_kwargs(ns, trace_default: int) -> dict:
    return dict(algo=ns.algo, n=ns.n, alpha_w=ns.alpha_w, width=ns.width, kappa=ns.kappa, steps=ns.steps,
                batch=ns.batch, allow_beta=ns.allow_beta, beta=ns.beta, early_stop=ns.early_stop,
                snapshot_thresholds=ns.snapshot_thresholds, snapshot_every=ns.snapshot_every,
                trace_every=ns.trace_every or trace_default, keep_current=ns.keep_current,
                beta_loop=ns.beta_loop, objective=ns.objective, allow_negation=ns.allow_negation)


def _seeds(ns) -> range:
    if ns.seeds < 1:
        raise ConfigError("--seeds must be >= 1")
    return range(ns.seed, ns.seed + ns.seeds)


def _report_sweep(res: dict) -> int:
    print(json.dumps({k: res[k] for k in ("run", "skipped", "failed")}))
    for path, err in res["failures"].items():
        print(f"FAILED {path}: {err}", file=sys.stderr)
    return EXIT_FAILED_RUNS if res["failed"] else EXIT_OK


def cmd_train(ns) -> int:
    from .experiments import run_config, run_sweep, run_dir_name

    configs = []
    for s in _seeds(ns):
        fam = _family_dict(ns)
        fam["seed"] = s
        kw = _run_kwargs(ns, 1)
        kw.update(m=ns.m, seed=s, p=ns.p)
        kw["lambda"] = ns.lam
        configs.append(run_config(fam, **kw))
    res = run_sweep(configs, ns.out, ns.workers)
    for rc in configs:
        summ = Path(ns.out) / run_dir_name(rc) / "summary.json"
        if summ.is_file():
            fin = json.loads(summ.read_text())["final"]
            log.info("%s: test_acc=%.4f norm=%s", run_dir_name(rc), fin["test_acc"], fin["norm"])
    return _report_sweep(res)


def cmd_sweep(ns) -> int:
    from .experiments import FAMILY_PARAM, expand_grid, run_sweep, sweep_aggregate

    key = FAMILY_PARAM[ns.family]
    values = getattr(ns, key)
    if values is None:
        raise ConfigError(f"--{key} is required for the {ns.family} family")
    if not isinstance(values, list):
        values = [values]
    extra = _family_dict(ns)
    for k in ("family", "seed", key):
        extra.pop(k, None)
    base = _run_kwargs(ns, 100)
    knobs = ns.p if ns.algo == "greedy" else (ns.lam if ns.algo == "mcmc" else [0.0])
    configs = expand_grid(base, ns.family, values, ns.m, knobs, _seeds(ns), extra)
    res = run_sweep(configs, ns.out, ns.workers)
    path, rows = sweep_aggregate(ns.out)
    log.info("aggregate written to %s (%d cells)", path, len(rows))
    return _report_sweep(res)


def cmd_tilt(ns) -> int:
    from .training import make_dataset, posterior_tilt_check

    fam = _family_dict(ns)
    if fam["family"] == "parity" and "k" not in fam and "subset" not in fam:
        fam["k"] = ns.n
    fam["seed"] = ns.seed
    spec = FamilySpec.from_dict(fam)
    target = generate(spec, ns.n)
    data = make_dataset(target, ns.m, ns.seed)
    r = posterior_tilt_check(target, data, ns.alpha_w, ns.lam, ns.space, ns.width)
    res = r.to_dict()
    res["spearman"] = None if math.isnan(r.correlation) else r.correlation
    res["target"] = target.to_string()
    res["train_idx"] = [int(i) for i in data.train_idx]
    res["functions"] = [{"function": format(int(f), f"0{1 << ns.n}b")[::-1], "k_dnf": int(k), "log_ratio": float(lr)}
                        for f, k, lr in zip(r.functions, r.k_dnf, r.log_ratio)]
    res["meta"] = _meta(ns)
    _emit(res, ns.out)
    return EXIT_OK


def cmd_aggregate(ns) -> int:
    from .experiments import sweep_aggregate

    if not Path(ns.run_dir).is_dir():
        raise FileNotFoundError(f"no such run directory: {ns.run_dir}")
    path, rows = sweep_aggregate(ns.run_dir, ns.out)
    incomplete = sum(r[10] for r in rows)
    print(json.dumps({"out": str(path), "cells": len(rows), "incomplete_runs": incomplete}))
    if incomplete:
        print(f"warning: {incomplete} incomplete run(s) in {ns.run_dir}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {"prior": cmd_prior, "complexity": cmd_complexity, "bounds": cmd_bounds, "train": cmd_train,
            "sweep": cmd_sweep, "tilt": cmd_tilt, "aggregate": cmd_aggregate}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if getattr(ns, "config", None):
            _apply_config(parser, ns)
        return COMMANDS[ns.command](ns)
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError, KeyError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
