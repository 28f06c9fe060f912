import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolbias import BooleanFunction, FamilySpec, generate
from boolbias.dfcn import DfcnParams, init_params, neighbors, truth_table
from boolbias.training import (GreedyConfig, McmcConfig, accuracy, dataset_from_indices,
                               greedy_train, loss, make_dataset, mcmc_train, oracle_train,
                               posterior_tilt_check)
from boolbias.training import kernels
from boolbias.training.state import ChainState

from oracles import exact_chain_distribution, min_literal_table


def parity(n, k, seed=0):
    return generate(FamilySpec("parity", k=k, seed=seed), n)


class TestDataset:
    def test_split_sizes_and_partition(self):
        t = parity(5, 2)
        d = make_dataset(t, 12, seed=3)
        assert d.m == 12 and d.test_idx.size == 20
        assert sorted(np.concatenate([d.train_idx, d.test_idx]).tolist()) == list(range(32))

    def test_seed_determinism(self):
        t = parity(5, 2)
        a, b, c = make_dataset(t, 10, 1), make_dataset(t, 10, 1), make_dataset(t, 10, 2)
        assert np.array_equal(a.train_idx, b.train_idx)
        assert not np.array_equal(a.train_idx, c.train_idx)

    def test_bad_m(self):
        t = parity(3, 1)
        for m in (0, 8, 9):
            with pytest.raises(ValueError):
                make_dataset(t, m)

    def test_duplicate_indices_rejected(self):
        with pytest.raises(ValueError):
            dataset_from_indices(parity(3, 1), [1, 1])

    def test_accuracy_and_loss(self):
        t = BooleanFunction.from_string("0110")
        pred = BooleanFunction.from_string("0111")
        assert accuracy(pred, t, [0, 1, 2, 3]) == 0.75
        assert accuracy(pred, t, [3]) == 0.0
        d = dataset_from_indices(t, [0, 1])
        p = DfcnParams(2, np.zeros((2, 2), dtype=np.int8), np.zeros(2, dtype=np.int8), 1)  # constant 0
        assert loss(p, d, [0, 1, 2, 3]) == 0.5
        assert loss(p, d, d.train_idx) == 0.5
        with pytest.raises(ValueError):
            accuracy(pred, t, [])


class TestOracle:
    def test_four_parity_worked_cases(self):
        t = parity(4, 4)
        _, f4 = oracle_train(dataset_from_indices(t, range(4)))
        _, f8 = oracle_train(d8 := dataset_from_indices(t, range(8)))
        assert str(f4) == "0110011001100110"
        assert str(f8) == "0110100101101001"
        assert accuracy(f4, t, range(4, 16)) == pytest.approx(4 / 12)
        assert accuracy(f8, t, d8.test_idx) == 0.0

    def test_full_training_set_recovers_target(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            t = BooleanFunction(4, int(rng.integers(0, 1 << 16)))
            d = dataset_from_indices(t, range(16))
            _, f = oracle_train(d)
            assert f == t

    @settings(max_examples=60, deadline=None)
    @given(table=st.integers(0, 255), mask=st.integers(1, 254))
    def test_literal_optimal_against_brute_force(self, table, mask):
        n = 3
        t = BooleanFunction(n, table)
        train = [i for i in range(8) if mask >> i & 1]
        d = dataset_from_indices(t, train)
        dnf, f = oracle_train(d)
        assert all(f.at(i) == t.at(i) for i in train)
        best = min_literal_table(n)
        tmask = sum(1 << i for i in train)
        want = min(int(best[g]) for g in range(256) if (g & tmask) == (table & tmask))
        assert sum(len(c) for c in dnf.clauses) == want


def _recompute(p, data):
    f = truth_table(p)
    tr = accuracy(f, data.target, data.train_idx)
    te = accuracy(f, data.target, data.test_idx)
    return tr, te, p.norm().total


class TestMcmc:
    def test_final_state_consistent_with_trace(self):
        t = parity(5, 2)
        d = make_dataset(t, 16, 0)
        p, tr = mcmc_train(t, d, 1, McmcConfig(steps=5000, seed=4, lam=0.01))
        train_acc, test_acc, norm = _recompute(p, d)
        fin = tr.final()
        assert fin["train_acc"] == pytest.approx(train_acc)
        assert fin["test_acc"] == pytest.approx(test_acc)
        assert fin["norm"] == norm
        assert len(tr) == 5000

    def test_incremental_state_matches_forward_pass_mid_run(self):
        t = parity(4, 3)
        d = make_dataset(t, 7, 1)
        p, tr = mcmc_train(t, d, 1, McmcConfig(steps=300, seed=2, batch=3, allow_beta=True))
        st_ = ChainState(p, d)
        assert st_.cnt[kernels.TRAIN_ERR] == round((1 - tr.final()["train_acc"]) * d.m)
        assert np.array_equal(st_.pred, truth_table(p).to_array())

    def test_seed_determinism(self):
        t = parity(5, 3)
        d = make_dataset(t, 20, 0)
        cfg = McmcConfig(steps=3000, seed=9, lam=0.01, batch=8)
        p1, t1 = mcmc_train(t, d, 1, cfg)
        p2, t2 = mcmc_train(t, d, 1, cfg)
        assert p1 == p2 and t1.equals(t2)
        p3, _ = mcmc_train(t, d, 1, McmcConfig(steps=3000, seed=10, lam=0.01, batch=8))
        assert p3 != p1

    def test_infinite_kappa_never_increases_training_error(self):
        t = parity(5, 2)
        d = make_dataset(t, 20, 0)
        _, tr = mcmc_train(t, d, 1, McmcConfig(kappa=1e12, steps=4000, seed=1))
        assert np.all(np.diff(tr.train_acc) >= 0)
        assert tr.train_acc[0] >= tr.initial["train_acc"]

    def test_zero_steps_returns_init(self):
        t = parity(3, 1)
        d = make_dataset(t, 4, 0)
        init = init_params(3, 1, np.random.default_rng(0))
        p, tr = mcmc_train(t, d, 1, McmcConfig(steps=0), init=init)
        assert p == init and len(tr) == 0
        assert tr.final()["norm"] == init.norm().total

    def test_beta_frozen_by_default(self):
        t = parity(4, 2)
        d = make_dataset(t, 8, 0)
        init = init_params(4, 1, np.random.default_rng(3), beta=-1)
        p, _ = mcmc_train(t, d, 1, McmcConfig(steps=2000, seed=0), init=init)
        assert p.beta == -1

    def test_early_stop_truncates(self):
        t = parity(4, 1)
        d = make_dataset(t, 8, 0)
        _, tr = mcmc_train(t, d, 1, McmcConfig(steps=200_000, seed=0, early_stop=100))
        assert len(tr) < 200_000
        assert np.all(tr.train_acc[-100:] == 1.0)

    def test_snapshots(self):
        t = parity(4, 1)
        d = make_dataset(t, 8, 0)
        p, tr = mcmc_train(t, d, 1, McmcConfig(steps=4000, seed=0, snapshot_every=1000,
                                               snapshot_thresholds=(0.5,)))
        periodic = [s for s in tr.snapshots if s.reason == "periodic"]
        assert [s.step for s in periodic] == [1000, 2000, 3000, 4000]
        assert periodic[-1].params == p
        for s in tr.snapshots:
            f = truth_table(s.params)
            assert accuracy(f, t, d.test_idx) == pytest.approx(s.test_accuracy)
        hits = [s for s in tr.snapshots if s.reason.startswith("test_acc")]
        assert all(s.test_accuracy >= 0.5 for s in hits)

    def test_target_mismatch_rejected(self):
        d = make_dataset(parity(3, 1), 4, 0)
        with pytest.raises(ValueError):
            mcmc_train(parity(3, 2), d, 1, McmcConfig(steps=1))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            McmcConfig(kappa=0)
        with pytest.raises(ValueError):
            McmcConfig(lam=-1)

    def test_short_run_stationary_on_tiny_chain(self):
        # reduced version of the long stationarity check
        t = BooleanFunction.from_string("0110")
        d = dataset_from_indices(t, range(4))
        kappa, lam = 2.0, 0.5
        _, tr = mcmc_train(t, d, 1, McmcConfig(kappa=kappa, lam=lam, steps=1_000_000, seed=5, allow_beta=True),
                           width=2, record_visits=True)
        target = exact_chain_distribution(t, 2, kappa, lam)
        emp = tr.visits / tr.visits.sum()
        assert 0.5 * np.abs(emp - target).sum() < 0.03


class TestGreedy:
    def test_keep_current_never_worsens_batch_accuracy(self):
        t = parity(4, 2)
        d = make_dataset(t, 10, 0)
        _, tr = greedy_train(t, d, 1, GreedyConfig(steps=40, seed=0, keep_current=True))
        assert np.all(np.diff(tr.train_acc) >= 0)

    def test_step_moves_to_best_neighbour(self):
        t = parity(3, 2)
        d = make_dataset(t, 5, 0)
        init = init_params(3, 1, np.random.default_rng(1))
        p, tr = greedy_train(t, d, 1, GreedyConfig(steps=1, seed=0), init=init)
        best = max(accuracy(truth_table(q), t, d.train_idx) for q in neighbors(init))
        assert sum(1 for q in neighbors(init) if q == p) == 1
        assert accuracy(truth_table(p), t, d.train_idx) == pytest.approx(best)

    def test_p_one_picks_minimum_norm_member(self):
        t = parity(3, 1)
        d = make_dataset(t, 5, 0)
        init = init_params(3, 1, np.random.default_rng(2))
        p, _ = greedy_train(t, d, 1, GreedyConfig(p=1.0, steps=1, seed=0), init=init)
        scored = [(accuracy(truth_table(q), t, d.train_idx), q.norm().total) for q in neighbors(init)]
        top = max(a for a, _ in scored)
        low = min(nm for a, nm in scored if a == top)
        assert p.norm().total == low

    def test_seed_determinism_and_length(self):
        t = parity(4, 2)
        d = make_dataset(t, 8, 0)
        cfg = GreedyConfig(steps=25, seed=3, beta_loop=True, batch=5)
        p1, t1 = greedy_train(t, d, 1, cfg)
        p2, t2 = greedy_train(t, d, 1, cfg)
        assert p1 == p2 and t1.equals(t2) and len(t1) == 25

    def test_trace_matches_recomputed_state(self):
        t = parity(4, 3)
        d = make_dataset(t, 8, 0)
        p, tr = greedy_train(t, d, 1, GreedyConfig(steps=30, seed=1, beta_loop=True))
        train_acc, test_acc, norm = _recompute(p, d)
        assert tr.final()["train_acc"] == pytest.approx(train_acc)
        assert tr.final()["test_acc"] == pytest.approx(test_acc)
        assert tr.final()["norm"] == norm


class TestPosteriorTilt:
    def test_zero_lambda_gives_zero_ratio(self):
        t = parity(3, 3)
        d = make_dataset(t, 4, 0)
        r = posterior_tilt_check(t, d, 1, lam=0.0)
        assert r.max_abs_log_ratio < 1e-12
        assert math.isnan(r.correlation)

    @pytest.mark.parametrize("space", ["chain", "prior"])
    def test_normalised_and_interpolating(self, space):
        t = parity(3, 2)
        d = make_dataset(t, 4, 1)
        r = posterior_tilt_check(t, d, 1, lam=0.1, space=space)
        assert r.total_probability == pytest.approx(1.0)
        tmask = sum(1 << int(i) for i in d.train_idx)
        assert all((int(f) & tmask) == (t.table & tmask) for f in r.functions)
        assert r.n_interpolators == 16

    def test_tilt_direction(self):
        t = parity(3, 3)
        d = make_dataset(t, 4, 0)
        assert posterior_tilt_check(t, d, 1, lam=0.1).correlation > 0
