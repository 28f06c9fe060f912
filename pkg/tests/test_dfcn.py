import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolbias import BooleanFunction, Clause, Dnf, from_string
from boolbias.dfcn import (DfcnParams, dfcn_to_dnf, dnf_to_dfcn, export_heatmap, forward, forward_all,
                           init_params, load_heatmap, neighbor_count, neighbors, parameter_space_size,
                           sample_prior_params, truth_table, weight_norm, width_for)
from boolbias.dnf import canonical_expansion, dnf_length
from boolbias.complexity import k_dnf

XOR = Dnf(2, 1, (Clause.from_literals([1, -2], 2), Clause.from_literals([-1, 2], 2)))


def random_dnf(rng, n, max_clauses):
    cs = []
    for _ in range(rng.randint(0, max_clauses)):
        pos = rng.getrandbits(n)
        neg = rng.getrandbits(n) & ~pos
        cs.append(Clause(pos, neg))
    return Dnf(n, rng.choice([1, -1]), tuple(cs))


class TestForward:
    def test_examples(self):
        p = DfcnParams(2, [[1, -1]], [1], 1)
        assert forward(p, (1, 0)) == 1
        zero = DfcnParams(3, np.zeros((4, 3)), np.zeros(4), 1)
        assert all(forward(zero, v) == 0 for v in itertools.product((0, 1), repeat=3))
        zero_neg = zero.replace(beta=-1)
        assert all(forward(zero_neg, v) == 1 for v in itertools.product((0, 1), repeat=3))

    def test_biases(self):
        p = DfcnParams(3, [[1, 1, -1], [0, 0, 0]], [1, 0], -1)
        assert list(p.b1) == [-1, 1]
        assert p.b2 == 1
        assert list(p.signed_w2()) == [-1, 0]

    def test_validation(self):
        with pytest.raises(ValueError):
            DfcnParams(2, [[2, 0]], [1])
        with pytest.raises(ValueError):
            DfcnParams(2, [[1, 0]], [-1])
        with pytest.raises(ValueError):
            DfcnParams(2, [[1, 0]], [1], 0)

    def test_batched_matches_forward(self):
        rng = np.random.default_rng(0)
        for n in range(1, 6):
            for _ in range(30):
                p = sample_prior_params(n, 1, rng)
                assert truth_table(p) == forward_all(p)
                q = init_params(n, 2, rng)
                assert truth_table(q) == forward_all(q)

    def test_arrays_read_only(self):
        p = DfcnParams(2, [[1, 0]], [1])
        with pytest.raises(ValueError):
            p.w1[0, 0] = 0


class TestBijection:
    def test_xor_network(self):
        p = dnf_to_dfcn(XOR, 2)
        assert p.w1.tolist() == [[1, -1], [-1, 1]]
        assert p.w2.tolist() == [1, 1]
        assert weight_norm(p).norm_w1 == 4 and weight_norm(p).norm_w2 == 2 and weight_norm(p).total == 6

    def test_empty(self):
        p = dnf_to_dfcn(Dnf(3), 4)
        assert not p.w1.any() and truth_table(p) == BooleanFunction.constant(3, 0)
        assert dfcn_to_dnf(p) == Dnf(3)

    def test_canonical_1000(self):
        p = dnf_to_dfcn(canonical_expansion(from_string("1000")), 2)
        assert p.w1.tolist() == [[-1, -1], [0, 0]]
        assert p.w2.tolist() == [1, 0]

    def test_width_too_small(self):
        with pytest.raises(ValueError):
            dnf_to_dfcn(XOR, 1)

    def test_zero_row_active_is_tautology(self):
        p = DfcnParams(3, np.zeros((2, 3)), [1, 0], 1)
        assert truth_table(p) == BooleanFunction.constant(3, 1)
        assert forward_all(p) == BooleanFunction.constant(3, 1)
        assert dfcn_to_dnf(p).clauses == (Clause.TRUE,)

    def test_round_trip_random(self):
        rng = random.Random(1)
        for _ in range(1000):
            n = rng.randint(1, 4)
            w = width_for(n, 1) + rng.randint(0, 3)
            d = random_dnf(rng, n, w)
            p = dnf_to_dfcn(d, w)
            assert forward_all(p) == d.truth_table()
            back = dfcn_to_dnf(p)
            assert back.beta == d.beta
            assert sorted(back.clauses) == sorted(c for c in d.clauses if not c.is_empty)
            assert weight_norm(p).norm_w1 == dnf_length(d)

    def test_canonical_parity4_norm(self):
        p = dnf_to_dfcn(canonical_expansion(from_string("0110100110010110")), 8)
        assert weight_norm(p).norm_w1 == 32


class TestSampling:
    def test_zero_fraction(self):
        rng = np.random.default_rng(5)
        zeros = sum(int((sample_prior_params(5, 1, rng).w1 == 0).sum()) for _ in range(400))
        assert abs(zeros / (400 * 16 * 5) - 1 / 3) < 0.01

    def test_w2_matches_nonzero_rows(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            p = sample_prior_params(3, 2, rng)
            assert p.width == 8
            assert np.array_equal(p.w2 == 1, p.w1.any(axis=1))

    def test_zero_row_rate(self):
        rng = np.random.default_rng(7)
        rows = np.concatenate([sample_prior_params(2, 4, rng).w1 for _ in range(4000)])
        assert abs((~rows.any(axis=1)).mean() - 1 / 9) < 0.01

    def test_space_size(self):
        assert parameter_space_size(2) == 2 * 3 ** 4
        assert parameter_space_size(4) == 2 * 3 ** 32


class TestNeighbors:
    def test_counts(self):
        p = DfcnParams(2, np.zeros((2, 2)), np.zeros(2))
        assert len(list(neighbors(p))) == 10 == neighbor_count(2, 2)
        assert neighbor_count(7, 128) == 1920
        assert len(list(neighbors(p, include_beta=True))) == 11

    def test_distance_one_and_symmetric(self):
        rng = np.random.default_rng(2)
        p = init_params(3, 1, rng)
        nbrs = list(neighbors(p))
        assert len(set(nbrs)) == len(nbrs)
        for q in nbrs:
            diff = int((q.w1 != p.w1).sum() + (q.w2 != p.w2).sum())
            assert diff == 1 and q.beta == p.beta
            assert p in set(neighbors(q))


def test_norm_equals_k_dnf_exhaustive_n2():
    # minimum over all width-2 networks of ||W1|| per function equals K_DNF
    best = {}
    for w1 in itertools.product((-1, 0, 1), repeat=4):
        for w2 in itertools.product((0, 1), repeat=2):
            for beta in (1, -1):
                p = DfcnParams(2, np.array(w1).reshape(2, 2), w2, beta)
                t = truth_table(p).table
                nrm = weight_norm(p).norm_w1
                best[t] = min(best.get(t, nrm), nrm)
    assert len(best) == 16
    for t, v in best.items():
        assert k_dnf(BooleanFunction(2, t)) == v


def test_heatmap_round_trip(tmp_path):
    p = init_params(3, 1, np.random.default_rng(0))
    csv_path, side = export_heatmap(p, tmp_path / "w1.csv", step=10, test_accuracy=0.5)
    assert csv_path.read_text().splitlines()[0] == "x1,x2,x3"
    q, meta = load_heatmap(csv_path)
    assert q == p and meta["step"] == 10 and meta["test_accuracy"] == 0.5


@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_forward_deterministic(n, seed):
    p = sample_prior_params(n, 1, np.random.default_rng(seed))
    assert forward_all(p) == forward_all(p) == truth_table(p)
