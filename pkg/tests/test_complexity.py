import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from boolbias import BooleanFunction, BudgetExceeded, FamilySpec, from_string, generate
from boolbias.complexity import (MinDnfRequest, complexity_report, k_clause, k_dnf, k_lz, k_theta,
                                 lz76_words, min_dnf, objective_value, prime_implicants)
from boolbias.complexity import setcover
from oracles import brute_k, lz76_naive

PARITY4 = "0110100110010110"


def parity(n):
    return generate(FamilySpec("parity", k=n, subset_mode="first"), n)


class TestMinDnf:
    def test_parity4(self):
        d = min_dnf(MinDnfRequest.from_function(from_string(PARITY4), allow_negation=False))
        assert d.length() == 32 and len(d.clauses) == 8
        assert d.truth_table() == from_string(PARITY4)

    def test_oracle_two_parity(self):
        d = min_dnf(MinDnfRequest(4, {1, 2}, set(range(4, 16))))
        assert d.truth_table().to_string() == "0110011001100110"
        assert d.length() == 4

    def test_oracle_three_parity(self):
        d = min_dnf(MinDnfRequest(4, {1, 2, 4, 7}, set(range(8, 16))))
        assert d.truth_table().to_string() == "0110100101101001"
        assert d.length() == 12

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            min_dnf(MinDnfRequest(13, {0}))

    def test_bad_request(self):
        with pytest.raises(ValueError):
            MinDnfRequest(2, {1}, {1})
        with pytest.raises(ValueError):
            MinDnfRequest(2, {4})
        with pytest.raises(ValueError):
            min_dnf(MinDnfRequest(2, {1}), "bogus")

    def test_tie_break_deterministic(self):
        # two 1-literal covers of {x1=1 or x2=1} partial function: on={3}, dc=rest
        d = min_dnf(MinDnfRequest(2, {3}, {0, 1, 2}))
        assert d.beta == 1 and len(d.clauses) == 1
        # tautology has length 0 and sorts first
        assert d.length() == 0

    def test_tie_break_prefers_lower_key(self):
        # on = {01, 11}: x2 alone covers both; dc = {10} lets x1 cover 11 too
        d = min_dnf(MinDnfRequest(2, {1, 3}, {2}))
        assert str(d) == "(x2)"

    def test_exhaustive_n3_all_objectives(self):
        for t in range(256):
            f = BooleanFunction(3, t)
            req = MinDnfRequest.from_function(f, allow_negation=True)
            for obj, extra in (("literals", 0), ("literals_plus_clauses", 1)):
                d = min_dnf(req, obj)
                assert d.truth_table() == f
                assert objective_value(d, obj) == brute_k(3, t, extra)

    def test_random_n4_against_brute_force(self):
        rng = random.Random(11)
        for _ in range(10_000):
            t = rng.getrandbits(16)
            assert k_dnf(BooleanFunction(4, t)) == brute_k(4, t)

    @given(st.integers(2, 5).flatmap(lambda n: st.tuples(
        st.just(n), st.lists(st.sampled_from(range(1 << n)), unique=True),
        st.lists(st.sampled_from(range(1 << n)), unique=True))))
    @settings(max_examples=150, deadline=None)
    def test_soundness_with_dont_cares(self, args):
        n, on, dc = args
        dc = set(dc) - set(on)
        req = MinDnfRequest(n, set(on), dc, allow_negation=True)
        for obj in ("literals", "clauses", "literals_plus_clauses"):
            t = min_dnf(req, obj).truth_table()
            assert all(t.at(i) for i in on)
            assert not any(t.at(i) for i in req.off_set)

    def test_dont_cares_never_hurt(self):
        rng = random.Random(4)
        for _ in range(200):
            t = rng.getrandbits(16)
            on = {i for i in range(16) if (t >> i) & 1}
            dc = {i for i in range(16) if rng.random() < 0.3} - on
            full = min_dnf(MinDnfRequest(4, on)).length()
            assert min_dnf(MinDnfRequest(4, on, dc)).length() <= full

    def test_primes_of_xor(self):
        primes = prime_implicants(2, {1, 2}, {0, 3})
        assert sorted(str(p) for p in primes) == ["Clause(pos_mask=1, neg_mask=2, always_true=False)",
                                                  "Clause(pos_mask=2, neg_mask=1, always_true=False)"]


class TestSetCover:
    def test_simple(self):
        # elements 0..3; sets: {0,1} c2, {2,3} c2, {0,1,2,3} c5, {1,2} c1
        r = setcover.solve(0b1111, [0b0011, 0b1100, 0b1111, 0b0110], [2, 2, 5, 1])
        assert r.cost == 4 and r.chosen == [0, 1]

    def test_lexicographic_ties(self):
        r = setcover.solve(0b11, [0b01, 0b10, 0b11, 0b11], [1, 1, 2, 2])
        assert r.cost == 2 and r.chosen == [0, 1]
        r = setcover.solve(0b11, [0b11, 0b01, 0b10], [2, 1, 1])
        assert r.chosen == [0]

    def test_random_against_enumeration(self):
        import itertools
        rng = random.Random(2)
        for _ in range(200):
            m = rng.randint(1, 8)
            k = rng.randint(1, 9)
            masks = [rng.getrandbits(m) | (1 << rng.randrange(m)) for _ in range(k)]
            costs = [rng.randint(1, 4) for _ in range(k)]
            uni = (1 << m) - 1
            reach = 0
            for x in masks:
                reach |= x
            if reach != uni:
                continue
            best = None
            for r in range(1, k + 1):
                for combo in itertools.combinations(range(k), r):
                    cov = 0
                    for s in combo:
                        cov |= masks[s]
                    if cov == uni:
                        c = sum(costs[s] for s in combo)
                        cand = (c, list(combo))
                        if best is None or cand < best:
                            best = cand
            res = setcover.solve(uni, masks, costs)
            assert (res.cost, res.chosen) == best


class TestMeasures:
    @pytest.mark.parametrize("value", [0, 1])
    def test_constant(self, value):
        f = BooleanFunction.constant(4, value)
        r = complexity_report(f)
        assert (r.k_dnf, r.k_theta, r.k_clause) == (0, 0, 0)
        assert r.k_lz == k_lz(f.to_string())

    @pytest.mark.parametrize("k,expected", [(1, 1), (2, 4), (3, 12), (4, 32)])
    def test_parity(self, k, expected):
        assert k_dnf(generate(FamilySpec("parity", k=k, seed=k), 5)) == expected

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_parity_report(self, n):
        r = complexity_report(parity(n))
        assert r.k_dnf == n * 2 ** (n - 1)
        assert r.k_theta == (n + 1) * 2 ** (n - 1)
        assert r.k_clause == 2 ** n

    def test_repeat_1001_constant(self):
        vals = {k_dnf(generate(FamilySpec("repeat", pattern="1001"), n)) for n in range(4, 8)}
        assert vals == {4}

    def test_entropy_bound_n4(self):
        for t in range(17):
            for seed in range(50):
                f = generate(FamilySpec("entropy", t=t, seed=seed), 4)
                assert k_dnf(f) <= 4 * min(t, 16 - t)

    def test_complement_invariance(self):
        rng = random.Random(8)
        for _ in range(100):
            f = BooleanFunction(4, rng.getrandbits(16))
            assert k_dnf(f) == k_dnf(f.complement())
            assert k_theta(f) == k_theta(f.complement())
            assert k_clause(f) == k_clause(f.complement())

    def test_sandwich_random(self):
        rng = random.Random(9)
        for n in (3, 4, 5, 6):
            for _ in range(20):
                r = complexity_report(BooleanFunction(n, rng.getrandbits(1 << n)))
                kd = r.k_dnf
                if kd:
                    assert kd + math.ceil(kd / n) <= r.k_theta <= kd + 2 ** (math.ceil(1 + math.log2(kd)) - 1)
                    assert math.ceil(kd / n) <= r.k_clause // 2

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            k_dnf(BooleanFunction(13, 0))


class TestLz:
    def test_example(self):
        assert lz76_words("0110") == 3
        assert k_lz("0110") == 6.0

    def test_random_128(self):
        rng = random.Random(0)
        s = "".join(rng.choice("01") for _ in range(128))
        assert abs(k_lz(s) - 128) <= 0.25 * 128

    def test_empty(self):
        with pytest.raises(ValueError):
            k_lz("")

    @given(st.text(alphabet="01", min_size=1, max_size=64))
    def test_symmetric_and_matches_naive(self, s):
        assert k_lz(s) == k_lz(s[::-1])
        assert lz76_words(s) == lz76_naive(s)
