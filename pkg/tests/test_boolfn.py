import random

import pytest
from hypothesis import given, settings, strategies as st

from boolbias import BooleanFunction, DimensionError, FamilySpec, from_string, generate, hamming_weight
from boolbias.boolfn import index_of, input_of, parse_function

PARITY4 = "0110100110010110"


def random_function(n, rng):
    return BooleanFunction(n, rng.getrandbits(1 << n))


functions = st.integers(1, 7).flatmap(
    lambda n: st.integers(0, (1 << (1 << n)) - 1).map(lambda t: BooleanFunction(n, t)))


class TestEval:
    def test_constant_true(self):
        assert BooleanFunction.constant(3, 1)((1, 0, 1)) == 1

    def test_parity4(self):
        assert from_string(PARITY4)((0, 0, 0, 1)) == 1

    def test_xor(self):
        assert from_string("0110")((1, 1)) == 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            from_string("0110")((1, 0, 1))

    def test_non_binary_input(self):
        with pytest.raises(ValueError):
            from_string("0110")((2, 0))

    def test_index_convention(self):
        # x1 is the most significant bit
        assert index_of((1, 0, 0)) == 4
        assert input_of(1, 3) == (0, 0, 1)
        for idx in range(16):
            assert index_of(input_of(idx, 4)) == idx


class TestFromString:
    def test_xor(self):
        f = from_string("0110")
        assert f.n == 2
        assert [f(v) for v in [(0, 0), (0, 1), (1, 0), (1, 1)]] == [0, 1, 1, 0]

    def test_parity4(self):
        f = from_string(PARITY4)
        for idx in range(16):
            assert f.at(idx) == bin(idx).count("1") % 2

    def test_constant(self):
        assert from_string("1111") == BooleanFunction.constant(2, 1)

    @pytest.mark.parametrize("bad", ["011", "", "01a0", "0"])
    def test_errors(self, bad):
        with pytest.raises(ValueError):
            from_string(bad)

    def test_round_trip_exhaustive(self):
        for n in (1, 2, 3):
            for t in range(1 << (1 << n)):
                f = BooleanFunction(n, t)
                assert from_string(f.to_string()) == f
                assert BooleanFunction.from_hex(f.to_hex(), n) == f

    def test_round_trip_random(self):
        rng = random.Random(0)
        for _ in range(10_000):
            f = random_function(rng.randint(1, 7), rng)
            assert from_string(f.to_string()) == f

    def test_hex(self):
        f = from_string(PARITY4)
        assert f.to_hex() == "6996"
        assert parse_function("0x6996", 4) == f
        assert parse_function(PARITY4) == f
        with pytest.raises(ValueError):
            parse_function("0x6996")


class TestGenerate:
    def test_repeat(self):
        assert generate(FamilySpec("repeat", pattern="1001"), 4).to_string() == "1001100110011001"

    def test_repeat_truncated(self):
        assert generate(FamilySpec("repeat", pattern="10011"), 3).to_string() == "10011100"

    def test_entropy_zero(self):
        assert generate(FamilySpec("entropy", t=0), 3).to_string() == "00000000"

    def test_parity_first_two(self):
        assert generate(FamilySpec("parity", subset=(1, 2)), 3).to_string() == "00111100"
        assert generate(FamilySpec("parity", k=2, subset_mode="first"), 3).to_string() == "00111100"

    def test_parity_balanced(self):
        for n in range(1, 8):
            for k in range(1, n + 1):
                for seed in range(3):
                    f = generate(FamilySpec("parity", k=k, seed=seed), n)
                    assert hamming_weight(f) == 1 << (n - 1)

    @pytest.mark.parametrize("t", [0, 1, 5, 16, 31, 32])
    def test_entropy_weight(self, t):
        assert hamming_weight(generate(FamilySpec("entropy", t=t, seed=4), 5)) == t

    def test_deterministic(self):
        for spec in [FamilySpec("parity", k=3, seed=9), FamilySpec("entropy", t=11, seed=9),
                     FamilySpec("repeat", length=5, seed=9), FamilySpec("sparse", k=2, seed=9)]:
            assert generate(spec, 6) == generate(spec, 6)

    def test_sparse_period(self):
        s = generate(FamilySpec("sparse", k=2, seed=1), 5).to_string()
        assert s == s[:4] * 8

    @pytest.mark.parametrize("spec,n", [
        (FamilySpec("parity", k=4), 3),
        (FamilySpec("parity", subset=(1, 1)), 3),
        (FamilySpec("entropy", t=9), 3),
        (FamilySpec("repeat", pattern="1" * 9), 3),
        (FamilySpec("constant", value=2), 3),
    ])
    def test_invalid(self, spec, n):
        with pytest.raises(ValueError):
            generate(spec, n)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            FamilySpec("bogus")

    def test_dict_round_trip(self):
        spec = FamilySpec("parity", subset=(1, 3), seed=2)
        assert FamilySpec.from_dict(spec.to_dict()) == spec


def test_hamming_weight_examples():
    assert hamming_weight(from_string("0110")) == 2
    assert hamming_weight(from_string(PARITY4)) == 8
    assert hamming_weight(from_string("00000000")) == 0


@given(functions)
def test_complement_weight(f):
    assert f.hamming_weight() + f.complement().hamming_weight() == f.size
    assert all(a != b for a, b in zip(f.bits, f.complement().bits))


@given(functions)
@settings(max_examples=200)
def test_string_round_trip_property(f):
    assert from_string(f.to_string()) == f
    assert BooleanFunction.from_hex(f.to_hex(), f.n) == f


def test_n_cap():
    with pytest.raises(DimensionError):
        BooleanFunction(17, 0)
