"""Boolean functions on n inputs stored as truth tables.

Input index convention: ``idx`` encodes ``(x_1, ..., x_n)`` as an n-bit binary
number with ``x_1`` the most significant bit, so ascending ``idx`` is the
ascending concatenated binary order of the inputs.  The truth table is kept
as a Python int whose bit ``idx`` is ``f(input(idx))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError
from .rng import stream

MAX_N = 16


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise DimensionError(f"n must be in [1, {MAX_N}], got {n}")


def index_of(v: Sequence[int]) -> int:
    idx = 0
    for bit in v:
        if bit not in (0, 1):
            raise ValueError(f"input components must be 0 or 1, got {bit!r}")
        idx = (idx << 1) | int(bit)
    return idx


def input_of(idx: int, n: int) -> tuple[int, ...]:
    return tuple((idx >> (n - 1 - j)) & 1 for j in range(n))


def var_bit(i: int, n: int) -> int:
    """Mask bit of variable ``x_i`` (1-based) inside an input index."""
    return 1 << (n - i)


@dataclass(frozen=True)
class BooleanFunction:
    n: int
    table: int

    def __post_init__(self):
        _check_n(self.n)
        if self.table < 0 or self.table >> self.size:
            raise ValueError("truth table has bits beyond 2**n")

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.table >> i) & 1 for i in range(self.size))

    def __call__(self, v: Sequence[int]) -> int:
        return self.eval(v)

    def eval(self, v: Sequence[int]) -> int:
        if len(v) != self.n:
            raise DimensionError(f"expected {self.n} inputs, got {len(v)}")
        return (self.table >> index_of(v)) & 1

    def at(self, idx: int) -> int:
        return (self.table >> idx) & 1

    def hamming_weight(self) -> int:
        return self.table.bit_count()

    def complement(self) -> "BooleanFunction":
        return BooleanFunction(self.n, self.table ^ ((1 << self.size) - 1))

    def to_string(self) -> str:
        return "".join("1" if (self.table >> i) & 1 else "0" for i in range(self.size))

    def to_hex(self) -> str:
        """Hex text, two chars per byte; idx 0 is the MSB of the first byte."""
        s = self.to_string()
        pad = (-len(s)) % 8
        s += "0" * pad
        return format(int(s, 2), f"0{len(s) // 4}x")

    def to_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)

    def __str__(self) -> str:
        return self.to_string()

    @classmethod
    def from_string(cls, s: str) -> "BooleanFunction":
        s = s.strip()
        size = len(s)
        if size == 0 or size & (size - 1):
            raise ValueError(f"length {size} is not a power of two")
        if size == 1:
            raise DimensionError("a single output bit has no inputs (n = 0)")
        bad = set(s) - {"0", "1"}
        if bad:
            raise ValueError(f"illegal characters {sorted(bad)!r}")
        table = int(s[::-1], 2)
        return cls(size.bit_length() - 1, table)

    @classmethod
    def from_hex(cls, h: str, n: int) -> "BooleanFunction":
        _check_n(n)
        h = h.strip().lower().removeprefix("0x")
        size = 1 << n
        nbits = 4 * len(h)
        if nbits < size or nbits - size >= 8:
            raise ValueError(f"hex text of {len(h)} chars does not encode n={n}")
        s = format(int(h, 16), f"0{nbits}b")[:size]
        return cls.from_string(s)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BooleanFunction":
        return cls.from_string("".join(str(int(b)) for b in bits))

    @classmethod
    def constant(cls, n: int, value: int) -> "BooleanFunction":
        return cls(n, ((1 << (1 << n)) - 1) if value else 0)


def from_string(s: str) -> BooleanFunction:
    return BooleanFunction.from_string(s)


def parse_function(text: str, n: int | None = None) -> BooleanFunction:
    """Parse a 0/1 string of length ``2**n``, or hex text (``0x`` prefix or explicit ``n``)."""
    text = text.strip()
    binary = not set(text) - {"0", "1"} and (n is None or len(text) == 1 << n)
    if text.lower().startswith("0x") or not binary:
        if n is None:
            raise ValueError("hex function text needs n")
        return BooleanFunction.from_hex(text, n)
    f = BooleanFunction.from_string(text)
    if n is not None and f.n != n:
        raise DimensionError(f"function has n={f.n}, expected {n}")
    return f


def hamming_weight(f: BooleanFunction) -> int:
    return f.hamming_weight()


# ---------------------------------------------------------------------------
# target families

FAMILIES = ("constant", "parity", "entropy", "repeat", "sparse")


@dataclass(frozen=True)
class FamilySpec:
    """Recipe for a target function.

    ``parity`` uses ``subset`` (1-based variables), or ``subset_mode``
    ``"first"`` / ``"random"``.  ``repeat`` tiles ``pattern`` or, if only
    ``length`` is given, a seeded random pattern of that length.  ``sparse``
    is ``repeat`` with a random pattern of length ``2**k``.
    """

    family: str
    value: int | None = None
    k: int | None = None
    subset: tuple[int, ...] | None = None
    subset_mode: str = "random"
    t: int | None = None
    pattern: str | None = None
    length: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.subset is not None:
            object.__setattr__(self, "subset", tuple(int(i) for i in self.subset))

    def validate(self, n: int) -> None:
        _check_n(n)
        size = 1 << n
        fam = self.family
        if fam == "constant":
            if self.value not in (0, 1):
                raise ValueError("constant family needs value 0 or 1")
        elif fam == "parity":
            k = self.k if self.subset is None else len(self.subset)
            if k is None or not 1 <= k <= n:
                raise ValueError(f"parity needs 1 <= k <= n, got k={k}")
            if self.subset is not None:
                if self.k is not None and self.k != len(self.subset):
                    raise ValueError("subset size must equal k")
                if len(set(self.subset)) != len(self.subset) or not all(1 <= i <= n for i in self.subset):
                    raise ValueError(f"invalid parity subset {self.subset}")
            elif self.subset_mode not in ("first", "random"):
                raise ValueError(f"unknown subset_mode {self.subset_mode!r}")
        elif fam == "entropy":
            if self.t is None or not 0 <= self.t <= size:
                raise ValueError(f"entropy needs 0 <= t <= 2**n, got t={self.t}")
        elif fam == "repeat":
            if self.pattern is not None:
                if not self.pattern or set(self.pattern) - {"0", "1"}:
                    raise ValueError(f"bad repeat pattern {self.pattern!r}")
                l = len(self.pattern)
            else:
                l = self.length
            if l is None or not 1 <= l <= size:
                raise ValueError(f"repeat needs pattern length 1 <= l <= 2**n, got {l}")
        elif fam == "sparse":
            if self.k is None or not 1 <= self.k <= n:
                raise ValueError(f"sparse needs 1 <= k <= n, got k={self.k}")

    def parity_subset(self, n: int) -> tuple[int, ...]:
        if self.subset is not None:
            return self.subset
        if self.subset_mode == "first":
            return tuple(range(1, self.k + 1))
        rng = stream(self.seed, 1)
        return tuple(sorted(int(i) + 1 for i in rng.choice(n, size=self.k, replace=False)))

    def label(self) -> str:
        fam = self.family
        if fam == "constant":
            return f"constant{self.value}"
        if fam == "parity":
            return f"parity_k{self.k if self.subset is None else len(self.subset)}"
        if fam == "entropy":
            return f"entropy_t{self.t}"
        if fam == "sparse":
            return f"sparse_k{self.k}"
        if self.pattern is not None:
            return f"repeat_{self.pattern}"
        return f"repeat_l{self.length}"

    def to_dict(self) -> dict:
        d = {"family": self.family, "seed": self.seed}
        for key in ("value", "k", "subset", "t", "pattern", "length"):
            val = getattr(self, key)
            if val is not None:
                d[key] = list(val) if key == "subset" else val
        if self.family == "parity" and self.subset is None:
            d["subset_mode"] = self.subset_mode
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FamilySpec":
        d = dict(d)
        if d.get("subset") is not None:
            d["subset"] = tuple(d["subset"])
        return cls(**d)


def _tile(pattern: str, size: int) -> str:
    reps = -(-size // len(pattern))
    return (pattern * reps)[:size]


def generate(spec: FamilySpec, n: int) -> BooleanFunction:
    spec.validate(n)
    size = 1 << n
    fam = spec.family
    if fam == "constant":
        return BooleanFunction.constant(n, spec.value)
    if fam == "parity":
        mask = 0
        for i in spec.parity_subset(n):
            mask |= var_bit(i, n)
        table = 0
        for idx in range(size):
            if (idx & mask).bit_count() & 1:
                table |= 1 << idx
        return BooleanFunction(n, table)
    if fam == "entropy":
        rng = stream(spec.seed, 2)
        ones = rng.choice(size, size=spec.t, replace=False)
        table = 0
        for idx in ones:
            table |= 1 << int(idx)
        return BooleanFunction(n, table)
    if fam == "sparse":
        pattern = "".join(map(str, stream(spec.seed, 3).integers(0, 2, 1 << spec.k)))
        return BooleanFunction.from_string(_tile(pattern, size))
    pattern = spec.pattern
    if pattern is None:
        pattern = "".join(map(str, stream(spec.seed, 3).integers(0, 2, spec.length)))
    return BooleanFunction.from_string(_tile(pattern, size))
