"""Literals, clauses and globally-signed DNF formulas.

A clause is a pair of variable masks over input indices (bit ``n - i`` holds
``x_i``, matching :mod:`boolbias.boolfn`).  Two clause values need care:

* the empty clause (no literals) is *inactive* and evaluates False everywhere;
* ``Clause.TRUE`` is the always-true marker produced by a network row with no
  nonzero weights but an active output weight.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .boolfn import BooleanFunction, index_of
from .errors import DimensionError


@lru_cache(maxsize=None)
def var_table(i: int, n: int) -> int:
    """Truth table of the bare variable ``x_i``."""
    bit = 1 << (n - i)
    t = 0
    for idx in range(1 << n):
        if idx & bit:
            t |= 1 << idx
    return t


def cube_table(pos: int, neg: int, n: int) -> int:
    """Truth table of the conjunction given by ``pos``/``neg`` masks (no empty special case)."""
    full = (1 << (1 << n)) - 1
    t = full
    for i in range(1, n + 1):
        bit = 1 << (n - i)
        if pos & bit:
            t &= var_table(i, n)
        elif neg & bit:
            t &= full ^ var_table(i, n)
    return t


@dataclass(frozen=True, order=True)
class Clause:
    pos_mask: int = 0
    neg_mask: int = 0
    always_true: bool = False

    def __post_init__(self):
        if self.pos_mask & self.neg_mask:
            raise ValueError("a variable cannot appear both positive and negated")
        if self.always_true and (self.pos_mask or self.neg_mask):
            raise ValueError("the always-true marker carries no literals")

    @property
    def care_mask(self) -> int:
        return self.pos_mask | self.neg_mask

    @property
    def is_empty(self) -> bool:
        return not self.always_true and not (self.pos_mask or self.neg_mask)

    def __len__(self) -> int:
        return self.care_mask.bit_count()

    def covers(self, idx: int) -> bool:
        if self.always_true:
            return True
        if not self.care_mask:
            return False
        return (idx & self.pos_mask) == self.pos_mask and not (idx & self.neg_mask)

    def table(self, n: int) -> int:
        if self.always_true:
            return (1 << (1 << n)) - 1
        if not self.care_mask:
            return 0
        return cube_table(self.pos_mask, self.neg_mask, n)

    def sort_key(self) -> tuple[int, int, int]:
        return (len(self), self.pos_mask, self.neg_mask)

    @classmethod
    def from_literals(cls, literals: Iterable[int], n: int) -> "Clause":
        """Build from signed 1-based literals: ``+i`` is ``x_i``, ``-i`` is ``!x_i``."""
        pos = neg = 0
        for lit in literals:
            i = abs(lit)
            if not 1 <= i <= n:
                raise DimensionError(f"variable x{i} outside 1..{n}")
            if lit > 0:
                pos |= 1 << (n - i)
            else:
                neg |= 1 << (n - i)
        return cls(pos, neg)

    @classmethod
    def minterm(cls, idx: int, n: int) -> "Clause":
        full = (1 << n) - 1
        return cls(idx & full, ~idx & full)


Clause.TRUE = Clause(always_true=True)


def clause_eval(c: Clause, v: Sequence[int]) -> int:
    return int(c.covers(index_of(v)))


@dataclass(frozen=True)
class Dnf:
    n: int
    beta: int = 1
    clauses: tuple[Clause, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.beta not in (1, -1):
            raise ValueError(f"beta must be +1 or -1, got {self.beta}")
        object.__setattr__(self, "clauses", tuple(self.clauses))
        limit = 1 << self.n
        for c in self.clauses:
            if c.pos_mask >= limit or c.neg_mask >= limit:
                raise DimensionError(f"clause {c} uses variables beyond n={self.n}")

    def __call__(self, v: Sequence[int]) -> int:
        return dnf_eval(self, v)

    def eval_index(self, idx: int) -> int:
        hit = any(c.covers(idx) for c in self.clauses)
        return int(hit) if self.beta == 1 else int(not hit)

    def truth_table(self) -> BooleanFunction:
        t = 0
        for c in self.clauses:
            t |= c.table(self.n)
        if self.beta == -1:
            t ^= (1 << (1 << self.n)) - 1
        return BooleanFunction(self.n, t)

    def length(self) -> int:
        return dnf_length(self)

    def negated(self) -> "Dnf":
        return Dnf(self.n, -self.beta, self.clauses)

    def deduplicated(self) -> "Dnf":
        """Drop duplicate and inactive clauses, keeping first occurrences."""
        seen: list[Clause] = []
        for c in self.clauses:
            if not c.is_empty and c not in seen:
                seen.append(c)
        return Dnf(self.n, self.beta, tuple(seen))

    def sorted(self) -> "Dnf":
        return Dnf(self.n, self.beta, tuple(sorted(self.clauses, key=Clause.sort_key)))

    def to_text(self) -> str:
        return format_dnf(self)

    def __str__(self) -> str:
        return format_dnf(self)


def dnf_eval(d: Dnf, v: Sequence[int]) -> int:
    if len(v) != d.n:
        raise DimensionError(f"expected {d.n} inputs, got {len(v)}")
    return d.eval_index(index_of(v))


def dnf_length(d: Dnf) -> int:
    return sum(len(c) for c in d.clauses)


def canonical_expansion(f: BooleanFunction) -> Dnf:
    """One full-length clause per minority-side row, in ascending input order."""
    n = f.n
    if f.hamming_weight() <= (1 << (n - 1)):
        beta, want = 1, 1
    else:
        beta, want = -1, 0
    clauses = tuple(Clause.minterm(idx, n) for idx in range(f.size) if f.at(idx) == want)
    return Dnf(n, beta, clauses)


# ---------------------------------------------------------------------------
# text syntax:  [-] (x1&!x2)|(x3) ;  "()" inactive clause, "(1)" always-true,
# "0" for a DNF without clauses.

def format_clause(c: Clause, n: int) -> str:
    if c.always_true:
        return "(1)"
    lits = []
    for i in range(1, n + 1):
        bit = 1 << (n - i)
        if c.pos_mask & bit:
            lits.append(f"x{i}")
        elif c.neg_mask & bit:
            lits.append(f"!x{i}")
    return "(" + "&".join(lits) + ")"


def format_dnf(d: Dnf) -> str:
    body = "|".join(format_clause(c, d.n) for c in d.clauses) if d.clauses else "0"
    return ("-" if d.beta == -1 else "") + body


_LIT = re.compile(r"^(!?)x(\d+)$")


def parse_dnf(text: str, n: int) -> Dnf:
    s = "".join(text.split())
    beta = 1
    if s.startswith("-"):
        beta, s = -1, s[1:]
    if s == "0":
        return Dnf(n, beta, ())
    if not s:
        raise ValueError("empty DNF text")
    clauses = []
    for part in s.split("|"):
        if not (part.startswith("(") and part.endswith(")")):
            raise ValueError(f"clause {part!r} must be parenthesised")
        inner = part[1:-1]
        if inner == "1":
            clauses.append(Clause.TRUE)
            continue
        if inner == "":
            clauses.append(Clause())
            continue
        lits = []
        for tok in inner.split("&"):
            m = _LIT.match(tok)
            if not m:
                raise ValueError(f"bad literal {tok!r}")
            i = int(m.group(2))
            lits.append(-i if m.group(1) else i)
        if len({abs(l) for l in lits}) != len(lits):
            raise ValueError(f"repeated variable in clause {part!r}")
        clauses.append(Clause.from_literals(lits, n))
    return Dnf(n, beta, tuple(clauses))
