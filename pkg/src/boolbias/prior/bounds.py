"""Analytic bounds on the parameter-space prior of function families.

Every bound is returned as a :class:`Bounds` record holding floats, natural
logs (finite even when the linear value underflows) and, when the rational
is small enough to build, the exact :class:`~fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ..errors import BudgetExceeded
from ..rng import as_generator

EXACT_BITS = 1_000_000


@dataclass(frozen=True)
class BoundParams:
    n: int
    alpha_w: int = 1
    k: int | None = None
    t: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.alpha_w < 1 or int(self.alpha_w) != self.alpha_w:
            raise ValueError(f"alpha_w must be a positive integer, got {self.alpha_w}")

    @property
    def M(self) -> int:
        return int(self.alpha_w) << (self.n - 1)

    @property
    def N(self) -> int:
        return 3 ** self.n

    @property
    def p(self) -> Fraction:
        return p_clause_covers(self.n)


@dataclass(frozen=True)
class Bounds:
    lower: Optional[float] = None
    upper: Optional[float] = None
    log_lower: Optional[float] = None
    log_upper: Optional[float] = None
    exact_lower: Optional[Fraction] = None
    exact_upper: Optional[Fraction] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"lower": self.lower, "upper": self.upper, "log_lower": self.log_lower, "log_upper": self.log_upper}
        for key in ("exact_lower", "exact_upper"):
            v = getattr(self, key)
            if v is not None:
                d[key] = f"{v.numerator}/{v.denominator}"
        d.update(self.extra)
        return d


def _ln(x: Fraction | float) -> float:
    if x <= 0:
        return -math.inf
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


def _small(base: Fraction, power: int) -> bool:
    """Whether ``base**power`` is cheap to build exactly."""
    bits = max(base.numerator.bit_length(), base.denominator.bit_length())
    return bits * power <= EXACT_BITS


def _float(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def _validate_k(params: BoundParams) -> int:
    k = params.k
    if k is None or not 1 <= k <= params.n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={params.n}")
    return k


# ---------------------------------------------------------------------------


def p_clause_covers(n: int) -> Fraction:
    """Probability that a uniform ternary row is nonzero and fires on a fixed input."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return Fraction(2 ** n - 1, 3 ** n)


def input_true_probability(n: int, alpha_w: int = 1) -> Fraction:
    """Probability that at least one of the ``M`` rows fires on a fixed input."""
    M = int(alpha_w) << (n - 1)
    return 1 - (1 - p_clause_covers(n)) ** M


def bound_constant(params: BoundParams) -> Bounds:
    """Lower bounds on P(constant) via inclusion-exclusion and its first-order truncation.

    Terms with ``1 - k p < 0`` are clamped to zero.
    """
    n, M, p = params.n, params.M, params.p
    size = 1 << n
    kmax = min(size, math.floor(1 / p))
    if _small(p, M * (kmax + 1)):
        total = Fraction(0)
        for k in range(kmax + 1):
            total += (-1) ** k * math.comb(size, k) * (1 - k * p) ** M
        ie = total / 2
        trunc = (1 - size * (1 - p) ** M) / 2
        return Bounds(lower=_float(ie), log_lower=_ln(ie), exact_lower=ie,
                      extra={"truncated_lower": _float(trunc), "log_truncated_lower": _ln(trunc),
                             "exact_truncated_lower": f"{trunc.numerator}/{trunc.denominator}"})
    pf = float(p)
    terms = [(-1) ** k * math.exp(math.lgamma(size + 1) - math.lgamma(k + 1) - math.lgamma(size - k + 1)
                                  + M * math.log1p(-k * pf)) for k in range(kmax + 1)]
    ie = math.fsum(terms) / 2
    trunc = (1 - math.exp(n * math.log(2) + M * math.log1p(-pf))) / 2
    return Bounds(lower=ie, log_lower=_ln(ie), extra={"truncated_lower": trunc, "log_truncated_lower": _ln(trunc)})


def constant_leading_order(n: int, alpha_w: int = 1) -> float:
    """Leading-order size of ``1 - 2 P(constant)``: exp(n ln2 - (alpha_w/2)(4/3)^n)."""
    return math.exp(n * math.log(2) - alpha_w / 2 * (4 / 3) ** n)


def bound_entropy_upper(params: BoundParams) -> Bounds:
    """Upper bounds on P(f | beta) for any function with ``t`` ones, per polarity."""
    n, M, t = params.n, params.M, params.t
    size = 1 << n
    if t is None or not 1 <= t <= size - 1:
        raise ValueError(f"need 1 <= t <= 2**n - 1, got t={t}")

    def one(zeros: int) -> tuple[float, float, float]:
        expo = n - math.floor(math.log2(zeros))
        q = (2 / 3) ** expo
        log_exp_form = -M * q
        log_power_form = M * math.log1p(-q) if q < 1 else -math.inf
        return math.exp(log_exp_form), log_exp_form, log_power_form

    up_pos, log_pos, pow_pos = one(size - t)
    up_neg, log_neg, pow_neg = one(t)
    return Bounds(upper=max(up_pos, up_neg), log_upper=max(log_pos, log_neg),
                  extra={"upper_beta_pos": up_pos, "upper_beta_neg": up_neg,
                         "log_upper_beta_pos": log_pos, "log_upper_beta_neg": log_neg,
                         "log_power_form_beta_pos": pow_pos, "log_power_form_beta_neg": pow_neg})


def bound_1entropy(params: BoundParams) -> Bounds:
    """Bounds on P(f | beta = -1) for a function with a single true output."""
    n, M, p = params.n, params.M, params.p
    log_up = M * _ln(1 - p)
    log_lo = -n * n * math.log(3) + (M - n) * _ln(1 - p)
    exact_up = exact_lo = None
    if _small(1 - p, M) and n * n * n < 4 * EXACT_BITS:
        exact_up = (1 - p) ** M
        exact_lo = Fraction(1, 3 ** (n * n)) * (1 - p) ** (M - n)
    return Bounds(lower=math.exp(log_lo), upper=math.exp(log_up), log_lower=log_lo, log_upper=log_up,
                  exact_lower=exact_lo, exact_upper=exact_up)


def bound_parity(params: BoundParams) -> Bounds:
    """Bounds on P(k-parity) from placing the ``2**(k-1)`` required minterm clauses."""
    n, M = params.n, params.M
    k = _validate_k(params)
    j = 1 << (k - 1)
    ratio = Fraction(j, 3 ** k)
    log_lo = -n * j * math.log(3) + math.lgamma(j + 1) + (M - j) * _ln(ratio)
    log_up = M * _ln(ratio)
    exact_lo = exact_up = None
    if _small(ratio, M) and n * j < 4 * EXACT_BITS:
        exact_lo = Fraction(math.factorial(j), 3 ** (n * j)) * ratio ** (M - j)
        exact_up = ratio ** M
    return Bounds(lower=math.exp(log_lo), upper=math.exp(log_up), log_lower=log_lo, log_upper=log_up,
                  exact_lower=exact_lo, exact_upper=exact_up,
                  extra={"scaling_exponent": params.alpha_w * k * (1 << (n - 1)),
                         "log_upper_slope_per_alpha": (1 << (n - 1)) * _ln(ratio)})


def bound_ksparse(params: BoundParams) -> Bounds:
    """Bounds on P(f) for a function depending on exactly ``k`` inputs."""
    n, M = params.n, params.M
    k = _validate_k(params)
    base = 1 - Fraction(2, 3) ** k + Fraction(1, 3 ** n)
    log_up = M * _ln(base)
    log_lo = -n * k * math.log(3) + (M - k) * _ln(base)
    exact_lo = exact_up = None
    if _small(base, M):
        exact_up = base ** M
        exact_lo = Fraction(1, 3 ** (n * k)) * base ** (M - k)
    return Bounds(lower=math.exp(log_lo), upper=math.exp(log_up), log_lower=log_lo, log_upper=log_up,
                  exact_lower=exact_lo, exact_upper=exact_up,
                  extra={"leading_log": -M * (2 / 3) ** k})


def bound_qr(q: int, r: int, M: int, N: int) -> Bounds:
    """P(every one of q marked items is drawn and none of r forbidden items is), M uniform draws from N.

    ``lower`` is the union-bound form, ``exact_lower`` / ``extra['exact_sum']``
    the inclusion-exclusion value.
    """
    if min(q, r) < 0 or M < 1 or N < 1 or q + r > N:
        raise ValueError(f"invalid (q={q}, r={r}, M={M}, N={N})")
    exact = sum((Fraction((-1) ** i * math.comb(q, i)) * Fraction(N - r - i, N) ** M for i in range(q + 1)),
                Fraction(0))
    if N - r > 0:
        union = Fraction(N - r, N) ** M * (1 - q * Fraction(N - r - 1, N - r) ** M)
    else:
        union = Fraction(0)
    return Bounds(lower=_float(union), log_lower=_ln(union), exact_lower=exact,
                  extra={"exact_sum": _float(exact), "union_lower": _float(union)})


def pac_bayes_bound(p_f: float, m: int, delta: float) -> float:
    """Realisable PAC-Bayes expected error bound for a function of prior mass ``p_f``.

    ``1 - exp(-(ln(1/p_f) + ln(2m/delta)) / (m - 1))``, clamped to [0, 1];
    non-increasing in ``p_f``.
    """
    if not 0 < p_f <= 1:
        raise ValueError(f"p_f must be in (0, 1], got {p_f}")
    if m < 2 or int(m) != m:
        raise ValueError(f"m must be an integer >= 2, got {m}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    val = -math.expm1(-(-math.log(p_f) + math.log(2 * m / delta)) / (m - 1))
    return min(1.0, max(0.0, val))


def optimal_width(n: int) -> float:
    """Width multiplier at which the prior mass of constants and of 1-entropy balance."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 2 * n * math.log(2) * 0.75 ** n


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndependenceCurve:
    n: int
    t: int
    trials: int
    accepted_mean: float
    accepted_std: float
    model_accepted: float

    @property
    def forbidden_mean(self) -> float:
        return 1 - self.accepted_mean

    @property
    def model_forbidden(self) -> float:
        return 1 - self.model_accepted


def entropy_independence_curve(n: int, t: int, trials: int = 100, rng=None) -> IndependenceCurve:
    """Fraction of clauses compatible with a random weight-``t`` function.

    A nonzero clause is forbidden when it fires on some zero output; the
    independence model predicts an accepted fraction of ``(1 - p)**(2**n - t)``.
    """
    from .sampling import clause_tables

    if n > 5:
        raise BudgetExceeded(f"exhaustive clause checks are limited to n <= 5, got n={n}")
    size = 1 << n
    if not 0 <= t <= size:
        raise ValueError(f"need 0 <= t <= 2**n, got t={t}")
    rng = as_generator(rng)
    tabs = np.array(clause_tables(n), dtype=np.uint64)
    fracs = np.empty(trials)
    for i in range(trials):
        ones = rng.choice(size, size=t, replace=False)
        zero_mask = (1 << size) - 1
        for o in ones:
            zero_mask ^= 1 << int(o)
        forbidden = np.count_nonzero(tabs & np.uint64(zero_mask))
        fracs[i] = 1 - forbidden / tabs.size
    model = float((1 - p_clause_covers(n)) ** (size - t))
    return IndependenceCurve(n, t, trials, float(fracs.mean()), float(fracs.std()), model)
