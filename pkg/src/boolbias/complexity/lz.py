"""Lempel-Ziv (1976) phrase counts and the symmetrised complexity built on them."""

from __future__ import annotations

import math


def lz76_words(s: str) -> int:
    """Number of words in the LZ76 parse of ``s`` (the final word always counts).

    Scan after Kaspar and Schuster: extend the current word while it can be
    copied from a start position inside the already parsed prefix.
    """
    n = len(s)
    if n == 0:
        return 0
    if n == 1:
        return 1
    c, l, i, k, kmax = 1, 1, 0, 1, 1
    while True:
        if s[i + k - 1] == s[l + k - 1]:
            k += 1
            if l + k > n:
                c += 1
                break
        else:
            kmax = max(k, kmax)
            i += 1
            if i == l:
                c += 1
                l += kmax
                if l + 1 > n:
                    break
                i, k, kmax = 0, 1, 1
            else:
                k = 1
    return c


def k_lz(s: str) -> float:
    """``log2(len)/2 * (N_w(s) + N_w(reversed s))``, in bits."""
    if not s:
        raise ValueError("k_lz needs a non-empty string")
    return math.log2(len(s)) / 2 * (lz76_words(s) + lz76_words(s[::-1]))
