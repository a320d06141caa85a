"""Shared helpers for the test suite.

The generators here deliberately avoid the library's own enumeration
paths (itertools products with an admissibility filter, stack-reduced
random code lists), so they double as independent oracles.
"""

from __future__ import annotations

import itertools
import random

from fgentropy.words import ReducedWord, reduce_codes


def random_reduced_word(rand: random.Random, rank: int, max_len: int = 6) -> ReducedWord:
    codes = [rand.randrange(2 * rank) for _ in range(rand.randint(0, max_len))]
    return reduce_codes(codes, rank)


def admissible_strings(length: int, rank: int) -> list[bytes]:
    """Every no-backtracking string of the given length, by brute filter."""
    out = []
    for tup in itertools.product(range(2 * rank), repeat=length):
        if all(tup[i + 1] != tup[i] ^ 1 for i in range(length - 1)):
            out.append(bytes(tup))
    return out
