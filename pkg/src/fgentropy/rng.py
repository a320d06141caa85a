"""Deterministic keyed randomness.

Everything random in the workbench flows through a keyed 64-bit hash of
canonical byte strings (counter-based, no mutable generator state), so
a run is reproducible from its master seed alone and independent
streams are derived by token splitting rather than by jumping a shared
generator.
"""

from __future__ import annotations

import hashlib
from bisect import bisect_right
from typing import Sequence

MASK64 = (1 << 64) - 1
_SEP = b"\x1f"


def mix64(key: int, data: bytes) -> int:
    """Keyed hash of ``data``, uniform on [0, 2^64)."""
    h = hashlib.blake2b(data, key=(key & MASK64).to_bytes(8, "little"), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def unit_uniform(key: int, data: bytes) -> float:
    """Map the keyed hash to [0, 1)."""
    return mix64(key, data) / 2.0**64


def derive_seed(seed: int, *tokens) -> int:
    """Child seed from a master seed and a path of tokens.

    Distinct token paths give computationally independent streams.
    """
    blob = _SEP.join(str(t).encode("utf-8") for t in tokens)
    return mix64(seed, b"derive" + _SEP + blob)


def uniform_index(key: int, data: bytes, m: int) -> int:
    """Uniform draw from {0, ..., m-1}.

    Plain modulo; the bias is at most m / 2^64, far below anything the
    statistical tests can see.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    return mix64(key, data) % m


def cumulative(weights: Sequence[float]) -> list[float]:
    """Cumulative sums for inverse-CDF sampling, last entry forced to 1."""
    acc = 0.0
    out = []
    for w in weights:
        acc += w
        out.append(acc)
    out[-1] = 1.0
    return out


def inverse_cdf(cum: Sequence[float], u: float) -> int:
    """Index of the atom containing u in [0, 1)."""
    return bisect_right(cum, u)
