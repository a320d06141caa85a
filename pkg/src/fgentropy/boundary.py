"""The boundary of F_r at finite precision.

A boundary point is an infinite no-backtracking sequence of letters;
the workbench only ever holds a finite prefix of one.  Every operation
declares how much depth it consumes and raises
:class:`~fgentropy.errors.PrecisionError` when the prefix is too
shallow.  Silent truncation is the one bug this module is built to
exclude.

Internally all logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import rng
from .errors import PrecisionError, StructureError
from .words import ReducedWord, invert, invert_code, multiply

# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class BoundaryPrefix:
    """The first ``depth`` letters of a boundary point.

    Same packed-code convention as :class:`~fgentropy.words.ReducedWord`;
    admissibility (no letter followed by its inverse) is exactly
    reducedness, checked on construction.
    """

    codes: bytes
    rank: int

    def __post_init__(self) -> None:
        if self.rank < 2:
            raise StructureError(f"rank must be >= 2, got {self.rank}")
        if len(self.codes) < 1:
            raise StructureError("boundary prefix needs depth >= 1")
        limit = 2 * self.rank
        prev = -2
        for c in self.codes:
            if c >= limit:
                raise StructureError(f"letter code {c} out of range for rank {self.rank}")
            if c == prev ^ 1:
                raise StructureError("prefix not admissible: adjacent inverse letters")
            prev = c

    @property
    def depth(self) -> int:
        return len(self.codes)

    def prefix_word(self, k: int) -> ReducedWord:
        """The group element spelled by the first k letters."""
        if k > self.depth:
            raise PrecisionError(f"prefix of length {k} requested, depth is {self.depth}")
        return ReducedWord(self.codes[:k], self.rank)


@dataclass(frozen=True)
class CylinderMeasure:
    """nu-mass of a depth-n cylinder, stored as a natural log."""

    log_measure: float
    depth: int


# ---------------------------------------------------------------------------
# measure


def cylinder_measure(n: int, r: int) -> CylinderMeasure:
    """nu of the cylinder fixing the first n letters: (2r-1)^(1-n) / (2r).

    All depth-n cylinders have the same mass; nu is the uniform measure
    on no-backtracking sequences.
    """
    if n < 1:
        raise StructureError(f"cylinder depth must be >= 1, got {n}")
    if r < 2:
        raise StructureError(f"rank must be >= 2, got {r}")
    log_m = -(n - 1) * math.log(2 * r - 1) - math.log(2 * r)
    return CylinderMeasure(log_measure=log_m, depth=n)


def cylinder_fraction(n: int, r: int) -> Fraction:
    """Exact rational form of :func:`cylinder_measure`."""
    if n < 1:
        raise StructureError(f"cylinder depth must be >= 1, got {n}")
    return Fraction(1, 2 * r * (2 * r - 1) ** (n - 1))


def sample_prefix(depth: int, r: int, seed: int) -> BoundaryPrefix:
    """Draw a nu-distributed prefix: first letter uniform over 2r codes,
    each later letter uniform over the 2r-1 admissible continuations.

    Deterministic in (depth, r, seed).
    """
    if depth < 1:
        raise StructureError(f"depth must be >= 1, got {depth}")
    codes = bytearray()
    first = rng.uniform_index(seed, b"xi|0", 2 * r)
    codes.append(first)
    for i in range(1, depth):
        banned = codes[-1] ^ 1
        pick = rng.uniform_index(seed, b"xi|%d" % i, 2 * r - 1)
        # admissible codes in ascending order skip the banned one
        code = pick if pick < banned else pick + 1
        codes.append(code)
    return BoundaryPrefix(bytes(codes), r)


# ---------------------------------------------------------------------------
# the action


def _cancellation_count(g: ReducedWord, xi: BoundaryPrefix) -> int:
    """Largest k <= |g| with xi_i = inverse of g's (n+1-i)-th letter for all i <= k."""
    n = len(g)
    k = 0
    while k < n and xi.codes[k] == invert_code(g.codes[n - 1 - k]):
        k += 1
    return k


def _require_depth(g: ReducedWord, xi: BoundaryPrefix) -> None:
    if g.rank != xi.rank:
        raise StructureError(f"rank mismatch: {g.rank} vs {xi.rank}")
    if xi.depth < len(g) + 1:
        raise PrecisionError(
            f"acting by a word of length {len(g)} needs depth >= {len(g) + 1}, "
            f"prefix has depth {xi.depth}"
        )


def act(g: ReducedWord, xi: BoundaryPrefix) -> tuple[BoundaryPrefix, int]:
    """Apply g to the boundary point: prepend g's letters, cancel k of them
    against the head of xi.

    Output depth is |g| + depth - 2k, capped at depth: the action never
    claims more precision than the input carried.
    """
    _require_depth(g, xi)
    n = len(g)
    k = _cancellation_count(g, xi)
    out = g.codes[: n - k] + xi.codes[k:]
    out_depth = min(len(out), xi.depth)
    return BoundaryPrefix(out[:out_depth], xi.rank), k


def radon_nikodym_log(g: ReducedWord, xi: BoundaryPrefix) -> float:
    """log of d(nu o g)/d nu at xi: (2k - |g|) log(2r - 1)."""
    _require_depth(g, xi)
    k = _cancellation_count(g, xi)
    return (2 * k - len(g)) * math.log(2 * xi.rank - 1)


# ---------------------------------------------------------------------------
# tail classes and the cocycle


def tail_class(xi: BoundaryPrefix, n: int) -> list[BoundaryPrefix]:
    """All admissible prefixes agreeing with xi strictly beyond coordinate n.

    Enumerated by choosing letter n (must differ from the inverse of
    letter n+1), then letter n-1, and so on backwards, each in ascending
    code order.  Deterministic; cardinality (2r-1)^n.
    """
    if n < 0:
        raise StructureError(f"tail level must be >= 0, got {n}")
    if n >= xi.depth:
        raise PrecisionError(f"tail level {n} needs depth > {n}, prefix has depth {xi.depth}")
    if n == 0:
        return [xi]
    limit = 2 * xi.rank
    tail = xi.codes[n:]
    out: list[BoundaryPrefix] = []

    def rec(suffix: bytes) -> None:
        # letter positions n, n-1, ..., 1 are prepended one at a time
        if len(suffix) == xi.depth:
            out.append(BoundaryPrefix(suffix, xi.rank))
            return
        banned = suffix[0] ^ 1
        for c in range(limit):
            if c == banned:
                continue
            rec(bytes([c]) + suffix)

    rec(tail)
    return out


def fundamental_cocycle(eta: BoundaryPrefix, xi: BoundaryPrefix, k: int) -> ReducedWord:
    """The return word alpha(eta, xi) = eta_1..eta_k xi_k^-1..xi_1^-1.

    Sends xi to eta: act(result, xi) agrees with eta on the available
    depth.  Requires (eta, xi) tail-equivalent at level k.
    """
    if eta.rank != xi.rank:
        raise StructureError(f"rank mismatch: {eta.rank} vs {xi.rank}")
    if k < 0:
        raise StructureError(f"level must be >= 0, got {k}")
    d = min(eta.depth, xi.depth)
    if k >= d:
        raise PrecisionError(f"cocycle at level {k} needs depth > {k} on both arguments")
    if eta.codes[k:d] != xi.codes[k:d]:
        raise StructureError(f"prefixes do not agree beyond coordinate {k}")
    u = eta.prefix_word(k)
    v = xi.prefix_word(k)
    return multiply(u, invert(v))


def horospherical_ball(xi: BoundaryPrefix, k: int) -> list[ReducedWord]:
    """Image of the level-k tail class under the cocycle based at xi.

    Exactly (2r-1)^k distinct even-length words of length <= 2k, all
    lying in the horoball at xi through the identity (busemann <= 0).
    """
    return [fundamental_cocycle(xi, eta, k) for eta in tail_class(xi, k)]


def busemann(xi: BoundaryPrefix, g: ReducedWord) -> int:
    """Tree Busemann value |g| - 2 * (common prefix length of g and xi).

    Zero on the horosphere through the identity, negative strictly
    inside the horoball based at xi.
    """
    if g.rank != xi.rank:
        raise StructureError(f"rank mismatch: {g.rank} vs {xi.rank}")
    if xi.depth < len(g):
        raise PrecisionError(f"busemann for |g| = {len(g)} needs depth >= {len(g)}")
    common = 0
    for a, b in zip(g.codes, xi.codes):
        if a != b:
            break
        common += 1
    return len(g) - 2 * common


def horoball_census(xi: BoundaryPrefix, k: int) -> dict:
    """Per-instance report on the horospherical ball.

    The ball always sits inside the horoball (busemann <= 0); how many
    of its elements land exactly on the horosphere (busemann = 0)
    varies with xi, so the count is recorded rather than asserted.
    """
    ball = horospherical_ball(xi, k)
    values = [busemann(xi, g) for g in ball]
    return {
        "k": k,
        "size": len(ball),
        "distinct": len({w.codes for w in ball}),
        "max_length": max(len(g) for g in ball),
        "all_even": all(len(g) % 2 == 0 for g in ball),
        "busemann_zero": sum(1 for v in values if v == 0),
        "busemann_negative": sum(1 for v in values if v < 0),
        "busemann_positive": sum(1 for v in values if v > 0),
    }
