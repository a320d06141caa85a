"""Exact arithmetic of reduced words in the free group F_r.

Letters are packed into single-byte codes: the generator with 1-based
index ``i`` gets code ``2*(i-1)`` and its inverse gets ``2*(i-1)+1``,
so inverting a letter is ``code ^ 1``.  A word is an immutable ``bytes``
of letter codes together with the rank ``r``.

This byte packing is the canonical encoding of a word.  It is stable
across runs and platforms and is used verbatim as key material for the
pseudorandom symbol fields in :mod:`fgentropy.shifts`, so it must never
change.

>>> u = parse_word("a1a2", 2)
>>> format_word(multiply(u, invert(u)))
'e'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .errors import ResourceLimitError, StructureError

# Default radius cap for sphere/ball enumeration.  At r=2 the ball of
# radius 12 holds 1_594_324 words; callers may override explicitly.
DEFAULT_RADIUS_CAP = 12


@dataclass(frozen=True)
class Generator:
    """A single letter: generator ``index`` (1-based) with ``sign`` +1 or -1."""

    index: int
    sign: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise StructureError(f"generator index must be >= 1, got {self.index}")
        if self.sign not in (1, -1):
            raise StructureError(f"generator sign must be +1 or -1, got {self.sign}")

    def inverse(self) -> "Generator":
        return Generator(self.index, -self.sign)

    @property
    def code(self) -> int:
        return 2 * (self.index - 1) + (0 if self.sign == 1 else 1)

    @staticmethod
    def from_code(code: int) -> "Generator":
        return Generator(code // 2 + 1, 1 if code % 2 == 0 else -1)


def invert_code(code: int) -> int:
    """Letter-level inversion on packed codes."""
    return code ^ 1


@dataclass(frozen=True)
class ReducedWord:
    """An element of F_r in reduced form.

    ``codes`` is the canonical byte encoding; ``rank`` is r >= 2.
    Instances are immutable and hashable, so they serve as dict keys
    throughout the workbench.
    """

    codes: bytes
    rank: int

    def __post_init__(self) -> None:
        if self.rank < 2:
            raise StructureError(f"rank must be >= 2, got {self.rank}")
        limit = 2 * self.rank
        prev = -2
        for c in self.codes:
            if c >= limit:
                raise StructureError(f"letter code {c} out of range for rank {self.rank}")
            if c == prev ^ 1:
                raise StructureError("word is not reduced: adjacent inverse letters")
            prev = c

    def __len__(self) -> int:
        return len(self.codes)

    def letters(self) -> tuple[Generator, ...]:
        return tuple(Generator.from_code(c) for c in self.codes)

    def __repr__(self) -> str:
        return f"ReducedWord({format_word(self)!r}, rank={self.rank})"


def identity(rank: int) -> ReducedWord:
    """The empty word e."""
    return ReducedWord(b"", rank)


def word_from_codes(codes: bytes, rank: int) -> ReducedWord:
    return ReducedWord(bytes(codes), rank)


def word_from_letters(letters, rank: int) -> ReducedWord:
    return ReducedWord(bytes(g.code for g in letters), rank)


_TOKEN = re.compile(r"([a-zA-Z])(\d+)")


def parse_word(text: str, rank: int) -> ReducedWord:
    """Parse compact word syntax: ``a1`` is the first generator, ``A1``
    its inverse, concatenation is juxtaposition, ``e`` is the identity.

    >>> parse_word("a1A2", 2).codes
    b'\\x00\\x03'
    """
    text = text.strip()
    if text in ("e", ""):
        return identity(rank)
    pos = 0
    codes = bytearray()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise StructureError(f"cannot parse word syntax at {text[pos:]!r}")
        letter, digits = m.group(1), m.group(2)
        if letter.lower() != "a":
            raise StructureError(f"unknown generator letter {letter!r} (use a/A)")
        index = int(digits)
        if not 1 <= index <= rank:
            raise StructureError(f"generator index {index} out of range for rank {rank}")
        sign = 1 if letter.islower() else -1
        codes.append(Generator(index, sign).code)
        pos = m.end()
    return ReducedWord(bytes(codes), rank)


def format_word(u: ReducedWord) -> str:
    """Inverse of :func:`parse_word`; the identity prints as ``e``."""
    if len(u.codes) == 0:
        return "e"
    parts = []
    for c in u.codes:
        g = Generator.from_code(c)
        parts.append(("a" if g.sign == 1 else "A") + str(g.index))
    return "".join(parts)


def _check_ranks(u: ReducedWord, v: ReducedWord) -> None:
    if u.rank != v.rank:
        raise StructureError(f"rank mismatch: {u.rank} vs {v.rank}")


def multiply(u: ReducedWord, v: ReducedWord) -> ReducedWord:
    """The group law u*v with free reduction.

    Both inputs are reduced, so cancellation happens only at the
    junction: strip matching inverse pairs, then concatenate.
    """
    _check_ranks(u, v)
    i = len(u.codes)
    j = 0
    n = len(v.codes)
    while i > 0 and j < n and u.codes[i - 1] == v.codes[j] ^ 1:
        i -= 1
        j += 1
    return ReducedWord(u.codes[:i] + v.codes[j:], u.rank)


def invert(u: ReducedWord) -> ReducedWord:
    """u^-1: reverse the letters and flip each sign."""
    return ReducedWord(bytes(c ^ 1 for c in reversed(u.codes)), u.rank)


def distance(u: ReducedWord, v: ReducedWord) -> int:
    """Word metric d(u, v) = |u^-1 v|."""
    _check_ranks(u, v)
    return len(multiply(invert(u), v))


def reduce_codes(codes, rank: int) -> ReducedWord:
    """Naive stack-based free reduction of an arbitrary code sequence.

    Independent of :func:`multiply`; kept as the test oracle for the
    group law.
    """
    stack: list[int] = []
    for c in codes:
        if stack and stack[-1] == c ^ 1:
            stack.pop()
        else:
            stack.append(c)
    return ReducedWord(bytes(stack), rank)


def sphere_size(n: int, r: int) -> int:
    """|S_n| = 2r(2r-1)^(n-1) for n >= 1, and 1 for n = 0."""
    if n == 0:
        return 1
    return 2 * r * (2 * r - 1) ** (n - 1)


def _grow(words: list[ReducedWord], rank: int) -> list[ReducedWord]:
    limit = 2 * rank
    out = []
    for w in words:
        last = w.codes[-1] if w.codes else None
        for c in range(limit):
            if last is not None and c == last ^ 1:
                continue
            out.append(ReducedWord(w.codes + bytes([c]), rank))
    return out


def enumerate_sphere(n: int, r: int, radius_cap: int = DEFAULT_RADIUS_CAP) -> list[ReducedWord]:
    """All reduced words of length exactly n, in lexicographic code order.

    Raises :class:`ResourceLimitError` beyond ``radius_cap``; pass a
    larger cap explicitly to override.
    """
    if n < 0:
        raise StructureError(f"sphere radius must be >= 0, got {n}")
    if n > radius_cap:
        raise ResourceLimitError(
            f"sphere radius {n} exceeds cap {radius_cap}; pass radius_cap explicitly to override"
        )
    words = [identity(r)]
    for _ in range(n):
        words = _grow(words, r)
    return words


def enumerate_ball(n: int, r: int, radius_cap: int = DEFAULT_RADIUS_CAP) -> list[ReducedWord]:
    """All reduced words of length <= n, spheres in increasing radius."""
    if n < 0:
        raise StructureError(f"ball radius must be >= 0, got {n}")
    if n > radius_cap:
        raise ResourceLimitError(
            f"ball radius {n} exceeds cap {radius_cap}; pass radius_cap explicitly to override"
        )
    out = [identity(r)]
    shell = [identity(r)]
    for _ in range(n):
        shell = _grow(shell, r)
        out.extend(shell)
    return out


def iter_sphere(n: int, r: int) -> Iterator[ReducedWord]:
    """Generator form of :func:`enumerate_sphere`, no cap, lazy."""
    if n < 0:
        raise StructureError(f"sphere radius must be >= 0, got {n}")

    def rec(prefix: bytearray, remaining: int) -> Iterator[ReducedWord]:
        if remaining == 0:
            yield ReducedWord(bytes(prefix), r)
            return
        last = prefix[-1] if prefix else None
        for c in range(2 * r):
            if last is not None and c == last ^ 1:
                continue
            prefix.append(c)
            yield from rec(prefix, remaining - 1)
            prefix.pop()

    yield from rec(bytearray(), n)
