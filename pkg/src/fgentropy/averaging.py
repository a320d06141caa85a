"""Pointwise averages along exhaustions.

Two settings share one interface: finite models (exact rational means)
and the extended relation over shift-space points paired with boundary
points, whose level-n class is the cocycle orbit of the pair.

Ergodicity is never asserted.  The diagnostic reports how fast class
averages from independent starts pull together, which is evidence, not
proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import rng
from .boundary import BoundaryPrefix, fundamental_cocycle, sample_prefix, tail_class
from .errors import PrecisionError, StructureError
from .hyperfinite import FiniteRelationModel
from .shifts import LazyBernoulliPoint, ProbabilityVector, bernoulli_point, translate
from .words import ReducedWord


@dataclass(frozen=True)
class ExtendedClassElement:
    """A point of the extended relation: a shift-space point paired with
    the boundary point steering it."""

    point: LazyBernoulliPoint
    boundary: BoundaryPrefix


@dataclass(frozen=True)
class Observable:
    """A function of finitely many coordinates, with its footprint
    declared up front so the engine can check depth before sampling.

    fn receives an ExtendedClassElement; group_support lists the
    coordinates it may read through the point; boundary_depth is the
    deepest boundary letter it may read (0 for none).
    """

    fn: Callable[[ExtendedClassElement], float]
    group_support: tuple[ReducedWord, ...]
    boundary_depth: int
    name: str = ""


def extended_class(elem: ExtendedClassElement, n: int) -> list[ExtendedClassElement]:
    """The level-n class of (x, xi): apply the return word of each tail
    neighbor z to x and pair the result with z.  Class-injectivity of
    the cocycle keeps the enumeration faithful: exactly (2r-1)^n
    elements, projecting bijectively onto the tail class."""
    out = []
    for z in tail_class(elem.boundary, n):
        g = fundamental_cocycle(z, elem.boundary, n)
        out.append(ExtendedClassElement(translate(g, elem.point), z))
    return out


def required_depth(f: Observable, n: int) -> int:
    return max(n + 1, f.boundary_depth)


def class_average(
    f,
    element,
    n: int,
    model: FiniteRelationModel | None = None,
):
    """Arithmetic mean of f over the level-n class of element.

    Extended-relation flavor: element is an ExtendedClassElement and f
    an Observable (or bare callable).  Model flavor: element is a model
    point, model must be given, f maps points to values.  Rational or
    integer values produce an exact Fraction mean.
    """
    if isinstance(element, ExtendedClassElement):
        fn = f.fn if isinstance(f, Observable) else f
        if isinstance(f, Observable) and element.boundary.depth < required_depth(f, n):
            raise PrecisionError(
                f"observable {f.name or 'f'} at level {n} needs depth "
                f">= {required_depth(f, n)}, prefix has {element.boundary.depth}"
            )
        values = [fn(w) for w in extended_class(element, n)]
    else:
        if model is None:
            raise StructureError("model-point averages need the model argument")
        cls = model.class_of(element, n)
        values = [f(w) for w in model.members(cls)]
    if all(isinstance(v, (int, Fraction)) for v in values):
        return Fraction(sum(values), len(values))
    return math.fsum(values) / len(values)


def indicator_symbol_observable(rank: int, symbol: int) -> Observable:
    """1 when the shift point reads the given symbol at the identity."""
    from .shifts import symbol_at
    from .words import identity

    e = identity(rank)

    def fn(elem: ExtendedClassElement) -> int:
        return 1 if symbol_at(elem.point, e) == symbol else 0

    return Observable(fn=fn, group_support=(e,), boundary_depth=0, name=f"symbol=={symbol}")


def boundary_letter_observable(rank: int, position: int) -> Observable:
    """Reads boundary letter at 1-based position; deliberately not
    averaged out by the class enumeration when position stays beyond the
    varied coordinates, the canonical non-mixing test case."""

    def fn(elem: ExtendedClassElement) -> int:
        return elem.boundary.codes[position - 1] % 2

    return Observable(fn=fn, group_support=(), boundary_depth=position, name=f"letter@{position}")


@dataclass(frozen=True)
class SpreadRow:
    n: int
    class_size: int
    mean: float
    spread: float


@dataclass(frozen=True)
class SpreadReport:
    rows: tuple[SpreadRow, ...]
    starts: int
    flagged_non_decaying: bool


def ergodicity_diagnostic(
    f: Observable,
    num_start_points: int,
    n_max: int,
    rank: int,
    p: ProbabilityVector,
    seed: int,
    depth: int | None = None,
) -> SpreadReport:
    """Run class averages from independent (x, xi) starts and report the
    max pairwise spread at each level.

    Decaying spread is consistent with ergodicity of the extended
    relation; a final spread above half the initial one is flagged.
    Neither outcome is a certificate.
    """
    if num_start_points < 2:
        raise StructureError("need at least 2 start points to measure spread")
    d = depth if depth is not None else max(n_max + 1, f.boundary_depth)
    starts = []
    for s in range(num_start_points):
        x = bernoulli_point(rng.derive_seed(seed, "erg-x", s), rank, p)
        xi = sample_prefix(d, rank, rng.derive_seed(seed, "erg-xi", s))
        starts.append(ExtendedClassElement(x, xi))
    rows = []
    for n in range(n_max + 1):
        avgs = [float(class_average(f, elem, n)) for elem in starts]
        rows.append(
            SpreadRow(
                n=n,
                class_size=(2 * rank - 1) ** n,
                mean=math.fsum(avgs) / len(avgs),
                spread=max(avgs) - min(avgs),
            )
        )
    first_positive = next((r.spread for r in rows if r.spread > 0), 0.0)
    final = rows[-1].spread
    flagged = first_positive > 0 and final > 0.5 * first_positive
    return SpreadReport(rows=tuple(rows), starts=num_start_points, flagged_non_decaying=flagged)


def martingale_check(
    elem: ExtendedClassElement, f: Observable, n: int, m: int
) -> tuple[Fraction, Fraction]:
    """Tower property at finite scale: the level-m average equals the
    mean of level-n averages over the level-n subclasses partitioning
    the level-m class.  Returns both sides as exact fractions (f must
    return rationals)."""
    if not n < m:
        raise StructureError(f"need n < m, got {n} >= {m}")
    big = class_average(f, elem, m)
    subclasses: dict[bytes, list[ExtendedClassElement]] = {}
    for w in extended_class(elem, m):
        # level-n subclass is determined by the boundary letters beyond n
        subclasses.setdefault(w.boundary.codes[n:], []).append(w)
    partial = []
    for group in subclasses.values():
        vals = [Fraction(f.fn(w)) for w in group]
        partial.append(Fraction(sum(vals), len(vals)))
    nested = Fraction(sum(partial), len(partial))
    return Fraction(big), nested
