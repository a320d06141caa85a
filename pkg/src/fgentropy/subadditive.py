"""Subadditive functionals over subset functions and their normalized
limits along the chain.

A functional is admissible when it is nonnegative, bounded by C times
the subset size, constant along sub-equivalence-relation classes, and
subadditive under disjoint decompositions.  The checker samples those
conditions; the harness computes the normalized chain sequence and
compares it against the infimum over supplied candidate subrelations.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from . import rng
from .entropy import refined_entropy
from .errors import StructureError
from .hyperfinite import (
    FiniteRelationModel,
    SubsetFunction,
    chain_sf,
    model_cocycle,
    partition_sf,
)
from .shifts import PartitionLabeler, ProbabilityVector

Value = float


@dataclass(frozen=True)
class SubadditiveFunctional:
    """evaluator(sf, y) must be a nonnegative real; bound_constant is the
    constant C in the size bound."""

    name: str
    evaluator: Callable[[SubsetFunction, bytes], Value]
    bound_constant: float


def cardinality_functional() -> SubadditiveFunctional:
    """The size functional; subadditivity holds with equality."""
    return SubadditiveFunctional(
        name="cardinality",
        evaluator=lambda sf, y: float(len(sf(y))),
        bound_constant=1.0,
    )


def squared_cardinality_functional() -> SubadditiveFunctional:
    """|A|^2 with the (false) claim C = 1; the boundedness check must
    catch it on any subset of size >= 2."""
    return SubadditiveFunctional(
        name="cardinality-squared",
        evaluator=lambda sf, y: float(len(sf(y)) ** 2),
        bound_constant=1.0,
    )


def entropy_functional(
    model: FiniteRelationModel,
    labeler: PartitionLabeler,
    p: ProbabilityVector,
    mode: str = "auto",
    m_samples: int = 2_000,
    seed: int = 0,
) -> SubadditiveFunctional:
    """h^P on the tail model: the Shannon entropy of the partition
    refined along the return words of the subset, read at the base
    point.  Bounded by H of the marginal times the subset size."""
    from .entropy import marginal_entropy

    def evaluator(sf: SubsetFunction, y: bytes) -> float:
        keys = [model_cocycle(model, w, y) for w in sorted(sf(y))]
        est = refined_entropy(
            keys,
            labeler,
            p,
            model.rank,
            mode=mode,
            m_samples=m_samples,
            seed=rng.derive_seed(seed, "hP", y.hex()),
        )
        return est.value

    return SubadditiveFunctional(
        name=f"hP-{labeler.descriptor}",
        evaluator=evaluator,
        bound_constant=marginal_entropy(labeler, p),
    )


# ---------------------------------------------------------------------------
# the Definition checker


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    checks_run: int
    violation: Violation | None


def _random_subset_function(
    model: FiniteRelationModel, rand: random.Random, max_size: int = 6
) -> SubsetFunction:
    mapping = {}
    for y in model.points:
        k = rand.randint(1, max_size)
        picks = rand.sample(model.points, min(k, len(model.points)))
        mapping[y] = frozenset(picks) | {y}
    return SubsetFunction(model, mapping)


def _random_subequivalence(model: FiniteRelationModel, rand: random.Random) -> SubsetFunction:
    """A random refinement of a random chain level: split each class
    into one or two blocks."""
    n = rand.randint(0, model.level_count - 1)
    blocks = []
    for cls in model.classes_at(n):
        ms = list(model.members(cls))
        if len(ms) > 1 and rand.random() < 0.5:
            cut = rand.randint(1, len(ms) - 1)
            rand.shuffle(ms)
            blocks.append(ms[:cut])
            blocks.append(ms[cut:])
        else:
            blocks.append(ms)
    return partition_sf(model, blocks)


def check_subadditive(
    functional: SubadditiveFunctional,
    model: FiniteRelationModel,
    trials: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
) -> CheckReport:
    """Sampled audit of the three testable conditions: boundedness,
    invariance along sub-equivalence classes, subadditivity on disjoint
    decompositions.  Returns the first counterexample found."""
    rand = random.Random(seed)
    ev = functional.evaluator
    c = functional.bound_constant
    checks = 0

    for t in range(trials):
        # boundedness on a random subset function at a random point
        sf = _random_subset_function(model, rand)
        y = rand.choice(model.points)
        val = ev(sf, y)
        checks += 1
        if val < -tol or val > c * len(sf(y)) + tol:
            return CheckReport(
                False,
                checks,
                Violation(
                    "boundedness",
                    f"value {val} outside [0, C*{len(sf(y))}] = [0, {c * len(sf(y))}] at {y!r}",
                ),
            )

        # invariance on a random sub-equivalence relation
        t_sf = _random_subequivalence(model, rand)
        y = rand.choice(model.points)
        cls = sorted(t_sf(y))
        if len(cls) > 1:
            z = rand.choice([w for w in cls if w != y])
            vy, vz = ev(t_sf, y), ev(t_sf, z)
            checks += 1
            if abs(vy - vz) > tol:
                return CheckReport(
                    False,
                    checks,
                    Violation("invariance", f"value {vy} at {y!r} vs {vz} at {z!r}"),
                )

        # subadditivity on a random disjoint decomposition
        sf = _random_subset_function(model, rand)
        y = rand.choice(model.points)
        whole = sorted(sf(y))
        pieces: list[list[bytes]] = []
        for w in whole:
            if pieces and rand.random() < 0.6:
                rand.choice(pieces).append(w)
            else:
                pieces.append([w])
        lhs = ev(sf, y)
        rhs = 0.0
        for piece in pieces:
            z = piece[0]
            piece_sf = _piece_subset_function(model, z, piece)
            rhs += ev(piece_sf, z)
        checks += 1
        if lhs > rhs + tol:
            return CheckReport(
                False,
                checks,
                Violation(
                    "subadditivity",
                    f"value {lhs} exceeds decomposition sum {rhs} over {len(pieces)} pieces",
                ),
            )
    return CheckReport(True, checks, None)


def _piece_subset_function(
    model: FiniteRelationModel, z: bytes, piece: Sequence[bytes]
) -> SubsetFunction:
    mapping = {y: frozenset([y]) for y in model.points}
    mapping[z] = frozenset(piece)
    return SubsetFunction(model, mapping)


# ---------------------------------------------------------------------------
# the normalized-limit harness


@dataclass(frozen=True)
class HarnessRow:
    n: int
    s_n: float
    stderr: float | None
    estimator: str
    gap: float


@dataclass(frozen=True)
class HarnessReport:
    rows: tuple[HarnessRow, ...]
    infimum: float
    infimum_source: str
    monotone_within_noise: bool


def normalized_value(
    functional: SubadditiveFunctional, model: FiniteRelationModel, t_sf: SubsetFunction
) -> float:
    """The weighted average of value/|class| over the ground set, one
    evaluation per class (invariance makes per-point evaluation
    redundant; the checker audits that separately)."""
    total = 0.0
    seen: set[frozenset[bytes]] = set()
    for y in model.points:
        cls = t_sf(y)
        if cls in seen:
            continue
        seen.add(cls)
        val = functional.evaluator(t_sf, min(cls))
        total += float(model.weight) * val  # times |cls| / |cls|
    return total


def subadditive_limit_harness(
    functional: SubadditiveFunctional,
    model: FiniteRelationModel,
    chain_levels: Sequence[int],
    candidates: Sequence[tuple[str, SubsetFunction]],
    noise_scale: float | None = None,
) -> HarnessReport:
    """s_n along the chain against the infimum over candidate
    subrelations.

    Always asserts the one-sided bound s_n >= inf (the chain levels are
    injected into the candidate pool, reusing the very same values, so
    the bound is stable under estimation noise).  The decreasing trend
    is reported as monotone-within-noise, never asserted.
    """
    values: dict[int, float] = {}
    rows = []
    for n in chain_levels:
        model.check_level(n)
        values[n] = normalized_value(functional, model, chain_sf(model, n))

    pool: list[tuple[str, float]] = [(f"chain-{n}", values[n]) for n in chain_levels]
    for name, t_sf in candidates:
        _assert_subequivalence(t_sf)
        pool.append((name, normalized_value(functional, model, t_sf)))

    inf_name, inf_val = min(pool, key=lambda kv: kv[1])
    noise = noise_scale if noise_scale is not None else 0.0
    monotone = True
    prev = None
    for n in chain_levels:
        s_n = values[n]
        if prev is not None and s_n > prev + 3.0 * noise + 1e-12:
            monotone = False
        prev = s_n
        if s_n < inf_val - 1e-9 - 3.0 * noise:
            raise StructureError(
                f"normalized value at level {n} fell below the candidate infimum: "
                f"{s_n} < {inf_val} ({inf_name})"
            )
        rows.append(
            HarnessRow(
                n=n,
                s_n=s_n,
                stderr=noise_scale,
                estimator="exact" if noise_scale is None else "sampled",
                gap=s_n - inf_val,
            )
        )
    return HarnessReport(
        rows=tuple(rows),
        infimum=inf_val,
        infimum_source=inf_name,
        monotone_within_noise=monotone,
    )


def _assert_subequivalence(t_sf: SubsetFunction) -> None:
    for y in t_sf.model.points:
        cls = t_sf(y)
        if y not in cls:
            raise StructureError(f"candidate subrelation not reflexive at {y!r}")
        for z in cls:
            if t_sf(z) != cls:
                raise StructureError("candidate subrelation is not an equivalence relation")


def interior_decomposition_check(
    functional: SubadditiveFunctional,
    model: FiniteRelationModel,
    t_sf: SubsetFunction,
    n: int,
    y: bytes,
    tol: float = 1e-9,
) -> tuple[float, float]:
    """The interior/boundary split used to pass from candidate values to
    chain values: value at the level-n class is at most the summed
    candidate values over the distinct interior classes plus C times the
    boundary count.  Returns (lhs, rhs); raises when the inequality
    fails."""
    _assert_subequivalence(t_sf)
    cls_members = set(model.members(model.class_of(y, n)))
    interior: list[bytes] = []
    seen: set[frozenset[bytes]] = set()
    boundary = 0
    for z in sorted(cls_members):
        tc = t_sf(z)
        if tc <= cls_members:
            if tc not in seen:
                seen.add(tc)
                interior.append(z)
        else:
            boundary += 1
    lhs = functional.evaluator(chain_sf(model, n), y)
    rhs = (
        math.fsum(functional.evaluator(t_sf, z) for z in interior)
        + functional.bound_constant * boundary
    )
    if lhs > rhs + tol:
        raise StructureError(
            f"interior decomposition bound failed at {y!r}: {lhs} > {rhs}"
        )
    return lhs, rhs


def coordinate_block_relation(model: FiniteRelationModel, positions: Sequence[int]) -> SubsetFunction:
    """Candidate subrelation: points equivalent when they agree outside
    the given coordinate positions.  Positions beyond the admissibility
    coupling make this a genuine non-chain candidate on the odometer;
    on the tail model the blocks are the admissible solutions."""
    pos = set(positions)
    for q in pos:
        if not 0 <= q < model.level_count:
            raise StructureError(f"coordinate position {q} out of range")
    groups: dict[bytes, list[bytes]] = {}
    for y in model.points:
        key = bytes(b for i, b in enumerate(y) if i not in pos)
        groups.setdefault(key, []).append(y)
    return partition_sf(model, groups.values())
