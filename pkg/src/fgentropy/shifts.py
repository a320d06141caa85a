"""Bernoulli shifts over F_r with lazily realized coordinates.

A point of the shift space is never materialized.  It is a pair
(seed, translation word): the symbol at group element h is a keyed hash
of the canonical bytes of translation*h pushed through the inverse CDF
of the marginal distribution.  Translating by g is a pure O(|g|)
operation on the translation word, and the action law
(g.x)(h) = x(g^-1 h) holds identically, not just in distribution.

Symbols and partition labels are 0-based integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Mapping

from . import rng
from .errors import InvariantViolation, ResourceLimitError, StructureError
from .words import ReducedWord, identity, invert, multiply

# Exact block-code atoms enumerate alphabet assignments on the union of
# shifted windows; both caps guard that enumeration.
DEFAULT_COORD_CAP = 24
DEFAULT_ENUM_BUDGET = 2**20


@dataclass(frozen=True)
class ProbabilityVector:
    """Marginal distribution over the finite alphabet {0, ..., len-1}."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.weights) < 1:
            raise StructureError("alphabet must be nonempty")
        if any(w < 0 for w in self.weights):
            raise StructureError("negative probability weight")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise StructureError(f"weights sum to {math.fsum(self.weights)!r}, not 1")

    def __len__(self) -> int:
        return len(self.weights)

    @cached_property
    def cumulative(self) -> tuple[float, ...]:
        return tuple(rng.cumulative(self.weights))


def uniform_vector(k: int) -> ProbabilityVector:
    return ProbabilityVector(tuple(1.0 / k for _ in range(k)))


@dataclass(frozen=True)
class LazyBernoulliPoint:
    """A configuration of the Bernoulli shift, realized on demand.

    The underlying configuration is determined by ``seed``; this value
    object represents that configuration translated by the group, with
    ``translation`` accumulating the motion.
    """

    seed: int
    translation: ReducedWord
    alphabet: ProbabilityVector


def bernoulli_point(seed: int, rank: int, alphabet: ProbabilityVector) -> LazyBernoulliPoint:
    """A fresh untranslated point."""
    return LazyBernoulliPoint(seed, identity(rank), alphabet)


def symbol_at(x: LazyBernoulliPoint, h: ReducedWord) -> int:
    """The symbol of x at coordinate h.

    Pure in (seed, translation*h, alphabet): the keyed hash of the
    canonical word bytes, inverse-CDF sampled against the marginal.
    """
    w = multiply(x.translation, h)
    u = rng.unit_uniform(x.seed, b"sym|" + w.codes)
    return rng.inverse_cdf(x.alphabet.cumulative, u)


def translate(g: ReducedWord, x: LazyBernoulliPoint) -> LazyBernoulliPoint:
    """The shift action: (g.x)(h) = x(g^-1 h), so t goes to t*g^-1."""
    return LazyBernoulliPoint(x.seed, multiply(x.translation, invert(g)), x.alphabet)


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class PartitionLabeler:
    """A finite partition presented as a labeling rule.

    label(x) = code applied to the window of symbols (x(w) for w in
    window).  kind "symbol" is the generating partition: window = {e},
    code = identity.
    """

    kind: str
    window: tuple[ReducedWord, ...]
    code: Callable[[tuple[int, ...]], int]
    num_labels: int
    descriptor: str = ""

    def __post_init__(self) -> None:
        if len(self.window) == 0:
            raise StructureError("labeler window must be nonempty")
        if len({w.codes for w in self.window}) != len(self.window):
            raise StructureError("labeler window has repeated coordinates")

    @property
    def window_radius(self) -> int:
        return max(len(w) for w in self.window)


def label_point(labeler: PartitionLabeler, x: LazyBernoulliPoint) -> int:
    return labeler.code(tuple(symbol_at(x, w) for w in labeler.window))


def symbol_partition(rank: int, alphabet_size: int) -> PartitionLabeler:
    return PartitionLabeler(
        kind="symbol",
        window=(identity(rank),),
        code=lambda t: t[0],
        num_labels=alphabet_size,
        descriptor="symbol",
    )


def trivial_partition(rank: int) -> PartitionLabeler:
    """The one-atom partition; every point gets label 0."""
    return PartitionLabeler(
        kind="block-code",
        window=(identity(rank),),
        code=lambda t: 0,
        num_labels=1,
        descriptor="trivial",
    )


def modsum_partition(window: Iterable[ReducedWord], alphabet_size: int) -> PartitionLabeler:
    """Block code: sum of the window symbols mod alphabet size.

    The 2-symbol case is the XOR partition.
    """
    win = tuple(window)
    return PartitionLabeler(
        kind="block-code",
        window=win,
        code=lambda t: sum(t) % alphabet_size,
        num_labels=alphabet_size,
        descriptor="modsum",
    )


def joint_partition(window: Iterable[ReducedWord], alphabet_size: int) -> PartitionLabeler:
    """Block code remembering the full symbol tuple on the window."""
    win = tuple(window)

    def code(t: tuple[int, ...]) -> int:
        acc = 0
        for s in t:
            acc = acc * alphabet_size + s
        return acc

    return PartitionLabeler(
        kind="block-code",
        window=win,
        code=code,
        num_labels=alphabet_size ** len(win),
        descriptor="joint",
    )


# ---------------------------------------------------------------------------
# exact atom and joint-law machinery

# A keyed observation: the partition translated by key g reads the raw
# coordinates g^-1 * w, w in the labeler window.


def _key_coordinates(g: ReducedWord, labeler: PartitionLabeler) -> tuple[ReducedWord, ...]:
    gi = invert(g)
    return tuple(multiply(gi, w) for w in labeler.window)


def _components(
    pairs: Iterable[tuple[ReducedWord, PartitionLabeler]],
) -> list[tuple[list[ReducedWord], list[tuple[int, PartitionLabeler, tuple[int, ...]]]]]:
    """Group keyed observations by shared raw coordinates.

    Each observation is (key g, labeler) and reads coordinates g^-1*w.
    Returns per component the coordinate list plus the observations as
    (original position, labeler, local coordinate indices).  Components
    read disjoint iid coordinates, so exact sums factor over them.
    """
    pairs = list(pairs)
    coord_of: dict[bytes, int] = {}
    coords: list[ReducedWord] = []
    obs_idx: list[tuple[int, PartitionLabeler, tuple[int, ...]]] = []
    for pos, (g, labeler) in enumerate(pairs):
        idxs = []
        for c in _key_coordinates(g, labeler):
            j = coord_of.get(c.codes)
            if j is None:
                j = len(coords)
                coord_of[c.codes] = j
                coords.append(c)
            idxs.append(j)
        obs_idx.append((pos, labeler, tuple(idxs)))

    parent = list(range(len(coords)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for _, _, idxs in obs_idx:
        for j in idxs[1:]:
            ra, rb = find(idxs[0]), find(j)
            if ra != rb:
                parent[ra] = rb

    groups: dict[int, list[int]] = {}
    for j in range(len(coords)):
        groups.setdefault(find(j), []).append(j)
    obs_by_root: dict[int, list[tuple[int, PartitionLabeler, tuple[int, ...]]]] = {}
    for pos, labeler, idxs in obs_idx:
        obs_by_root.setdefault(find(idxs[0]), []).append((pos, labeler, idxs))

    out = []
    for root, members in sorted(groups.items()):
        members.sort()
        remap = {j: i for i, j in enumerate(members)}
        comp_obs = [
            (pos, labeler, tuple(remap[j] for j in idxs))
            for pos, labeler, idxs in obs_by_root.get(root, [])
        ]
        out.append(([coords[j] for j in members], comp_obs))
    return out


def _charge_budget(n_coords: int, alphabet_size: int, coord_cap: int, budget_left: int) -> int:
    """Debit one component's enumeration cost from the remaining budget.

    The budget is global across components: many components each below
    a per-component cap would still multiply into an unbounded run.
    """
    if n_coords > coord_cap:
        raise ResourceLimitError(
            f"exact mode needs {n_coords} coordinates in one component, cap is "
            f"{coord_cap}; use monte-carlo mode or raise the cap"
        )
    cost = alphabet_size**n_coords
    if cost > budget_left:
        raise ResourceLimitError(
            f"exact mode would enumerate {alphabet_size}^{n_coords} more "
            f"assignments with {budget_left} left of the budget; use monte-carlo mode"
        )
    return budget_left - cost


def _component_assignments(n_coords: int, alphabet_size: int):
    """All assignments as digit tuples, lexicographic."""
    assignment = [0] * n_coords
    while True:
        yield tuple(assignment)
        i = n_coords - 1
        while i >= 0:
            assignment[i] += 1
            if assignment[i] < alphabet_size:
                break
            assignment[i] = 0
            i -= 1
        if i < 0:
            return


@dataclass(frozen=True)
class AtomEstimate:
    """Result of an atom measure query.

    ``unresolved`` marks a zero-count Monte Carlo atom; then
    ``log_measure`` is the rule-of-three 95% upper confidence bound
    log(3/M) on the true log-mass, never -inf.
    """

    log_measure: float
    stderr: float | None
    mode: str
    unresolved: bool
    n_samples: int


def atom_log_measure(
    labels: Mapping[ReducedWord, int],
    labeler: PartitionLabeler,
    p: ProbabilityVector,
    mode: str = "exact",
    mc_samples: int = 10_000,
    mc_seed: int = 0,
    coord_cap: int = DEFAULT_COORD_CAP,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> AtomEstimate:
    """log of the product-measure mass of the joint atom
    {x : label of translate(g, x) = labels[g] for every key g}.

    Exact mode factors over coordinate components and enumerates
    alphabet assignments inside each; monte-carlo mode counts matches
    over ``mc_samples`` fresh points.
    """
    items = sorted(labels.items(), key=lambda kv: kv[0].codes)
    if not items:
        return AtomEstimate(0.0, None, "exact", False, 0)
    if mode == "exact":
        logs = []
        budget_left = enum_budget
        for coords, comp_obs in _components((g, labeler) for g, _ in items):
            want = [items[pos][1] for pos, _, _ in comp_obs]
            budget_left = _charge_budget(len(coords), len(p), coord_cap, budget_left)
            masses = []
            for assignment in _component_assignments(len(coords), len(p)):
                if all(
                    lab.code(tuple(assignment[j] for j in idxs)) == want[i]
                    for i, (_, lab, idxs) in enumerate(comp_obs)
                ):
                    masses.append(math.prod(p.weights[s] for s in assignment))
            mass = math.fsum(masses)
            if mass == 0.0:
                raise InvariantViolation(
                    "observed labels define an atom of exact measure zero"
                )
            logs.append(math.log(mass))
        return AtomEstimate(math.fsum(logs), None, "exact", False, 0)
    if mode == "monte-carlo":
        rank = items[0][0].rank
        hits = 0
        for m in range(mc_samples):
            x = bernoulli_point(rng.derive_seed(mc_seed, "atom-mc", m), rank, p)
            if all(label_point(labeler, translate(g, x)) == want for g, want in items):
                hits += 1
        if hits == 0:
            return AtomEstimate(math.log(3.0 / mc_samples), None, "monte-carlo", True, mc_samples)
        f = hits / mc_samples
        stderr = math.sqrt((1.0 - f) / (f * mc_samples))
        return AtomEstimate(math.log(f), stderr, "monte-carlo", False, mc_samples)
    raise StructureError(f"unknown atom mode {mode!r} (use exact or monte-carlo)")


def joint_component_entropies(
    pairs: Iterable[tuple[ReducedWord, PartitionLabeler]],
    p: ProbabilityVector,
    coord_cap: int = DEFAULT_COORD_CAP,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> list[float]:
    """Exact Shannon entropy (nats) of the joint label law, per component.

    The joint entropy of all keyed observations is the sum, since
    distinct components read disjoint iid coordinates.
    """
    out = []
    budget_left = enum_budget
    for coords, comp_obs in _components(pairs):
        budget_left = _charge_budget(len(coords), len(p), coord_cap, budget_left)
        law: dict[tuple[int, ...], list[float]] = {}
        for assignment in _component_assignments(len(coords), len(p)):
            tup = tuple(
                lab.code(tuple(assignment[j] for j in idxs)) for _, lab, idxs in comp_obs
            )
            law.setdefault(tup, []).append(math.prod(p.weights[s] for s in assignment))
        acc = []
        for masses in law.values():
            q = math.fsum(masses)
            if q > 0.0:
                acc.append(-q * math.log(q))
        out.append(math.fsum(acc))
    return out


def joint_entropy_exact(
    pairs: Iterable[tuple[ReducedWord, PartitionLabeler]],
    p: ProbabilityVector,
    coord_cap: int = DEFAULT_COORD_CAP,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> float:
    """Exact H of the join of keyed observations, in nats."""
    return math.fsum(joint_component_entropies(pairs, p, coord_cap, enum_budget))


def marginal_label_law(
    labeler: PartitionLabeler,
    p: ProbabilityVector,
    coord_cap: int = DEFAULT_COORD_CAP,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> list[float]:
    """Exact distribution of label_point over a random configuration."""
    _charge_budget(len(labeler.window), len(p), coord_cap, enum_budget)
    law = [0.0] * labeler.num_labels
    buckets: dict[int, list[float]] = {}
    for assignment in _component_assignments(len(labeler.window), len(p)):
        lab = labeler.code(assignment)
        buckets.setdefault(lab, []).append(math.prod(p.weights[s] for s in assignment))
    for lab, masses in buckets.items():
        law[lab] = math.fsum(masses)
    return law
