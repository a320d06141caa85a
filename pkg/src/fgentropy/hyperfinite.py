"""Finite models of hyperfinite exhaustions.

Two concrete models: the tail model (admissible strings of length L
over the 2r letter codes, classes = agree beyond coordinate n) and the
dyadic odometer (bit strings of length L, same tail classes).  Both
carry uniform exact rational weights.

On top of the models: subset-function algebra, finite-order inner
automorphisms, Folner-defect diagnostics, the disjointification
algorithm for laminar families, the staged covering construction, and
the combinatorial counting bound used to control how many disjoint
subcollections exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InvariantViolation, ResourceLimitError, StructureError
from .words import ReducedWord, invert, multiply

# ---------------------------------------------------------------------------
# ground models


@dataclass(frozen=True)
class ChainClass:
    """A class of the level-n chain relation: all points whose
    coordinates beyond n equal ``suffix``."""

    level: int
    suffix: bytes

    def contains_point(self, point: bytes) -> bool:
        return point[self.level :] == self.suffix

    def contains_class(self, other: "ChainClass") -> bool:
        """Nested-or-disjoint trichotomy: self contains other iff other's
        fixed part extends self's."""
        if other.level > self.level:
            return False
        return other.suffix[self.level - other.level :] == self.suffix


class FiniteRelationModel:
    """Ground set plus the nested chain of tail relations.

    kind "tail": admissible letter strings, class sizes (2r-1)^n for
    n < L.  kind "odometer": bit strings, class sizes 2^n for n <= L.
    Level L is the full ground set in both models.
    """

    def __init__(self, kind: str, level_count: int, rank: int | None, points: tuple[bytes, ...]):
        self.kind = kind
        self.level_count = level_count
        self.rank = rank
        self.points = points
        self.point_set = frozenset(points)
        self.weight = Fraction(1, len(points))
        self._members_cache: dict[ChainClass, tuple[bytes, ...]] = {}

    def __repr__(self) -> str:
        return f"FiniteRelationModel({self.kind}, L={self.level_count}, N={len(self.points)})"

    def check_point(self, point: bytes) -> None:
        if point not in self.point_set:
            raise StructureError(f"point {point!r} is not in the model ground set")

    def check_level(self, n: int) -> None:
        if not 0 <= n <= self.level_count:
            raise StructureError(
                f"chain level {n} out of range [0, {self.level_count}]"
            )

    def class_of(self, point: bytes, n: int) -> ChainClass:
        self.check_point(point)
        self.check_level(n)
        return ChainClass(n, point[n:])

    def members(self, cls: ChainClass) -> tuple[bytes, ...]:
        """All points of the class, lexicographic.  Cached."""
        got = self._members_cache.get(cls)
        if got is None:
            got = tuple(p for p in self.points if p[cls.level :] == cls.suffix)
            if not got:
                raise StructureError(f"{cls} is not a class of this model")
            self._members_cache[cls] = got
        return got

    def class_size(self, n: int) -> int:
        """Size of any level-n class; at n = L this is the whole ground set.

        Tail model sizes follow (2r-1)^n only for n < L: the level-L
        class is everything, which is larger.
        """
        self.check_level(n)
        if n == self.level_count:
            return len(self.points)
        if self.kind == "tail":
            return (2 * self.rank - 1) ** n
        return 2**n

    def classes_at(self, n: int) -> list[ChainClass]:
        """All level-n classes, by ascending suffix."""
        self.check_level(n)
        suffixes = sorted({p[n:] for p in self.points})
        return [ChainClass(n, s) for s in suffixes]


def make_tail_model(rank: int, level_count: int) -> FiniteRelationModel:
    """Admissible strings of length L over the 2r letter codes."""
    if rank < 2:
        raise StructureError(f"rank must be >= 2, got {rank}")
    if level_count < 1:
        raise StructureError(f"need level_count >= 1, got {level_count}")
    limit = 2 * rank
    strings: list[bytes] = [b""]
    for _ in range(level_count):
        nxt = []
        for s in strings:
            for c in range(limit):
                if s and c == s[-1] ^ 1:
                    continue
                nxt.append(s + bytes([c]))
        strings = nxt
    return FiniteRelationModel("tail", level_count, rank, tuple(sorted(strings)))


def make_odometer_model(level_count: int) -> FiniteRelationModel:
    """Bit strings of length L; the adding-machine tail relation."""
    if level_count < 1:
        raise StructureError(f"need level_count >= 1, got {level_count}")
    strings = [b""]
    for _ in range(level_count):
        strings = [s + bytes([b]) for s in strings for b in (0, 1)]
    return FiniteRelationModel("odometer", level_count, None, tuple(sorted(strings)))


def model_cocycle(model: FiniteRelationModel, w: bytes, y: bytes) -> ReducedWord:
    """The return word sending y to w in the tail model: word(w)*word(y)^-1.

    Both strings have full length L; the shared tail cancels inside the
    reduced product, so no level argument is needed.
    """
    if model.kind != "tail":
        raise StructureError("the group-valued cocycle needs the tail model")
    u = ReducedWord(w, model.rank)
    v = ReducedWord(y, model.rank)
    return multiply(u, invert(v))


# ---------------------------------------------------------------------------
# subset functions


class SubsetFunction:
    """A map from points to finite point sets within the model."""

    def __init__(self, model: FiniteRelationModel, mapping: Mapping[bytes, frozenset[bytes]]):
        if set(mapping) != model.point_set:
            raise StructureError("subset function must be defined on every ground point")
        for y, vals in mapping.items():
            for z in vals:
                if z not in model.point_set:
                    raise StructureError(f"subset function value {z!r} outside the model")
        self.model = model
        self.mapping = {y: frozenset(v) for y, v in mapping.items()}

    def __call__(self, y: bytes) -> frozenset[bytes]:
        return self.mapping[y]

    def norm(self) -> int:
        """max over points of max(|T(y)|, |T^-1(y)|)."""
        fwd = max(len(v) for v in self.mapping.values())
        counts: dict[bytes, int] = {}
        for vals in self.mapping.values():
            for z in vals:
                counts[z] = counts.get(z, 0) + 1
        bwd = max(counts.values(), default=0)
        return max(fwd, bwd)


def identity_sf(model: FiniteRelationModel) -> SubsetFunction:
    return SubsetFunction(model, {y: frozenset([y]) for y in model.points})


def chain_sf(model: FiniteRelationModel, n: int) -> SubsetFunction:
    """y maps to its full level-n class."""
    model.check_level(n)
    return SubsetFunction(
        model, {y: frozenset(model.members(ChainClass(n, y[n:]))) for y in model.points}
    )


def compose(s: SubsetFunction, t: SubsetFunction) -> SubsetFunction:
    """(S o T)(y) = union of S(z) over z in T(y)."""
    if s.model is not t.model:
        raise StructureError("subset functions live on different models")
    mapping = {}
    for y in s.model.points:
        acc: set[bytes] = set()
        for z in t(y):
            acc |= s(z)
        mapping[y] = frozenset(acc)
    return SubsetFunction(s.model, mapping)


def invert_sf(t: SubsetFunction) -> SubsetFunction:
    """T^-1(y) = {z : y in T(z)}, via one reverse sweep."""
    rev: dict[bytes, set[bytes]] = {y: set() for y in t.model.points}
    for z in t.model.points:
        for y in t(z):
            rev[y].add(z)
    return SubsetFunction(t.model, {y: frozenset(v) for y, v in rev.items()})


def union_sf(*sfs: SubsetFunction) -> SubsetFunction:
    if not sfs:
        raise StructureError("union of no subset functions")
    model = sfs[0].model
    mapping = {}
    for y in model.points:
        acc: set[bytes] = set()
        for sf in sfs:
            if sf.model is not model:
                raise StructureError("subset functions live on different models")
            acc |= sf(y)
        mapping[y] = frozenset(acc)
    return SubsetFunction(model, mapping)


# ---------------------------------------------------------------------------
# inner automorphisms


class InnerAutomorphism:
    """A weight-preserving permutation whose graph sits inside the
    level-``order`` chain relation: phi(y) agrees with y beyond
    coordinate ``order``."""

    def __init__(self, model: FiniteRelationModel, perm: Mapping[bytes, bytes], order: int):
        if set(perm) != model.point_set or set(perm.values()) != model.point_set:
            raise StructureError("automorphism must be a bijection of the ground set")
        model.check_level(order)
        for y, z in perm.items():
            if y[order:] != z[order:]:
                raise StructureError(
                    f"graph leaves the level-{order} relation at point {y!r}"
                )
        self.model = model
        self.perm = dict(perm)
        self.order = order

    def __call__(self, y: bytes) -> bytes:
        return self.perm[y]


def cyclic_automorphism(model: FiniteRelationModel, n: int) -> InnerAutomorphism:
    """Within each level-n class (members in lexicographic order), the
    cyclic shift by one.  Orbits of the generated group are exactly the
    level-n classes."""
    model.check_level(n)
    perm: dict[bytes, bytes] = {}
    for cls in model.classes_at(n):
        ms = model.members(cls)
        for i, y in enumerate(ms):
            perm[y] = ms[(i + 1) % len(ms)]
    return InnerAutomorphism(model, perm, n)


def automorphism_set_sf(model: FiniteRelationModel, autos: Sequence[InnerAutomorphism]) -> SubsetFunction:
    """D as a subset function: y maps to {phi(y) : phi in D}."""
    if not autos:
        raise StructureError("need a non-empty automorphism set")
    return SubsetFunction(
        model, {y: frozenset(phi(y) for phi in autos) for y in model.points}
    )


def folner_defect(
    model: FiniteRelationModel, autos: Sequence[InnerAutomorphism], n: int
) -> Fraction:
    """Exact weighted average of |R_n(y) symdiff D o R_n(y)| / |R_n(y)|.

    Zero exactly when every automorphism's order certificate is <= n,
    because then each phi permutes every level-n class.
    """
    if not autos:
        raise StructureError("need a non-empty automorphism set")
    model.check_level(n)
    total = Fraction(0)
    for cls in model.classes_at(n):
        ms = model.members(cls)
        base = set(ms)
        image = {phi(z) for z in ms for phi in autos}
        sym = len(base ^ image)
        # every point of the class contributes the same defect
        total += len(ms) * model.weight * Fraction(sym, len(ms))
    return total


def interior_fraction(
    model: FiniteRelationModel, t: SubsetFunction, n: int
) -> tuple[dict[bytes, Fraction], Fraction]:
    """Per point: the fraction of its level-n class whose full T-class
    stays inside the class.  Returns (per-point map, weighted average).

    T must be an equivalence relation with finite classes.
    """
    _check_equivalence(t)
    model.check_level(n)
    per_point: dict[bytes, Fraction] = {}
    total = Fraction(0)
    for cls in model.classes_at(n):
        ms = model.members(cls)
        base = set(ms)
        inside = sum(1 for z in ms if t(z) <= base)
        frac = Fraction(inside, len(ms))
        for z in ms:
            per_point[z] = frac
        total += len(ms) * model.weight * frac
    return per_point, total


def _check_equivalence(t: SubsetFunction) -> None:
    for y in t.model.points:
        cls = t(y)
        if y not in cls:
            raise StructureError(f"not reflexive at {y!r}")
        for z in cls:
            if t(z) != cls:
                raise StructureError(f"classes of {y!r} and {z!r} overlap without agreeing")


def partition_sf(model: FiniteRelationModel, blocks: Iterable[Iterable[bytes]]) -> SubsetFunction:
    """Equivalence-relation subset function from explicit blocks."""
    mapping: dict[bytes, frozenset[bytes]] = {}
    for block in blocks:
        fz = frozenset(block)
        for y in fz:
            if y in mapping:
                raise StructureError(f"point {y!r} placed in two blocks")
            mapping[y] = fz
    missing = model.point_set - set(mapping)
    for y in missing:
        mapping[y] = frozenset([y])
    return SubsetFunction(model, mapping)


# ---------------------------------------------------------------------------
# disjointification


def disjointify(
    pairs: Iterable[tuple[bytes, int]], model: FiniteRelationModel
) -> list[ChainClass]:
    """Maximal classes of a laminar family given by (center, level) pairs.

    Classes are checked largest level first, ties by suffix; a class is
    kept unless it is contained in one already kept.  The output is
    pairwise disjoint, its union contains every center, and it is
    idempotent as an operation on class collections.
    """
    classes: set[ChainClass] = set()
    for center, level in pairs:
        model.check_point(center)
        model.check_level(level)
        classes.add(ChainClass(level, center[level:]))
    ordered = sorted(classes, key=lambda c: (-c.level, c.suffix))
    selected_by_level: dict[int, set[bytes]] = {}
    out: list[ChainClass] = []
    for cls in ordered:
        contained = False
        for m, suffixes in selected_by_level.items():
            # selected levels are >= cls.level in processing order
            if cls.suffix[m - cls.level :] in suffixes:
                contained = True
                break
        if not contained:
            out.append(cls)
            selected_by_level.setdefault(cls.level, set()).add(cls.suffix)
    return out


# ---------------------------------------------------------------------------
# the staged covering construction


@dataclass
class CoveringReport:
    """Everything the covering run produced, including the hypothesis
    audit.  The conclusion inequality is asserted only when both the
    hypothesis check and the stage-count requirement hold."""

    selected: list[ChainClass]
    per_stage: list[list[ChainClass]]
    mass: int
    min_term: int
    rhs: float
    delta: float
    d_size: int
    m_stages: int
    m_required: float
    m_ok: bool
    hypothesis_ok: bool
    hypothesis_failures: list[tuple[int, int, bytes, int, float]]
    conclusion_holds: bool


def _b_at(entry, y: bytes) -> frozenset[bytes]:
    if isinstance(entry, SubsetFunction):
        return entry(y)
    return frozenset(entry)


def check_covering_hypothesis(
    model: FiniteRelationModel,
    levels: Sequence[Sequence[int]],
    autos: Sequence[InnerAutomorphism],
    delta: float,
    max_failures: int = 32,
) -> tuple[bool, list[tuple[int, int, bytes, int, float]]]:
    """Pointwise audit of the staged-covering hypothesis on every ground
    point: for stages i >= 2 and each j, the D-image of the union of all
    lower-stage pullbacks of the (i,j)-class must stay within (1+delta)
    of the class size.

    Returns (ok, failures); failures hold (i, j, point, lhs, allowed),
    capped at max_failures entries.
    """
    failures: list[tuple[int, int, bytes, int, float]] = []
    for i in range(1, len(levels)):  # stage index i+1 in 1-based terms
        lower = sorted({m for k in range(i) for m in levels[k]})
        for j, n_ij in enumerate(levels[i]):
            cache: dict[bytes, int] = {}
            for z in model.points:
                cls = model.class_of(z, n_ij)
                cache_key = cls.suffix
                lhs = cache.get(cache_key)
                if lhs is None:
                    c_members = model.members(cls)
                    pulled: set[bytes] = set()
                    for m in lower:
                        for w in c_members:
                            pulled.update(model.members(model.class_of(w, m)))
                    image = {phi(w) for w in pulled for phi in autos}
                    lhs = len(image)
                    cache[cache_key] = lhs
                allowed = (1.0 + delta) * len(model.members(cls))
                if lhs > allowed:
                    if len(failures) < max_failures:
                        failures.append((i + 1, j + 1, z, lhs, allowed))
                    else:
                        return False, failures
    return len(failures) == 0, failures


def covering(
    model: FiniteRelationModel,
    levels: Sequence[Sequence[int]],
    b_arrays: Sequence[Sequence[object]],
    autos: Sequence[InnerAutomorphism],
    delta: float,
    y: bytes,
) -> CoveringReport:
    """The staged covering construction at the point y.

    levels[i][j] is the chain level of the (i,j) relation; b_arrays[i][j]
    is the center collection (a SubsetFunction evaluated at y, or a
    plain point set).  Stages run top (i = M) down to 1: centers are
    pruned of anything whose class meets higher-stage selections, then
    the stage is disjointified.

    The hypothesis audit runs over every ground point regardless of y
    and is reported, never assumed.
    """
    if not 0.0 < delta < 1.0:
        raise StructureError(f"need 0 < delta < 1, got {delta}")
    if len(levels) != len(b_arrays) or any(
        len(ls) != len(bs) for ls, bs in zip(levels, b_arrays)
    ):
        raise StructureError("levels and center arrays must have matching shape")
    if not autos:
        raise StructureError("need a non-empty automorphism set")
    model.check_point(y)
    m_stages = len(levels)
    if m_stages < 1:
        raise StructureError("need at least one stage")

    hypothesis_ok, failures = check_covering_hypothesis(model, levels, autos, delta)

    b_sets = [[_b_at(entry, y) for entry in row] for row in b_arrays]
    for row in b_sets:
        for s in row:
            for w in s:
                model.check_point(w)

    per_stage: list[list[ChainClass]] = [[] for _ in range(m_stages)]
    covered_above: set[bytes] = set()
    for i in range(m_stages - 1, -1, -1):
        pairs: list[tuple[bytes, int]] = []
        for j, n_ij in enumerate(levels[i]):
            for w in sorted(b_sets[i][j]):
                cls_members = model.members(model.class_of(w, n_ij))
                if covered_above.isdisjoint(cls_members):
                    pairs.append((w, n_ij))
        stage_sel = disjointify(pairs, model)
        per_stage[i] = stage_sel
        for cls in stage_sel:
            covered_above.update(model.members(cls))

    selected = [cls for stage in per_stage for cls in stage]
    mass = sum(len(model.members(c)) for c in selected)

    d_size = len(autos)
    min_term = min(
        len({phi(w) for cell in row for w in cell for phi in autos}) for row in b_sets
    )
    rhs = (1.0 - delta) * min_term
    m_required = 1.0 + (1.0 - delta) * d_size / delta**2
    m_ok = m_stages >= m_required
    conclusion_holds = mass >= rhs or math.isclose(mass, rhs, rel_tol=1e-12)

    if hypothesis_ok and m_ok and not conclusion_holds:
        raise InvariantViolation(
            f"covering bound failed with hypothesis satisfied: mass {mass} < rhs {rhs}"
        )
    return CoveringReport(
        selected=selected,
        per_stage=per_stage,
        mass=mass,
        min_term=min_term,
        rhs=rhs,
        delta=delta,
        d_size=d_size,
        m_stages=m_stages,
        m_required=m_required,
        m_ok=m_ok,
        hypothesis_ok=hypothesis_ok,
        hypothesis_failures=failures,
        conclusion_holds=conclusion_holds,
    )


# ---------------------------------------------------------------------------
# counting bound


def stirling_bound_E(ell: float) -> float:
    """E(l) = (1/l) log l + (1 - 1/l) log(1/(1 - 1/l)), natural logs.

    Strictly decreasing to 0 for l >= 3; E(2) = log 2.
    """
    if ell < 2:
        raise StructureError(f"need l >= 2, got {ell}")
    inv = 1.0 / ell
    return inv * math.log(ell) + (1.0 - inv) * math.log(1.0 / (1.0 - inv))


def choose_block_size(eta: float) -> int:
    """Smallest even l with E(l/2) < eta/5, per the counting argument."""
    if eta <= 0:
        raise StructureError(f"need eta > 0, got {eta}")
    ell = 4
    while stirling_bound_E(ell / 2) >= eta / 5.0:
        ell += 2
    return ell


def counting_bound(ell: float, class_size: int) -> float:
    """2 to the power 5 E(l/2) |class|, the subcollection-count ceiling."""
    return 2.0 ** (5.0 * stirling_bound_E(ell / 2.0) * class_size)


def count_disjoint_subcollections(
    model: FiniteRelationModel,
    y: bytes,
    n: int,
    levels: Sequence[int],
    ell_min: int,
    size_cap: int = 20,
) -> int:
    """Exact number of pairwise-disjoint collections of chain classes
    inside the level-n class of y, restricted to the given levels and to
    classes of size >= ell_min.  The empty collection counts.

    Exhaustive; refuses classes larger than size_cap points.
    """
    base_cls = model.class_of(y, n)
    base = model.members(base_cls)
    if len(base) > size_cap:
        raise ResourceLimitError(
            f"class has {len(base)} points, enumeration cap is {size_cap}"
        )
    candidates: list[frozenset[bytes]] = []
    seen: set[ChainClass] = set()
    for m in sorted(levels):
        if m > n:
            continue
        for w in base:
            cls = model.class_of(w, m)
            if cls in seen:
                continue
            seen.add(cls)
            ms = model.members(cls)
            if len(ms) >= ell_min:
                candidates.append(frozenset(ms))

    def count(idx: int, used: frozenset[bytes]) -> int:
        if idx == len(candidates):
            return 1
        total = count(idx + 1, used)
        if used.isdisjoint(candidates[idx]):
            total += count(idx + 1, used | candidates[idx])
        return total

    return count(0, frozenset())
