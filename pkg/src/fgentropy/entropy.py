"""Entropy along horospherical balls: Shannon entropy, the entropy
function over tail classes, information functions, convergence sweeps
and SMB trajectories.

All values are natural-log nats.  Exact mode is used whenever the
product structure permits it; otherwise plug-in estimation with the
Miller-Madow correction is the default, always tagged in the estimator
field of the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import rng
from .boundary import BoundaryPrefix, fundamental_cocycle, sample_prefix, tail_class
from .errors import ResourceLimitError, StructureError
from .shifts import (
    DEFAULT_COORD_CAP,
    DEFAULT_ENUM_BUDGET,
    AtomEstimate,
    LazyBernoulliPoint,
    PartitionLabeler,
    ProbabilityVector,
    atom_log_measure,
    bernoulli_point,
    joint_component_entropies,
    label_point,
    marginal_label_law,
    translate,
)
from .words import ReducedWord


def shannon(weights: Iterable[float]) -> float:
    """H = -sum p log p in nats, zero terms skipped."""
    terms = []
    for w in weights:
        if w < 0:
            raise StructureError("negative probability weight")
        if w > 0.0:
            terms.append(-w * math.log(w))
    return math.fsum(terms)


@dataclass(frozen=True)
class EntropyEstimate:
    """An entropy value with its provenance.

    estimator is one of exact, plug-in, plug-in-miller-madow.  Exact
    values carry stderr None and zero unresolved atoms.
    """

    value: float
    stderr: float | None
    n_samples: int
    estimator: str
    unresolved_atoms: int = 0


@dataclass(frozen=True)
class InformationValue:
    """-log of an atom mass, with the unresolved flag carried through."""

    value: float
    stderr: float | None
    mode: str
    unresolved: bool
    n_samples: int

    @staticmethod
    def from_atom(atom: AtomEstimate) -> "InformationValue":
        return InformationValue(
            value=-atom.log_measure,
            stderr=atom.stderr,
            mode=atom.mode,
            unresolved=atom.unresolved,
            n_samples=atom.n_samples,
        )


def cocycle_keys(xi: BoundaryPrefix, n: int) -> list[ReducedWord]:
    """The refinement key set {alpha(z, xi) : z in the level-n tail class}.

    Class-injectivity of the cocycle makes these (2r-1)^n words distinct.
    """
    return [fundamental_cocycle(z, xi, n) for z in tail_class(xi, n)]


def information_function(
    x: LazyBernoulliPoint,
    xi: BoundaryPrefix,
    n: int,
    labeler: PartitionLabeler,
    mode: str = "exact",
    mc_samples: int = 10_000,
    mc_seed: int = 0,
    coord_cap: int = DEFAULT_COORD_CAP,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> InformationValue:
    """J of the refined partition atom of x along the level-n ball at xi.

    The observed label at key g is the labeler applied to translate(g, x),
    equivalently the labels of x read at coordinates g^-1 * window.
    """
    labels = {}
    for g in cocycle_keys(xi, n):
        labels[g] = label_point(labeler, translate(g, x))
    atom = atom_log_measure(
        labels,
        labeler,
        x.alphabet,
        mode=mode,
        mc_samples=mc_samples,
        mc_seed=mc_seed,
        coord_cap=coord_cap,
        enum_budget=enum_budget,
    )
    return InformationValue.from_atom(atom)


# ---------------------------------------------------------------------------
# entropy of refined partitions


def plugin_refined_entropy(
    keys: Sequence[ReducedWord],
    labeler: PartitionLabeler,
    p: ProbabilityVector,
    rank: int,
    m_samples: int,
    seed: int,
    miller_madow: bool = True,
) -> EntropyEstimate:
    """Plug-in estimate of H(join over keys) from m_samples fresh points.

    The Miller-Madow correction (#observed atoms - 1) / (2M) is added by
    default and recorded in the estimator tag.
    """
    if m_samples < 1:
        raise StructureError(f"need m_samples >= 1, got {m_samples}")
    counts: dict[tuple[int, ...], int] = {}
    for m in range(m_samples):
        x = bernoulli_point(rng.derive_seed(seed, "plugin", m), rank, p)
        tup = tuple(label_point(labeler, translate(g, x)) for g in keys)
        counts[tup] = counts.get(tup, 0) + 1
    freqs = [c / m_samples for c in counts.values()]
    h_raw = -math.fsum(f * math.log(f) for f in freqs)
    second = math.fsum(f * math.log(f) ** 2 for f in freqs)
    stderr = math.sqrt(max(0.0, second - h_raw**2) / m_samples)
    value = h_raw
    estimator = "plug-in"
    if miller_madow:
        value = h_raw + (len(counts) - 1) / (2.0 * m_samples)
        estimator = "plug-in-miller-madow"
    return EntropyEstimate(value, stderr, m_samples, estimator)


def refined_entropy(
    keys: Sequence[ReducedWord],
    labeler: PartitionLabeler,
    p: ProbabilityVector,
    rank: int,
    mode: str = "exact",
    m_samples: int = 2_000,
    seed: int = 0,
    miller_madow: bool = True,
    coord_cap: int = DEFAULT_COORD_CAP,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> EntropyEstimate:
    """H of the partition refined over the key set, any key set.

    mode "auto" tries exact and falls back to plug-in when the exact
    enumeration caps are exceeded.
    """
    if mode in ("exact", "auto"):
        try:
            parts = joint_component_entropies(
                ((g, labeler) for g in keys), p, coord_cap, enum_budget
            )
            return EntropyEstimate(math.fsum(parts), None, 0, "exact")
        except ResourceLimitError:
            if mode == "exact":
                raise
    elif mode != "monte-carlo":
        raise StructureError(f"unknown entropy mode {mode!r}")
    return plugin_refined_entropy(keys, labeler, p, rank, m_samples, seed, miller_madow)


def entropy_function_hP(
    xi: BoundaryPrefix,
    n: int,
    labeler: PartitionLabeler,
    p: ProbabilityVector,
    mode: str = "exact",
    m_samples: int = 2_000,
    seed: int = 0,
    miller_madow: bool = True,
    coord_cap: int = DEFAULT_COORD_CAP,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> EntropyEstimate:
    """h^P at xi for the level-n tail class: H of the cocycle-refined join."""
    return refined_entropy(
        cocycle_keys(xi, n),
        labeler,
        p,
        xi.rank,
        mode=mode,
        m_samples=m_samples,
        seed=seed,
        miller_madow=miller_madow,
        coord_cap=coord_cap,
        enum_budget=enum_budget,
    )


def closed_form_target(labeler: PartitionLabeler, p: ProbabilityVector) -> float | None:
    """The exact cocycle entropy when a closed form exists.

    Bernoulli symbol partitions: H(p).  The one-atom partition: 0.
    Anything else: None; callers fall back to the last stable sweep
    value and must carry its error bar.
    """
    if labeler.kind == "symbol":
        return shannon(p.weights)
    if labeler.num_labels == 1:
        return 0.0
    return None


# ---------------------------------------------------------------------------
# sweeps and trajectories


@dataclass(frozen=True)
class SweepRow:
    n: int
    class_size: int
    h_norm: float
    stderr: float | None
    n_samples: int
    estimator: str
    unresolved_atoms: int


def cocycle_entropy_sweep(
    labeler: PartitionLabeler,
    p: ProbabilityVector,
    rank: int,
    n_range: Sequence[int],
    samples_per_n: int,
    mode: str = "exact",
    seed: int = 0,
    depth: int | None = None,
    m_samples: int = 2_000,
    miller_madow: bool = True,
) -> list[SweepRow]:
    """Monte Carlo average over boundary points of h^P / class size, per n.

    The last row is the workbench's cocycle entropy estimate; no limit
    is claimed, only the stabilized value with its spread.
    """
    if samples_per_n < 1:
        raise StructureError(f"need samples_per_n >= 1, got {samples_per_n}")
    rows = []
    for n in n_range:
        d = depth if depth is not None else n + labeler.window_radius + 1
        size = (2 * rank - 1) ** n
        values = []
        inner_err = []
        estimator = "exact"
        for s in range(samples_per_n):
            xi = sample_prefix(d, rank, rng.derive_seed(seed, "sweep-xi", n, s))
            est = entropy_function_hP(
                xi,
                n,
                labeler,
                p,
                mode=mode,
                m_samples=m_samples,
                seed=rng.derive_seed(seed, "sweep-h", n, s),
                miller_madow=miller_madow,
            )
            values.append(est.value / size)
            if est.stderr is not None:
                inner_err.append(est.stderr / size)
                estimator = est.estimator
        mean = math.fsum(values) / len(values)
        if len(values) > 1:
            var = math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1)
            spread = math.sqrt(var / len(values))
        else:
            spread = 0.0
        sampling = math.sqrt(
            spread**2 + (math.fsum(e**2 for e in inner_err) / len(values) ** 2 if inner_err else 0.0)
        )
        rows.append(
            SweepRow(
                n=n,
                class_size=size,
                h_norm=mean,
                stderr=None if estimator == "exact" and not inner_err else sampling,
                n_samples=samples_per_n,
                estimator=estimator,
                unresolved_atoms=0,
            )
        )
    return rows


@dataclass(frozen=True)
class SmbRow:
    n: int
    class_size: int
    info_nats: float
    info_norm: float
    stderr: float | None
    unresolved: bool


@dataclass(frozen=True)
class SmbTrajectory:
    rows: tuple[SmbRow, ...]
    x_seed: int
    xi_seed: int
    descriptor: str
    target: float | None
    mode: str = "exact"
    estimator: str = "exact"

    def endpoint(self) -> SmbRow:
        return self.rows[-1]


def smb_trajectory(
    x_seed: int,
    xi_seed: int,
    labeler: PartitionLabeler,
    p: ProbabilityVector,
    rank: int,
    n_max: int,
    mode: str = "exact",
    depth: int | None = None,
    mc_samples: int = 10_000,
) -> SmbTrajectory:
    """Normalized information J / class size for n = 0..n_max at one
    sampled (x, xi) pair.

    The class-size growth (2r-1)^n makes the normalized value an average
    of ever more refined-atom terms; the trajectory is the workbench's
    pointwise equipartition experiment.
    """
    if n_max < 0:
        raise StructureError(f"n_max must be >= 0, got {n_max}")
    d = depth if depth is not None else n_max + labeler.window_radius + 1
    x = bernoulli_point(x_seed, rank, p)
    xi = sample_prefix(d, rank, xi_seed)
    rows = []
    estimator = "exact"
    for n in range(n_max + 1):
        size = (2 * rank - 1) ** n
        info = information_function(
            x,
            xi,
            n,
            labeler,
            mode=mode,
            mc_samples=mc_samples,
            mc_seed=rng.derive_seed(xi_seed, "smb-mc", n),
        )
        if info.mode != "exact":
            estimator = "monte-carlo"
        rows.append(
            SmbRow(
                n=n,
                class_size=size,
                info_nats=info.value,
                info_norm=info.value / size,
                stderr=None if info.stderr is None else info.stderr / size,
                unresolved=info.unresolved,
            )
        )
    return SmbTrajectory(
        rows=tuple(rows),
        x_seed=x_seed,
        xi_seed=xi_seed,
        descriptor=labeler.descriptor,
        target=closed_form_target(labeler, p),
        mode=mode,
        estimator=estimator,
    )


@dataclass(frozen=True)
class L1Row:
    n: int
    class_size: int
    l1_deviation: float
    stderr: float
    n_samples: int


def l1_convergence_report(
    labeler: PartitionLabeler,
    p: ProbabilityVector,
    rank: int,
    n_range: Sequence[int],
    num_x_samples: int,
    xi: BoundaryPrefix,
    mode: str = "exact",
    seed: int = 0,
    target: float | None = None,
    mc_samples: int = 10_000,
) -> list[L1Row]:
    """Monte Carlo estimate of E_x |J/|class| - h*| at fixed xi, per n.

    target defaults to the closed form when one exists; otherwise it
    must be supplied (from a stabilized sweep).
    """
    if target is None:
        target = closed_form_target(labeler, p)
    if target is None:
        raise StructureError(
            "no closed-form cocycle entropy for this partition; pass target explicitly"
        )
    rows = []
    for n in n_range:
        size = (2 * rank - 1) ** n
        devs = []
        for s in range(num_x_samples):
            x = bernoulli_point(rng.derive_seed(seed, "l1-x", n, s), rank, p)
            info = information_function(
                x,
                xi,
                n,
                labeler,
                mode=mode,
                mc_samples=mc_samples,
                mc_seed=rng.derive_seed(seed, "l1-mc", n, s),
            )
            devs.append(abs(info.value / size - target))
        mean = math.fsum(devs) / len(devs)
        if len(devs) > 1:
            var = math.fsum((v - mean) ** 2 for v in devs) / (len(devs) - 1)
            stderr = math.sqrt(var / len(devs))
        else:
            stderr = 0.0
        rows.append(L1Row(n=n, class_size=size, l1_deviation=mean, stderr=stderr, n_samples=num_x_samples))
    return rows


# ---------------------------------------------------------------------------
# the finitary sandwich


def normalized_set_entropy(
    keys: Sequence[ReducedWord],
    labeler: PartitionLabeler,
    p: ProbabilityVector,
    rank: int,
    mode: str = "auto",
    m_samples: int = 2_000,
    seed: int = 0,
) -> float:
    """H(join over the finite set keys) / |keys|, the quantity whose
    infimum over finite sets lower-bounds every normalized h^P value."""
    est = refined_entropy(keys, labeler, p, rank, mode=mode, m_samples=m_samples, seed=seed)
    return est.value / len(keys)


def marginal_entropy(labeler: PartitionLabeler, p: ProbabilityVector) -> float:
    """H of the labeler's one-point marginal, the upper sandwich bound."""
    return shannon(marginal_label_law(labeler, p))
