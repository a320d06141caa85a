"""Acceptance gate: every numbered claim the workbench is sold on, each
as one test, run at the stated tolerance.  Independent oracles are built
inline; nothing here reuses the code path under audit where a second
route exists."""

import itertools
import math
import random
import time
from fractions import Fraction

from conftest import admissible_strings
from fgentropy import rng
from fgentropy.averaging import (
    class_average,
    ergodicity_diagnostic,
    indicator_symbol_observable,
)
from fgentropy.boundary import (
    act,
    busemann,
    cylinder_fraction,
    fundamental_cocycle,
    radon_nikodym_log,
    sample_prefix,
    tail_class,
)
from fgentropy.entropy import shannon, smb_trajectory
from fgentropy.hyperfinite import (
    ChainClass,
    count_disjoint_subcollections,
    counting_bound,
    covering,
    cyclic_automorphism,
    disjointify,
    folner_defect,
    make_odometer_model,
    make_tail_model,
)
from fgentropy.shifts import (
    ProbabilityVector,
    joint_partition,
    modsum_partition,
    symbol_partition,
)
from fgentropy.subadditive import (
    check_subadditive,
    coordinate_block_relation,
    entropy_functional,
    subadditive_limit_harness,
)
from fgentropy.words import ReducedWord, multiply, parse_word

LOG2 = math.log(2.0)


def _report(num, detail):
    print(f"criterion {num:2d} PASS: {detail}")


# ---------------------------------------------------------------------------


def test_criterion_01_uniform_bernoulli_exact_identity():
    """Uniform 2-symbol marginal, symbol partition: the normalized
    information equals log 2 to 1e-12 at every level n <= 8 for every
    sampled start, in under 5 seconds."""
    t0 = time.monotonic()
    p = ProbabilityVector((0.5, 0.5))
    lab = symbol_partition(2, 2)
    worst = 0.0
    for s in range(3):
        traj = smb_trajectory(
            rng.derive_seed(101, "c1-x", s),
            rng.derive_seed(101, "c1-xi", s),
            lab,
            p,
            rank=2,
            n_max=8,
            mode="exact",
        )
        for row in traj.rows:
            err = abs(row.info_norm - LOG2)
            worst = max(worst, err)
            assert err <= 1e-12, (s, row.n, row.info_norm)
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0, f"runtime {elapsed:.2f}s exceeds 5s budget"
    _report(1, f"max |J/cls - log2| = {worst:.2e} over n<=8, 3 starts, {elapsed:.2f}s")


def test_criterion_02_smb_convergence_biased_marginal():
    """p = (0.9, 0.1), symbol partition, level 9 (class size 19683): all
    50 endpoints within 0.02 nats of H(p), in under 2 minutes."""
    t0 = time.monotonic()
    p = ProbabilityVector((0.9, 0.1))
    lab = symbol_partition(2, 2)
    target = shannon((0.9, 0.1))
    assert abs(target - 0.325083) < 5e-7
    worst = 0.0
    for s in range(50):
        traj = smb_trajectory(
            rng.derive_seed(202, "c2-x", s),
            rng.derive_seed(202, "c2-xi", s),
            lab,
            p,
            rank=2,
            n_max=9,
            mode="exact",
        )
        end = traj.endpoint()
        assert end.class_size == 19683
        err = abs(end.info_norm - target)
        worst = max(worst, err)
        assert err < 0.02, (s, end.info_norm)
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0, f"runtime {elapsed:.2f}s exceeds 2min budget"
    _report(2, f"50/50 endpoints within 0.02 of H(p); worst {worst:.4f}, {elapsed:.1f}s")


def test_criterion_03_class_sizes_and_measure_formulas():
    """Tail-class cardinalities by enumeration, exact cylinder mass
    sums, and the chain rule for the boundary Radon-Nikodym cocycle."""
    # |tail class at level n| = (2r-1)^n, r in {2,3}, n <= 5
    for r in (2, 3):
        xi = sample_prefix(6, r, seed=33 + r)
        for n in range(6):
            cls = tail_class(xi, n)
            assert len(cls) == (2 * r - 1) ** n
            assert len({z.codes for z in cls}) == len(cls)

    # cylinder masses sum to 1 exactly in rational arithmetic, depths <= 5:
    # the prefix count comes from an independent brute-force enumeration
    for r in (2, 3):
        for depth in range(1, 6):
            total = sum(
                cylinder_fraction(len(s), r) for s in admissible_strings(depth, r)
            )
            assert total == Fraction(1), (r, depth, total)

    # RN chain rule on 1e4 random triples
    rand = random.Random(303)
    worst = 0.0
    for _ in range(10_000):
        g = _random_word(rand, 2, 6)
        h = _random_word(rand, 2, 6)
        xi = sample_prefix(24, 2, rand.getrandbits(32))
        lhs = radon_nikodym_log(multiply(g, h), xi)
        h_xi, _ = act(h, xi)
        rhs = radon_nikodym_log(h, xi) + radon_nikodym_log(g, h_xi)
        worst = max(worst, abs(lhs - rhs))
        assert abs(lhs - rhs) <= 1e-12
    _report(3, f"sizes exact, masses exact, RN chain rule worst gap {worst:.2e}")


def _random_word(rand, rank, max_len):
    codes = [rand.randrange(2 * rank) for _ in range(rand.randint(0, max_len))]
    out = []
    for c in codes:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return ReducedWord(bytes(out), rank)


def test_criterion_04_fundamental_cocycle_exhaustive():
    """Transport, the cocycle identity, parity, and horoball membership,
    exhaustively over tail classes at small levels."""
    pairs_checked = 0
    for s in range(3):
        xi = sample_prefix(12, 2, seed=404 + s)
        for n in range(4):
            cls = tail_class(xi, n)
            for eta in cls:
                for zeta in cls:
                    g = fundamental_cocycle(eta, zeta, n)
                    # transport: g.zeta agrees with eta on the surviving depth
                    res, _k = act(g, zeta)
                    assert res.depth >= 6
                    assert res.codes == eta.codes[: res.depth]
                    # even length, bounded by 2n
                    assert len(g.codes) % 2 == 0
                    assert len(g.codes) <= 2 * n
                    # horoball membership: Busemann value of g toward eta <= 0
                    assert busemann(eta, g) <= 0
                    pairs_checked += 1

    # cocycle identity, exhaustive at n = 2
    xi = sample_prefix(12, 2, seed=909)
    cls = tail_class(xi, 2)
    assert len(cls) == 9
    for z in cls:
        for w in cls:
            for u in cls:
                lhs = fundamental_cocycle(z, u, 2)
                rhs = multiply(fundamental_cocycle(z, w, 2), fundamental_cocycle(w, u, 2))
                assert lhs == rhs
    _report(4, f"{pairs_checked} transport pairs, 729 identity triples, all even + horoball")


def test_criterion_05_disjointification_against_oracle():
    """1000 random laminar families over the level-5 tail model: output
    is disjoint, keeps every center covered, and equals the brute-force
    maximal-class family exactly."""
    model = make_tail_model(2, 5)
    rand = random.Random(505)
    for trial in range(1000):
        pairs = [
            (rand.choice(model.points), rand.randint(0, model.level_count))
            for _ in range(rand.randint(1, 18))
        ]
        got = disjointify(pairs, model)

        classes = {ChainClass(level, center[level:]) for center, level in pairs}
        sets = {cls: set(model.members(cls)) for cls in classes}
        oracle = {
            cls
            for cls, ms in sets.items()
            if not any(other != cls and ms < sets[other] for other in sets)
        }
        assert set(got) == oracle, trial

        covered = set()
        for cls in got:
            ms = set(model.members(cls))
            assert not (covered & ms), trial
            covered |= ms
        assert all(center in covered for center, _ in pairs), trial
    _report(5, "1000/1000 families: disjoint, centers covered, oracle match")


def test_criterion_06_covering_bound_on_generated_instances():
    """100 generated staged-covering instances at delta = 0.1 that pass
    the hypothesis audit with enough stages: the covered mass clears
    (1 - delta) times the smallest stage term every time."""
    model = make_tail_model(2, 3)
    autos = [cyclic_automorphism(model, 1)]
    delta = 0.1
    m_stages = 91  # 1 + 0.9 * |D| / delta^2 with |D| = 1
    held = 0
    for inst in range(100):
        rand = random.Random(606 + inst)
        stage_levels = sorted(rand.choice((1, 2)) for _ in range(m_stages))
        levels = [[v] for v in stage_levels]
        b_arrays = [
            [frozenset(rand.sample(model.points, rand.randint(12, len(model.points))))]
            for _ in range(m_stages)
        ]
        y = rand.choice(model.points)
        report = covering(model, levels, b_arrays, autos, delta, y)
        assert report.hypothesis_ok, inst
        assert report.m_ok and report.m_stages >= 1 + 0.9 * report.d_size / 0.01, inst
        assert report.mass >= report.rhs, inst
        assert report.conclusion_holds, inst
        held += 1
    assert held == 100
    _report(6, "100/100 instances: mass >= (1-delta) * min stage term")


def _brute_folner(model, autos, n):
    total = Fraction(0)
    for y in model.points:
        base = {z for z in model.points if z[n:] == y[n:]}
        image = {phi(z) for z in base for phi in autos}
        total += model.weight * Fraction(len(base ^ image), len(base))
    return total


def test_criterion_07_folner_defect_exact_vanishing():
    """Defect hits zero exactly at the automorphism order and never
    before, agreeing with an independent symmetric-difference count on
    every model up to level 4."""
    models = [
        make_tail_model(2, 3),
        make_tail_model(2, 4),
        make_odometer_model(3),
        make_odometer_model(4),
    ]
    checked = 0
    for model in models:
        for order in range(1, model.level_count + 1):
            autos = [cyclic_automorphism(model, order)]
            for n in range(model.level_count + 1):
                defect = folner_defect(model, autos, n)
                assert defect == _brute_folner(model, autos, n)
                if n >= order:
                    assert defect == 0
                else:
                    assert defect > 0
                checked += 1
    _report(7, f"{checked} (model, order, level) cells exact, zero iff n >= order")


def test_criterion_08_pointwise_averages():
    """Odometer: depth-k cylinder averages equal the integral exactly
    once the level reaches k.  Extended relation: the two-start spread
    at level 8 sits under the 4-sigma concentration bound in at least
    95 of 100 runs."""
    model = make_odometer_model(5)
    for k in (1, 2, 3):
        for pattern in itertools.product((0, 1), repeat=k):
            f = lambda y, pat=bytes(pattern): 1 if y[: len(pat)] == pat else 0
            for n in range(k, model.level_count + 1):
                for y in (model.points[0], model.points[-1], model.points[7]):
                    avg = class_average(f, y, n, model=model)
                    assert avg == Fraction(1, 2**k), (k, pattern, n)

    p = ProbabilityVector((0.5, 0.5))
    f = indicator_symbol_observable(2, 0)
    bound = 4.0 * math.sqrt(0.25 / 3**8)
    hits = 0
    for run in range(100):
        rep = ergodicity_diagnostic(f, num_start_points=2, n_max=8, rank=2, p=p, seed=808_000 + run)
        if rep.rows[-1].spread < bound:
            hits += 1
    assert hits >= 95, f"only {hits}/100 runs inside the 4-sigma bound"
    _report(8, f"cylinder averages exact; spread inside 4 sigma in {hits}/100 runs")


def test_criterion_09_subadditive_harness():
    """The entropy functional passes the sampled admissibility audit on
    1000 decompositions; symbol-partition normalized values sit at H(p)
    exactly along the chain; block-coded values never undercut the
    candidate infimum."""
    p = ProbabilityVector((0.7, 0.3))
    model3 = make_tail_model(2, 3)
    f_sym = entropy_functional(model3, symbol_partition(2, 2), p, mode="exact")
    audit = check_subadditive(f_sym, model3, trials=1000, seed=909)
    assert audit.passed, audit.violation

    model4 = make_tail_model(2, 4)
    f_sym4 = entropy_functional(model4, symbol_partition(2, 2), p, mode="exact")
    h = shannon((0.7, 0.3))
    report = subadditive_limit_harness(
        f_sym4,
        model4,
        range(model4.level_count + 1),
        [("blocks-1", coordinate_block_relation(model4, [1]))],
    )
    for row in report.rows:
        assert abs(row.s_n - h) <= 1e-12, row
        assert row.gap >= -1e-12

    window = (parse_word("e", 2), parse_word("a1", 2))
    worst_gap = math.inf
    for lab in (modsum_partition(window, 2), joint_partition(window, 2)):
        f_blk = entropy_functional(model3, lab, p, mode="exact")
        rep = subadditive_limit_harness(
            f_blk,
            model3,
            range(model3.level_count + 1),
            [
                ("blocks-0", coordinate_block_relation(model3, [0])),
                ("blocks-1", coordinate_block_relation(model3, [1])),
            ],
        )
        for row in rep.rows:
            assert row.gap >= -1e-12, (lab.descriptor, row)
            worst_gap = min(worst_gap, row.gap)
    _report(9, f"audit 1000 ok; s_n = H(p) exact; block-coded min gap {worst_gap:.2e} >= 0")


def test_criterion_10_counting_bound():
    """Exact disjoint-subcollection counts on every instance with class
    size at most 20 stay under 2^(5 E(l/2) |class|)."""
    instances = [
        (make_odometer_model(4), 4, [1, 2, 3, 4]),
        (make_odometer_model(4), 3, [1, 2, 3]),
        (make_odometer_model(4), 2, [1, 2]),
        (make_tail_model(2, 3), 2, [1, 2]),
        (make_tail_model(2, 4), 2, [1, 2]),
    ]
    checked = 0
    for model, n, levels in instances:
        size = model.class_size(n)
        assert size <= 20
        for ell in (4, 6, 8):
            for y in (model.points[0], model.points[-1]):
                count = count_disjoint_subcollections(model, y, n, levels, ell)
                bound = counting_bound(ell, size)
                assert count <= bound, (n, levels, ell, count, bound)
                checked += 1
    _report(10, f"{checked} instances: exact count <= 2^(5 E(l/2) |class|)")
