import math

import pytest

from fgentropy.boundary import sample_prefix
from fgentropy.entropy import (
    closed_form_target,
    cocycle_entropy_sweep,
    cocycle_keys,
    entropy_function_hP,
    information_function,
    l1_convergence_report,
    marginal_entropy,
    normalized_set_entropy,
    plugin_refined_entropy,
    refined_entropy,
    shannon,
    smb_trajectory,
)
from fgentropy.errors import ResourceLimitError, StructureError
from fgentropy.shifts import (
    ProbabilityVector,
    bernoulli_point,
    joint_partition,
    modsum_partition,
    symbol_partition,
    trivial_partition,
    uniform_vector,
)
from fgentropy.words import enumerate_ball, identity, parse_word


def test_shannon_known_values():
    assert shannon((1.0,)) == 0.0
    assert shannon((0.5, 0.5)) == pytest.approx(math.log(2), abs=1e-15)
    assert shannon((0.25,) * 4) == pytest.approx(math.log(4), abs=1e-15)
    h = -(0.9 * math.log(0.9) + 0.1 * math.log(0.1))
    assert shannon((0.9, 0.1)) == pytest.approx(h, abs=1e-15)
    assert shannon((0.3, 0.7, 0.0)) == shannon((0.3, 0.7))
    with pytest.raises(StructureError):
        shannon((-0.1, 1.1))


def test_cocycle_keys_distinct_and_even():
    xi = sample_prefix(8, 2, 3)
    for n in range(4):
        keys = cocycle_keys(xi, n)
        assert len(keys) == 3**n
        assert len({g.codes for g in keys}) == len(keys)
        assert all(len(g) % 2 == 0 for g in keys)


def test_information_function_uniform_identity():
    p = uniform_vector(2)
    lab = symbol_partition(2, 2)
    x = bernoulli_point(17, 2, p)
    xi = sample_prefix(8, 2, 18)
    for n in range(5):
        j = information_function(x, xi, n, lab)
        assert j.value / 3**n == pytest.approx(math.log(2), abs=1e-12)


def test_information_exact_vs_monte_carlo():
    p = ProbabilityVector((0.5, 0.5))
    lab = symbol_partition(2, 2)
    x = bernoulli_point(19, 2, p)
    xi = sample_prefix(6, 2, 20)
    exact = information_function(x, xi, 1, lab)
    mc = information_function(x, xi, 1, lab, mode="monte-carlo", mc_samples=30_000, mc_seed=2)
    assert abs(mc.value - exact.value) < 4 * mc.stderr


def test_entropy_function_symbol_closed_form():
    p = ProbabilityVector((0.8, 0.2))
    lab = symbol_partition(2, 2)
    xi = sample_prefix(8, 2, 21)
    for n in range(4):
        est = entropy_function_hP(xi, n, lab, p)
        assert est.estimator == "exact"
        assert est.value == pytest.approx(3**n * shannon(p.weights), abs=1e-11)


def test_plugin_estimator_near_exact():
    p = ProbabilityVector((0.6, 0.4))
    lab = symbol_partition(2, 2)
    keys = enumerate_ball(1, 2)
    exact = refined_entropy(keys, lab, p, 2)
    est = plugin_refined_entropy(keys, lab, p, 2, m_samples=4000, seed=5)
    assert est.estimator == "plug-in-miller-madow"
    assert est.stderr > 0
    assert abs(est.value - exact.value) < 6 * est.stderr
    raw = plugin_refined_entropy(keys, lab, p, 2, m_samples=4000, seed=5, miller_madow=False)
    assert raw.estimator == "plug-in"
    assert raw.value < est.value  # the correction is strictly positive here


def test_refined_entropy_auto_falls_back():
    p = uniform_vector(2)
    big = joint_partition(enumerate_ball(2, 2), 2)
    with pytest.raises(ResourceLimitError):
        refined_entropy([identity(2)], big, p, 2, mode="exact", coord_cap=5)
    est = refined_entropy(
        [identity(2)], big, p, 2, mode="auto", coord_cap=5, m_samples=500, seed=1
    )
    assert est.estimator == "plug-in-miller-madow"
    with pytest.raises(StructureError):
        refined_entropy([identity(2)], big, p, 2, mode="bogus")


def test_closed_form_targets():
    p = ProbabilityVector((0.9, 0.1))
    assert closed_form_target(symbol_partition(2, 2), p) == pytest.approx(
        shannon((0.9, 0.1)), abs=1e-15
    )
    assert closed_form_target(trivial_partition(2), p) == 0.0
    mod = modsum_partition([identity(2), parse_word("a1", 2)], 2)
    assert closed_form_target(mod, p) is None


def test_sweep_constant_for_symbol_partition():
    p = ProbabilityVector((0.7, 0.3))
    rows = cocycle_entropy_sweep(symbol_partition(2, 2), p, 2, range(4), 3, seed=11)
    h = shannon((0.7, 0.3))
    for row in rows:
        assert row.estimator == "exact"
        assert row.stderr is None
        assert row.class_size == 3**row.n
        assert row.h_norm == pytest.approx(h, abs=1e-11)


def test_smb_trajectory_structure_and_determinism():
    p = ProbabilityVector((0.9, 0.1))
    lab = symbol_partition(2, 2)
    t1 = smb_trajectory(41, 42, lab, p, 2, 4)
    t2 = smb_trajectory(41, 42, lab, p, 2, 4)
    assert t1 == t2
    assert [r.n for r in t1.rows] == list(range(5))
    assert t1.endpoint().n == 4
    assert t1.target == pytest.approx(shannon((0.9, 0.1)), abs=1e-15)
    assert t1.estimator == "exact"
    # distinct starts give distinct information values at n >= 1
    t3 = smb_trajectory(43, 42, lab, p, 2, 4)
    assert t3.rows[4].info_nats != t1.rows[4].info_nats


def test_l1_report_uniform_is_exactly_zero():
    p = uniform_vector(2)
    lab = symbol_partition(2, 2)
    xi = sample_prefix(8, 2, 30)
    rows = l1_convergence_report(lab, p, 2, range(3), 5, xi, seed=31)
    for row in rows:
        assert row.l1_deviation == pytest.approx(0.0, abs=1e-12)


def test_l1_report_requires_target_for_block_codes():
    p = ProbabilityVector((0.6, 0.4))
    mod = modsum_partition([identity(2), parse_word("a1", 2)], 2)
    xi = sample_prefix(8, 2, 32)
    with pytest.raises(StructureError):
        l1_convergence_report(mod, p, 2, range(2), 2, xi, seed=33)
    rows = l1_convergence_report(mod, p, 2, range(2), 2, xi, seed=33, target=0.5)
    assert len(rows) == 2


def test_sandwich_quantities():
    p = ProbabilityVector((0.8, 0.2))
    lab = symbol_partition(2, 2)
    h = shannon((0.8, 0.2))
    assert marginal_entropy(lab, p) == pytest.approx(h, abs=1e-15)
    keys = enumerate_ball(2, 2)
    assert normalized_set_entropy(keys, lab, p, 2) == pytest.approx(h, abs=1e-12)
