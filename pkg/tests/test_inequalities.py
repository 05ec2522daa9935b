"""Randomized checks of the closed-form inequalities at unit-test scale.

The acceptance suite reruns these at their full instance counts; here the
same generators run smaller, plus the structured families where the
inequalities are tight or degenerate.
"""

import math

import numpy as np

from qtoken import audit, core, harness, stats


def test_projection_difference_inequality_random():
    _, diff_v = harness.projection_checks(stats.spawn_rng(1), 300)
    assert diff_v <= 1e-9


def test_projection_chain_relation_is_false_for_generic_subspaces():
    """Projecting through an intermediate subspace can grow the component in
    the final one, so ||P2 P1 v|| <= ||P2 v|| fails for generic pairs. The
    minimal counterexample: v = e1, S1 = span((1,1)/sqrt(2)), S2 = span(e2)
    gives 1/2 on the left and 0 on the right. Random pairs hit violations at
    a measurable rate, which the suite reports rather than hides."""
    v = np.array([1.0, 0.0])
    s = np.array([1.0, 1.0]) / math.sqrt(2)
    p1 = np.outer(s, s)
    p2 = np.diag([0.0, 1.0])
    assert np.linalg.norm(p2 @ p1 @ v) - np.linalg.norm(p2 @ v) > 0.49
    chain_v, _ = harness.projection_checks(stats.spawn_rng(1), 300)
    assert chain_v > 1e-9


def test_swap_chain_random():
    assert harness.swap_chain_checks(stats.spawn_rng(2), 300) <= 1e-9


def test_swap_chain_relation_admits_crafted_counterexamples():
    """The chain relation holds on Haar-random states (the suites above) but
    is not a worst-case law: states that are nearly antisymmetric across the
    first register pair can beat it. This pins one such state so the
    limitation stays documented."""
    layout = core.RegisterLayout([("r1", 1), ("r2", 1), ("r3", 1)])
    # chi proportional to |001> + (1+sqrt(3))|010> - (2+sqrt(3))|100>: then
    # lhs = (2+sqrt(3))/4, first = (2-sqrt(3))/4, second = 3/4, violating
    # lhs <= first + second by exactly (2*sqrt(3)-3)/4.
    r3 = math.sqrt(3)
    chi = core.SparseState(
        3, {0b001: 1.0, 0b010: 1.0 + r3, 0b100: -(2.0 + r3)}, normalize=True
    )
    lhs = core.swap_probability(chi, layout, "r1", "r2")
    first = core.swap_probability(chi, layout, "r2", "r3")
    post = core.swap_project(chi, layout, "r2", "r3", 0)
    second = core.swap_probability(post, layout, "r1", "r2")
    assert abs(lhs - (2 + r3) / 4) <= 1e-9
    assert abs(first - (2 - r3) / 4) <= 1e-9
    assert abs(second - 0.75) <= 1e-9
    assert abs((lhs - first - second) - (2 * r3 - 3) / 4) <= 1e-9


def test_pattern_chain_relation_admits_crafted_counterexamples():
    """Same caveat for the chained audit: a state antisymmetric across
    (pattern, first token) aborts the single audit with certainty, while the
    extra leading swap test can symmetrize it enough to slip through."""
    layout = core.RegisterLayout([("p", 1), ("t1", 1), ("t2", 1)])
    s = 1 / math.sqrt(2)
    chi = core.SparseState(3, {0b010: s, 0b100: -s})
    prime = audit.cheat_probability(chi, layout, "p", "t1")
    chain = audit.chain_cheat_probability(chi, layout)
    assert abs(prime - 1.0) <= 1e-9
    assert abs(chain - 13 / 16) <= 1e-9  # 1/4 + (3/4)*(3/4)


def test_swap_chain_trivial_on_identical_registers():
    """Identical registers make every term of the chain inequality zero."""
    phi = core.random_state(2, stats.spawn_rng(3))
    chi = core.tensor_all([phi, phi, phi])
    layout = harness._CHAIN_LAYOUT
    assert core.swap_probability(chi, layout, "r1", "r2") <= 1e-9
    assert core.swap_probability(chi, layout, "r2", "r3") <= 1e-9
    post = core.swap_project(chi, layout, "r2", "r3", 0)
    assert core.swap_probability(post, layout, "r1", "r2") <= 1e-9


def test_swap_mixed_random():
    worst, consistency = harness.swap_mixed_checks(stats.spawn_rng(4), 60)
    assert worst <= 1e-9
    assert consistency <= 1e-9


def test_report_indist_random_and_loaded():
    assert harness.report_indist_checks(stats.spawn_rng(5), 80) <= 1e-9


def test_pattern_chain_exact_random():
    assert harness.pattern_chain_exact_checks(stats.spawn_rng(6), 500) <= 1e-9


def test_pattern_chain_sampled_gap():
    chain_bot, prime_bot = harness.pattern_chain_sampled(seed=7, trials=2000)
    n = 2000
    p_chain, p_prime = chain_bot / n, prime_bot / n
    margin = 3 * math.sqrt(
        stats.binomial_sigma(p_chain, n) ** 2 + stats.binomial_sigma(p_prime, n) ** 2
    )
    assert p_chain >= p_prime - margin


def test_distinguishing_bound_tight_for_orthogonal_pure_states():
    """An orthogonal pure pair is perfectly distinguishable and the swap side
    gives 1/2 + sqrt(1/2) > 1, so the bound is respected with slack."""
    layout = core.RegisterLayout([("r0", 1), ("r1", 1), ("r2", 1)])
    chi = core.SparseState.basis(3, 0b001)  # registers 1, 2 hold |0>, |1>
    gap = audit.anonymity_gap(chi, layout, "r0", "r1", "r2")
    assert abs(gap.advantage - 1.0) <= 1e-9
    assert abs(gap.detection_bound - (0.5 + math.sqrt(0.5))) <= 1e-9
