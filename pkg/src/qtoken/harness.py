"""Seeded Monte Carlo scenario runner and exact inequality suites.

Each scenario replays one quantitative story end to end (honest redemption,
adversarial histories, forgery strategies, tracking audits, one-time pads,
voting) and reduces it to metrics with confidence intervals, a reference
value or bound, and a pass flag. Runs are deterministic: every trial draws
its randomness from a stream derived from (master seed, trial index), and
result aggregation is order independent, so a spec (including its seed)
maps to a byte-identical CSV.

The inequality suite checks the closed-form relations the scheme's analysis
rests on, in exact arithmetic on exact post-measurement states; violations
beyond 1e-9 fail the run.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import adversary, audit, scheme, stats
from .bank import BankService
from .core import (
    RegisterLayout,
    SparseState,
    measure_register,
    random_state,
    swap_probability,
    swap_probability_density,
    reduced_density,
    swap_project,
    tensor,
    trace_distance_advantage,
)

SCENARIOS = (
    "honest-flow",
    "adversarial-history",
    "forgery",
    "tracking-audit",
    "otp-roundtrip",
    "voting",
    "inequality-suite",
)

_DEFAULTS = {
    "honest-flow": (4, 100_000),
    "adversarial-history": (4, 100_000),
    "forgery": (16, 100_000),
    "tracking-audit": (4, 100_000),
    "otp-roundtrip": (16, 1000),
    "voting": (16, 500),
    "inequality-suite": (None, None),
}

_QUANTUM_SCENARIOS = {"honest-flow", "adversarial-history", "tracking-audit"}
_MAX_QUANTUM_K = 6
_MAX_EMULATED_K = 20

VIOLATION_TOL = 1e-9

FORGER_STRATEGIES = {
    "uniform-guess": ("uniform-fresh-index", 0),
    "measure-and-guess-1": ("uniform-fresh-index", 1),
    "measure-and-guess-2": ("uniform-fresh-index", 2),
    "replay": ("replay", 1),
    "block-collision": ("block-collision", 1),
}
_DEFAULT_FORGER_SET = ("uniform-guess", "measure-and-guess-1", "measure-and-guess-2", "replay")


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: str
    k: int | None = None
    trials: int | None = None
    seed: int = 0
    strategy: str | None = None
    out: str | None = None


@dataclass(frozen=True)
class MetricResult:
    metric: str
    trials: int
    estimate: float
    interval_low: float
    interval_high: float
    expected: float
    relation: str  # eq | le | ge | le-exact
    passed: bool
    claim: str


@dataclass(frozen=True)
class ExperimentResult:
    scenario: str
    k: int | None
    trials: int | None
    seed: int
    metrics: tuple[MetricResult, ...]

    def all_passed(self) -> bool:
        return all(m.passed for m in self.metrics)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            [
                "scenario", "k", "seed", "metric", "trials", "estimate",
                "interval_low", "interval_high", "expected", "relation",
                "pass", "claim",
            ]
        )
        k_text = "" if self.k is None else str(self.k)
        for m in self.metrics:
            writer.writerow(
                [
                    self.scenario, k_text, self.seed, m.metric, m.trials,
                    repr(float(m.estimate)), repr(float(m.interval_low)),
                    repr(float(m.interval_high)), repr(float(m.expected)),
                    m.relation, str(m.passed).lower(), m.claim,
                ]
            )
        return buf.getvalue()

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


def _rate_metric(name, successes, trials, expected, claim) -> MetricResult:
    lo, hi = stats.proportion_interval(successes, trials)
    return MetricResult(
        name, trials, successes / trials, lo, hi, expected, "eq",
        stats.matches_rate(successes, trials, expected), claim,
    )


def _bound_metric(name, successes, trials, bound, claim, sigmas=0.0) -> MetricResult:
    est = successes / trials
    lo, hi = stats.proportion_interval(successes, trials)
    slack = sigmas * stats.binomial_sigma(est, trials)
    return MetricResult(name, trials, est, lo, hi, bound, "le", est <= bound + slack, claim)


def _exact_metric(name, value, instances, claim, tolerance=VIOLATION_TOL) -> MetricResult:
    return MetricResult(
        name, instances, value, value, value, tolerance, "le-exact",
        value <= tolerance, claim,
    )


def _stat_metric(name, statistic, critical, trials, claim) -> MetricResult:
    return MetricResult(
        name, trials, statistic, statistic, statistic, critical, "le",
        statistic <= critical, claim,
    )


def _resolve(spec: ScenarioSpec) -> ScenarioSpec:
    if spec.scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {spec.scenario!r}")
    dk, dt = _DEFAULTS[spec.scenario]
    k = spec.k if spec.k is not None else dk
    trials = spec.trials if spec.trials is not None else dt
    if k is not None:
        if spec.scenario in _QUANTUM_SCENARIOS and k > _MAX_QUANTUM_K:
            raise ValueError(f"scenario {spec.scenario!r} simulates states; needs k <= {_MAX_QUANTUM_K}")
        if k > _MAX_EMULATED_K:
            raise ValueError(f"k = {k} above the emulated-mode limit {_MAX_EMULATED_K}")
    if trials is not None and trials < 1:
        raise ValueError("trials must be >= 1")
    return ScenarioSpec(spec.scenario, k, trials, spec.seed, spec.strategy, spec.out)


def run_scenario(spec: ScenarioSpec) -> ExperimentResult:
    """Execute a scenario end to end; deterministic in the spec's seed."""
    spec = _resolve(spec)
    runner = {
        "honest-flow": _run_honest_flow,
        "adversarial-history": _run_adversarial_history,
        "forgery": _run_forgery_scenario,
        "tracking-audit": _run_tracking_audit,
        "otp-roundtrip": _run_otp,
        "voting": _run_voting,
        "inequality-suite": _run_inequality_scenario,
    }[spec.scenario]
    result = runner(spec)
    if spec.out:
        result.write_csv(spec.out)
    return result


# -- honest flows ------------------------------------------------------------


def _run_honest_flow(spec: ScenarioSpec) -> ExperimentResult:
    k, trials, seed = spec.k, spec.trials, spec.seed
    service = BankService()
    accepted = valid = 0
    index_counts = np.zeros(1 << k, dtype=np.int64)
    for t in range(trials):
        rng = stats.trial_rng(seed, t)
        secret = scheme.SecretString.random(k, rng, f"t{t}")
        sid = service.register_series(secret)
        token = scheme.mint(secret, 1)[0]
        rep = scheme.report(token, rng)
        decision = service.handle_verify(sid, rep)
        accepted += decision.status == "OK"
        valid += secret.block(rep.index) == rep.value
        index_counts[rep.index - 1] += 1
    stat, crit, _ = stats.uniformity_passes(index_counts)
    metrics = (
        _rate_metric("acceptance_rate", accepted, trials, 1.0,
                     "fresh valid reports are always accepted"),
        _rate_metric("report_validity", valid, trials, 1.0,
                     "honest reports always satisfy R = block_I(S)"),
        _stat_metric("index_uniformity_chi2", stat, crit, trials,
                     "honest report index is uniform over [2^k]"),
    )
    return ExperimentResult(spec.scenario, k, trials, seed, metrics)


def _run_adversarial_history(spec: ScenarioSpec) -> ExperimentResult:
    """Honest rejection rates against adversarial histories.

    Foreign pairs (valid under an independent decoy secret) each collide with
    a fresh honest report with probability 2^(-2k); same-series valid pairs
    collide with probability 1/2^k each. Both rates stay below eps_l.
    """
    k, trials, seed = spec.k, spec.trials, spec.seed
    size = 1 << k
    params = scheme.SchemeParams.for_k(k)
    j_foreign = 15
    j_same = params.cap_test - 1
    rejected_foreign = rejected_same = 0
    for t in range(trials):
        rng = stats.trial_rng(seed, t)
        secret = scheme.SecretString.random(k, rng)
        token = scheme.token_state(secret)

        decoy = scheme.SecretString.random(k, rng, "decoy")
        history = scheme.VerificationHistory()
        for i in rng.permutation(size)[:j_foreign]:
            history.append(scheme.TokenReport(int(i) + 1, decoy.block(int(i) + 1), k))
        rep = scheme.report(token, rng)
        rejected_foreign += not scheme.test(secret, history, rep)

        history_same = scheme.VerificationHistory()
        for i in rng.permutation(size)[:j_same]:
            history_same.append(scheme.TokenReport(int(i) + 1, secret.block(int(i) + 1), k))
        rep2 = scheme.report(token, rng)
        rejected_same += not scheme.test(secret, history_same, rep2)

    p_foreign = j_foreign / size**2
    p_same = j_same / size
    metrics = (
        _rate_metric("foreign_history_rejection", rejected_foreign, trials, p_foreign,
                     "j foreign pairs collide with an honest report w.p. j/2^(2k)"),
        _bound_metric("foreign_rejection_below_eps_l", rejected_foreign, trials,
                      params.eps_l, "honest rejection stays below eps_l = 2^(-k/2)"),
        _rate_metric("same_series_rejection", rejected_same, trials, p_same,
                     "j same-series pairs collide with an honest report w.p. j/2^k"),
        _bound_metric("same_series_below_eps_l", rejected_same, trials,
                      params.eps_l, "honest rejection stays below eps_l = 2^(-k/2)"),
    )
    return ExperimentResult(spec.scenario, k, trials, seed, metrics)


# -- forgery -------------------------------------------------------------------


def _forger_strategy(name: str, params: scheme.SchemeParams) -> adversary.ForgerStrategy:
    try:
        policy, measured = FORGER_STRATEGIES[name]
    except KeyError:
        raise ValueError(f"unknown forger strategy {name!r}") from None
    budget = 2 * measured if policy == "replay" else params.cap_test
    return adversary.ForgerStrategy(name, measured, budget, policy)


def _run_forgery_scenario(spec: ScenarioSpec) -> ExperimentResult:
    k, trials, seed = spec.k, spec.trials, spec.seed
    params = scheme.SchemeParams.for_k(k)
    names = (spec.strategy,) if spec.strategy else _DEFAULT_FORGER_SET
    ordinals = {name: i for i, name in enumerate(FORGER_STRATEGIES)}
    metrics: list[MetricResult] = []
    for name in names:
        strat = _forger_strategy(name, params)
        wins = 0
        for t in range(trials):
            rng = stats.spawn_rng(seed, ordinals[name], t)
            secret = scheme.LazySecret(k, rng)
            accepted, _ = adversary.run_forgery(secret, strat, rng)
            wins += accepted > strat.measured
        bound = adversary.eval_forgery_bound(params.cap_test, strat.measured, 1 << k)
        metrics.append(
            _bound_metric(f"win_rate[{name}]", wins, trials, bound,
                          "win rate <= min(1, 5*N*(q+1)/|Y|)", sigmas=3.0)
        )
        if name == "uniform-guess":
            exact = 1.0 - (1.0 - 2.0**-k) ** params.cap_test
            metrics.append(
                _rate_metric("uniform_guess_win_rate", wins, trials, exact,
                             "uniform guessing wins w.p. 1-(1-2^-k)^N")
            )
        if name == "replay":
            metrics.append(
                _rate_metric("replay_win_rate", wins, trials, 0.0,
                             "replayed pairs never add acceptances")
            )
    return ExperimentResult(spec.scenario, k, trials, seed, tuple(metrics))


# -- tracking audits ------------------------------------------------------------


def _run_tracking_audit(spec: ScenarioSpec) -> ExperimentResult:
    k, trials, seed = spec.k, spec.trials, spec.seed
    size = 1 << k
    n = 2 * k
    setup = stats.spawn_rng(seed, 0)
    secret = scheme.SecretString.random(k, setup)
    pattern = scheme.token_state(secret)

    loaded, loaded_layout = adversary.mint_loaded(secret)
    joint_loaded = tensor(pattern, loaded)
    layout_loaded = RegisterLayout([("pattern", n), ("bank", k), ("token", n)])

    perm = setup.permutation(size)
    paired, paired_layout = adversary.mint_permutation_paired(secret, perm)
    joint_paired = tensor(pattern, paired)
    layout_paired = RegisterLayout([("pattern", n), ("token1", n), ("token2", n)])

    detect_loaded = detect_paired = 0
    for t in range(trials):
        rng = stats.spawn_rng(seed, 1, t)
        out = audit.report_prime(joint_loaded, layout_loaded, "pattern", "token", rng)
        detect_loaded += out.cheat_detected
        out = audit.report_prime(joint_paired, layout_paired, "pattern", "token1", rng)
        detect_paired += out.cheat_detected

    loaded_counts = np.zeros(size, dtype=np.int64)
    paired_counts = np.zeros(size, dtype=np.int64)
    loaded_valid = paired_valid = 0
    for t in range(trials):
        rng = stats.spawn_rng(seed, 2, t)
        bits, _ = measure_register(loaded, loaded_layout, "token", rng)
        rep = scheme.TokenReport.from_wire(k, int(bits, 2))
        loaded_counts[rep.index - 1] += 1
        loaded_valid += secret.block(rep.index) == rep.value
        bits, _ = measure_register(paired, paired_layout, "token1", rng)
        rep = scheme.TokenReport.from_wire(k, int(bits, 2))
        paired_counts[rep.index - 1] += 1
        paired_valid += secret.block(rep.index) == rep.value

    p_detect = (1.0 - 2.0**-k) / 2.0
    stat_l, crit, _ = stats.uniformity_passes(loaded_counts)
    stat_p, _, _ = stats.uniformity_passes(paired_counts)
    metrics = (
        _rate_metric("loaded_detection_rate", detect_loaded, trials, p_detect,
                     "audit fires on a loaded token w.p. (1-2^-k)/2"),
        _rate_metric("paired_detection_rate", detect_paired, trials, p_detect,
                     "audit fires on a paired token w.p. (1-2^-k)/2"),
        _stat_metric("loaded_message_uniformity", stat_l, crit, trials,
                     "a loaded token's messages look honest (chi-squared, 0.001)"),
        _stat_metric("paired_message_uniformity", stat_p, crit, trials,
                     "a paired token's messages look honest (chi-squared, 0.001)"),
        _rate_metric("loaded_message_validity", loaded_valid, trials, 1.0,
                     "a loaded token's reports always satisfy R = block_I(S)"),
        _rate_metric("paired_message_validity", paired_valid, trials, 1.0,
                     "a paired token's reports always satisfy R = block_I(S)"),
    )
    return ExperimentResult(spec.scenario, k, trials, seed, metrics)


# -- one-time pads and voting ------------------------------------------------------


def _run_otp(spec: ScenarioSpec) -> ExperimentResult:
    k, trials, seed = spec.k, spec.trials, spec.seed
    size = 1 << k
    if trials > size:
        raise ValueError("more roundtrips than distinct pad indices")
    setup = stats.spawn_rng(seed, 0)
    secret = scheme.SecretString.random(k, setup, "otp")
    service = BankService()
    sid = service.register_series(secret)
    indices = setup.permutation(size)[:trials]
    roundtrips = reuse_rejected = 0
    for t in range(trials):
        rng = stats.trial_rng(seed, t)
        index = int(indices[t]) + 1
        message = int(rng.integers(0, size))
        pad = secret.block(index)  # the holder knows R from measuring the token
        cipher = pad ^ message
        decision = service.handle_decode(sid, index, cipher)
        roundtrips += decision.status == "OK" and decision.payload == message
        again = service.handle_decode(sid, index, cipher)
        reuse_rejected += again.status == "REJECT"
    metrics = (
        _rate_metric("roundtrip_identity", roundtrips, trials, 1.0,
                     "decode(encode(M)) = M for every fresh pad"),
        _rate_metric("pad_reuse_rejected", reuse_rejected, trials, 1.0,
                     "a consumed pad never authorizes again"),
    )
    return ExperimentResult(spec.scenario, k, trials, seed, metrics)


def _run_voting(spec: ScenarioSpec) -> ExperimentResult:
    k, voters, seed = spec.k, spec.trials, spec.seed
    size = 1 << k
    if voters > size:
        raise ValueError("more voters than distinct pad indices")
    setup = stats.spawn_rng(seed, 0)
    secret = scheme.SecretString.random(k, setup, "vote")
    service = BankService()
    sid = service.register_series(secret)
    indices = setup.permutation(size)[:voters]
    cast: list[int] = []
    accepted = 0
    double_rejected = 0
    double_votes = 0
    for t in range(voters):
        rng = stats.trial_rng(seed, t)
        index = int(indices[t]) + 1
        choice = int(rng.integers(0, 2))
        pad = secret.block(index)
        decision = service.handle_vote(sid, index, pad ^ choice)
        accepted += decision.status == "OK"
        cast.append(choice)
        if t % 10 == 0:  # every tenth voter tries to vote twice with the same pad
            double_votes += 1
            again = service.handle_vote(sid, index, pad ^ (1 - choice))
            double_rejected += again.status == "REJECT"
    tally = service.tally(sid)
    expected_tally = {c: cast.count(c) for c in set(cast)}
    metrics = (
        _rate_metric("votes_accepted", accepted, voters, 1.0,
                     "every fresh token casts exactly one vote"),
        _rate_metric("tally_matches_cast", int(tally == expected_tally), 1, 1.0,
                     "the tally equals the multiset of cast votes"),
        _rate_metric("double_votes_rejected", double_rejected, double_votes, 1.0,
                     "double votes with a reused pad are rejected"),
    )
    return ExperimentResult(spec.scenario, k, voters, seed, metrics)


# -- inequality suites ---------------------------------------------------------------


@dataclass(frozen=True)
class SuiteSizes:
    projection: int = 1000
    swap_chain: int = 1000
    swap_mixed: int = 200
    report_indist: int = 500
    pattern_chain_exact: int = 10_000
    pattern_chain_sampled: int = 10_000


def _random_projector(rng, dim: int, sub_dim: int, complex_case: bool) -> np.ndarray:
    shape = (dim, sub_dim)
    mat = rng.normal(size=shape)
    if complex_case:
        mat = mat + 1j * rng.normal(size=shape)
    q, _ = np.linalg.qr(mat)
    return q @ q.conj().T


def projection_checks(rng, instances: int, max_dim: int = 16) -> tuple[float, float]:
    """Max violations of the two projection inequalities over random instances."""
    worst_chain = worst_diff = 0.0
    for _ in range(instances):
        dim = int(rng.integers(2, max_dim + 1))
        complex_case = bool(rng.integers(0, 2))
        v = rng.normal(size=dim)
        if complex_case:
            v = v + 1j * rng.normal(size=dim)
        p1 = _random_projector(rng, dim, int(rng.integers(1, dim + 1)), complex_case)
        p2 = _random_projector(rng, dim, int(rng.integers(1, dim + 1)), complex_case)
        v_s2 = np.linalg.norm(p2 @ v)
        v_s1_s2 = np.linalg.norm(p2 @ (p1 @ v))
        worst_chain = max(worst_chain, v_s1_s2 - v_s2)
        rest = np.linalg.norm(v - p1 @ v)
        diff = v_s2**2 - v_s1_s2**2 - 2.0 * rest * np.linalg.norm(v)
        worst_diff = max(worst_diff, diff)
    return worst_chain, worst_diff


_CHAIN_LAYOUT = RegisterLayout([("r1", 2), ("r2", 2), ("r3", 2)])


def swap_chain_checks(rng, instances: int) -> float:
    """Max violation of the swap-test chain inequality on random 3-register states."""
    worst = 0.0
    for _ in range(instances):
        chi = random_state(6, rng)
        lhs = swap_probability(chi, _CHAIN_LAYOUT, "r1", "r2")
        first = swap_probability(chi, _CHAIN_LAYOUT, "r2", "r3")
        if 1.0 - first < 1e-12:
            worst = max(worst, lhs - first)
            continue
        post = swap_project(chi, _CHAIN_LAYOUT, "r2", "r3", 0)
        second = swap_probability(post, _CHAIN_LAYOUT, "r1", "r2")
        worst = max(worst, lhs - first - second)
    return worst


_MIXED_LAYOUT = RegisterLayout([("r0", 2), ("r1", 2), ("r2", 2)])


def swap_mixed_checks(rng, instances: int) -> tuple[float, float]:
    """Detection bound for mixed states: distinguishing advantage between the
    (side, token a) and (side, token b) marginals never beats
    1/2 + sqrt(p_swap). Also cross-checks the pure-state and density-matrix
    routes to p_swap against each other."""
    worst = worst_consistency = 0.0
    for _ in range(instances):
        chi = random_state(6, rng)
        sigma = reduced_density(chi, _MIXED_LAYOUT, ["r1", "r2"])
        sigma_1 = reduced_density(chi, _MIXED_LAYOUT, ["r0", "r1"])
        sigma_2 = reduced_density(chi, _MIXED_LAYOUT, ["r0", "r2"])
        advantage = trace_distance_advantage(sigma_1, sigma_2)
        p_pure = swap_probability(chi, _MIXED_LAYOUT, "r1", "r2")
        p_mixed = swap_probability_density(sigma)
        worst_consistency = max(worst_consistency, abs(p_pure - p_mixed))
        worst = max(worst, advantage - (0.5 + sqrt(p_pure)))
    return worst, worst_consistency


def _loaded_toy_instance(rng) -> tuple[SparseState, RegisterLayout]:
    """Tiny loaded-style joint state: honest 2-qubit pattern in slot a, a
    2-qubit token fully correlated with a 1-qubit bank register in slot b."""
    secret = scheme.SecretString.random(1, rng)
    pattern = scheme.token_state(secret)
    loaded, _ = adversary.mint_loaded(secret)
    joint = tensor(pattern, loaded)
    layout = RegisterLayout([("tok_a", 2), ("bank", 1), ("tok_b", 2)])
    return joint, layout


def report_indist_checks(rng, instances: int) -> float:
    """Max violation of advantage <= 1/2 + sqrt(p_bot) across random and
    loaded-style instances (token-slot distinguishers with bank side info)."""
    worst = 0.0
    structured = max(1, instances // 10)
    for i in range(instances):
        if i < structured:
            chi, layout = _loaded_toy_instance(rng)
            gap = audit.anonymity_gap(chi, layout, "bank", "tok_a", "tok_b")
        else:
            chi = random_state(6, rng)
            gap = audit.anonymity_gap(chi, _MIXED_LAYOUT, "r0", "r1", "r2")
        worst = max(worst, gap.advantage - gap.detection_bound)
    return worst


_PATTERN_LAYOUT = RegisterLayout([("p", 2), ("t1", 2), ("t2", 2)])


def pattern_chain_exact_checks(rng, instances: int) -> float:
    """Max violation of Pr[chain aborts] >= Pr[single audit aborts], exact."""
    worst = 0.0
    for _ in range(instances):
        chi = random_state(6, rng)
        prime = audit.cheat_probability(chi, _PATTERN_LAYOUT, "p", "t1")
        chain = audit.chain_cheat_probability(chi, _PATTERN_LAYOUT)
        worst = max(worst, prime - chain)
    return worst


def pattern_chain_sampled(seed: int, trials: int) -> tuple[int, int]:
    """Sampled abort counts of (chain, single) audits on fresh random states."""
    chain_bot = prime_bot = 0
    for t in range(trials):
        rng = stats.spawn_rng(seed, 7, t)
        chi = random_state(6, rng)
        chain = audit.report_chain(chi, _PATTERN_LAYOUT, rng)
        chain_bot += chain.outcome.cheat_detected
        prime = audit.report_prime(chi, _PATTERN_LAYOUT, "p", "t1", rng)
        prime_bot += prime.cheat_detected
    return chain_bot, prime_bot


def run_inequality_suite(seed: int = 0, sizes: SuiteSizes | None = None) -> ExperimentResult:
    """Run every exact-arithmetic inequality check plus the sampled chain test."""
    sizes = sizes or SuiteSizes()
    rng = stats.spawn_rng(seed, 100)
    chain_v, diff_v = projection_checks(rng, sizes.projection)
    swap_chain_v = swap_chain_checks(stats.spawn_rng(seed, 101), sizes.swap_chain)
    mixed_v, consistency_v = swap_mixed_checks(stats.spawn_rng(seed, 102), sizes.swap_mixed)
    indist_v = report_indist_checks(stats.spawn_rng(seed, 103), sizes.report_indist)
    pattern_v = pattern_chain_exact_checks(stats.spawn_rng(seed, 104), sizes.pattern_chain_exact)
    chain_bot, prime_bot = pattern_chain_sampled(seed, sizes.pattern_chain_sampled)

    n = sizes.pattern_chain_sampled
    p_chain, p_prime = chain_bot / n, prime_bot / n
    margin = 3.0 * sqrt(
        stats.binomial_sigma(p_chain, n) ** 2 + stats.binomial_sigma(p_prime, n) ** 2
    )
    diff = p_chain - p_prime
    sampled_metric = MetricResult(
        "pattern_chain_sampled_gap", n, diff, diff - margin, diff + margin,
        0.0, "ge", diff >= -margin,
        "chained audits abort at least as often as single audits",
    )
    metrics = (
        _exact_metric("projection_chain_violation", chain_v, sizes.projection,
                      "norm((v|S1)|S2) <= norm(v|S2)"),
        _exact_metric("projection_difference_violation", diff_v, sizes.projection,
                      "norm(v|S2)^2 - norm((v|S1)|S2)^2 <= 2*norm(v|S1_perp)*norm(v)"),
        _exact_metric("swap_chain_violation", swap_chain_v, sizes.swap_chain,
                      "p1(a,b) <= p1(b,c) + p1(a,b | post pass(b,c))"),
        _exact_metric("mixed_detection_violation", mixed_v, sizes.swap_mixed,
                      "advantage <= 1/2 + sqrt(p_swap) for purified mixed pairs"),
        _exact_metric("swap_probability_consistency", consistency_v, sizes.swap_mixed,
                      "pure-state and density-matrix swap probabilities agree"),
        _exact_metric("report_indist_violation", indist_v, sizes.report_indist,
                      "token-usage distinguishers obey the audit detection bound"),
        _exact_metric("pattern_chain_violation", pattern_v, sizes.pattern_chain_exact,
                      "Pr[chain audit aborts] >= Pr[single audit aborts]"),
        sampled_metric,
    )
    return ExperimentResult("inequality-suite", None, None, seed, metrics)


def _run_inequality_scenario(spec: ScenarioSpec) -> ExperimentResult:
    sizes = SuiteSizes()
    if spec.trials is not None:
        sizes = SuiteSizes(
            pattern_chain_exact=spec.trials, pattern_chain_sampled=spec.trials
        )
    return run_inequality_suite(spec.seed, sizes)


# -- parameter/bound tables -----------------------------------------------------------


def bounds_rows(k: int) -> list[tuple[str, str, str, str]]:
    """(quantity, q, r, value) rows for the parameter and bound table at k."""
    params = scheme.SchemeParams.for_k(k)
    rows = [
        ("n_qubits_per_token", "", "", str(params.n)),
        ("secret_bits", "", "", str(params.m)),
        ("cap_mint", "", "", str(params.cap_mint)),
        ("cap_test", "", "", str(params.cap_test)),
        ("report_bits", "", "", str(params.t)),
        ("eps_l", "", "", repr(params.eps_l)),
        ("eps_f_constant5", "", "", repr(5.0 * 2.0 ** (-k / 4))),
        ("eps_f_constant6", "", "", repr(params.eps_f)),
    ]
    y = 1 << k
    for q in range(0, min(4, params.cap_mint + 1)):
        r = q + 1
        while r <= params.cap_test:
            value = adversary.eval_all_correct_bound(q, r, y)
            rows.append(("all_correct_probability", str(q), str(r), repr(value)))
            r *= 2
    return rows


def bounds_csv(k: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["quantity", "q", "r", "value"])
    for row in bounds_rows(k):
        writer.writerow(row)
    return buf.getvalue()
