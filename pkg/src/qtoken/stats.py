"""Statistical utilities for the Monte Carlo harness.

Proportions with at least 10^4 trials get 3-sigma normal intervals; smaller
samples fall back to Wilson intervals. Goodness-of-fit checks use the
chi-squared statistic against the relevant critical value, so "passes at
significance 0.001" means the statistic stays below the 0.999 quantile.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats as _scipy_stats

NORMAL_INTERVAL_MIN_TRIALS = 10_000
SIGMAS = 3.0


def spawn_rng(*key: int) -> np.random.Generator:
    """Independent generator for a (seed, index, ...) derivation path."""
    return np.random.default_rng(np.random.SeedSequence(list(key)))


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    return spawn_rng(master_seed, trial_index)


def binomial_sigma(p: float, trials: int) -> float:
    """Standard deviation of a proportion estimator under true rate ``p``."""
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def wilson_interval(successes: int, trials: int, z: float = SIGMAS) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("need at least one trial")
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p_hat * (1 - p_hat) / trials + z * z / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def proportion_interval(successes: int, trials: int) -> tuple[float, float]:
    """3-sigma interval for a proportion; Wilson below 10^4 trials."""
    p_hat = successes / trials
    if trials >= NORMAL_INTERVAL_MIN_TRIALS:
        half = SIGMAS * binomial_sigma(p_hat, trials)
        return max(0.0, p_hat - half), min(1.0, p_hat + half)
    return wilson_interval(successes, trials)


def matches_rate(successes: int, trials: int, expected: float) -> bool:
    """Is the empirical rate within 3 binomial standard deviations of ``expected``?

    A reference rate of exactly 0 or 1 is deterministic and must be hit exactly.
    """
    p_hat = successes / trials
    if expected in (0.0, 1.0):
        return p_hat == expected
    return abs(p_hat - expected) <= SIGMAS * binomial_sigma(expected, trials)


def chi_squared_statistic(counts, expected) -> float:
    obs = np.asarray(counts, dtype=float)
    exp = np.asarray(expected, dtype=float)
    if obs.shape != exp.shape:
        raise ValueError("counts and expected must have the same shape")
    if np.any(exp <= 0):
        raise ValueError("expected counts must be positive")
    return float(np.sum((obs - exp) ** 2 / exp))


def chi_squared_uniform(counts) -> tuple[float, int]:
    """Chi-squared statistic of observed counts against the uniform law."""
    obs = np.asarray(counts, dtype=float)
    total = obs.sum()
    expected = np.full_like(obs, total / obs.size)
    return chi_squared_statistic(obs, expected), obs.size - 1


def chi_squared_two_sample(counts_a, counts_b) -> tuple[float, int]:
    """Homogeneity statistic for two count vectors over the same cells."""
    a = np.asarray(counts_a, dtype=float)
    b = np.asarray(counts_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("count vectors must have the same shape")
    keep = (a + b) > 0
    a, b = a[keep], b[keep]
    na, nb = a.sum(), b.sum()
    pooled = (a + b) / (na + nb)
    stat = float(np.sum((a - na * pooled) ** 2 / (na * pooled)))
    stat += float(np.sum((b - nb * pooled) ** 2 / (nb * pooled)))
    return stat, int(a.size - 1)


def chi2_critical(dof: int, significance: float = 0.001) -> float:
    return float(_scipy_stats.chi2.ppf(1.0 - significance, dof))


def uniformity_passes(counts, significance: float = 0.001) -> tuple[float, float, bool]:
    """(statistic, critical value, fail-to-reject?) for a uniformity test."""
    stat, dof = chi_squared_uniform(counts)
    crit = chi2_critical(dof, significance)
    return stat, crit, stat <= crit
