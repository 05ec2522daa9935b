"""Bank-auditing flows built on the swap test.

A user who wants to know whether the bank tampered with their tokens keeps
one unmeasured *pattern* token and swap-tests it against each token about to
be spent. With an honest bank all tokens of a series are identical, the swap
test returns 0 with certainty and disturbs nothing; a bank that made tokens
distinguishable gets caught with probability tied to how distinguishable it
made them.

All operations act on a single joint (possibly entangled) state so that
adversarial correlations between the bank's retained registers and the
user's tokens are expressible. Exact-probability variants are provided next
to the sampling ones: the inequality suites need 1e-9 precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import (
    RegisterLayout,
    SparseState,
    measure_register,
    reduced_density,
    swap_probability,
    swap_project,
    swap_test,
    trace_distance_advantage,
)
from .scheme import TokenReport


@dataclass(frozen=True)
class AuditOutcome:
    """Either cheat detected (no report) or a report from the audited token.

    ``post_state`` is the full joint state after the audit, so the surviving
    pattern register can be reused for the next transaction.
    """

    cheat_detected: bool
    report: TokenReport | None
    post_state: SparseState

    def __post_init__(self):
        if self.cheat_detected and self.report is not None:
            raise ValueError("a detected cheat carries no report")
        if not self.cheat_detected and self.report is None:
            raise ValueError("a passed audit carries exactly one report")

    @classmethod
    def cheat(cls, post_state: SparseState) -> AuditOutcome:
        return cls(True, None, post_state)

    @classmethod
    def passed(cls, report: TokenReport, post_state: SparseState) -> AuditOutcome:
        return cls(False, report, post_state)


@dataclass(frozen=True)
class ChainAudit:
    """Trace of a chained audit: swap outcomes in test order, then the result."""

    swap_bits: tuple[int, ...]
    outcome: AuditOutcome


def _measure_report(joint, layout, token, rng) -> tuple[TokenReport, SparseState]:
    width = layout.width(token)
    if width % 2 != 0:
        raise ValueError("token register width must be even")
    bits, post = measure_register(joint, layout, token, rng)
    return TokenReport.from_wire(width // 2, int(bits, 2)), post


def report_prime(
    joint: SparseState,
    layout: RegisterLayout,
    pattern: str,
    token: str,
    rng: np.random.Generator,
) -> AuditOutcome:
    """Swap-test the token against the pattern, then measure it if clean.

    Swap outcome 1 aborts with a detected cheat. Outcome 0 leaves the pattern
    register intact for reuse; the token register is then measured in the
    computational basis and parsed into a report.
    """
    swap = swap_test(joint, layout, pattern, token, rng)
    if swap.bit == 1:
        return AuditOutcome.cheat(swap.post_state)
    rep, post = _measure_report(swap.post_state, layout, token, rng)
    return AuditOutcome.passed(rep, post)


def report_chain(
    joint: SparseState,
    layout: RegisterLayout,
    rng: np.random.Generator,
) -> ChainAudit:
    """Audit a pattern against every token register, then report the first.

    The layout's first register is the pattern; the remaining registers are
    the tokens, all of the pattern's width. Swap tests run against the last
    token first and walk down to the first; the first detected mismatch
    aborts. If all tests pass, the first token register is measured and its
    report returned.
    """
    names = layout.names
    if len(names) < 2:
        raise ValueError("chained audit needs a pattern and at least one token")
    pattern, tokens = names[0], names[1:]
    width = layout.width(pattern)
    for t in tokens:
        if layout.width(t) != width:
            raise ValueError("all audited registers must match the pattern width")
    bits: list[int] = []
    state = joint
    for tok in reversed(tokens):
        swap = swap_test(state, layout, pattern, tok, rng)
        bits.append(swap.bit)
        state = swap.post_state
        if swap.bit == 1:
            return ChainAudit(tuple(bits), AuditOutcome.cheat(state))
    rep, post = _measure_report(state, layout, tokens[0], rng)
    return ChainAudit(tuple(bits), AuditOutcome.passed(rep, post))


def cheat_probability(
    joint: SparseState, layout: RegisterLayout, pattern: str, token: str
) -> float:
    """Exact abort probability of a single pattern-vs-token audit."""
    return swap_probability(joint, layout, pattern, token)


def chain_cheat_probability(joint: SparseState, layout: RegisterLayout) -> float:
    """Exact abort probability of the chained audit, via exact post-states."""
    names = layout.names
    pattern, tokens = names[0], names[1:]
    total = 0.0
    reach = 1.0
    state = joint
    for tok in reversed(tokens):
        p1 = swap_probability(state, layout, pattern, tok)
        total += reach * p1
        pass_mass = reach * (1.0 - p1)
        if pass_mass < 1e-15:
            break
        state = swap_project(state, layout, pattern, tok, 0)
        reach *= 1.0 - p1
    return min(total, 1.0)


class AnonymityGap(NamedTuple):
    advantage: float
    detection_bound: float


def anonymity_gap(
    chi: SparseState,
    layout: RegisterLayout,
    bank: str | None,
    token_a: str,
    token_b: str,
    dense_limit: int = 12,
) -> AnonymityGap:
    """Distinguishing advantage between two token slots versus its audit bound.

    ``advantage`` is the optimal probability of telling "bank side plus token
    a" apart from "bank side plus token b" (1/2 + trace distance / 4);
    ``detection_bound`` is 1/2 + sqrt(p) where p is the exact probability
    that a swap test between the two token registers fires. Callers assert
    advantage <= detection_bound.
    """
    if layout.width(token_a) != layout.width(token_b):
        raise ValueError("token registers must have equal widths")
    keep_a: Sequence[str] = [token_a] if bank is None else [bank, token_a]
    keep_b: Sequence[str] = [token_b] if bank is None else [bank, token_b]
    sigma_a = reduced_density(chi, layout, keep_a, dense_limit=dense_limit)
    sigma_b = reduced_density(chi, layout, keep_b, dense_limit=dense_limit)
    advantage = trace_distance_advantage(sigma_a, sigma_b)
    p_detect = swap_probability(chi, layout, token_a, token_b)
    return AnonymityGap(advantage, 0.5 + float(np.sqrt(p_detect)))
