"""Anonymous single-use quantum tokens with classical verification, desk scale.

The package simulates a token scheme where a bank mints identical 2k-qubit
states, holders redeem them by a computational-basis measurement whose
outcome is verified classically against the bank's secret and an append-only
history, and a swap-test audit lets holders catch a bank that tries to make
tokens traceable. Monte Carlo scenarios and exact inequality suites verify
the scheme's quantitative behavior.
"""

from .core import (
    DensityMatrix,
    RegisterLayout,
    SparseState,
    SwapOutcome,
    apply_register_swap,
    fidelity,
    inner_product,
    measure_register,
    random_state,
    reduced_density,
    swap_probability,
    swap_project,
    swap_test,
    tensor,
    tensor_all,
    trace_distance_advantage,
)
from .scheme import (
    ClassicalParams,
    LazySecret,
    SchemeParams,
    SecretString,
    TokenReport,
    VerificationHistory,
    btest,
    mint,
    mint_classical,
    report,
    report_emulated,
    test_classical,
    token_state,
)
from .audit import AuditOutcome, ChainAudit, anonymity_gap, report_chain, report_prime
from .adversary import (
    ForgerStrategy,
    TrackingBankStrategy,
    eval_all_correct_bound,
    eval_forgery_bound,
    mint_loaded,
    mint_permutation_paired,
    run_forgery,
)
from .bank import BankClient, BankServer, BankService, CorruptLogError, Decision
from .harness import ExperimentResult, ScenarioSpec, run_inequality_suite, run_scenario

__version__ = "0.1.0"
