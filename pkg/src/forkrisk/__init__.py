"""forkrisk: how likely is a k-deep Nakamoto-consensus block to be discarded.

Analytic lower/upper bounds on the discard probability of a confirmed
transaction, decomposed into pre-mining lead, confirmation interval and
post-confirmation race, with a seeded Monte Carlo simulator as an
independent cross-check.
"""

from .bounds import BoundResult, SweepRow, Theorem, lower_bound, sweep, upper_bound
from .confirmation import (
    COMPOSITION,
    PRINTED,
    ConfPmf,
    ConfVariant,
    conf_pmf_lower,
    conf_pmf_upper,
    per_jumper_masses,
    per_jumper_pmf_lower,
    per_jumper_pmf_upper,
)
from .errors import HorizonTooSmall, NonConvergence, RegimeViolation
from .lead import (
    LeadPmf,
    LeadVariant,
    lead_full_lower,
    lead_rigged_upper,
    lead_truncated_lower,
    ramaswami_steady_state,
    truncated_lead_ccdf,
)
from .params import (
    DerivedParams,
    ProtocolParams,
    RegimeReport,
    check_regime,
    derive,
)
from .pmf import Pmf, convolve, self_convolve
from .postconf import (
    TwoStepWalk,
    WalkParams,
    lead_equivalent_pmf,
    max_hit_count_law,
    three_way_max_tail,
    two_step_catchup_cdf,
)
from .sim import (
    MODES,
    PRIVATE_DELTA,
    RIGGED,
    CatchEstimate,
    EmpiricalPmf,
    SimConfig,
    SimReport,
    raw_timeline_jumper_counts,
    raw_timeline_lead_samples,
    simulate_confirmation,
    simulate_end_to_end,
    simulate_lead,
    simulate_postconf,
)

__version__ = "0.1.0"

__all__ = [
    "BoundResult",
    "CatchEstimate",
    "COMPOSITION",
    "ConfPmf",
    "ConfVariant",
    "DerivedParams",
    "EmpiricalPmf",
    "HorizonTooSmall",
    "LeadPmf",
    "LeadVariant",
    "MODES",
    "NonConvergence",
    "Pmf",
    "PRINTED",
    "PRIVATE_DELTA",
    "ProtocolParams",
    "RegimeReport",
    "RegimeViolation",
    "RIGGED",
    "SimConfig",
    "SimReport",
    "SweepRow",
    "Theorem",
    "TwoStepWalk",
    "WalkParams",
    "check_regime",
    "conf_pmf_lower",
    "conf_pmf_upper",
    "convolve",
    "derive",
    "lead_equivalent_pmf",
    "lead_full_lower",
    "lead_rigged_upper",
    "lead_truncated_lower",
    "lower_bound",
    "max_hit_count_law",
    "per_jumper_masses",
    "per_jumper_pmf_lower",
    "per_jumper_pmf_upper",
    "ramaswami_steady_state",
    "raw_timeline_jumper_counts",
    "raw_timeline_lead_samples",
    "self_convolve",
    "simulate_confirmation",
    "simulate_end_to_end",
    "simulate_lead",
    "simulate_postconf",
    "sweep",
    "three_way_max_tail",
    "truncated_lead_ccdf",
    "two_step_catchup_cdf",
    "upper_bound",
]
