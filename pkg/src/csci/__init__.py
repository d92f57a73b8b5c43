"""Pointwise confidence intervals for a distribution function from current status data.

Valid (guaranteed-coverage) intervals, approximate binomial-framework (ABF)
intervals with monotone adjustments, a likelihood-ratio benchmark, an
expected-length planner for the window size and a seeded simulation harness.
"""

__version__ = "0.1.0"

from .abf_ci import AbfConfig, abf_curve, abf_interval, estimate_nuisances, mdagger_star
from .binom_ci import BinomLimits, cp_interval, cp_lower, cp_upper, midp_limits
from .data_model import (
    ConfidenceCurve,
    CurrentStatusSample,
    DataError,
    GroupedCounts,
    count_window,
    expand_grouped,
    from_pairs,
    read_sample,
)
from .length_planner import PlannerInput, expected_length, m_min_search, planner_grid
from .lrt_benchmark import LRT_CRITICAL_95, LrtConfig, lrt_curve, lrt_interval, lrt_stat
from .monotone_adjust import AdjustmentPlan, apply_plan
from .npmle import StepCdf, npmle_fit, restricted_npmle
from .sim_harness import SimConfig, builtin_scenarios, length_sweep, run_coverage
from .valid_ci import ValidCiConfig, default_m, valid_curve, valid_interval
