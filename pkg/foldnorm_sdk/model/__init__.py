"""
결과 모형, 중도탈락 모형, 로그 사후밀도
"""
from .outcome import (
    expected_trajectory,
    outcome_loglik,
    linear_reference_loglik,
    random_effects_log_prior,
    fixed_effects_log_prior,
    tau_log_prior,
    reference_fixed_effects_log_prior,
    reference_tau_log_prior,
    average_distance,
)
from .dropout import (
    CAUSES,
    temporal_basis,
    temporal_value,
    hazards,
    dropout_loglik,
    enumerate_outcomes,
    dropout_log_prior,
)
from .posterior import log_posterior, DesignArrays, FlatState, PosteriorKernel

__all__ = [
    "expected_trajectory",
    "outcome_loglik",
    "linear_reference_loglik",
    "random_effects_log_prior",
    "fixed_effects_log_prior",
    "tau_log_prior",
    "reference_fixed_effects_log_prior",
    "reference_tau_log_prior",
    "average_distance",
    "CAUSES",
    "temporal_basis",
    "temporal_value",
    "hazards",
    "dropout_loglik",
    "enumerate_outcomes",
    "dropout_log_prior",
    "log_posterior",
    "DesignArrays",
    "FlatState",
    "PosteriorKernel",
]
