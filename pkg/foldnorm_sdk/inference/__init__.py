"""
MCMC 추론: 적응형 Metropolis-within-Gibbs, 수렴 진단, 사후 요약
"""
from .sampler import (
    monitored_names,
    initial_flat_state,
    AdaptiveGibbsSampler,
    run_chain,
    run_chains,
    pooled_draws,
)
from .diagnostics import RHAT_WARNING_THRESHOLD, chain_matrix, rhat, ess, diagnose
from .summary import summarize_draws, summarize, summarize_all
from .namespace import InferenceNamespace

__all__ = [
    "monitored_names",
    "initial_flat_state",
    "AdaptiveGibbsSampler",
    "run_chain",
    "run_chains",
    "pooled_draws",
    "RHAT_WARNING_THRESHOLD",
    "chain_matrix",
    "rhat",
    "ess",
    "diagnose",
    "summarize_draws",
    "summarize",
    "summarize_all",
    "InferenceNamespace",
]
