"""
확률 커널: folded normal, 절단 정규, shape-scale Gamma, 정규/역감마/균등 보조 커널, RNG 파생
"""
from .folded_normal import (
    folded_normal_logpdf,
    fn_log_pdf,
    fn_pdf,
    fn_cdf,
    fn_sample,
    fn_mean,
    fn_variance,
)
from .truncated_normal import truncated_normal_logpdf, tn_log_pdf, tn_sample
from .gamma import gamma_log_pdf, gamma_sample, gamma_quantile
from .normal import (
    normal_log_pdf,
    normal_cdf,
    inv_gamma_log_pdf,
    uniform_log_pdf,
)
from .rng import seed_entropy, derive_seed_sequence, derive_rng

__all__ = [
    "folded_normal_logpdf",
    "fn_log_pdf",
    "fn_pdf",
    "fn_cdf",
    "fn_sample",
    "fn_mean",
    "fn_variance",
    "truncated_normal_logpdf",
    "tn_log_pdf",
    "tn_sample",
    "gamma_log_pdf",
    "gamma_sample",
    "gamma_quantile",
    "normal_log_pdf",
    "normal_cdf",
    "inv_gamma_log_pdf",
    "uniform_log_pdf",
    "seed_entropy",
    "derive_seed_sequence",
    "derive_rng",
]
