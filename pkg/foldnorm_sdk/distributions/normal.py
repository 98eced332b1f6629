"""
정규/역감마/균등 보조 커널 (모두 벡터화, 지지집합 밖은 -inf)
"""
import math

import numpy as np
from scipy.special import gammaln, ndtr

_LOG_2PI = math.log(2.0 * math.pi)


def normal_log_pdf(x, mean, var) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return -0.5 * (_LOG_2PI + np.log(var) + np.square(x - mean) / var)


def normal_cdf(x) -> np.ndarray:
    """표준정규 CDF"""
    return ndtr(x)


def inv_gamma_log_pdf(x, shape: float, scale: float) -> np.ndarray:
    """IG(shape, scale): scale^shape / Gamma(shape) x^{-shape-1} exp(-scale/x)"""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = shape * math.log(scale) - gammaln(shape) - (shape + 1.0) * np.log(x) - scale / x
    return np.where(x > 0, logp, -np.inf)


def uniform_log_pdf(x, low, high) -> np.ndarray:
    """U(low, high) 열린구간. high <= low 이면 지지집합이 비어 -inf"""
    x = np.asarray(x, dtype=float)
    low = np.asarray(low, dtype=float)
    high = np.asarray(high, dtype=float)
    inside = (x > low) & (x < high)
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = -np.log(high - low)
    return np.where(inside, logp, -np.inf)


__all__ = [
    "normal_log_pdf",
    "normal_cdf",
    "inv_gamma_log_pdf",
    "uniform_log_pdf",
]
