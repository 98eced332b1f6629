"""
Folded normal 분포: Z = |Y|, Y ~ N(mu, sigma^2)

    f(z) = N(z | mu, sigma^2) + N(-z | mu, sigma^2),  z >= 0

두 정규 항은 log-sum-exp로 합한다. 두 표준화 제곱거리의 min/max를 쓰므로
mu -> -mu 에 대해 결과가 비트 단위로 같다.
"""
import math
from typing import Optional, Union

import numpy as np

from foldnorm_sdk.distributions.normal import normal_cdf
from foldnorm_sdk.errors import DomainError, ParameterError
from foldnorm_sdk.schema.model_schema import FoldedNormalParams

ArrayLike = Union[float, np.ndarray]

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def folded_normal_logpdf(z: ArrayLike, mu: ArrayLike, sigma: ArrayLike) -> np.ndarray:
    """
    벡터화 로그 밀도 (입력 검증 없음, 샘플러 내부용)

    Args:
        z: 관측값 (>= 0)
        mu: 접기 전 평균
        sigma: 접기 전 표준편차 (> 0)
    """
    z = np.asarray(z, dtype=float)
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    a = np.square((z - mu) / sigma)
    b = np.square((z + mu) / sigma)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return -0.5 * lo + np.log1p(np.exp(-0.5 * (hi - lo))) - np.log(sigma) - _HALF_LOG_2PI


def _check(z: float, p: FoldedNormalParams) -> None:
    if not p.sigma > 0:
        raise ParameterError(f"sigma는 0보다 커야 합니다. 입력값={p.sigma}")
    if z < 0:
        raise DomainError(f"folded normal의 정의역은 z >= 0 입니다. 입력값={z}")


def fn_log_pdf(z: float, p: FoldedNormalParams) -> float:
    _check(z, p)
    return float(folded_normal_logpdf(z, p.mu, p.sigma))


def fn_pdf(z: float, p: FoldedNormalParams) -> float:
    return math.exp(fn_log_pdf(z, p))


def fn_cdf(z: float, p: FoldedNormalParams) -> float:
    """P(Z <= z) = Phi((z - mu)/sigma) - Phi((-z - mu)/sigma)"""
    _check(z, p)
    return float(normal_cdf((z - p.mu) / p.sigma) - normal_cdf((-z - p.mu) / p.sigma))


def fn_sample(
        p: FoldedNormalParams,
        rng: np.random.Generator,
        size: Optional[Union[int, tuple]] = None,
) -> Union[float, np.ndarray]:
    """|X|, X ~ N(mu, sigma^2)"""
    draws = np.abs(rng.normal(p.mu, p.sigma, size=size))
    return float(draws) if size is None else draws


def fn_mean(p: FoldedNormalParams) -> float:
    """sigma*sqrt(2/pi)*exp(-mu^2/(2 sigma^2)) + mu*(1 - 2*Phi(-mu/sigma))"""
    if not p.sigma > 0:
        raise ParameterError(f"sigma는 0보다 커야 합니다. 입력값={p.sigma}")
    ratio = p.mu / p.sigma
    return float(
        p.sigma * math.sqrt(2.0 / math.pi) * math.exp(-0.5 * ratio * ratio)
        + p.mu * (1.0 - 2.0 * normal_cdf(-ratio))
    )


def fn_variance(p: FoldedNormalParams) -> float:
    """E[Z^2] = mu^2 + sigma^2 이므로 Var = mu^2 + sigma^2 - E[Z]^2"""
    mean = fn_mean(p)
    return max(p.mu * p.mu + p.sigma * p.sigma - mean * mean, 0.0)


__all__ = [
    "folded_normal_logpdf",
    "fn_log_pdf",
    "fn_pdf",
    "fn_cdf",
    "fn_sample",
    "fn_mean",
    "fn_variance",
]
