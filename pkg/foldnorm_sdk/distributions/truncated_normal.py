"""
하한 절단 정규분포 TN(lower, zeta, rho2)

지지집합 밖(x < lower)의 로그 밀도는 예외 대신 -inf를 돌려준다.
샘플러가 이를 거부(rejection)로 사용한다.
"""
import math
from typing import Optional, Union

import numpy as np
from scipy.special import log_ndtr
from scipy.stats import truncnorm

from foldnorm_sdk.schema.model_schema import TruncatedNormalParams

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def truncated_normal_logpdf(x, zeta, rho2, lower=0.0) -> np.ndarray:
    """벡터화 로그 밀도. 1 - Phi((lower - zeta)/rho) = Phi((zeta - lower)/rho) 로 정규화"""
    x = np.asarray(x, dtype=float)
    rho = np.sqrt(rho2)
    log_norm = log_ndtr((zeta - lower) / rho)
    logp = -0.5 * np.square((x - zeta) / rho) - np.log(rho) - _HALF_LOG_2PI - log_norm
    return np.where(x >= lower, logp, -np.inf)


def tn_log_pdf(x: float, p: TruncatedNormalParams) -> float:
    return float(truncated_normal_logpdf(x, p.zeta, p.rho2, p.lower))


def tn_sample(
        p: TruncatedNormalParams,
        rng: np.random.Generator,
        size: Optional[Union[int, tuple]] = None,
) -> Union[float, np.ndarray]:
    """
    scipy truncnorm 사용 (강한 절단에서도 꼬리 쪽 알고리즘으로 전환됨)
    """
    rho = math.sqrt(p.rho2)
    a = (p.lower - p.zeta) / rho
    draws = truncnorm.rvs(a, np.inf, loc=p.zeta, scale=rho, size=size, random_state=rng)
    # 반올림으로 lower 바로 아래 값이 나오는 경우 방지
    draws = np.maximum(draws, p.lower)
    return float(draws) if size is None else draws


__all__ = ["truncated_normal_logpdf", "tn_log_pdf", "tn_sample"]
