"""
folded normal 혼합효과 결과 모형

    mu_it = c0 + alpha0_i + (c1 + alpha1_i) t   (x_i = 0)
    mu_it = d0 + beta0_i  + (d1 + beta1_i)  t   (x_i = 1)
    Z_it | b_i ~ FN(mu_it, sigma^2)

사전분포
    c0, c1, d0, d1 ~ TN(0, zeta, rho2)
    sigma^2 ~ IG(a, b)
    tau ~ U(0, 짝 고정효과 * omega)

선형 참조 모형은 같은 선형 예측식에 정규 우도, 제약 없는 사전분포를 쓴다.
지지집합 밖 사전밀도는 -inf로 표현한다.
"""
import math

import numpy as np

from foldnorm_sdk.distributions.folded_normal import folded_normal_logpdf
from foldnorm_sdk.distributions.normal import inv_gamma_log_pdf, normal_log_pdf, uniform_log_pdf
from foldnorm_sdk.distributions.truncated_normal import truncated_normal_logpdf
from foldnorm_sdk.errors import DomainError, ParameterError, StructureError
from foldnorm_sdk.schema.data_schema import ExposureGroup, SubjectData
from foldnorm_sdk.schema.model_schema import (
    FIXED_EFFECT_NAMES,
    TAU_BOUND_OF,
    TAU_NAMES,
    FixedEffects,
    OutcomePriorConfig,
    RandomEffects,
    ReferencePriorConfig,
    VarianceComponents,
)


def _require_group(re: RandomEffects, group: ExposureGroup) -> None:
    if re.group != group:
        raise StructureError(
            f"랜덤효과 그룹({int(re.group)})과 대상자 그룹({int(group)})이 다릅니다."
        )


def expected_trajectory(fe: FixedEffects, re: RandomEffects, g: ExposureGroup, t: int) -> float:
    """c0 + alpha0 + (c1 + alpha1) t  또는  d0 + beta0 + (d1 + beta1) t"""
    _require_group(re, g)
    if g == ExposureGroup.UNEXPOSED:
        return fe.c0 + re.alpha0 + (fe.c1 + re.alpha1) * t
    return fe.d0 + re.beta0 + (fe.d1 + re.beta1) * t


def _subject_arrays(s: SubjectData, fe: FixedEffects, re: RandomEffects):
    _require_group(re, s.group)
    if not s.observations:
        raise StructureError(f"대상자 {s.id}: 관측이 없습니다.")
    if not fe.sigma2 > 0:
        raise ParameterError(f"sigma2는 0보다 커야 합니다. 입력값={fe.sigma2}")
    z = np.asarray(s.values, dtype=float)
    if np.any(z < 0):
        raise DomainError(f"대상자 {s.id}: 크기 결과는 0 이상이어야 합니다. 입력값={z.min()}")
    t = np.asarray(s.times, dtype=float)
    intercept, slope = fe.intercept_slope(s.group)
    mu = intercept + re.b0 + (slope + re.b1) * t
    return z, mu


def outcome_loglik(s: SubjectData, fe: FixedEffects, re: RandomEffects) -> float:
    """관측된 시점 0..D 에 대한 folded normal 로그우도 합"""
    z, mu = _subject_arrays(s, fe, re)
    return float(np.sum(folded_normal_logpdf(z, mu, math.sqrt(fe.sigma2))))


def linear_reference_loglik(s: SubjectData, fe: FixedEffects, re: RandomEffects) -> float:
    """같은 선형 예측식에 대한 정규 로그우도 합"""
    z, mu = _subject_arrays(s, fe, re)
    return float(np.sum(normal_log_pdf(z, mu, fe.sigma2)))


def random_effects_log_prior(re: RandomEffects, vc: VarianceComponents, g: ExposureGroup) -> float:
    _require_group(re, g)
    tau0, tau1 = vc.for_group(g)
    if not (tau0 > 0 and tau1 > 0):
        raise ParameterError(f"tau는 0보다 커야 합니다. 입력값=({tau0}, {tau1})")
    return float(normal_log_pdf(re.b0, 0.0, tau0 * tau0) + normal_log_pdf(re.b1, 0.0, tau1 * tau1))


def fixed_effects_log_prior(fe: FixedEffects, cfg: OutcomePriorConfig) -> float:
    total = 0.0
    for name in FIXED_EFFECT_NAMES:
        value = getattr(fe, name)
        if value < 0:
            return -math.inf
        zeta, rho2 = cfg.hyper(name)
        total += float(truncated_normal_logpdf(value, zeta, rho2, 0.0))
    if not fe.sigma2 > 0:
        return -math.inf
    return total + float(inv_gamma_log_pdf(fe.sigma2, cfg.sigma2_ig_shape, cfg.sigma2_ig_scale))


def tau_log_prior(vc: VarianceComponents, fe: FixedEffects, cfg: OutcomePriorConfig) -> float:
    total = 0.0
    for name in TAU_NAMES:
        bound = getattr(fe, TAU_BOUND_OF[name]) * cfg.omega
        if not bound > 0:
            return -math.inf
        total += float(uniform_log_pdf(getattr(vc, name), 0.0, bound))
    return total


def reference_fixed_effects_log_prior(fe: FixedEffects, cfg: ReferencePriorConfig) -> float:
    """참조 모형: 제약 없는 N(mean, var) 고정효과 + IG sigma2"""
    if not fe.sigma2 > 0:
        return -math.inf
    values = np.array([getattr(fe, name) for name in FIXED_EFFECT_NAMES])
    return float(
        np.sum(normal_log_pdf(values, cfg.mean, cfg.var))
        + inv_gamma_log_pdf(fe.sigma2, cfg.sigma2_ig_shape, cfg.sigma2_ig_scale)
    )


def reference_tau_log_prior(vc: VarianceComponents, cfg: ReferencePriorConfig) -> float:
    values = np.array([getattr(vc, name) for name in TAU_NAMES])
    return float(np.sum(uniform_log_pdf(values, 0.0, cfg.tau_upper)))


def average_distance(fe: FixedEffects, K: int) -> float:
    """AD = c0 - d0 + (c1 - d1)(K-1)/2"""
    if K < 1:
        raise ParameterError(f"K는 1 이상이어야 합니다. 입력값={K}")
    return fe.c0 - fe.d0 + (fe.c1 - fe.d1) * (K - 1) / 2.0


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
]
