"""
이산시간 경쟁위험 중도탈락 모형

    logit lambda_i(t) = q_g(t) + p_g0 b0_i + p_g1 b1_i   (원인 1, 회복형)
    logit kappa_i(t)  = v_g(t) + u_g0 b0_i + u_g1 b1_i   (원인 2, 사망형)

    P(D=d, delta=h) = haz_h(d) * prod_{j<d} (1 - lambda_j)(1 - kappa_j)
    P(완료)          = prod_{j=0}^{K-2} (1 - lambda_j)(1 - kappa_j)

관측값은 입력으로 받지 않는다. 결과 과정과는 랜덤효과로만 연결된다.
"""
from typing import Dict, List, Optional, Tuple

import numpy as np

from foldnorm_sdk.distributions.normal import normal_log_pdf
from foldnorm_sdk.errors import DomainError, StructureError
from foldnorm_sdk.schema.data_schema import DropoutCause, DropoutRecord, ExposureGroup
from foldnorm_sdk.schema.model_schema import (
    DropoutParams,
    DropoutPriorConfig,
    RandomEffects,
    TemporalKind,
    TemporalSpec,
)

# 원인 목록. 원인 h의 (시간 계수, 연관 계수) 필드 이름
CAUSES: Tuple[int, ...] = (int(DropoutCause.RECOVERY), int(DropoutCause.DEATH))
_CAUSE_FIELDS = {
    int(DropoutCause.RECOVERY): ("q", "p"),
    int(DropoutCause.DEATH): ("v", "u"),
}


def log_expit(x):
    """log(1 / (1 + exp(-x)))"""
    return -np.logaddexp(0.0, -np.asarray(x, dtype=float))


def log1m_expit(x):
    """log(1 - 1 / (1 + exp(-x)))"""
    return -np.logaddexp(0.0, np.asarray(x, dtype=float))


def temporal_basis(temporal: TemporalSpec, K: int) -> np.ndarray:
    """
    (K-1, n_coef) 설계행렬. 행 j는 위험 구간 t=j 에서의 시간 함수 기저

    - linear: [1, t]
    - flexible: 단위행렬
    - grouped: 묶음 지시변수
    """
    n_steps = max(K - 1, 0)
    n_coef = temporal.n_coefficients(K)
    basis = np.zeros((n_steps, n_coef))
    for t in range(n_steps):
        if temporal.kind == TemporalKind.LINEAR:
            basis[t] = (1.0, float(t))
        else:
            basis[t, temporal.bucket(t, K)] = 1.0
    return basis


def _coefficients(dp: DropoutParams, cause: int, g: ExposureGroup):
    if cause not in _CAUSE_FIELDS:
        raise StructureError(f"알 수 없는 중도탈락 원인입니다. 입력값={cause}")
    temporal_field, assoc_field = _CAUSE_FIELDS[cause]
    return getattr(dp, temporal_field)[int(g)], getattr(dp, assoc_field)[int(g)]


def _check_counts(temporal: TemporalSpec, dp: DropoutParams, K: int) -> None:
    expected = temporal.n_coefficients(K)
    if dp.n_coefficients != expected:
        raise StructureError(
            f"시간 계수 개수가 맞지 않습니다. 기대={expected}, 입력값={dp.n_coefficients}"
        )


def temporal_value(
        temporal: TemporalSpec,
        params: DropoutParams,
        cause: int,
        g: ExposureGroup,
        t: int,
        K: int,
) -> float:
    if not 0 <= t <= K - 2:
        raise DomainError(f"위험 구간은 0 <= t <= K-2 입니다. 입력값 t={t}, K={K}")
    _check_counts(temporal, params, K)
    coefs, _ = _coefficients(params, cause, g)
    if temporal.kind == TemporalKind.LINEAR:
        return coefs[0] + coefs[1] * t
    return coefs[temporal.bucket(t, K)]


def _linear_predictors(
        dp: DropoutParams,
        re: RandomEffects,
        g: ExposureGroup,
        temporal: TemporalSpec,
        K: int,
) -> Dict[int, np.ndarray]:
    if re.group != g:
        raise StructureError(
            f"랜덤효과 그룹({int(re.group)})과 대상자 그룹({int(g)})이 다릅니다."
        )
    _check_counts(temporal, dp, K)
    basis = temporal_basis(temporal, K)
    out = {}
    for cause in CAUSES:
        coefs, assoc = _coefficients(dp, cause, g)
        out[cause] = basis @ np.asarray(coefs, dtype=float) + assoc[0] * re.b0 + assoc[1] * re.b1
    return out


def hazards(
        dp: DropoutParams,
        re: RandomEffects,
        g: ExposureGroup,
        t: int,
        *,
        temporal: TemporalSpec,
        K: int,
) -> Tuple[float, float]:
    """(lambda, kappa) at t. 각각 (0, 1) 범위"""
    if not 0 <= t <= K - 2:
        raise DomainError(f"위험 구간은 0 <= t <= K-2 입니다. 입력값 t={t}, K={K}")
    eta = _linear_predictors(dp, re, g, temporal, K)
    lam, kap = (float(np.exp(log_expit(eta[cause][t]))) for cause in CAUSES)
    return lam, kap


def dropout_loglik(
        rec: DropoutRecord,
        dp: DropoutParams,
        re: RandomEffects,
        g: ExposureGroup,
        K: int,
        *,
        temporal: TemporalSpec,
) -> float:
    rec.check(K)
    eta = _linear_predictors(dp, re, g, temporal, K)
    survive = sum(log1m_expit(eta[cause]) for cause in CAUSES)
    total = float(np.sum(survive[: rec.D]))
    if rec.delta != DropoutCause.COMPLETER:
        total += float(log_expit(eta[int(rec.delta)][rec.D]))
    return total


def enumerate_outcomes(K: int) -> List[DropoutRecord]:
    """가능한 모든 (D, delta): 원인별 D=0..K-2 와 완료자 1개"""
    records = [DropoutRecord(D=d, delta=DropoutCause(h)) for h in CAUSES for d in range(K - 1)]
    records.append(DropoutRecord(D=K - 1, delta=DropoutCause.COMPLETER))
    return records


def dropout_log_prior(dp: DropoutParams, cfg: Optional[DropoutPriorConfig] = None) -> float:
    cfg = cfg or DropoutPriorConfig()
    values = np.asarray(dp.to_vector(), dtype=float)
    return float(np.sum(normal_log_pdf(values, 0.0, cfg.sd * cfg.sd)))


__all__ = [
    "CAUSES",
    "log_expit",
    "log1m_expit",
    "temporal_basis",
    "temporal_value",
    "hazards",
    "dropout_loglik",
    "enumerate_outcomes",
    "dropout_log_prior",
]
