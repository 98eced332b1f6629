"""
로그 사후밀도 조립

log_posterior 는 pydantic 상태(ParameterState)를 받아 항별로 합산하고,
PosteriorKernel 은 같은 값을 numpy 배열 상태(FlatState)에서 대상자 벡터 단위로 계산한다.
샘플러는 PosteriorKernel 만 사용한다.

    log p = sum_i [ RE prior_i + outcome_i (+ dropout_i) ]
            + FE prior + tau prior (+ dropout prior)
"""
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from foldnorm_sdk.distributions.folded_normal import folded_normal_logpdf
from foldnorm_sdk.distributions.normal import inv_gamma_log_pdf, normal_log_pdf, uniform_log_pdf
from foldnorm_sdk.distributions.truncated_normal import truncated_normal_logpdf
from foldnorm_sdk.errors import StructureError
from foldnorm_sdk.model.dropout import (
    CAUSES,
    dropout_log_prior,
    dropout_loglik,
    log1m_expit,
    log_expit,
    temporal_basis,
)
from foldnorm_sdk.model.outcome import (
    fixed_effects_log_prior,
    linear_reference_loglik,
    outcome_loglik,
    random_effects_log_prior,
    reference_fixed_effects_log_prior,
    reference_tau_log_prior,
    tau_log_prior,
)
from foldnorm_sdk.schema.data_schema import LongitudinalDataset
from foldnorm_sdk.schema.model_schema import (
    FIXED_EFFECT_NAMES,
    TAU_NAMES,
    DropoutParams,
    FixedEffects,
    ModelSpec,
    ParameterState,
    RandomEffects,
    VarianceComponents,
)


def _check_dimensions(state: ParameterState, data: LongitudinalDataset, spec: ModelSpec) -> None:
    if len(state.random_effects) != data.n_subjects:
        raise StructureError(
            f"랜덤효과 수({len(state.random_effects)})와 대상자 수({data.n_subjects})가 다릅니다."
        )
    if data.K != spec.K:
        raise StructureError(f"자료 K({data.K})와 모형 K({spec.K})가 다릅니다.")
    if spec.variant.is_joint:
        if state.dropout is None:
            raise StructureError("결합 모형 상태에는 중도탈락 계수가 필요합니다.")
        if state.dropout.n_coefficients != spec.n_dropout_coefficients:
            raise StructureError(
                f"중도탈락 시간 계수 수가 맞지 않습니다. 기대={spec.n_dropout_coefficients}, "
                f"입력값={state.dropout.n_coefficients}"
            )


def log_posterior(state: ParameterState, data: LongitudinalDataset, spec: ModelSpec) -> float:
    """항별 합산. 대상자 항은 대상자 id 순서로 더한다"""
    _check_dimensions(state, data, spec)
    fe, vc = state.fixed, state.variance

    if spec.variant.is_folded:
        prior = fixed_effects_log_prior(fe, spec.outcome_prior)
        if math.isfinite(prior):
            prior += tau_log_prior(vc, fe, spec.outcome_prior)
    else:
        prior = reference_fixed_effects_log_prior(fe, spec.reference_prior)
        if math.isfinite(prior):
            prior += reference_tau_log_prior(vc, spec.reference_prior)
    if not math.isfinite(prior):
        return -math.inf
    if spec.variant.is_joint:
        prior += dropout_log_prior(state.dropout, spec.dropout_prior)

    loglik = outcome_loglik if spec.variant.is_folded else linear_reference_loglik
    total = prior
    order = sorted(range(len(data.subjects)), key=lambda i: data.subjects[i].id)
    for i in order:
        subject, re = data.subjects[i], state.random_effects[i]
        total += random_effects_log_prior(re, vc, subject.group)
        total += loglik(subject, fe, re)
        if spec.variant.is_joint:
            total += dropout_loglik(
                subject.dropout, state.dropout, re, subject.group, spec.K, temporal=spec.temporal
            )
    return total


# ---------- 벡터화 커널 ----------


@dataclass
class DesignArrays:
    """자료를 (대상자, 시점) 배열로 펼친 것. 관측 없는 칸은 mask=False"""
    group: np.ndarray          # (n,) int
    z: np.ndarray              # (n, K), 결측은 0
    mask: np.ndarray           # (n, K) bool
    times: np.ndarray          # (K,)
    at_risk: np.ndarray        # (n, K-1) j < D
    events: dict               # cause -> (n, K-1) j == D 이고 delta == cause
    basis: Optional[np.ndarray]  # (K-1, n_coef), 결합 모형만

    @classmethod
    def from_dataset(cls, data: LongitudinalDataset, spec: ModelSpec) -> "DesignArrays":
        n, K = data.n_subjects, data.K
        group = np.array([int(s.group) for s in data.subjects], dtype=int)
        z = np.zeros((n, K))
        mask = np.zeros((n, K), dtype=bool)
        D = np.zeros(n, dtype=int)
        delta = np.zeros(n, dtype=int)
        for i, subject in enumerate(data.subjects):
            values = subject.values
            z[i, : len(values)] = values
            mask[i, : len(values)] = True
            D[i] = subject.dropout.D
            delta[i] = int(subject.dropout.delta)
        steps = np.arange(max(K - 1, 0))
        at_risk = steps[None, :] < D[:, None]
        events = {
            cause: (steps[None, :] == D[:, None]) & (delta[:, None] == cause) for cause in CAUSES
        }
        basis = temporal_basis(spec.temporal, K) if spec.variant.is_joint else None
        return cls(
            group=group,
            z=z,
            mask=mask,
            times=np.arange(K, dtype=float),
            at_risk=at_risk,
            events=events,
            basis=basis,
        )


@dataclass
class FlatState:
    """
    numpy 상태

    - fixed: [c0, c1, d0, d1]
    - tau: [tau_a0, tau_a1, tau_b0, tau_b1]
    - b: (n, 2) 그룹에 맞는 (절편, 기울기) 랜덤효과
    - dropout: DropoutParams.to_vector() 순서, 비결합 모형은 길이 0
    """
    fixed: np.ndarray
    sigma2: float
    tau: np.ndarray
    b: np.ndarray
    dropout: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def copy(self) -> "FlatState":
        return replace(
            self,
            fixed=self.fixed.copy(),
            tau=self.tau.copy(),
            b=self.b.copy(),
            dropout=self.dropout.copy(),
        )

    @classmethod
    def from_state(cls, state: ParameterState) -> "FlatState":
        fe, vc = state.fixed, state.variance
        return cls(
            fixed=np.array([getattr(fe, name) for name in FIXED_EFFECT_NAMES], dtype=float),
            sigma2=float(fe.sigma2),
            tau=np.array([getattr(vc, name) for name in TAU_NAMES], dtype=float),
            b=np.array([[re.b0, re.b1] for re in state.random_effects], dtype=float).reshape(-1, 2),
            dropout=(
                np.asarray(state.dropout.to_vector(), dtype=float)
                if state.dropout is not None
                else np.zeros(0)
            ),
        )

    def to_state(self, data: LongitudinalDataset, spec: ModelSpec) -> ParameterState:
        fixed = FixedEffects(**dict(zip(FIXED_EFFECT_NAMES, self.fixed.tolist())), sigma2=self.sigma2)
        variance = VarianceComponents(**dict(zip(TAU_NAMES, self.tau.tolist())))
        random_effects = [
            RandomEffects(group=s.group, b0=float(self.b[i, 0]), b1=float(self.b[i, 1]))
            for i, s in enumerate(data.subjects)
        ]
        dropout = (
            DropoutParams.from_vector(self.dropout, spec.n_dropout_coefficients)
            if spec.variant.is_joint
            else None
        )
        return ParameterState(
            fixed=fixed, variance=variance, random_effects=random_effects, dropout=dropout
        )


class PosteriorKernel:
    """
    대상자 벡터 단위 로그 사후밀도 항

    prior_only=True 이면 우도 항(결과, 중도탈락)을 0으로 둔다.
    """

    def __init__(self, data: LongitudinalDataset, spec: ModelSpec, prior_only: bool = False):
        if data.K != spec.K:
            raise StructureError(f"자료 K({data.K})와 모형 K({spec.K})가 다릅니다.")
        self.data = data
        self.spec = spec
        self.prior_only = prior_only
        self.design = DesignArrays.from_dataset(data, spec)
        self.n_subjects = data.n_subjects
        self.n_coef = spec.n_dropout_coefficients
        self._g = self.design.group
        # 그룹별 (절편, 기울기) 고정효과 / tau 인덱스
        self.group_index = np.where(self._g[:, None] == 0, [[0, 1]], [[2, 3]])
        if spec.variant.is_folded:
            prior = spec.outcome_prior
            hyper = [prior.hyper(name) for name in FIXED_EFFECT_NAMES]
            self._zeta = np.array([h[0] for h in hyper])
            self._rho2 = np.array([h[1] for h in hyper])

    # ----- 상태 변환 -----

    def check_state(self, flat: FlatState) -> None:
        if flat.b.shape != (self.n_subjects, 2):
            raise StructureError(
                f"랜덤효과 배열 차원이 맞지 않습니다. 기대=({self.n_subjects}, 2), 입력값={flat.b.shape}"
            )
        expected = 4 * self.n_coef + 8 if self.spec.variant.is_joint else 0
        if flat.dropout.shape != (expected,):
            raise StructureError(
                f"중도탈락 계수 벡터 길이가 맞지 않습니다. 기대={expected}, 입력값={flat.dropout.shape}"
            )

    def trajectories(self, flat: FlatState) -> np.ndarray:
        """(n, K) mu_it"""
        coef = flat.fixed[self.group_index]
        intercept = coef[:, 0] + flat.b[:, 0]
        slope = coef[:, 1] + flat.b[:, 1]
        return intercept[:, None] + slope[:, None] * self.design.times[None, :]

    # ----- 대상자 벡터 항 -----

    def subject_outcome(self, flat: FlatState) -> np.ndarray:
        if self.prior_only:
            return np.zeros(self.n_subjects)
        mu = self.trajectories(flat)
        d = self.design
        if self.spec.variant.is_folded:
            terms = folded_normal_logpdf(d.z, mu, math.sqrt(flat.sigma2))
        else:
            terms = normal_log_pdf(d.z, mu, flat.sigma2)
        return np.sum(np.where(d.mask, terms, 0.0), axis=1)

    def subject_re_prior(self, flat: FlatState) -> np.ndarray:
        tau = flat.tau[self.group_index]
        return normal_log_pdf(flat.b[:, 0], 0.0, tau[:, 0] ** 2) + normal_log_pdf(
            flat.b[:, 1], 0.0, tau[:, 1] ** 2
        )

    def subject_dropout(self, flat: FlatState) -> np.ndarray:
        if self.prior_only or not self.spec.variant.is_joint:
            return np.zeros(self.n_subjects)
        d = self.design
        n = self.n_coef
        vec = flat.dropout
        temporal = {1: vec[0: 2 * n].reshape(2, n), 2: vec[2 * n: 4 * n].reshape(2, n)}
        assoc = {1: vec[4 * n: 4 * n + 4].reshape(2, 2), 2: vec[4 * n + 4: 4 * n + 8].reshape(2, 2)}
        total = np.zeros(self.n_subjects)
        for cause in CAUSES:
            per_group = temporal[cause] @ d.basis.T          # (2, K-1)
            a = assoc[cause][self._g]                        # (n, 2)
            eta = per_group[self._g] + (a[:, 0] * flat.b[:, 0] + a[:, 1] * flat.b[:, 1])[:, None]
            total += np.sum(np.where(d.at_risk, log1m_expit(eta), 0.0), axis=1)
            total += np.sum(np.where(d.events[cause], log_expit(eta), 0.0), axis=1)
        return total

    # ----- 스칼라 항 -----

    def fe_prior(self, flat: FlatState) -> float:
        if self.spec.variant.is_folded:
            if np.any(flat.fixed < 0) or not flat.sigma2 > 0:
                return -math.inf
            cfg = self.spec.outcome_prior
            return float(
                np.sum(truncated_normal_logpdf(flat.fixed, self._zeta, self._rho2, 0.0))
                + inv_gamma_log_pdf(flat.sigma2, cfg.sigma2_ig_shape, cfg.sigma2_ig_scale)
            )
        cfg = self.spec.reference_prior
        if not flat.sigma2 > 0:
            return -math.inf
        return float(
            np.sum(normal_log_pdf(flat.fixed, cfg.mean, cfg.var))
            + inv_gamma_log_pdf(flat.sigma2, cfg.sigma2_ig_shape, cfg.sigma2_ig_scale)
        )

    def tau_bounds(self, flat: FlatState) -> np.ndarray:
        """tau 4개의 상한 (folded: 짝 고정효과 * omega, 참조: tau_upper)"""
        if self.spec.variant.is_folded:
            return flat.fixed * self.spec.outcome_prior.omega
        return np.full(4, self.spec.reference_prior.tau_upper)

    def tau_prior(self, flat: FlatState) -> float:
        bounds = self.tau_bounds(flat)
        if np.any(bounds <= 0):
            return -math.inf
        return float(np.sum(uniform_log_pdf(flat.tau, 0.0, bounds)))

    def dropout_prior(self, flat: FlatState) -> float:
        if not self.spec.variant.is_joint:
            return 0.0
        sd = self.spec.dropout_prior.sd
        return float(np.sum(normal_log_pdf(flat.dropout, 0.0, sd * sd)))

    def total(self, flat: FlatState) -> float:
        self.check_state(flat)
        scalar = self.fe_prior(flat)
        if math.isfinite(scalar):
            scalar += self.tau_prior(flat)
        if not math.isfinite(scalar):
            return -math.inf
        scalar += self.dropout_prior(flat)
        per_subject = self.subject_re_prior(flat) + self.subject_outcome(flat) + self.subject_dropout(flat)
        return float(scalar + np.sum(per_subject))


__all__ = [
    "log_posterior",
    "DesignArrays",
    "FlatState",
    "PosteriorKernel",
]
