"""
모의자료 생성 (data-generating mechanisms)

완전자료:
    부호 gamma_i ∈ {-1, +1}, P(-1) = sign_neg_prob
    Y_it ~ N(gamma_i mu_it, sigma^2),  Z_it = |Y_it|
    랜덤효과 ~ N(0, (짝 고정효과 * omega)^2)

경쟁위험 중도탈락 (shape-scale Gamma):
    R_i = mean_t mu_it
    T^r = 0.75 + Gamma(1 + 10 R_i, 50 R_i)
    T^d = Gamma(1 + 0.5 / R_i, 0.3 / R_i)
    T = min(T^r, T^d) <= K-1 이면 D = ceil(T) - 1, delta = 1(T = T^r) 또는 2
    동률(T^r == T^d)은 delta = 1
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from foldnorm_sdk.distributions.folded_normal import fn_mean, fn_variance
from foldnorm_sdk.distributions.gamma import gamma_quantile
from foldnorm_sdk.errors import ParameterError
from foldnorm_sdk.schema.config_schema import ScenarioConfig
from foldnorm_sdk.schema.data_schema import (
    DropoutCause,
    DropoutRecord,
    ExposureGroup,
    LongitudinalDataset,
    Observation,
    SubjectData,
    Z_DECIMALS,
)
from foldnorm_sdk.schema.model_schema import FixedEffects, FoldedNormalParams, RandomEffects
from foldnorm_sdk.schema.result_schema import SimulationTruth

logger = logging.getLogger(__name__)

# 응용연구(성별 x 중도탈락 유형) 집계: D=0..7 별 회복/사망 수와 완료자 수, K=9
APPLICATION_TALLIES = {
    ExposureGroup.UNEXPOSED: {
        "recovery": [12, 8, 9, 1, 3, 5, 5, 5],
        "death": [0, 0, 3, 0, 1, 4, 5, 2],
        "completers": 12,
    },
    ExposureGroup.EXPOSED: {
        "recovery": [24, 9, 9, 11, 3, 9, 9, 12],
        "death": [3, 3, 1, 2, 4, 1, 1, 6],
        "completers": 21,
    },
}

APPLICATION_SCENARIO = ScenarioConfig(
    n_subjects=203,
    K=9,
    c0=0.10,
    c1=0.006,
    d0=0.11,
    d1=0.006,
    sigma=0.06,
    omega=0.5,
)


def _fixed_effects(sc: ScenarioConfig) -> FixedEffects:
    return FixedEffects(c0=sc.c0, c1=sc.c1, d0=sc.d0, d1=sc.d1, sigma2=sc.sigma ** 2)


def _draw_trajectories(sc: ScenarioConfig, groups: np.ndarray, rng: np.random.Generator):
    """부호, 랜덤효과, 기대궤적 mu (n, K), 크기 결과 Z (n, K)"""
    n = groups.size
    signs = np.where(rng.random(n) < sc.sign_neg_prob, -1, 1)
    intercept = np.where(groups == 0, sc.c0, sc.d0)
    slope = np.where(groups == 0, sc.c1, sc.d1)
    b0 = rng.standard_normal(n) * intercept * sc.omega
    b1 = rng.standard_normal(n) * slope * sc.omega
    times = np.arange(sc.K, dtype=float)
    mu = (intercept + b0)[:, None] + (slope + b1)[:, None] * times[None, :]
    y = signs[:, None] * mu + sc.sigma * rng.standard_normal((n, sc.K))
    return signs, b0, b1, mu, np.abs(y)


def _build_dataset(
        K: int,
        groups: np.ndarray,
        z: np.ndarray,
        D: np.ndarray,
        delta: np.ndarray,
) -> LongitudinalDataset:
    subjects = []
    for i in range(groups.size):
        last = int(D[i])
        subjects.append(
            SubjectData(
                id=f"S{i + 1:04d}",
                group=ExposureGroup(int(groups[i])),
                observations=[
                    Observation(time=t, z=round(float(z[i, t]), Z_DECIMALS)) for t in range(last + 1)
                ],
                dropout=DropoutRecord(D=last, delta=DropoutCause(int(delta[i]))),
            )
        )
    return LongitudinalDataset(K=K, subjects=subjects)


def simulate_complete(
        sc: ScenarioConfig,
        rng: np.random.Generator,
) -> Tuple[LongitudinalDataset, SimulationTruth]:
    """n_subjects명 x K시점 완전자료와 참값"""
    n = sc.n_subjects
    groups = (rng.random(n) < sc.assign_prob).astype(int)
    signs, b0, b1, _, z = _draw_trajectories(sc, groups, rng)
    dataset = _build_dataset(
        sc.K, groups, z, np.full(n, sc.K - 1), np.zeros(n, dtype=int)
    )
    truth = SimulationTruth(
        tad=sc.tad,
        fixed=_fixed_effects(sc),
        omega=sc.omega,
        random_effects=[
            RandomEffects(group=ExposureGroup(int(g)), b0=float(a), b1=float(b))
            for g, a, b in zip(groups, b0, b1)
        ],
        signs=[int(s) for s in signs],
    )
    return dataset, truth


def marginal_moments(sc: ScenarioConfig) -> pd.DataFrame:
    """
    완전자료 Z_it 의 (그룹, 시점)별 주변 평균과 분산

    mu_it ~ N(m_t, (intercept*omega)^2 + t^2 (slope*omega)^2) 이고 부호는 접힘 뒤에 사라지므로
    Z_it ~ FN(m_t, sigma^2 + (intercept*omega)^2 + t^2 (slope*omega)^2)
    """
    rows = []
    for group, (intercept, slope) in enumerate([(sc.c0, sc.c1), (sc.d0, sc.d1)]):
        for t in range(sc.K):
            m = intercept + slope * t
            scale = math.sqrt(
                sc.sigma ** 2 + (intercept * sc.omega) ** 2 + (t * slope * sc.omega) ** 2
            )
            if scale > 0:
                p = FoldedNormalParams(mu=m, sigma=scale)
                mean, variance = fn_mean(p), fn_variance(p)
            else:
                mean, variance = abs(m), 0.0
            rows.append({"group": group, "time": t, "expected_mean": mean, "expected_var": variance})
    return pd.DataFrame(rows)


def moments_report(dataset: LongitudinalDataset, sc: ScenarioConfig) -> pd.DataFrame:
    """marginal_moments 옆에 자료의 (그룹, 시점)별 관측 평균/분산/개수를 붙인 표"""
    observed = pd.DataFrame(
        [
            {"group": int(s.group), "time": obs.time, "z": obs.z}
            for s in dataset.subjects
            for obs in s.observations
        ]
    )
    stats = (
        observed.groupby(["group", "time"])["z"]
        .agg(observed_mean="mean", observed_var="var", n="size")
        .reset_index()
    )
    report = marginal_moments(sc).merge(stats, on=["group", "time"], how="left")
    report["n"] = report["n"].fillna(0).astype(int)
    return report


def subject_risk(truth: SimulationTruth, K: int) -> np.ndarray:
    """R_i = 랜덤효과를 포함한 대상자 기대궤적의 시점 평균"""
    fe = truth.fixed
    groups = np.array([int(re.group) for re in truth.random_effects])
    b0 = np.array([re.b0 for re in truth.random_effects])
    b1 = np.array([re.b1 for re in truth.random_effects])
    intercept = np.where(groups == 0, fe.c0, fe.d0) + b0
    slope = np.where(groups == 0, fe.c1, fe.d1) + b1
    return intercept + slope * (K - 1) / 2.0


def draw_dropout_times(
        risk: np.ndarray,
        sc: ScenarioConfig,
        rng: np.random.Generator,
        uniforms: Optional[Tuple[np.ndarray, np.ndarray]] = None,
):
    """
    경쟁위험 중도탈락 시점 생성 (벡터화)

    R <= 0 은 r_floor로 잘라내고 개수를 돌려준다.
    uniforms를 주면 그 균등난수로 역CDF 변환한다. (공통난수 결합)

    Returns:
        (D, delta, T^r, T^d, 잘라낸 R 개수)
    """
    risk = np.asarray(risk, dtype=float)
    n_clamped = int(np.sum(risk <= 0))
    if n_clamped:
        logger.warning("R <= 0 인 대상자 %d명의 R을 %g 로 잘라냅니다.", n_clamped, sc.r_floor)
    r = np.where(risk > 0, risk, sc.r_floor)
    if uniforms is None:
        u_r, u_d = rng.random(r.size), rng.random(r.size)
    else:
        u_r, u_d = uniforms
    t_rec = sc.recovery_shift + gamma_quantile(
        u_r, sc.recovery_shape_base + sc.recovery_shape_coef * r, sc.recovery_scale_coef * r
    )
    t_death = gamma_quantile(
        u_d, sc.death_shape_base + sc.death_shape_coef / r, sc.death_scale_coef / r
    )
    t_min = np.minimum(t_rec, t_death)
    last_time = sc.K - 1
    dropped = t_min <= last_time
    D = np.where(dropped, np.maximum(np.ceil(t_min).astype(int) - 1, 0), last_time)
    cause = np.where(t_rec <= t_death, int(DropoutCause.RECOVERY), int(DropoutCause.DEATH))
    delta = np.where(dropped, cause, int(DropoutCause.COMPLETER))
    return D, delta, t_rec, t_death, n_clamped


def simulate_dropout(
        dataset: LongitudinalDataset,
        truth: SimulationTruth,
        sc: ScenarioConfig,
        rng: np.random.Generator,
) -> Tuple[LongitudinalDataset, SimulationTruth]:
    """완전자료에 중도탈락을 적용하고 D 이후 관측을 제거"""
    risk = subject_risk(truth, dataset.K)
    D, delta, t_rec, t_death, n_clamped = draw_dropout_times(risk, sc, rng)
    groups = np.array([int(s.group) for s in dataset.subjects])
    z = np.zeros((dataset.n_subjects, dataset.K))
    for i, subject in enumerate(dataset.subjects):
        z[i, : len(subject.values)] = subject.values
    out = _build_dataset(dataset.K, groups, z, D, delta)
    truth = truth.model_copy(
        update={
            "risk": risk.tolist(),
            "recovery_times": t_rec.tolist(),
            "death_times": t_death.tolist(),
            "n_clamped": n_clamped,
        }
    )
    return out, truth


def simulate_scenario(
        sc: ScenarioConfig,
        rng: np.random.Generator,
) -> Tuple[LongitudinalDataset, SimulationTruth]:
    """완전자료 생성 후 dropout_enabled 이면 중도탈락 적용"""
    dataset, truth = simulate_complete(sc, rng)
    if sc.dropout_enabled:
        dataset, truth = simulate_dropout(dataset, truth, sc, rng)
    return dataset, truth


def _application_records(group: ExposureGroup) -> List[Tuple[int, int]]:
    tally = APPLICATION_TALLIES[group]
    records = []
    for name, cause in (("recovery", DropoutCause.RECOVERY), ("death", DropoutCause.DEATH)):
        for d, count in enumerate(tally[name]):
            records.extend([(d, int(cause))] * count)
    records.extend([(8, int(DropoutCause.COMPLETER))] * tally["completers"])
    return records


def simulate_application_like(
        rng: np.random.Generator,
        sc: ScenarioConfig = APPLICATION_SCENARIO,
) -> Tuple[LongitudinalDataset, SimulationTruth]:
    """
    응용연구 모양의 데모 코호트 (기저시점 제거 후 K=9)

    그룹별 중도탈락 (D, delta) 구성은 응용연구 집계표를 그대로 따르고
    (비노출 75명, 노출 128명) 크기 결과는 sc의 궤적에서 생성한다.
    """
    if sc.K != 9:
        raise ParameterError(f"응용연구 모양 코호트는 K=9 입니다. 입력값={sc.K}")
    per_group = [
        _application_records(ExposureGroup.UNEXPOSED),
        _application_records(ExposureGroup.EXPOSED),
    ]
    groups = np.concatenate([np.full(len(recs), g) for g, recs in enumerate(per_group)])
    records = np.array([rec for recs in per_group for rec in recs], dtype=int)
    order = rng.permutation(groups.size)
    groups, records = groups[order], records[order]
    signs, b0, b1, _, z = _draw_trajectories(sc, groups, rng)
    dataset = _build_dataset(sc.K, groups, z, records[:, 0], records[:, 1])
    truth = SimulationTruth(
        tad=sc.tad,
        fixed=_fixed_effects(sc),
        omega=sc.omega,
        random_effects=[
            RandomEffects(group=ExposureGroup(int(g)), b0=float(a), b1=float(b))
            for g, a, b in zip(groups, b0, b1)
        ],
        signs=[int(s) for s in signs],
    )
    return dataset, truth


__all__ = [
    "APPLICATION_TALLIES",
    "APPLICATION_SCENARIO",
    "simulate_complete",
    "marginal_moments",
    "moments_report",
    "subject_risk",
    "draw_dropout_times",
    "simulate_dropout",
    "simulate_scenario",
    "simulate_application_like",
]
