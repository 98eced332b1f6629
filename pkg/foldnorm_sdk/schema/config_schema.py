"""
실행 설정용 Pydantic 모델 (MCMC, 시나리오, 시뮬레이션 연구, fit/simulate 실행)

설정 파일(.json / .toml)은 foldnorm_sdk.dataset.io.load_config 로 읽는다.
우선순위: CLI 플래그 > 설정 파일 > 환경변수 > 기본값
"""
import os
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from foldnorm_sdk.schema.model_schema import (
    DropoutPriorConfig,
    OutcomePriorConfig,
    ReferencePriorConfig,
)

_common_config = ConfigDict(populate_by_name=True, extra="ignore")

DEFAULT_SEED = 20240101


def env_default_seed() -> int:
    """FOLDNORM_SEED 환경변수 (없으면 20240101)"""
    return int(os.getenv("FOLDNORM_SEED", str(DEFAULT_SEED)))


def env_default_workers() -> int:
    """FOLDNORM_WORKERS 환경변수 (없으면 1 = 프로세스 내 실행)"""
    return max(1, int(os.getenv("FOLDNORM_WORKERS", "1")))


# ---------- MCMC ----------


class McmcConfig(BaseModel):
    """
    적응형 Metropolis-within-Gibbs 설정

    - adapt_window 반복마다 burn-in 동안만 제안 척도를 target_accept 쪽으로 조정
    - freeze: 초기값에 고정할 블록 이름 (c0, c1, d0, d1, sigma2, tau_a0.., b0, b1, dropout)
    """
    model_config = _common_config
    n_chains: int = Field(default=4, ge=1)
    burn_in: int = Field(default=2000, ge=0)
    n_samples: int = Field(default=2000, ge=1)
    seed: int = Field(default_factory=env_default_seed)
    target_accept: float = Field(default=0.44, gt=0, lt=1)
    adapt_window: int = Field(default=25, ge=1)
    adapt_max_step: float = Field(default=0.5, gt=0)
    max_init_attempts: int = Field(default=20, ge=1)
    keep_random_effects: bool = False
    freeze: List[str] = Field(default_factory=list)


# ---------- 시나리오 ----------


class ScenarioConfig(BaseModel):
    """
    자료 생성 시나리오

    완전자료 DGP 값과 Gamma 경쟁위험 중도탈락 DGP 상수를 함께 가진다.
    - 회복: T^r = recovery_shift + Gamma(1 + 10R, 50R)
    - 사망: T^d = Gamma(1 + 0.5/R, 0.3/R)
    """
    model_config = _common_config
    n_subjects: int = Field(default=100, ge=1)
    K: int = Field(default=7, ge=2)
    assign_prob: float = Field(default=0.5, ge=0, le=1)
    sign_neg_prob: float = Field(default=0.6, ge=0, le=1)
    c0: float = 0.15
    c1: float = 0.015
    d0: float = 0.08
    d1: float = 0.005
    sigma: float = Field(default=0.06, ge=0)
    omega: float = Field(default=0.5, ge=0)
    dropout_enabled: bool = False
    recovery_shift: float = Field(default=0.75, ge=0)
    recovery_shape_base: float = Field(default=1.0, gt=0)
    recovery_shape_coef: float = Field(default=10.0, ge=0)
    recovery_scale_coef: float = Field(default=50.0, gt=0)
    death_shape_base: float = Field(default=1.0, gt=0)
    death_shape_coef: float = Field(default=0.5, ge=0)
    death_scale_coef: float = Field(default=0.3, gt=0)
    r_floor: float = Field(default=1e-6, gt=0)

    @property
    def tad(self) -> float:
        """참 평균거리 AD = c0 - d0 + (c1 - d1)(K-1)/2"""
        return self.c0 - self.d0 + (self.c1 - self.d1) * (self.K - 1) / 2.0

    @property
    def scenario_id(self) -> str:
        """시드 파생에 쓰는 안정적인 시나리오 식별자"""
        return (
            f"n={self.n_subjects}|K={self.K}|c0={self.c0:.6f}|c1={self.c1:.6f}"
            f"|d0={self.d0:.6f}|d1={self.d1:.6f}|sigma={self.sigma:.6f}"
            f"|omega={self.omega:.6f}|dropout={int(self.dropout_enabled)}"
        )


class StudyGrid(BaseModel):
    """요인 설계 격자 (sigma x d0 x omega)"""
    model_config = _common_config
    sigmas: List[float] = Field(default_factory=lambda: [0.08, 0.06])
    d0s: List[float] = Field(default_factory=lambda: [0.08, 0.06, 0.05, 0.04])
    omegas: List[float] = Field(default_factory=lambda: [0.5, 1 / 2.4])

    def scenarios(self, base: ScenarioConfig) -> List[ScenarioConfig]:
        out = []
        for omega in self.omegas:
            for sigma in self.sigmas:
                for d0 in self.d0s:
                    out.append(base.model_copy(update={"sigma": sigma, "d0": d0, "omega": omega}))
        return out


class StudyConfig(BaseModel):
    """
    몬테카를로 시뮬레이션 연구 설정

    - models: 연구 라벨 (L, F, I, II, III)
    - burn_in_overrides: 라벨별 burn-in (예: {"L": 4000})
    - max_failure_fraction: 셀별 실패 run 허용 비율
    """
    model_config = _common_config
    master_seed: int = Field(default_factory=env_default_seed)
    n_runs: int = Field(default=100, ge=1)
    models: List[str] = Field(default_factory=lambda: ["L", "F"])
    grid: StudyGrid = Field(default_factory=StudyGrid)
    base: ScenarioConfig = Field(default_factory=ScenarioConfig)
    mcmc: McmcConfig = Field(
        default_factory=lambda: McmcConfig(n_chains=2, burn_in=1000, n_samples=1000)
    )
    burn_in_overrides: Dict[str, int] = Field(default_factory=dict)
    temporal: str = "flexible"
    outcome_prior: OutcomePriorConfig = Field(default_factory=OutcomePriorConfig)
    max_failure_fraction: float = Field(default=0.01, ge=0, le=1)


# ---------- 실행 설정 ----------


class RunConfig(BaseModel):
    """fit 명령 설정"""
    model_config = _common_config
    data_path: Optional[str] = None
    model: str = "B"
    temporal: Optional[str] = None
    K: Optional[int] = Field(default=None, ge=1)
    drop_baseline: bool = False
    outcome_prior: OutcomePriorConfig = Field(default_factory=OutcomePriorConfig)
    reference_prior: ReferencePriorConfig = Field(default_factory=ReferencePriorConfig)
    dropout_prior: DropoutPriorConfig = Field(default_factory=DropoutPriorConfig)
    mcmc: McmcConfig = Field(default_factory=McmcConfig)
    out_dir: str = "fit-out"
    workers: Optional[int] = Field(default=None, ge=1)


class SimulateConfig(BaseModel):
    """simulate 명령 설정. application_like=True 이면 응용연구 모양의 K=9 코호트 생성"""
    model_config = _common_config
    scenario: ScenarioConfig = Field(default_factory=ScenarioConfig)
    seed: int = Field(default_factory=env_default_seed)
    application_like: bool = False
    out_dir: str = "sim-out"


__all__ = [
    "DEFAULT_SEED",
    "env_default_seed",
    "env_default_workers",
    "McmcConfig",
    "ScenarioConfig",
    "StudyGrid",
    "StudyConfig",
    "RunConfig",
    "SimulateConfig",
]
