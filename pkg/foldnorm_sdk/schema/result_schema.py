"""
추론/시뮬레이션 결과용 Pydantic 모델

표 형태 출력 컬럼명은 alias로 둔다. (model_dump(by_alias=True) 사용)
"""
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from foldnorm_sdk.errors import StructureError
from foldnorm_sdk.schema.config_schema import McmcConfig
from foldnorm_sdk.schema.model_schema import FixedEffects, ModelSpec, RandomEffects

_common_config = ConfigDict(populate_by_name=True, extra="ignore")


class ChainOutput(BaseModel):
    """
    체인 하나의 결과

    - draws: (n_samples, n_params) 보존 표본 (AD 포함)
    - log_posterior: 보존 표본별 로그 사후밀도
    - acceptance: 블록별 burn-in 이후 채택률
    - seed, chain_index: 시드 출처 (derive_rng(seed, "chain", chain_index))
    - random_effects: keep_random_effects일 때만 (n_samples, n_subjects, 2)
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="ignore")
    chain_index: int
    seed: int
    parameter_names: List[str]
    draws: np.ndarray
    log_posterior: np.ndarray
    acceptance: Dict[str, float] = Field(default_factory=dict)
    random_effects: Optional[np.ndarray] = None

    @model_validator(mode="after")
    def _check_shapes(self) -> "ChainOutput":
        if self.draws.ndim != 2 or self.draws.shape[1] != len(self.parameter_names):
            raise StructureError(
                f"draws 차원이 모니터링 이름과 맞지 않습니다. 입력값 shape={self.draws.shape}"
            )
        if self.log_posterior.shape[0] != self.draws.shape[0]:
            raise StructureError("log_posterior 길이가 draws 개수와 다릅니다.")
        return self

    @property
    def n_samples(self) -> int:
        return int(self.draws.shape[0])

    def column(self, name: str) -> np.ndarray:
        try:
            return self.draws[:, self.parameter_names.index(name)]
        except ValueError:
            raise StructureError(f"모니터링되지 않은 값입니다. 입력값={name}") from None


class PosteriorSummary(BaseModel):
    """모니터링 값 하나의 사후 요약 (분위수는 type-7 선형 보간)"""
    model_config = _common_config
    name: str = Field(alias="Parameter")
    mean: float = Field(alias="Mean")
    median: float = Field(alias="Median")
    sd: float = Field(alias="S.D.")
    q025: float = Field(alias="2.5%Qt.")
    q975: float = Field(alias="97.5%Qt.")


class DiagnosticRow(BaseModel):
    """R-hat / bulk ESS 진단 행. constant=True 이면 표본이 상수라 R-hat을 1.0으로 보고"""
    model_config = _common_config
    name: str = Field(alias="Parameter")
    rhat: float = Field(alias="Rhat")
    ess: float = Field(alias="ESS")
    constant: bool = Field(default=False, alias="Constant")
    warning: bool = Field(default=False, alias="Warning")


class FitReport(BaseModel):
    """cmd_fit 결과 묶음"""
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="ignore")
    spec: ModelSpec
    mcmc: McmcConfig
    summaries: List[PosteriorSummary]
    diagnostics: List[DiagnosticRow]
    chains: List[ChainOutput]

    def summary(self, name: str) -> PosteriorSummary:
        for row in self.summaries:
            if row.name == name:
                return row
        raise StructureError(f"요약이 없습니다. 입력값={name}")

    @property
    def has_warnings(self) -> bool:
        return any(row.warning for row in self.diagnostics)

    def summary_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump(by_alias=True) for row in self.summaries])

    def diagnostics_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump(by_alias=True) for row in self.diagnostics])

    def acceptance_frame(self) -> pd.DataFrame:
        rows = []
        for chain in self.chains:
            for block, rate in chain.acceptance.items():
                rows.append({"chain": chain.chain_index, "block": block, "acceptance": rate})
        return pd.DataFrame(rows, columns=["chain", "block", "acceptance"])

    def draws_frame(self) -> pd.DataFrame:
        frames = []
        for chain in self.chains:
            frame = pd.DataFrame(chain.draws, columns=chain.parameter_names)
            frame.insert(0, "iteration", np.arange(chain.n_samples))
            frame.insert(0, "chain", chain.chain_index)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)


class SimulationTruth(BaseModel):
    """
    모의자료의 참값 (truth sidecar)

    recovery_times, death_times, risk는 중도탈락 DGP를 적용했을 때만 채워진다.
    """
    model_config = _common_config
    tad: float
    fixed: FixedEffects
    omega: float
    random_effects: List[RandomEffects] = Field(default_factory=list)
    signs: List[int] = Field(default_factory=list)
    risk: Optional[List[float]] = None
    recovery_times: Optional[List[float]] = None
    death_times: Optional[List[float]] = None
    n_clamped: int = 0


class RunRecord(BaseModel):
    """시뮬레이션 연구의 (시나리오, 모형, run) 한 건. 재개/샤드 병합 단위"""
    model_config = _common_config
    scenario_id: str
    model: str
    run: int = Field(ge=0)
    sigma: float
    tad: float
    omega: float
    ok: bool
    mean: float = float("nan")
    median: float = float("nan")
    sd: float = float("nan")
    q025: float = float("nan")
    q975: float = float("nan")
    error: str = ""
    config_hash: str = Field(default="", description="결과를 만든 StudyConfig의 지문")


class StudyRow(BaseModel):
    """(모형, 시나리오) 셀 하나의 집계 성능 지표"""
    model_config = _common_config
    model: str = Field(alias="Model")
    sigma: float = Field(alias="σ")
    tad: float = Field(alias="TAD")
    omega: float = Field(alias="ω")
    bias: float = Field(alias="Bias")
    mean: float = Field(alias="Mean")
    median: float = Field(alias="Median")
    sd: float = Field(alias="S.D.")
    se: float = Field(alias="S.E.")
    q025: float = Field(alias="2.5%Qt.")
    q975: float = Field(alias="97.5%Qt.")
    mse: float = Field(alias="MSE")
    n_runs: int = Field(ge=0)
    n_failed: int = Field(default=0, ge=0)
    valid: bool = True


class StudyResult(BaseModel):
    """집계 표. rows는 (시나리오 순서, 모형 순서)로 정렬"""
    model_config = _common_config
    rows: List[StudyRow] = Field(default_factory=list)

    @property
    def valid(self) -> bool:
        return all(row.valid for row in self.rows)

    def cell(self, model: str, sigma: float, tad: float, omega: float) -> StudyRow:
        for row in self.rows:
            if (
                    row.model == model
                    and np.isclose(row.sigma, sigma)
                    and np.isclose(row.tad, tad)
                    and np.isclose(row.omega, omega)
            ):
                return row
        raise StructureError(f"셀이 없습니다. 입력값 model={model}, sigma={sigma}, tad={tad}, omega={omega}")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump(by_alias=True) for row in self.rows])


__all__ = [
    "ChainOutput",
    "PosteriorSummary",
    "DiagnosticRow",
    "FitReport",
    "SimulationTruth",
    "RunRecord",
    "StudyRow",
    "StudyResult",
]
