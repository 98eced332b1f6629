"""
Simulation 네임스페이스 - FoldnormClient와 함께 사용
"""
import logging
from typing import TYPE_CHECKING, Optional, Tuple

import numpy as np

from foldnorm_sdk.distributions.rng import derive_rng
from foldnorm_sdk.errors import StudyInvalidError
from foldnorm_sdk.schema.config_schema import ScenarioConfig, StudyConfig
from foldnorm_sdk.schema.data_schema import LongitudinalDataset
from foldnorm_sdk.schema.result_schema import SimulationTruth, StudyResult
from foldnorm_sdk.simulation.dgp import (
    APPLICATION_SCENARIO,
    simulate_application_like,
    simulate_scenario,
)
from foldnorm_sdk.simulation.study import aggregate_study, run_study

if TYPE_CHECKING:
    from foldnorm_sdk.client import FoldnormClient

logger = logging.getLogger(__name__)


class SimulationNamespace:
    """
    client.simulation 네임스페이스.

    Example:
        data, truth = client.simulation.generate(ScenarioConfig(dropout_enabled=True))
        result = client.simulation.study(STUDY_PRESETS["dropout"], "study-out", shard=(0, 4))
    """

    def __init__(self, client: "FoldnormClient"):
        self._client = client

    def _rng(self, seed: Optional[int]) -> np.random.Generator:
        return derive_rng(self._client.seed if seed is None else seed, "simulate")

    def generate(
            self,
            scenario: Optional[ScenarioConfig] = None,
            seed: Optional[int] = None,
    ) -> Tuple[LongitudinalDataset, SimulationTruth]:
        """시나리오 하나의 모의자료. seed가 없으면 클라이언트 seed"""
        return simulate_scenario(scenario or ScenarioConfig(), self._rng(seed))

    def application_like(
            self,
            scenario: Optional[ScenarioConfig] = None,
            seed: Optional[int] = None,
    ) -> Tuple[LongitudinalDataset, SimulationTruth]:
        return simulate_application_like(self._rng(seed), scenario or APPLICATION_SCENARIO)

    def study(
            self,
            cfg: StudyConfig,
            out_dir,
            *,
            shard: Tuple[int, int] = (0, 1),
            resume: bool = False,
            progress: bool = True,
            strict: bool = False,
    ) -> StudyResult:
        """
        시뮬레이션 연구 실행. 클라이언트 workers > 1 이면 run 단위 병렬

        Args:
            strict: True면 무효 셀이 있을 때 StudyInvalidError

        Returns:
            StudyResult: out_dir 전체 샤드의 집계
        """
        result = run_study(
            cfg,
            out_dir,
            shard=shard,
            resume=resume,
            executor=self._client._get_executor(),
            progress=progress,
        )
        if strict and not result.valid:
            raise StudyInvalidError(f"실패 비율 한도를 넘은 셀이 있습니다. 출력={out_dir}")
        return result

    def aggregate(self, out_dir, cfg: Optional[StudyConfig] = None) -> StudyResult:
        """샤드 파일만으로 다시 집계 (study.csv 갱신)"""
        result = aggregate_study(out_dir, cfg)
        logger.info("집계 완료: 셀 %d개", len(result.rows))
        return result


__all__ = ["SimulationNamespace"]
