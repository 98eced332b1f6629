"""
foldnorm-sdk 메인 클라이언트 (자동 리소스 관리)
"""
import weakref
from concurrent.futures import Executor, ProcessPoolExecutor
from typing import Optional

from foldnorm_sdk.dataset.namespace import DatasetNamespace
from foldnorm_sdk.inference.namespace import InferenceNamespace
from foldnorm_sdk.schema.config_schema import McmcConfig, env_default_seed, env_default_workers
from foldnorm_sdk.simulation.namespace import SimulationNamespace


def _shutdown(state: dict) -> None:
    executor = state.get("executor")
    if executor is not None:
        executor.shutdown(wait=True, cancel_futures=True)
        state["executor"] = None


class FoldnormClient:
    """
    foldnorm-sdk 클라이언트

    체인/run 병렬 실행용 프로세스 풀을 필요할 때 만들고 자동으로 정리하므로
    with 문 없이도 사용 가능합니다.

    Example:
        from foldnorm_sdk import FoldnormClient, ModelSpec

        client = FoldnormClient(workers=4, seed=7)
        data = client.dataset.read("cohort.csv")
        report = client.inference.fit(data, ModelSpec.build("B", K=data.K))
        print(report.summary("AD"))
    """

    def __init__(self, workers: Optional[int] = None, seed: Optional[int] = None):
        """
        클라이언트 초기화

        Args:
            workers: 병렬 프로세스 수 (기본값: FOLDNORM_WORKERS 환경변수, 없으면 1)
                    1이면 모든 계산을 현재 프로세스에서 실행합니다.
            seed: McmcConfig/시뮬레이션에 seed를 주지 않았을 때 쓰는 기본 시드
                  (기본값: FOLDNORM_SEED 환경변수, 없으면 20240101)
        """
        self.workers = env_default_workers() if workers is None else max(1, int(workers))
        self.seed = env_default_seed() if seed is None else int(seed)
        self._state = {"executor": None}
        self._closed = False
        self.inference = InferenceNamespace(self)
        self.simulation = SimulationNamespace(self)
        self.dataset = DatasetNamespace(self)

        # 가비지 컬렉션 시 자동 정리 등록 (self를 참조하지 않는 상태 dict만 넘김)
        self._finalizer = weakref.finalize(self, _shutdown, self._state)

    def _get_executor(self) -> Optional[Executor]:
        """
        프로세스 풀 가져오기 (Lazy 초기화)

        Returns:
            ProcessPoolExecutor, workers == 1 이면 None
        """
        if self._closed:
            raise RuntimeError("클라이언트가 이미 닫혔습니다.")
        if self.workers <= 1:
            return None
        if self._state["executor"] is None:
            self._state["executor"] = ProcessPoolExecutor(max_workers=self.workers)
        return self._state["executor"]

    def mcmc_config(self, mcmc: Optional[McmcConfig] = None) -> McmcConfig:
        """mcmc가 없으면 클라이언트 seed로 기본 설정"""
        return McmcConfig(seed=self.seed) if mcmc is None else mcmc

    def close(self):
        """
        프로세스 풀 종료 (명시적 호출)

        Note: 가비지 컬렉션 시 자동으로 호출되므로 대부분의 경우 명시적 호출 불필요
        """
        if not self._closed:
            self._finalizer()
            self._closed = True

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()


__all__ = ["FoldnormClient"]
