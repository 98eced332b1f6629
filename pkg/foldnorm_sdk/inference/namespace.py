"""
Inference 네임스페이스 - FoldnormClient와 함께 사용
"""
import logging
from typing import TYPE_CHECKING, List, Optional

from foldnorm_sdk.inference.diagnostics import diagnose, ess, rhat
from foldnorm_sdk.inference.sampler import run_chain, run_chains
from foldnorm_sdk.inference.summary import summarize, summarize_all
from foldnorm_sdk.model.posterior import log_posterior
from foldnorm_sdk.schema.config_schema import McmcConfig
from foldnorm_sdk.schema.data_schema import LongitudinalDataset
from foldnorm_sdk.schema.model_schema import ModelSpec, ParameterState
from foldnorm_sdk.schema.result_schema import ChainOutput, FitReport, PosteriorSummary

if TYPE_CHECKING:
    from foldnorm_sdk.client import FoldnormClient

logger = logging.getLogger(__name__)


class InferenceNamespace:
    """
    client.inference 네임스페이스.

    Example:
        spec = ModelSpec.build("D", K=data.K, temporal="grouped:2")
        report = client.inference.fit(data, spec, McmcConfig(n_chains=4, seed=7))
        print(report.summary("AD").mean)
    """

    def __init__(self, client: "FoldnormClient"):
        self._client = client

    def log_posterior(self, state: ParameterState, data: LongitudinalDataset, spec: ModelSpec) -> float:
        return log_posterior(state, data, spec)

    def run_chain(
            self,
            data: LongitudinalDataset,
            spec: ModelSpec,
            mcmc: Optional[McmcConfig] = None,
            chain_index: int = 0,
            **kwargs,
    ) -> ChainOutput:
        return run_chain(data, spec, self._client.mcmc_config(mcmc), chain_index, **kwargs)

    def run_chains(
            self,
            data: LongitudinalDataset,
            spec: ModelSpec,
            mcmc: Optional[McmcConfig] = None,
            **kwargs,
    ) -> List[ChainOutput]:
        """
        체인 여러 개 실행. 클라이언트 workers > 1 이면 프로세스 풀에서 병렬 실행
        """
        cfg = self._client.mcmc_config(mcmc)
        executor = self._client._get_executor() if cfg.n_chains > 1 else None
        return run_chains(data, spec, cfg, executor=executor, **kwargs)

    def fit(
            self,
            data: LongitudinalDataset,
            spec: ModelSpec,
            mcmc: Optional[McmcConfig] = None,
    ) -> FitReport:
        """
        체인 실행 + 요약 + 진단

        Returns:
            FitReport: summaries(AD 포함), diagnostics(R-hat/ESS), chains(표본/채택률)
        """
        cfg = self._client.mcmc_config(mcmc)
        logger.info(
            "모형 %s 적합 시작: 대상자 %d명, K=%d, 체인 %d개 x (burn-in %d + 표본 %d)",
            spec.variant.value,
            data.n_subjects,
            data.K,
            cfg.n_chains,
            cfg.burn_in,
            cfg.n_samples,
        )
        chains = self.run_chains(data, spec, cfg)
        report = FitReport(
            spec=spec,
            mcmc=cfg,
            summaries=summarize_all(chains),
            diagnostics=diagnose(chains),
            chains=chains,
        )
        ad = report.summary("AD")
        logger.info("AD 사후평균 %.5f (95%% 구간 %.5f, %.5f)", ad.mean, ad.q025, ad.q975)
        return report

    def summarize(self, chains: List[ChainOutput], quantity: str) -> PosteriorSummary:
        return summarize(chains, quantity)

    def rhat(self, chains: List[ChainOutput], quantity: str) -> float:
        return rhat(chains, quantity)

    def ess(self, chains: List[ChainOutput], quantity: str) -> float:
        return ess(chains, quantity)


__all__ = ["InferenceNamespace"]
