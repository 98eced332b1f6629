"""
사후 요약

분위수는 numpy 기본 선형 보간(Hyndman-Fan type 7)을 쓴다.
예: 1..100 의 2.5% 분위수 = 1 + 0.025 * 99 = 3.475
"""
from typing import List, Sequence

import numpy as np

from foldnorm_sdk.errors import StructureError
from foldnorm_sdk.inference.sampler import pooled_draws
from foldnorm_sdk.schema.result_schema import ChainOutput, PosteriorSummary


def summarize_draws(name: str, draws: np.ndarray) -> PosteriorSummary:
    draws = np.asarray(draws, dtype=float)
    if draws.size == 0:
        raise StructureError(f"{name}: 요약할 표본이 없습니다.")
    q025, median, q975 = np.quantile(draws, [0.025, 0.5, 0.975], method="linear")
    return PosteriorSummary(
        name=name,
        mean=float(np.mean(draws)),
        median=float(median),
        sd=float(np.std(draws, ddof=1)) if draws.size > 1 else 0.0,
        q025=float(q025),
        q975=float(q975),
    )


def summarize(chains: Sequence[ChainOutput], quantity: str) -> PosteriorSummary:
    """체인을 합친 표본의 요약"""
    return summarize_draws(quantity, pooled_draws(chains, quantity))


def summarize_all(chains: Sequence[ChainOutput]) -> List[PosteriorSummary]:
    if not chains:
        raise StructureError("체인이 없습니다.")
    return [summarize(chains, name) for name in chains[0].parameter_names]


__all__ = ["summarize_draws", "summarize", "summarize_all"]
