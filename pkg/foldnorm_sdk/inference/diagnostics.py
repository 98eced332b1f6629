"""
수렴 진단: 순위 정규화 split R-hat, bulk ESS (arviz)

상수 표본은 R-hat이 정의되지 않으므로 1.0으로 보고하고 constant 플래그를 세운다.
R-hat > 1.05 는 경고만 남기고 실패로 처리하지 않는다.
"""
import logging
from typing import List, Sequence

import arviz as az
import numpy as np

from foldnorm_sdk.errors import StructureError
from foldnorm_sdk.schema.result_schema import ChainOutput, DiagnosticRow

logger = logging.getLogger(__name__)

RHAT_WARNING_THRESHOLD = 1.05


def chain_matrix(chains: Sequence[ChainOutput], quantity: str) -> np.ndarray:
    """(n_chains, n_draws) 배열"""
    if not chains:
        raise StructureError("체인이 없습니다.")
    columns = [chain.column(quantity) for chain in chains]
    lengths = {len(c) for c in columns}
    if len(lengths) != 1:
        raise StructureError(f"체인 길이가 서로 다릅니다. 입력값={sorted(lengths)}")
    return np.vstack(columns)


def _is_constant(matrix: np.ndarray) -> bool:
    return bool(np.ptp(matrix) == 0)


def rhat(chains: Sequence[ChainOutput], quantity: str) -> float:
    if len(chains) < 2:
        raise StructureError(f"R-hat에는 체인이 2개 이상 필요합니다. 입력값={len(chains)}")
    matrix = chain_matrix(chains, quantity)
    if _is_constant(matrix):
        return 1.0
    return float(az.rhat(matrix, method="rank"))


def ess(chains: Sequence[ChainOutput], quantity: str) -> float:
    """bulk ESS. 상수 표본이면 전체 표본 수"""
    matrix = chain_matrix(chains, quantity)
    if _is_constant(matrix):
        return float(matrix.size)
    return float(az.ess(matrix, method="bulk"))


def diagnose(chains: Sequence[ChainOutput]) -> List[DiagnosticRow]:
    """모니터링 값 전체의 진단표. 체인이 1개면 R-hat은 nan"""
    rows = []
    names = chains[0].parameter_names if chains else []
    for name in names:
        matrix = chain_matrix(chains, name)
        constant = _is_constant(matrix)
        value = rhat(chains, name) if len(chains) >= 2 else float("nan")
        warn = bool(np.isfinite(value) and value > RHAT_WARNING_THRESHOLD)
        if warn:
            logger.warning("%s의 R-hat이 %.3f 로 %.2f 를 넘습니다.", name, value, RHAT_WARNING_THRESHOLD)
        rows.append(
            DiagnosticRow(
                name=name,
                rhat=value,
                ess=ess(chains, name),
                constant=constant,
                warning=warn,
            )
        )
    return rows


__all__ = ["RHAT_WARNING_THRESHOLD", "chain_matrix", "rhat", "ess", "diagnose"]
