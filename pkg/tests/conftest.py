"""
공통 fixture: 작은 종단 자료, 고정 시드 RNG, 모형 상태
"""
from typing import List, Optional

import numpy as np
import pytest

from foldnorm_sdk.schema import (
    DropoutCause,
    DropoutParams,
    DropoutRecord,
    ExposureGroup,
    FixedEffects,
    LongitudinalDataset,
    Observation,
    ParameterState,
    RandomEffects,
    SubjectData,
)
from foldnorm_sdk.schema.model_schema import VarianceComponents


def make_subject(
        sid: str,
        group: int,
        values: List[float],
        delta: int = 0,
) -> SubjectData:
    return SubjectData(
        id=sid,
        group=ExposureGroup(group),
        observations=[Observation(time=t, z=z) for t, z in enumerate(values)],
        dropout=DropoutRecord(D=len(values) - 1, delta=DropoutCause(delta)),
    )


def make_state(
        data: LongitudinalDataset,
        b: Optional[np.ndarray] = None,
        dropout: Optional[DropoutParams] = None,
) -> ParameterState:
    b = np.zeros((data.n_subjects, 2)) if b is None else b
    return ParameterState(
        fixed=FixedEffects(c0=0.15, c1=0.015, d0=0.08, d1=0.005, sigma2=0.06 ** 2),
        variance=VarianceComponents(tau_a0=0.05, tau_a1=0.005, tau_b0=0.03, tau_b1=0.002),
        random_effects=[
            RandomEffects(group=s.group, b0=float(b[i, 0]), b1=float(b[i, 1]))
            for i, s in enumerate(data.subjects)
        ],
        dropout=dropout,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture
def tiny_dataset() -> LongitudinalDataset:
    """K=3, 그룹별 2명, 완전자료"""
    return LongitudinalDataset(
        K=3,
        subjects=[
            make_subject("a1", 0, [0.14, 0.17, 0.18]),
            make_subject("a2", 0, [0.16, 0.16, 0.19]),
            make_subject("b1", 1, [0.07, 0.09, 0.08]),
            make_subject("b2", 1, [0.09, 0.08, 0.10]),
        ],
    )


@pytest.fixture
def dropout_dataset() -> LongitudinalDataset:
    """K=4, 완료자/회복형/사망형 중도탈락이 섞인 6명"""
    return LongitudinalDataset(
        K=4,
        subjects=[
            make_subject("s1", 0, [0.15, 0.16, 0.18, 0.19]),
            make_subject("s2", 0, [0.12, 0.14], delta=1),
            make_subject("s3", 0, [0.20], delta=2),
            make_subject("s4", 1, [0.08, 0.09, 0.09, 0.10]),
            make_subject("s5", 1, [0.07, 0.08, 0.08], delta=1),
            make_subject("s6", 1, [0.10, 0.12], delta=2),
        ],
    )
