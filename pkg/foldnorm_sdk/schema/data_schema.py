"""
종단 자료(longitudinal dataset)용 Pydantic 모델

사용 예:
    from foldnorm_sdk.schema import LongitudinalDataset

    data = LongitudinalDataset.model_validate({"K": 7, "subjects": [...]})
    print(data.n_subjects, data.K)
"""
from enum import IntEnum
from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator

from foldnorm_sdk.errors import StructureError

# 공통 설정: 필드명/alias 모두 허용, 알 수 없는 키는 무시
_common_config = ConfigDict(populate_by_name=True, extra="ignore")

# CSV에 기록하는 z 소수 자릿수. 모의자료 z도 이 자릿수로 반올림해 만든다
Z_DECIMALS = 10


# ---------- Enums ----------


class ExposureGroup(IntEnum):
    """노출 그룹 (x_i)"""
    UNEXPOSED = 0
    EXPOSED = 1


class DropoutCause(IntEnum):
    """중도탈락 사유 (delta)"""
    COMPLETER = 0
    RECOVERY = 1
    DEATH = 2


# ---------- Observation / DropoutRecord ----------


class Observation(BaseModel):
    """측정 시점 t(정수 격자 t_k = k-1)와 크기 결과 z"""
    model_config = ConfigDict(frozen=True, extra="ignore")
    time: int = Field(ge=0)
    z: float = Field(ge=0.0)


class DropoutRecord(BaseModel):
    """마지막 관측 시점 D와 사유 delta"""
    model_config = ConfigDict(frozen=True, extra="ignore", populate_by_name=True)
    D: int = Field(ge=0)
    delta: DropoutCause = DropoutCause.COMPLETER

    def check(self, K: int) -> None:
        """K개 측정 시점에 대해 기록이 모순 없는지 확인"""
        if self.delta == DropoutCause.COMPLETER:
            if self.D != K - 1:
                raise StructureError(
                    f"완료자(delta=0)는 D=K-1 이어야 합니다. 입력값 D={self.D}, K={K}"
                )
        elif self.D > K - 2:
            raise StructureError(
                f"중도탈락(delta={int(self.delta)})은 D <= K-2 이어야 합니다. 입력값 D={self.D}, K={K}"
            )


# ---------- SubjectData ----------


class SubjectData(BaseModel):
    """
    대상자 한 명의 자료

    - observations: t = 0..D 까지 빈틈 없는 관측
    - dropout: 중도탈락 기록, 마지막 관측 시점과 D가 같아야 함
    """
    model_config = _common_config
    id: str
    group: ExposureGroup
    observations: List[Observation]
    dropout: DropoutRecord

    @model_validator(mode="after")
    def _check_observations(self) -> "SubjectData":
        if not self.observations:
            raise StructureError(f"대상자 {self.id}: 관측이 최소 1개 필요합니다.")
        times = [obs.time for obs in self.observations]
        if times != list(range(len(times))):
            raise StructureError(
                f"대상자 {self.id}: 측정 시점은 0부터 빈틈 없이 증가해야 합니다. 입력값={times}"
            )
        if times[-1] != self.dropout.D:
            raise StructureError(
                f"대상자 {self.id}: 마지막 관측 시점({times[-1]})과 D({self.dropout.D})가 다릅니다."
            )
        return self

    @property
    def times(self) -> List[int]:
        return [obs.time for obs in self.observations]

    @property
    def values(self) -> List[float]:
        return [obs.z for obs in self.observations]


# ---------- LongitudinalDataset ----------


class LongitudinalDataset(BaseModel):
    """K개 측정 시점을 공유하는 대상자 모음"""
    model_config = _common_config
    K: int = Field(ge=1)
    subjects: List[SubjectData]

    @model_validator(mode="after")
    def _check_records(self) -> "LongitudinalDataset":
        if not self.subjects:
            raise StructureError("대상자가 최소 1명 필요합니다.")
        seen = set()
        for subject in self.subjects:
            if subject.id in seen:
                raise StructureError(f"대상자 id가 중복됩니다: {subject.id}")
            seen.add(subject.id)
            subject.dropout.check(self.K)
        return self

    @property
    def n_subjects(self) -> int:
        return len(self.subjects)

    @property
    def n_observations(self) -> int:
        return sum(len(s.observations) for s in self.subjects)

    def group_counts(self) -> dict:
        counts = {ExposureGroup.UNEXPOSED: 0, ExposureGroup.EXPOSED: 0}
        for subject in self.subjects:
            counts[subject.group] += 1
        return counts


class InputRecordRow(BaseModel):
    """CSV 한 행 (subject_id, exposure, time, z, dropout_cause)"""
    model_config = _common_config
    subject_id: str
    exposure: ExposureGroup
    time: int = Field(ge=0)
    z: float = Field(ge=0.0)
    dropout_cause: DropoutCause | None = None


__all__ = [
    "Z_DECIMALS",
    "ExposureGroup",
    "DropoutCause",
    "Observation",
    "DropoutRecord",
    "SubjectData",
    "LongitudinalDataset",
    "InputRecordRow",
]
