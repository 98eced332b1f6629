"""
SDK 예외 계층

ValueError를 상속하지 않는다. pydantic validator 안에서 던져도
ValidationError로 감싸지지 않고 그대로 전파된다.
"""
from typing import Optional


class FoldnormError(Exception):
    """foldnorm-sdk 예외의 최상위 클래스"""


class DomainError(FoldnormError):
    """커널의 정의역 밖 입력 (z < 0, 위험 구간 밖의 t 등)"""


class ParameterError(FoldnormError):
    """분포/모형 모수가 유효하지 않음 (sigma <= 0, tau <= 0, shape <= 0 등)"""


class StructureError(FoldnormError):
    """구조 불일치 (그룹-랜덤효과 불일치, 관측 없음, 중도탈락 기록 모순, 상태 차원 불일치)"""


class DataSchemaError(StructureError):
    """입력 CSV 스키마 위반. 행/열 진단 정보를 담는다."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"row={row}")
        if column is not None:
            location.append(f"column={column}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class SamplerInitError(FoldnormError):
    """재초기화를 반복해도 초기 로그 사후밀도가 유한하지 않음"""


class StudyInvalidError(FoldnormError):
    """시뮬레이션 연구 셀의 실패 비율이 허용치(1%)를 넘음"""


__all__ = [
    "FoldnormError",
    "DomainError",
    "ParameterError",
    "StructureError",
    "DataSchemaError",
    "SamplerInitError",
    "StudyInvalidError",
]
