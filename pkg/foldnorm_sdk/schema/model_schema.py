"""
모형 모수/사전분포/모형 명세용 Pydantic 모델

결과 모형(folded normal mixed effects), 중도탈락 모형(discrete-time competing risk),
그리고 네 가지 모형 변형(A/B/C/D)을 묶는 ModelSpec을 정의합니다.
"""
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from foldnorm_sdk.errors import ParameterError, StructureError
from foldnorm_sdk.schema.data_schema import ExposureGroup

_common_config = ConfigDict(populate_by_name=True, extra="ignore")

FIXED_EFFECT_NAMES = ("c0", "c1", "d0", "d1")
TAU_NAMES = ("tau_a0", "tau_a1", "tau_b0", "tau_b1")
# tau -> 짝이 되는 고정효과
TAU_BOUND_OF = {"tau_a0": "c0", "tau_a1": "c1", "tau_b0": "d0", "tau_b1": "d1"}


# ---------- 분포 모수 ----------


class FoldedNormalParams(BaseModel):
    """접기 전 정규분포의 (mu, sigma)"""
    model_config = ConfigDict(frozen=True, extra="ignore")
    mu: float
    sigma: float

    @model_validator(mode="after")
    def _check_sigma(self) -> "FoldedNormalParams":
        if not self.sigma > 0:
            raise ParameterError(f"sigma는 0보다 커야 합니다. 입력값={self.sigma}")
        return self


class TruncatedNormalParams(BaseModel):
    """하한 lower에서 절단된 정규분포 TN(lower, zeta, rho2)"""
    model_config = ConfigDict(frozen=True, extra="ignore")
    zeta: float = 0.0
    rho2: float = 100.0
    lower: float = 0.0

    @model_validator(mode="after")
    def _check_rho2(self) -> "TruncatedNormalParams":
        if not self.rho2 > 0:
            raise ParameterError(f"rho2는 0보다 커야 합니다. 입력값={self.rho2}")
        return self


class GammaShapeScale(BaseModel):
    """shape-scale 형태의 Gamma(k, theta). 평균 = k * theta"""
    model_config = ConfigDict(frozen=True, extra="ignore")
    shape: float
    scale: float

    @model_validator(mode="after")
    def _check_positive(self) -> "GammaShapeScale":
        if not (self.shape > 0 and self.scale > 0):
            raise ParameterError(
                f"shape, scale은 모두 0보다 커야 합니다. 입력값 shape={self.shape}, scale={self.scale}"
            )
        return self

    @property
    def mean(self) -> float:
        return self.shape * self.scale


# ---------- 결과 모형 ----------


class FixedEffects(BaseModel):
    """
    고정효과 (c0, c1, d0, d1)와 잔차분산 sigma2

    부호 제약은 사전분포의 지지집합으로 강제되므로 여기서는 검증하지 않는다.
    (제약 위반 상태는 로그 사전밀도 -inf로 표현)
    """
    model_config = _common_config
    c0: float
    c1: float
    d0: float
    d1: float
    sigma2: float = 1.0

    def intercept_slope(self, group: ExposureGroup) -> Tuple[float, float]:
        if group == ExposureGroup.UNEXPOSED:
            return self.c0, self.c1
        return self.d0, self.d1


class RandomEffects(BaseModel):
    """
    대상자 한 명의 랜덤효과 쌍

    비노출(0)이면 (alpha0, alpha1), 노출(1)이면 (beta0, beta1)만 가진다.
    """
    model_config = _common_config
    group: ExposureGroup
    b0: float = 0.0
    b1: float = 0.0

    def _require(self, group: ExposureGroup) -> None:
        if self.group != group:
            raise StructureError(
                f"그룹 {int(self.group)} 대상자에는 그룹 {int(group)}의 랜덤효과가 없습니다."
            )

    @property
    def alpha0(self) -> float:
        self._require(ExposureGroup.UNEXPOSED)
        return self.b0

    @property
    def alpha1(self) -> float:
        self._require(ExposureGroup.UNEXPOSED)
        return self.b1

    @property
    def beta0(self) -> float:
        self._require(ExposureGroup.EXPOSED)
        return self.b0

    @property
    def beta1(self) -> float:
        self._require(ExposureGroup.EXPOSED)
        return self.b1


class VarianceComponents(BaseModel):
    """랜덤효과 분포의 표준편차 4개"""
    model_config = _common_config
    tau_a0: float
    tau_a1: float
    tau_b0: float
    tau_b1: float

    def for_group(self, group: ExposureGroup) -> Tuple[float, float]:
        if group == ExposureGroup.UNEXPOSED:
            return self.tau_a0, self.tau_a1
        return self.tau_b0, self.tau_b1


class OutcomePriorConfig(BaseModel):
    """
    folded 모형 사전분포 설정

    - 고정효과: TN(0, zeta, rho2), per_effect로 효과별 (zeta, rho2) 지정 가능
    - sigma2: IG(sigma2_ig_shape, sigma2_ig_scale)
    - tau: U(0, 짝 고정효과 * omega)
    """
    model_config = _common_config
    zeta: float = 0.0
    rho2: float = Field(default=100.0, gt=0)
    omega: float = Field(default=0.5, gt=0, le=1)
    sigma2_ig_shape: float = Field(default=0.01, gt=0)
    sigma2_ig_scale: float = Field(default=0.01, gt=0)
    per_effect: Dict[str, Tuple[float, float]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_per_effect(self) -> "OutcomePriorConfig":
        for name, (_, rho2) in self.per_effect.items():
            if name not in FIXED_EFFECT_NAMES:
                raise ParameterError(f"알 수 없는 고정효과 이름입니다. 입력값={name}")
            if not rho2 > 0:
                raise ParameterError(f"{name}의 rho2는 0보다 커야 합니다. 입력값={rho2}")
        return self

    def hyper(self, name: str) -> Tuple[float, float]:
        """고정효과 name의 (zeta, rho2)"""
        return self.per_effect.get(name, (self.zeta, self.rho2))


class ReferencePriorConfig(BaseModel):
    """선형(정규) 참조 모형의 사전분포: N(mean, var), tau ~ U(0, tau_upper), sigma2 ~ IG"""
    model_config = _common_config
    mean: float = 0.0
    var: float = Field(default=100.0, gt=0)
    tau_upper: float = Field(default=10.0, gt=0)
    sigma2_ig_shape: float = Field(default=0.01, gt=0)
    sigma2_ig_scale: float = Field(default=0.01, gt=0)


# ---------- 중도탈락 모형 ----------


class DropoutPriorConfig(BaseModel):
    """로짓 척도 중도탈락 계수의 독립 N(0, sd^2) 사전분포"""
    model_config = _common_config
    sd: float = Field(default=10.0, gt=0)


class TemporalKind(str, Enum):
    """시간 함수 종류"""
    LINEAR = "linear"
    FLEXIBLE = "flexible"
    GROUPED = "grouped"


class TemporalSpec(BaseModel):
    """
    위험함수의 시간 성분 명세

    - linear: q0 + q1 * t (계수 2개)
    - flexible: 시점마다 계수 1개 (K-1개)
    - grouped: group_size개 시점을 한 묶음으로, 나머지 시점은 마지막 묶음에 합류
    """
    model_config = ConfigDict(frozen=True, extra="ignore", use_enum_values=False)
    kind: TemporalKind = TemporalKind.LINEAR
    group_size: int = Field(default=2, ge=1)

    @classmethod
    def parse(cls, text: str) -> "TemporalSpec":
        """'linear' | 'flexible' | 'grouped' | 'grouped:N' 문자열을 해석"""
        head, _, tail = text.strip().lower().partition(":")
        try:
            kind = TemporalKind(head)
        except ValueError:
            raise StructureError(f"알 수 없는 시간 함수 종류입니다. 입력값={text}") from None
        if tail:
            if kind != TemporalKind.GROUPED or not tail.isdigit() or int(tail) < 1:
                raise StructureError(f"묶음 크기 지정이 잘못되었습니다. 입력값={text}")
            return cls(kind=kind, group_size=int(tail))
        return cls(kind=kind)

    @property
    def label(self) -> str:
        if self.kind == TemporalKind.GROUPED:
            return f"grouped:{self.group_size}"
        return self.kind.value

    def n_coefficients(self, K: int) -> int:
        if self.kind == TemporalKind.LINEAR:
            return 2
        if self.kind == TemporalKind.FLEXIBLE:
            return max(K - 1, 1)
        return max(1, (K - 1) // self.group_size)

    def bucket(self, t: int, K: int) -> int:
        """flexible/grouped에서 시점 t가 속한 계수 인덱스"""
        if self.kind == TemporalKind.FLEXIBLE:
            return t
        if self.kind == TemporalKind.GROUPED:
            return min(t // self.group_size, self.n_coefficients(K) - 1)
        raise StructureError("linear 시간 함수에는 묶음이 없습니다.")


class DropoutParams(BaseModel):
    """
    중도탈락 계수 (로짓 척도)

    - q[g], v[g]: 원인 1(회복형), 원인 2(사망형)의 그룹별 시간 계수
    - p[g][j], u[g][j]: 그룹 g의 랜덤효과 j(0=절편, 1=기울기)와의 연관 계수
    """
    model_config = _common_config
    q: List[List[float]]
    v: List[List[float]]
    p: List[List[float]] = Field(default_factory=lambda: [[0.0, 0.0], [0.0, 0.0]])
    u: List[List[float]] = Field(default_factory=lambda: [[0.0, 0.0], [0.0, 0.0]])

    @model_validator(mode="after")
    def _check_shapes(self) -> "DropoutParams":
        for name in ("q", "v", "p", "u"):
            rows = getattr(self, name)
            if len(rows) != 2:
                raise StructureError(f"{name}는 그룹 2개 분량이어야 합니다. 입력값 길이={len(rows)}")
        n_coef = len(self.q[0])
        if n_coef < 1 or any(len(row) != n_coef for row in self.q + self.v):
            raise StructureError("q, v의 그룹별 계수 개수가 서로 다릅니다.")
        if any(len(row) != 2 for row in self.p + self.u):
            raise StructureError("p, u는 2x2 여야 합니다.")
        return self

    @property
    def n_coefficients(self) -> int:
        return len(self.q[0])

    @classmethod
    def zeros(cls, n_coefficients: int) -> "DropoutParams":
        return cls(
            q=[[0.0] * n_coefficients for _ in range(2)],
            v=[[0.0] * n_coefficients for _ in range(2)],
        )

    @staticmethod
    def parameter_names(n_coefficients: int) -> List[str]:
        """to_vector 순서와 같은 모니터링 이름"""
        names = []
        for prefix in ("q", "v"):
            for g in range(2):
                names.extend(f"{prefix}{g}_{j}" for j in range(n_coefficients))
        for prefix in ("p", "u"):
            names.extend(f"{prefix}{g}{j}" for g in range(2) for j in range(2))
        return names

    def to_vector(self) -> List[float]:
        """[q g0, q g1, v g0, v g1, p00, p01, p10, p11, u00, u01, u10, u11]"""
        out: List[float] = []
        for rows in (self.q, self.v):
            for row in rows:
                out.extend(row)
        for rows in (self.p, self.u):
            for row in rows:
                out.extend(row)
        return out

    @classmethod
    def from_vector(cls, values, n_coefficients: int) -> "DropoutParams":
        values = [float(x) for x in values]
        expected = 4 * n_coefficients + 8
        if len(values) != expected:
            raise StructureError(
                f"중도탈락 계수 벡터 길이가 맞지 않습니다. 기대={expected}, 입력값={len(values)}"
            )
        n = n_coefficients
        chunks = [values[i * n:(i + 1) * n] for i in range(4)]
        tail = values[4 * n:]
        return cls(
            q=[chunks[0], chunks[1]],
            v=[chunks[2], chunks[3]],
            p=[tail[0:2], tail[2:4]],
            u=[tail[4:6], tail[6:8]],
        )


# ---------- 모형 명세 ----------


class ModelVariant(str, Enum):
    """네 가지 모형 변형"""
    LINEAR_REFERENCE = "A"
    FOLDED_MIXED = "B"
    JOINT_LINEAR = "C"
    JOINT_FLEXIBLE = "D"

    @classmethod
    def from_label(cls, label: str) -> "ModelVariant":
        """A-D 또는 시뮬레이션 연구 라벨(L, F, I, II, III)을 변형으로 변환"""
        key = label.strip().upper()
        if key in _VARIANT_ALIASES:
            return _VARIANT_ALIASES[key]
        raise StructureError(f"알 수 없는 모형 라벨입니다. 입력값={label}")

    @property
    def is_joint(self) -> bool:
        return self in (ModelVariant.JOINT_LINEAR, ModelVariant.JOINT_FLEXIBLE)

    @property
    def is_folded(self) -> bool:
        return self != ModelVariant.LINEAR_REFERENCE


_VARIANT_ALIASES = {
    "A": ModelVariant.LINEAR_REFERENCE,
    "L": ModelVariant.LINEAR_REFERENCE,
    "B": ModelVariant.FOLDED_MIXED,
    "F": ModelVariant.FOLDED_MIXED,
    "I": ModelVariant.FOLDED_MIXED,
    "C": ModelVariant.JOINT_LINEAR,
    "II": ModelVariant.JOINT_LINEAR,
    "D": ModelVariant.JOINT_FLEXIBLE,
    "III": ModelVariant.JOINT_FLEXIBLE,
}


class ModelSpec(BaseModel):
    """
    모형 변형 + 시점 수 K + 사전분포 설정 + (결합 모형일 때만) 시간 함수

    사용 예:
        spec = ModelSpec.build("D", K=9, temporal="grouped:2")
    """
    model_config = _common_config
    variant: ModelVariant
    K: int = Field(ge=1)
    outcome_prior: OutcomePriorConfig = Field(default_factory=OutcomePriorConfig)
    reference_prior: ReferencePriorConfig = Field(default_factory=ReferencePriorConfig)
    dropout_prior: DropoutPriorConfig = Field(default_factory=DropoutPriorConfig)
    temporal: Optional[TemporalSpec] = None

    @model_validator(mode="after")
    def _check_temporal(self) -> "ModelSpec":
        if self.variant.is_joint and self.temporal is None:
            raise StructureError(f"결합 모형({self.variant.value})에는 시간 함수가 필요합니다.")
        if not self.variant.is_joint and self.temporal is not None:
            raise StructureError(f"모형 {self.variant.value}에는 시간 함수를 지정할 수 없습니다.")
        if self.variant == ModelVariant.JOINT_LINEAR and self.temporal.kind != TemporalKind.LINEAR:
            raise StructureError("모형 C는 linear 시간 함수만 허용합니다.")
        if self.variant == ModelVariant.JOINT_FLEXIBLE and self.temporal.kind == TemporalKind.LINEAR:
            raise StructureError("모형 D는 flexible 또는 grouped 시간 함수를 사용해야 합니다.")
        return self

    @classmethod
    def build(
            cls,
            variant,
            K: int,
            temporal=None,
            outcome_prior: Optional[OutcomePriorConfig] = None,
            reference_prior: Optional[ReferencePriorConfig] = None,
            dropout_prior: Optional[DropoutPriorConfig] = None,
    ) -> "ModelSpec":
        """
        라벨/문자열 입력을 받아 ModelSpec 생성

        temporal이 None이면 변형에 맞는 기본값(C: linear, D: flexible)을 사용한다.
        """
        if not isinstance(variant, ModelVariant):
            variant = ModelVariant.from_label(str(variant))
        if isinstance(temporal, str):
            temporal = TemporalSpec.parse(temporal)
        if variant.is_joint and temporal is None:
            kind = TemporalKind.LINEAR if variant == ModelVariant.JOINT_LINEAR else TemporalKind.FLEXIBLE
            temporal = TemporalSpec(kind=kind)
        if not variant.is_joint:
            temporal = None
        return cls(
            variant=variant,
            K=K,
            temporal=temporal,
            outcome_prior=outcome_prior or OutcomePriorConfig(),
            reference_prior=reference_prior or ReferencePriorConfig(),
            dropout_prior=dropout_prior or DropoutPriorConfig(),
        )

    @property
    def n_dropout_coefficients(self) -> int:
        return self.temporal.n_coefficients(self.K) if self.temporal else 0


class ParameterState(BaseModel):
    """
    모수 공간의 한 점

    random_effects는 자료의 대상자 순서와 같다.
    """
    model_config = _common_config
    fixed: FixedEffects
    variance: VarianceComponents
    random_effects: List[RandomEffects]
    dropout: Optional[DropoutParams] = None


__all__ = [
    "FIXED_EFFECT_NAMES",
    "TAU_NAMES",
    "TAU_BOUND_OF",
    "FoldedNormalParams",
    "TruncatedNormalParams",
    "GammaShapeScale",
    "FixedEffects",
    "RandomEffects",
    "VarianceComponents",
    "OutcomePriorConfig",
    "ReferencePriorConfig",
    "DropoutPriorConfig",
    "TemporalKind",
    "TemporalSpec",
    "DropoutParams",
    "ModelVariant",
    "ModelSpec",
    "ParameterState",
]
