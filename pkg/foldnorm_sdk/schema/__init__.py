"""
자료/모형/설정/결과 DTO
"""
from .data_schema import (
    ExposureGroup,
    DropoutCause,
    Observation,
    DropoutRecord,
    SubjectData,
    LongitudinalDataset,
    InputRecordRow,
)
from .model_schema import (
    FIXED_EFFECT_NAMES,
    TAU_NAMES,
    TAU_BOUND_OF,
    FoldedNormalParams,
    TruncatedNormalParams,
    GammaShapeScale,
    FixedEffects,
    RandomEffects,
    VarianceComponents,
    OutcomePriorConfig,
    ReferencePriorConfig,
    DropoutPriorConfig,
    TemporalKind,
    TemporalSpec,
    DropoutParams,
    ModelVariant,
    ModelSpec,
    ParameterState,
)
from .config_schema import (
    DEFAULT_SEED,
    env_default_seed,
    env_default_workers,
    McmcConfig,
    ScenarioConfig,
    StudyGrid,
    StudyConfig,
    RunConfig,
    SimulateConfig,
)
from .result_schema import (
    ChainOutput,
    PosteriorSummary,
    DiagnosticRow,
    FitReport,
    SimulationTruth,
    RunRecord,
    StudyRow,
    StudyResult,
)

__all__ = [
    "ExposureGroup",
    "DropoutCause",
    "Observation",
    "DropoutRecord",
    "SubjectData",
    "LongitudinalDataset",
    "InputRecordRow",
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
    "DEFAULT_SEED",
    "env_default_seed",
    "env_default_workers",
    "McmcConfig",
    "ScenarioConfig",
    "StudyGrid",
    "StudyConfig",
    "RunConfig",
    "SimulateConfig",
    "ChainOutput",
    "PosteriorSummary",
    "DiagnosticRow",
    "FitReport",
    "SimulationTruth",
    "RunRecord",
    "StudyRow",
    "StudyResult",
]
