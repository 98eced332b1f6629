"""
foldnorm-sdk - Folded normal 혼합효과 모형과 경쟁위험 중도탈락 공동모형의 베이지안 추론

Example:
    from foldnorm_sdk import FoldnormClient, ModelSpec, McmcConfig

    client = FoldnormClient(workers=4)
    data = client.dataset.read("cohort.csv", drop_baseline=True)
    spec = ModelSpec.build("D", K=data.K, temporal="grouped:2")
    report = client.inference.fit(data, spec, McmcConfig(seed=7))
    print(report.summary("AD"))
"""

__version__ = "0.3.0rc0"
__author__ = "FoldNorm Team"

from foldnorm_sdk.client import FoldnormClient
from foldnorm_sdk.errors import (
    FoldnormError,
    DomainError,
    ParameterError,
    StructureError,
    DataSchemaError,
    SamplerInitError,
    StudyInvalidError,
)
from foldnorm_sdk.schema import (
    ExposureGroup,
    DropoutCause,
    LongitudinalDataset,
    FoldedNormalParams,
    TruncatedNormalParams,
    GammaShapeScale,
    FixedEffects,
    RandomEffects,
    DropoutParams,
    TemporalSpec,
    ModelVariant,
    ModelSpec,
    ParameterState,
    McmcConfig,
    ScenarioConfig,
    StudyConfig,
    FitReport,
    StudyResult,
)
from foldnorm_sdk.inference.namespace import InferenceNamespace
from foldnorm_sdk.simulation.namespace import SimulationNamespace
from foldnorm_sdk.dataset.namespace import DatasetNamespace

__all__ = [
    "FoldnormClient",
    "FoldnormError",
    "DomainError",
    "ParameterError",
    "StructureError",
    "DataSchemaError",
    "SamplerInitError",
    "StudyInvalidError",
    "ExposureGroup",
    "DropoutCause",
    "LongitudinalDataset",
    "FoldedNormalParams",
    "TruncatedNormalParams",
    "GammaShapeScale",
    "FixedEffects",
    "RandomEffects",
    "DropoutParams",
    "TemporalSpec",
    "ModelVariant",
    "ModelSpec",
    "ParameterState",
    "McmcConfig",
    "ScenarioConfig",
    "StudyConfig",
    "FitReport",
    "StudyResult",
    "InferenceNamespace",
    "SimulationNamespace",
    "DatasetNamespace",
]
