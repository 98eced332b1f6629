"""
자료/설정 파일 입출력

입력 CSV 헤더 (UTF-8):
    subject_id, exposure, time, z[, dropout_cause]

- time은 0부터 빈틈 없이 증가해야 한다.
- exposure와 dropout_cause는 대상자 안에서 일정해야 한다. dropout_cause는 마지막 행에만 적어도 된다.
- dropout_cause 열이 없거나 비어 있으면 마지막 시점이 K-1 인 대상자만 완료자로 본다.
- 오류 행 번호는 헤더를 1행으로 센 파일 행 번호다.
"""
import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Dict, List, Optional, Type, TypeVar

import numpy as np
import pandas as pd
from pydantic import BaseModel

from foldnorm_sdk.errors import DataSchemaError, StructureError
from foldnorm_sdk.schema.data_schema import (
    DropoutCause,
    DropoutRecord,
    ExposureGroup,
    InputRecordRow,
    LongitudinalDataset,
    Observation,
    SubjectData,
    Z_DECIMALS,
)
from foldnorm_sdk.schema.result_schema import SimulationTruth

logger = logging.getLogger(__name__)

INPUT_COLUMNS = list(InputRecordRow.model_fields)
REQUIRED_COLUMNS = [name for name, field in InputRecordRow.model_fields.items() if field.is_required()]
CAUSE_COLUMN = "dropout_cause"
FLOAT_FORMAT = f"%.{Z_DECIMALS}f"

ConfigT = TypeVar("ConfigT", bound=BaseModel)


# ---------- 설정 ----------


def load_config(path, cls: Type[ConfigT]) -> ConfigT:
    """
    .json / .toml 설정 파일을 cls로 검증해 읽기

    Raises:
        DataSchemaError: 지원하지 않는 확장자
        pydantic.ValidationError: 필드 검증 실패
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".json":
        return cls.model_validate_json(path.read_text(encoding="utf-8"))
    if suffix == ".toml":
        with path.open("rb") as fp:
            return cls.model_validate(tomllib.load(fp))
    raise DataSchemaError(f"설정 파일은 .json 또는 .toml 이어야 합니다. 입력값={path.name}")


# ---------- 자료 읽기 ----------


def _integer_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    values = pd.to_numeric(frame[column], errors="coerce")
    bad = values.isna() | (values != np.round(values))
    if bad.any():
        idx = int(np.flatnonzero(bad.to_numpy())[0])
        raise DataSchemaError(
            f"정수가 아닙니다. 입력값={frame[column].iloc[idx]!r}",
            row=int(frame["_row"].iloc[idx]),
            column=column,
        )
    return values.to_numpy().astype(int)


def _check_allowed(frame: pd.DataFrame, values: np.ndarray, allowed, column: str) -> None:
    bad = ~np.isin(values, list(allowed))
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        raise DataSchemaError(
            f"허용되지 않는 값입니다. 허용={sorted(allowed)}, 입력값={values[idx]}",
            row=int(frame["_row"].iloc[idx]),
            column=column,
        )


def _subject_cause(rows: pd.DataFrame, last_time: int, K: int) -> DropoutCause:
    """대상자 행들에서 중도탈락 사유 결정 (비어 있는 값은 무시)"""
    if CAUSE_COLUMN in rows:
        given = rows[CAUSE_COLUMN].dropna().unique()
        if len(given) > 1:
            raise DataSchemaError(
                f"대상자 안에서 dropout_cause가 일정하지 않습니다. 입력값={sorted(given.tolist())}",
                row=int(rows["_row"].iloc[0]),
                column=CAUSE_COLUMN,
            )
        if len(given) == 1:
            return DropoutCause(int(given[0]))
    if last_time == K - 1:
        return DropoutCause.COMPLETER
    raise DataSchemaError(
        f"마지막 시점이 K-1={K - 1} 보다 앞선 대상자는 dropout_cause가 필요합니다. 입력값 마지막 시점={last_time}",
        row=int(rows["_row"].iloc[-1]),
        column=CAUSE_COLUMN,
    )


def frame_to_dataset(
        frame: pd.DataFrame,
        K: Optional[int] = None,
        drop_baseline: bool = False,
) -> LongitudinalDataset:
    """
    InputRecordRow 형태의 DataFrame -> LongitudinalDataset

    Args:
        K: 측정 시점 수. None이면 (기저시점 제거 후) 최대 time + 1
        drop_baseline: time=0 행을 버리고 나머지 시점을 1씩 당긴다

    Raises:
        DataSchemaError: 열 누락, 형식 오류, 빈틈 있는 시점, 대상자 내 비일관 값
    """
    missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
    if missing:
        raise DataSchemaError(f"필수 열이 없습니다. 입력값={missing}", row=1, column=missing[0])
    frame = frame.copy()
    frame["_row"] = np.arange(len(frame)) + 2
    if frame.empty:
        raise DataSchemaError("자료 행이 없습니다.", row=2)

    frame["subject_id"] = frame["subject_id"].astype(str).str.strip()
    frame["exposure"] = _integer_column(frame, "exposure")
    _check_allowed(frame, frame["exposure"].to_numpy(), {0, 1}, "exposure")
    frame["time"] = _integer_column(frame, "time")
    negative = np.flatnonzero(frame["time"].to_numpy() < 0)
    if negative.size:
        raise DataSchemaError(
            f"time은 0 이상이어야 합니다. 입력값={int(frame['time'].iloc[negative[0]])}",
            row=int(frame["_row"].iloc[negative[0]]),
            column="time",
        )
    z = pd.to_numeric(frame["z"], errors="coerce")
    bad_z = z.isna() | ~np.isfinite(z) | (z < 0)
    if bad_z.any():
        idx = int(np.flatnonzero(bad_z.to_numpy())[0])
        raise DataSchemaError(
            f"z는 0 이상의 유한한 실수여야 합니다. 입력값={frame['z'].iloc[idx]!r}",
            row=int(frame["_row"].iloc[idx]),
            column="z",
        )
    frame["z"] = z.astype(float)
    if CAUSE_COLUMN in frame.columns:
        present = frame[CAUSE_COLUMN].notna() & (frame[CAUSE_COLUMN].astype(str).str.strip() != "")
        causes = pd.Series(np.nan, index=frame.index, dtype=float)
        if present.any():
            sub = frame.loc[present]
            values = _integer_column(sub, CAUSE_COLUMN)
            _check_allowed(sub, values, {0, 1, 2}, CAUSE_COLUMN)
            causes.loc[present] = values
        frame[CAUSE_COLUMN] = causes

    if drop_baseline:
        frame = frame[frame["time"] > 0].copy()
        frame["time"] -= 1
        if frame.empty:
            raise DataSchemaError("기저시점을 제거하면 남는 행이 없습니다.", column="time")
    if K is None:
        K = int(frame["time"].max()) + 1

    subjects: List[SubjectData] = []
    for subject_id, rows in frame.groupby("subject_id", sort=False):
        rows = rows.sort_values("time", kind="stable")
        times = rows["time"].to_numpy()
        expected = np.arange(times.size)
        if not np.array_equal(times, expected):
            idx = int(np.flatnonzero(times != expected)[0])
            raise DataSchemaError(
                f"대상자 {subject_id}: 측정 시점은 0부터 빈틈 없이 증가해야 합니다. 입력값={times.tolist()}",
                row=int(rows["_row"].iloc[idx]),
                column="time",
            )
        if times[-1] > K - 1:
            raise DataSchemaError(
                f"대상자 {subject_id}: 시점이 K-1={K - 1} 을 넘습니다. 입력값={int(times[-1])}",
                row=int(rows["_row"].iloc[-1]),
                column="time",
            )
        exposure = rows["exposure"].unique()
        if exposure.size != 1:
            raise DataSchemaError(
                f"대상자 {subject_id}: exposure가 일정하지 않습니다. 입력값={sorted(exposure.tolist())}",
                row=int(rows["_row"].iloc[0]),
                column="exposure",
            )
        last = int(times[-1])
        cause = _subject_cause(rows, last, K)
        record = DropoutRecord(D=last, delta=cause)
        try:
            record.check(K)
        except StructureError as exc:
            raise DataSchemaError(
                f"대상자 {subject_id}: {exc}", row=int(rows["_row"].iloc[-1]), column=CAUSE_COLUMN
            ) from None
        subjects.append(
            SubjectData(
                id=str(subject_id),
                group=ExposureGroup(int(exposure[0])),
                observations=[
                    Observation(time=int(t), z=float(v)) for t, v in zip(times, rows["z"].to_numpy())
                ],
                dropout=record,
            )
        )
    return LongitudinalDataset(K=K, subjects=subjects)


def read_dataset_csv(path, K: Optional[int] = None, drop_baseline: bool = False) -> LongitudinalDataset:
    """CSV 파일 -> LongitudinalDataset (형식은 모듈 docstring 참고)"""
    try:
        frame = pd.read_csv(
            path,
            dtype={"subject_id": str},
            encoding="utf-8",
            skipinitialspace=True,
            float_precision="round_trip",
        )
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise DataSchemaError(f"CSV를 읽을 수 없습니다: {exc}") from None
    dataset = frame_to_dataset(frame, K=K, drop_baseline=drop_baseline)
    logger.info(
        "자료 읽기 완료: %s (대상자 %d명, 관측 %d개, K=%d)",
        path, dataset.n_subjects, dataset.n_observations, dataset.K,
    )
    return dataset


# ---------- 자료 쓰기 ----------


def dataset_to_frame(dataset: LongitudinalDataset) -> pd.DataFrame:
    """LongitudinalDataset -> InputRecordRow 형태 DataFrame (dropout_cause는 모든 행에 반복)"""
    rows = []
    for subject in dataset.subjects:
        for obs in subject.observations:
            row = InputRecordRow(
                subject_id=subject.id,
                exposure=subject.group,
                time=obs.time,
                z=obs.z,
                dropout_cause=subject.dropout.delta,
            )
            rows.append(row.model_dump(mode="json"))
    return pd.DataFrame(rows, columns=INPUT_COLUMNS)


def write_frame(frame: pd.DataFrame, path) -> Path:
    """고정 소수점(%.10f), UTF-8, LF 줄바꿈 CSV"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    return path


def write_dataset_csv(dataset: LongitudinalDataset, path) -> Path:
    return write_frame(dataset_to_frame(dataset), path)


def write_truth_json(truth: SimulationTruth, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(truth.model_dump(mode="json"), ensure_ascii=False, indent=2), encoding="utf-8")
    return path


def read_truth_json(path) -> SimulationTruth:
    return SimulationTruth.model_validate_json(Path(path).read_text(encoding="utf-8"))


# ---------- 집계표 ----------


def dropout_table(dataset: LongitudinalDataset) -> pd.DataFrame:
    """
    그룹 x 사유별 D 분포 (응용연구 중도탈락 표 형태)

    행: (group, cause) 6개, 열: D=0..K-1 과 total
    """
    counts: Dict[tuple, np.ndarray] = {
        (int(g), int(c)): np.zeros(dataset.K, dtype=int)
        for g in ExposureGroup
        for c in DropoutCause
    }
    for subject in dataset.subjects:
        counts[(int(subject.group), int(subject.dropout.delta))][subject.dropout.D] += 1
    rows = []
    for (group, cause), per_d in counts.items():
        row = {"group": group, "cause": DropoutCause(cause).name.lower()}
        row.update({f"D={d}": int(n) for d, n in enumerate(per_d)})
        row["total"] = int(per_d.sum())
        rows.append(row)
    return pd.DataFrame(rows)


__all__ = [
    "REQUIRED_COLUMNS",
    "CAUSE_COLUMN",
    "load_config",
    "frame_to_dataset",
    "read_dataset_csv",
    "dataset_to_frame",
    "write_frame",
    "write_dataset_csv",
    "write_truth_json",
    "read_truth_json",
    "dropout_table",
]
