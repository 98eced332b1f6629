"""
CSV 자료, 설정 파일, 결과 표 입출력
"""
from .io import (
    REQUIRED_COLUMNS,
    CAUSE_COLUMN,
    load_config,
    frame_to_dataset,
    read_dataset_csv,
    dataset_to_frame,
    write_frame,
    write_dataset_csv,
    write_truth_json,
    read_truth_json,
    dropout_table,
)
from .namespace import DatasetNamespace

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
    "DatasetNamespace",
]
