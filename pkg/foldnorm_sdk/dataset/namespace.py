"""
Dataset 네임스페이스 - FoldnormClient와 함께 사용
"""
from typing import TYPE_CHECKING, Optional

import pandas as pd

from foldnorm_sdk.dataset.io import (
    dropout_table,
    read_dataset_csv,
    write_dataset_csv,
    write_truth_json,
)
from foldnorm_sdk.schema.data_schema import LongitudinalDataset
from foldnorm_sdk.schema.result_schema import SimulationTruth

if TYPE_CHECKING:
    from foldnorm_sdk.client import FoldnormClient


class DatasetNamespace:
    """
    client.dataset 네임스페이스.

    Example:
        data = client.dataset.read("cohort.csv", drop_baseline=True)
        print(client.dataset.dropout_table(data))
    """

    def __init__(self, client: "FoldnormClient"):
        self._client = client

    def read(self, path, K: Optional[int] = None, drop_baseline: bool = False) -> LongitudinalDataset:
        return read_dataset_csv(path, K=K, drop_baseline=drop_baseline)

    def write(self, dataset: LongitudinalDataset, path, truth: Optional[SimulationTruth] = None) -> None:
        """자료 CSV 저장. truth가 있으면 같은 위치에 truth.json도 저장"""
        path = write_dataset_csv(dataset, path)
        if truth is not None:
            write_truth_json(truth, path.with_name("truth.json"))

    def dropout_table(self, dataset: LongitudinalDataset) -> pd.DataFrame:
        return dropout_table(dataset)


__all__ = ["DatasetNamespace"]
