"""Cycle-structured dataset containers, I/O and feature pipelines."""

from agingforecast.data.cycles import (
    Cycle,
    CycleDataset,
    REALWORLD_ENGINEERED_INPUT_COLUMNS,
    REALWORLD_RAW_INPUT_COLUMNS,
    REALWORLD_RAW_TARGET_COLUMNS,
    SYNTHETIC_INPUT_COLUMNS,
    SYNTHETIC_TARGET_COLUMNS,
)
from agingforecast.data.csvio import read_csv, write_csv
from agingforecast.data.realworld import engineer_features_realworld
from agingforecast.data.split import SplitSpec, split_by_cycles
from agingforecast.data.transform import (
    Standardizer,
    WindowedView,
    apply_standardizer,
    fit_standardizer,
    window_stack,
)

__all__ = [
    "Cycle",
    "CycleDataset",
    "REALWORLD_ENGINEERED_INPUT_COLUMNS",
    "REALWORLD_RAW_INPUT_COLUMNS",
    "REALWORLD_RAW_TARGET_COLUMNS",
    "SYNTHETIC_INPUT_COLUMNS",
    "SYNTHETIC_TARGET_COLUMNS",
    "read_csv",
    "write_csv",
    "engineer_features_realworld",
    "SplitSpec",
    "split_by_cycles",
    "Standardizer",
    "WindowedView",
    "apply_standardizer",
    "fit_standardizer",
    "window_stack",
]
