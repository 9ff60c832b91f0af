"""Cycle and CycleDataset containers.

A cycle is the span between two maintenance events: a time-indexed input
matrix of process conditions and a target matrix of degradation KPIs,
sampled hourly.  Datasets are ordered collections of cycles sharing one
column schema.  Both are immutable after construction (backing arrays are
marked read-only), so they are safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

import numpy as np

# Synthetic dataset schema (CSV-layer units).
SYNTHETIC_INPUT_COLUMNS = ("p_mbar", "T_C", "F_kgph", "mu_olef_pct", "mu_O2_pct", "t")
SYNTHETIC_TARGET_COLUMNS = ("C_pct", "S_pct")

# Real-world raw sensor schema and the engineered model inputs.
REALWORLD_RAW_INPUT_COLUMNS = ("T", "F_R", "F_AIR", "F_FRESH")
REALWORLD_RAW_TARGET_COLUMNS = ("PD",)
REALWORLD_ENGINEERED_INPUT_COLUMNS = (
    "T",
    "F_R",
    "F_AIR",
    "cycle_no",
    "t_react",
    "last_PD",
    "reactant_frac",   # F_R / (F_R + F_AIR)
    "fresh_frac",      # F_FRESH / F_R
    "F_CUM_CYCLE",
    "F_CUM_CAT",
)

COLUMN_UNITS = {
    "p_mbar": "mbar",
    "T_C": "degC",
    "F_kgph": "kg/h",
    "mu_olef_pct": "%",
    "mu_O2_pct": "%",
    "t": "h",
    "C_pct": "%",
    "S_pct": "%",
    "T": "degC",
    "F_R": "kg/h",
    "F_AIR": "kg/h",
    "F_FRESH": "kg/h",
    "cycle_no": "-",
    "t_react": "h",
    "last_PD": "mbar",
    "reactant_frac": "-",
    "fresh_frac": "-",
    "F_CUM_CYCLE": "kg",
    "F_CUM_CAT": "kg",
    "PD": "mbar",
}


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {arr.shape}")
    if np.isnan(arr).any():
        raise ValueError(f"{name} contains NaN")
    if arr.flags.writeable:
        arr = arr.copy()
        arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Cycle:
    """One degradation cycle: hourly inputs and aligned targets.

    ``t0_offset`` is the first evaluable time index (rows before it are
    consumed as lag context and excluded from scoring).
    """

    cycle_id: int
    inputs: np.ndarray
    targets: np.ndarray
    charge_id: int | None = None
    t0_offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "inputs", _frozen_array(self.inputs, "inputs"))
        object.__setattr__(self, "targets", _frozen_array(self.targets, "targets"))
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ValueError(
                f"cycle {self.cycle_id}: inputs ({self.inputs.shape[0]} rows) and "
                f"targets ({self.targets.shape[0]} rows) disagree"
            )
        if self.inputs.shape[0] < 1:
            raise ValueError(f"cycle {self.cycle_id} is empty")
        if not 0 <= self.t0_offset <= self.length:
            raise ValueError(f"cycle {self.cycle_id}: bad t0_offset {self.t0_offset}")

    @property
    def length(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class CycleDataset:
    """Ordered cycles plus the shared input/target column schema."""

    cycles: tuple[Cycle, ...]
    input_columns: tuple[str, ...]
    target_columns: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "cycles", tuple(self.cycles))
        object.__setattr__(self, "input_columns", tuple(self.input_columns))
        object.__setattr__(self, "target_columns", tuple(self.target_columns))
        d_x, d_y = len(self.input_columns), len(self.target_columns)
        seen = set()
        for cyc in self.cycles:
            if cyc.inputs.shape[1] != d_x or cyc.targets.shape[1] != d_y:
                raise ValueError(
                    f"cycle {cyc.cycle_id} does not match the dataset schema"
                )
            if cyc.cycle_id in seen:
                raise ValueError(f"duplicate cycle id {cyc.cycle_id}")
            seen.add(cyc.cycle_id)

    def __len__(self) -> int:
        return len(self.cycles)

    def __iter__(self) -> Iterator[Cycle]:
        return iter(self.cycles)

    @property
    def n_cycles(self) -> int:
        return len(self.cycles)

    @property
    def total_points(self) -> int:
        return sum(c.length for c in self.cycles)

    @property
    def cycle_ids(self) -> tuple[int, ...]:
        return tuple(c.cycle_id for c in self.cycles)

    def cycle_by_id(self, cycle_id: int) -> Cycle:
        for cyc in self.cycles:
            if cyc.cycle_id == cycle_id:
                return cyc
        raise KeyError(f"no cycle with id {cycle_id}")

    def subset(self, ids: Iterable[int]) -> "CycleDataset":
        """Dataset restricted to the given ids, original order preserved."""
        wanted = set(ids)
        unknown = wanted - set(self.cycle_ids)
        if unknown:
            raise KeyError(f"unknown cycle ids: {sorted(unknown)}")
        return replace(
            self, cycles=tuple(c for c in self.cycles if c.cycle_id in wanted)
        )

    def stacked_inputs(self) -> np.ndarray:
        return np.concatenate([c.inputs for c in self.cycles], axis=0)

    def stacked_targets(self) -> np.ndarray:
        return np.concatenate([c.targets for c in self.cycles], axis=0)

    def with_inputs(self, new_inputs: list[np.ndarray]) -> "CycleDataset":
        """Same shape/ids/targets, replaced input matrices."""
        if len(new_inputs) != len(self.cycles):
            raise ValueError("one input matrix per cycle required")
        cycles = tuple(
            replace(c, inputs=arr) for c, arr in zip(self.cycles, new_inputs)
        )
        return replace(self, cycles=cycles)

    def schema_hash(self) -> str:
        import hashlib

        text = "|".join(self.input_columns) + "->" + "|".join(self.target_columns)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
