"""Feature engineering for the real-world pressure-drop dataset.

Raw cycles carry the four sensor channels (T, F_R, F_AIR, F_FRESH) and
the pressure drop PD as target.  The pipeline derives the six additional
model inputs:

* ``cycle_no``      -- the cycle id (cycles are ordered chronologically)
* ``t_react``       -- hours since cycle start
* ``last_PD``       -- final PD of the previous cycle; the very first
                       cycle falls back to its own first PD reading
* ``reactant_frac`` -- F_R / (F_R + F_AIR)
* ``fresh_frac``    -- F_FRESH / F_R
* ``F_CUM_CYCLE``   -- hourly cumulative F_R within the running cycle
* ``F_CUM_CAT``     -- cumulative F_R over the catalyst lifetime,
                       reset whenever the charge id changes

F_FRESH itself is not used as a model input, only through fresh_frac.
Cumulative sums are plain hourly rectangle sums (rate times 1 h).
"""

from __future__ import annotations

import numpy as np

from agingforecast.data.cycles import (
    Cycle,
    CycleDataset,
    REALWORLD_ENGINEERED_INPUT_COLUMNS,
    REALWORLD_RAW_INPUT_COLUMNS,
    REALWORLD_RAW_TARGET_COLUMNS,
)
from agingforecast.errors import IngestionError


def engineer_features_realworld(raw: CycleDataset) -> CycleDataset:
    """Build the 10-feature model dataset from raw sensor cycles."""
    for col in REALWORLD_RAW_INPUT_COLUMNS:
        if col not in raw.input_columns:
            raise IngestionError(f"raw dataset is missing column '{col}'")
    if raw.target_columns != REALWORLD_RAW_TARGET_COLUMNS:
        raise IngestionError("raw dataset must have PD as its only target")

    idx = {c: raw.input_columns.index(c) for c in REALWORLD_RAW_INPUT_COLUMNS}
    cycles = []
    prev_final_pd = None
    cum_cat = 0.0
    prev_charge = None

    for cyc in raw:
        t = cyc.inputs[:, idx["T"]]
        f_r = cyc.inputs[:, idx["F_R"]]
        f_air = cyc.inputs[:, idx["F_AIR"]]
        f_fresh = cyc.inputs[:, idx["F_FRESH"]]
        pd = cyc.targets[:, 0]

        denom = f_r + f_air
        for row in np.flatnonzero(denom == 0.0):
            raise IngestionError(
                f"cycle {cyc.cycle_id}, row {row}: F_R + F_AIR is zero"
            )
        for row in np.flatnonzero(f_r == 0.0):
            raise IngestionError(f"cycle {cyc.cycle_id}, row {row}: F_R is zero")

        if cyc.charge_id != prev_charge:
            cum_cat = 0.0
            prev_charge = cyc.charge_id

        cum_cycle = np.cumsum(f_r)
        cum_cat_col = cum_cat + cum_cycle
        cum_cat = float(cum_cat_col[-1])

        last_pd = prev_final_pd if prev_final_pd is not None else float(pd[0])
        prev_final_pd = float(pd[-1])

        inputs = np.column_stack(
            [
                t,
                f_r,
                f_air,
                np.full(cyc.length, float(cyc.cycle_id)),
                np.arange(cyc.length, dtype=float),
                np.full(cyc.length, last_pd),
                f_r / denom,
                f_fresh / f_r,
                cum_cycle,
                cum_cat_col,
            ]
        )
        cycles.append(
            Cycle(
                cycle_id=cyc.cycle_id,
                inputs=inputs,
                targets=cyc.targets,
                charge_id=cyc.charge_id,
            )
        )

    return CycleDataset(
        cycles=tuple(cycles),
        input_columns=REALWORLD_ENGINEERED_INPUT_COLUMNS,
        target_columns=REALWORLD_RAW_TARGET_COLUMNS,
    )
