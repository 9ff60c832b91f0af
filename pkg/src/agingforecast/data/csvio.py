"""CSV reading and writing for cycle datasets.

Layout: one row per hourly record with a mandatory header.  Columns are
``cycle_id`` (integer), optionally ``charge_id``, the hour counter ``t``,
then the remaining schema columns.  ``t`` may itself be an input feature
(synthetic schema); if it is not part of the schema it is still written
as the within-cycle row index so files stay self-describing.

Floats are written with ``repr`` so a write/read round trip is bit-exact
for finite doubles; decimal separator is ``.``, encoding UTF-8.  NaN
cells, missing columns and non-monotonic ``t`` are ingestion errors that
name the offending row.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from agingforecast.data.cycles import Cycle, CycleDataset
from agingforecast.errors import IngestionError


def _format(value: float) -> str:
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def write_csv(dataset: CycleDataset, path: str | Path) -> None:
    """Write a dataset; see module docstring for the layout."""
    path = Path(path)
    has_charge = any(c.charge_id is not None for c in dataset.cycles)
    t_in_schema = "t" in dataset.input_columns
    other_inputs = [c for c in dataset.input_columns if c != "t"]
    header = (
        ["cycle_id"]
        + (["charge_id"] if has_charge else [])
        + ["t"]
        + other_inputs
        + list(dataset.target_columns)
    )
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for cyc in dataset.cycles:
            t_col = (
                cyc.inputs[:, dataset.input_columns.index("t")]
                if t_in_schema
                else np.arange(cyc.length, dtype=float)
            )
            other_idx = [dataset.input_columns.index(c) for c in other_inputs]
            for row in range(cyc.length):
                cells = [str(cyc.cycle_id)]
                if has_charge:
                    cells.append(str(cyc.charge_id if cyc.charge_id is not None else 0))
                cells.append(_format(t_col[row]))
                cells.extend(_format(cyc.inputs[row, j]) for j in other_idx)
                cells.extend(_format(v) for v in cyc.targets[row])
                writer.writerow(cells)


def read_csv(
    path: str | Path,
    input_columns: tuple[str, ...],
    target_columns: tuple[str, ...],
) -> CycleDataset:
    """Read a dataset with the given schema.

    All schema columns plus ``cycle_id`` and ``t`` must be present;
    ``charge_id`` is picked up when available.
    """
    path = Path(path)
    with path.open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file, header required") from None
        rows = list(reader)

    col_idx = {name: i for i, name in enumerate(header)}
    required = ["cycle_id", "t", *input_columns, *target_columns]
    for name in required:
        if name not in col_idx:
            raise IngestionError(f"{path}: missing column '{name}'")
    has_charge = "charge_id" in col_idx

    def parse(row_no: int, row: list[str], name: str) -> float:
        try:
            value = float(row[col_idx[name]])
        except (ValueError, IndexError):
            raise IngestionError(
                f"{path}: row {row_no}: bad value in column '{name}'"
            ) from None
        if np.isnan(value):
            raise IngestionError(f"{path}: row {row_no}: NaN in column '{name}'")
        return value

    cycles: list[Cycle] = []
    current_id = None
    current_charge = None
    inputs: list[list[float]] = []
    targets: list[list[float]] = []
    last_t = None

    def flush():
        if current_id is not None:
            cycles.append(
                Cycle(
                    cycle_id=current_id,
                    inputs=np.array(inputs, dtype=float),
                    targets=np.array(targets, dtype=float),
                    charge_id=current_charge,
                )
            )

    for row_no, row in enumerate(rows, start=2):  # header is line 1
        cid = int(parse(row_no, row, "cycle_id"))
        t = parse(row_no, row, "t")
        if cid != current_id:
            flush()
            current_id = cid
            current_charge = (
                int(parse(row_no, row, "charge_id")) if has_charge else None
            )
            inputs, targets = [], []
            last_t = None
        if last_t is not None and t <= last_t:
            raise IngestionError(
                f"{path}: row {row_no}: non-monotonic t within cycle {cid}"
            )
        last_t = t
        inputs.append([parse(row_no, row, c) for c in input_columns])
        targets.append([parse(row_no, row, c) for c in target_columns])
    flush()

    return CycleDataset(
        cycles=tuple(cycles),
        input_columns=tuple(input_columns),
        target_columns=tuple(target_columns),
    )
