"""Cycle-aware error metrics.

All dataset-level quantities average per cycle first and over cycles
second, so every cycle carries the same weight regardless of its length:

    MSE = (1/N) sum_i (1/T_i) sum_t (y_i(t) - yhat_i(t))^2

MAE uses the same two-level scheme with absolute errors.  The normalized
MSE divides by the two-level variance of the targets about their global
(two-level) mean, and R^2 = 1 - NMSE identically, which is why the two
always sum to one in the reports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TargetMetrics:
    target: str
    mse: float
    nmse: float
    mae: float
    r_squared: float


@dataclass(frozen=True)
class MetricsReport:
    """Per-target rows plus the across-target average, with the
    per-cycle MSE breakdown retained."""

    per_target: tuple[TargetMetrics, ...]
    mean: TargetMetrics
    cycle_ids: tuple[int, ...]
    per_cycle_mse: dict[str, tuple[float, ...]]

    def by_target(self, name: str) -> TargetMetrics:
        if name == "mean":
            return self.mean
        for row in self.per_target:
            if row.target == name:
                return row
        raise KeyError(f"no metrics for target '{name}'")

    @property
    def rows(self) -> tuple[TargetMetrics, ...]:
        return (*self.per_target, self.mean)


def _ratio(mse: float, var: float) -> float:
    if var == 0.0:
        return 0.0 if mse == 0.0 else float("inf")
    return mse / var


def mse_metrics(
    cycle_ids,
    predictions: list[np.ndarray],
    targets: list[np.ndarray],
    target_names: tuple[str, ...],
) -> MetricsReport:
    """Two-level metrics over aligned per-cycle predictions/targets."""
    if len(predictions) == 0:
        raise ValueError("metrics need at least one cycle")
    if not (len(cycle_ids) == len(predictions) == len(targets)):
        raise ValueError("cycle ids, predictions and targets must align")
    d_y = len(target_names)
    cyc_se = np.empty((len(predictions), d_y))
    cyc_ae = np.empty_like(cyc_se)
    cyc_y_mean = np.empty_like(cyc_se)
    for i, (pred, targ) in enumerate(zip(predictions, targets)):
        pred = np.asarray(pred, dtype=float)
        targ = np.asarray(targ, dtype=float)
        if pred.shape != targ.shape or pred.ndim != 2 or pred.shape[1] != d_y:
            raise ValueError(f"cycle {cycle_ids[i]}: prediction/target mismatch")
        if pred.shape[0] == 0:
            raise ValueError(f"cycle {cycle_ids[i]}: no scored time points")
        err = pred - targ
        cyc_se[i] = np.mean(err * err, axis=0)
        cyc_ae[i] = np.mean(np.abs(err), axis=0)
        cyc_y_mean[i] = np.mean(targ, axis=0)

    mse = cyc_se.mean(axis=0)
    mae = cyc_ae.mean(axis=0)
    global_mean = cyc_y_mean.mean(axis=0)
    cyc_var = np.empty_like(cyc_se)
    for i, targ in enumerate(targets):
        dev = np.asarray(targ, dtype=float) - global_mean
        cyc_var[i] = np.mean(dev * dev, axis=0)
    var = cyc_var.mean(axis=0)

    rows = []
    for j, name in enumerate(target_names):
        nmse = _ratio(float(mse[j]), float(var[j]))
        rows.append(
            TargetMetrics(
                target=name,
                mse=float(mse[j]),
                nmse=nmse,
                mae=float(mae[j]),
                r_squared=1.0 - nmse,
            )
        )
    mean_nmse = float(np.mean([r.nmse for r in rows]))
    mean_row = TargetMetrics(
        target="mean",
        mse=float(np.mean([r.mse for r in rows])),
        nmse=mean_nmse,
        mae=float(np.mean([r.mae for r in rows])),
        r_squared=1.0 - mean_nmse,
    )
    return MetricsReport(
        per_target=tuple(rows),
        mean=mean_row,
        cycle_ids=tuple(cycle_ids),
        per_cycle_mse={
            name: tuple(cyc_se[:, j]) for j, name in enumerate(target_names)
        },
    )
