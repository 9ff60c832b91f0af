"""Cycle-level k-fold cross-validation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from agingforecast.bench.runners import DEFAULT_EVAL_START, TrainedModel, evaluate_model
from agingforecast.data.cycles import CycleDataset
from agingforecast.seeding import rng_for


@dataclass(frozen=True)
class CvResult:
    mean_mse: float
    fold_mses: tuple[float, ...]
    fold_cycle_ids: tuple[tuple[int, ...], ...]


def fold_assignment(n_cycles: int, k: int, seed: int) -> list[np.ndarray]:
    """Seeded partition of cycle positions into k near-equal folds."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    if n_cycles < k:
        raise ValueError(f"cannot split {n_cycles} cycles into {k} folds")
    perm = rng_for(seed, "cv-folds").permutation(n_cycles)
    return np.array_split(perm, k)


def kfold_cv(
    dataset: CycleDataset,
    k: int,
    train_fn: Callable[[CycleDataset], TrainedModel],
    seed: int = 0,
    eval_start: int = DEFAULT_EVAL_START,
) -> CvResult:
    """Mean held-out MSE over seeded cycle-level folds.

    Folds partition cycles, never time points; each fold is scored with
    the across-target mean of the two-level MSE.
    """
    ids = dataset.cycle_ids
    folds = fold_assignment(dataset.n_cycles, k, seed)
    fold_mses = []
    fold_ids = []
    for members in folds:
        val_ids = {ids[i] for i in members}
        train_ds = dataset.subset(set(ids) - val_ids)
        val_ds = dataset.subset(val_ids)
        model = train_fn(train_ds)
        report = evaluate_model(model, val_ds, eval_start)
        fold_mses.append(report.mean.mse)
        fold_ids.append(tuple(sorted(val_ids)))
    return CvResult(
        mean_mse=float(np.mean(fold_mses)),
        fold_mses=tuple(fold_mses),
        fold_cycle_ids=tuple(fold_ids),
    )
