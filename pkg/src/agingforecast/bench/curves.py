"""Learning curves: train on nested subsets, test on one fixed split."""

from __future__ import annotations

from dataclasses import dataclass

from agingforecast.bench.runners import (
    DEFAULT_EVAL_START,
    evaluate_model,
    train_model,
)
from agingforecast.data.cycles import CycleDataset
from agingforecast.data.split import SplitSpec, split_by_cycles
from agingforecast.seeding import rng_for


@dataclass(frozen=True)
class CurvePoint:
    model: str
    fraction: float
    split: str
    target: str
    metric: str
    value: float


def _report_points(model: str, fraction: float, split: str, report) -> list[CurvePoint]:
    points = []
    for row in report.rows:
        for metric, value in (
            ("mse", row.mse),
            ("nmse", row.nmse),
            ("mae", row.mae),
            ("r2", row.r_squared),
        ):
            points.append(
                CurvePoint(model, fraction, split, row.target, metric, value)
            )
    return points


def learning_curve(
    dataset: CycleDataset,
    fractions,
    kinds,
    split_spec: SplitSpec,
    seed: int = 0,
    eval_start: int = DEFAULT_EVAL_START,
    hyperparams: dict | None = None,
) -> list[CurvePoint]:
    """Train every kind on nested training subsets; the held-out test
    set is identical across fractions.

    Subsets are prefixes of one seeded permutation of the training
    cycles, so smaller fractions are strict subsets of larger ones and
    fraction 1.0 reproduces the plain train/test experiment.  Training
    seeds depend only on (seed, kind), not on the fraction.
    """
    fractions = sorted(set(float(f) for f in fractions))
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise ValueError("fractions must lie in (0, 1]")
    hyperparams = hyperparams or {}
    train_full, test = split_by_cycles(dataset, split_spec)
    order = rng_for(seed, "learning-curve").permutation(train_full.n_cycles)
    train_ids = train_full.cycle_ids

    points: list[CurvePoint] = []
    for fraction in fractions:
        n = int(round(fraction * train_full.n_cycles))
        if n == 0:
            raise ValueError(f"fraction {fraction} yields zero training cycles")
        subset = train_full.subset({train_ids[i] for i in order[:n]})
        for kind in kinds:
            kind_seed = int(rng_for(seed, "train", kind).integers(0, 2**63 - 1))
            model = train_model(
                kind, subset, hyperparams=hyperparams.get(kind), seed=kind_seed
            )
            for split_name, ds in (("train", subset), ("test", test)):
                report = evaluate_model(model, ds, eval_start)
                points.extend(_report_points(kind, fraction, split_name, report))
    return points


def subset_ids_for_fraction(
    dataset: CycleDataset, split_spec: SplitSpec, fraction: float, seed: int,
) -> tuple[int, ...]:
    """The training-cycle ids a fraction resolves to (for tests/tools)."""
    train_full, _ = split_by_cycles(dataset, split_spec)
    order = rng_for(seed, "learning-curve").permutation(train_full.n_cycles)
    n = int(round(fraction * train_full.n_cycles))
    ids = train_full.cycle_ids
    return tuple(sorted(ids[i] for i in order[:n]))
