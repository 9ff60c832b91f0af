"""Hyperparameter search: exhaustive grids and seeded random sampling.

Evaluation protocol by model kind: the closed-form models (lrr, krr,
esn) use cycle-level k-fold cross-validation; the gradient-trained ones
(ffnn, lstm) are scored by their best validation-split MSE, which their
training loop tracks anyway.  Candidates that raise are recorded as
failed and excluded; ties break toward the earlier candidate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from agingforecast.bench.crossval import kfold_cv
from agingforecast.bench.runners import (
    DEFAULT_EVAL_START,
    LRR_LAMBDA_GRID,
    MODEL_KINDS,
    train_model,
)
from agingforecast.data.cycles import CycleDataset
from agingforecast.errors import ConfigError
from agingforecast.seeding import rng_for


@dataclass(frozen=True)
class GridAxis:
    values: tuple

    def __post_init__(self):
        if len(self.values) == 0:
            raise ConfigError("empty grid axis")


@dataclass(frozen=True)
class UniformAxis:
    lo: float
    hi: float


@dataclass(frozen=True)
class LogUniformAxis:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo <= 0 or self.hi <= self.lo:
            raise ConfigError("log-uniform axis needs 0 < lo < hi")


@dataclass(frozen=True)
class IntRangeAxis:
    lo: int
    hi: int  # inclusive


@dataclass(frozen=True)
class SearchSpace:
    axes: dict
    budget: int | None = None
    cv_folds: int = 10

    def __post_init__(self):
        if not self.axes:
            raise ConfigError("search space has no axes")
        if self.budget is not None and self.budget < 1:
            raise ConfigError("budget must be >= 1")


def sample_axis(axis, rng) -> object:
    if isinstance(axis, GridAxis):
        return axis.values[int(rng.integers(len(axis.values)))]
    if isinstance(axis, UniformAxis):
        return float(rng.uniform(axis.lo, axis.hi))
    if isinstance(axis, LogUniformAxis):
        return float(math.exp(rng.uniform(math.log(axis.lo), math.log(axis.hi))))
    if isinstance(axis, IntRangeAxis):
        return int(rng.integers(axis.lo, axis.hi + 1))
    raise ConfigError(f"unknown axis type {type(axis).__name__}")


def default_space(kind: str) -> SearchSpace:
    """Sensible per-kind spaces bracketing the reference optima."""
    if kind == "lrr":
        return SearchSpace(axes={"lam": GridAxis(LRR_LAMBDA_GRID)})
    if kind == "krr":
        return SearchSpace(
            axes={
                "lam": GridAxis(tuple(float(v) for v in np.logspace(-16, 0, 9))),
                "sigma": GridAxis(tuple(float(v) for v in np.logspace(-1, 3, 5))),
            }
        )
    if kind == "ffnn":
        return SearchSpace(
            axes={
                "learning_rate": GridAxis((1e-6, 5e-6, 2.5e-5)),
                "hidden_sizes": GridAxis(((256, 256), (512, 512))),
                "dropout_rate": GridAxis((0.0, 0.3)),
            }
        )
    if kind == "lstm":
        return SearchSpace(
            axes={
                "learning_rate": GridAxis((2e-4, 1e-3, 5e-3)),
                "hidden_size": GridAxis((256, 512)),
            }
        )
    if kind == "esn":
        return SearchSpace(
            axes={
                "hidden_size": IntRangeAxis(50, 500),
                "connectivity": IntRangeAxis(4, 48),
                "spectral_radius": LogUniformAxis(0.3, 1.5),
                "input_scale": LogUniformAxis(1e-3, 1.0),
                "bias_scale": UniformAxis(0.0, 1.0),
                "leak_rate": LogUniformAxis(5e-3, 1.0),
                "readout_lambda": LogUniformAxis(1e-8, 1.0),
            },
            budget=50,
        )
    raise ConfigError(f"unknown model kind '{kind}'")


@dataclass
class CandidateResult:
    index: int
    params: dict
    status: str       # "ok" | "failed"
    score: float | None = None
    message: str = ""


@dataclass
class SearchResult:
    kind: str
    mode: str
    best_params: dict | None
    best_score: float | None
    table: list[CandidateResult] = field(default_factory=list)


def _candidate_score(
    kind: str,
    params: dict,
    dataset: CycleDataset,
    cv_folds: int,
    seed: int,
    eval_start: int,
) -> float:
    cand_seed = int(rng_for(seed, "candidate-train").integers(0, 2**63 - 1))
    if kind in ("lrr", "krr", "esn"):
        result = kfold_cv(
            dataset,
            cv_folds,
            lambda ds: train_model(kind, ds, hyperparams=params, seed=cand_seed),
            seed=seed,
            eval_start=eval_start,
        )
        return result.mean_mse
    model = train_model(kind, dataset, hyperparams=params, seed=cand_seed)
    assert model.train_history is not None
    return float(min(rec.val_mse for rec in model.train_history))


def _run_candidates(
    kind: str,
    mode: str,
    candidates: list[dict],
    dataset: CycleDataset,
    cv_folds: int,
    seed: int,
    eval_start: int,
) -> SearchResult:
    result = SearchResult(kind=kind, mode=mode, best_params=None, best_score=None)
    for index, params in enumerate(candidates):
        entry = CandidateResult(index=index, params=dict(params), status="ok")
        try:
            entry.score = _candidate_score(
                kind, params, dataset, cv_folds, seed, eval_start
            )
        except Exception as err:  # candidate failures never abort a sweep
            entry.status = "failed"
            entry.message = f"{type(err).__name__}: {err}"
            entry.score = None
        result.table.append(entry)
        if entry.status == "ok" and (
            result.best_score is None or entry.score < result.best_score
        ):
            result.best_score = entry.score
            result.best_params = dict(params)
    return result


def grid_search(
    space: SearchSpace,
    dataset: CycleDataset,
    kind: str,
    seed: int = 0,
    eval_start: int = DEFAULT_EVAL_START,
) -> SearchResult:
    """Evaluate every grid point; all axes must be GridAxis."""
    if kind not in MODEL_KINDS:
        raise ConfigError(f"unknown model kind '{kind}'")
    names = list(space.axes)
    for name in names:
        if not isinstance(space.axes[name], GridAxis):
            raise ConfigError(f"grid search needs grid axes; '{name}' is not")
    combos = itertools.product(*(space.axes[n].values for n in names))
    candidates = [dict(zip(names, combo)) for combo in combos]
    return _run_candidates(
        kind, "grid", candidates, dataset, space.cv_folds, seed, eval_start
    )


def random_search(
    space: SearchSpace,
    budget: int,
    dataset: CycleDataset,
    kind: str,
    seed: int = 0,
    eval_start: int = DEFAULT_EVAL_START,
) -> SearchResult:
    """Sample ``budget`` candidates from the per-axis distributions."""
    if kind not in MODEL_KINDS:
        raise ConfigError(f"unknown model kind '{kind}'")
    if budget < 1:
        raise ConfigError("budget must be >= 1")
    rng = rng_for(seed, "random-search")
    candidates = [
        {name: sample_axis(axis, rng) for name, axis in space.axes.items()}
        for _ in range(budget)
    ]
    return _run_candidates(
        kind, "random", candidates, dataset, space.cv_folds, seed, eval_start
    )
