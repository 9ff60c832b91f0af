"""Uniform train/predict/evaluate pipeline over the five model kinds.

Every model sees standardized inputs (scaler fitted on its training
cycles only; targets stay raw).  Stateless kinds (lrr, krr, ffnn)
consume a lag window of past inputs and therefore predict from t >= k;
stateful kinds (esn, lstm) consume only the current input and predict
the whole cycle.  Evaluation scores all kinds on the same time points,
t >= eval_start (default 24 h), so reported errors are comparable.

Default hyperparameters are the optimized synthetic-dataset values of
the reference study; ``hyperparams`` overrides merge onto them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from agingforecast.bench.metrics import MetricsReport, mse_metrics
from agingforecast.data.cycles import CycleDataset
from agingforecast.data.split import SplitSpec, split_by_cycles
from agingforecast.data.transform import (
    Standardizer,
    apply_standardizer,
    fit_standardizer,
    window_rows,
    window_stack,
)
from agingforecast.errors import ConfigError
from agingforecast.models.esn import (
    EsnHyperparams,
    esn_fit_readout,
    esn_predict,
    init_reservoir,
    tune_readout_lambda,
)
from agingforecast.models.ffnn import FfnnModel, ffnn_forward, ffnn_train, init_ffnn
from agingforecast.models.linear import (
    KrrModel,
    LrrModel,
    krr_fit,
    krr_predict,
    lrr_fit,
    lrr_predict,
)
from agingforecast.models.lstm import LstmModel, init_lstm, lstm_forward_cycle, lstm_train
from agingforecast.models.sgd import EpochRecord, SgdConfig
from agingforecast.seeding import rng_for

MODEL_KINDS = ("lrr", "krr", "ffnn", "esn", "lstm")

#: all models are scored from this hour of each cycle
DEFAULT_EVAL_START = 24

#: ridge penalty grid shared by plain ridge and the ESN readout tuning
LRR_LAMBDA_GRID = tuple(float(v) for v in np.logspace(-3, 1, 9))

_DEFAULTS = {
    "lrr": {"lam": 0.01, "window": 24},
    "krr": {
        "lam": 0.00046,
        "sigma": 121.99,
        "subsample_fraction": 0.1,
        "window": 24,
    },
    "ffnn": {
        "hidden_sizes": (512, 512),
        "hidden_activation": "relu",
        "dropout_rate": 0.0,
        "learning_rate": 5e-6,
        "momentum": 0.95,
        "batch_size": 128,
        "max_epochs": 400,
        "patience": 6,
        "validation_fraction": 0.15,
        "clip_norm": None,
        "dtype": "float64",
        "window": 24,
    },
    "esn": {
        "hidden_size": 343,
        "connectivity": 32,
        "spectral_radius": 1.18,
        "input_scale": 0.004,
        "bias_scale": 0.68,
        "leak_rate": 0.05,
        "readout_lambda": None,
        "readout_cv_folds": 10,
        "window": 0,
    },
    "lstm": {
        "hidden_size": 512,
        "learning_rate": 0.001,
        "momentum": 0.95,
        "batch_size": 64,
        "max_epochs": 150,
        "patience": 6,
        "validation_fraction": 0.15,
        "clip_norm": 5.0,
        "dtype": "float64",
        "window": 0,
    },
}


def default_hyperparams(kind: str) -> dict:
    if kind not in MODEL_KINDS:
        raise ConfigError(f"unknown model kind '{kind}'")
    return dict(_DEFAULTS[kind])


def merge_hyperparams(kind: str, overrides: dict | None) -> dict:
    hp = default_hyperparams(kind)
    for key, value in (overrides or {}).items():
        if key not in hp:
            raise ConfigError(f"unknown hyperparameter '{key}' for {kind}")
        hp[key] = value
    return hp


@dataclass
class TrainedModel:
    kind: str
    window: int
    scaler: Standardizer
    input_columns: tuple[str, ...]
    target_columns: tuple[str, ...]
    core: object
    hyperparams: dict
    seed: int
    train_history: list[EpochRecord] | None = None

    @property
    def schema_hash(self) -> str:
        import hashlib

        text = "|".join(self.input_columns) + "->" + "|".join(self.target_columns)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class CyclePrediction:
    """Predictions for one cycle, starting at hour ``start``."""

    cycle_id: int
    start: int
    values: np.ndarray


def _sub_seed(seed: int, tag: str) -> int:
    return int(rng_for(seed, tag).integers(0, 2**63 - 1))


def train_model(
    kind: str,
    train: CycleDataset,
    hyperparams: dict | None = None,
    seed: int = 0,
) -> TrainedModel:
    """Fit one model kind on the given training cycles."""
    hp = merge_hyperparams(kind, hyperparams)
    window = int(hp["window"])
    scaler = fit_standardizer(train)
    scaled = apply_standardizer(scaler, train)
    d_x = len(train.input_columns)
    d_y = len(train.target_columns)
    history = None

    if kind in ("lrr", "krr", "ffnn"):
        view = window_stack(scaled, window)
        if view.n_cycles == 0:
            raise ConfigError("no training cycle is longer than the lag window")
        if kind == "lrr":
            x, y = view.stacked()
            core = lrr_fit(x, y, float(hp["lam"]))
        elif kind == "krr":
            x, y = view.stacked()
            core = krr_fit(
                x, y, float(hp["lam"]), float(hp["sigma"]),
                subsample_fraction=float(hp["subsample_fraction"]),
                seed=_sub_seed(seed, "krr-subsample"),
            )
        else:
            model = init_ffnn(
                (window + 1) * d_x,
                tuple(int(s) for s in hp["hidden_sizes"]),
                d_y,
                seed=seed,
                hidden_activation=str(hp["hidden_activation"]),
                dropout_rate=float(hp["dropout_rate"]),
            )
            sgd = SgdConfig(
                learning_rate=float(hp["learning_rate"]),
                momentum=float(hp["momentum"]),
                batch_size=int(hp["batch_size"]),
                max_epochs=int(hp["max_epochs"]),
                patience=int(hp["patience"]),
                validation_fraction=float(hp["validation_fraction"]),
                seed=seed,
                clip_norm=hp["clip_norm"],
                dtype=str(hp["dtype"]),
            )
            core, history = ffnn_train(model, view, sgd)
    elif kind == "esn":
        esn_hp = EsnHyperparams(
            hidden_size=int(hp["hidden_size"]),
            connectivity=int(hp["connectivity"]),
            spectral_radius=float(hp["spectral_radius"]),
            input_scale=float(hp["input_scale"]),
            bias_scale=float(hp["bias_scale"]),
            leak_rate=float(hp["leak_rate"]),
            readout_lambda=(
                None if hp["readout_lambda"] is None
                else float(hp["readout_lambda"])
            ),
        )
        reservoir = init_reservoir(esn_hp, seed=seed, d_in=d_x)
        lam = esn_hp.readout_lambda
        if lam is None:
            folds = min(int(hp["readout_cv_folds"]), scaled.n_cycles)
            if folds >= 2:
                lam, _ = tune_readout_lambda(
                    reservoir, scaled, LRR_LAMBDA_GRID, folds=folds, seed=seed
                )
            else:
                lam = LRR_LAMBDA_GRID[0]
            hp["readout_lambda"] = lam
        core = esn_fit_readout(reservoir, scaled, lam, hyperparams=esn_hp)
    else:  # lstm
        model = init_lstm(d_x, int(hp["hidden_size"]), d_y, seed=seed)
        sgd = SgdConfig(
            learning_rate=float(hp["learning_rate"]),
            momentum=float(hp["momentum"]),
            batch_size=int(hp["batch_size"]),
            max_epochs=int(hp["max_epochs"]),
            patience=int(hp["patience"]),
            validation_fraction=float(hp["validation_fraction"]),
            seed=seed,
            clip_norm=hp["clip_norm"],
            dtype=str(hp["dtype"]),
        )
        core, history = lstm_train(model, scaled, sgd)

    return TrainedModel(
        kind=kind,
        window=window,
        scaler=scaler,
        input_columns=train.input_columns,
        target_columns=train.target_columns,
        core=core,
        hyperparams=hp,
        seed=seed,
        train_history=history,
    )


def predict_dataset(model: TrainedModel, data: CycleDataset) -> list[CyclePrediction]:
    """Per-cycle predictions in dataset order."""
    if data.input_columns != model.input_columns:
        raise ConfigError("dataset input schema does not match the model")
    scaled = apply_standardizer(model.scaler, data)
    out: list[CyclePrediction] = []
    d_y = len(model.target_columns)
    for cyc in scaled:
        if model.kind in ("lrr", "krr", "ffnn"):
            if cyc.length < model.window + 1:
                values = np.empty((0, d_y))
                out.append(CyclePrediction(cyc.cycle_id, cyc.length, values))
                continue
            rows = window_rows(cyc.inputs, model.window)
            if model.kind == "lrr":
                values = lrr_predict(model.core, rows)
            elif model.kind == "krr":
                values = krr_predict(model.core, rows)
            else:
                dtype = model.core.weights[0].dtype
                values, _ = ffnn_forward(model.core, rows.astype(dtype))
            out.append(CyclePrediction(cyc.cycle_id, model.window, np.asarray(values, dtype=float)))
        elif model.kind == "esn":
            values = esn_predict(model.core, cyc.inputs)
            out.append(CyclePrediction(cyc.cycle_id, 0, values))
        else:
            dtype = model.core.w_o.dtype
            values = lstm_forward_cycle(model.core, cyc.inputs.astype(dtype))
            out.append(CyclePrediction(cyc.cycle_id, 0, np.asarray(values, dtype=float)))
    return out


def evaluate_model(
    model: TrainedModel,
    data: CycleDataset,
    eval_start: int = DEFAULT_EVAL_START,
) -> MetricsReport:
    """Score on time points t >= eval_start of every long-enough cycle."""
    preds = predict_dataset(model, data)
    ids, pred_slices, targ_slices = [], [], []
    for cyc, pred in zip(data, preds):
        start = max(eval_start, pred.start)
        if cyc.length <= start:
            continue
        ids.append(cyc.cycle_id)
        pred_slices.append(pred.values[start - pred.start :])
        targ_slices.append(cyc.targets[start:])
    if not ids:
        raise ValueError("no cycle is longer than eval_start")
    return mse_metrics(ids, pred_slices, targ_slices, model.target_columns)


def prediction_traces(
    model: TrainedModel,
    data: CycleDataset,
    eval_start: int = DEFAULT_EVAL_START,
):
    """Plot-ready rows (cycle_id, t, target, y_true, y_pred)."""
    preds = predict_dataset(model, data)
    rows = []
    for cyc, pred in zip(data, preds):
        start = max(eval_start, pred.start)
        for t in range(start, cyc.length):
            for j, name in enumerate(model.target_columns):
                rows.append(
                    (
                        cyc.cycle_id,
                        t,
                        name,
                        float(cyc.targets[t, j]),
                        float(pred.values[t - pred.start, j]),
                    )
                )
    return rows


def split_dataset(dataset: CycleDataset, spec: SplitSpec | None):
    """(train, test) where test is None without a split spec."""
    if spec is None:
        return dataset, None
    return split_by_cycles(dataset, spec)
