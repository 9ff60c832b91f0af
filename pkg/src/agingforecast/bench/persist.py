"""Save and load trained models as deterministic flat-binary artifacts.

The artifact stores the standardizer, schema (with hash), lag window,
hyperparameters and the model parameters.  ESN reservoirs are rebuilt
from (seed, hyperparams) on load instead of being stored densely; the
readout weights are stored explicitly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from agingforecast.bench.runners import TrainedModel
from agingforecast.data.transform import Standardizer
from agingforecast.errors import ConfigError
from agingforecast.models.esn import (
    EsnHyperparams,
    EsnModel,
    init_reservoir,
)
from agingforecast.models.ffnn import FfnnModel
from agingforecast.models.linear import KrrModel, LrrModel
from agingforecast.models.lstm import LstmModel
from agingforecast.models.serialize import read_artifact, write_artifact

_LSTM_FIELDS = ("w_f", "b_f", "w_i", "b_i", "w_c", "b_c", "w_h", "b_h",
                "w_o", "b_o")


def save_trained_model(path: str | Path, model: TrainedModel) -> None:
    arrays = {
        "scaler_means": model.scaler.means,
        "scaler_stds": model.scaler.stds,
    }
    core = model.core
    if model.kind == "lrr":
        arrays["weights"] = core.weights
    elif model.kind == "krr":
        arrays["alphas"] = core.alphas
        arrays["support"] = core.support_inputs
    elif model.kind == "ffnn":
        for i, (w, b) in enumerate(zip(core.weights, core.biases)):
            arrays[f"w{i}"] = w
            arrays[f"b{i}"] = b
    elif model.kind == "esn":
        arrays["readout"] = core.readout.weights
    elif model.kind == "lstm":
        for name in _LSTM_FIELDS:
            arrays[name] = getattr(core, name)
    else:
        raise ConfigError(f"unknown model kind '{model.kind}'")

    hyperparams = dict(model.hyperparams)
    if "hidden_sizes" in hyperparams:
        hyperparams["hidden_sizes"] = list(hyperparams["hidden_sizes"])
    meta = {
        "format": "trained-model",
        "kind": model.kind,
        "window": model.window,
        "seed": model.seed,
        "input_columns": list(model.input_columns),
        "target_columns": list(model.target_columns),
        "schema_hash": model.schema_hash,
        "hyperparams": hyperparams,
    }
    if model.kind == "ffnn":
        meta["n_layers"] = len(core.weights)
    write_artifact(path, meta, arrays)


def load_trained_model(path: str | Path) -> TrainedModel:
    meta, arrays = read_artifact(path)
    if meta.get("format") != "trained-model":
        raise ConfigError(f"{path}: not a trained-model artifact")
    kind = meta["kind"]
    hp = dict(meta["hyperparams"])
    if "hidden_sizes" in hp:
        hp["hidden_sizes"] = tuple(int(v) for v in hp["hidden_sizes"])
    scaler = Standardizer(means=arrays["scaler_means"], stds=arrays["scaler_stds"])
    input_columns = tuple(meta["input_columns"])
    d_in = len(input_columns)

    if kind == "lrr":
        core = LrrModel(weights=arrays["weights"], lam=float(hp["lam"]))
    elif kind == "krr":
        core = KrrModel(
            alphas=arrays["alphas"],
            support_inputs=arrays["support"],
            sigma=float(hp["sigma"]),
            lam=float(hp["lam"]),
            subsample_fraction=float(hp["subsample_fraction"]),
        )
    elif kind == "ffnn":
        n_layers = int(meta["n_layers"])
        core = FfnnModel(
            weights=[arrays[f"w{i}"] for i in range(n_layers)],
            biases=[arrays[f"b{i}"] for i in range(n_layers)],
            hidden_activation=str(hp["hidden_activation"]),
            dropout_rate=float(hp["dropout_rate"]),
        )
    elif kind == "esn":
        esn_hp = EsnHyperparams(
            hidden_size=int(hp["hidden_size"]),
            connectivity=int(hp["connectivity"]),
            spectral_radius=float(hp["spectral_radius"]),
            input_scale=float(hp["input_scale"]),
            bias_scale=float(hp["bias_scale"]),
            leak_rate=float(hp["leak_rate"]),
            readout_lambda=float(hp["readout_lambda"]),
        )
        reservoir = init_reservoir(esn_hp, seed=int(meta["seed"]), d_in=d_in)
        core = EsnModel(
            reservoir=reservoir,
            readout=LrrModel(weights=arrays["readout"],
                             lam=float(hp["readout_lambda"])),
            hyperparams=esn_hp,
        )
    elif kind == "lstm":
        core = LstmModel(*(arrays[name] for name in _LSTM_FIELDS))
    else:
        raise ConfigError(f"unknown model kind '{kind}'")

    model = TrainedModel(
        kind=kind,
        window=int(meta["window"]),
        scaler=scaler,
        input_columns=input_columns,
        target_columns=tuple(meta["target_columns"]),
        core=core,
        hyperparams=hp,
        seed=int(meta["seed"]),
    )
    if model.schema_hash != meta["schema_hash"]:
        raise ConfigError(f"{path}: schema hash mismatch")
    return model
