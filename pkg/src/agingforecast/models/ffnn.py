"""Feed-forward network with hand-written backpropagation.

Architecture: dense hidden layers with a configurable nonlinearity
(ReLU by default, tanh optional) and a linear output layer.  Training
minimizes the squared error with Nesterov-momentum SGD; inverted dropout
is applied after each hidden activation in train mode only, so the eval
path is a pure affine/nonlinear chain.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from agingforecast.data.transform import WindowedView
from agingforecast.errors import FitError
from agingforecast.models.sgd import (
    EarlyStopper,
    EpochRecord,
    NesterovOptimizer,
    SgdConfig,
    clip_gradients,
    validation_split,
)
from agingforecast.seeding import rng_for

_ACTIVATIONS = ("relu", "tanh")


@dataclass
class FfnnModel:
    """Per-layer weights (fan_out x fan_in) and biases; the last layer is
    the linear output."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_activation: str = "relu"
    dropout_rate: float = 0.0

    def __post_init__(self):
        if self.hidden_activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation '{self.hidden_activation}'")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must lie in [0, 1)")
        for w_prev, w_next in zip(self.weights, self.weights[1:]):
            if w_next.shape[1] != w_prev.shape[0]:
                raise ValueError("consecutive layer dimensions do not chain")

    @property
    def d_in(self) -> int:
        return self.weights[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.weights[-1].shape[0]

    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def copy(self) -> "FfnnModel":
        return replace(
            self,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )


def init_ffnn(
    d_in: int,
    hidden_sizes: tuple[int, ...],
    d_out: int,
    seed: int,
    hidden_activation: str = "relu",
    dropout_rate: float = 0.0,
    dtype=np.float64,
) -> FfnnModel:
    """Uniform fan-in scaled init: W ~ U(+-1/sqrt(fan_in)), zero biases."""
    rng = rng_for(seed, "ffnn-init")
    sizes = [d_in, *hidden_sizes, d_out]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(
            rng.uniform(-bound, bound, size=(fan_out, fan_in)).astype(dtype)
        )
        biases.append(np.zeros(fan_out, dtype=dtype))
    return FfnnModel(weights=weights, biases=biases,
                     hidden_activation=hidden_activation,
                     dropout_rate=dropout_rate)


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _activate_grad(z: np.ndarray, h: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return (z > 0.0).astype(z.dtype)
    return 1.0 - h * h


def ffnn_forward(
    model: FfnnModel, x: np.ndarray, mode: str = "eval", rng=None,
):
    """Forward pass; returns (predictions, cache).

    ``mode='train'`` applies inverted dropout (mask scaled by 1/(1-rate))
    after each hidden activation and requires an rng when the rate is
    non-zero.  The cache holds what backprop needs.
    """
    if mode not in ("train", "eval"):
        raise ValueError("mode must be 'train' or 'eval'")
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[1] != model.d_in:
        raise ValueError(f"expected (n, {model.d_in}) inputs")
    use_dropout = mode == "train" and model.dropout_rate > 0.0
    if use_dropout and rng is None:
        raise ValueError("train-mode dropout needs an rng")

    a = x
    cache = {"inputs": [x], "pre": [], "masks": []}
    n_layers = len(model.weights)
    for layer, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w.T + b
        if layer == n_layers - 1:
            a = z  # linear output layer
        else:
            cache["pre"].append(z)
            a = _activate(z, model.hidden_activation)
            if use_dropout:
                keep = 1.0 - model.dropout_rate
                mask = (rng.random(a.shape) < keep).astype(a.dtype) / keep
                a = a * mask
                cache["masks"].append(mask)
            else:
                cache["masks"].append(None)
            cache["inputs"].append(a)
    return a, cache


def _ffnn_backward(model: FfnnModel, cache, d_out: np.ndarray) -> list[np.ndarray]:
    """Gradients in parameters() order given dLoss/dPredictions."""
    grads: list[np.ndarray] = []
    delta = d_out
    for layer in reversed(range(len(model.weights))):
        a_prev = cache["inputs"][layer]
        grads.append(delta.sum(axis=0))            # bias
        grads.append(delta.T @ a_prev)             # weight
        if layer > 0:
            delta = delta @ model.weights[layer]
            mask = cache["masks"][layer - 1]
            if mask is not None:
                delta = delta * mask
            z = cache["pre"][layer - 1]
            h = cache["inputs"][layer]
            # undo dropout scaling on h for the tanh derivative
            if mask is not None and model.hidden_activation == "tanh":
                h = _activate(z, "tanh")
            delta = delta * _activate_grad(z, h, model.hidden_activation)
    grads.reverse()
    return grads


def ffnn_loss_and_grads(
    model: FfnnModel, x: np.ndarray, y: np.ndarray, mode: str = "eval",
    rng=None,
) -> tuple[float, list[np.ndarray]]:
    """Squared-error loss (mean over rows, summed over outputs) and its
    exact gradients in parameters() order."""
    pred, cache = ffnn_forward(model, x, mode=mode, rng=rng)
    err = pred - y
    n = x.shape[0]
    loss = float(np.sum(err * err) / n)
    grads = _ffnn_backward(model, cache, (2.0 / n) * err)
    return loss, grads


def ffnn_train(
    model: FfnnModel, train: WindowedView, sgd: SgdConfig,
) -> tuple[FfnnModel, list[EpochRecord]]:
    """Mini-batch Nesterov SGD with early stopping on a cycle-level
    validation split; returns the best-validation-epoch parameters."""
    if train.n_cycles < 2:
        raise ValueError("need at least 2 cycles to carve out validation")
    dtype = sgd.np_dtype
    model = model.copy()
    for i in range(len(model.weights)):
        model.weights[i] = model.weights[i].astype(dtype)
        model.biases[i] = model.biases[i].astype(dtype)

    split_rng = rng_for(sgd.seed, "validation-split")
    train_idx, val_idx = validation_split(
        train.n_cycles, sgd.validation_fraction, split_rng
    )
    x_train = np.concatenate([train.features[i] for i in train_idx]).astype(dtype)
    y_train = np.concatenate([train.targets[i] for i in train_idx]).astype(dtype)
    val_sets = [
        (train.features[i].astype(dtype), train.targets[i].astype(dtype))
        for i in val_idx
    ]

    params = model.parameters()
    opt = NesterovOptimizer(params, sgd.learning_rate, sgd.momentum)
    stopper = EarlyStopper(patience=sgd.patience)
    best_snapshot = [p.copy() for p in params]
    history: list[EpochRecord] = []
    n_rows = x_train.shape[0]

    for epoch in range(sgd.max_epochs):
        order = rng_for(sgd.seed, "shuffle", epoch).permutation(n_rows)
        dropout_rng = rng_for(sgd.seed, "dropout", epoch)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n_rows, sgd.batch_size):
            rows = order[start : start + sgd.batch_size]
            ahead = opt.lookahead(params)
            shadow = replace(
                model,
                weights=[ahead[2 * i] for i in range(len(model.weights))],
                biases=[ahead[2 * i + 1] for i in range(len(model.weights))],
            )
            loss, grads = ffnn_loss_and_grads(
                shadow, x_train[rows], y_train[rows], mode="train",
                rng=dropout_rng,
            )
            if not np.isfinite(loss):
                raise FitError(
                    f"NaN/inf loss at epoch {epoch}; try a lower learning rate"
                )
            clip_gradients(grads, sgd.clip_norm)
            opt.step(params, grads)
            epoch_loss += loss
            n_batches += 1

        val_mse = _validation_mse(model, val_sets)
        history.append(EpochRecord(epoch, epoch_loss / max(1, n_batches), val_mse))
        if stopper.update(epoch, val_mse):
            best_snapshot = [p.copy() for p in params]
        if stopper.should_stop:
            break

    for p, best in zip(params, best_snapshot):
        p[...] = best
    return model, history


def _validation_mse(model: FfnnModel, val_sets) -> float:
    """Per-cycle mean squared error, averaged over cycles and targets."""
    per_cycle = []
    for x, y in val_sets:
        pred, _ = ffnn_forward(model, x, mode="eval")
        per_cycle.append(float(np.mean((pred - y) ** 2)))
    return float(np.mean(per_cycle))
