"""Shared SGD machinery: Nesterov momentum, gradient clipping, early
stopping bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from agingforecast.errors import ConfigError


@dataclass(frozen=True)
class SgdConfig:
    """Hyperparameters of the gradient-descent training loop.

    ``validation_fraction`` of the training cycles (seeded random split)
    is held out; training stops once that split's MSE has not improved
    for ``patience`` consecutive epochs, and the parameters from the
    best epoch are returned.  ``clip_norm`` rescales the global gradient
    norm (None disables).  ``dtype`` selects the training precision;
    float64 is the default, float32 roughly halves the runtime.
    """

    learning_rate: float
    momentum: float = 0.95
    batch_size: int = 128
    max_epochs: int = 200
    patience: int = 6
    validation_fraction: float = 0.15
    seed: int = 0
    clip_norm: float | None = None
    dtype: str = "float64"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError("momentum must lie in [0, 1)")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ConfigError("batch_size, max_epochs, patience must be >= 1")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ConfigError("validation_fraction must lie in (0, 1)")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise ConfigError("clip_norm must be positive or None")
        if self.dtype not in ("float64", "float32"):
            raise ConfigError("dtype must be float64 or float32")

    @property
    def np_dtype(self):
        return np.float64 if self.dtype == "float64" else np.float32


class NesterovOptimizer:
    """v <- mu v - eta grad L(theta + mu v);  theta <- theta + v."""

    def __init__(self, params: list[np.ndarray], learning_rate: float,
                 momentum: float):
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.velocities = [np.zeros_like(p) for p in params]

    def lookahead(self, params: list[np.ndarray]) -> list[np.ndarray]:
        """Parameters shifted by mu v, where the gradient is evaluated."""
        return [p + self.momentum * v for p, v in zip(params, self.velocities)]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        for p, v, g in zip(params, self.velocities, grads):
            v *= self.momentum
            v -= self.learning_rate * g
            p += v


def clip_gradients(grads: list[np.ndarray], max_norm: float | None) -> float:
    """Rescale gradients in place to a global L2 norm cap; returns the
    pre-clip norm."""
    total = float(np.sqrt(sum(float(np.sum(g.astype(np.float64) ** 2))
                              for g in grads)))
    if max_norm is not None and total > max_norm and total > 0.0:
        scale = max_norm / total
        for g in grads:
            g *= scale
    return total


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_mse: float


@dataclass
class EarlyStopper:
    """Tracks the best validation error and the no-improvement streak."""

    patience: int
    best: float = np.inf
    best_epoch: int = -1
    stale: int = 0

    def update(self, epoch: int, val_mse: float) -> bool:
        """Record an epoch; returns True when this is a new best."""
        if val_mse < self.best:
            self.best = val_mse
            self.best_epoch = epoch
            self.stale = 0
            return True
        self.stale += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.stale >= self.patience


def validation_split(n_cycles: int, fraction: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Seeded random cycle positions: (train_idx, val_idx)."""
    n_val = max(1, int(round(fraction * n_cycles)))
    if n_val >= n_cycles:
        raise ValueError("validation split would consume every cycle")
    perm = rng.permutation(n_cycles)
    val = np.sort(perm[:n_val])
    train = np.sort(perm[n_val:])
    return train, val
