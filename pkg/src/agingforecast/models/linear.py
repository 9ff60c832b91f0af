"""Closed-form linear ridge regression and RBF kernel ridge regression.

Both models solve their normal equations analytically through a
symmetric positive-definite (Cholesky) factorization.  LRR appends a
constant-one feature excluded from the ridge penalty, so target means
are fitted without shrinkage (targets are used unscaled).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from agingforecast.errors import FitError


@dataclass(frozen=True)
class LrrModel:
    """Weights of shape (d_y, d_in + 1); the last column is the bias
    (zero when fitted without an intercept)."""

    weights: np.ndarray
    lam: float

    @property
    def d_in(self) -> int:
        return self.weights.shape[1] - 1


@dataclass(frozen=True)
class KrrModel:
    """Kernel expansion coefficients over the retained training inputs."""

    alphas: np.ndarray          # (n_support, d_y)
    support_inputs: np.ndarray  # (n_support, d_in)
    sigma: float
    lam: float
    subsample_fraction: float


def _as_2d(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return y[:, None] if y.ndim == 1 else y


def lrr_fit(
    x: np.ndarray, y: np.ndarray, lam: float, include_bias: bool = True,
) -> LrrModel:
    """Solve min ||X w - Y||^2 + lam ||w||^2 (bias unpenalized).

    Raises FitError when the system is singular at lam = 0 (the usual
    remedy is a positive lam).
    """
    x = np.asarray(x, dtype=float)
    y = _as_2d(y)
    if lam < 0:
        raise ValueError("lam must be >= 0")
    if x.shape[0] != y.shape[0]:
        raise ValueError("X and Y row counts differ")
    n, d = x.shape
    if include_bias:
        xb = np.column_stack([x, np.ones(n)])
    else:
        xb = x
    gram = xb.T @ xb
    penalty = np.full(xb.shape[1], lam)
    if include_bias:
        penalty[-1] = 0.0
    gram[np.diag_indices_from(gram)] += penalty
    rhs = xb.T @ y
    try:
        chol = scipy.linalg.cho_factor(gram, lower=True)
    except np.linalg.LinAlgError as err:
        raise FitError(
            "singular normal equations; retry with lam > 0"
        ) from err
    weights = scipy.linalg.cho_solve(chol, rhs).T  # (d_y, d_fit)
    if not include_bias:
        weights = np.column_stack([weights, np.zeros(weights.shape[0])])
    if not np.isfinite(weights).all():
        raise FitError("non-finite weights; retry with lam > 0")
    return LrrModel(weights=weights, lam=lam)


def lrr_predict(model: LrrModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[1] != model.d_in:
        raise ValueError(
            f"expected {model.d_in} features, got {x.shape[1]}"
        )
    return x @ model.weights[:, :-1].T + model.weights[:, -1]


def rbf_kernel(x: np.ndarray, x_other: np.ndarray, sigma: float) -> float:
    """Gaussian similarity exp(-||x - x'||^2 / (2 sigma^2))."""
    x = np.asarray(x, dtype=float)
    x_other = np.asarray(x_other, dtype=float)
    if x.shape != x_other.shape:
        raise ValueError("kernel arguments must share a shape")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    d2 = float(np.sum((x - x_other) ** 2))
    return float(np.exp(-d2 / (2.0 * sigma * sigma)))


def rbf_kernel_matrix(
    a: np.ndarray, b: np.ndarray, sigma: float,
) -> np.ndarray:
    """Pairwise Gaussian kernel matrix of shape (len(a), len(b))."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    d2 = (
        np.sum(a * a, axis=1)[:, None]
        + np.sum(b * b, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    np.clip(d2, 0.0, None, out=d2)
    return np.exp(-d2 / (2.0 * sigma * sigma))


def krr_fit(
    x: np.ndarray,
    y: np.ndarray,
    lam: float,
    sigma: float,
    subsample_fraction: float = 1.0,
    seed: int = 0,
) -> KrrModel:
    """Solve (K + lam I) alpha = Y on a seeded uniform row subsample.

    A failed Cholesky is retried once with jitter 1e-10 tr(K)/n on the
    diagonal, then reported as a FitError.
    """
    x = np.asarray(x, dtype=float)
    y = _as_2d(y)
    if not 0.0 < subsample_fraction <= 1.0:
        raise ValueError("subsample_fraction must lie in (0, 1]")
    n = x.shape[0]
    if subsample_fraction < 1.0:
        keep = max(1, int(round(subsample_fraction * n)))
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(n, size=keep, replace=False))
        x, y = x[idx], y[idx]
        n = keep
    kmat = rbf_kernel_matrix(x, x, sigma)
    for jitter in (0.0, 1e-10 * np.trace(kmat) / n):
        try:
            chol = scipy.linalg.cho_factor(
                kmat + (lam + jitter) * np.eye(n), lower=True
            )
            alphas = scipy.linalg.cho_solve(chol, y)
            break
        except np.linalg.LinAlgError:
            alphas = None
    if alphas is None or not np.isfinite(alphas).all():
        raise FitError("kernel system not positive definite; increase lam")
    return KrrModel(
        alphas=alphas,
        support_inputs=x,
        sigma=sigma,
        lam=lam,
        subsample_fraction=subsample_fraction,
    )


def krr_predict(model: KrrModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[1] != model.support_inputs.shape[1]:
        raise ValueError(
            f"expected {model.support_inputs.shape[1]} features, got {x.shape[1]}"
        )
    out = np.empty((x.shape[0], model.alphas.shape[1]))
    # chunked so large query sets do not materialize a giant kernel block
    chunk = max(1, int(2e7) // max(1, model.support_inputs.shape[0]))
    for start in range(0, x.shape[0], chunk):
        block = x[start : start + chunk]
        out[start : start + chunk] = (
            rbf_kernel_matrix(block, model.support_inputs, model.sigma)
            @ model.alphas
        )
    return out
