"""Echo state network: fixed random reservoir, ridge-regression readout.

The reservoir is a sparse recurrent matrix with a fixed number of
nonzeros per row (standard-normal values, seeded positions) rescaled to
a target spectral radius, plus a dense input matrix whose non-bias block
is rescaled to a configured largest singular value and whose bias column
is scaled separately.  State update with leak rate alpha:

    h~(t) = tanh(W_in [1; x(t)] + W_rec h(t-1))
    h(t)  = (1 - alpha) h(t-1) + alpha h~(t)

The readout solves a plain ridge regression on rows [1; x(t); h(t)];
state starts at zero for every cycle and no washout is discarded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from agingforecast.data.cycles import CycleDataset
from agingforecast.errors import ConfigError, FitError
from agingforecast.models.linear import LrrModel, lrr_fit
from agingforecast.seeding import rng_for


@dataclass(frozen=True)
class EsnHyperparams:
    """Reservoir construction and readout knobs.

    ``input_scale`` is the largest singular value given to the non-bias
    block of W_in ("input spectral radius"); ``readout_lambda`` of None
    means the harness tunes it by cross-validation.
    """

    hidden_size: int = 343
    connectivity: int = 32
    spectral_radius: float = 1.18
    input_scale: float = 0.004
    bias_scale: float = 0.68
    leak_rate: float = 0.05
    readout_lambda: float | None = None

    def __post_init__(self):
        if self.hidden_size < 1:
            raise ConfigError("hidden_size must be >= 1")
        if not 1 <= self.connectivity <= self.hidden_size:
            raise ConfigError("connectivity must lie in [1, hidden_size]")
        if self.spectral_radius <= 0 or self.input_scale <= 0:
            raise ConfigError("spectral_radius and input_scale must be positive")
        if self.bias_scale < 0:
            raise ConfigError("bias_scale must be >= 0")
        if not 0.0 < self.leak_rate <= 1.0:
            raise ConfigError("leak_rate must lie in (0, 1]")


@dataclass(frozen=True)
class Reservoir:
    """Fixed random weights of the state equation."""

    w_in: np.ndarray                    # (m, 1 + d_x); column 0 is the bias
    w_rec: scipy.sparse.csr_matrix      # (m, m)
    leak_rate: float
    seed: int

    @property
    def hidden_size(self) -> int:
        return self.w_in.shape[0]

    @property
    def d_in(self) -> int:
        return self.w_in.shape[1] - 1


@dataclass(frozen=True)
class EsnModel:
    reservoir: Reservoir
    readout: LrrModel               # weights over [1; x; h], no extra bias
    hyperparams: EsnHyperparams

    @property
    def d_out(self) -> int:
        return self.readout.weights.shape[0]


def spectral_radius(matvec, n: int, tol: float = 1e-9,
                    max_iter: int = 10_000, block: int = 16,
                    seed: int = 0) -> float:
    """Largest eigenvalue magnitude by block power iteration.

    A small orthonormal block is propagated and the dominant modulus is
    read off the Rayleigh-Ritz projection; the block handles the complex
    conjugate pairs that dominate random recurrent matrices.  Converged
    when the estimate moves less than ``tol`` (relative) over three
    consecutive iterations.
    """
    rng = np.random.default_rng(seed)
    p = min(block, n)
    q, _ = np.linalg.qr(rng.standard_normal((n, p)))
    prev = np.inf
    stable = 0
    for iteration in range(1, max_iter + 1):
        z = matvec(q)
        norm = np.linalg.norm(z)
        if norm == 0.0:
            return 0.0
        q, _ = np.linalg.qr(z)
        ritz = q.T @ matvec(q)
        rho = float(np.abs(np.linalg.eigvals(ritz)).max())
        if abs(rho - prev) <= tol * max(rho, 1.0):
            stable += 1
            if stable >= 3:
                return rho
        else:
            stable = 0
        prev = rho
    raise FitError(
        f"power iteration did not converge within {max_iter} iterations"
    )


def init_reservoir(hp: EsnHyperparams, seed: int, d_in: int) -> Reservoir:
    """Build the seeded reservoir; W_rec gets exactly ``connectivity``
    nonzeros per row and its spectral radius is rescaled to the target."""
    rng = rng_for(seed, "esn-reservoir")
    m = hp.hidden_size

    rows = np.repeat(np.arange(m), hp.connectivity)
    cols = np.empty(m * hp.connectivity, dtype=np.int64)
    for i in range(m):
        cols[i * hp.connectivity : (i + 1) * hp.connectivity] = rng.choice(
            m, size=hp.connectivity, replace=False
        )
    values = rng.standard_normal(m * hp.connectivity)
    w_rec = scipy.sparse.csr_matrix((values, (rows, cols)), shape=(m, m))

    rho = spectral_radius(lambda v: w_rec @ v, m)
    if rho == 0.0:
        raise FitError("reservoir has zero spectral radius; reseed")
    w_rec = w_rec * (hp.spectral_radius / rho)

    w_in = rng.standard_normal((m, 1 + d_in))
    block = w_in[:, 1:]
    largest_sv = float(np.linalg.svd(block, compute_uv=False)[0])
    w_in[:, 1:] = block * (hp.input_scale / largest_sv)
    w_in[:, 0] *= hp.bias_scale
    return Reservoir(w_in=w_in, w_rec=w_rec, leak_rate=hp.leak_rate, seed=seed)


def esn_update(reservoir: Reservoir, h_prev: np.ndarray,
               x: np.ndarray) -> np.ndarray:
    """One leaky-integrator state update."""
    if x.shape[-1] != reservoir.d_in or h_prev.shape[-1] != reservoir.hidden_size:
        raise ValueError("state or input dimension mismatch")
    drive = reservoir.w_in[:, 0] + reservoir.w_in[:, 1:] @ x
    updated = np.tanh(drive + reservoir.w_rec @ h_prev)
    alpha = reservoir.leak_rate
    return (1.0 - alpha) * h_prev + alpha * updated


def esn_collect_states(reservoir: Reservoir, inputs: np.ndarray,
                       h0: np.ndarray | None = None) -> np.ndarray:
    """States h(1..T) for one cycle; h(0) = 0 unless given explicitly."""
    inputs = np.asarray(inputs, dtype=float)
    t_len = inputs.shape[0]
    m = reservoir.hidden_size
    h = np.zeros(m) if h0 is None else np.asarray(h0, dtype=float)
    # input projection for the whole cycle in one multiply
    drive = inputs @ reservoir.w_in[:, 1:].T + reservoir.w_in[:, 0]
    alpha = reservoir.leak_rate
    states = np.empty((t_len, m))
    for t in range(t_len):
        h = (1.0 - alpha) * h + alpha * np.tanh(drive[t] + reservoir.w_rec @ h)
        states[t] = h
    return states


def _design_rows(inputs: np.ndarray, states: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(inputs.shape[0]), inputs, states])


def esn_fit_readout(
    reservoir: Reservoir, train: CycleDataset, readout_lambda: float,
    hyperparams: EsnHyperparams | None = None,
) -> EsnModel:
    """Ridge readout over [1; x; h] rows of all training cycles."""
    if train.n_cycles == 0:
        raise ValueError("cannot fit a readout on an empty dataset")
    blocks = []
    targets = []
    for cyc in train:
        states = esn_collect_states(reservoir, cyc.inputs)
        blocks.append(_design_rows(cyc.inputs, states))
        targets.append(cyc.targets)
    design = np.concatenate(blocks)
    y = np.concatenate(targets)
    readout = lrr_fit(design, y, readout_lambda, include_bias=False)
    hp = hyperparams or EsnHyperparams(
        hidden_size=reservoir.hidden_size,
        leak_rate=reservoir.leak_rate,
        readout_lambda=readout_lambda,
    )
    return EsnModel(reservoir=reservoir, readout=readout, hyperparams=hp)


def esn_predict(model: EsnModel, inputs: np.ndarray) -> np.ndarray:
    """Per-step predictions for one cycle (state reset at its start)."""
    inputs = np.asarray(inputs, dtype=float)
    if inputs.shape[1] != model.reservoir.d_in:
        raise ValueError(
            f"expected (T, {model.reservoir.d_in}) inputs"
        )
    states = esn_collect_states(model.reservoir, inputs)
    design = _design_rows(inputs, states)
    return design @ model.readout.weights[:, :-1].T


def tune_readout_lambda(
    reservoir: Reservoir,
    train: CycleDataset,
    grid: tuple[float, ...],
    folds: int = 10,
    seed: int = 0,
) -> tuple[float, list[tuple[float, float]]]:
    """Pick the readout ridge penalty by cycle-level k-fold CV.

    States are collected once per cycle; each fold refits only the
    closed-form readout.  Returns (best lambda, [(lambda, cv_mse), ...]);
    ties break toward the first grid entry.
    """
    if train.n_cycles < folds:
        raise ValueError("need at least as many cycles as folds")
    designs, targets = [], []
    for cyc in train:
        states = esn_collect_states(reservoir, cyc.inputs)
        designs.append(_design_rows(cyc.inputs, states))
        targets.append(cyc.targets)

    rng = rng_for(seed, "esn-readout-cv")
    assignment = np.array_split(rng.permutation(train.n_cycles), folds)
    table = []
    for lam in grid:
        fold_mses = []
        for fold_members in assignment:
            fold_set = set(int(i) for i in fold_members)
            train_design = np.concatenate(
                [d for i, d in enumerate(designs) if i not in fold_set]
            )
            train_y = np.concatenate(
                [t for i, t in enumerate(targets) if i not in fold_set]
            )
            readout = lrr_fit(train_design, train_y, lam, include_bias=False)
            cycle_mses = []
            for i in fold_set:
                pred = designs[i] @ readout.weights[:, :-1].T
                cycle_mses.append(float(np.mean((pred - targets[i]) ** 2)))
            fold_mses.append(float(np.mean(cycle_mses)))
        table.append((lam, float(np.mean(fold_mses))))
    best = min(table, key=lambda row: row[1])[0]
    return best, table
