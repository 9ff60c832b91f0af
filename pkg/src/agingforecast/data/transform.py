"""Input standardization and lag-window feature stacking."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from agingforecast.data.cycles import CycleDataset


@dataclass(frozen=True)
class Standardizer:
    """Per-column shift/scale fitted on training inputs only.

    Targets are never scaled.  Constant columns get std 1 (and a warning
    at fit time) so they map to all-zero features instead of dividing by
    zero.
    """

    means: np.ndarray
    stds: np.ndarray

    def transform(self, inputs: np.ndarray) -> np.ndarray:
        return (inputs - self.means) / self.stds

    def inverse(self, scaled: np.ndarray) -> np.ndarray:
        return scaled * self.stds + self.means


def fit_standardizer(train: CycleDataset) -> Standardizer:
    """Fit means/stds over all training rows (population statistics)."""
    if train.n_cycles == 0:
        raise ValueError("cannot fit a standardizer on an empty dataset")
    stacked = train.stacked_inputs()
    means = stacked.mean(axis=0)
    stds = stacked.std(axis=0)
    constant = stds == 0.0
    if constant.any():
        names = [train.input_columns[i] for i in np.flatnonzero(constant)]
        warnings.warn(f"constant input columns {names}: std forced to 1")
        stds = np.where(constant, 1.0, stds)
    return Standardizer(means=means, stds=stds)


def apply_standardizer(scaler: Standardizer, dataset: CycleDataset) -> CycleDataset:
    """Return a dataset with transformed inputs (targets untouched)."""
    return dataset.with_inputs([scaler.transform(c.inputs) for c in dataset])


@dataclass(frozen=True)
class WindowedView:
    """Lagged feature stacking of a cycle dataset.

    Row t (for t >= k) of cycle i carries the newest-first stack
    [x(t); x(t-1); ...; x(t-k)] of length (k+1) * d_x, aligned with
    target y(t).  The first k rows of every cycle are consumed as
    context, so each cycle loses k samples.
    """

    k: int
    cycle_ids: tuple[int, ...]
    features: tuple[np.ndarray, ...]
    targets: tuple[np.ndarray, ...]

    @property
    def n_cycles(self) -> int:
        return len(self.cycle_ids)

    @property
    def n_rows(self) -> int:
        return sum(f.shape[0] for f in self.features)

    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.concatenate(self.features, axis=0),
            np.concatenate(self.targets, axis=0),
        )

    def subset(self, indices) -> "WindowedView":
        """View restricted to the given cycle positions."""
        idx = list(indices)
        return WindowedView(
            k=self.k,
            cycle_ids=tuple(self.cycle_ids[i] for i in idx),
            features=tuple(self.features[i] for i in idx),
            targets=tuple(self.targets[i] for i in idx),
        )


def window_rows(inputs: np.ndarray, k: int) -> np.ndarray:
    """Stack k hours of history onto each row; output has T-k rows."""
    t_len, d_x = inputs.shape
    blocks = [inputs[k - j : t_len - j] for j in range(k + 1)]
    return np.concatenate(blocks, axis=1)


def window_stack(dataset: CycleDataset, k: int) -> WindowedView:
    """Build the lag-window view; cycles shorter than k+1 are dropped
    with a warning (they cannot produce a single complete window)."""
    if k < 0:
        raise ValueError("window length k must be >= 0")
    ids, feats, targs = [], [], []
    dropped = []
    for cyc in dataset:
        if cyc.length < k + 1:
            dropped.append(cyc.cycle_id)
            continue
        ids.append(cyc.cycle_id)
        feats.append(window_rows(cyc.inputs, k))
        targs.append(cyc.targets[k:])
    if dropped:
        warnings.warn(
            f"dropped {len(dropped)} cycle(s) shorter than {k + 1} h: {dropped}"
        )
    return WindowedView(
        k=k, cycle_ids=tuple(ids), features=tuple(feats), targets=tuple(targs)
    )
