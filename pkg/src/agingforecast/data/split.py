"""Cycle-disjoint train/test splitting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from agingforecast.data.cycles import CycleDataset


@dataclass(frozen=True)
class SplitSpec:
    """How to partition a dataset into train and test cycles.

    Exactly one mode applies:

    * ``random``: seeded shuffle, ``round(train_ratio * n)`` cycles train.
    * ``ids``: explicit test ids (train is the complement unless train
      ids are also given).
    * ``charge``: all cycles of ``test_charge`` become the test set.
    """

    mode: str
    train_ratio: float | None = None
    seed: int | None = None
    train_ids: tuple[int, ...] | None = None
    test_ids: tuple[int, ...] | None = None
    test_charge: int | None = None

    def __post_init__(self):
        if self.mode == "random":
            if self.train_ratio is None or self.seed is None:
                raise ValueError("random split needs train_ratio and seed")
            if not 0.0 < self.train_ratio < 1.0:
                raise ValueError("train_ratio must lie in (0, 1)")
        elif self.mode == "ids":
            if self.test_ids is None:
                raise ValueError("ids split needs test_ids")
        elif self.mode == "charge":
            if self.test_charge is None:
                raise ValueError("charge split needs test_charge")
        else:
            raise ValueError(f"unknown split mode '{self.mode}'")

    @classmethod
    def random(cls, train_ratio: float, seed: int) -> "SplitSpec":
        return cls(mode="random", train_ratio=train_ratio, seed=seed)

    @classmethod
    def ids(cls, test_ids, train_ids=None) -> "SplitSpec":
        return cls(
            mode="ids",
            test_ids=tuple(test_ids),
            train_ids=None if train_ids is None else tuple(train_ids),
        )

    @classmethod
    def charge(cls, test_charge: int) -> "SplitSpec":
        return cls(mode="charge", test_charge=test_charge)


def split_by_cycles(
    dataset: CycleDataset, spec: SplitSpec,
) -> tuple[CycleDataset, CycleDataset]:
    """Partition into cycle-disjoint (train, test) datasets.

    Cycle order within each side follows the original dataset order, so
    the split is a pure function of (dataset, spec).
    """
    all_ids = list(dataset.cycle_ids)
    if spec.mode == "random":
        rng = np.random.default_rng(spec.seed)
        perm = rng.permutation(len(all_ids))
        n_train = int(round(spec.train_ratio * len(all_ids)))
        if n_train == 0 or n_train == len(all_ids):
            raise ValueError("split leaves one side empty")
        train_set = {all_ids[i] for i in perm[:n_train]}
        test_set = set(all_ids) - train_set
    elif spec.mode == "ids":
        known = set(all_ids)
        test_set = set(spec.test_ids)
        train_set = (
            set(spec.train_ids) if spec.train_ids is not None else known - test_set
        )
        unknown = (test_set | train_set) - known
        if unknown:
            raise ValueError(f"unknown cycle ids: {sorted(unknown)}")
        overlap = test_set & train_set
        if overlap:
            raise ValueError(f"cycle ids in both splits: {sorted(overlap)}")
    else:  # charge
        test_set = {
            c.cycle_id for c in dataset if c.charge_id == spec.test_charge
        }
        if not test_set:
            raise ValueError(f"no cycles with charge {spec.test_charge}")
        train_set = set(all_ids) - test_set
        if not train_set:
            raise ValueError("all cycles share the test charge")
    return dataset.subset(train_set), dataset.subset(test_set)
