import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agingforecast.data import Cycle, CycleDataset, SplitSpec, split_by_cycles


def toy_dataset(n=10, charges=None):
    cycles = []
    for cid in range(n):
        cycles.append(
            Cycle(
                cycle_id=cid,
                inputs=np.full((4, 2), float(cid)),
                targets=np.zeros((4, 1)),
                charge_id=None if charges is None else charges[cid],
            )
        )
    return CycleDataset(cycles=tuple(cycles), input_columns=("a", "b"),
                        target_columns=("y",))


class TestRandomSplit:
    def test_sizes_match_published_protocol(self):
        ds = toy_dataset(2153)
        train, test = split_by_cycles(ds, SplitSpec.random(0.9, seed=0))
        assert train.n_cycles == 1938
        assert test.n_cycles == 215

    def test_seed_deterministic(self):
        ds = toy_dataset(20)
        a = split_by_cycles(ds, SplitSpec.random(0.8, seed=5))
        b = split_by_cycles(ds, SplitSpec.random(0.8, seed=5))
        assert a[0].cycle_ids == b[0].cycle_ids
        assert a[1].cycle_ids == b[1].cycle_ids

    @given(st.integers(0, 10_000))
    @settings(max_examples=100)
    def test_partition_property(self, seed):
        ds = toy_dataset(13)
        train, test = split_by_cycles(ds, SplitSpec.random(0.7, seed=seed))
        assert set(train.cycle_ids) | set(test.cycle_ids) == set(ds.cycle_ids)
        assert set(train.cycle_ids) & set(test.cycle_ids) == set()
        assert train.n_cycles + test.n_cycles == ds.n_cycles


class TestExplicitIds:
    def test_exact_partition(self):
        ds = toy_dataset(3)
        train, test = split_by_cycles(ds, SplitSpec.ids(test_ids=(2,),
                                                        train_ids=(0, 1)))
        assert train.cycle_ids == (0, 1)
        assert test.cycle_ids == (2,)

    def test_complement_when_train_omitted(self):
        ds = toy_dataset(5)
        train, test = split_by_cycles(ds, SplitSpec.ids(test_ids=(1, 3)))
        assert train.cycle_ids == (0, 2, 4)

    def test_overlap_rejected(self):
        ds = toy_dataset(4)
        with pytest.raises(ValueError, match="both"):
            split_by_cycles(ds, SplitSpec.ids(test_ids=(1,), train_ids=(1, 2)))

    def test_unknown_ids_rejected(self):
        ds = toy_dataset(4)
        with pytest.raises(ValueError, match="unknown"):
            split_by_cycles(ds, SplitSpec.ids(test_ids=(99,)))


class TestChargeSplit:
    def test_designated_charge_becomes_test(self):
        ds = toy_dataset(9, charges=[1, 1, 1, 2, 2, 2, 3, 3, 3])
        train, test = split_by_cycles(ds, SplitSpec.charge(3))
        assert test.cycle_ids == (6, 7, 8)
        assert train.cycle_ids == (0, 1, 2, 3, 4, 5)

    def test_missing_charge_rejected(self):
        ds = toy_dataset(4, charges=[1, 1, 2, 2])
        with pytest.raises(ValueError):
            split_by_cycles(ds, SplitSpec.charge(9))
