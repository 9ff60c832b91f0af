import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agingforecast.data import (
    Cycle,
    CycleDataset,
    apply_standardizer,
    fit_standardizer,
    window_stack,
)


def dataset_from_arrays(arrays, d_y=1, targets=None):
    cycles = []
    for cid, arr in enumerate(arrays):
        arr = np.asarray(arr, dtype=float)
        targ = (
            np.asarray(targets[cid], dtype=float)
            if targets is not None
            else np.zeros((arr.shape[0], d_y))
        )
        cycles.append(Cycle(cycle_id=cid, inputs=arr, targets=targ))
    d_x = cycles[0].inputs.shape[1]
    return CycleDataset(
        cycles=tuple(cycles),
        input_columns=tuple(f"x{i}" for i in range(d_x)),
        target_columns=tuple(f"y{i}" for i in range(targ.shape[1])),
    )


class TestStandardizer:
    def test_already_standard_noop(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((4000, 3))
        x = (x - x.mean(axis=0)) / x.std(axis=0)
        ds = dataset_from_arrays([x])
        scaler = fit_standardizer(ds)
        np.testing.assert_allclose(scaler.means, 0.0, atol=1e-12)
        np.testing.assert_allclose(scaler.stds, 1.0, rtol=1e-12)

    def test_constant_column_warns_and_zeroes(self):
        x = np.column_stack([np.full(10, 7.0), np.arange(10.0)])
        ds = dataset_from_arrays([x])
        with pytest.warns(UserWarning, match="constant"):
            scaler = fit_standardizer(ds)
        assert scaler.stds[0] == 1.0
        out = apply_standardizer(scaler, ds)
        assert np.all(out.cycles[0].inputs[:, 0] == 0.0)

    def test_two_pass_statistics_oracle(self):
        rng = np.random.default_rng(1)
        ds = dataset_from_arrays(
            [rng.normal(5.0, 3.0, size=(50, 4)) for _ in range(3)]
        )
        scaler = fit_standardizer(ds)
        out = apply_standardizer(scaler, ds)
        stacked = np.concatenate([c.inputs for c in out])
        # independent two-pass mean/variance
        n = stacked.shape[0]
        mean = np.array([sum(stacked[:, j]) / n for j in range(4)])
        var = np.array(
            [sum((stacked[:, j] - mean[j]) ** 2) / n for j in range(4)]
        )
        np.testing.assert_allclose(mean, 0.0, atol=1e-10)
        np.testing.assert_allclose(var, 1.0, atol=1e-10)

    def test_targets_never_scaled(self):
        rng = np.random.default_rng(2)
        targ = [rng.normal(50.0, 10.0, size=(30, 2))]
        ds = dataset_from_arrays([rng.standard_normal((30, 3))], targets=targ)
        out = apply_standardizer(fit_standardizer(ds), ds)
        np.testing.assert_array_equal(out.cycles[0].targets, targ[0])

    def test_round_trip_identity(self):
        rng = np.random.default_rng(3)
        ds = dataset_from_arrays([rng.normal(2.0, 5.0, size=(40, 3))])
        scaler = fit_standardizer(ds)
        x = ds.cycles[0].inputs
        back = scaler.inverse(scaler.transform(x))
        np.testing.assert_allclose(back, x, atol=1e-12)

    def test_empty_dataset_rejected(self):
        ds = CycleDataset(cycles=(), input_columns=("x0",), target_columns=("y0",))
        with pytest.raises(ValueError):
            fit_standardizer(ds)


class TestWindowStack:
    def test_k_zero_is_identity(self):
        rng = np.random.default_rng(0)
        ds = dataset_from_arrays([rng.standard_normal((6, 2))])
        view = window_stack(ds, 0)
        np.testing.assert_array_equal(view.features[0], ds.cycles[0].inputs)
        np.testing.assert_array_equal(view.targets[0], ds.cycles[0].targets)

    def test_shapes_match_contract(self):
        # k=24 with 6 inputs: 150 features; a 200 h cycle keeps 176 rows
        rng = np.random.default_rng(1)
        ds = dataset_from_arrays([rng.standard_normal((200, 6))])
        view = window_stack(ds, 24)
        assert view.features[0].shape == (176, 150)
        assert view.targets[0].shape == (176, 1)

    @given(st.integers(0, 6), st.integers(0, 4), st.integers(0, 2))
    @settings(max_examples=30)
    def test_brute_force_index_oracle(self, t_extra, j, col):
        rng = np.random.default_rng(42)
        k, d_x = 4, 3
        x = rng.standard_normal((12, d_x))
        ds = dataset_from_arrays([x])
        view = window_stack(ds, k)
        t = k + t_extra
        j = min(j, k)
        # feature block j holds x(t - j), newest first
        assert view.features[0][t - k, j * d_x + col] == x[t - j, col]

    def test_short_cycles_dropped_with_warning(self):
        rng = np.random.default_rng(2)
        ds = dataset_from_arrays(
            [rng.standard_normal((3, 2)), rng.standard_normal((10, 2))]
        )
        with pytest.warns(UserWarning, match="dropped"):
            view = window_stack(ds, 5)
        assert view.cycle_ids == (1,)

    def test_first_block_equals_unwindowed_inputs(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((30, 4))
        ds = dataset_from_arrays([x])
        view = window_stack(ds, 7)
        np.testing.assert_array_equal(view.features[0][:, :4], x[7:])
