import numpy as np
import pytest

from agingforecast.data import (
    Cycle,
    CycleDataset,
    engineer_features_realworld,
)
from agingforecast.data.cycles import (
    REALWORLD_ENGINEERED_INPUT_COLUMNS,
    REALWORLD_RAW_INPUT_COLUMNS,
    REALWORLD_RAW_TARGET_COLUMNS,
)
from agingforecast.errors import IngestionError


def raw_cycle(cid, charge, t_len, rng, f_r=None):
    t = rng.normal(300.0, 5.0, t_len)
    f_r = np.full(t_len, f_r) if f_r is not None else rng.uniform(1.5, 3.0, t_len)
    f_air = rng.uniform(5.0, 8.0, t_len)
    f_fresh = rng.uniform(0.5, 1.0, t_len)
    pd = np.linspace(20.0, 60.0, t_len) + rng.normal(0, 1.0, t_len)
    return Cycle(
        cycle_id=cid,
        inputs=np.column_stack([t, f_r, f_air, f_fresh]),
        targets=pd[:, None],
        charge_id=charge,
    )


def raw_dataset(spec, seed=0, **kwargs):
    """spec: list of (cycle_id, charge_id, length)."""
    rng = np.random.default_rng(seed)
    cycles = tuple(raw_cycle(cid, ch, ln, rng, **kwargs) for cid, ch, ln in spec)
    return CycleDataset(
        cycles=cycles,
        input_columns=REALWORLD_RAW_INPUT_COLUMNS,
        target_columns=REALWORLD_RAW_TARGET_COLUMNS,
    )


class TestEngineerFeatures:
    def test_exactly_ten_input_features(self):
        out = engineer_features_realworld(raw_dataset([(0, 1, 6), (1, 1, 8)]))
        assert out.input_columns == REALWORLD_ENGINEERED_INPUT_COLUMNS
        assert len(out.input_columns) == 10
        assert out.target_columns == ("PD",)
        # F_FRESH is not an input feature itself
        assert "F_FRESH" not in out.input_columns

    def test_cumulative_cycle_sum(self):
        ds = raw_dataset([(0, 1, 3)], f_r=2.0)
        out = engineer_features_realworld(ds)
        col = out.input_columns.index("F_CUM_CYCLE")
        np.testing.assert_allclose(out.cycles[0].inputs[:, col], [2.0, 4.0, 6.0])

    def test_last_pd_chains_cycles(self):
        ds = raw_dataset([(0, 1, 5), (1, 1, 7)])
        out = engineer_features_realworld(ds)
        col = out.input_columns.index("last_PD")
        final_pd_cycle0 = ds.cycles[0].targets[-1, 0]
        assert np.all(out.cycles[1].inputs[:, col] == final_pd_cycle0)
        # first cycle falls back to its own first reading
        first_pd = ds.cycles[0].targets[0, 0]
        assert np.all(out.cycles[0].inputs[:, col] == first_pd)

    def test_cum_cat_resets_on_charge_change_only(self):
        ds = raw_dataset([(0, 1, 4), (1, 1, 4), (2, 2, 4)], f_r=1.0)
        out = engineer_features_realworld(ds)
        col = out.input_columns.index("F_CUM_CAT")
        np.testing.assert_allclose(out.cycles[0].inputs[:, col], [1, 2, 3, 4])
        np.testing.assert_allclose(out.cycles[1].inputs[:, col], [5, 6, 7, 8])
        np.testing.assert_allclose(out.cycles[2].inputs[:, col], [1, 2, 3, 4])

    def test_cum_cycle_resets_every_cycle(self):
        ds = raw_dataset([(0, 1, 4), (1, 1, 4)], f_r=1.0)
        out = engineer_features_realworld(ds)
        col = out.input_columns.index("F_CUM_CYCLE")
        for cyc in out:
            diffs = np.diff(cyc.inputs[:, col])
            assert np.all(diffs >= 0)
            assert cyc.inputs[0, col] == 1.0

    def test_ratio_features(self):
        ds = raw_dataset([(0, 1, 5)])
        out = engineer_features_realworld(ds)
        raw = ds.cycles[0].inputs
        eng = out.cycles[0].inputs
        cols = out.input_columns
        np.testing.assert_allclose(
            eng[:, cols.index("reactant_frac")], raw[:, 1] / (raw[:, 1] + raw[:, 2])
        )
        np.testing.assert_allclose(
            eng[:, cols.index("fresh_frac")], raw[:, 3] / raw[:, 1]
        )

    def test_t_react_counts_hours(self):
        out = engineer_features_realworld(raw_dataset([(0, 1, 6)]))
        col = out.input_columns.index("t_react")
        np.testing.assert_array_equal(out.cycles[0].inputs[:, col],
                                      np.arange(6.0))

    def test_zero_flow_rejected_with_row(self):
        ds = raw_dataset([(0, 1, 4)], f_r=0.0)
        with pytest.raises(IngestionError, match="row 0"):
            engineer_features_realworld(ds)
