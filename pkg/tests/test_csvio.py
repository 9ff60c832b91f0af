import numpy as np
import pytest

from agingforecast.data import Cycle, CycleDataset, read_csv, write_csv
from agingforecast.data.cycles import (
    SYNTHETIC_INPUT_COLUMNS,
    SYNTHETIC_TARGET_COLUMNS,
)
from agingforecast.errors import IngestionError
from agingforecast.reactor import GenerationConfig, generate_dataset


def random_dataset(rng, n_cycles=3, with_charge=False, d_x=4, d_y=2):
    cycles = []
    for cid in range(n_cycles):
        t_len = int(rng.integers(3, 9))
        cycles.append(
            Cycle(
                cycle_id=cid,
                inputs=rng.standard_normal((t_len, d_x)),
                targets=rng.standard_normal((t_len, d_y)),
                charge_id=(cid // 2 + 1) if with_charge else None,
            )
        )
    return CycleDataset(
        cycles=tuple(cycles),
        input_columns=tuple(f"x{i}" for i in range(d_x)),
        target_columns=tuple(f"y{i}" for i in range(d_y)),
    )


class TestRoundTrip:
    def test_random_dataset_round_trips_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        ds = random_dataset(rng)
        path = tmp_path / "ds.csv"
        write_csv(ds, path)
        back = read_csv(path, ds.input_columns, ds.target_columns)
        assert back.cycle_ids == ds.cycle_ids
        for a, b in zip(ds, back):
            np.testing.assert_array_equal(a.inputs, b.inputs)
            np.testing.assert_array_equal(a.targets, b.targets)

    def test_charge_ids_survive(self, tmp_path):
        ds = random_dataset(np.random.default_rng(1), with_charge=True)
        path = tmp_path / "ds.csv"
        write_csv(ds, path)
        back = read_csv(path, ds.input_columns, ds.target_columns)
        assert [c.charge_id for c in back] == [c.charge_id for c in ds]

    def test_header_only_file_is_empty_dataset(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("cycle_id,t,x0,y0\n", encoding="utf-8")
        ds = read_csv(path, ("x0",), ("y0",))
        assert ds.n_cycles == 0

    def test_generator_output_ingests_with_synthetic_schema(self, tmp_path):
        res = generate_dataset(GenerationConfig(seed=5, max_cycles=2,
                                                horizon_years=None))
        ds = res.to_cycle_dataset()
        path = tmp_path / "syn.csv"
        write_csv(ds, path)
        back = read_csv(path, SYNTHETIC_INPUT_COLUMNS, SYNTHETIC_TARGET_COLUMNS)
        assert back.n_cycles == 2
        for a, b in zip(ds, back):
            np.testing.assert_array_equal(a.inputs, b.inputs)
            np.testing.assert_array_equal(a.targets, b.targets)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert header == "cycle_id,t,p_mbar,T_C,F_kgph,mu_olef_pct,mu_O2_pct,C_pct,S_pct"


class TestIngestionErrors:
    def test_missing_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("cycle_id,t,x0\n0,0,1.0\n", encoding="utf-8")
        with pytest.raises(IngestionError, match="y0"):
            read_csv(path, ("x0",), ("y0",))

    def test_nan_cell_named(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "cycle_id,t,x0,y0\n0,0,1.0,2.0\n0,1,nan,2.0\n", encoding="utf-8"
        )
        with pytest.raises(IngestionError, match="row 3"):
            read_csv(path, ("x0",), ("y0",))

    def test_non_monotonic_t_named(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "cycle_id,t,x0,y0\n0,0,1.0,2.0\n0,0,1.0,2.0\n", encoding="utf-8"
        )
        with pytest.raises(IngestionError, match="non-monotonic"):
            read_csv(path, ("x0",), ("y0",))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "none.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(IngestionError, match="header"):
            read_csv(path, ("x0",), ("y0",))
