"""Deterministic flat-binary model artifacts.

Layout: a magic line, one JSON metadata line (sorted keys), then the
named arrays in metadata order as standard .npy blocks.  No timestamps
or compression, so re-serializing the same model is byte-identical; a
zip-based container would not be.

The metadata carries the model kind, hyperparameters, the input/target
schema and its hash, the lag window, and the input standardizer.  ESN
reservoirs are not stored densely: the seed plus hyperparameters
reconstruct them exactly, only the readout weights are written.
"""

from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np

from agingforecast.errors import ConfigError

MAGIC = b"AGINGFORECAST-MODEL-1\n"


def write_artifact(path: str | Path, meta: dict, arrays: dict[str, np.ndarray]) -> None:
    meta = dict(meta)
    meta["arrays"] = sorted(arrays)
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(json.dumps(meta, sort_keys=True).encode("utf-8"))
    buf.write(b"\n")
    for name in meta["arrays"]:
        np.lib.format.write_array(
            buf, np.ascontiguousarray(arrays[name]), version=(1, 0)
        )
    Path(path).write_bytes(buf.getvalue())


def read_artifact(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise ConfigError(f"{path}: not a model artifact")
    buf = io.BytesIO(raw[len(MAGIC):])
    meta = json.loads(buf.readline().decode("utf-8"))
    arrays = {}
    for name in meta["arrays"]:
        arrays[name] = np.lib.format.read_array(buf)
    return meta, arrays
