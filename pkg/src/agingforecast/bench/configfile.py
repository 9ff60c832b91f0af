"""Flat key-value config files, config hashing, and run manifests.

Config syntax: one ``key = value`` per line, ``#`` comments, blank lines
ignored.  Values are coerced to bool ("true"/"false"), None ("none"),
int, float, or kept as strings; list-valued keys stay comma-separated
strings for the consumer to split.  Dotted keys (``lstm.max_epochs``)
express per-model overrides.

Every CLI artifact gets a sidecar ``<artifact>.manifest.json`` holding
the command, the seed, and a hash of the effective configuration, so a
rerun with identical inputs is verifiably identical.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from agingforecast.errors import ConfigError


def coerce(text: str):
    text = text.strip()
    low = text.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    if low in ("none", "null"):
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_flat_config(path: str | Path) -> dict:
    out: dict = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{path}:{line_no}: empty key")
        if key in out:
            raise ConfigError(f"{path}:{line_no}: duplicate key '{key}'")
        out[key] = coerce(value)
    return out


def parse_inline_config(text: str) -> dict:
    """Parse ``k=v,k=v`` command-line hyperparameter strings."""
    out: dict = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"expected 'key=value' in '{part}'")
        key, _, value = part.partition("=")
        out[key.strip()] = coerce(value)
    return out


def config_hash(mapping: dict) -> str:
    canon = json.dumps(mapping, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def manifest_path(artifact: str | Path) -> Path:
    return Path(str(artifact) + ".manifest.json")


def write_manifest(artifact: str | Path, payload: dict) -> Path:
    path = manifest_path(artifact)
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=1, default=str) + "\n",
        encoding="utf-8",
    )
    return path
