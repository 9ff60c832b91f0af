"""Command-line interface.

Subcommands:

* ``generate``       run the reactor simulator, write a dataset CSV
* ``train``          fit one model kind on a dataset (or its train split)
* ``evaluate``       metrics report + per-cycle prediction traces
* ``search``         grid or random hyperparameter search, CV table out
* ``learning-curve`` nested-subset training-size study

Every run writes a ``<artifact>.manifest.json`` with the seed and a
config hash; reruns with identical inputs produce byte-identical
artifacts.  Failures exit non-zero with one JSON error line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from agingforecast.bench import configfile
from agingforecast.bench.curves import learning_curve
from agingforecast.bench.persist import load_trained_model, save_trained_model
from agingforecast.bench.runners import (
    DEFAULT_EVAL_START,
    MODEL_KINDS,
    evaluate_model,
    prediction_traces,
    train_model,
)
from agingforecast.bench.search import (
    GridAxis,
    IntRangeAxis,
    LogUniformAxis,
    SearchSpace,
    UniformAxis,
    default_space,
    grid_search,
    random_search,
)
from agingforecast.data.csvio import read_csv, write_csv
from agingforecast.data.cycles import (
    REALWORLD_RAW_INPUT_COLUMNS,
    REALWORLD_RAW_TARGET_COLUMNS,
    SYNTHETIC_INPUT_COLUMNS,
    SYNTHETIC_TARGET_COLUMNS,
)
from agingforecast.data.realworld import engineer_features_realworld
from agingforecast.data.split import SplitSpec, split_by_cycles
from agingforecast.errors import AgingForecastError, ConfigError
from agingforecast.reactor.chemistry import KineticParams
from agingforecast.reactor.simulate import (
    GenerationConfig,
    ParameterRanges,
    generate_dataset,
)


def _fmt(value: float) -> str:
    return repr(float(value))


# ---------------------------------------------------------------------------
# shared helpers

def parse_split_spec(text: str | None) -> SplitSpec | None:
    """Mini-grammar: ``random:<train_ratio>:<seed>``,
    ``ids:<train csv>|<test csv>``, ``test-ids:<csv>``, ``charge:<id>``."""
    if text is None:
        return None
    mode, _, rest = text.partition(":")
    if mode == "random":
        ratio, _, seed = rest.partition(":")
        if not seed:
            raise ConfigError("random split spec is random:<train_ratio>:<seed>")
        return SplitSpec.random(float(ratio), int(seed))
    if mode == "ids":
        train_part, sep, test_part = rest.partition("|")
        if not sep:
            raise ConfigError("ids split spec is ids:<train csv>|<test csv>")
        train_ids = tuple(int(v) for v in train_part.split(",") if v != "")
        test_ids = tuple(int(v) for v in test_part.split(",") if v != "")
        return SplitSpec.ids(test_ids=test_ids, train_ids=train_ids)
    if mode == "test-ids":
        return SplitSpec.ids(
            test_ids=tuple(int(v) for v in rest.split(",") if v != "")
        )
    if mode == "charge":
        return SplitSpec.charge(int(rest))
    raise ConfigError(f"unknown split spec '{text}'")


def load_dataset(path: str, schema: str):
    """Read a dataset CSV; 'realworld' runs the feature pipeline too."""
    if schema == "synthetic":
        return read_csv(path, SYNTHETIC_INPUT_COLUMNS, SYNTHETIC_TARGET_COLUMNS)
    if schema == "realworld":
        raw = read_csv(
            path, REALWORLD_RAW_INPUT_COLUMNS, REALWORLD_RAW_TARGET_COLUMNS
        )
        return engineer_features_realworld(raw)
    raise ConfigError(f"unknown schema '{schema}'")


def _normalize_hyperparams(mapping: dict) -> dict:
    out = dict(mapping)
    sizes = out.get("hidden_sizes")
    if isinstance(sizes, str):
        out["hidden_sizes"] = tuple(int(v) for v in sizes.split("x"))
    elif isinstance(sizes, int):
        out["hidden_sizes"] = (sizes,)
    return out


def _read_hyperparams(arg: str | None) -> dict:
    if arg is None:
        return {}
    path = Path(arg)
    if path.exists():
        return _normalize_hyperparams(configfile.parse_flat_config(path))
    if "=" in arg:
        return _normalize_hyperparams(configfile.parse_inline_config(arg))
    raise ConfigError(f"--hyperparams '{arg}' is neither a file nor k=v pairs")


# ---------------------------------------------------------------------------
# generate

_RANGE_KEYS = {
    "flow": ("flow_min", "flow_max"),
    "pressure": ("pressure_min", "pressure_max"),
    "temperature": ("temperature_min", "temperature_max"),
    "mu_olef": ("mu_olef_min", "mu_olef_max"),
}
_KINETIC_KEYS = ("k1", "e1", "k2", "e2", "ka", "ea", "volume")


def generation_config_from_mapping(cfg: dict) -> GenerationConfig:
    if "seed" not in cfg:
        raise ConfigError("generation config needs a 'seed' key")
    ranges_kwargs = {}
    for field_name, (lo_key, hi_key) in _RANGE_KEYS.items():
        if lo_key in cfg or hi_key in cfg:
            if not (lo_key in cfg and hi_key in cfg):
                raise ConfigError(f"need both {lo_key} and {hi_key}")
            ranges_kwargs[field_name] = (float(cfg[lo_key]), float(cfg[hi_key]))
    kinetics_kwargs = {
        key: float(cfg[key]) for key in _KINETIC_KEYS if key in cfg
    }
    known = (
        {"seed", "cycles", "years", "rk4_substeps", "activity_substeps",
         "eor_conversion", "cycle_hard_cap_hours"}
        | {k for pair in _RANGE_KEYS.values() for k in pair}
        | set(_KINETIC_KEYS)
    )
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown generation config keys: {sorted(unknown)}")
    return GenerationConfig(
        seed=int(cfg["seed"]),
        max_cycles=int(cfg["cycles"]) if "cycles" in cfg else None,
        horizon_years=(
            float(cfg["years"]) if "years" in cfg
            else (None if "cycles" in cfg else 50.0)
        ),
        ranges=ParameterRanges(**ranges_kwargs),
        kinetics=KineticParams(**kinetics_kwargs),
        rk4_substeps=int(cfg.get("rk4_substeps", 256)),
        activity_substeps=int(cfg.get("activity_substeps", 32)),
        eor_conversion=float(cfg.get("eor_conversion", 0.75)),
        cycle_hard_cap_hours=int(cfg.get("cycle_hard_cap_hours", 10_000)),
    )


def cmd_generate(args) -> int:
    cfg = configfile.parse_flat_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    gen_config = generation_config_from_mapping(cfg)
    result = generate_dataset(gen_config)
    dataset = result.to_cycle_dataset()
    write_csv(dataset, args.out)
    configfile.write_manifest(
        args.out,
        {
            "command": "generate",
            "seed": gen_config.seed,
            "config_hash": configfile.config_hash(cfg),
            "cycles": dataset.n_cycles,
            "rows": dataset.total_points,
            "max_rel_mass_flow_error": result.max_rel_mass_flow_error,
            "clamp_events": result.clamp_events,
        },
    )
    print(f"wrote {dataset.n_cycles} cycles / {dataset.total_points} rows to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# train / evaluate

def cmd_train(args) -> int:
    dataset = load_dataset(args.data, args.schema)
    spec = parse_split_spec(args.split)
    train_ds = dataset if spec is None else split_by_cycles(dataset, spec)[0]
    overrides = _read_hyperparams(args.hyperparams)
    model = train_model(args.model, train_ds, hyperparams=overrides,
                        seed=args.seed)
    save_trained_model(args.out, model)
    configfile.write_manifest(
        args.out,
        {
            "command": "train",
            "model": args.model,
            "seed": args.seed,
            "data": str(args.data),
            "split": args.split,
            "config_hash": configfile.config_hash(
                {"model": args.model, "seed": args.seed,
                 "hyperparams": model.hyperparams, "split": args.split}
            ),
            "train_cycles": train_ds.n_cycles,
        },
    )
    print(f"trained {args.model} on {train_ds.n_cycles} cycles -> {args.out}")
    return 0


def _write_report_csv(path, model_kind, sections) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "target", "split", "mse", "nmse", "mae", "r2"])
        for split_name, report in sections:
            for row in report.rows:
                writer.writerow(
                    [model_kind, row.target, split_name, _fmt(row.mse),
                     _fmt(row.nmse), _fmt(row.mae), _fmt(row.r_squared)]
                )


def cmd_evaluate(args) -> int:
    model = load_trained_model(args.model)
    dataset = load_dataset(args.data, args.schema)
    if dataset.input_columns != model.input_columns:
        raise ConfigError("dataset schema does not match the model artifact")
    spec = parse_split_spec(args.split)
    if spec is None:
        sections = [("all", dataset)]
    else:
        train_ds, test_ds = split_by_cycles(dataset, spec)
        sections = [("train", train_ds), ("test", test_ds)]
    reports = [
        (name, evaluate_model(model, ds, args.eval_start))
        for name, ds in sections
    ]
    _write_report_csv(args.out, model.kind, reports)
    configfile.write_manifest(
        args.out,
        {
            "command": "evaluate",
            "model_artifact": str(args.model),
            "data": str(args.data),
            "split": args.split,
            "eval_start": args.eval_start,
            "config_hash": configfile.config_hash(
                {"model": str(args.model), "data": str(args.data),
                 "split": args.split, "eval_start": args.eval_start}
            ),
        },
    )
    if args.traces:
        with Path(args.traces).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["split", "cycle_id", "t", "target", "y_true", "y_pred"])
            for split_name, ds in sections:
                for row in prediction_traces(model, ds, args.eval_start):
                    writer.writerow([split_name, row[0], row[1], row[2],
                                     _fmt(row[3]), _fmt(row[4])])
    for split_name, report in reports:
        mean = report.mean
        print(
            f"{split_name}: mse {mean.mse:.6g} nmse {mean.nmse:.6g} "
            f"mae {mean.mae:.6g} r2 {mean.r_squared:.6g}"
        )
    return 0


# ---------------------------------------------------------------------------
# search

_AXIS_PARSERS = {
    "grid": lambda body: GridAxis(tuple(configfile.coerce(v) for v in body.split(","))),
    "uniform": lambda body: UniformAxis(*(float(v) for v in body.split(","))),
    "loguniform": lambda body: LogUniformAxis(*(float(v) for v in body.split(","))),
    "int": lambda body: IntRangeAxis(*(int(v) for v in body.split(","))),
}


def space_from_mapping(cfg: dict) -> SearchSpace:
    """Axes are ``name = grid:v1,v2`` / ``uniform:lo,hi`` /
    ``loguniform:lo,hi`` / ``int:lo,hi``; plus optional ``budget`` and
    ``cv_folds`` keys."""
    axes = {}
    budget = cfg.pop("budget", None)
    cv_folds = cfg.pop("cv_folds", 10)
    for name, value in cfg.items():
        if not isinstance(value, str) or ":" not in value:
            raise ConfigError(f"axis '{name}' must look like 'grid:v1,v2,...'")
        kind, _, body = value.partition(":")
        if kind not in _AXIS_PARSERS:
            raise ConfigError(f"unknown axis type '{kind}' for '{name}'")
        axes[name] = _AXIS_PARSERS[kind](body)
    return SearchSpace(axes=axes, budget=budget, cv_folds=int(cv_folds))


def cmd_search(args) -> int:
    dataset = load_dataset(args.data, args.schema)
    spec = parse_split_spec(args.split)
    train_ds = dataset if spec is None else split_by_cycles(dataset, spec)[0]
    if args.space:
        space = space_from_mapping(configfile.parse_flat_config(args.space))
    else:
        space = default_space(args.model)
    if args.mode == "grid":
        result = grid_search(space, train_ds, args.model, seed=args.seed,
                             eval_start=args.eval_start)
    else:
        budget = args.budget or space.budget
        if budget is None:
            raise ConfigError("random search needs --budget (or a space budget)")
        result = random_search(space, budget, train_ds, args.model,
                               seed=args.seed, eval_start=args.eval_start)
    with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["candidate", "status", "score", "params"])
        for entry in result.table:
            writer.writerow(
                [
                    entry.index,
                    entry.status,
                    "" if entry.score is None else _fmt(entry.score),
                    json.dumps(entry.params, sort_keys=True, default=str),
                ]
            )
    configfile.write_manifest(
        args.out,
        {
            "command": "search",
            "model": args.model,
            "mode": args.mode,
            "seed": args.seed,
            "best_params": result.best_params,
            "best_score": result.best_score,
            "config_hash": configfile.config_hash(
                {"model": args.model, "mode": args.mode, "seed": args.seed,
                 "data": str(args.data), "split": args.split}
            ),
        },
    )
    print(json.dumps({"best_params": result.best_params,
                      "best_score": result.best_score}, sort_keys=True,
                     default=str))
    return 0


# ---------------------------------------------------------------------------
# learning curve

def cmd_learning_curve(args) -> int:
    cfg = configfile.parse_flat_config(args.config)
    data_path = cfg.pop("data", None)
    if data_path is None:
        raise ConfigError("learning-curve config needs a 'data' key")
    schema = cfg.pop("schema", "synthetic")
    models = [m.strip() for m in str(cfg.pop("models", "lrr")).split(",")]
    for kind in models:
        if kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind '{kind}'")
    fractions = [float(v) for v in str(cfg.pop("fractions", "1.0")).split(",")]
    split_text = cfg.pop("split", None)
    if split_text is None:
        raise ConfigError("learning-curve config needs a 'split' key")
    seed = int(cfg.pop("seed", 0))
    eval_start = int(cfg.pop("eval_start", DEFAULT_EVAL_START))
    overrides: dict[str, dict] = {}
    for key in list(cfg):
        if "." in key:
            kind, _, hp_key = key.partition(".")
            if kind not in MODEL_KINDS:
                raise ConfigError(f"unknown model in override '{key}'")
            overrides.setdefault(kind, {})[hp_key] = cfg.pop(key)
    if cfg:
        raise ConfigError(f"unknown learning-curve keys: {sorted(cfg)}")
    overrides = {k: _normalize_hyperparams(v) for k, v in overrides.items()}

    dataset = load_dataset(str(data_path), str(schema))
    points = learning_curve(
        dataset, fractions, models, parse_split_spec(str(split_text)),
        seed=seed, eval_start=eval_start, hyperparams=overrides,
    )
    with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "fraction", "split", "target", "metric", "value"])
        for p in points:
            writer.writerow(
                [p.model, _fmt(p.fraction), p.split, p.target, p.metric,
                 _fmt(p.value)]
            )
    configfile.write_manifest(
        args.out,
        {
            "command": "learning-curve",
            "seed": seed,
            "models": models,
            "fractions": fractions,
            "config_hash": configfile.config_hash(
                {"data": str(data_path), "models": models,
                 "fractions": fractions, "seed": seed, "split": split_text}
            ),
        },
    )
    print(f"wrote {len(points)} learning-curve rows to {args.out}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agingforecast",
        description="Degradation-cycle forecasting toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate a synthetic dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the config seed")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="fit a model")
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--schema", default="synthetic",
                   choices=("synthetic", "realworld"))
    p.add_argument("--hyperparams", default=None,
                   help="flat config file or inline k=v,k=v")
    p.add_argument("--split", default=None,
                   help="train on the train side of this split")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--schema", default="synthetic",
                   choices=("synthetic", "realworld"))
    p.add_argument("--split", default=None)
    p.add_argument("--eval-start", type=int, default=DEFAULT_EVAL_START)
    p.add_argument("--traces", default=None,
                   help="also write per-cycle prediction traces here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("search", help="hyperparameter search")
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--schema", default="synthetic",
                   choices=("synthetic", "realworld"))
    p.add_argument("--mode", default="grid", choices=("grid", "random"))
    p.add_argument("--space", default=None, help="flat axis config file")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--split", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eval-start", type=int, default=DEFAULT_EVAL_START)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("learning-curve", help="training-size study")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_learning_curve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AgingForecastError, ValueError, KeyError, OSError) as err:
        print(json.dumps({"error": f"{type(err).__name__}: {err}"}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
