"""Command-line driver.

Scenarios come from a flat TOML config file and/or flag overrides; figures
use built-in default configs. Exit codes: 0 success, 2 configuration error,
3 I/O failure.
"""

import argparse
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .runner import FIGURES, MODELS, ExperimentConfig, figure_command, run_experiment
from .validation import ConfigurationError

_CONFIG_KEYS = {
    "model", "lambda_bs", "eta", "window_side", "n_realizations",
    "r_min", "r_max", "r_step", "bandwidth", "master_seed", "alpha",
    "outputs", "workers", "out_dir",
}


def load_config_file(path):
    with open(path, "rb") as f:
        data = tomllib.load(f)
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigurationError(f"unknown config key(s): {sorted(unknown)}")
    if "outputs" in data:
        data["outputs"] = tuple(data["outputs"])
    return data


def build_parser():
    p = argparse.ArgumentParser(
        prog="cellpp",
        description="Simulate one-user-per-cell point processes and estimate their statistics.",
    )
    p.add_argument("--config", help="TOML config file (flat key = value)")
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--lambda", dest="lambda_bs", type=float, help="station intensity")
    p.add_argument("--eta", type=float, help="population/station density ratio (type2)")
    p.add_argument("--seed", dest="master_seed", type=int)
    p.add_argument("--realizations", dest="n_realizations", type=int)
    p.add_argument("--window-side", dest="window_side", type=float)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--workers", type=int)
    p.add_argument("--figure", choices=FIGURES, help="write the CSV bundle for a reference figure")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        settings = {}
        if args.config:
            settings.update(load_config_file(args.config))
        for key in ("model", "lambda_bs", "eta", "master_seed", "n_realizations",
                    "window_side", "out_dir", "workers"):
            val = getattr(args, key)
            if val is not None:
                settings[key] = val
        if args.figure:
            base = ExperimentConfig(**{**{"model": "type1"}, **settings})
            path = figure_command(args.figure, base)
            print(path)
            return 0
        if "model" not in settings:
            raise ConfigurationError("a model is required (--model or config file)")
        cfg = ExperimentConfig(**settings)
        res = run_experiment(cfg)
        for key, value in sorted(res.summary.items()):
            print(f"{key}: {value}")
        for name, path in sorted(res.csv_paths.items()):
            print(f"wrote {name}: {path}")
        return 0
    except (ConfigurationError, tomllib.TOMLDecodeError, TypeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
