"""Command-line driver: reproducible experiments emitting CSV (and figures).

Usage:
    radiilab <experiment> [--config FILE] [key=value ...]
             [--seed N] [--out PATH] [--threads N] [--plot]
    radiilab validate (--config FILE | experiment=NAME key=value ...)

Exit codes: 0 success, 1 input error, 2 resource (budget) error.  The
RADIILAB_OUTDIR environment variable redirects relative output paths.
Headers record the tool version, config hash, seed, and wall-clock; the CSV
body below the header is byte-identical for identical config and seed,
independent of --threads.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import __version__
from .config import EXPERIMENT_NAMES, ExperimentConfig, load_config
from .dataio import write_csv
from .errors import InputError, ResourceError
from .experiments import ExperimentResult, run_experiment, validate_experiment


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # input errors exit 1, not argparse's default 2
        raise InputError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="radiilab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"radiilab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENT_NAMES + ("validate",):
        p = sub.add_parser(name, help=f"run the {name} experiment" if name != "validate"
                           else "dry-run a config and report feasibility")
        p.add_argument("--config", default=None, help="key = value config file")
        p.add_argument("--seed", type=int, default=None, help="64-bit root seed")
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (affects speed only, never results)")
        p.add_argument("--plot", action="store_true",
                       help="render a figure next to the CSV output")
        p.add_argument("overrides", nargs="*", metavar="key=value",
                       help="config overrides merged over --config")
    return parser


def _resolve_out(path_str: str) -> Path:
    path = Path(path_str)
    outdir = os.environ.get("RADIILAB_OUTDIR")
    if outdir and not path.is_absolute():
        path = Path(outdir) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_result(cfg: ExperimentConfig, result: ExperimentResult, plot: bool) -> Path:
    out = _resolve_out(cfg.output_path or f"{cfg.experiment.replace('-', '_')}.csv")
    header = {
        "generator": f"radiilab {__version__}",
        "experiment": cfg.experiment,
        "config_hash": cfg.config_hash,
        "seed": cfg.seed,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    header.update(result.notes)
    write_csv(out, result.columns, result.rows, header)
    for suffix, (columns, rows) in result.extra.items():
        side = out.with_name(f"{out.stem}_{suffix}{out.suffix}")
        write_csv(side, columns, rows, header)
    if plot and result.figure is not None:
        result.figure(out.with_suffix(".png"))
    return out


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if args.command == "validate":
            cfg = load_config(None, args.config, args.overrides,
                              args.seed, args.out, args.plot)
            result = validate_experiment(cfg)
            for key, value in result.rows:
                print(f"{key} = {value}")
            if args.out:
                _write_result(cfg, result, plot=False)
            return 0
        cfg = load_config(args.command, args.config, args.overrides,
                          args.seed, args.out, args.plot)
        result = run_experiment(cfg, threads=max(1, args.threads))
        out = _write_result(cfg, result, cfg.plot)
        print(f"wrote {out}")
        return 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
