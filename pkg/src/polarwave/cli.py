"""``polarwave <experiment> [--config FILE] [--set key=value ...] [--out FILE]``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .config import EXPERIMENTS, RunConfig, parse_config
from .errors import PolarwaveError
from .experiments import run_experiment, worker_count
from .table import encode_csv, write_csv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polarwave", description="Emit polariton sweep tables as CSV.")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", metavar="FILE", help="flat key = value config file")
    parser.add_argument(
        "--set",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        dest="overrides",
        help="override one config key; repeatable, wins over the file",
    )
    parser.add_argument("--out", metavar="FILE", help="CSV destination (default: output key, else stdout)")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    text = ""
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    return parse_config(text, args.overrides, experiment=args.experiment)


def _fail(kind: str, message: str) -> int:
    text = " ".join(str(message).split())
    print(f"error: {kind}: {text}", file=sys.stderr)
    return 1


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        worker_count()  # reject a malformed POLARWAVE_THREADS even when the sweep stays serial
        try:
            table = run_experiment(cfg)
        except PolarwaveError as exc:
            return _fail(type(exc).__name__, f"{cfg.experiment}: {exc}")
        out = args.out or cfg.output_path
        if out:
            write_csv(table, out)
        else:
            sys.stdout.write(encode_csv(table))
    except PolarwaveError as exc:
        return _fail(type(exc).__name__, str(exc))
    except OSError as exc:
        return _fail("IoError", str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
