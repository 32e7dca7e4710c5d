"""Write one CSV per experiment with its default sweep.

    python3 scripts/make_figure_tables.py [OUTDIR] [--set key=value ...]

Overrides apply to every experiment (for example ``--set run.detuning=-1e-5``).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from polarwave.config import EXPERIMENTS, parse_config
from polarwave.errors import PolarwaveError
from polarwave.experiments import run_experiment
from polarwave.table import write_csv


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("outdir", nargs="?", default="figure_tables")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    parser.add_argument("--only", choices=EXPERIMENTS, action="append", help="restrict to these experiments")
    args = parser.parse_args(argv)

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for name in args.only or EXPERIMENTS:
        start = time.perf_counter()
        try:
            table = run_experiment(parse_config("", args.overrides, experiment=name))
        except PolarwaveError as exc:
            print(f"{name}: {type(exc).__name__}: {exc}", file=sys.stderr)
            failed += 1
            continue
        path = out / f"{name}.csv"
        write_csv(table, path)
        print(f"{name:22s} {len(table):5d} rows  {time.perf_counter() - start:6.2f} s  -> {path}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
