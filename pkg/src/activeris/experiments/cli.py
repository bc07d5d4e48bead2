"""Command-line entry point.

Exit codes: 0 success, 2 invalid configuration, 3 model or solver
failure (including partially failed sweeps), 4 I/O error.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from ..errors import ActiveRISError, ConfigError
from .config import load_config
from .csvio import emit_csv
from .runners import EXPERIMENTS, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4
OUTPUT_ENV = "ACTIVERIS_OUTPUT_DIR"

log = logging.getLogger("activeris")


def _parser():
    p = argparse.ArgumentParser(prog="activeris", description="Active RIS experiments")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write its CSV")
    run.add_argument("--experiment", "-e", help="experiment id (overrides experiment.id)")
    run.add_argument("--config", "-c", help="TOML configuration file")
    run.add_argument("--seed", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--out", "-o", help="output CSV path ('-' for stdout)")
    run.add_argument("--full-scale", action="store_true", default=None, help="use the full-size defaults")
    run.add_argument("--workers", type=int, help="parallel processes for MIMO trials")
    run.add_argument("--record-time", action="store_true", help="add wall time to the metadata")

    sub.add_parser("list-experiments", help="list experiment ids")

    val = sub.add_parser("validate", help="check a configuration without running it")
    val.add_argument("--config", "-c", required=True)
    val.add_argument("--experiment", "-e")
    return p


def _output_path(spec):
    if spec.out == "-":
        return None
    name = spec.out or f"{spec.id}.csv"
    base = os.environ.get(OUTPUT_ENV)
    if base and not Path(name).is_absolute():
        return Path(base) / name
    return Path(name)


def _run(args):
    spec = load_config(
        args.config,
        args.experiment,
        trials=args.trials,
        seed=args.seed,
        out=args.out,
        full_scale=args.full_scale,
        workers=args.workers,
        record_time=args.record_time or None,
    )
    table = run_experiment(spec)
    path = _output_path(spec)
    if path is None:
        from .csvio import format_csv

        sys.stdout.write(format_csv(table))
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        emit_csv(table, path)
        log.info("wrote %s", path)
    if table.failures:
        log.error("%d sweep point(s) failed; see the failed.* metadata", table.failures)
        return EXIT_SOLVER
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "list-experiments":
            for exp in EXPERIMENTS.values():
                print(f"{exp.id:18s} {exp.description}")
            return EXIT_OK
        if args.command == "validate":
            spec = load_config(args.config, args.experiment)
            print(f"{args.config}: ok ({spec.id}, {spec.trials} trials, seed {spec.seed})")
            return EXIT_OK
        return _run(args)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except ActiveRISError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_SOLVER
    except ValueError as exc:
        log.error("invalid value: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
