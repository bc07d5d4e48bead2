"""Configured, seeded experiment runs with CSV output."""

from .config import ExperimentSpec, load_config, parse_config
from .csvio import Column, ResultTable, emit_csv, format_csv, parse_csv, read_csv
from .runners import EXPERIMENTS, run_experiment

__all__ = [
    "EXPERIMENTS",
    "Column",
    "ExperimentSpec",
    "ResultTable",
    "emit_csv",
    "format_csv",
    "load_config",
    "parse_config",
    "parse_csv",
    "read_csv",
    "run_experiment",
]
