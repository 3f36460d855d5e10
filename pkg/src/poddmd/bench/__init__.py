"""Benchmark harness, reporting and command line interface."""

from .harness import (
    INTERP_METHODS,
    METHODS,
    ExperimentConfig,
    ResultRow,
    relative_frobenius_error,
    run_cell,
    run_experiment,
)
from .report import CSV_HEADER, emit_csv, emit_plot_script, read_csv, render_figures

__all__ = [
    "INTERP_METHODS",
    "METHODS",
    "ExperimentConfig",
    "ResultRow",
    "relative_frobenius_error",
    "run_cell",
    "run_experiment",
    "CSV_HEADER",
    "emit_csv",
    "emit_plot_script",
    "read_csv",
    "render_figures",
]
