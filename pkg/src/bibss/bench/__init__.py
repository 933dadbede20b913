"""Experiment harness: instance sources, matrices, tuning and the ``bench`` CLI."""
from .experiment import (
    CSV_COLUMNS,
    ExperimentSpec,
    RunRecord,
    emit_csv,
    emit_summary,
    generate_instances,
    load_instances,
    make_domain,
    read_csv,
    resolve_instances,
    run_matrix,
)
from .tuner import TuningResult, tune_lambda, tune_lambda_trials

__all__ = [
    "CSV_COLUMNS", "ExperimentSpec", "RunRecord", "emit_csv", "emit_summary", "generate_instances",
    "load_instances", "make_domain", "read_csv", "resolve_instances", "run_matrix",
    "TuningResult", "tune_lambda", "tune_lambda_trials",
]
