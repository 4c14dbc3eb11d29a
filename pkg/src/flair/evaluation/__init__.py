"""Metrics, statistical comparison and ablation sweeps."""

from .harness import MetricReport, SweepKind, evaluate, evaluate_entry, sweep
from .metrics import (
    DegenerateMetric,
    coverage,
    crps_path,
    geomean,
    mase,
    sample_crps,
    seasonal_naive,
    wql,
)
from .stats import BootstrapCI, grouped_paired_bootstrap, holm_adjust, sign_flip_test

__all__ = [
    "BootstrapCI",
    "DegenerateMetric",
    "MetricReport",
    "SweepKind",
    "coverage",
    "crps_path",
    "evaluate",
    "evaluate_entry",
    "geomean",
    "grouped_paired_bootstrap",
    "holm_adjust",
    "mase",
    "sample_crps",
    "seasonal_naive",
    "sign_flip_test",
    "sweep",
    "wql",
]
