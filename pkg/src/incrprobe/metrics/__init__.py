"""Incrementality metrics over activation dumps and frozen weights."""

from .dc import DcConfig, DcResult, ProbeDataError, ProbeOutcome, dc_accuracy, probe_dataset, top_tokens, train_probe
from .integration import (
    RATIO_EPS,
    DegenerateRecurrenceError,
    IntegrationResult,
    integration_ratio,
    integration_trace,
)
from .report import METRIC_NAMES, MetricReport, compute_report
from .repsim import (
    DISTANCES,
    NoHistoryError,
    RepSimConfig,
    collect_histories,
    mean_pairwise_distance,
    repr_similarity,
)

__all__ = [
    "DISTANCES",
    "METRIC_NAMES",
    "RATIO_EPS",
    "DcConfig",
    "DcResult",
    "DegenerateRecurrenceError",
    "IntegrationResult",
    "MetricReport",
    "NoHistoryError",
    "ProbeDataError",
    "ProbeOutcome",
    "RepSimConfig",
    "collect_histories",
    "compute_report",
    "dc_accuracy",
    "integration_ratio",
    "integration_trace",
    "mean_pairwise_distance",
    "probe_dataset",
    "repr_similarity",
    "top_tokens",
    "train_probe",
]
