from .metrics import (
    EndpointRow,
    EndpointSummary,
    MetricsRow,
    RunRecord,
    endpoint_distances,
    endpoint_summary,
    episodic_coverage,
    metrics_row,
)
from .report import RunReport, endpoint_report, load_run, report_run, reward_heatmap
from .runner import RunResult, SeedStreams, TrainedModels, initial_models, resolve_run_dir, run_experiment
from .sweep import SweepResult, aggregate_records, multi_seed

__all__ = (
    "EndpointRow",
    "EndpointSummary",
    "MetricsRow",
    "RunRecord",
    "RunReport",
    "RunResult",
    "SeedStreams",
    "SweepResult",
    "TrainedModels",
    "aggregate_records",
    "endpoint_distances",
    "endpoint_report",
    "endpoint_summary",
    "episodic_coverage",
    "initial_models",
    "load_run",
    "metrics_row",
    "multi_seed",
    "report_run",
    "resolve_run_dir",
    "reward_heatmap",
    "run_experiment",
)
