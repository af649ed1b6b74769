from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from multiprocessing import get_all_start_methods, get_context
from pathlib import Path
from typing import Final

import msgspec
import numpy as np
import numpy.typing as npt
import pandas as pd
import structlog

from wiclab.config import ExperimentConfig, LabSettings
from wiclab.exception import ConfigurationError, ContractViolation

from .figures import plot_aggregate
from .metrics import EndpointSummary, RunRecord
from .report import report_run
from .runner import run_experiment

__all__ = (
    "AGGREGATE_METRICS",
    "SeedOutcome",
    "SweepResult",
    "aggregate_records",
    "multi_seed",
)

logger = structlog.stdlib.get_logger(__name__)

AGGREGATE_METRICS: Final[tuple[str, ...]] = (
    "episodic_coverage",
    "lifetime_coverage",
    "mean_return",
    "endpoint_distance",
)

Array = npt.NDArray[np.float64]


class SeedOutcome(msgspec.Struct, frozen=True):
    seed: int
    run_dir: str
    record_csv: str
    endpoints: EndpointSummary


@dataclass(frozen=True)
class SweepResult:
    sweep_dir: Path
    updates: list[int]
    mean: dict[str, Array]
    std: dict[str, Array]
    outcomes: list[SeedOutcome]


def _metric(record: RunRecord, name: str) -> Array:
    if name != "endpoint_distance":
        return np.array([float(getattr(row, name)) for row in record.rows])

    # averaged over the skills sampled in that update
    return np.array([np.mean([d for d in row.endpoint_distance if d is not None]) for row in record.rows])


def aggregate_records(records: Sequence[RunRecord]) -> tuple[list[int], dict[str, Array], dict[str, Array]]:
    """Per-update mean and population standard deviation of every aggregate metric."""

    if not records:
        raise ContractViolation("Nothing to aggregate")

    updates = [row.update for row in records[0].rows]
    if any([row.update for row in r.rows] != updates for r in records):
        raise ContractViolation("Runs disagree on their update indices")

    mean: dict[str, Array] = {}
    std: dict[str, Array] = {}
    for name in AGGREGATE_METRICS:
        stacked = np.stack([_metric(r, name) for r in records]) if updates else np.zeros((len(records), 0))
        mean[name] = stacked.mean(axis=0)
        std[name] = stacked.std(axis=0, ddof=0)

    return updates, mean, std


def _write_aggregate(path: Path, updates: list[int], mean: dict[str, Array], std: dict[str, Array]) -> Path:
    frame = pd.DataFrame({"update": updates})
    for name in AGGREGATE_METRICS:
        frame[f"{name}_mean"] = mean[name]
        frame[f"{name}_std"] = std[name]

    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def _run_seed(cfg: ExperimentConfig, output_root: Path, n_rollouts: int) -> SeedOutcome:
    result = run_experiment(cfg, output_root=output_root)
    report = report_run(result.run_dir, n_rollouts=n_rollouts)

    return SeedOutcome(
        seed=cfg.seed,
        run_dir=str(result.run_dir),
        record_csv=result.record.to_csv(),
        endpoints=report.summary,
    )


def multi_seed(
    cfg: ExperimentConfig,
    seeds: Sequence[int],
    workers: int | None = None,
    output_root: Path | None = None,
    n_rollouts: int = 100,
) -> SweepResult:
    """Run `cfg` once per seed, in worker processes when `workers > 1`, and aggregate the curves."""

    if not seeds:
        raise ConfigurationError("A sweep needs at least one seed")

    settings = LabSettings.get_settings()
    root = Path(output_root if output_root is not None else settings.output_root).expanduser()
    workers = max(1, workers if workers is not None else settings.workers)

    # repeated seeds share a run directory, so each distinct seed runs once
    unique = list(dict.fromkeys(seeds))
    configs = [cfg.with_overrides(seed=seed) for seed in unique]
    sweep_dir = root / f"sweep-{cfg.method}-{cfg.environment}-{cfg.config_hash()}"
    sweep_dir.mkdir(parents=True, exist_ok=True)

    logger.info("Sweep started", sweep_dir=str(sweep_dir), seeds=list(seeds), workers=workers)

    if workers == 1:
        finished = [_run_seed(c, root, n_rollouts) for c in configs]
    else:
        start_method = "forkserver" if "forkserver" in get_all_start_methods() else "spawn"
        with ProcessPoolExecutor(max_workers=workers, mp_context=get_context(start_method)) as pool:
            finished = list(pool.map(_run_seed, configs, [root] * len(configs), [n_rollouts] * len(configs)))

    by_seed = {o.seed: o for o in finished}
    outcomes = [by_seed[seed] for seed in seeds]

    records = [RunRecord.from_csv(o.record_csv) for o in outcomes]
    updates, mean, std = aggregate_records(records)

    _write_aggregate(sweep_dir / "aggregate.csv", updates, mean, std)
    plot_aggregate(updates, mean, std, sweep_dir / "aggregate.svg", title=sweep_dir.name)
    seeds_json = msgspec.json.encode([{"seed": o.seed, "run_dir": o.run_dir, "endpoints": o.endpoints} for o in outcomes])
    (sweep_dir / "seeds.json").write_bytes(msgspec.json.format(seeds_json, indent=2))

    logger.info(
        "Sweep finished",
        sweep_dir=str(sweep_dir),
        mean_endpoint_distance=float(np.mean([o.endpoints.mean_distance for o in outcomes])),
    )

    return SweepResult(sweep_dir=sweep_dir, updates=updates, mean=mean, std=std, outcomes=outcomes)
