from dataclasses import dataclass
from pathlib import Path

import msgspec
import numpy as np
import numpy.typing as npt
import pandas as pd
import structlog

from wiclab.config import ExperimentConfig
from wiclab.env import GridState, distance_table
from wiclab.exception import CheckpointError
from wiclab.nn import load_checkpoint
from wiclab.policy import Baseline, SkillPolicy
from wiclab.skills import run_skill_episode
from wiclab.vic import Discriminator
from wiclab.wic import PotentialBank

from .figures import plot_endpoints, plot_heatmaps
from .metrics import EndpointRow, EndpointSummary, endpoint_summary
from .runner import CHECKPOINT_FILES, ObjectiveModel, SeedStreams, TrainedModels

__all__ = (
    "RunReport",
    "endpoint_report",
    "load_run",
    "report_run",
    "reward_heatmap",
    "write_endpoint_csv",
    "write_heatmap_csv",
)

logger = structlog.stdlib.get_logger(__name__)

Array = npt.NDArray[np.float64]


def endpoint_report(
    policy: SkillPolicy,
    cfg: ExperimentConfig,
    n_rollouts: int,
    rng: np.random.Generator,
) -> list[EndpointRow]:
    """Roll every skill `n_rollouts` times from the layout's start cell and record where it ends."""

    spec = policy.spec
    start = spec.start_cell
    table = distance_table(spec)
    sampler = policy.tabulate()

    rows: list[EndpointRow] = []
    for w in range(policy.skills):
        for i in range(n_rollouts):
            end = run_skill_episode(spec, sampler, w, start, cfg.horizon, rng).end_state
            rows.append(EndpointRow(w, i, end.row, end.col, float(table[spec.index(start), spec.index(end)])))

    return rows


def reward_heatmap(model: ObjectiveModel, start: GridState | None = None) -> Array:
    """Per-skill reward landscape over the layout, shape `(K, height, width)`, NaN on walls.

    Potentials are shown relative to their value at the start cell; discriminators as
    log q(w | s, s_0) + log K with s read as the skill's end state.
    """

    spec = model.spec
    s0 = start if start is not None else spec.start_cell
    cells = list(spec.valid_cells)

    if isinstance(model, PotentialBank):
        values = model.values(cells, s0) - model.values([s0], s0)
    else:
        values = model.log_posterior(cells, [s0] * len(cells)) + np.log(model.skills)

    grid = np.full((model.skills, spec.height, spec.width), np.nan)
    rows = np.array([s.row for s in cells])
    cols = np.array([s.col for s in cells])
    grid[:, rows, cols] = values.T

    return grid


def write_endpoint_csv(path: Path | str, rows: list[EndpointRow]) -> Path:
    frame = pd.DataFrame(
        [(r.skill, r.rollout, r.row, r.col, r.distance) for r in rows],
        columns=["skill", "rollout", "row", "col", "distance"],
    )

    path = Path(path)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def write_heatmap_csv(path: Path | str, grid: Array) -> Path:
    skill, row, col = np.nonzero(~np.isnan(grid))
    frame = pd.DataFrame({"skill": skill, "row": row, "col": col, "value": grid[skill, row, col]})

    path = Path(path)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def load_run(run_dir: Path | str) -> tuple[ExperimentConfig, TrainedModels]:
    """Rebuild the config and final models of a finished run."""

    run_dir = Path(run_dir)
    if not (config_path := run_dir / "config.json").exists():
        raise CheckpointError(f"No config.json in {run_dir}")

    cfg = ExperimentConfig.build(msgspec.json.decode(config_path.read_bytes()))
    spec = cfg.grid_spec()

    _, policy_net = load_checkpoint(run_dir / CHECKPOINT_FILES["policy"], kind="policy")
    _, baseline_net = load_checkpoint(run_dir / CHECKPOINT_FILES["baseline"], kind="baseline")

    objective: ObjectiveModel
    if cfg.method == "wic":
        _, net = load_checkpoint(run_dir / CHECKPOINT_FILES["potential"], kind="potential")
        objective = PotentialBank(net, spec, cfg.skills)
    else:
        _, net = load_checkpoint(run_dir / CHECKPOINT_FILES["discriminator"], kind="discriminator")
        objective = Discriminator(net, spec, cfg.skills)

    models = TrainedModels(
        policy=SkillPolicy(policy_net, spec, cfg.skills),
        baseline=Baseline(baseline_net, spec),
        objective=objective,
    )
    return cfg, models


@dataclass(frozen=True)
class RunReport:
    endpoints: list[EndpointRow]
    summary: EndpointSummary
    heatmap: Array


def report_run(run_dir: Path | str, n_rollouts: int = 100) -> RunReport:
    """Write endpoint and reward-landscape tables and figures next to a run's checkpoints."""

    run_dir = Path(run_dir)
    cfg, models = load_run(run_dir)
    spec = models.policy.spec

    endpoints = endpoint_report(models.policy, cfg, n_rollouts, SeedStreams.from_seed(cfg.seed).evaluation)
    summary = endpoint_summary(spec, endpoints, cfg.skills)
    heatmap = reward_heatmap(models.objective)

    write_endpoint_csv(run_dir / "endpoints.csv", endpoints)
    plot_endpoints(spec, endpoints, cfg.skills, run_dir / "endpoints.svg")
    write_heatmap_csv(run_dir / "heatmap.csv", heatmap)
    plot_heatmaps(spec, heatmap, run_dir / "heatmap.svg", title=f"{cfg.method} reward")
    (run_dir / "report.json").write_bytes(msgspec.json.format(msgspec.json.encode(summary), indent=2))

    logger.info(
        "Report written",
        run_dir=str(run_dir),
        mean_distance=summary.mean_distance,
        outside_start_room=summary.outside_start_room,
    )
    return RunReport(endpoints=endpoints, summary=summary, heatmap=heatmap)
