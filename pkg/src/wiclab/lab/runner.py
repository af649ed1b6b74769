import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Final

import msgspec
import numpy as np
import structlog

from wiclab.config import ExperimentConfig, LabSettings
from wiclab.env import GridSpec
from wiclab.nn import OptimizerState, ParamFunction, Topology, save_checkpoint
from wiclab.policy import NUM_ACTIONS, Baseline, ReinforceReport, SkillPolicy, reinforce_update
from wiclab.skills import SkillChain, SkillEpisode, write_episodes
from wiclab.vic import Discriminator, train_discriminator_step
from wiclab.vic import label_episode_rewards as label_vic
from wiclab.wic import PotentialBank, train_potential_step
from wiclab.wic import label_episode_rewards as label_wic

from .figures import plot_metrics
from .metrics import MetricsRow, RunRecord, metrics_row

__all__ = (
    "CHECKPOINT_FILES",
    "ObjectiveModel",
    "RunResult",
    "SeedStreams",
    "TrainedModels",
    "initial_models",
    "resolve_run_dir",
    "run_experiment",
    "write_checkpoints",
)

logger = structlog.stdlib.get_logger(__name__)

CHECKPOINT_FILES: Final[dict[str, str]] = {
    "policy": "policy.ckpt",
    "baseline": "baseline.ckpt",
    "potential": "potential.ckpt",
    "discriminator": "discriminator.ckpt",
}

type ObjectiveModel = PotentialBank | Discriminator


@dataclass(frozen=True)
class SeedStreams:
    """Independent generators spawned from the run seed."""

    init: np.random.Generator
    rollout: np.random.Generator
    train: np.random.Generator
    evaluation: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "SeedStreams":
        init, rollout, train, evaluation = np.random.SeedSequence(seed).spawn(4)

        return cls(
            init=np.random.default_rng(init),
            rollout=np.random.default_rng(rollout),
            train=np.random.default_rng(train),
            evaluation=np.random.default_rng(evaluation),
        )


@dataclass(frozen=True)
class TrainedModels:
    policy: SkillPolicy
    baseline: Baseline
    objective: ObjectiveModel

    @property
    def objective_kind(self) -> str:
        return "potential" if isinstance(self.objective, PotentialBank) else "discriminator"


@dataclass
class RunResult:
    config: ExperimentConfig
    run_dir: Path
    record: RunRecord
    models: TrainedModels
    checkpoints: dict[str, Path] = field(default_factory=dict)


def _init_rng(topology: Topology, rng: np.random.Generator) -> np.random.Generator | None:
    # Linear heads start at zero (uniform policy, flat potentials); deeper nets need symmetry breaking.
    return None if topology == "linear" else rng


def initial_models(cfg: ExperimentConfig, spec: GridSpec, rng: np.random.Generator) -> TrainedModels:
    init = _init_rng(cfg.topology, rng)

    policy = SkillPolicy.create(spec, cfg.skills, cfg.topology, rng=init)
    baseline = Baseline.create(spec, cfg.topology, rng=init)
    objective: ObjectiveModel = (
        PotentialBank.create(spec, cfg.skills, cfg.topology, rng=init)
        if cfg.method == "wic"
        else Discriminator.create(spec, cfg.skills, cfg.topology, rng=init)
    )

    return TrainedModels(policy=policy, baseline=baseline, objective=objective)


def _optimizer(cfg: ExperimentConfig, net: ParamFunction) -> OptimizerState:
    return OptimizerState.create(cfg.optimizer, cfg.learning_rate, net.num_params)


def resolve_run_dir(cfg: ExperimentConfig, output_root: Path | None = None) -> Path:
    root = output_root if output_root is not None else LabSettings.get_settings().output_root
    return Path(root).expanduser() / cfg.run_name()


def write_checkpoints(run_dir: Path, models: TrainedModels) -> dict[str, Path]:
    skills = models.policy.skills
    kind = models.objective_kind

    return {
        "policy": save_checkpoint(
            run_dir / CHECKPOINT_FILES["policy"], models.policy.net, "policy", skills=skills, actions=NUM_ACTIONS
        ),
        "baseline": save_checkpoint(run_dir / CHECKPOINT_FILES["baseline"], models.baseline.net, "baseline"),
        kind: save_checkpoint(run_dir / CHECKPOINT_FILES[kind], models.objective.net, kind, skills=skills),
    }


def _label(cfg: ExperimentConfig, objective: ObjectiveModel, episodes: list[SkillEpisode]) -> list[SkillEpisode]:
    if isinstance(objective, PotentialBank):
        return [label_wic(objective, ep, cfg.eta) for ep in episodes]
    return [label_vic(objective, ep) for ep in episodes]


class _Summary(msgspec.Struct, frozen=True):
    run: str
    method: str
    environment: str
    seed: int
    updates: int
    final: MetricsRow | None


def _write_summary(run_dir: Path, cfg: ExperimentConfig, record: RunRecord) -> Path:
    summary = _Summary(
        run=cfg.run_name(),
        method=cfg.method,
        environment=cfg.environment,
        seed=cfg.seed,
        updates=len(record.rows),
        final=record.rows[-1] if record.rows else None,
    )
    path = run_dir / "summary.json"
    path.write_bytes(msgspec.json.format(msgspec.json.encode(summary), indent=2))
    return path


def run_experiment(
    cfg: ExperimentConfig,
    run_dir: Path | None = None,
    output_root: Path | None = None,
) -> RunResult:
    """Train one seeded experiment and persist its metrics, checkpoints and figures.

    Each update collects `episodes_per_update` chained skill episodes with the current policy and
    labels them with the current objective model. The labeled batch is then consumed in
    minibatches of `episodes_per_step` episodes, each giving one objective step followed by one
    policy/baseline step.
    """

    run_dir = run_dir if run_dir is not None else resolve_run_dir(cfg, output_root)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.json").write_text(cfg.to_json())

    spec = cfg.grid_spec()
    streams = SeedStreams.from_seed(cfg.seed)
    models = initial_models(cfg, spec, streams.init)

    policy, baseline, objective = models.policy, models.baseline, models.objective
    policy_opt = _optimizer(cfg, policy.net)
    baseline_opt = _optimizer(cfg, baseline.net)
    objective_opt = _optimizer(cfg, objective.net)
    wic_cfg = cfg.wic_config()

    chain = SkillChain(spec, cfg.schedule(), streams.rollout)
    record = RunRecord(skills=cfg.skills)
    visited = {spec.start_cell}
    labeled: list[SkillEpisode] = []

    logger.info("Run started", run=cfg.run_name(), run_dir=str(run_dir), updates=cfg.total_updates)

    for update in range(1, cfg.total_updates + 1):
        episodes = chain.collect(policy.tabulate(), cfg.episodes_per_update)
        labeled = _label(cfg, objective, episodes)

        objective_losses: list[float] = []
        reports: list[ReinforceReport] = []

        # rewards come from the objective snapshot taken before these steps
        for minibatch in itertools.batched(labeled, cfg.episodes_per_step):
            if isinstance(objective, PotentialBank):
                objective, report = train_potential_step(
                    objective, minibatch, wic_cfg, objective_opt, rng=streams.train
                )
                objective_losses.append(report.total)
            else:
                objective, loss = train_discriminator_step(objective, minibatch, objective_opt)
                objective_losses.append(loss)

            policy, baseline, pg = reinforce_update(
                policy, baseline, minibatch, cfg.entropy_weight, policy_opt, baseline_opt
            )
            reports.append(pg)

        row = metrics_row(spec, update, labeled, cfg.skills, visited)
        record.append(row)

        if update % cfg.log_every == 0 or update == cfg.total_updates:
            logger.info(
                "Update finished",
                update=update,
                episodic_coverage=row.episodic_coverage,
                lifetime_coverage=row.lifetime_coverage,
                mean_return=row.mean_return,
                objective_loss=float(np.mean(objective_losses)),
                policy_loss=float(np.mean([r.policy_loss for r in reports])),
                entropy=float(np.mean([r.mean_entropy for r in reports])),
            )

    models = TrainedModels(policy=policy, baseline=baseline, objective=objective)

    record.write_csv(run_dir / "metrics.csv")
    checkpoints = write_checkpoints(run_dir, models)
    if labeled:
        write_episodes(run_dir / "episodes.jsonl", labeled)
    plot_metrics(record, run_dir / "metrics.svg", title=cfg.run_name())
    _write_summary(run_dir, cfg, record)

    logger.info("Run finished", run=cfg.run_name(), updates=len(record.rows))

    return RunResult(config=cfg, run_dir=run_dir, record=record, models=models, checkpoints=checkpoints)
