from dataclasses import dataclass, field

import numpy as np
import structlog

from wiclab.env import GridSpec, GridState
from wiclab.exception import ConfigurationError

from .episode import ActionSampler, SkillEpisode, run_skill_episode, sample_skill

__all__ = (
    "ChainSchedule",
    "SkillChain",
    "chain_episodes",
)

logger = structlog.stdlib.get_logger(__name__)


@dataclass(frozen=True)
class ChainSchedule:
    """How skill episodes are strung together.

    The end state of one episode seeds the next; every `episodes_between_resets`
    episodes the agent is put back on the layout's start cell.
    """

    skills: int
    horizon: int
    episodes_between_resets: int = field(default=1)
    total_episodes: int = field(default=1)

    def __post_init__(self) -> None:
        if self.skills < 1:
            raise ConfigurationError(f"Skill count must be at least 1, got {self.skills}")
        if self.horizon < 1:
            raise ConfigurationError(f"Horizon must be at least 1, got {self.horizon}")
        if self.episodes_between_resets < 1:
            raise ConfigurationError("episodes_between_resets must be at least 1")
        if self.total_episodes < 0:
            raise ConfigurationError("total_episodes must be non-negative")


class SkillChain:
    """Chain cursor that survives across collection batches."""

    def __init__(self, spec: GridSpec, schedule: ChainSchedule, rng: np.random.Generator) -> None:
        self.spec = spec
        self.schedule = schedule
        self.rng = rng

        self._cursor: GridState = spec.start_cell
        self._since_reset = 0
        self.episodes_run = 0

    @property
    def cursor(self) -> GridState:
        return self._cursor

    def next_episode(self, policy: ActionSampler) -> SkillEpisode:
        if self._since_reset == self.schedule.episodes_between_resets:
            self._cursor = self.spec.start_cell
            self._since_reset = 0

        skill = sample_skill(self.rng, self.schedule.skills)
        episode = run_skill_episode(self.spec, policy, skill, self._cursor, self.schedule.horizon, self.rng)

        self._cursor = episode.end_state
        self._since_reset += 1
        self.episodes_run += 1

        return episode

    def collect(self, policy: ActionSampler, n: int) -> list[SkillEpisode]:
        return [self.next_episode(policy) for _ in range(n)]


def chain_episodes(
    spec: GridSpec,
    policy: ActionSampler,
    schedule: ChainSchedule,
    rng: np.random.Generator,
) -> list[SkillEpisode]:
    """Run `schedule.total_episodes` chained skill episodes from the start cell."""

    episodes = SkillChain(spec, schedule, rng).collect(policy, schedule.total_episodes)

    logger.debug("Chain finished", episodes=len(episodes), resets_every=schedule.episodes_between_resets)
    return episodes
