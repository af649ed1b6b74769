from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from typing import Protocol, Self

import numpy as np

from wiclab.env import GridAction, GridSpec, GridState, step
from wiclab.exception import ConfigurationError, ContractViolation

__all__ = (
    "ActionSampler",
    "ConstantPolicy",
    "RandomPolicy",
    "SkillEpisode",
    "SkillId",
    "replay_episode",
    "run_skill_episode",
    "sample_skill",
)

type SkillId = int


class ActionSampler(Protocol):
    """Anything that picks an action for a state under a skill."""

    def sample_action(self, s: GridState, skill: SkillId, rng: np.random.Generator) -> GridAction: ...


@dataclass(frozen=True)
class RandomPolicy:
    """Uniform over all five actions, ignores the skill."""

    def sample_action(self, s: GridState, skill: SkillId, rng: np.random.Generator) -> GridAction:
        return GridAction(int(rng.integers(len(GridAction))))


@dataclass(frozen=True)
class ConstantPolicy:
    action: GridAction = field(default=GridAction.NOOP)

    def sample_action(self, s: GridState, skill: SkillId, rng: np.random.Generator) -> GridAction:
        return self.action


@dataclass(frozen=True)
class SkillEpisode:
    """One T-step rollout under a fixed skill. `states` holds s_0 ... s_T."""

    skill: SkillId
    start_state: GridState
    states: tuple[GridState, ...]
    actions: tuple[GridAction, ...]
    rewards: tuple[float, ...]

    def __post_init__(self) -> None:
        horizon = len(self.actions)

        if horizon < 1:
            raise ContractViolation("A skill episode needs at least one step")
        if len(self.states) != horizon + 1 or len(self.rewards) != horizon:
            raise ContractViolation(
                f"Inconsistent episode lengths: {len(self.states)} states, {horizon} actions, {len(self.rewards)} rewards"
            )
        if self.states[0] != self.start_state:
            raise ContractViolation("states[0] must equal the start state")

    @property
    def horizon(self) -> int:
        return len(self.actions)

    @property
    def end_state(self) -> GridState:
        return self.states[-1]

    @property
    def total_reward(self) -> float:
        return float(sum(self.rewards))

    def transitions(self) -> list[tuple[GridState, GridState]]:
        return list(zip(self.states[:-1], self.states[1:], strict=True))

    def with_rewards(self, rewards: Sequence[float]) -> Self:
        return replace(self, rewards=tuple(float(r) for r in rewards))


def sample_skill(rng: np.random.Generator, k: int) -> SkillId:
    """Uniform draw from [0, k)."""

    if k < 1:
        raise ConfigurationError(f"Skill count must be at least 1, got {k}")

    return int(rng.integers(k))


def run_skill_episode(
    spec: GridSpec,
    policy: ActionSampler,
    skill: SkillId,
    s0: GridState,
    horizon: int,
    rng: np.random.Generator,
) -> SkillEpisode:
    """Execute `policy` under `skill` for exactly `horizon` steps from `s0`; rewards start at zero."""

    if horizon < 1:
        raise ConfigurationError(f"Horizon must be at least 1, got {horizon}")

    spec.require(s0)

    states = [s0]
    actions: list[GridAction] = []

    for _ in range(horizon):
        action = GridAction(policy.sample_action(states[-1], skill, rng))
        actions.append(action)
        states.append(step(spec, states[-1], action))

    return SkillEpisode(
        skill=skill,
        start_state=s0,
        states=tuple(states),
        actions=tuple(actions),
        rewards=(0.0,) * horizon,
    )


def replay_episode(spec: GridSpec, skill: SkillId, s0: GridState, actions: Sequence[GridAction]) -> SkillEpisode:
    """Rebuild an episode by pushing `actions` through the dynamics."""

    states = [s0]
    for action in actions:
        states.append(step(spec, states[-1], GridAction(action)))

    return SkillEpisode(
        skill=skill,
        start_state=s0,
        states=tuple(states),
        actions=tuple(GridAction(a) for a in actions),
        rewards=(0.0,) * len(actions),
    )
