from dataclasses import dataclass

import numpy as np

from wiclab.env import GridState
from wiclab.exception import ContractViolation

from .episode import SkillEpisode, SkillId

__all__ = (
    "VisitationSample",
    "visitation_samples",
)


@dataclass(frozen=True, slots=True)
class VisitationSample:
    state: GridState
    start_state: GridState
    skill: SkillId


def visitation_samples(episode: SkillEpisode, n: int, rng: np.random.Generator) -> list[VisitationSample]:
    """Draw `n` states from the episode's visitation distribution.

    Time indices are uniform over 1..T; s_0 is excluded and s_T included.
    """

    if n < 1:
        raise ContractViolation(f"Sample count must be at least 1, got {n}")

    steps = rng.integers(1, episode.horizon + 1, size=n)

    return [VisitationSample(episode.states[int(t)], episode.start_state, episode.skill) for t in steps]
