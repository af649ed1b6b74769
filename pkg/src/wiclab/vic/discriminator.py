from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Self

import numpy as np
import numpy.typing as npt

from wiclab.env import GridSpec, GridState
from wiclab.exception import ContractViolation
from wiclab.nn import OptimizerState, ParamFunction, Topology, apply_update, log_softmax, softmax
from wiclab.skills import SkillEpisode, SkillId

__all__ = (
    "Discriminator",
    "EndpointExample",
    "discriminator_accuracy",
    "discriminator_loss",
    "label_episode_rewards",
    "skill_posterior",
    "train_discriminator_step",
    "vic_reward",
)

Array = npt.NDArray[np.float64]

type EndpointExample = tuple[GridState, GridState, SkillId]
"""(s_T, s_0, executed skill)"""


@dataclass(frozen=True)
class Discriminator:
    """Skill classifier q(w | s_T, s_0); the network emits K logits."""

    net: ParamFunction
    spec: GridSpec = field(compare=False)
    skills: int

    def __post_init__(self) -> None:
        if self.net.output_dim != self.skills:
            raise ContractViolation(f"Discriminator has {self.net.output_dim} logits for {self.skills} skills")
        if self.net.input_dim != 2 * self.spec.feature_dim:
            raise ContractViolation("Discriminator input must be two stacked state features")

    @classmethod
    def create(
        cls,
        spec: GridSpec,
        skills: int,
        topology: Topology,
        rng: np.random.Generator | None = None,
    ) -> Self:
        dim = 2 * spec.feature_dim
        net = (
            ParamFunction.zeros(topology, dim, skills)
            if rng is None
            else ParamFunction.initialize(topology, dim, skills, rng)
        )
        return cls(net, spec, skills)

    def with_net(self, net: ParamFunction) -> Self:
        return type(self)(net, self.spec, self.skills)

    def inputs(self, ends: Sequence[GridState], starts: Sequence[GridState]) -> Array:
        for s in (*ends, *starts):
            self.spec.require(s)

        return np.hstack([self.spec.features(ends), self.spec.features(starts)])

    def logits(self, ends: Sequence[GridState], starts: Sequence[GridState]) -> Array:
        return self.net.forward(self.inputs(ends, starts))

    def log_posterior(self, ends: Sequence[GridState], starts: Sequence[GridState]) -> Array:
        return log_softmax(self.logits(ends, starts), axis=1)


def skill_posterior(d: Discriminator, s_t: GridState, s0: GridState) -> Array:
    return softmax(d.logits([s_t], [s0])[0])


def discriminator_loss(d: Discriminator, batch: Sequence[EndpointExample]) -> tuple[float, Array]:
    """Mean negative log-likelihood of the executed skill, and its gradient."""

    if not batch:
        raise ContractViolation("discriminator_loss needs a non-empty batch")

    skills = np.array([w for _, _, w in batch])
    if skills.min() < 0 or skills.max() >= d.skills:
        raise ContractViolation("Skill label out of range")

    x = d.inputs([e for e, _, _ in batch], [s for _, s, _ in batch])
    logits = d.net.forward(x)
    logp = log_softmax(logits, axis=1)

    n = len(batch)
    rows = np.arange(n)
    loss = float(-logp[rows, skills].mean())

    upstream = np.exp(logp)
    upstream[rows, skills] -= 1.0
    upstream /= n

    return loss, d.net.backward(x, upstream)


def train_discriminator_step(
    d: Discriminator,
    episodes: Sequence[SkillEpisode],
    opt: OptimizerState,
) -> tuple[Discriminator, float]:
    loss, grad = discriminator_loss(d, [(ep.end_state, ep.start_state, ep.skill) for ep in episodes])

    return d.with_net(d.net.with_params(apply_update(opt, d.net.params, grad))), loss


def discriminator_accuracy(d: Discriminator, batch: Sequence[EndpointExample]) -> float:
    """Fraction of examples whose arg-max skill is the executed one."""

    if not batch:
        raise ContractViolation("discriminator_accuracy needs a non-empty batch")

    logits = d.logits([e for e, _, _ in batch], [s for _, s, _ in batch])

    return float(np.mean(logits.argmax(axis=1) == np.array([w for _, _, w in batch])))


def vic_reward(d: Discriminator, episode: SkillEpisode) -> float:
    """log q(w | s_T, s_0) + log K, zero for an uninformed discriminator."""

    if not 0 <= episode.skill < d.skills:
        raise ContractViolation(f"Skill {episode.skill} out of range for {d.skills} skills")

    logp = d.log_posterior([episode.end_state], [episode.start_state])[0]

    return float(logp[episode.skill] + np.log(d.skills))


def label_episode_rewards(d: Discriminator, episode: SkillEpisode) -> SkillEpisode:
    """Terminal-only reward: every step is 0 except the last."""

    rewards = [0.0] * episode.horizon
    rewards[-1] = vic_reward(d, episode)

    return episode.with_rewards(rewards)
