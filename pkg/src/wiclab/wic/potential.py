from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Self

import msgspec
import numpy as np
import numpy.typing as npt
from pydantic import Field

from wiclab.env import GridSpec, GridState
from wiclab.exception import ContractViolation
from wiclab.nn import OptimizerState, ParamFunction, Topology, apply_update
from wiclab.schema import StrictSchema
from wiclab.skills import SkillEpisode, SkillId, VisitationSample, visitation_samples

__all__ = (
    "PotentialBank",
    "PotentialLossReport",
    "WicConfig",
    "label_episode_rewards",
    "lipschitz_penalty",
    "potential",
    "potential_loss",
    "train_potential_step",
    "wic_reward",
)

Array = npt.NDArray[np.float64]


class WicConfig(StrictSchema):
    """Settings of the potential objective."""

    eta: float = Field(default=0.9, ge=0.0, le=1.0)
    """Diversity penalty on the best competing skill's potential gain."""
    lipschitz_weight: float = Field(default=10.0, ge=0.0)
    """Weight of the hinge penalty relative to the potential loss."""
    batch_size: int | None = Field(default=None, ge=1)
    """Visitation samples per episode; `None` uses every visited state s_1..s_T."""


class PotentialLossReport(msgspec.Struct, frozen=True):
    potential_loss: float
    lipschitz_loss: float

    @property
    def total(self) -> float:
        return self.potential_loss + self.lipschitz_loss


@dataclass(frozen=True)
class PotentialBank:
    """Per-skill potentials f(s, s0, w) as the K output heads of one network.

    The network input is `featurize(s)` followed by `featurize(s0)`.
    """

    net: ParamFunction
    spec: GridSpec = field(compare=False)
    skills: int

    def __post_init__(self) -> None:
        if self.net.output_dim != self.skills:
            raise ContractViolation(f"Potential network has {self.net.output_dim} heads for {self.skills} skills")
        if self.net.input_dim != 2 * self.spec.feature_dim:
            raise ContractViolation("Potential network input must be two stacked state features")

    @classmethod
    def create(
        cls,
        spec: GridSpec,
        skills: int,
        topology: Topology,
        rng: np.random.Generator | None = None,
    ) -> Self:
        """Glorot-initialized bank, or an all-zero one when `rng` is None."""

        dim = 2 * spec.feature_dim
        net = (
            ParamFunction.zeros(topology, dim, skills)
            if rng is None
            else ParamFunction.initialize(topology, dim, skills, rng)
        )
        return cls(net, spec, skills)

    def with_net(self, net: ParamFunction) -> Self:
        return type(self)(net, self.spec, self.skills)

    def inputs(self, states: Sequence[GridState], s0: GridState) -> Array:
        for s in (*states, s0):
            self.spec.require(s)

        start = self.spec.features([s0])
        return np.hstack([self.spec.features(states), np.repeat(start, len(states), axis=0)])

    def values(self, states: Sequence[GridState], s0: GridState) -> Array:
        """All heads for every state, shape `(len(states), K)`."""

        return self.net.forward(self.inputs(states, s0))

    def check_skill(self, w: SkillId) -> None:
        if not 0 <= w < self.skills:
            raise ContractViolation(f"Skill {w} out of range for {self.skills} skills")


def potential(bank: PotentialBank, s: GridState, s0: GridState, w: SkillId) -> float:
    bank.check_skill(w)

    return float(bank.values([s], s0)[0, w])


def potential_loss(bank: PotentialBank, batch: Sequence[VisitationSample]) -> tuple[float, Array]:
    """f(s0, s0, w) - mean f(s, s0, w) over the batch, and its parameter gradient."""

    if not batch:
        raise ContractViolation("potential_loss needs a non-empty batch")

    s0, w = batch[0].start_state, batch[0].skill
    if any(x.start_state != s0 or x.skill != w for x in batch):
        raise ContractViolation("All samples in a potential batch must share start state and skill")
    bank.check_skill(w)

    states = [s0, *(x.state for x in batch)]
    x = bank.inputs(states, s0)
    heads = bank.net.forward(x)[:, w]

    n = len(batch)
    loss = float(heads[0] - heads[1:].mean())

    upstream = np.zeros((n + 1, bank.skills))
    upstream[0, w] = 1.0
    upstream[1:, w] = -1.0 / n

    return loss, bank.net.backward(x, upstream)


def lipschitz_penalty(
    bank: PotentialBank,
    pairs: Sequence[tuple[GridState, GridState]],
    s0: GridState,
    w: SkillId,
) -> tuple[float, Array]:
    """mean max((f(s') - f(s))^2 - 1, 0) over observed transitions, and its gradient."""

    if not pairs:
        raise ContractViolation("lipschitz_penalty needs at least one transition pair")
    bank.check_skill(w)

    n = len(pairs)
    x = bank.inputs([s for s, _ in pairs] + [s_next for _, s_next in pairs], s0)
    heads = bank.net.forward(x)[:, w]

    diff = heads[n:] - heads[:n]
    excess = diff * diff - 1.0
    active = excess > 0.0

    loss = float(np.where(active, excess, 0.0).mean())

    coeff = np.where(active, 2.0 * diff / n, 0.0)
    upstream = np.zeros((2 * n, bank.skills))
    upstream[:n, w] = -coeff
    upstream[n:, w] = coeff

    return loss, bank.net.backward(x, upstream)


def train_potential_step(
    bank: PotentialBank,
    episodes: Sequence[SkillEpisode],
    cfg: WicConfig,
    opt: OptimizerState,
    rng: np.random.Generator | None = None,
) -> tuple[PotentialBank, PotentialLossReport]:
    """One optimizer step on L_f + lipschitz_weight * L_c, summed over the skills in the batch.

    Each term is averaged over the episodes of its skill.
    """

    if not episodes:
        raise ContractViolation("train_potential_step needs at least one episode")
    if cfg.batch_size is not None and rng is None:
        raise ContractViolation("A sampled batch_size needs an rng")

    by_skill: dict[SkillId, list[SkillEpisode]] = defaultdict(list)
    for ep in episodes:
        by_skill[ep.skill].append(ep)

    grad = np.zeros(bank.net.num_params)
    total_f = 0.0
    total_c = 0.0

    for w in sorted(by_skill):
        group = by_skill[w]
        for ep in group:
            if cfg.batch_size is None:
                batch = [VisitationSample(s, ep.start_state, w) for s in ep.states[1:]]
            else:
                batch = visitation_samples(ep, cfg.batch_size, rng)  # type: ignore[arg-type]

            loss_f, grad_f = potential_loss(bank, batch)
            loss_c, grad_c = lipschitz_penalty(bank, ep.transitions(), ep.start_state, w)

            total_f += loss_f / len(group)
            total_c += loss_c / len(group)
            grad += (grad_f + cfg.lipschitz_weight * grad_c) / len(group)

    new_bank = bank.with_net(bank.net.with_params(apply_update(opt, bank.net.params, grad)))

    return new_bank, PotentialLossReport(potential_loss=total_f, lipschitz_loss=total_c)


def _penalized(diffs: Array, w: SkillId, eta: float) -> Array:
    """Own potential gain minus eta times the best competing gain, per row of `diffs`."""

    own = diffs[:, w]
    if diffs.shape[1] == 1:
        return own.copy()

    others = np.delete(diffs, w, axis=1).max(axis=1)
    return own - eta * others


def wic_reward(
    bank: PotentialBank,
    s_t: GridState,
    s_t1: GridState,
    s0: GridState,
    w: SkillId,
    eta: float,
) -> float:
    bank.check_skill(w)
    if not 0.0 <= eta <= 1.0:
        raise ContractViolation(f"eta must lie in [0, 1], got {eta}")

    values = bank.values([s_t, s_t1], s0)

    return float(_penalized(values[1:] - values[:1], w, eta)[0])


def label_episode_rewards(bank: PotentialBank, episode: SkillEpisode, eta: float) -> SkillEpisode:
    """Fill `rewards[t]` with the diversity-penalized potential difference of step t."""

    bank.check_skill(episode.skill)
    if not 0.0 <= eta <= 1.0:
        raise ContractViolation(f"eta must lie in [0, 1], got {eta}")

    values = bank.values(episode.states, episode.start_state)
    rewards = _penalized(values[1:] - values[:-1], episode.skill, eta)

    return episode.with_rewards(rewards.tolist())
