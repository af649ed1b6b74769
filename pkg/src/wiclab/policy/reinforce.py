from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Final, Self

import msgspec
import numpy as np
import numpy.typing as npt

from wiclab.env import GridAction, GridSpec, GridState
from wiclab.exception import ContractViolation
from wiclab.nn import OptimizerState, ParamFunction, Topology, apply_update, log_softmax, softmax
from wiclab.skills import SkillEpisode, SkillId

__all__ = (
    "NUM_ACTIONS",
    "Baseline",
    "PolicyTable",
    "ReinforceReport",
    "SkillPolicy",
    "action_distribution",
    "baseline_loss",
    "entropy",
    "reinforce_surrogate",
    "reinforce_update",
    "rewards_to_go",
)

NUM_ACTIONS: Final[int] = len(GridAction)

Array = npt.NDArray[np.float64]


def _draw(cdf: Array, rng: np.random.Generator) -> GridAction:
    # inverse-CDF draw; the clamp absorbs a last bin that sums to 1 - 1e-16
    index = int(np.searchsorted(cdf, rng.random(), side="right"))
    return GridAction(min(index, NUM_ACTIONS - 1))


@dataclass(frozen=True)
class SkillPolicy:
    """pi(a | s, w): one block of |A| logits per skill on top of `featurize(s)`."""

    net: ParamFunction
    spec: GridSpec = field(compare=False)
    skills: int

    def __post_init__(self) -> None:
        if self.net.output_dim != self.skills * NUM_ACTIONS:
            raise ContractViolation(f"Policy needs {self.skills * NUM_ACTIONS} logits, has {self.net.output_dim}")
        if self.net.input_dim != self.spec.feature_dim:
            raise ContractViolation("Policy input must be the state features")

    @classmethod
    def create(
        cls,
        spec: GridSpec,
        skills: int,
        topology: Topology,
        rng: np.random.Generator | None = None,
    ) -> Self:
        out = skills * NUM_ACTIONS
        net = (
            ParamFunction.zeros(topology, spec.feature_dim, out)
            if rng is None
            else ParamFunction.initialize(topology, spec.feature_dim, out, rng)
        )
        return cls(net, spec, skills)

    def with_net(self, net: ParamFunction) -> Self:
        return type(self)(net, self.spec, self.skills)

    def blocks(self, states: Sequence[GridState]) -> Array:
        """Logits shaped `(len(states), K, |A|)`."""

        for s in states:
            self.spec.require(s)

        return self.net.forward(self.spec.features(states)).reshape(len(states), self.skills, NUM_ACTIONS)

    def sample_action(self, s: GridState, skill: SkillId, rng: np.random.Generator) -> GridAction:
        return _draw(np.cumsum(action_distribution(self, s, skill)), rng)

    def tabulate(self) -> "PolicyTable":
        return PolicyTable.from_policy(self)


@dataclass(frozen=True)
class PolicyTable:
    """Action CDFs for every floor cell and skill, frozen from one policy snapshot."""

    spec: GridSpec
    cdf: Array

    @classmethod
    def from_policy(cls, policy: SkillPolicy) -> Self:
        cells = list(policy.spec.valid_cells)
        cdf = np.zeros((policy.spec.num_cells, policy.skills, NUM_ACTIONS))
        cdf[[policy.spec.index(s) for s in cells]] = np.cumsum(softmax(policy.blocks(cells), axis=2), axis=2)
        cdf.setflags(write=False)

        return cls(policy.spec, cdf)

    def sample_action(self, s: GridState, skill: SkillId, rng: np.random.Generator) -> GridAction:
        return _draw(self.cdf[self.spec.index(s), skill], rng)


@dataclass(frozen=True)
class Baseline:
    """State value b(s) used to centre returns; it does not see the skill."""

    net: ParamFunction
    spec: GridSpec = field(compare=False)

    def __post_init__(self) -> None:
        if self.net.output_dim != 1 or self.net.input_dim != self.spec.feature_dim:
            raise ContractViolation("Baseline maps state features to a single value")

    @classmethod
    def create(cls, spec: GridSpec, topology: Topology, rng: np.random.Generator | None = None) -> Self:
        net = (
            ParamFunction.zeros(topology, spec.feature_dim, 1)
            if rng is None
            else ParamFunction.initialize(topology, spec.feature_dim, 1, rng)
        )
        return cls(net, spec)

    def with_net(self, net: ParamFunction) -> Self:
        return type(self)(net, self.spec)

    def values(self, states: Sequence[GridState]) -> Array:
        return self.net.forward(self.spec.features(states))[:, 0]


class ReinforceReport(msgspec.Struct, frozen=True):
    policy_loss: float
    baseline_loss: float
    mean_entropy: float


def action_distribution(p: SkillPolicy, s: GridState, w: SkillId) -> Array:
    if not 0 <= w < p.skills:
        raise ContractViolation(f"Skill {w} out of range for {p.skills} skills")

    return softmax(p.blocks([s])[0, w])


def entropy(dist: npt.ArrayLike) -> float:
    """Shannon entropy in nats, with 0 * ln 0 taken as 0."""

    p = np.asarray(dist, dtype=np.float64)
    nonzero = p > 0.0

    return float(-(p[nonzero] * np.log(p[nonzero])).sum())


def rewards_to_go(rewards: Sequence[float]) -> Array:
    """Undiscounted G_t = sum of rewards from t to the end of the skill episode."""

    return np.cumsum(np.asarray(rewards, dtype=np.float64)[::-1])[::-1].copy()


@dataclass(frozen=True)
class _StepBatch:
    episodes: int
    states: list[GridState]
    actions: npt.NDArray[np.int64]
    skills: npt.NDArray[np.int64]
    returns: Array


def _flatten(episodes: Sequence[SkillEpisode]) -> _StepBatch:
    if not episodes:
        raise ContractViolation("REINFORCE needs at least one episode")

    return _StepBatch(
        episodes=len(episodes),
        states=[s for ep in episodes for s in ep.states[:-1]],
        actions=np.array([int(a) for ep in episodes for a in ep.actions], dtype=np.int64),
        skills=np.array([ep.skill for ep in episodes for _ in ep.actions], dtype=np.int64),
        returns=np.concatenate([rewards_to_go(ep.rewards) for ep in episodes]),
    )


def _surrogate(
    policy: SkillPolicy,
    batch: _StepBatch,
    advantages: Array,
    entropy_weight: float,
) -> tuple[float, Array, float]:
    n = len(batch.states)
    rows = np.arange(n)

    x = policy.spec.features(batch.states)
    blocks = policy.net.forward(x).reshape(n, policy.skills, NUM_ACTIONS)[rows, batch.skills]

    logp = log_softmax(blocks, axis=1)
    probs = np.exp(logp)
    ent = -(probs * logp).sum(axis=1)

    # summed over the steps of an episode, averaged over episodes
    loss = float(-(advantages * logp[rows, batch.actions]).sum() - entropy_weight * ent.sum()) / batch.episodes

    # d(-A log pi)/dz = -A (onehot - p);  d(-H)/dz = p (log p + H)
    d_blocks = advantages[:, None] * probs
    d_blocks[rows, batch.actions] -= advantages
    d_blocks += entropy_weight * probs * (logp + ent[:, None])
    d_blocks /= batch.episodes

    upstream = np.zeros((n, policy.skills, NUM_ACTIONS))
    upstream[rows, batch.skills] = d_blocks

    return loss, policy.net.backward(x, upstream.reshape(n, -1)), float(ent.mean())


def reinforce_surrogate(
    policy: SkillPolicy,
    baseline: Baseline,
    episodes: Sequence[SkillEpisode],
    entropy_weight: float,
) -> tuple[float, Array]:
    """Loss whose negative gradient is the REINFORCE-with-baseline ascent direction plus the entropy bonus.

    Advantages `G_t - b(s_t)` are held fixed, so the gradient is exact in the policy parameters.
    """

    batch = _flatten(episodes)
    advantages = batch.returns - baseline.values(batch.states)
    loss, grad, _ = _surrogate(policy, batch, advantages, entropy_weight)

    return loss, grad


def baseline_loss(baseline: Baseline, episodes: Sequence[SkillEpisode]) -> tuple[float, Array]:
    """0.5 * (b(s_t) - G_t)^2 summed over each episode and averaged over episodes, and its gradient."""

    batch = _flatten(episodes)
    x = baseline.spec.features(batch.states)
    residual = baseline.net.forward(x)[:, 0] - batch.returns

    loss = float(0.5 * (residual * residual).sum()) / batch.episodes

    return loss, baseline.net.backward(x, (residual / batch.episodes)[:, None])


def reinforce_update(
    policy: SkillPolicy,
    baseline: Baseline,
    episodes: Sequence[SkillEpisode],
    entropy_weight: float,
    policy_opt: OptimizerState,
    baseline_opt: OptimizerState,
) -> tuple[SkillPolicy, Baseline, ReinforceReport]:
    """One policy step and one baseline step on the same batch of labeled episodes."""

    batch = _flatten(episodes)
    advantages = batch.returns - baseline.values(batch.states)

    policy_loss, policy_grad, mean_entropy = _surrogate(policy, batch, advantages, entropy_weight)
    value_loss, value_grad = baseline_loss(baseline, episodes)

    new_policy = policy.with_net(policy.net.with_params(apply_update(policy_opt, policy.net.params, policy_grad)))
    new_baseline = baseline.with_net(baseline.net.with_params(apply_update(baseline_opt, baseline.net.params, value_grad)))

    return (
        new_policy,
        new_baseline,
        ReinforceReport(policy_loss=policy_loss, baseline_loss=value_loss, mean_entropy=mean_entropy),
    )
