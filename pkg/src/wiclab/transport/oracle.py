from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from typing import Final, Self

import numpy as np
import numpy.typing as npt
import ot

from wiclab.env import GridSpec, GridState, distance_table
from wiclab.exception import ContractViolation, LipschitzViolation
from wiclab.skills import SkillEpisode

__all__ = (
    "CouplingPlan",
    "FiniteDistribution",
    "Metric",
    "dual_gap",
    "empirical_visitation",
    "exact_w1",
    "grid_metric",
    "w1_from_start",
)

Array = npt.NDArray[np.float64]
Metric = Callable[[GridState, GridState], float]

MASS_TOLERANCE: Final[float] = 1e-12
MARGINAL_TOLERANCE: Final[float] = 1e-9
LIPSCHITZ_TOLERANCE: Final[float] = 1e-12
MAX_SIMPLEX_ITERATIONS: Final[int] = 1_000_000


@dataclass(frozen=True)
class FiniteDistribution:
    support: tuple[GridState, ...]
    mass: Array

    def __post_init__(self) -> None:
        mass = np.array(self.mass, dtype=np.float64).reshape(-1)

        if mass.size != len(self.support) or mass.size == 0:
            raise ContractViolation("Support and mass must be non-empty and of equal length")
        if len(set(self.support)) != len(self.support):
            raise ContractViolation("Support entries must be distinct")
        if (mass < 0).any():
            raise ContractViolation("Masses must be non-negative")
        if abs(mass.sum() - 1.0) > MASS_TOLERANCE:
            raise ContractViolation(f"Masses sum to {mass.sum()!r}, expected 1")

        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def dirac(cls, s: GridState) -> Self:
        return cls((s,), np.ones(1))

    @classmethod
    def from_weights(cls, support: Sequence[GridState], weights: npt.ArrayLike) -> Self:
        """Normalize non-negative weights, merging repeated support points."""

        merged: dict[GridState, float] = {}
        for s, w in zip(support, np.asarray(weights, dtype=np.float64), strict=True):
            merged[s] = merged.get(s, 0.0) + float(w)

        mass = np.array(list(merged.values()))
        return cls(tuple(merged), mass / mass.sum())

    def expectation(self, f: Mapping[GridState, float]) -> float:
        return float(sum(m * f[s] for s, m in zip(self.support, self.mass, strict=True)))


@dataclass(frozen=True)
class CouplingPlan:
    """Transported mass from `source` support (rows) to `target` support (columns)."""

    source: tuple[GridState, ...]
    target: tuple[GridState, ...]
    matrix: Array


def _cost_matrix(mu: FiniteDistribution, nu: FiniteDistribution, metric: Metric) -> Array:
    cost = np.array([[float(metric(x, y)) for y in nu.support] for x in mu.support], dtype=np.float64)

    if not np.isfinite(cost).all() or (cost < 0).any():
        raise ContractViolation("Metric entries must be finite and non-negative")
    for s in {*mu.support, *nu.support}:
        if metric(s, s) != 0:
            raise ContractViolation(f"Metric has a non-zero diagonal at {s}")

    return cost


def exact_w1(mu: FiniteDistribution, nu: FiniteDistribution, metric: Metric) -> tuple[float, CouplingPlan]:
    """Optimal transport cost under `metric` and an optimal plan, by network simplex."""

    if abs(float(mu.mass.sum() - nu.mass.sum())) > MARGINAL_TOLERANCE:
        raise ContractViolation("Distributions carry different total mass")

    cost = _cost_matrix(mu, nu, metric)
    plan = np.asarray(ot.emd(mu.mass.copy(), nu.mass.copy(), cost, numItermax=MAX_SIMPLEX_ITERATIONS), dtype=np.float64)

    return float((plan * cost).sum()), CouplingPlan(mu.support, nu.support, plan)


def dual_gap(
    mu: FiniteDistribution,
    nu: FiniteDistribution,
    metric: Metric,
    f: Mapping[GridState, float],
) -> float:
    """E_nu[f] - E_mu[f] for a potential verified 1-Lipschitz on the joint support."""

    joint = sorted({*mu.support, *nu.support})

    for i, x in enumerate(joint):
        for y in joint[i + 1 :]:
            gap = abs(f[x] - f[y])
            distance = float(metric(x, y))
            if gap > distance + LIPSCHITZ_TOLERANCE:
                raise LipschitzViolation(x, y, gap, distance)

    return nu.expectation(f) - mu.expectation(f)


def grid_metric(spec: GridSpec) -> Metric:
    """Shortest-path step count on `spec`, backed by the cached all-pairs table."""

    table = distance_table(spec)

    def metric(x: GridState, y: GridState) -> float:
        return float(table[spec.index(x), spec.index(y)])

    return metric


def empirical_visitation(episode: SkillEpisode) -> FiniteDistribution:
    """Visitation distribution of one episode: mass 1/T on each of s_1 ... s_T."""

    return FiniteDistribution.from_weights(episode.states[1:], np.full(episode.horizon, 1.0 / episode.horizon))


def w1_from_start(spec: GridSpec, episode: SkillEpisode) -> float:
    """Wasserstein-1 distance from the Dirac at s_0 to the episode's visitation distribution."""

    cost, _ = exact_w1(FiniteDistribution.dirac(episode.start_state), empirical_visitation(episode), grid_metric(spec))

    return cost
