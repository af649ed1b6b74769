import io
import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import msgspec
import numpy as np
import pandas as pd

from wiclab.env import GridSpec, GridState, distance_table, room_cells
from wiclab.exception import ContractViolation
from wiclab.skills import SkillEpisode

__all__ = (
    "EndpointRow",
    "EndpointSummary",
    "MetricsRow",
    "RunRecord",
    "endpoint_distances",
    "endpoint_summary",
    "episodic_coverage",
    "metrics_row",
)

BASE_COLUMNS = ("update", "episodic_coverage", "lifetime_coverage", "mean_return")


class MetricsRow(msgspec.Struct, frozen=True):
    update: int
    episodic_coverage: float
    lifetime_coverage: int
    mean_return: float
    endpoint_distance: tuple[float | None, ...]
    """Mean BFS distance from s_0 to s_T per skill; None when a skill was not sampled."""


@dataclass
class RunRecord:
    """Append-only metrics stream of one seeded run."""

    skills: int
    rows: list[MetricsRow] = field(default_factory=list)

    @property
    def columns(self) -> tuple[str, ...]:
        return (*BASE_COLUMNS, *(f"endpoint_distance_{w}" for w in range(self.skills)))

    def append(self, row: MetricsRow) -> None:
        if len(row.endpoint_distance) != self.skills:
            raise ContractViolation(f"Row has {len(row.endpoint_distance)} endpoint columns, expected {self.skills}")

        if self.rows:
            last = self.rows[-1]
            if row.update <= last.update:
                raise ContractViolation(f"Update index {row.update} does not follow {last.update}")
            if row.lifetime_coverage < last.lifetime_coverage:
                raise ContractViolation("Lifetime coverage cannot shrink")

        self.rows.append(row)

    def to_frame(self) -> pd.DataFrame:
        data: dict[str, list[float | int | None]] = {
            "update": [r.update for r in self.rows],
            "episodic_coverage": [r.episodic_coverage for r in self.rows],
            "lifetime_coverage": [r.lifetime_coverage for r in self.rows],
            "mean_return": [r.mean_return for r in self.rows],
        }
        for w in range(self.skills):
            data[f"endpoint_distance_{w}"] = [r.endpoint_distance[w] for r in self.rows]

        return pd.DataFrame(data, columns=list(self.columns))

    def to_csv(self) -> str:
        return self.to_frame().to_csv(index=False, na_rep="", lineterminator="\n")

    @classmethod
    def from_csv(cls, text: str) -> "RunRecord":
        try:
            df = pd.read_csv(io.StringIO(text), float_precision="round_trip")
        except pd.errors.EmptyDataError as e:
            raise ContractViolation("Not a metrics file") from e

        if tuple(df.columns[: len(BASE_COLUMNS)]) != BASE_COLUMNS:
            raise ContractViolation("Not a metrics file")

        distance_columns = list(df.columns[len(BASE_COLUMNS) :])
        record = cls(skills=len(distance_columns))
        for _, cells in df.iterrows():
            record.append(
                MetricsRow(
                    update=int(cells["update"]),
                    episodic_coverage=float(cells["episodic_coverage"]),
                    lifetime_coverage=int(cells["lifetime_coverage"]),
                    mean_return=float(cells["mean_return"]),
                    endpoint_distance=tuple(None if pd.isna(cells[c]) else float(cells[c]) for c in distance_columns),
                )
            )

        return record

    def write_csv(self, path: Path | str) -> Path:
        path = Path(path)
        path.write_text(self.to_csv())
        return path

    @classmethod
    def read_csv(cls, path: Path | str) -> "RunRecord":
        return cls.from_csv(Path(path).read_text())


def episodic_coverage(episode: SkillEpisode) -> int:
    """Distinct states among s_0 ... s_T."""

    return len(set(episode.states))


def endpoint_distances(spec: GridSpec, episodes: Sequence[SkillEpisode], skills: int) -> tuple[float | None, ...]:
    table = distance_table(spec)
    per_skill: list[list[float]] = [[] for _ in range(skills)]

    for ep in episodes:
        per_skill[ep.skill].append(float(table[spec.index(ep.start_state), spec.index(ep.end_state)]))

    return tuple(float(np.mean(d)) if d else None for d in per_skill)


def metrics_row(
    spec: GridSpec,
    update: int,
    episodes: Sequence[SkillEpisode],
    skills: int,
    visited: set[GridState],
) -> MetricsRow:
    """Summarize one labeled batch; `visited` accumulates lifetime coverage in place."""

    if not episodes:
        raise ContractViolation("A metrics row needs at least one episode")

    for ep in episodes:
        visited.update(ep.states)

    return MetricsRow(
        update=update,
        episodic_coverage=float(np.mean([episodic_coverage(ep) for ep in episodes])),
        lifetime_coverage=len(visited),
        mean_return=float(np.mean([ep.total_reward for ep in episodes])),
        endpoint_distance=endpoint_distances(spec, episodes, skills),
    )


class EndpointRow(msgspec.Struct, frozen=True):
    skill: int
    rollout: int
    row: int
    col: int
    distance: float

    @property
    def cell(self) -> GridState:
        return GridState(self.row, self.col)


class EndpointSummary(msgspec.Struct, frozen=True):
    mean_distance: float
    skill_distance: list[float | None]
    displacement: list[tuple[float, float] | None]
    """Mean (dx, dy) per skill, x to the right and y upwards."""
    min_angle_degrees: float | None
    outside_start_room: float


def _angle(u: tuple[float, float], v: tuple[float, float]) -> float:
    nu, nv = np.hypot(*u), np.hypot(*v)
    if nu == 0.0 or nv == 0.0:
        return 0.0

    cosine = np.clip((u[0] * v[0] + u[1] * v[1]) / (nu * nv), -1.0, 1.0)
    return float(np.degrees(np.arccos(cosine)))


def endpoint_summary(spec: GridSpec, rows: Iterable[EndpointRow], skills: int) -> EndpointSummary:
    endpoints = list(rows)
    if not endpoints:
        raise ContractViolation("endpoint_summary needs at least one endpoint")

    start = spec.start_cell
    home = room_cells(spec, start)

    skill_distance: list[float | None] = []
    displacement: list[tuple[float, float] | None] = []

    for w in range(skills):
        group = [r for r in endpoints if r.skill == w]
        if not group:
            skill_distance.append(None)
            displacement.append(None)
            continue

        skill_distance.append(float(np.mean([r.distance for r in group])))
        displacement.append(
            (
                float(np.mean([r.col - start.col for r in group])),
                float(np.mean([start.row - r.row for r in group])),
            )
        )

    vectors = [d for d in displacement if d is not None]
    angles = [_angle(u, v) for u, v in itertools.combinations(vectors, 2)]

    return EndpointSummary(
        mean_distance=float(np.mean([r.distance for r in endpoints])),
        skill_distance=skill_distance,
        displacement=displacement,
        min_angle_degrees=min(angles) if angles else None,
        outside_start_room=float(np.mean([r.cell not in home for r in endpoints])),
    )
