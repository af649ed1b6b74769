from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from pathlib import Path
from typing import Final, Literal

import numpy as np
import numpy.typing as npt

from wiclab.exception import ConfigurationError, ContractViolation

__all__ = (
    "ACTION_DELTAS",
    "FeatureMode",
    "GridAction",
    "GridSpec",
    "GridState",
    "dump_map",
    "featurize",
    "four_rooms_spec",
    "load_map",
    "load_map_file",
    "open_room_spec",
    "step",
)

FeatureMode = Literal["one_hot", "scaled_xy"]

WALL: Final[str] = "#"
FLOOR: Final[str] = "."
START: Final[str] = "S"


class GridAction(IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3
    NOOP = 4


# (row, col) offsets, Up decreases row and Left decreases col.
ACTION_DELTAS: Final[dict[GridAction, tuple[int, int]]] = {
    GridAction.UP: (-1, 0),
    GridAction.DOWN: (1, 0),
    GridAction.LEFT: (0, -1),
    GridAction.RIGHT: (0, 1),
    GridAction.NOOP: (0, 0),
}


@dataclass(frozen=True, slots=True, order=True)
class GridState:
    row: int
    col: int

    def __str__(self) -> str:
        return f"({self.row}, {self.col})"


@dataclass(frozen=True)
class GridSpec:
    """A deterministic grid layout.

    Cells are indexed row-major over the full rectangle, walls included, so that
    `one_hot` features keep a fixed position per cell.
    """

    width: int
    height: int
    walls: frozenset[GridState] = field(default_factory=frozenset)
    start_cell: GridState = field(default=GridState(0, 0))
    feature_mode: FeatureMode = field(default="one_hot")
    name: str = field(default="grid", compare=False)

    def __post_init__(self) -> None:
        if self.width < 2 or self.height < 2:
            raise ConfigurationError(f"Grid must be at least 2x2, got {self.width}x{self.height}")

        for wall in self.walls:
            if not self.in_bounds(wall):
                raise ConfigurationError(f"Wall {wall} lies outside a {self.width}x{self.height} grid")

        if not self.in_bounds(self.start_cell) or self.start_cell in self.walls:
            raise ConfigurationError(f"Start cell {self.start_cell} must be an in-bounds floor cell")

        if self.feature_mode not in ("one_hot", "scaled_xy"):
            raise ConfigurationError(f"Unknown feature mode: {self.feature_mode}")

    @property
    def feature_dim(self) -> int:
        return self.width * self.height if self.feature_mode == "one_hot" else 2

    @property
    def num_cells(self) -> int:
        return self.width * self.height

    def in_bounds(self, s: GridState) -> bool:
        return 0 <= s.row < self.height and 0 <= s.col < self.width

    def is_valid(self, s: GridState) -> bool:
        return self.in_bounds(s) and s not in self.walls

    def index(self, s: GridState) -> int:
        return s.row * self.width + s.col

    def state_at(self, index: int) -> GridState:
        return GridState(*divmod(index, self.width))

    @cached_property
    def valid_cells(self) -> tuple[GridState, ...]:
        """Floor cells in row-major order."""

        return tuple(
            s for row in range(self.height) for col in range(self.width) if self.is_valid(s := GridState(row, col))
        )

    @cached_property
    def feature_table(self) -> npt.NDArray[np.float64]:
        """Features of every cell (walls included), indexed by `index`."""

        table = np.stack([_encode(self, self.state_at(i)) for i in range(self.num_cells)])
        table.setflags(write=False)
        return table

    def features(self, states: Sequence[GridState]) -> npt.NDArray[np.float64]:
        return self.feature_table[[self.index(s) for s in states]]

    def require(self, s: GridState) -> None:
        if not self.is_valid(s):
            raise ContractViolation(f"{s} is not a floor cell of {self.name}")


def _encode(spec: GridSpec, s: GridState) -> npt.NDArray[np.float64]:
    if spec.feature_mode == "one_hot":
        vec = np.zeros(spec.num_cells, dtype=np.float64)
        vec[spec.index(s)] = 1.0
        return vec

    return np.array(
        [
            2.0 * s.col / (spec.width - 1) - 1.0,
            2.0 * s.row / (spec.height - 1) - 1.0,
        ],
        dtype=np.float64,
    )


def step(spec: GridSpec, s: GridState, a: GridAction) -> GridState:
    """Move one cell in the action's direction, staying put at walls and borders."""

    spec.require(s)

    dr, dc = ACTION_DELTAS[GridAction(a)]
    candidate = GridState(s.row + dr, s.col + dc)

    return candidate if spec.is_valid(candidate) else s


def featurize(spec: GridSpec, s: GridState) -> npt.NDArray[np.float64]:
    spec.require(s)

    return spec.feature_table[spec.index(s)].copy()


def open_room_spec(size: int = 15, feature_mode: FeatureMode = "one_hot") -> GridSpec:
    """Obstacle-free square room starting at its centre."""

    return GridSpec(
        width=size,
        height=size,
        start_cell=GridState(size // 2, size // 2),
        feature_mode=feature_mode,
        name=f"open{size}",
    )


def four_rooms_spec() -> GridSpec:
    """Classic 13x13 four-rooms layout, starting in the bottom-left room."""

    size = 13
    walls: set[GridState] = set()

    for i in range(size):
        walls.update(
            {
                GridState(0, i),
                GridState(size - 1, i),
                GridState(i, 0),
                GridState(i, size - 1),
                GridState(i, 6),
                GridState(6, i),
            }
        )

    walls -= {GridState(3, 6), GridState(10, 6), GridState(6, 3), GridState(6, 10)}

    return GridSpec(
        width=size,
        height=size,
        walls=frozenset(walls),
        start_cell=GridState(9, 3),
        feature_mode="scaled_xy",
        name="four_rooms",
    )


def load_map(text: str, feature_mode: FeatureMode = "one_hot", name: str = "map") -> GridSpec:
    """Parse a layout: '#' wall, '.' floor, 'S' start, one row per line."""

    rows = [line.rstrip("\r") for line in text.strip().splitlines() if line.strip()]
    if not rows:
        raise ConfigurationError("Map is empty")

    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ConfigurationError("Map rows must all have the same length")

    walls: set[GridState] = set()
    starts: list[GridState] = []

    for r, row in enumerate(rows):
        for c, char in enumerate(row):
            match char:
                case "#":
                    walls.add(GridState(r, c))
                case ".":
                    pass
                case "S":
                    starts.append(GridState(r, c))
                case _:
                    raise ConfigurationError(f"Unknown map character {char!r} at ({r}, {c})")

    if len(starts) != 1:
        raise ConfigurationError(f"Map needs exactly one start cell, found {len(starts)}")

    return GridSpec(
        width=width,
        height=len(rows),
        walls=frozenset(walls),
        start_cell=starts[0],
        feature_mode=feature_mode,
        name=name,
    )


def load_map_file(path: Path | str, feature_mode: FeatureMode = "one_hot") -> GridSpec:
    path = Path(path)

    return load_map(path.read_text(), feature_mode=feature_mode, name=path.stem)


def dump_map(spec: GridSpec) -> str:
    def _char(s: GridState) -> str:
        if s == spec.start_cell:
            return START
        return WALL if s in spec.walls else FLOOR

    return "\n".join(
        "".join(_char(GridState(row, col)) for col in range(spec.width)) for row in range(spec.height)
    )
