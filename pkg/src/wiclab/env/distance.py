from collections import deque
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from .grid import ACTION_DELTAS, GridSpec, GridState

__all__ = (
    "UNREACHABLE",
    "bfs_distance",
    "bfs_from",
    "distance_table",
    "is_doorway",
    "room_cells",
)

UNREACHABLE = None
"""Returned by `bfs_distance` when no path exists."""


def _neighbours(spec: GridSpec, s: GridState) -> list[GridState]:
    return [
        n
        for dr, dc in ACTION_DELTAS.values()
        if (dr, dc) != (0, 0) and spec.is_valid(n := GridState(s.row + dr, s.col + dc))
    ]


def bfs_from(spec: GridSpec, origin: GridState, blocked: frozenset[GridState] = frozenset()) -> dict[GridState, int]:
    """Step counts from `origin` to every reachable floor cell."""

    spec.require(origin)

    dist = {origin: 0}
    queue = deque([origin])

    while queue:
        s = queue.popleft()
        for n in _neighbours(spec, s):
            if n in dist or n in blocked:
                continue
            dist[n] = dist[s] + 1
            queue.append(n)

    return dist


def bfs_distance(spec: GridSpec, source: GridState, target: GridState) -> int | None:
    """Minimal number of environment steps from `source` to `target`, or `UNREACHABLE`."""

    spec.require(target)

    return bfs_from(spec, source).get(target, UNREACHABLE)


@lru_cache(maxsize=8)
def distance_table(spec: GridSpec) -> npt.NDArray[np.float64]:
    """All-pairs step counts indexed by `spec.index`; `inf` marks unreachable pairs and walls."""

    table = np.full((spec.num_cells, spec.num_cells), np.inf, dtype=np.float64)

    for origin in spec.valid_cells:
        row = table[spec.index(origin)]
        for target, d in bfs_from(spec, origin).items():
            row[spec.index(target)] = d

    table.setflags(write=False)
    return table


def is_doorway(spec: GridSpec, s: GridState) -> bool:
    """A floor cell squeezed between walls on two opposite sides."""

    def _blocked(dr: int, dc: int) -> bool:
        return not spec.is_valid(GridState(s.row + dr, s.col + dc))

    return spec.is_valid(s) and ((_blocked(-1, 0) and _blocked(1, 0)) or (_blocked(0, -1) and _blocked(0, 1)))


def room_cells(spec: GridSpec, cell: GridState) -> frozenset[GridState]:
    """Floor cells reachable from `cell` without crossing a doorway."""

    doorways = frozenset(s for s in spec.valid_cells if is_doorway(spec, s) and s != cell)

    return frozenset(bfs_from(spec, cell, blocked=doorways))
