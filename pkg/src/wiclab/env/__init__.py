from .distance import UNREACHABLE, bfs_distance, bfs_from, distance_table, is_doorway, room_cells
from .grid import (
    ACTION_DELTAS,
    FeatureMode,
    GridAction,
    GridSpec,
    GridState,
    dump_map,
    featurize,
    four_rooms_spec,
    load_map,
    load_map_file,
    open_room_spec,
    step,
)

__all__ = (
    "ACTION_DELTAS",
    "UNREACHABLE",
    "FeatureMode",
    "GridAction",
    "GridSpec",
    "GridState",
    "bfs_distance",
    "bfs_from",
    "distance_table",
    "dump_map",
    "featurize",
    "four_rooms_spec",
    "is_doorway",
    "load_map",
    "load_map_file",
    "open_room_spec",
    "room_cells",
    "step",
)
