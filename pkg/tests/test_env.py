import itertools
from pathlib import Path

import numpy as np
import pytest

from wiclab.env import (
    GridAction,
    GridSpec,
    GridState,
    bfs_distance,
    distance_table,
    dump_map,
    featurize,
    four_rooms_spec,
    load_map,
    load_map_file,
    open_room_spec,
    room_cells,
    step,
)
from wiclab.exception import ConfigurationError, ContractViolation

LAYOUTS = Path(__file__).parents[1] / "layouts"


def test_step_follows_row_col_convention(open15: GridSpec) -> None:
    assert step(open15, GridState(7, 7), GridAction.UP) == GridState(6, 7)
    assert step(open15, GridState(7, 7), GridAction.DOWN) == GridState(8, 7)
    assert step(open15, GridState(7, 7), GridAction.LEFT) == GridState(7, 6)
    assert step(open15, GridState(7, 7), GridAction.RIGHT) == GridState(7, 8)


def test_step_clamps_and_noop(open15: GridSpec) -> None:
    assert step(open15, GridState(0, 0), GridAction.UP) == GridState(0, 0)
    assert step(open15, GridState(3, 3), GridAction.NOOP) == GridState(3, 3)


def test_step_rejects_wall_state(four_rooms: GridSpec) -> None:
    with pytest.raises(ContractViolation):
        step(four_rooms, GridState(0, 0), GridAction.DOWN)


@pytest.mark.parametrize("layout", ["open15", "four_rooms"])
def test_step_never_leaves_the_floor(layout: str, request: pytest.FixtureRequest) -> None:
    spec: GridSpec = request.getfixturevalue(layout)

    for s in spec.valid_cells:
        for a in GridAction:
            assert spec.is_valid(step(spec, s, a))


def test_step_blocked_by_interior_wall(four_rooms: GridSpec) -> None:
    assert step(four_rooms, GridState(9, 5), GridAction.RIGHT) == GridState(9, 5)
    assert step(four_rooms, GridState(10, 5), GridAction.RIGHT) == GridState(10, 6)


def test_action_set_has_five_members() -> None:
    assert len(GridAction) == 5


def test_one_hot_features(open15: GridSpec) -> None:
    vec = featurize(open15, GridState(0, 0))

    assert vec.shape == (225,)
    assert vec[0] == 1.0
    assert vec.sum() == 1.0
    assert featurize(open15, GridState(2, 3))[2 * 15 + 3] == 1.0


def test_scaled_xy_features(four_rooms: GridSpec) -> None:
    assert four_rooms.feature_dim == 2
    np.testing.assert_array_equal(featurize(four_rooms, GridState(6, 6)), [0.0, 0.0])

    table = four_rooms.feature_table
    assert table.min() >= -1.0
    assert table.max() <= 1.0


def test_scaled_xy_corner() -> None:
    spec = GridSpec(width=13, height=13, feature_mode="scaled_xy")

    np.testing.assert_array_equal(featurize(spec, GridState(0, 12)), [1.0, -1.0])


def test_features_are_copies(open15: GridSpec) -> None:
    vec = featurize(open15, GridState(1, 1))
    vec[:] = 7.0

    assert featurize(open15, GridState(1, 1)).sum() == 1.0


def test_bfs_examples(open15: GridSpec) -> None:
    assert bfs_distance(open15, GridState(7, 7), GridState(7, 7)) == 0
    assert bfs_distance(open15, GridState(7, 7), GridState(4, 9)) == 5


def test_bfs_is_manhattan_in_open_room(open15: GridSpec) -> None:
    rows = np.array([s.row for s in open15.valid_cells])
    cols = np.array([s.col for s in open15.valid_cells])
    manhattan = np.abs(rows[:, None] - rows[None, :]) + np.abs(cols[:, None] - cols[None, :])

    np.testing.assert_array_equal(distance_table(open15), manhattan)


def test_bfs_four_rooms_diagonal(four_rooms: GridSpec) -> None:
    # up through the west doorway, then right through the north one
    assert bfs_distance(four_rooms, GridState(9, 3), GridState(3, 9)) == 12


def test_bfs_triangle_inequality(small_room: GridSpec) -> None:
    cells = small_room.valid_cells
    table = distance_table(small_room)

    def d(a: GridState, b: GridState) -> float:
        return float(table[small_room.index(a), small_room.index(b)])

    for x, y, z in itertools.product(cells, repeat=3):
        assert d(x, x) == 0
        assert d(x, y) == d(y, x)
        assert d(x, z) <= d(x, y) + d(y, z)


def test_bfs_unreachable() -> None:
    spec = load_map("S#.\n.#.")

    assert bfs_distance(spec, GridState(0, 0), GridState(0, 2)) is None
    assert np.isinf(distance_table(spec)[spec.index(GridState(0, 0)), spec.index(GridState(0, 2))])


def test_distance_tables_are_cached_but_bounded() -> None:
    specs = [open_room_spec(size) for size in range(3, 15)]

    for spec in specs:
        assert distance_table(spec) is distance_table(spec)

    info = distance_table.cache_info()
    assert info.maxsize == 8
    assert info.currsize <= 8


def test_four_rooms_layout(four_rooms: GridSpec) -> None:
    assert (four_rooms.width, four_rooms.height) == (13, 13)
    assert four_rooms.start_cell == GridState(9, 3)
    for door in (GridState(3, 6), GridState(10, 6), GridState(6, 3), GridState(6, 10)):
        assert four_rooms.is_valid(door)
    assert not four_rooms.is_valid(GridState(6, 6))
    assert len(four_rooms.valid_cells) == 104


def test_layout_file_matches_builtin() -> None:
    loaded = load_map_file(LAYOUTS / "four_rooms.txt", feature_mode="scaled_xy")

    assert loaded == four_rooms_spec()


def test_dump_and_load_map(four_rooms: GridSpec) -> None:
    again = load_map(dump_map(four_rooms), feature_mode="scaled_xy")

    assert again == four_rooms


@pytest.mark.parametrize(
    "text",
    [
        "",
        "S..\n..",
        "...\n...",
        "S.S\n...",
        "S.x\n...",
    ],
)
def test_load_map_rejects_bad_layouts(text: str) -> None:
    with pytest.raises(ConfigurationError):
        load_map(text)


def test_grid_spec_invariants() -> None:
    with pytest.raises(ConfigurationError):
        GridSpec(width=5, height=5, walls=frozenset({GridState(9, 9)}))
    with pytest.raises(ConfigurationError):
        GridSpec(width=5, height=5, walls=frozenset({GridState(0, 0)}))


def test_start_room(four_rooms: GridSpec) -> None:
    room = room_cells(four_rooms, four_rooms.start_cell)

    assert len(room) == 25
    assert GridState(10, 6) not in room
    assert all(s.row > 6 and s.col < 6 for s in room)


def test_open_room_is_one_room(open15: GridSpec) -> None:
    assert room_cells(open15, open15.start_cell) == frozenset(open15.valid_cells)
