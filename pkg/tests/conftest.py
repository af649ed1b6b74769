import numpy as np
import pytest

from wiclab.config import LabSettings
from wiclab.env import GridSpec, GridState, four_rooms_spec, load_map, open_room_spec


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240501)


@pytest.fixture(scope="session")
def open15() -> GridSpec:
    return open_room_spec(15)


@pytest.fixture(scope="session")
def four_rooms() -> GridSpec:
    return four_rooms_spec()


@pytest.fixture(scope="session")
def corridor() -> GridSpec:
    """Single-row corridor of five floor cells, start at the left end."""

    return load_map("#######\n#S....#\n#######", name="corridor")


@pytest.fixture(scope="session")
def small_room() -> GridSpec:
    return load_map(
        """
        #####
        #...#
        #.S.#
        #...#
        #####
        """.replace(" ", ""),
        name="small",
    )


@pytest.fixture
def centre(open15: GridSpec) -> GridState:
    return open15.start_cell


@pytest.fixture(autouse=True)
def _isolated_settings(tmp_path_factory: pytest.TempPathFactory, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("WICLAB_OUTPUT_ROOT", str(tmp_path_factory.mktemp("runs")))
    monkeypatch.setattr(LabSettings, "_instance", None)
