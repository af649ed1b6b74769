from pathlib import Path

import pytest
from pydantic import ValidationError

from wiclab.config import (
    PRESETS,
    ExperimentConfig,
    LabSettings,
    load_experiment_config,
    parse_flat_config,
    parse_overrides,
)
from wiclab.exception import ConfigurationError

CONFIG_DIR = Path(__file__).parent.parent / "configs"


def test_presets_fill_missing_fields() -> None:
    tabular = ExperimentConfig.build({})
    rooms = ExperimentConfig.build({"environment": "four_rooms"})

    assert tabular.horizon == 10
    assert tabular.topology == "linear"
    assert tabular.optimizer == "sgd"
    assert tabular.learning_rate == pytest.approx(0.003)
    assert tabular.episodes_between_resets == 1

    assert rooms.horizon == 40
    assert rooms.topology == "mlp_2x128"
    assert rooms.optimizer == "adam"
    assert rooms.episodes_between_resets == 17
    assert rooms.total_updates == PRESETS["four_rooms"]["total_updates"]


def test_explicit_fields_beat_presets() -> None:
    cfg = ExperimentConfig.build({"environment": "four_rooms", "horizon": 5, "optimizer": "sgd"})

    assert cfg.horizon == 5
    assert cfg.optimizer == "sgd"
    assert cfg.learning_rate == pytest.approx(0.001)


def test_aliases() -> None:
    cfg = ExperimentConfig.build({"K": 8, "T": 3})

    assert (cfg.skills, cfg.horizon) == (8, 3)

    with pytest.raises(ConfigurationError):
        ExperimentConfig.build({"K": 8, "skills": 4})


@pytest.mark.parametrize(
    "data",
    [
        {"skills": 0},
        {"horizon": 0},
        {"eta": 1.5},
        {"learning_rate": 0},
        {"episodes_per_step": 0},
        {"topology": "conv"},
        {"method": "diayn"},
        {"environment": "maze"},
        {"unknown_key": 1},
    ],
)
def test_invalid_configs(data: dict) -> None:
    with pytest.raises(ConfigurationError):
        ExperimentConfig.build(data)


def test_config_is_frozen() -> None:
    cfg = ExperimentConfig.build({})

    with pytest.raises(ValidationError):
        cfg.seed = 3  # type: ignore[misc]


def test_hash_ignores_seed() -> None:
    cfg = ExperimentConfig.build({"seed": 1})
    other = cfg.with_overrides(seed=2)

    assert cfg.config_hash() == other.config_hash()
    assert cfg.run_name() != other.run_name()
    assert cfg.run_name().startswith("wic-tabular15-")
    assert cfg.run_name().endswith("-seed1")
    assert cfg.config_hash() != cfg.with_overrides(eta=0.5).config_hash()


def test_derived_settings() -> None:
    cfg = ExperimentConfig.build({"environment": "four_rooms", "eta": 0.5, "total_updates": 3, "potential_batch_size": 8})

    assert cfg.grid_spec().name == "four_rooms"
    assert cfg.wic_config().eta == 0.5
    assert cfg.wic_config().batch_size == 8
    assert cfg.schedule().total_episodes == 3 * cfg.episodes_per_update
    assert cfg.schedule().episodes_between_resets == 17
    assert cfg.episodes_per_step == 1


def test_parse_flat_config() -> None:
    text = """
    # comment
    method = vic   # trailing
    K = 8
    potential_batch_size = none
    """

    assert parse_flat_config(text) == {"method": "vic", "K": "8", "potential_batch_size": None}

    with pytest.raises(ConfigurationError):
        parse_flat_config("method vic")
    with pytest.raises(ConfigurationError):
        parse_flat_config("K = 1\nK = 2")


def test_parse_overrides() -> None:
    assert parse_overrides(["--seed=3", "--total-updates=10", "--potential_batch_size=none"]) == {
        "seed": "3",
        "total_updates": "10",
        "potential_batch_size": None,
    }

    with pytest.raises(ConfigurationError):
        parse_overrides(["seed=3"])
    with pytest.raises(ConfigurationError):
        parse_overrides(["--seed"])


@pytest.mark.parametrize("name", ["tabular15_wic", "tabular15_vic", "four_rooms_wic", "four_rooms_vic"])
def test_shipped_configs_load(name: str) -> None:
    cfg = load_experiment_config(CONFIG_DIR / f"{name}.cfg")

    environment, method = name.rsplit("_", 1)
    assert cfg.environment == environment
    assert cfg.method == method
    assert cfg.skills == 4


def test_overrides_win_over_file_aliases() -> None:
    cfg = load_experiment_config(CONFIG_DIR / "tabular15_wic.cfg", {"skills": "2", "T": "4"})

    assert (cfg.skills, cfg.horizon) == (2, 4)


def test_yaml_and_toml(tmp_path: Path) -> None:
    (tmp_path / "run.yaml").write_text("method: vic\nK: 2\nseed: 7\n")
    (tmp_path / "run.toml").write_text('environment = "four_rooms"\nT = 12\n')

    from_yaml = load_experiment_config(tmp_path / "run.yaml")
    from_toml = load_experiment_config(tmp_path / "run.toml")

    assert (from_yaml.method, from_yaml.skills, from_yaml.seed) == ("vic", 2, 7)
    assert (from_toml.environment, from_toml.horizon) == ("four_rooms", 12)


def test_missing_config_file(tmp_path: Path) -> None:
    with pytest.raises(ConfigurationError):
        load_experiment_config(tmp_path / "absent.cfg")


def test_settings_from_environment(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    monkeypatch.setenv("WICLAB_OUTPUT_ROOT", str(tmp_path))
    monkeypatch.setenv("WICLAB_WORKERS", "3")
    monkeypatch.setenv("WICLAB_LOG_LEVEL", "DEBUG")

    settings = LabSettings.get_settings()

    assert settings.output_root == tmp_path
    assert settings.workers == 3
    assert settings.log_level == "DEBUG"
    assert LabSettings.get_settings() is settings
