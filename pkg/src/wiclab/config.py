import hashlib
from pathlib import Path
from typing import Any, ClassVar, Final, Literal, Self

import msgspec
import structlog
from msgspec import toml, yaml
from pydantic import Field, ValidationError, model_validator

from .env import GridSpec, four_rooms_spec, open_room_spec
from .exception import ConfigurationError
from .lib.toolkit import get_env
from .nn import OptimizerKind, Topology
from .schema import BaseSchema, StrictSchema
from .skills import ChainSchedule
from .wic import WicConfig

__all__ = (
    "PRESETS",
    "PROJECT_NAME",
    "Environment",
    "ExperimentConfig",
    "LabSettings",
    "Method",
    "load_experiment_config",
    "parse_flat_config",
    "parse_overrides",
)

PROJECT_NAME: Final[str] = "wiclab"

logger = structlog.stdlib.get_logger(__name__)

Environment = Literal["tabular15", "four_rooms"]
Method = Literal["wic", "vic"]

NONE_VALUES: Final[frozenset[str]] = frozenset({"", "none", "None", "null"})

# Short names used in the literature for the skill count and horizon.
ALIASES: Final[dict[str, str]] = {"K": "skills", "T": "horizon"}

PRESETS: Final[dict[str, dict[str, Any]]] = {
    "tabular15": {
        "horizon": 10,
        "optimizer": "sgd",
        "learning_rate": 0.003,
        "topology": "linear",
        "episodes_between_resets": 1,
        "total_updates": 5_000,
    },
    "four_rooms": {
        "horizon": 40,
        "optimizer": "adam",
        "learning_rate": 0.001,
        "topology": "mlp_2x128",
        "episodes_between_resets": 17,
        "total_updates": 20_000,
    },
}


class LabSettings(BaseSchema):
    """Process-level settings read from the environment."""

    _instance: ClassVar["LabSettings | None"] = None

    output_root: Path = Field(default_factory=get_env("WICLAB_OUTPUT_ROOT", Path("runs")))
    """Directory that receives one sub-directory per run."""
    workers: int = Field(default_factory=get_env("WICLAB_WORKERS", 1))
    """Worker processes used by multi-seed sweeps."""
    log_level: str = Field(default_factory=get_env("WICLAB_LOG_LEVEL", "INFO"))
    """Threshold for structured log events printed by the CLI."""

    @classmethod
    def get_settings(cls) -> "LabSettings":
        if cls._instance is None:
            cls._instance = cls()
        return cls._instance


class ExperimentConfig(StrictSchema):
    """One seeded experiment. Missing fields are filled from the environment preset."""

    environment: Environment = Field(default="tabular15")
    method: Method = Field(default="wic")
    skills: int = Field(default=4, ge=1)
    horizon: int = Field(ge=1)
    eta: float = Field(default=0.9, ge=0.0, le=1.0)
    entropy_weight: float = Field(default=0.01, ge=0.0)
    lipschitz_weight: float = Field(default=10.0, ge=0.0)
    potential_batch_size: int | None = Field(default=None, ge=1)
    optimizer: OptimizerKind
    learning_rate: float = Field(gt=0.0)
    topology: Topology
    episodes_per_update: int = Field(default=16, ge=1)
    episodes_per_step: int = Field(default=1, ge=1)
    """Episodes per optimizer minibatch; the collected batch is consumed in order."""
    total_updates: int = Field(ge=0)
    seed: int = Field(default=0)
    episodes_between_resets: int = Field(ge=1)
    log_every: int = Field(default=100, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _apply_preset(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data

        environment = data.get("environment", "tabular15")
        preset = PRESETS.get(environment, {})

        merged = dict(data)
        for short, name in ALIASES.items():
            if short in merged:
                if merged.get(name) is not None:
                    raise ValueError(f"Both {short!r} and {name!r} given")
                merged[name] = merged.pop(short)

        for key, value in preset.items():
            if merged.get(key) is None:
                merged[key] = value
        return merged

    def grid_spec(self) -> GridSpec:
        return open_room_spec(15) if self.environment == "tabular15" else four_rooms_spec()

    def wic_config(self) -> WicConfig:
        return WicConfig(
            eta=self.eta,
            lipschitz_weight=self.lipschitz_weight,
            batch_size=self.potential_batch_size,
        )

    def schedule(self) -> ChainSchedule:
        return ChainSchedule(
            skills=self.skills,
            horizon=self.horizon,
            episodes_between_resets=self.episodes_between_resets,
            total_episodes=self.total_updates * self.episodes_per_update,
        )

    def config_hash(self) -> str:
        """Digest of every field except the seed."""

        encoded = msgspec.json.encode(self.to_dict(exclude={"seed"}), order="sorted")
        return hashlib.sha256(encoded).hexdigest()[:12]

    def run_name(self) -> str:
        return f"{self.method}-{self.environment}-{self.config_hash()}-seed{self.seed}"

    def with_overrides(self, **overrides: Any) -> Self:
        return type(self).build({**self.to_dict(), **overrides})

    @classmethod
    def build(cls, data: dict[str, Any]) -> Self:
        """Validate, reporting failures with the offending field names."""

        try:
            return cls.from_dict(data)
        except ValidationError as e:
            fields = ", ".join(".".join(str(part) for part in err["loc"]) or "<root>" for err in e.errors())
            raise ConfigurationError(f"Invalid experiment config ({fields}): {e}") from e


def parse_flat_config(text: str) -> dict[str, Any]:
    """Parse `key = value` lines; '#' starts a comment."""

    data: dict[str, Any] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"Line {lineno}: expected 'key = value', got {raw!r}")

        key = key.strip()
        if key in data:
            raise ConfigurationError(f"Line {lineno}: duplicate key {key!r}")

        value = value.strip().strip("\"'")
        data[key] = None if value in NONE_VALUES else value

    return data


def parse_overrides(args: list[str]) -> dict[str, Any]:
    """Turn `--key=value` arguments into a config dict."""

    overrides: dict[str, Any] = {}

    for arg in args:
        if not arg.startswith("--") or "=" not in arg:
            raise ConfigurationError(f"Overrides must look like --key=value, got {arg!r}")

        key, value = arg[2:].split("=", 1)
        overrides[key.replace("-", "_")] = None if value in NONE_VALUES else value

    return overrides


def _canonical(data: dict[str, Any]) -> dict[str, Any]:
    return {ALIASES.get(key, key): value for key, value in data.items()}


def _read_config_file(filepath: Path) -> dict[str, Any]:
    match filepath.suffix:
        case ".yaml" | ".yml":
            return yaml.decode(filepath.read_text().strip(), type=dict[str, Any])
        case ".toml":
            return toml.decode(filepath.read_text().strip(), type=dict[str, Any])
        case _:
            return parse_flat_config(filepath.read_text())


def load_experiment_config(path: Path | str | None = None, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    data: dict[str, Any] = {}

    if path is not None:
        if not (filepath := Path(path)).exists():
            raise ConfigurationError(f"Config file not found: {filepath}")
        data = _canonical(_read_config_file(filepath))

    data.update(_canonical(overrides or {}))

    cfg = ExperimentConfig.build(data)
    logger.debug("Config loaded", path=str(path), run=cfg.run_name())
    return cfg
