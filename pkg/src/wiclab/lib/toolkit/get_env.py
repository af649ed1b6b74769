from __future__ import annotations

import os
from pathlib import Path
from typing import TYPE_CHECKING, Final, overload

if TYPE_CHECKING:
    from collections.abc import Callable

__all__ = (
    "get_config_val",
    "get_env",
)

TRUE_VALUES: Final[frozenset[str]] = frozenset({"True", "true", "1", "yes", "YES", "Y", "y", "T", "t"})

ParseTypes = bool | int | float | str | Path


@overload
def get_env(key: str, default: bool) -> Callable[[], bool]: ...


@overload
def get_env(key: str, default: int) -> Callable[[], int]: ...


@overload
def get_env(key: str, default: float) -> Callable[[], float]: ...


@overload
def get_env(key: str, default: str) -> Callable[[], str]: ...


@overload
def get_env(key: str, default: Path) -> Callable[[], Path]: ...


@overload
def get_env(key: str, default: None) -> Callable[[], str | None]: ...


def get_env(key: str, default: ParseTypes | None) -> Callable[[], ParseTypes | None]:
    """Defer an environment lookup, for use as a pydantic `default_factory`."""

    return lambda: get_config_val(key=key, default=default)


@overload
def get_config_val(key: str, default: bool) -> bool: ...


@overload
def get_config_val(key: str, default: int) -> int: ...


@overload
def get_config_val(key: str, default: float) -> float: ...


@overload
def get_config_val(key: str, default: str) -> str: ...


@overload
def get_config_val(key: str, default: Path) -> Path: ...


@overload
def get_config_val(key: str, default: None) -> str | None: ...


def get_config_val(key: str, default: ParseTypes | None) -> ParseTypes | None:
    """Parse environment variables.

    The type of `default` decides how the raw string is parsed.

    Args:
        key: Environment variable key
        default: Default value if key not found in environment

    Raises:
        ValueError: Raised when the configuration value cannot be parsed.

    Returns:
        Parsed value of the specified type
    """
    str_value = os.getenv(key)
    if str_value is None or not str_value.strip():
        return default
    value = str_value.strip()
    # bool before int: bool is a subclass of int
    if type(default) is bool:
        return value in TRUE_VALUES
    try:
        if type(default) is int:
            return int(value)
        if type(default) is float:
            return float(value)
    except ValueError as e:
        msg = f"{key} is not a valid {type(default).__name__}: {value!r}"
        raise ValueError(msg) from e
    if isinstance(default, Path):
        return Path(value).expanduser()
    return value
