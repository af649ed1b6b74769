from typing import Any

__all__ = (
    "CheckpointError",
    "ConfigurationError",
    "ContractViolation",
    "LabError",
    "LipschitzViolation",
)


class LabError(Exception):
    """Base class for all wiclab errors."""

    def __init__(self, *args: object) -> None:
        super().__init__(*args)


class ContractViolation(LabError):
    """An operation was called with inputs outside its precondition."""


class ConfigurationError(LabError):
    """A layout, skill count or experiment setting is invalid."""


class CheckpointError(LabError):
    """A checkpoint file is corrupt or does not match the expected model."""


class LipschitzViolation(ContractViolation):
    """A potential breaks the 1-Lipschitz condition on a pair of support points."""

    def __init__(self, x: Any, y: Any, gap: float, distance: float) -> None:
        super().__init__(f"Lipschitz violation between {x} and {y}: |f(x) - f(y)| = {gap} > d = {distance}")
        self.x = x
        self.y = y
        self.gap = gap
        self.distance = distance
