from dataclasses import dataclass, field
from typing import Literal, Self

import numpy as np
import numpy.typing as npt

from wiclab.exception import ConfigurationError, ContractViolation

__all__ = (
    "OptimizerKind",
    "OptimizerState",
    "apply_update",
)

OptimizerKind = Literal["sgd", "adam"]

Array = npt.NDArray[np.float64]


@dataclass
class OptimizerState:
    """Mutable optimizer bookkeeping owned by a single trainer."""

    kind: OptimizerKind
    learning_rate: float
    size: int
    beta1: float = field(default=0.9)
    beta2: float = field(default=0.999)
    eps: float = field(default=1e-8)
    step: int = field(default=0)
    m: Array = field(init=False)
    v: Array = field(init=False)

    def __post_init__(self) -> None:
        if self.kind not in ("sgd", "adam"):
            raise ConfigurationError(f"Unknown optimizer: {self.kind}")
        if self.learning_rate <= 0:
            raise ConfigurationError(f"Learning rate must be positive, got {self.learning_rate}")

        # sgd keeps empty buffers
        buffer_size = self.size if self.kind == "adam" else 0
        self.m = np.zeros(buffer_size)
        self.v = np.zeros(buffer_size)

    @classmethod
    def create(cls, kind: OptimizerKind, learning_rate: float, size: int) -> Self:
        return cls(kind=kind, learning_rate=learning_rate, size=size)


def apply_update(opt: OptimizerState, params: npt.ArrayLike, gradient: npt.ArrayLike) -> Array:
    """One descent step; returns new parameters and advances `opt`."""

    p = np.asarray(params, dtype=np.float64)
    g = np.asarray(gradient, dtype=np.float64)

    if p.shape != g.shape or p.size != opt.size:
        raise ContractViolation(f"Shape mismatch: params {p.shape}, gradient {g.shape}, optimizer {opt.size}")

    opt.step += 1

    if opt.kind == "sgd":
        return p - opt.learning_rate * g

    opt.m = opt.beta1 * opt.m + (1.0 - opt.beta1) * g
    opt.v = opt.beta2 * opt.v + (1.0 - opt.beta2) * (g * g)

    m_hat = opt.m / (1.0 - opt.beta1**opt.step)
    v_hat = opt.v / (1.0 - opt.beta2**opt.step)

    return p - opt.learning_rate * m_hat / (np.sqrt(v_hat) + opt.eps)
