from dataclasses import dataclass, field
from typing import Final, Literal, Self

import numpy as np
import numpy.typing as npt

from wiclab.exception import ConfigurationError, ContractViolation

__all__ = (
    "DEFAULT_HIDDEN",
    "ParamFunction",
    "Topology",
)

Topology = Literal["linear", "mlp_2x128"]

DEFAULT_HIDDEN: Final[int] = 128

Array = npt.NDArray[np.float64]


def _layer_shapes(topology: Topology, input_dim: int, output_dim: int, hidden: int) -> list[tuple[int, int]]:
    match topology:
        case "linear":
            return [(output_dim, input_dim)]
        case "mlp_2x128":
            return [(hidden, input_dim), (hidden, hidden), (output_dim, hidden)]
        case _:
            raise ConfigurationError(f"Unknown topology: {topology}")


@dataclass(frozen=True, eq=False)
class ParamFunction:
    """A differentiable map over a flat float64 parameter vector.

    Layers are stored as consecutive `(W, b)` blocks, `W` row-major with shape
    `(fan_out, fan_in)`. Instances are snapshots: updates produce a new instance via
    `with_params`, the parameter array itself is read-only.
    """

    topology: Topology
    input_dim: int
    output_dim: int
    params: Array
    hidden: int = field(default=DEFAULT_HIDDEN)

    def __post_init__(self) -> None:
        if self.input_dim < 1 or self.output_dim < 1 or self.hidden < 1:
            raise ConfigurationError("Dimensions must be positive")

        expected = self.count_params(self.topology, self.input_dim, self.output_dim, self.hidden)
        params = np.array(self.params, dtype=np.float64).reshape(-1)

        if params.size != expected:
            raise ContractViolation(f"{self.topology} needs {expected} parameters, got {params.size}")

        params.setflags(write=False)
        object.__setattr__(self, "params", params)

    @staticmethod
    def count_params(topology: Topology, input_dim: int, output_dim: int, hidden: int = DEFAULT_HIDDEN) -> int:
        return sum(rows * cols + rows for rows, cols in _layer_shapes(topology, input_dim, output_dim, hidden))

    @classmethod
    def zeros(
        cls,
        topology: Topology,
        input_dim: int,
        output_dim: int,
        hidden: int = DEFAULT_HIDDEN,
    ) -> Self:
        size = cls.count_params(topology, input_dim, output_dim, hidden)
        return cls(topology, input_dim, output_dim, np.zeros(size), hidden)

    @classmethod
    def initialize(
        cls,
        topology: Topology,
        input_dim: int,
        output_dim: int,
        rng: np.random.Generator,
        hidden: int = DEFAULT_HIDDEN,
    ) -> Self:
        """Glorot-uniform weights, zero biases."""

        chunks: list[Array] = []
        for rows, cols in _layer_shapes(topology, input_dim, output_dim, hidden):
            bound = np.sqrt(6.0 / (rows + cols))
            chunks.append(rng.uniform(-bound, bound, size=rows * cols))
            chunks.append(np.zeros(rows))

        return cls(topology, input_dim, output_dim, np.concatenate(chunks), hidden)

    @property
    def num_params(self) -> int:
        return int(self.params.size)

    def with_params(self, params: Array) -> Self:
        return type(self)(self.topology, self.input_dim, self.output_dim, params, self.hidden)

    def layers(self, params: Array | None = None) -> list[tuple[Array, Array]]:
        """Views of `(W, b)` per layer into `params` (defaults to this snapshot)."""

        flat = self.params if params is None else params
        out: list[tuple[Array, Array]] = []
        offset = 0

        for rows, cols in _layer_shapes(self.topology, self.input_dim, self.output_dim, self.hidden):
            weight = flat[offset : offset + rows * cols].reshape(rows, cols)
            offset += rows * cols
            bias = flat[offset : offset + rows]
            offset += rows
            out.append((weight, bias))

        return out

    def _as_batch(self, x: npt.ArrayLike) -> tuple[Array, bool]:
        arr = np.asarray(x, dtype=np.float64)
        single = arr.ndim == 1

        batch = arr.reshape(1, -1) if single else arr
        if batch.ndim != 2 or batch.shape[1] != self.input_dim:
            raise ContractViolation(f"Expected input of width {self.input_dim}, got shape {arr.shape}")

        return batch, single

    def _activations(self, batch: Array) -> list[Array]:
        acts = [batch]
        layers = self.layers()

        for i, (weight, bias) in enumerate(layers):
            z = acts[-1] @ weight.T + bias
            acts.append(np.maximum(z, 0.0) if i < len(layers) - 1 else z)

        return acts

    def forward(self, x: npt.ArrayLike) -> Array:
        """Evaluate on one input `(input_dim,)` or a batch `(n, input_dim)`."""

        batch, single = self._as_batch(x)
        out = self._activations(batch)[-1]

        return out[0] if single else out

    __call__ = forward

    def backward(self, x: npt.ArrayLike, upstream: npt.ArrayLike) -> Array:
        """Gradient of `sum <upstream, forward(x)>` w.r.t. the flat parameters.

        Batched inputs sum their per-row contributions. The ReLU subgradient at 0 is 0.
        """

        batch, single = self._as_batch(x)
        delta = np.asarray(upstream, dtype=np.float64)
        delta = delta.reshape(1, -1) if single else delta

        if delta.shape != (batch.shape[0], self.output_dim):
            raise ContractViolation(f"Expected upstream of shape {(batch.shape[0], self.output_dim)}, got {delta.shape}")

        acts = self._activations(batch)
        layers = self.layers()
        grads: list[Array] = []

        for i in range(len(layers) - 1, -1, -1):
            weight, _ = layers[i]
            grads.append(delta.sum(axis=0))
            grads.append((delta.T @ acts[i]).reshape(-1))
            if i > 0:
                delta = (delta @ weight) * (acts[i] > 0.0)

        # collected last layer first, bias before weight
        return np.concatenate(grads[::-1])
