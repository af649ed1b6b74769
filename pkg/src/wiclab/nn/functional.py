import numpy as np
import numpy.typing as npt

__all__ = (
    "log_softmax",
    "softmax",
)

Array = npt.NDArray[np.float64]


def log_softmax(logits: npt.ArrayLike, axis: int = -1) -> Array:
    z = np.asarray(logits, dtype=np.float64)
    shifted = z - z.max(axis=axis, keepdims=True)

    return shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))


def softmax(logits: npt.ArrayLike, axis: int = -1) -> Array:
    z = np.asarray(logits, dtype=np.float64)
    e = np.exp(z - z.max(axis=axis, keepdims=True))

    return e / e.sum(axis=axis, keepdims=True)
