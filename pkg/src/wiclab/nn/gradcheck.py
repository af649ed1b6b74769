from collections.abc import Callable

import numpy as np
import numpy.typing as npt

__all__ = (
    "gradient_error",
    "numerical_gradient",
)

Array = npt.NDArray[np.float64]


def numerical_gradient(fn: Callable[[Array], float], params: npt.ArrayLike, eps: float = 1e-5) -> Array:
    """Central finite differences of a scalar function of a flat parameter vector."""

    theta = np.array(params, dtype=np.float64)
    grad = np.zeros_like(theta)

    for i in range(theta.size):
        original = theta[i]
        theta[i] = original + eps
        plus = fn(theta)
        theta[i] = original - eps
        minus = fn(theta)
        theta[i] = original
        grad[i] = (plus - minus) / (2.0 * eps)

    return grad


def gradient_error(analytic: npt.ArrayLike, numeric: npt.ArrayLike, floor: float = 1e-8) -> float:
    """Relative error `|a - n| / max(|a| + |n|, floor)` measured in the 2-norm."""

    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)

    return float(np.linalg.norm(a - n) / max(float(np.linalg.norm(a) + np.linalg.norm(n)), floor))
