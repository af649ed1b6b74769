from pathlib import Path

import numpy as np
import pytest

from wiclab.exception import CheckpointError, ConfigurationError, ContractViolation
from wiclab.nn import (
    OptimizerState,
    ParamFunction,
    Topology,
    apply_update,
    decode_checkpoint,
    encode_checkpoint,
    gradient_error,
    load_checkpoint,
    log_softmax,
    numerical_gradient,
    save_checkpoint,
    softmax,
)

TOPOLOGIES: tuple[Topology, ...] = ("linear", "mlp_2x128")


def test_parameter_counts() -> None:
    assert ParamFunction.count_params("linear", 225, 4) == 225 * 4 + 4
    assert ParamFunction.count_params("mlp_2x128", 2, 4) == (2 * 128 + 128) + (128 * 128 + 128) + (128 * 4 + 4)

    with pytest.raises(ContractViolation):
        ParamFunction("linear", 3, 2, np.zeros(7))


def test_unknown_topology() -> None:
    with pytest.raises(ConfigurationError):
        ParamFunction.count_params("conv", 3, 2)  # type: ignore[arg-type]


@pytest.mark.parametrize("topology", TOPOLOGIES)
def test_zero_map(topology: Topology, rng: np.random.Generator) -> None:
    f = ParamFunction.zeros(topology, 5, 3, hidden=16)

    np.testing.assert_array_equal(f.forward(rng.normal(size=5)), np.zeros(3))


def test_linear_identity(rng: np.random.Generator) -> None:
    f = ParamFunction("linear", 3, 3, np.concatenate([np.eye(3).reshape(-1), np.zeros(3)]))
    x = rng.normal(size=3)

    np.testing.assert_array_equal(f(x), x)


def test_hand_set_mlp() -> None:
    params = np.array(
        [
            *[1.0, -1.0],  # W0
            *[0.0, 0.5],  # b0
            *[2.0, 1.0, 0.5, -1.0],  # W1
            *[-0.5, 1.0],  # b1
            *[1.0, -2.0],  # W2
            0.25,  # b2
        ]
    )
    f = ParamFunction("mlp_2x128", 1, 1, params, hidden=2)

    # h1 = relu(1, -0.5) = (1, 0); h2 = relu(1.5, 1.5); out = 1.5 - 3 + 0.25
    assert f.forward(np.array([1.0]))[0] == pytest.approx(-1.25)


def test_forward_batch_matches_rows(rng: np.random.Generator) -> None:
    f = ParamFunction.initialize("mlp_2x128", 4, 3, rng, hidden=16)
    x = rng.normal(size=(6, 4))

    batch = f.forward(x)

    for i in range(6):
        np.testing.assert_allclose(batch[i], f.forward(x[i]), rtol=0, atol=1e-12)


def _relu_pattern(f: ParamFunction, x: np.ndarray) -> list[np.ndarray]:
    pattern = []
    h = x
    for weight, bias in f.layers()[:-1]:
        z = weight @ h + bias
        pattern.append(z > 0.0)
        h = np.maximum(z, 0.0)
    return pattern


@pytest.mark.parametrize("topology", TOPOLOGIES)
def test_forward_is_affine_within_activation_pattern(topology: Topology, rng: np.random.Generator) -> None:
    size = ParamFunction.count_params(topology, 4, 3, hidden=16)
    f = ParamFunction(topology, 4, 3, rng.normal(size=size), hidden=16)

    checked = 0
    for _ in range(20):
        x = rng.normal(size=4)
        delta = 1e-4 * rng.normal(size=4)
        points = [x, x + delta, x + 2 * delta]

        patterns = [_relu_pattern(f, p) for p in points]
        if any(not all(np.array_equal(a, b) for a, b in zip(patterns[0], p, strict=True)) for p in patterns[1:]):
            continue

        first = f(points[1]) - f(points[0])
        second = f(points[2]) - f(points[1])
        np.testing.assert_allclose(second, first, rtol=0, atol=1e-9)
        checked += 1

    assert checked >= 10


def test_forward_rejects_wrong_width() -> None:
    with pytest.raises(ContractViolation):
        ParamFunction.zeros("linear", 3, 2).forward(np.zeros(4))


def test_linear_backward_is_bilinear() -> None:
    f = ParamFunction.zeros("linear", 3, 2)
    x = np.array([0.5, -1.0, 2.0])

    grad = f.backward(x, np.array([1.0, 0.0]))
    weight, bias = f.layers(grad)[0]

    np.testing.assert_array_equal(weight[0], x)
    np.testing.assert_array_equal(weight[1], np.zeros(3))
    np.testing.assert_array_equal(bias, [1.0, 0.0])


@pytest.mark.parametrize("topology", TOPOLOGIES)
def test_zero_upstream(topology: Topology, rng: np.random.Generator) -> None:
    f = ParamFunction.initialize(topology, 3, 2, rng, hidden=8)

    assert not f.backward(rng.normal(size=3), np.zeros(2)).any()


@pytest.mark.parametrize("topology", TOPOLOGIES)
def test_backward_matches_finite_differences(topology: Topology, rng: np.random.Generator) -> None:
    for _ in range(100):
        f = ParamFunction.initialize(topology, 3, 2, rng, hidden=6)
        f = f.with_params(f.params + rng.normal(scale=0.1, size=f.num_params))
        x = rng.normal(size=(4, 3))
        upstream = rng.normal(size=(4, 2))

        def objective(theta: np.ndarray, f: ParamFunction = f, x: np.ndarray = x, u: np.ndarray = upstream) -> float:
            return float((u * f.with_params(theta).forward(x)).sum())

        analytic = f.backward(x, upstream)
        numeric = numerical_gradient(objective, f.params)

        assert gradient_error(analytic, numeric) <= 1e-4


def test_full_width_mlp_directional_derivative(rng: np.random.Generator) -> None:
    f = ParamFunction.initialize("mlp_2x128", 2, 4, rng)
    x = rng.uniform(-1, 1, size=(8, 2))
    upstream = rng.normal(size=(8, 4))
    grad = f.backward(x, upstream)

    for _ in range(10):
        direction = rng.normal(size=f.num_params)
        direction /= np.linalg.norm(direction)
        eps = 1e-6
        plus = (upstream * f.with_params(f.params + eps * direction).forward(x)).sum()
        minus = (upstream * f.with_params(f.params - eps * direction).forward(x)).sum()

        numeric = (plus - minus) / (2 * eps)
        assert gradient_error(grad @ direction, numeric) <= 1e-4


def test_softmax_helpers() -> None:
    logits = np.array([[1000.0, 1000.0], [0.0, np.log(3.0)]])

    np.testing.assert_allclose(softmax(logits, axis=1), [[0.5, 0.5], [0.25, 0.75]])
    np.testing.assert_allclose(np.exp(log_softmax(logits, axis=1)), softmax(logits, axis=1))


def test_sgd_step() -> None:
    opt = OptimizerState.create("sgd", 0.003, 1)

    assert apply_update(opt, np.array([1.0]), np.array([1.0]))[0] == pytest.approx(0.997)
    assert apply_update(opt, np.array([1.0]), np.array([0.0]))[0] == 1.0


def test_adam_first_step() -> None:
    opt = OptimizerState.create("adam", 0.001, 1)

    new = apply_update(opt, np.array([1.0]), np.array([1.0]))

    assert 1.0 - new[0] == pytest.approx(0.001, rel=1e-6)
    assert opt.step == 1
    assert opt.m[0] == pytest.approx(0.1)


def test_adam_momentum_continues_under_zero_gradient() -> None:
    opt = OptimizerState.create("adam", 0.001, 2)
    apply_update(opt, np.array([1.0, 2.0]), np.array([1.0, -1.0]))

    p = np.array([0.5, 0.5])
    new = apply_update(opt, p, np.zeros(2))

    assert opt.step == 2
    assert opt.m[0] == pytest.approx(0.09)
    assert not np.array_equal(new, p)


def test_adam_cold_zero_gradient() -> None:
    opt = OptimizerState.create("adam", 0.001, 2)

    np.testing.assert_array_equal(apply_update(opt, np.ones(2), np.zeros(2)), np.ones(2))


def test_optimizer_validation() -> None:
    with pytest.raises(ConfigurationError):
        OptimizerState.create("rmsprop", 0.1, 1)  # type: ignore[arg-type]
    with pytest.raises(ConfigurationError):
        OptimizerState.create("sgd", 0.0, 1)
    with pytest.raises(ContractViolation):
        apply_update(OptimizerState.create("sgd", 0.1, 2), np.ones(2), np.ones(3))


def test_checkpoint_round_trip(rng: np.random.Generator, tmp_path: Path) -> None:
    f = ParamFunction.initialize("mlp_2x128", 2, 20, rng, hidden=32)

    path = save_checkpoint(tmp_path / "policy.ckpt", f, "policy", skills=4, actions=5)
    header, loaded = load_checkpoint(path, kind="policy")

    assert (header.skills, header.actions, header.count) == (4, 5, f.num_params)
    assert loaded.topology == f.topology
    assert loaded.hidden == 32
    np.testing.assert_array_equal(loaded.params, f.params)


def test_checkpoint_is_deterministic(rng: np.random.Generator) -> None:
    f = ParamFunction.initialize("linear", 4, 2, rng)

    assert encode_checkpoint(f, "potential", skills=2) == encode_checkpoint(f, "potential", skills=2)


def test_checkpoint_errors(rng: np.random.Generator, tmp_path: Path) -> None:
    f = ParamFunction.initialize("linear", 4, 2, rng)
    data = encode_checkpoint(f, "baseline")

    with pytest.raises(CheckpointError):
        decode_checkpoint(b"garbage" + data)
    with pytest.raises(CheckpointError):
        decode_checkpoint(data[:-8])

    path = save_checkpoint(tmp_path / "baseline.ckpt", f, "baseline")
    with pytest.raises(CheckpointError):
        load_checkpoint(path, kind="policy")
