from __future__ import annotations

import numpy as np
import pytest

from errors import DimensionError, NonFiniteError
from services.hashing.hash_model import (
    HashModelParams,
    Layer,
    backward,
    forward,
    hash_activation,
    hash_activation_derivative,
    init_params,
)


def test_hash_activation_values() -> None:
    assert hash_activation(0.0) == 0.0
    assert hash_activation(1.0) == pytest.approx(0.5)
    assert hash_activation(-3.0) == pytest.approx(-0.75)
    big = hash_activation(np.array([-1e12, 1e12]))
    assert (np.abs(big) < 1).all()


@pytest.mark.parametrize("magnitude", [1e17, 1e300, np.finfo(np.float64).max])
def test_hash_activation_stays_open_for_huge_inputs(magnitude: float) -> None:
    values = hash_activation(np.array([-magnitude, magnitude]))
    assert (np.abs(values) < 1.0).all()
    assert values[0] < 0 < values[1]


def test_forward_codes_stay_inside_open_interval() -> None:
    params = HashModelParams([Layer(np.eye(2), np.zeros(2))])
    codes, _ = forward(params, np.array([[1e18, -1e18], [1e300, -1e300]]))
    assert (np.abs(codes) < 1.0).all()
    np.testing.assert_array_equal(np.sign(codes), [[1.0, -1.0], [1.0, -1.0]])


def test_hash_activation_derivative_matches_central_difference() -> None:
    x = np.array([-4.0, -0.7, 0.3, 2.5])
    h = 1e-6
    numeric = (hash_activation(x + h) - hash_activation(x - h)) / (2 * h)
    np.testing.assert_allclose(hash_activation_derivative(x), numeric, rtol=1e-8)
    assert hash_activation_derivative(0.0) == 1.0


def test_init_params_shapes_and_bounds(rng: np.random.Generator) -> None:
    params = init_params(10, 12, (7,), rng)
    assert [layer.weight.shape for layer in params.layers] == [(7, 10), (12, 7)]
    assert params.input_dim == 10
    assert params.bits == 12
    for layer in params.layers:
        bound = np.sqrt(6.0 / (layer.fan_in + layer.fan_out))
        assert (np.abs(layer.weight) <= bound).all()
        assert not layer.bias.any()


def test_init_params_without_hidden_layers(rng: np.random.Generator) -> None:
    params = init_params(4, 6, (), rng)
    assert len(params.layers) == 1
    assert params.layers[0].weight.shape == (6, 4)


def test_layers_must_chain() -> None:
    with pytest.raises(DimensionError):
        HashModelParams([Layer(np.zeros((3, 4)), np.zeros(3)), Layer(np.zeros((2, 5)), np.zeros(2))])
    with pytest.raises(DimensionError):
        HashModelParams([])


def test_forward_single_and_batch_agree(rng: np.random.Generator) -> None:
    params = init_params(5, 8, (6,), rng)
    x = rng.normal(size=(4, 5))
    batch, _ = forward(params, x)
    assert batch.shape == (4, 8)
    assert (np.abs(batch) < 1).all()
    for row in range(4):
        single, _ = forward(params, x[row])
        np.testing.assert_allclose(single, batch[row], rtol=0, atol=1e-15)


def test_forward_rejects_bad_input(rng: np.random.Generator) -> None:
    params = init_params(5, 8, (), rng)
    with pytest.raises(DimensionError):
        forward(params, np.zeros(4))
    with pytest.raises(NonFiniteError):
        forward(params, np.full(5, np.nan))


def _numeric_gradients(params: HashModelParams, x: np.ndarray, weights: np.ndarray, h: float) -> list[np.ndarray]:
    out = []
    for array in params.arrays():
        grad = np.zeros_like(array)
        for idx in np.ndindex(array.shape):
            original = array[idx]
            array[idx] = original + h
            plus = float((forward(params, x)[0] * weights).sum())
            array[idx] = original - h
            minus = float((forward(params, x)[0] * weights).sum())
            array[idx] = original
            grad[idx] = (plus - minus) / (2 * h)
        out.append(grad)
    return out


@pytest.mark.parametrize("hidden", [(), (6,), (5, 4)])
def test_backward_matches_finite_differences(rng: np.random.Generator, hidden: tuple[int, ...]) -> None:
    params = init_params(4, 3, hidden, rng)
    x = rng.normal(size=(3, 4))
    weights = rng.normal(size=(3, 3))

    _, trace = forward(params, x)
    grads = backward(trace, params, weights)
    numeric = _numeric_gradients(params, x, weights, h=1e-6)

    for analytic, expected in zip(grads.arrays(), numeric, strict=True):
        np.testing.assert_allclose(analytic, expected, rtol=1e-5, atol=1e-8)


def test_backward_input_gradient_for_single_vector(rng: np.random.Generator) -> None:
    params = init_params(4, 3, (5,), rng)
    x = rng.normal(size=4)
    weights = rng.normal(size=3)
    _, trace = forward(params, x)
    grads = backward(trace, params, weights)
    assert grads.inputs.shape == (4,)

    h = 1e-6
    numeric = np.array(
        [
            ((forward(params, x + h * e)[0] - forward(params, x - h * e)[0]) @ weights) / (2 * h)
            for e in np.eye(4)
        ],
    )
    np.testing.assert_allclose(grads.inputs, numeric, rtol=1e-5, atol=1e-9)


def test_backward_rejects_wrong_gradient_shape(rng: np.random.Generator) -> None:
    params = init_params(4, 3, (), rng)
    _, trace = forward(params, rng.normal(size=(2, 4)))
    with pytest.raises(DimensionError):
        backward(trace, params, np.zeros((2, 4)))
