"""全結合ハッシュヘッド.

特徴ベクトル x を隠れ層 (tanh) → ハッシュ層 (a(x) = x / (|x| + 1)) に通し、
(-1, 1)^q の緩和コード u を出力する. 勾配は手計算の逆伝播で求める.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from errors import DimensionError, NonFiniteError
from utils.logging import get_logger

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray

logger = get_logger(__name__)

type FloatArray = NDArray[np.float64]

_BELOW_ONE = np.nextafter(1.0, 0.0)


def hash_activation(x: ArrayLike) -> FloatArray:
    """ハッシュ活性化 a(x) = x / (|x| + 1). 値域は (-1, 1)."""
    arr = np.asarray(x, dtype=np.float64)
    # |x| が 2^53 を超えると商が ±1 に丸まるので開区間に戻す
    return np.clip(arr / (np.abs(arr) + 1.0), -_BELOW_ONE, _BELOW_ONE)


def hash_activation_derivative(x: ArrayLike) -> FloatArray:
    """a'(x) = 1 / (|x| + 1)^2. 符号によらず正の偶関数."""
    arr = np.asarray(x, dtype=np.float64)
    return 1.0 / np.square(np.abs(arr) + 1.0)


def _hidden_activation(x: FloatArray) -> FloatArray:
    return np.tanh(x)


def _hidden_activation_derivative(activated: FloatArray) -> FloatArray:
    return 1.0 - np.square(activated)


@dataclass
class Layer:
    """1層分の重み W (out, in) とバイアス b (out,)."""

    weight: FloatArray
    bias: FloatArray

    @property
    def fan_in(self) -> int:
        return self.weight.shape[1]

    @property
    def fan_out(self) -> int:
        return self.weight.shape[0]


@dataclass
class HashModelParams:
    """ハッシュヘッドのパラメータ. 最終層の出力幅がコード長 q."""

    layers: list[Layer]

    def __post_init__(self) -> None:
        if not self.layers:
            msg = "A hash model needs at least one layer"
            raise DimensionError(msg)
        for k, layer in enumerate(self.layers):
            if layer.weight.ndim != 2 or layer.bias.shape != (layer.fan_out,):
                msg = f"Layer {k}: weight {layer.weight.shape} and bias {layer.bias.shape} do not match"
                raise DimensionError(msg)
            if k and layer.fan_in != self.layers[k - 1].fan_out:
                msg = f"Layer {k} expects width {layer.fan_in}, previous layer outputs {self.layers[k - 1].fan_out}"
                raise DimensionError(msg)

    @property
    def input_dim(self) -> int:
        return self.layers[0].fan_in

    @property
    def bits(self) -> int:
        return self.layers[-1].fan_out

    def arrays(self) -> list[FloatArray]:
        """W^1, b^1, W^2, b^2, ... の順に並べた配列 (参照)."""
        out: list[FloatArray] = []
        for layer in self.layers:
            out.extend((layer.weight, layer.bias))
        return out

    @classmethod
    def from_arrays(cls, arrays: Sequence[FloatArray]) -> HashModelParams:
        if len(arrays) % 2:
            msg = "Parameter arrays must come in (weight, bias) pairs"
            raise DimensionError(msg)
        return cls([Layer(np.asarray(arrays[k]), np.asarray(arrays[k + 1])) for k in range(0, len(arrays), 2)])

    def copy(self) -> HashModelParams:
        return HashModelParams([Layer(layer.weight.copy(), layer.bias.copy()) for layer in self.layers])


def init_params(input_dim: int, bits: int, hidden_widths: Sequence[int], rng: np.random.Generator) -> HashModelParams:
    """一様分布 [-r, r], r = sqrt(6 / (fan_in + fan_out)) で重みを初期化する. バイアスは0.

    Args:
        input_dim (int): 特徴次元 d.
        bits (int): コード長 q.
        hidden_widths (Sequence[int]): 隠れ層の幅. 空なら線形1層.
        rng (np.random.Generator): 乱数生成器.
    """
    widths = [input_dim, *hidden_widths, bits]
    if any(w < 1 for w in widths):
        msg = f"All layer widths must be positive, got {widths}"
        raise DimensionError(msg)
    layers = []
    for fan_in, fan_out in zip(widths[:-1], widths[1:], strict=True):
        r = np.sqrt(6.0 / (fan_in + fan_out))
        layers.append(Layer(rng.uniform(-r, r, size=(fan_out, fan_in)), np.zeros(fan_out)))
    logger.debug("Initialized hash model with widths %s", widths)
    return HashModelParams(layers)


@dataclass
class ForwardTrace:
    """逆伝播用に保持する各層の入力 z^{l-1} と活性化前 ẑ^l、活性化後 z^l."""

    inputs: list[FloatArray] = field(default_factory=list)
    pre_activations: list[FloatArray] = field(default_factory=list)
    activations: list[FloatArray] = field(default_factory=list)
    single: bool = False

    @property
    def output(self) -> FloatArray:
        out = self.activations[-1]
        return out[0] if self.single else out


@dataclass
class Gradients:
    """パラメータ勾配. 形状は HashModelParams と同じ."""

    weights: list[FloatArray]
    biases: list[FloatArray]
    inputs: FloatArray

    def arrays(self) -> list[FloatArray]:
        out: list[FloatArray] = []
        for w, b in zip(self.weights, self.biases, strict=True):
            out.extend((w, b))
        return out


def forward(params: HashModelParams, x: ArrayLike) -> tuple[FloatArray, ForwardTrace]:
    """特徴ベクトル (d,) またはバッチ (B, d) を緩和コードに写像する.

    Returns:
        tuple[FloatArray, ForwardTrace]: 緩和コード u ((q,) または (B, q)) とトレース.

    Raises:
        DimensionError: 入力次元が第1層と一致しない場合.
        NonFiniteError: 途中の値が有限でない場合.
    """
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    batch = arr[np.newaxis, :] if single else arr
    if batch.ndim != 2 or batch.shape[1] != params.input_dim:
        msg = f"Input of shape {arr.shape} does not match model input width {params.input_dim}"
        raise DimensionError(msg)

    trace = ForwardTrace(single=single)
    z = batch
    last = len(params.layers) - 1
    for k, layer in enumerate(params.layers):
        z_hat = z @ layer.weight.T + layer.bias
        if not np.isfinite(z_hat).all():
            msg = f"Non-finite pre-activation in layer {k}"
            raise NonFiniteError(msg)
        trace.inputs.append(z)
        trace.pre_activations.append(z_hat)
        z = hash_activation(z_hat) if k == last else _hidden_activation(z_hat)
        trace.activations.append(z)

    return trace.output, trace


def backward(trace: ForwardTrace, params: HashModelParams, grad_u: ArrayLike) -> Gradients:
    """∂C/∂u から全層の ∂C/∂W^l, ∂C/∂b^l を連鎖律で求める.

    バッチ入力の場合、パラメータ勾配は行方向に合計される.
    """
    grad = np.asarray(grad_u, dtype=np.float64)
    if trace.single:
        grad = grad[np.newaxis, :] if grad.ndim == 1 else grad
    expected = trace.activations[-1].shape
    if grad.shape != expected or len(trace.activations) != len(params.layers):
        msg = f"Gradient shape {grad.shape} does not match model output {expected}"
        raise DimensionError(msg)

    weights: list[FloatArray] = [np.empty(0)] * len(params.layers)
    biases: list[FloatArray] = [np.empty(0)] * len(params.layers)
    last = len(params.layers) - 1
    for k in range(last, -1, -1):
        if k == last:
            delta = grad * hash_activation_derivative(trace.pre_activations[k])
        else:
            delta = grad * _hidden_activation_derivative(trace.activations[k])
        weights[k] = delta.T @ trace.inputs[k]
        biases[k] = delta.sum(axis=0)
        grad = delta @ params.layers[k].weight

    inputs = grad[0] if trace.single else grad
    return Gradients(weights=weights, biases=biases, inputs=inputs)
