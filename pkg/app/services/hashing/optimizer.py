"""学習率スケジュールと Adam."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from errors import DimensionError, InvalidArgumentError
from services.hashing.hash_model import Gradients, HashModelParams

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from dtos.config import TrainConfig


def lr_at(iteration: int, cfg: TrainConfig) -> float:
    """base_lr · decay_rate^⌊iteration / decay_every⌋."""
    if iteration < 0:
        msg = f"iteration must be non-negative, got {iteration}"
        raise InvalidArgumentError(msg)
    return cfg.base_lr * cfg.decay_rate ** (iteration // cfg.decay_every)


@dataclass
class AdamState:
    """パラメータごとの1次/2次モーメントとタイムステップ."""

    first: list[NDArray[np.float64]]
    second: list[NDArray[np.float64]]
    t: int = 0

    @classmethod
    def zeros_like(cls, params: HashModelParams) -> AdamState:
        arrays = params.arrays()
        return cls(first=[np.zeros_like(a) for a in arrays], second=[np.zeros_like(a) for a in arrays])


def adam_step(
    params: HashModelParams,
    grads: Gradients,
    state: AdamState,
    lr: float,
    cfg: TrainConfig,
) -> tuple[HashModelParams, AdamState]:
    """バイアス補正付き Adam の1ステップ. 入力は変更せず新しい値を返す."""
    if lr <= 0:
        msg = f"learning rate must be positive, got {lr}"
        raise InvalidArgumentError(msg)

    values = params.arrays()
    grad_arrays = grads.arrays()
    if len(grad_arrays) != len(values) or len(state.first) != len(values):
        msg = "Gradient/state layout does not match the model parameters"
        raise DimensionError(msg)

    t = state.t + 1
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    new_values, new_first, new_second = [], [], []
    for theta, g, m, v in zip(values, grad_arrays, state.first, state.second, strict=True):
        if g.shape != theta.shape or m.shape != theta.shape:
            msg = f"Gradient shape {g.shape} does not match parameter shape {theta.shape}"
            raise DimensionError(msg)
        m_next = b1 * m + (1.0 - b1) * g
        v_next = b2 * v + (1.0 - b2) * np.square(g)
        m_hat = m_next / (1.0 - b1**t)
        v_hat = v_next / (1.0 - b2**t)
        new_values.append(theta - lr * m_hat / (np.sqrt(v_hat) + cfg.adam_epsilon))
        new_first.append(m_next)
        new_second.append(v_next)

    return HashModelParams.from_arrays(new_values), AdamState(first=new_first, second=new_second, t=t)
