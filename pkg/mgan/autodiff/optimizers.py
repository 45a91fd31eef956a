""" RMSProp optimizer and gradient utilities
    License: MIT
"""

import math
from typing import Dict, Optional

import numpy as np

from mgan.autodiff.parameters import ParameterTree
from mgan.constants import RMSPROP_ALPHA, RMSPROP_EPS, RMSPROP_LR
from mgan.exceptions import InitializationError, ParameterError

GradientsT = Dict[str, np.ndarray]


class OptimizerState:
    """Accumulators of an RMSProp optimizer

    Args:
        params (ParameterTree): The parameters to optimize; accumulators mirror their shapes
        learning_rate (float): The step size
        alpha (float): Decay of the squared-gradient moving average
        eps (float): Added to the root mean square before dividing
    Returns:
        OptimizerState: Fresh optimizer state with zero accumulators
    Raises:
        InitializationError: When a setting is out of range"""

    __slots__ = ("_square_avg", "_step", "_lr", "_alpha", "_eps")

    def __init__(
        self,
        params: Optional[ParameterTree] = None,
        learning_rate: float = RMSPROP_LR,
        alpha: float = RMSPROP_ALPHA,
        eps: float = RMSPROP_EPS,
    ) -> None:
        if learning_rate <= 0 or not 0.0 <= alpha < 1.0 or eps <= 0:
            raise InitializationError("OptimizerState: learning rate and eps must be positive; alpha in [0, 1)")
        self._square_avg = params.zeros_like() if params is not None else ParameterTree()
        self._step = 0
        self._lr = float(learning_rate)
        self._alpha = float(alpha)
        self._eps = float(eps)

    def __str__(self) -> str:
        return (
            "RMSProp OptimizerState:\n"
            f"\tstep: {self.step}\n"
            f"\tlearning rate: {self.learning_rate}\n"
            f"\talpha: {self.alpha}\n"
            f"\teps: {self.eps}\n"
        )

    @property
    def square_avg(self) -> ParameterTree:
        """ParameterTree: Moving averages of the squared gradients"""
        return self._square_avg

    @property
    def step(self) -> int:
        """int: Number of updates applied

        Note:
            Not settable"""
        return self._step

    @property
    def learning_rate(self) -> float:
        """float: The step size"""
        return self._lr

    @property
    def alpha(self) -> float:
        """float: The squared-gradient decay"""
        return self._alpha

    @property
    def eps(self) -> float:
        """float: The denominator offset"""
        return self._eps

    @classmethod
    def restore(
        cls, square_avg: ParameterTree, step: int, learning_rate: float, alpha: float, eps: float
    ) -> "OptimizerState":
        """Rebuild an optimizer state from checkpointed values"""
        state = cls(None, learning_rate, alpha, eps)
        state._square_avg = square_avg
        state._step = int(step)
        return state


def clip_grad_norm(grads: GradientsT, max_norm: float) -> float:
    """Rescale `grads` in place so their joint L2 norm is at most `max_norm`

    Args:
        grads (dict): Gradients keyed by parameter name
        max_norm (float): The norm ceiling
    Returns:
        float: The norm before clipping"""
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if max_norm > 0 and total > max_norm:
        factor = max_norm / (total + 1e-6)
        for name in grads:
            grads[name] = grads[name] * factor
    return total


def optimizer_step(params: ParameterTree, grads: GradientsT, state: OptimizerState) -> ParameterTree:
    """Apply one RMSProp update

    Args:
        params (ParameterTree): The current parameters
        grads (dict): Gradients keyed identically to the trainable parameters
        state (OptimizerState): The optimizer accumulators; updated in place
    Returns:
        ParameterTree: The updated parameters as a new tree
    Raises:
        ParameterError: When a trainable parameter has no gradient"""
    missing = [name for name in params.trainable_names() if name not in grads]
    if missing:
        raise ParameterError(f"Missing gradient for: {', '.join(missing)}")
    if len(state.square_avg) == 0:
        state._square_avg = params.zeros_like()

    res = params.copy()
    for name in params.trainable_names():
        grad = np.asarray(grads[name], dtype=np.float64)
        avg = state.alpha * state.square_avg[name] + (1.0 - state.alpha) * grad * grad
        state.square_avg.set(name, avg)
        res.set(name, params[name] - state.learning_rate * grad / (np.sqrt(avg) + state.eps))
    state._step += 1
    return res
