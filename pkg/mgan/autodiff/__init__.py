""" Reverse-mode differentiation, parameters, optimizer and checkpoints """

from mgan.autodiff.checkpoint import Checkpoint
from mgan.autodiff.ops import (
    absolute,
    add,
    concat,
    elu,
    gru_cell,
    linear,
    masked_softmax,
    matmul,
    mul,
    reduce_sum,
    relu,
    reshape,
    scale,
    sigmoid,
    stack,
    sub,
    take_along,
    tanh,
    transpose,
)
from mgan.autodiff.optimizers import OptimizerState, clip_grad_norm, optimizer_step
from mgan.autodiff.parameters import ParameterTree
from mgan.autodiff.tape import Tape, Variable, backward

__all__ = [
    "Checkpoint",
    "OptimizerState",
    "ParameterTree",
    "Tape",
    "Variable",
    "absolute",
    "add",
    "backward",
    "clip_grad_norm",
    "concat",
    "elu",
    "gru_cell",
    "linear",
    "masked_softmax",
    "matmul",
    "mul",
    "optimizer_step",
    "reduce_sum",
    "relu",
    "reshape",
    "scale",
    "sigmoid",
    "stack",
    "sub",
    "take_along",
    "tanh",
    "transpose",
]
