""" VDN and QMIX baseline mixers
    License: MIT
"""

from typing import Union

import numpy as np

from mgan.agents.qnet import add_linear
from mgan.autodiff.ops import absolute, add, elu, linear, matmul, mul, reduce_sum, relu, reshape
from mgan.autodiff.parameters import ParameterTree
from mgan.autodiff.tape import Tape, Variable
from mgan.constants import DEFAULT_MIXING_EMBED
from mgan.exceptions import DimensionError, InitializationError


def vdn_mix(chosen_q: Variable) -> Variable:
    """Sum of the individual values over the last axis"""
    return reduce_sum(chosen_q, axis=-1)


def qmix_mix(tape: Tape, chosen_q: Variable, state: Variable, prefix: str = "qmix") -> Variable:
    """Two-layer monotonic mixing network with weights generated from the state

    Args:
        tape (Tape): The tape reading the hypernetwork parameters
        chosen_q (Variable): `[B, n]`
        state (Variable): `[B, state_dim]`
        prefix (str): Parameter prefix
    Returns:
        Variable: `[B]`"""
    if chosen_q.ndim != 2 or state.ndim != 2 or chosen_q.shape[0] != state.shape[0]:
        raise DimensionError(f"qmix_mix: q shape {chosen_q.shape} does not match state shape {state.shape}")
    batch, n_agents = chosen_q.shape

    def affine(name: str, x: Variable) -> Variable:
        return linear(x, tape.parameter(f"{prefix}.{name}.weight"), tape.parameter(f"{prefix}.{name}.bias"))

    w1 = absolute(affine("hyper_w1", state))
    embed = w1.shape[-1] // n_agents
    w1 = reshape(w1, (batch, n_agents, embed))
    b1 = affine("hyper_b1", state)
    mixed = reshape(matmul(reshape(chosen_q, (batch, 1, n_agents)), w1), (batch, embed))
    hidden = elu(add(mixed, b1))
    w2 = absolute(affine("hyper_w2", state))
    value = affine("v.1", relu(affine("v.0", state)))
    return add(reduce_sum(mul(hidden, w2), axis=-1), reshape(value, (batch,)))


class VdnMixer:
    """Q_tot as the plain sum of the individual values; has no parameters"""

    __slots__ = ()

    name = "vdn"

    def init_params(self, tree: ParameterTree, rng: np.random.Generator) -> None:  # pylint: disable=unused-argument
        """nothing to add"""

    def forward(
        self,
        tape: Tape,  # pylint: disable=unused-argument
        chosen_q: Variable,
        obs: np.ndarray,  # pylint: disable=unused-argument
        state: Union[np.ndarray, Variable],  # pylint: disable=unused-argument
        alive: np.ndarray,  # pylint: disable=unused-argument
    ) -> Variable:
        """`[B, n]` -> `[B]`"""
        return vdn_mix(chosen_q)


class QmixMixer:
    """Monotonic two-layer mixing network

    Args:
        n_agents (int): Number of agents
        state_dim (int): Length of the global state
        embed_dim (int): Width of the mixing layer"""

    __slots__ = ("_n_agents", "_state_dim", "_embed_dim")

    name = "qmix"

    def __init__(self, n_agents: int, state_dim: int, embed_dim: int = DEFAULT_MIXING_EMBED) -> None:
        if min(n_agents, state_dim, embed_dim) <= 0:
            raise InitializationError("QmixMixer: all sizes must be positive")
        self._n_agents = int(n_agents)
        self._state_dim = int(state_dim)
        self._embed_dim = int(embed_dim)

    @property
    def embed_dim(self) -> int:
        """int: Width of the mixing layer"""
        return self._embed_dim

    def init_params(self, tree: ParameterTree, rng: np.random.Generator) -> None:
        """Add the hypernetworks and the state value network to `tree`"""
        add_linear(tree, "qmix.hyper_w1", self._state_dim, self._n_agents * self._embed_dim, rng)
        add_linear(tree, "qmix.hyper_b1", self._state_dim, self._embed_dim, rng)
        add_linear(tree, "qmix.hyper_w2", self._state_dim, self._embed_dim, rng)
        add_linear(tree, "qmix.v.0", self._state_dim, self._embed_dim, rng)
        add_linear(tree, "qmix.v.1", self._embed_dim, 1, rng)

    def forward(
        self,
        tape: Tape,
        chosen_q: Variable,
        obs: np.ndarray,  # pylint: disable=unused-argument
        state: Union[np.ndarray, Variable],
        alive: np.ndarray,  # pylint: disable=unused-argument
    ) -> Variable:
        """`[B, n]` -> `[B]`"""
        state_var = state if isinstance(state, Variable) else tape.constant(state)
        return qmix_mix(tape, chosen_q, state_var)
