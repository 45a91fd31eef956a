""" Multi-graph attention mixer: per-graph credit softmax and a positive hypernetwork combination
    License: MIT
"""

from typing import Optional, Tuple, Union

import numpy as np

from mgan.agents.qnet import add_linear
from mgan.autodiff.ops import absolute, add, linear, masked_softmax, mul, reduce_sum, reshape, stack
from mgan.autodiff.parameters import ParameterTree
from mgan.autodiff.tape import Tape, Variable
from mgan.constants import DEFAULT_EMBED_DIM, DEFAULT_N_GRAPHS
from mgan.exceptions import DimensionError, InitializationError
from mgan.graphs.encoder import EmbeddingSet, GraphEncoder


def credit_weights(c_g: Variable, alive: np.ndarray, allow_empty: bool = False) -> Variable:
    """Softmax of the transform-layer scalars over the alive agents"""
    return masked_softmax(c_g, alive, allow_empty=allow_empty)


def graph_value(chosen_q: Variable, c_g: Variable, alive: np.ndarray, allow_empty: bool = False) -> Variable:
    """Value of one graph network: `Q_g = sum_a softmax(c_g)_a * Q_a` over alive agents

    Args:
        chosen_q (Variable): Individual values of the chosen actions `[..., n]`
        c_g (Variable): Transform-layer scalars of graph network g `[..., n]`
        alive (np.ndarray): {0, 1} liveness `[..., n]`
        allow_empty (bool): Map rows without a live agent to 0; used for padding
    Returns:
        Variable: `Q_g` with shape `[...]`
    Raises:
        DegenerateMaskError: When no agent is alive and `allow_empty` is False"""
    if chosen_q.shape != c_g.shape:
        raise DimensionError(f"graph_value: q shape {chosen_q.shape} does not match scalars {c_g.shape}")
    return reduce_sum(mul(credit_weights(c_g, alive, allow_empty), chosen_q), axis=-1)


def hyper_weights(tape: Tape, state: Variable, prefix: str = "hyper") -> Tuple[Variable, Variable]:
    """State-conditioned mixing weights `|W_w s + b_w|` `[..., G]` and bias `W_b s + b_b` `[...]`"""
    weights = absolute(linear(state, tape.parameter(f"{prefix}.w.weight"), tape.parameter(f"{prefix}.w.bias")))
    bias = linear(state, tape.parameter(f"{prefix}.b.weight"), tape.parameter(f"{prefix}.b.bias"))
    return weights, reshape(bias, bias.shape[:-1])


def hyper_mix(tape: Tape, state: Variable, q_graphs: Variable, prefix: str = "hyper") -> Variable:
    """Linear combination of the graph values with non-negative, state-generated weights

    Args:
        tape (Tape): The tape reading the hypernetwork parameters
        state (Variable): Global state `[..., state_dim]`
        q_graphs (Variable): Graph values `[..., G]`
        prefix (str): Parameter prefix of the hypernetwork
    Returns:
        Variable: `Q_tot = sum_g w_g Q_g + b` with shape `[...]`"""
    weights, bias = hyper_weights(tape, state, prefix)
    if weights.shape != q_graphs.shape:
        raise DimensionError(f"hyper_mix: weights shape {weights.shape} does not match graph values {q_graphs.shape}")
    return add(reduce_sum(mul(weights, q_graphs), axis=-1), bias)


def q_tot_forward(
    tape: Tape,
    chosen_q: Variable,
    embeddings: EmbeddingSet,
    state: Variable,
    alive: np.ndarray,
    allow_empty: bool = False,
    prefix: str = "hyper",
) -> Variable:
    """Compose :func:`graph_value` over every graph network with :func:`hyper_mix`"""
    q_graphs = [graph_value(chosen_q, c_g, alive, allow_empty) for c_g in embeddings.scalars]
    return hyper_mix(tape, state, stack(q_graphs, axis=-1), prefix)


class MganMixer:
    """Joint action-value from individual values through G graph networks

    Args:
        n_agents (int): Number of agents
        obs_dim (int): Length of the local observation, the node feature of the graphs
        state_dim (int): Length of the global state
        n_graphs (int): Number of graph networks G
        embed_dim (int): Width of the graph convolution layers
    Raises:
        InitializationError: When a size is not positive"""

    __slots__ = ("_n_agents", "_state_dim", "_encoder")

    name = "mgan"

    def __init__(
        self,
        n_agents: int,
        obs_dim: int,
        state_dim: int,
        n_graphs: int = DEFAULT_N_GRAPHS,
        embed_dim: int = DEFAULT_EMBED_DIM,
    ) -> None:
        if min(n_agents, state_dim) <= 0:
            raise InitializationError("MganMixer: all sizes must be positive")
        self._n_agents = int(n_agents)
        self._state_dim = int(state_dim)
        self._encoder = GraphEncoder(obs_dim, n_graphs, embed_dim)

    def __str__(self) -> str:
        return (
            "MganMixer:\n"
            f"\tagents: {self._n_agents}\n"
            f"\tgraph networks: {self.n_graphs}\n"
            f"\tembedding dim: {self._encoder.embed_dim}\n"
        )

    @property
    def encoder(self) -> GraphEncoder:
        """GraphEncoder: The graph networks"""
        return self._encoder

    @property
    def n_graphs(self) -> int:
        """int: Number of graph networks G"""
        return self._encoder.n_graphs

    def init_params(self, tree: ParameterTree, rng: np.random.Generator) -> None:
        """Add the graph networks, the transform layer and the hypernetwork to `tree`"""
        self._encoder.init_params(tree, rng)
        add_linear(tree, "hyper.w", self._state_dim, self.n_graphs, rng)
        add_linear(tree, "hyper.b", self._state_dim, 1, rng)

    def embed(self, tape: Tape, obs: np.ndarray, alive: np.ndarray) -> EmbeddingSet:
        """Embeddings and scalars of every graph network for observations `[..., n, obs_dim]`"""
        return self._encoder.encode(tape, obs, alive)

    def forward(
        self,
        tape: Tape,
        chosen_q: Variable,
        obs: np.ndarray,
        state: Union[np.ndarray, Variable],
        alive: np.ndarray,
        embeddings: Optional[EmbeddingSet] = None,
    ) -> Variable:
        """Q_tot for a batch of steps

        Args:
            tape (Tape): The tape to record on
            chosen_q (Variable): `[B, n]`
            obs (np.ndarray): Node features `[B, n, obs_dim]`
            state (np.ndarray): `[B, state_dim]`
            alive (np.ndarray): `[B, n]`; rows without a live agent mix to the hypernetwork bias
            embeddings (EmbeddingSet): Precomputed embeddings; computed from `obs` when omitted
        Returns:
            Variable: `[B]`"""
        if embeddings is None:
            embeddings = self.embed(tape, obs, alive)
        state_var = state if isinstance(state, Variable) else tape.constant(state)
        return q_tot_forward(tape, chosen_q, embeddings, state_var, alive, allow_empty=True)
