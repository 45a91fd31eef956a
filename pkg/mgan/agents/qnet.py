""" Per-agent recurrent action-value network with shared parameters
    License: MIT
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from mgan.autodiff.ops import gru_cell, linear, relu, reshape, stack
from mgan.autodiff.parameters import ParameterTree
from mgan.autodiff.tape import Tape, Variable
from mgan.constants import DEFAULT_AGENT_HIDDEN, MASKED_Q_VALUE
from mgan.exceptions import DimensionError, InitializationError, NoAvailableActionError

ArrayLike = Union[np.ndarray, Sequence]

GRU_GATES = ("reset", "update", "candidate")


def uniform_init(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int) -> np.ndarray:
    """Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]"""
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-bound, bound, size=shape)


def add_linear(tree: ParameterTree, prefix: str, in_dim: int, out_dim: int, rng: np.random.Generator) -> None:
    """Register `{prefix}.weight [out, in]` and `{prefix}.bias [out]` in the tree"""
    tree.add(f"{prefix}.weight", uniform_init(rng, (out_dim, in_dim), in_dim))
    tree.add(f"{prefix}.bias", uniform_init(rng, (out_dim,), in_dim))


def build_agent_input(
    features: ArrayLike, last_action: int, agent_id: int, n_actions: int, n_agents: int
) -> np.ndarray:
    """Input vector of one agent: `[observation | last action one-hot | agent id one-hot]`

    Args:
        features (array-like): The local observation of length `obs_dim`
        last_action (int): The previous action; a negative value (first step) gives all zeros
        agent_id (int): The agent index in `0..n_agents-1`
        n_actions (int): Size of the action space
        n_agents (int): Number of agents
    Returns:
        np.ndarray: Vector of length `obs_dim + n_actions + n_agents`
    Raises:
        IndexError: When the agent id or the last action is out of range"""
    if not 0 <= agent_id < n_agents:
        raise IndexError(f"agent id {agent_id} out of range for {n_agents} agents")
    if last_action >= n_actions:
        raise IndexError(f"last action {last_action} out of range for {n_actions} actions")
    obs = np.asarray(features, dtype=np.float64).reshape(-1)
    res = np.zeros(obs.size + n_actions + n_agents, dtype=np.float64)
    res[: obs.size] = obs
    if last_action >= 0:
        res[obs.size + last_action] = 1.0
    res[obs.size + n_actions + agent_id] = 1.0
    return res


def build_inputs(observations: np.ndarray, last_actions: np.ndarray, n_actions: int) -> np.ndarray:
    """Batched :func:`build_agent_input`

    Args:
        observations (np.ndarray): Shape `[..., n, obs_dim]`
        last_actions (np.ndarray): Integer shape `[..., n]`; negative entries mean "no previous action"
        n_actions (int): Size of the action space
    Returns:
        np.ndarray: Shape `[..., n, obs_dim + n_actions + n]`"""
    obs = np.asarray(observations, dtype=np.float64)
    last = np.asarray(last_actions, dtype=np.int64)
    if last.shape != obs.shape[:-1]:
        raise DimensionError(f"build_inputs: actions shape {last.shape} does not match observations {obs.shape}")
    n_agents = obs.shape[-2]
    action_part = np.zeros(last.shape + (n_actions,), dtype=np.float64)
    taken = last >= 0
    np.put_along_axis(action_part, np.where(taken, last, 0)[..., None], taken[..., None].astype(np.float64), -1)
    id_part = np.broadcast_to(np.eye(n_agents), last.shape + (n_agents,))
    return np.concatenate([obs, action_part, id_part], axis=-1)


def agent_forward(tape: Tape, inputs: Variable, hidden: Variable, prefix: str = "agent") -> Tuple[Variable, Variable]:
    """linear -> relu -> GRU -> linear head

    Args:
        tape (Tape): The tape reading the shared agent parameters
        inputs (Variable): Shape `[b, input_dim]`
        hidden (Variable): Shape `[b, hidden]`
        prefix (str): The parameter subtree of the agent network
    Returns:
        tuple: Q values `[b, n_actions]` and the new hidden state `[b, hidden]`"""
    x = relu(linear(inputs, tape.parameter(f"{prefix}.fc1.weight"), tape.parameter(f"{prefix}.fc1.bias")))
    h_next = gru_cell(x, hidden, prefix=f"{prefix}.gru")
    q = linear(h_next, tape.parameter(f"{prefix}.fc2.weight"), tape.parameter(f"{prefix}.fc2.bias"))
    return q, h_next


def select_action(
    q: ArrayLike, avail: ArrayLike, epsilon: float = 0.0, rng: Optional[np.random.Generator] = None
) -> int:
    """Epsilon-greedy choice among the available actions

    Args:
        q (array-like): The action values of one agent
        avail (array-like): {0, 1} availability of every action
        epsilon (float): Probability of a uniform draw over the available actions
        rng (np.random.Generator): Randomness source; required when `epsilon > 0`
    Returns:
        int: The chosen action; greedy ties go to the lowest index
    Raises:
        NoAvailableActionError: When no action is available"""
    values = np.asarray(q, dtype=np.float64)
    live = np.asarray(avail) != 0
    if values.shape != live.shape:
        raise DimensionError(f"select_action: q shape {values.shape} does not match avail shape {live.shape}")
    choices = np.flatnonzero(live)
    if choices.size == 0:
        raise NoAvailableActionError("select_action: no available action")
    if epsilon > 0.0:
        if rng is None:
            raise ValueError("select_action: an rng is required when epsilon > 0")
        if rng.random() < epsilon:
            return int(choices[rng.integers(choices.size)])
    return int(np.argmax(np.where(live, values, MASKED_Q_VALUE)))


def greedy_actions(q: np.ndarray, avail: np.ndarray) -> np.ndarray:
    """Vectorized greedy choice over the last axis; rows without an available action pick 0"""
    return np.argmax(np.where(np.asarray(avail) != 0, q, MASKED_Q_VALUE), axis=-1)


class RecurrentState:
    """GRU hidden states of all agents of one episode

    Args:
        n_agents (int): Number of agents
        hidden_dim (int): Size of each hidden state
    Note:
        Starts (and resets) to zeros"""

    __slots__ = ("_h",)

    def __init__(self, n_agents: int, hidden_dim: int) -> None:
        self._h = np.zeros((n_agents, hidden_dim), dtype=np.float64)

    @property
    def h(self) -> np.ndarray:
        """np.ndarray: The hidden states, shape `[n, hidden]`"""
        return self._h

    def reset(self) -> None:
        """Zero the hidden states for a new episode"""
        self._h = np.zeros_like(self._h)

    def update(self, h: np.ndarray) -> None:
        """Replace the hidden states"""
        if h.shape != self._h.shape:
            raise DimensionError(f"RecurrentState: expected shape {self._h.shape}; got {h.shape}")
        self._h = np.array(h, dtype=np.float64)


class AgentQNetwork:
    """Shared DRQN used by every agent

    Args:
        obs_dim (int): Length of a local observation
        n_actions (int): Size of the action space
        n_agents (int): Number of agents; sets the id one-hot length
        hidden_dim (int): Width of the hidden layer and the GRU state
    Raises:
        InitializationError: When a size is not positive"""

    __slots__ = ("_obs_dim", "_n_actions", "_n_agents", "_hidden", "_prefix")

    def __init__(
        self, obs_dim: int, n_actions: int, n_agents: int, hidden_dim: int = DEFAULT_AGENT_HIDDEN, prefix: str = "agent"
    ) -> None:
        if min(obs_dim, n_actions, n_agents, hidden_dim) <= 0:
            raise InitializationError("AgentQNetwork: all sizes must be positive")
        self._obs_dim = int(obs_dim)
        self._n_actions = int(n_actions)
        self._n_agents = int(n_agents)
        self._hidden = int(hidden_dim)
        self._prefix = prefix

    def __str__(self) -> str:
        return (
            "AgentQNetwork:\n"
            f"\tinput dim: {self.input_dim}\n"
            f"\thidden dim: {self.hidden_dim}\n"
            f"\tactions: {self.n_actions}\n"
        )

    @property
    def obs_dim(self) -> int:
        """int: Length of a local observation"""
        return self._obs_dim

    @property
    def n_actions(self) -> int:
        """int: Size of the action space"""
        return self._n_actions

    @property
    def n_agents(self) -> int:
        """int: Number of agents"""
        return self._n_agents

    @property
    def hidden_dim(self) -> int:
        """int: Hidden width"""
        return self._hidden

    @property
    def input_dim(self) -> int:
        """int: Length of the network input

        Note:
            Not settable"""
        return self._obs_dim + self._n_actions + self._n_agents

    def init_params(self, tree: ParameterTree, rng: np.random.Generator) -> None:
        """Add the shared agent subtree to `tree`"""
        pre, hid = self._prefix, self._hidden
        add_linear(tree, f"{pre}.fc1", self.input_dim, hid, rng)
        for gate in GRU_GATES:
            tree.add(f"{pre}.gru.{gate}.weight_ih", uniform_init(rng, (hid, hid), hid))
            tree.add(f"{pre}.gru.{gate}.bias_ih", uniform_init(rng, (hid,), hid))
            tree.add(f"{pre}.gru.{gate}.weight_hh", uniform_init(rng, (hid, hid), hid))
            tree.add(f"{pre}.gru.{gate}.bias_hh", uniform_init(rng, (hid,), hid))
        add_linear(tree, f"{pre}.fc2", hid, self._n_actions, rng)

    def initial_state(self) -> RecurrentState:
        """Zero hidden states for a new episode"""
        return RecurrentState(self._n_agents, self._hidden)

    def forward(self, tape: Tape, inputs: Variable, hidden: Variable) -> Tuple[Variable, Variable]:
        """See :func:`agent_forward`"""
        return agent_forward(tape, inputs, hidden, prefix=self._prefix)

    def unroll(self, tape: Tape, inputs: np.ndarray) -> Variable:
        """Q values over whole episodes

        Args:
            tape (Tape): The tape to record on
            inputs (np.ndarray): Shape `[B, T, n, input_dim]`
        Returns:
            Variable: Shape `[B, T, n, n_actions]`"""

        batch, steps, n_agents, in_dim = inputs.shape
        hidden = tape.constant(np.zeros((batch * n_agents, self._hidden)))
        outputs = []
        for t in range(steps):
            q, hidden = self.forward(tape, tape.constant(inputs[:, t].reshape(batch * n_agents, in_dim)), hidden)
            outputs.append(reshape(q, (batch, n_agents, self._n_actions)))
        return stack(outputs, axis=1)

    def act(
        self,
        params: ParameterTree,
        observations: np.ndarray,
        last_actions: np.ndarray,
        avail: np.ndarray,
        state: RecurrentState,
        epsilon: float = 0.0,
        rng: Optional[np.random.Generator] = None,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Advance every agent one step without recording gradients

        Args:
            params (ParameterTree): The parameters to act with
            observations (np.ndarray): Shape `[n, obs_dim]`
            last_actions (np.ndarray): Shape `[n]`, negative on the first step
            avail (np.ndarray): Shape `[n, n_actions]`
            state (RecurrentState): The hidden states; updated in place
            epsilon (float): Exploration probability
            rng (np.random.Generator): Randomness source
        Returns:
            tuple: chosen actions `[n]` and Q values `[n, n_actions]`"""
        tape = Tape(params, record=False)
        inputs = build_inputs(observations, last_actions, self._n_actions)
        q, h_next = self.forward(tape, tape.constant(inputs), tape.constant(state.h))
        state.update(h_next.value)
        actions = np.array(
            [select_action(q.value[i], avail[i], epsilon, rng) for i in range(self._n_agents)], dtype=np.int64
        )
        return actions, q.value
