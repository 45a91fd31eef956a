""" Episodes, padded episode batches and episode collection
    License: MIT
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from mgan.agents.qnet import AgentQNetwork
from mgan.autodiff.parameters import ParameterTree
from mgan.envs.base import CoopEnv
from mgan.exceptions import DimensionError
from mgan.utilities import resolve_path


@dataclass
class Episode:
    """One recorded trajectory of `T` steps

    Per step arrays hold `T + 1` rows (the final observation included); per
    transition arrays hold `T` rows.

    Args:
        obs (np.ndarray): `[T+1, n, obs_dim]`
        state (np.ndarray): `[T+1, state_dim]`
        avail (np.ndarray): `[T+1, n, n_actions]`
        alive (np.ndarray): `[T+1, n]`
        actions (np.ndarray): `[T, n]`
        rewards (np.ndarray): `[T]`
        terminated (np.ndarray): `[T]`, 1 on the last step of an episode that ended on its own
        truncated (np.ndarray): `[T]`, 1 on the last step of an episode cut by the horizon
        success (bool): The environment's success flag at the end
        health (np.ndarray): Optional per-agent health `[T+1, n]`"""

    obs: np.ndarray
    state: np.ndarray
    avail: np.ndarray
    alive: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    terminated: np.ndarray
    truncated: np.ndarray
    success: bool = False
    health: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        steps = self.actions.shape[0]
        if self.obs.shape[0] != steps + 1 or self.state.shape[0] != steps + 1 or self.rewards.shape[0] != steps:
            raise DimensionError(f"Episode: inconsistent lengths for {steps} steps")

    def __len__(self) -> int:
        return int(self.actions.shape[0])

    @property
    def length(self) -> int:
        """int: Number of transitions `T`"""
        return len(self)

    @property
    def total_return(self) -> float:
        """float: Undiscounted return"""
        return float(np.sum(self.rewards))

    @property
    def n_agents(self) -> int:
        """int: Number of agents"""
        return int(self.obs.shape[1])


def discounted_returns(rewards: Union[np.ndarray, Sequence[float]], gamma: float) -> np.ndarray:
    """`G_t = sum_l gamma^l r_{t+l}` for every step t of an episode"""
    res = np.zeros(len(rewards), dtype=np.float64)
    running = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        running = float(rewards[t]) + gamma * running
        res[t] = running
    return res


def collect_episode(
    env: CoopEnv,
    agent: AgentQNetwork,
    params: ParameterTree,
    epsilon: float,
    rng: Optional[np.random.Generator] = None,
    seed: Optional[int] = None,
) -> Episode:
    """Play one full episode with epsilon-greedy agents

    Args:
        env (CoopEnv): The environment; it is reset with `seed`
        agent (AgentQNetwork): The shared agent network
        params (ParameterTree): The parameters to act with
        epsilon (float): Exploration probability
        rng (np.random.Generator): Randomness source for exploration
        seed (int): Seed of the episode
    Returns:
        Episode: The recorded trajectory"""
    result = env.reset(seed)
    state = agent.initial_state()
    last = -np.ones(env.spec.n_agents, dtype=np.int64)
    obs, states, avail, alive, health = [result.obs], [result.state], [result.avail], [result.alive], []
    actions, rewards, terminated, truncated = [], [], [], []
    track_health = env.agent_health() is not None
    if track_health:
        health.append(env.agent_health())
    while not result.done:
        joint, _ = agent.act(params, result.obs, last, result.avail, state, epsilon, rng)
        result = env.step(joint)
        last = joint
        actions.append(joint)
        rewards.append(result.reward)
        terminated.append(float(result.terminated))
        truncated.append(float(result.truncated))
        obs.append(result.obs)
        states.append(result.state)
        avail.append(result.avail)
        alive.append(result.alive)
        if track_health:
            health.append(env.agent_health())
    return Episode(
        obs=np.stack(obs),
        state=np.stack(states),
        avail=np.stack(avail),
        alive=np.stack(alive),
        actions=np.stack(actions).astype(np.int64),
        rewards=np.asarray(rewards, dtype=np.float64),
        terminated=np.asarray(terminated, dtype=np.float64),
        truncated=np.asarray(truncated, dtype=np.float64),
        success=bool(result.success),
        health=np.stack(health) if track_health else None,
    )


def write_trace(episode: Episode, path: Union[str, Path]) -> None:
    """Write one JSON line per transition, for debugging replays

    Args:
        episode (Episode): The recorded episode
        path (str|Path): The output file"""
    with open(resolve_path(path), "w", encoding="utf-8") as fobj:
        for t in range(len(episode)):
            row = {
                "t": t,
                "obs": episode.obs[t].tolist(),
                "state": episode.state[t].tolist(),
                "alive": episode.alive[t].tolist(),
                "actions": episode.actions[t].tolist(),
                "reward": float(episode.rewards[t]),
                "terminated": bool(episode.terminated[t]),
                "truncated": bool(episode.truncated[t]),
            }
            fobj.write(json.dumps(row) + "\n")


class EpisodeBatch:
    """Episodes padded to a common length

    Args:
        episodes (list): The episodes; all from the same environment
    Raises:
        ValueError: When `episodes` is empty
    Note:
        `filled[b, t]` is 1 for real transitions and 0 for padding; padded rows are zero"""

    __slots__ = (
        "obs",
        "state",
        "avail",
        "alive",
        "actions",
        "rewards",
        "terminated",
        "truncated",
        "filled",
        "_episodes",
    )

    def __init__(self, episodes: Sequence[Episode]) -> None:
        if not episodes:
            raise ValueError("EpisodeBatch: needs at least one episode")
        self._episodes: List[Episode] = list(episodes)
        batch = len(episodes)
        steps = max(len(ep) for ep in episodes)
        first = episodes[0]

        def padded(name: str, rows: int, dtype=np.float64) -> np.ndarray:
            shape = getattr(first, name).shape[1:]
            out = np.zeros((batch, rows) + shape, dtype=dtype)
            for b, ep in enumerate(episodes):
                value = getattr(ep, name)
                out[b, : value.shape[0]] = value
            return out

        self.obs = padded("obs", steps + 1)
        self.state = padded("state", steps + 1)
        self.avail = padded("avail", steps + 1)
        self.alive = padded("alive", steps + 1)
        self.actions = padded("actions", steps, np.int64)
        self.rewards = padded("rewards", steps)
        self.terminated = padded("terminated", steps)
        self.truncated = padded("truncated", steps)
        self.filled = np.zeros((batch, steps), dtype=np.float64)
        for b, ep in enumerate(episodes):
            self.filled[b, : len(ep)] = 1.0

    def __len__(self) -> int:
        return len(self._episodes)

    @property
    def episodes(self) -> List[Episode]:
        """list(Episode): The unpadded episodes"""
        return self._episodes

    @property
    def max_steps(self) -> int:
        """int: Padded number of transitions `T`"""
        return int(self.actions.shape[1])

    @property
    def n_agents(self) -> int:
        """int: Number of agents"""
        return int(self.obs.shape[2])

    def last_actions(self) -> np.ndarray:
        """Previous action of every step `[B, T+1, n]`; -1 on the first step"""
        first = -np.ones((len(self), 1, self.n_agents), dtype=np.int64)
        return np.concatenate([first, self.actions], axis=1)
