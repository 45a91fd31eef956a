""" Cooperative environment interface
    License: MIT
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from mgan.exceptions import EnvironmentStepError, InitializationError


@dataclass(frozen=True)
class EnvSpec:
    """Static description of an environment

    Args:
        n_agents (int): Number of agents n
        n_actions (int): Size of the per-agent action space |U|
        obs_dim (int): Length of a local observation
        state_dim (int): Length of the global state
        horizon (int): Maximum episode length
        success (str): Human readable description of a successful episode"""

    n_agents: int
    n_actions: int
    obs_dim: int
    state_dim: int
    horizon: int
    success: str = ""

    def __post_init__(self) -> None:
        if min(self.n_agents, self.n_actions, self.obs_dim, self.state_dim, self.horizon) < 1:
            raise InitializationError(f"EnvSpec: sizes and horizon must be positive: {self}")


@dataclass
class StepResult:
    """What the environment reports after a reset or a step

    Args:
        obs (np.ndarray): Local observations `[n, obs_dim]`
        state (np.ndarray): Global state `[state_dim]`
        reward (float): Shared reward of the transition; 0 after a reset
        terminated (bool): The episode ended on its own
        truncated (bool): The episode was cut by the horizon
        success (bool): The episode ended in success; only set on termination
        alive (np.ndarray): {0, 1} liveness `[n]`
        avail (np.ndarray): {0, 1} action availability `[n, n_actions]`"""

    obs: np.ndarray
    state: np.ndarray
    reward: float
    terminated: bool
    truncated: bool
    success: bool
    alive: np.ndarray
    avail: np.ndarray

    @property
    def done(self) -> bool:
        """bool: The episode is over"""
        return self.terminated or self.truncated


class CoopEnv(ABC):
    """Base class of the cooperative environments; deterministic given the reset seed"""

    def __init__(self, spec: EnvSpec) -> None:
        self._spec = spec
        self._t = 0
        self._done = True

    @property
    def spec(self) -> EnvSpec:
        """EnvSpec: Sizes of the environment

        Note:
            Not settable"""
        return self._spec

    @property
    def t(self) -> int:
        """int: Steps taken in the current episode"""
        return self._t

    @property
    def done(self) -> bool:
        """bool: The current episode is over (or no episode was started)"""
        return self._done

    def agent_health(self) -> Optional[np.ndarray]:
        """Per-agent health fraction, for environments that model it"""
        return None

    def reset(self, seed: Optional[int] = None) -> StepResult:
        """Start a new episode

        Args:
            seed (int): Seed of the episode; environments without randomness ignore it
        Returns:
            StepResult: The first observation with reward 0"""
        self._t = 0
        self._done = False
        self._reset(seed)
        return self._result(0.0, False, False, False)

    def step(self, actions: Union[np.ndarray, Sequence[int]]) -> StepResult:
        """Apply one joint action

        Args:
            actions (array-like): One action index per agent
        Returns:
            StepResult: The next observation and the shared reward
        Raises:
            EnvironmentStepError: Stepping a finished episode, wrong action count or an unavailable action"""
        if self._done:
            raise EnvironmentStepError("step called on a finished episode; call reset first")
        joint = self._check_actions(actions)
        reward, terminated, success = self._step(joint)
        self._t += 1
        truncated = not terminated and self._t >= self._spec.horizon
        self._done = terminated or truncated
        return self._result(reward, terminated, truncated, success and terminated)

    def _check_actions(self, actions: Union[np.ndarray, Sequence[int]]) -> np.ndarray:
        joint = np.asarray(actions, dtype=np.int64).reshape(-1)
        if joint.size != self._spec.n_agents:
            raise EnvironmentStepError(f"expected {self._spec.n_agents} actions; got {joint.size}")
        avail = self.avail_actions()
        for agent, action in enumerate(joint):
            if not 0 <= action < self._spec.n_actions or not avail[agent, action]:
                raise EnvironmentStepError(f"agent {agent}: action {action} is not available")
        return joint

    def _result(self, reward: float, terminated: bool, truncated: bool, success: bool) -> StepResult:
        return StepResult(
            obs=self.observations(),
            state=self.state(),
            reward=float(reward),
            terminated=terminated,
            truncated=truncated,
            success=success,
            alive=self.alive(),
            avail=self.avail_actions(),
        )

    def alive(self) -> np.ndarray:
        """{0, 1} liveness of every agent"""
        return np.ones(self._spec.n_agents, dtype=np.float64)

    def avail_actions(self) -> np.ndarray:
        """{0, 1} availability `[n, n_actions]`"""
        return np.ones((self._spec.n_agents, self._spec.n_actions), dtype=np.float64)

    @abstractmethod
    def observations(self) -> np.ndarray:
        """Local observations `[n, obs_dim]`"""

    @abstractmethod
    def state(self) -> np.ndarray:
        """Global state `[state_dim]`"""

    @abstractmethod
    def _reset(self, seed: Optional[int]) -> None:
        """reset the internal state"""

    @abstractmethod
    def _step(self, actions: np.ndarray) -> tuple:
        """advance one step; returns (reward, terminated, success)"""
