""" One-step and two-step cooperative matrix games
    License: MIT
"""

from typing import Optional, Sequence, Union

import numpy as np

from mgan.envs.base import CoopEnv, EnvSpec
from mgan.exceptions import InitializationError
from mgan.utilities import check_finite, one_hot

COORDINATION_PAYOFF = [[10.0, 0.0], [0.0, 10.0]]

TWO_STEP_PAYOFF_A = [[7.0, 7.0], [7.0, 7.0]]
TWO_STEP_PAYOFF_B = [[0.0, 1.0], [1.0, 8.0]]


class MatrixGame(CoopEnv):
    """Single-step game where the shared reward is read from a payoff table

    Args:
        payoff (array-like): Table with one axis per agent, every axis of length |U|; \
            a 2-D table is the usual two-agent game
    Raises:
        InitializationError: When the table is empty, ragged or not finite
    Note:
        Every agent observes `[1, agent id one-hot]`; the state is `[1]`"""

    def __init__(self, payoff: Union[np.ndarray, Sequence] = COORDINATION_PAYOFF) -> None:
        table = np.asarray(payoff, dtype=np.float64)
        if table.ndim < 1 or table.size == 0 or len(set(table.shape)) != 1:
            raise InitializationError(f"MatrixGame: payoff must have equal, non-empty axes; got {table.shape}")
        check_finite(table, "MatrixGame payoff")
        self._payoff = table
        n_agents = table.ndim
        super().__init__(
            EnvSpec(
                n_agents=n_agents,
                n_actions=table.shape[0],
                obs_dim=1 + n_agents,
                state_dim=1,
                horizon=1,
                success=f"reward equals the table maximum {table.max():g}",
            )
        )

    @property
    def payoff(self) -> np.ndarray:
        """np.ndarray: The payoff table"""
        return self._payoff

    def observations(self) -> np.ndarray:
        n = self.spec.n_agents
        return np.concatenate([np.ones((n, 1)), np.eye(n)], axis=1)

    def state(self) -> np.ndarray:
        return np.ones(1, dtype=np.float64)

    def _reset(self, seed: Optional[int]) -> None:
        pass

    def _step(self, actions: np.ndarray) -> tuple:
        reward = float(self._payoff[tuple(int(a) for a in actions)])
        return reward, True, reward == float(self._payoff.max())


class TwoStepGame(CoopEnv):
    """Two-agent, two-step game

    The first action of agent 0 picks branch A (action 0) or branch B (action 1) with
    zero reward; the second joint action is paid from the branch table. Branch A pays 7
    for every joint action, branch B pays `[[0, 1], [1, 8]]`.

    Note:
        State is the one-hot stage (start, A, B); observations add the agent id one-hot"""

    STAGES = 3

    def __init__(self) -> None:
        super().__init__(
            EnvSpec(
                n_agents=2,
                n_actions=2,
                obs_dim=self.STAGES + 2,
                state_dim=self.STAGES,
                horizon=2,
                success="return equals the optimum 8",
            )
        )
        self._stage = 0
        self._tables = (np.asarray(TWO_STEP_PAYOFF_A), np.asarray(TWO_STEP_PAYOFF_B))

    @property
    def stage(self) -> int:
        """int: 0 before the branch choice, 1 in branch A, 2 in branch B"""
        return self._stage

    def observations(self) -> np.ndarray:
        stage = one_hot(self._stage, self.STAGES)
        return np.stack([np.concatenate([stage, one_hot(agent, 2)]) for agent in range(2)])

    def state(self) -> np.ndarray:
        return one_hot(self._stage, self.STAGES)

    def _reset(self, seed: Optional[int]) -> None:
        self._stage = 0

    def _step(self, actions: np.ndarray) -> tuple:
        if self._stage == 0:
            self._stage = 1 + int(actions[0])
            return 0.0, False, False
        reward = float(self._tables[self._stage - 1][int(actions[0]), int(actions[1])])
        return reward, True, reward == 8.0
