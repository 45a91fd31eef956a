""" Cooperative environments and their oracles """

from typing import Any

from mgan.envs.base import CoopEnv, EnvSpec, StepResult
from mgan.envs.matrix import COORDINATION_PAYOFF, MatrixGame, TwoStepGame
from mgan.envs.oracle import brute_force_optimal, policy_space_size
from mgan.envs.skirmish import SkirmishConfig, SkirmishGrid
from mgan.exceptions import InitializationError

ENVIRONMENTS = ("matrix", "two_step", "skirmish")


def make_env(name: str, **params: Any) -> CoopEnv:
    """Build an environment by name

    Args:
        name (str): One of `matrix`, `two_step` or `skirmish`
        params: Environment settings; `payoff` for `matrix`, the :class:`SkirmishConfig` fields for `skirmish`
    Returns:
        CoopEnv: The environment
    Raises:
        InitializationError: Unknown name or setting"""
    if name == "matrix":
        unknown = set(params) - {"payoff"}
        if unknown:
            raise InitializationError(f"matrix: unknown settings {sorted(unknown)}")
        return MatrixGame(params.get("payoff", COORDINATION_PAYOFF))
    if name == "two_step":
        if params:
            raise InitializationError(f"two_step: takes no settings; got {sorted(params)}")
        return TwoStepGame()
    if name == "skirmish":
        try:
            return SkirmishGrid(SkirmishConfig(**params))
        except TypeError as ex:
            raise InitializationError(f"skirmish: {ex}") from ex
    raise InitializationError(f"Unknown environment {name!r}; expected one of {', '.join(ENVIRONMENTS)}")


__all__ = [
    "COORDINATION_PAYOFF",
    "CoopEnv",
    "ENVIRONMENTS",
    "EnvSpec",
    "MatrixGame",
    "SkirmishConfig",
    "SkirmishGrid",
    "StepResult",
    "TwoStepGame",
    "brute_force_optimal",
    "make_env",
    "policy_space_size",
]
