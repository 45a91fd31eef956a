""" Exhaustive search for the optimal return of small deterministic environments
    License: MIT
"""

import copy
import itertools
from typing import Optional, Tuple

import numpy as np

from mgan.envs.base import CoopEnv, StepResult
from mgan.exceptions import SearchSpaceError

MAX_JOINT_SEQUENCES = 10**6


def policy_space_size(env: CoopEnv) -> int:
    """Upper bound on the number of joint action sequences: `(|U| ** n) ** horizon`"""
    spec = env.spec
    return (spec.n_actions**spec.n_agents) ** spec.horizon


def brute_force_optimal(
    env: CoopEnv, seed: Optional[int] = None, limit: int = MAX_JOINT_SEQUENCES
) -> Tuple[float, Tuple[Tuple[int, ...], ...]]:
    """Best undiscounted return over every open-loop joint action sequence

    Args:
        env (CoopEnv): A deterministic environment; it is reset with `seed`
        seed (int): Seed of the episode to search
        limit (int): Largest policy space that is enumerated
    Returns:
        tuple: the optimal return and one joint action sequence achieving it
    Raises:
        SearchSpaceError: When `(|U| ** n) ** horizon` exceeds `limit`"""
    size = policy_space_size(env)
    if size > limit:
        raise SearchSpaceError(f"joint policy space of {size} sequences exceeds the limit of {limit}")
    first = env.reset(seed)
    return _search(env, first)


def _search(env: CoopEnv, result: StepResult) -> Tuple[float, Tuple[Tuple[int, ...], ...]]:
    best_value, best_plan = -np.inf, ()
    choices = [np.flatnonzero(row).tolist() for row in result.avail]
    for joint in itertools.product(*choices):
        branch = copy.deepcopy(env)
        nxt = branch.step(joint)
        value, plan = nxt.reward, ()
        if not nxt.done:
            future, plan = _search(branch, nxt)
            value += future
        if value > best_value:
            best_value, best_plan = value, (tuple(int(a) for a in joint),) + plan
    return float(best_value), best_plan
