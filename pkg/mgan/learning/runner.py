""" Training and greedy evaluation loops
    License: MIT
"""

import json
import logging
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Deque, Dict, List, Optional, Union

import numpy as np

import mgan
from mgan.agents.qnet import AgentQNetwork
from mgan.autodiff.checkpoint import Checkpoint
from mgan.autodiff.parameters import ParameterTree
from mgan.envs import CoopEnv, make_env
from mgan.learning.config import RunConfig
from mgan.learning.episode import collect_episode
from mgan.learning.learner import Learner
from mgan.learning.replay import ReplayBuffer
from mgan.utilities import git_describe, resolve_path

logger = logging.getLogger(__name__)

EnvFactoryT = Callable[[], CoopEnv]

LOSS_WINDOW = 100


@dataclass(frozen=True)
class EvalResult:
    """Greedy evaluation summary"""

    mean_return: float
    win_rate: float
    episodes: int

    def to_dict(self) -> Dict[str, Union[float, int]]:
        """JSON-serializable form"""
        return asdict(self)


@dataclass
class TrainResult:
    """What :func:`train` hands back"""

    learner: Learner
    metrics: List[Dict[str, Optional[float]]] = field(default_factory=list)
    env_steps: int = 0
    episodes: int = 0


class MetricLog:
    """JSON-lines metric writer; records carry no timestamps

    Args:
        path (str|Path): Output file; `None` keeps the records in memory only"""

    __slots__ = ("_path", "_records")

    def __init__(self, path: Optional[Union[str, Path]] = None) -> None:
        self._path = resolve_path(path) if path is not None else None
        self._records: List[Dict[str, Optional[float]]] = []
        if self._path is not None:
            self._path.write_text("", encoding="utf-8")

    @property
    def records(self) -> List[Dict[str, Optional[float]]]:
        """list(dict): Every record written so far"""
        return self._records

    def write(
        self, step: int, evaluation: EvalResult, loss_ma: Optional[float], epsilon: float
    ) -> Dict[str, Optional[float]]:
        """Append one evaluation record"""
        record = {
            "step": int(step),
            "mean_return": float(evaluation.mean_return),
            "win_rate": float(evaluation.win_rate),
            "loss_ma": None if loss_ma is None else float(loss_ma),
            "epsilon": float(epsilon),
        }
        self._records.append(record)
        if self._path is not None:
            with open(self._path, "a", encoding="utf-8") as fobj:
                fobj.write(json.dumps(record) + "\n")
        return record


def evaluate(env: CoopEnv, agent: AgentQNetwork, params: ParameterTree, episodes: int, seed: int = 0) -> EvalResult:
    """Run greedy episodes; episode i is reset with seed `seed + i`

    Args:
        env (CoopEnv): The environment
        agent (AgentQNetwork): The agent network
        params (ParameterTree): The parameters to act with
        episodes (int): Number of episodes
        seed (int): Seed of the first episode
    Returns:
        EvalResult: Mean undiscounted return and the fraction of successful episodes
    Raises:
        ValueError: When `episodes` is not positive"""
    if episodes <= 0:
        raise ValueError(f"evaluate: episodes must be positive; got {episodes}")
    returns, wins = [], 0
    for i in range(episodes):
        episode = collect_episode(env, agent, params, 0.0, None, seed=seed + i)
        returns.append(episode.total_return)
        wins += int(episode.success)
    return EvalResult(float(np.mean(returns)), wins / episodes, episodes)


def run_info(config: RunConfig) -> Dict[str, Optional[Union[str, int]]]:
    """Seed, package version and source revision of a run"""
    return {"seed": config.train.seed, "version": mgan.__version__, "git_describe": git_describe()}


def train(
    config: RunConfig, env_factory: Optional[EnvFactoryT] = None, out_dir: Optional[Union[str, Path]] = None
) -> TrainResult:
    """Collect, store, sample, update and evaluate until the step budget is spent

    Args:
        config (RunConfig): The validated run configuration
        env_factory (function): Builds an environment; defaults to the configured one
        out_dir (str|Path): Directory for the run artifacts; `None` writes nothing
    Returns:
        TrainResult: The trained learner and the metric records"""
    config.validate()
    cfg = config.train
    factory = env_factory if env_factory is not None else lambda: make_env(config.env_name, **config.env_params)
    env, eval_env = factory(), factory()
    rng = np.random.default_rng(cfg.seed)
    learner = Learner.create(config.algorithm, env.spec, cfg, rng)
    if config.checkpoint is not None:
        learner.restore(Checkpoint.load(config.checkpoint))
        logger.info("resumed from %s after %d updates", config.checkpoint, learner.train_steps)
    buffer = ReplayBuffer(cfg.buffer_size)
    losses: Deque[float] = deque(maxlen=LOSS_WINDOW)

    out = resolve_path(out_dir) if out_dir is not None else None
    if out is not None:
        (out / "checkpoints").mkdir(parents=True, exist_ok=True)
        config.write_ini(out / "resolved_config.ini")
        (out / "run_info.json").write_text(json.dumps(run_info(config), indent=2) + "\n", encoding="utf-8")
    metrics = MetricLog(out / "metrics.jsonl" if out is not None else None)
    result = TrainResult(learner, metrics.records)

    def checkpoint_meta() -> Dict:
        return {"config": config.to_dict(), "version": mgan.__version__, "env_steps": result.env_steps}

    def log_evaluation() -> None:
        evaluation = evaluate(eval_env, learner.agent, learner.params, cfg.eval_episodes, cfg.seed)
        loss_ma = float(np.mean(losses)) if losses else None
        record = metrics.write(result.env_steps, evaluation, loss_ma, cfg.epsilon(result.env_steps))
        logger.info("evaluation %s", json.dumps(record))

    log_evaluation()
    next_eval, next_save = cfg.eval_period, cfg.save_period
    last_eval = 0
    while result.env_steps < cfg.total_env_steps:
        epsilon = cfg.epsilon(result.env_steps)
        episode = collect_episode(env, learner.agent, learner.params, epsilon, rng, seed=int(rng.integers(2**31)))
        buffer.add(episode)
        result.env_steps += len(episode)
        result.episodes += 1
        if buffer.can_sample(cfg.batch_size):
            losses.append(learner.train_step(buffer.sample(cfg.batch_size, rng)))
        if result.env_steps >= next_eval:
            log_evaluation()
            last_eval = result.env_steps
            while next_eval <= result.env_steps:
                next_eval += cfg.eval_period
        if out is not None and result.env_steps >= next_save:
            learner.to_checkpoint(checkpoint_meta()).export(out / "checkpoints" / f"checkpoint_{result.env_steps}.bin")
            while next_save <= result.env_steps:
                next_save += cfg.save_period

    if last_eval != result.env_steps:
        log_evaluation()
    if out is not None:
        learner.to_checkpoint(checkpoint_meta()).export(out / "checkpoint.bin")
    logger.info("training finished after %d env steps and %d updates", result.env_steps, learner.train_steps)
    return result
