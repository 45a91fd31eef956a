""" Episodes, replay, TD learning and the training loop """

from mgan.learning.config import RunConfig, TrainConfig, load_config, parse_config
from mgan.learning.episode import Episode, EpisodeBatch, collect_episode, discounted_returns, write_trace
from mgan.learning.learner import Learner, build_model
from mgan.learning.replay import ReplayBuffer
from mgan.learning.runner import EvalResult, MetricLog, TrainResult, evaluate, train

__all__ = [
    "Episode",
    "EpisodeBatch",
    "EvalResult",
    "Learner",
    "MetricLog",
    "ReplayBuffer",
    "RunConfig",
    "TrainConfig",
    "TrainResult",
    "build_model",
    "collect_episode",
    "discounted_returns",
    "evaluate",
    "load_config",
    "parse_config",
    "train",
    "write_trace",
]
