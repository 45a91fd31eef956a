""" pymgan module """

from typing import List

from mgan.agents import AgentQNetwork, RecurrentState, build_agent_input, select_action
from mgan.analysis import analyze, pca_components, pca_project, weight_health_correlation
from mgan.autodiff import Checkpoint, OptimizerState, ParameterTree, Tape, Variable, backward, optimizer_step
from mgan.envs import CoopEnv, EnvSpec, MatrixGame, SkirmishConfig, SkirmishGrid, StepResult, TwoStepGame, make_env
from mgan.exceptions import (
    CheckpointError,
    CheckpointMismatchError,
    ConfigError,
    DegenerateMaskError,
    DimensionError,
    EnvironmentStepError,
    InitializationError,
    MganBaseException,
    NoAvailableActionError,
    NonFiniteError,
    ParameterError,
    ReplayBufferError,
    SearchSpaceError,
    TapeError,
)
from mgan.graphs import AgentGraph, EmbeddingSet, GraphEncoder
from mgan.learning import (
    Episode,
    EpisodeBatch,
    Learner,
    ReplayBuffer,
    RunConfig,
    TrainConfig,
    evaluate,
    load_config,
    train,
)
from mgan.mixers import MganMixer, QmixMixer, VdnMixer, make_mixer

__author__ = "pymgan developers"
__maintainer__ = "pymgan developers"
__email__ = ""
__license__ = "MIT"
__version__ = "0.1.0"
__credits__: List[str] = []
__url__ = "https://github.com/pymgan/pymgan"
__bugtrack_url__ = "https://github.com/pymgan/pymgan/issues"

__all__ = [
    "AgentGraph",
    "AgentQNetwork",
    "Checkpoint",
    "CheckpointError",
    "CheckpointMismatchError",
    "ConfigError",
    "CoopEnv",
    "DegenerateMaskError",
    "DimensionError",
    "EmbeddingSet",
    "EnvSpec",
    "EnvironmentStepError",
    "Episode",
    "EpisodeBatch",
    "GraphEncoder",
    "InitializationError",
    "Learner",
    "MatrixGame",
    "MganBaseException",
    "MganMixer",
    "NoAvailableActionError",
    "NonFiniteError",
    "OptimizerState",
    "ParameterError",
    "ParameterTree",
    "QmixMixer",
    "RecurrentState",
    "ReplayBuffer",
    "ReplayBufferError",
    "RunConfig",
    "SearchSpaceError",
    "SkirmishConfig",
    "SkirmishGrid",
    "StepResult",
    "Tape",
    "TapeError",
    "TrainConfig",
    "TwoStepGame",
    "VdnMixer",
    "Variable",
    "analyze",
    "backward",
    "build_agent_input",
    "evaluate",
    "load_config",
    "make_env",
    "make_mixer",
    "optimizer_step",
    "pca_components",
    "pca_project",
    "select_action",
    "train",
    "weight_health_correlation",
]
