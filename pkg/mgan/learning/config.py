""" Run configuration: hyperparameters, environment selection and the INI file format
    License: MIT
"""

import configparser
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

from mgan.constants import (
    ALGORITHMS,
    DEFAULT_AGENT_HIDDEN,
    DEFAULT_EMBED_DIM,
    DEFAULT_EVAL_EPISODES,
    DEFAULT_MIXING_EMBED,
    DEFAULT_N_GRAPHS,
    RMSPROP_ALPHA,
    RMSPROP_EPS,
    RMSPROP_LR,
)
from mgan.exceptions import ConfigError
from mgan.utilities import is_valid_file, resolve_path

# INI section of every TrainConfig field
TRAIN_SECTIONS = {
    "gamma": "train",
    "epsilon_start": "train",
    "epsilon_end": "train",
    "epsilon_anneal_steps": "train",
    "buffer_size": "train",
    "batch_size": "train",
    "target_update_period": "train",
    "learning_rate": "train",
    "rms_alpha": "train",
    "rms_eps": "train",
    "grad_clip": "train",
    "total_env_steps": "train",
    "save_period": "train",
    "n_graphs": "model",
    "agent_hidden": "model",
    "embed_dim": "model",
    "mixing_embed": "model",
    "eval_period": "eval",
    "eval_episodes": "eval",
    "seed": "run",
}
RUN_KEYS = ("algorithm", "out_dir", "checkpoint")
SECTIONS = ("run", "env", "train", "model", "eval")


@dataclass(frozen=True)
class TrainConfig:
    """All training hyperparameters"""

    gamma: float = 0.99
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_anneal_steps: int = 50_000
    buffer_size: int = 5_000
    batch_size: int = 32
    target_update_period: int = 200
    n_graphs: int = DEFAULT_N_GRAPHS
    learning_rate: float = RMSPROP_LR
    rms_alpha: float = RMSPROP_ALPHA
    rms_eps: float = RMSPROP_EPS
    grad_clip: float = 10.0
    agent_hidden: int = DEFAULT_AGENT_HIDDEN
    embed_dim: int = DEFAULT_EMBED_DIM
    mixing_embed: int = DEFAULT_MIXING_EMBED
    eval_period: int = 10_000
    eval_episodes: int = DEFAULT_EVAL_EPISODES
    save_period: int = 50_000
    seed: int = 0
    total_env_steps: int = 100_000

    def validate(self) -> None:
        """Raise ConfigError naming the first field that is out of range"""
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError("gamma", f"must be in [0, 1); got {self.gamma}")
        for name in ("epsilon_start", "epsilon_end"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(name, f"must be in [0, 1]; got {value}")
        positive = (
            "epsilon_anneal_steps",
            "buffer_size",
            "batch_size",
            "target_update_period",
            "n_graphs",
            "learning_rate",
            "rms_eps",
            "agent_hidden",
            "embed_dim",
            "mixing_embed",
            "eval_period",
            "eval_episodes",
            "save_period",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(name, f"must be positive; got {getattr(self, name)}")
        if not 0.0 <= self.rms_alpha < 1.0:
            raise ConfigError("rms_alpha", f"must be in [0, 1); got {self.rms_alpha}")
        if self.grad_clip < 0:
            raise ConfigError("grad_clip", f"must be non-negative; got {self.grad_clip}")
        if self.total_env_steps < 0:
            raise ConfigError("total_env_steps", f"must be non-negative; got {self.total_env_steps}")
        if self.batch_size > self.buffer_size:
            raise ConfigError("batch_size", "must not exceed buffer_size")

    def epsilon(self, env_steps: int) -> float:
        """Exploration rate after `env_steps` environment steps: linear anneal, then constant"""
        frac = min(max(env_steps, 0) / self.epsilon_anneal_steps, 1.0)
        return self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)


@dataclass(frozen=True)
class RunConfig:
    """TrainConfig plus environment, algorithm and output locations

    Args:
        env_name (str): Registered environment name
        env_params (dict): Environment settings
        algorithm (str): `mgan`, `vdn` or `qmix`
        train (TrainConfig): The hyperparameters
        out_dir (str): Directory receiving metrics, checkpoints and the resolved config
        checkpoint (str): Optional checkpoint to resume from"""

    env_name: str
    env_params: Dict[str, Any] = field(default_factory=dict)
    algorithm: str = "mgan"
    train: TrainConfig = field(default_factory=TrainConfig)
    out_dir: str = "runs/default"
    checkpoint: Optional[str] = None

    def validate(self) -> None:
        """Raise ConfigError for an unknown algorithm or invalid hyperparameters"""
        if not self.env_name:
            raise ConfigError("env.name", "required field is missing")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError("run.algorithm", f"must be one of {', '.join(ALGORITHMS)}; got {self.algorithm!r}")
        self.train.validate()

    def with_overrides(self, seed: Optional[int] = None, out_dir: Optional[str] = None) -> "RunConfig":
        """Copy with the command-line overrides applied"""
        res = self
        if seed is not None:
            res = replace(res, train=replace(res.train, seed=int(seed)))
        if out_dir is not None:
            res = replace(res, out_dir=str(out_dir))
        return res

    def to_dict(self) -> Dict[str, Any]:
        """JSON-serializable form stored in checkpoints"""
        return {
            "env_name": self.env_name,
            "env_params": dict(self.env_params),
            "algorithm": self.algorithm,
            "train": asdict(self.train),
            "out_dir": self.out_dir,
            "checkpoint": self.checkpoint,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Inverse of :meth:`to_dict`"""
        try:
            train = TrainConfig(**data.get("train", {}))
            return cls(
                env_name=data["env_name"],
                env_params=dict(data.get("env_params", {})),
                algorithm=data.get("algorithm", "mgan"),
                train=train,
                out_dir=data.get("out_dir", "runs/default"),
                checkpoint=data.get("checkpoint"),
            )
        except (KeyError, TypeError) as ex:
            raise ConfigError("config", f"unreadable stored configuration ({ex})") from ex

    def to_ini(self) -> str:
        """Render every setting, defaults included, in the INI file format"""
        parser = configparser.ConfigParser(interpolation=None)
        for section in SECTIONS:
            parser.add_section(section)
        parser.set("run", "algorithm", self.algorithm)
        parser.set("run", "out_dir", self.out_dir)
        if self.checkpoint is not None:
            parser.set("run", "checkpoint", self.checkpoint)
        parser.set("env", "name", self.env_name)
        for key, value in sorted(self.env_params.items()):
            parser.set("env", key, json.dumps(value))
        for item in fields(TrainConfig):
            parser.set(TRAIN_SECTIONS[item.name], item.name, repr(getattr(self.train, item.name)))
        lines = []
        for section in SECTIONS:
            lines.append(f"[{section}]")
            lines.extend(f"{key} = {value}" for key, value in parser.items(section))
            lines.append("")
        return "\n".join(lines)

    def write_ini(self, path: Union[str, Path]) -> None:
        """Write :meth:`to_ini` to `path`"""
        resolve_path(path).write_text(self.to_ini(), encoding="utf-8")


def _parse_env_value(raw: str) -> Any:
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    try:
        return json.loads(raw)
    except ValueError:
        return raw


def parse_config(text: str) -> RunConfig:
    """Parse the INI text of a run configuration

    Args:
        text (str): The INI document
    Returns:
        RunConfig: The validated configuration
    Raises:
        ConfigError: Unknown section or key, missing `[env] name`, bad value"""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as ex:
        raise ConfigError("config", f"unparseable file ({ex})") from ex
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(section, "unknown section")
    if not parser.has_option("env", "name"):
        raise ConfigError("env.name", "required field is missing")

    types = {item.name: item.type for item in fields(TrainConfig)}
    train_values: Dict[str, Any] = {}
    run_values: Dict[str, Any] = {}
    env_params: Dict[str, Any] = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            where = f"{section}.{key}"
            if section == "env":
                if key != "name":
                    env_params[key] = _parse_env_value(raw)
            elif section == "run" and key in RUN_KEYS:
                run_values[key] = raw
            elif TRAIN_SECTIONS.get(key) == section:
                cast = int if types[key] in (int, "int") else float
                try:
                    train_values[key] = cast(raw)
                except ValueError:
                    raise ConfigError(where, f"expected {cast.__name__}; got {raw!r}") from None
            else:
                raise ConfigError(where, "unknown key")

    config = RunConfig(
        env_name=parser.get("env", "name").strip(),
        env_params=env_params,
        algorithm=run_values.get("algorithm", "mgan"),
        train=TrainConfig(**train_values),
        out_dir=run_values.get("out_dir", "runs/default"),
        checkpoint=run_values.get("checkpoint"),
    )
    config.validate()
    return config


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read and parse a run configuration file

    Raises:
        ConfigError: When the file is missing or invalid"""
    if not is_valid_file(path):
        raise ConfigError("config", f"file not found: {path}")
    return parse_config(resolve_path(path).read_text(encoding="utf-8"))
