""" Command-line entry points: train, eval and analyze
    License: MIT
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from mgan.analysis.export import analyze, weight_health_correlation, write_analysis_csv, write_pca_csv
from mgan.autodiff.checkpoint import Checkpoint
from mgan.envs import CoopEnv, make_env
from mgan.exceptions import (
    CheckpointError,
    CheckpointMismatchError,
    ConfigError,
    InitializationError,
    MganBaseException,
)
from mgan.learning.config import RunConfig, load_config
from mgan.learning.episode import collect_episode, write_trace
from mgan.learning.learner import Learner
from mgan.learning.runner import evaluate, train
from mgan.mixers.mgan import MganMixer
from mgan.utilities import resolve_path

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_MISMATCH = 3


def build_parser() -> argparse.ArgumentParser:
    """The `mgan` argument parser"""
    parser = argparse.ArgumentParser(prog="mgan", description="Multi-graph attention value decomposition")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    commands = parser.add_subparsers(dest="command", required=True)

    cmd = commands.add_parser("train", help="train from a configuration file")
    cmd.add_argument("--config", required=True, help="INI run configuration")
    cmd.add_argument("--seed", type=int, default=None, help="override the configured seed")
    cmd.add_argument("--out", default=None, help="override the configured output directory")

    cmd = commands.add_parser("eval", help="greedy evaluation of a checkpoint")
    cmd.add_argument("--ckpt", required=True, help="checkpoint file")
    cmd.add_argument("--env", required=True, help="environment name")
    cmd.add_argument("--episodes", type=int, required=True, help="number of episodes")
    cmd.add_argument("--seed", type=int, default=0, help="seed of the first episode")
    cmd.add_argument("--out", default=None, help="also write the metrics JSON to this file")
    cmd.add_argument("--trace", default=None, help="write a JSON-lines trace of the first episode to this file")

    cmd = commands.add_parser("analyze", help="export credit weights, embeddings and their PCA projection")
    cmd.add_argument("--ckpt", required=True, help="checkpoint file")
    cmd.add_argument("--env", required=True, help="environment name")
    cmd.add_argument("--episodes", type=int, required=True, help="number of episodes")
    cmd.add_argument("--out", required=True, help="output directory")
    cmd.add_argument("--seed", type=int, default=0, help="seed of the first episode")
    return parser


def load_learner(ckpt_path: str, env_name: str) -> Tuple[Learner, CoopEnv, RunConfig]:
    """Rebuild the stored architecture for `env_name` and load the checkpoint into it

    Raises:
        CheckpointMismatchError: When the checkpoint does not fit the environment's architecture"""
    checkpoint = Checkpoint.load(ckpt_path)
    stored = checkpoint.metadata.get("config")
    if stored is None:
        raise CheckpointError(f"{ckpt_path}: no stored configuration")
    config = RunConfig.from_dict(stored)
    params = config.env_params if env_name == config.env_name else {}
    try:
        env = make_env(env_name, **params)
    except InitializationError as ex:
        raise ConfigError("env", ex.message) from ex
    learner = Learner.create(config.algorithm, env.spec, config.train, np.random.default_rng(0))
    learner.restore(checkpoint)
    return learner, env, config


def cmd_train(args: argparse.Namespace) -> int:
    """Train and write metrics, checkpoints and the resolved configuration"""
    config = load_config(args.config).with_overrides(seed=args.seed, out_dir=args.out)
    try:
        make_env(config.env_name, **config.env_params)
    except InitializationError as ex:
        raise ConfigError("env", ex.message) from ex
    result = train(config, out_dir=config.out_dir)
    final = result.metrics[-1]
    print(json.dumps({"out_dir": str(resolve_path(config.out_dir)), **final}))
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    """Greedy evaluation of a checkpoint"""
    if args.episodes <= 0:
        raise ConfigError("episodes", f"must be positive; got {args.episodes}")
    learner, env, _ = load_learner(args.ckpt, args.env)
    result = evaluate(env, learner.agent, learner.params, args.episodes, args.seed)
    text = json.dumps(result.to_dict())
    if args.out is not None:
        Path(resolve_path(args.out)).write_text(text + "\n", encoding="utf-8")
    if args.trace is not None:
        write_trace(collect_episode(env, learner.agent, learner.params, 0.0, seed=args.seed), args.trace)
        logger.info("wrote the trace of episode seed %d to %s", args.seed, args.trace)
    print(text)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    """Write analysis.csv and pca.csv for greedy episodes"""
    if args.episodes <= 0:
        raise ConfigError("episodes", f"must be positive; got {args.episodes}")
    learner, env, config = load_learner(args.ckpt, args.env)
    if not isinstance(learner.mixer, MganMixer):
        raise ConfigError("run.algorithm", f"analyze needs an mgan checkpoint; got {config.algorithm}")
    records, projections = analyze(env, learner.agent, learner.mixer, learner.params, args.episodes, args.seed)
    out = resolve_path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_analysis_csv(records, out / "analysis.csv")
    write_pca_csv(projections, out / "pca.csv")
    correlation = weight_health_correlation(records)
    print(json.dumps({"rows": len(records), "weight_hp_correlation": {str(g): c for g, c in correlation.items()}}))
    return EXIT_OK


COMMANDS = {"train": cmd_train, "eval": cmd_eval, "analyze": cmd_analyze}


def main(argv: Optional[List[str]] = None) -> int:
    """Run a command; returns the process exit code"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as ex:
        print(f"configuration error: {ex}", file=sys.stderr)
        return EXIT_CONFIG
    except CheckpointMismatchError as ex:
        print(str(ex), file=sys.stderr)
        return EXIT_MISMATCH
    except CheckpointError as ex:
        print(f"checkpoint error: {ex}", file=sys.stderr)
        return EXIT_ERROR
    except (MganBaseException, ValueError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
