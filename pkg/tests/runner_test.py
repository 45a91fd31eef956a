#!/usr/bin/env python3
# -*- coding: utf-8 -*-
""" Unittest class """

import json
import sys
import unittest
from dataclasses import replace
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np

this_dir = Path(__file__).parent
sys.path.insert(0, str(this_dir))
sys.path.insert(0, str(this_dir.parent))

from mgan.agents import AgentQNetwork
from mgan.autodiff import Checkpoint, ParameterTree
from mgan.envs import MatrixGame, TwoStepGame
from mgan.learning import Learner, MetricLog, RunConfig, TrainConfig, evaluate, parse_config, train
from mgan.learning.runner import EvalResult
from tests.utilities import calc_file_md5

SMALL = TrainConfig(
    batch_size=2,
    buffer_size=10,
    target_update_period=4,
    agent_hidden=4,
    embed_dim=3,
    n_graphs=2,
    mixing_embed=4,
    epsilon_anneal_steps=10,
    eval_period=5,
    eval_episodes=2,
    save_period=10,
    total_env_steps=20,
    seed=3,
)


def _config(algorithm: str = "mgan", **changes) -> RunConfig:
    return RunConfig(env_name="matrix", algorithm=algorithm, train=replace(SMALL, **changes))


class TestEvaluate(unittest.TestCase):
    """Test greedy evaluation"""

    def test_matrix(self):
        """returns are table entries and wins follow them"""
        env = MatrixGame()
        agent = AgentQNetwork(env.spec.obs_dim, env.spec.n_actions, env.spec.n_agents, 4)
        params = ParameterTree()
        agent.init_params(params, np.random.default_rng(0))
        res = evaluate(env, agent, params, 3)
        self.assertEqual(res.episodes, 3)
        self.assertIn(res.mean_return, (0.0, 10.0))
        self.assertEqual(res.win_rate, res.mean_return / 10.0)
        self.assertEqual(sorted(res.to_dict()), ["episodes", "mean_return", "win_rate"])
        self.assertRaises(ValueError, lambda: evaluate(env, agent, params, 0))


class TestMetricLog(unittest.TestCase):
    """Test the metric writer"""

    def test_records(self):
        """records keep their fields and land in the file"""
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / "metrics.jsonl"
            log = MetricLog(path)
            log.write(10, EvalResult(2.0, 0.5, 2), None, 0.3)
            log.write(20, EvalResult(4.0, 1.0, 2), 0.25, 0.1)
            lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
        self.assertEqual(lines, log.records)
        self.assertIsNone(lines[0]["loss_ma"])
        self.assertEqual(lines[1], {"step": 20, "mean_return": 4.0, "win_rate": 1.0, "loss_ma": 0.25, "epsilon": 0.1})


class TestTrain(unittest.TestCase):
    """Test the training loop"""

    def test_metrics_schedule(self):
        """one record at the start and one per evaluation period"""
        res = train(_config())
        self.assertEqual(res.env_steps, 20)
        self.assertEqual(res.episodes, 20)
        self.assertEqual([rec["step"] for rec in res.metrics], [0, 5, 10, 15, 20])
        self.assertIsNone(res.metrics[0]["loss_ma"])
        self.assertIsNotNone(res.metrics[-1]["loss_ma"])
        self.assertEqual(res.metrics[0]["epsilon"], 1.0)
        self.assertAlmostEqual(res.metrics[-1]["epsilon"], SMALL.epsilon_end)
        self.assertEqual(res.learner.train_steps, 19)

    def test_reproducible(self):
        """equal seeds give equal metrics and parameters"""
        for algorithm in ("mgan", "vdn", "qmix"):
            first = train(_config(algorithm))
            second = train(_config(algorithm))
            self.assertEqual(first.metrics, second.metrics)
            self.assertTrue(first.learner.params.values_equal(second.learner.params))

    def test_reproducible_files(self):
        """equal seeds write byte-identical metric files"""
        for algorithm in ("mgan", "qmix"):
            with TemporaryDirectory() as first, TemporaryDirectory() as second:
                train(_config(algorithm), out_dir=first)
                train(_config(algorithm), out_dir=second)
                self.assertEqual(
                    calc_file_md5(Path(first) / "metrics.jsonl"), calc_file_md5(Path(second) / "metrics.jsonl")
                )
                self.assertTrue(
                    Checkpoint.load(Path(first) / "checkpoint.bin").params.values_equal(
                        Checkpoint.load(Path(second) / "checkpoint.bin").params
                    )
                )

    def test_zero_budget(self):
        """without environment steps the parameters stay at their initialization"""
        res = train(_config(total_env_steps=0))
        self.assertEqual(len(res.metrics), 1)
        self.assertEqual(res.learner.train_steps, 0)
        init = Learner.create("mgan", MatrixGame().spec, SMALL, np.random.default_rng(SMALL.seed))
        self.assertTrue(res.learner.params.values_equal(init.params))

    def test_env_factory(self):
        """a custom environment factory replaces the configured environment"""
        res = train(_config(total_env_steps=6), env_factory=TwoStepGame)
        self.assertEqual(res.env_steps, 6)
        self.assertEqual(res.episodes, 3)

    def test_outputs(self):
        """metrics, checkpoints, the resolved configuration and run information"""
        config = _config()
        with TemporaryDirectory() as tmp:
            res = train(config, out_dir=tmp)
            out = Path(tmp)
            lines = (out / "metrics.jsonl").read_text(encoding="utf-8").splitlines()
            self.assertEqual([json.loads(line) for line in lines], res.metrics)
            self.assertEqual(parse_config((out / "resolved_config.ini").read_text(encoding="utf-8")), config)
            info = json.loads((out / "run_info.json").read_text(encoding="utf-8"))
            self.assertEqual(info["seed"], SMALL.seed)
            self.assertTrue((out / "checkpoints" / "checkpoint_10.bin").exists())
            self.assertTrue((out / "checkpoints" / "checkpoint_20.bin").exists())
            ckpt = Checkpoint.load(out / "checkpoint.bin")
            self.assertTrue(ckpt.params.values_equal(res.learner.params))
            self.assertEqual(RunConfig.from_dict(ckpt.metadata["config"]), config)
            self.assertEqual(ckpt.metadata["env_steps"], 20)

    def test_resume(self):
        """a configured checkpoint is restored before training"""
        with TemporaryDirectory() as tmp:
            first = train(_config(), out_dir=tmp)
            resumed = train(replace(_config(total_env_steps=0), checkpoint=str(Path(tmp) / "checkpoint.bin")))
        self.assertTrue(resumed.learner.params.values_equal(first.learner.params))
        self.assertEqual(resumed.learner.train_steps, first.learner.train_steps)


if __name__ == "__main__":
    unittest.main()
