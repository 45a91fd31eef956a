#!/usr/bin/env python3
# -*- coding: utf-8 -*-
""" Unittest class """

import json
import os
import sys
import unittest
from pathlib import Path
from tempfile import NamedTemporaryFile

import numpy as np

this_dir = Path(__file__).parent
sys.path.insert(0, str(this_dir))
sys.path.insert(0, str(this_dir.parent))

from mgan.agents import AgentQNetwork
from mgan.autodiff import ParameterTree
from mgan.envs import EnvSpec, SkirmishConfig, SkirmishGrid, TwoStepGame
from mgan.exceptions import DimensionError, InitializationError, ReplayBufferError
from mgan.learning import Episode, EpisodeBatch, Learner, ReplayBuffer, TrainConfig
from mgan.learning.episode import collect_episode, discounted_returns, write_trace
from tests.utilities import random_episode

DELETE_TEMP_FILES = True


def _agent(env, seed: int = 0):
    agent = AgentQNetwork(env.spec.obs_dim, env.spec.n_actions, env.spec.n_agents, 8)
    params = ParameterTree()
    agent.init_params(params, np.random.default_rng(seed))
    return agent, params


class TestEpisode(unittest.TestCase):
    """Test episodes, batches and collection"""

    def test_discounted_returns(self):
        """returns accumulate backwards"""
        np.testing.assert_allclose(discounted_returns([1.0, 1.0, 1.0], 0.5), [1.75, 1.5, 1.0])
        np.testing.assert_allclose(discounted_returns([2.0, 3.0], 0.0), [2.0, 3.0])
        self.assertEqual(len(discounted_returns([], 0.9)), 0)

    def test_discounted_returns_match_td_unrolling(self):
        """targets bootstrapped on the realised continuation unroll into the return"""
        gamma = 0.9
        spec = EnvSpec(n_agents=2, n_actions=3, obs_dim=3, state_dim=4, horizon=6)
        learner = Learner.create("vdn", spec, TrainConfig(agent_hidden=8, gamma=gamma), np.random.default_rng(8))
        ep = random_episode(np.random.default_rng(9), 6, 2, 3, 4, 3)
        batch = EpisodeBatch([ep])
        frozen = learner.params.copy()
        frozen.set("agent.fc2.weight", np.zeros_like(frozen["agent.fc2.weight"]))
        unrolled = np.zeros(len(ep))
        continuation = 0.0
        for t in range(len(ep) - 1, -1, -1):
            # every agent values every action at continuation / n, so the VDN sum is the continuation
            frozen.set("agent.fc2.bias", np.full(spec.n_actions, continuation / spec.n_agents))
            continuation = float(learner.td_targets(batch, target_params=frozen)[0, t])
            unrolled[t] = continuation
        np.testing.assert_allclose(unrolled, discounted_returns(ep.rewards, gamma), rtol=1e-12, atol=1e-12)

    def test_inconsistent_lengths(self):
        """per step arrays need one more row than transitions"""
        ep = random_episode(np.random.default_rng(0), 3, 2, 3, 4, 3)
        self.assertRaises(
            DimensionError,
            lambda: Episode(
                ep.obs[:-1], ep.state, ep.avail, ep.alive, ep.actions, ep.rewards, ep.terminated, ep.truncated
            ),
        )

    def test_batch_padding(self):
        """shorter episodes are zero padded and marked unfilled"""
        rng = np.random.default_rng(1)
        eps = [random_episode(rng, steps, 2, 3, 4, 3) for steps in (1, 3)]
        batch = EpisodeBatch(eps)
        self.assertEqual(len(batch), 2)
        self.assertEqual(batch.max_steps, 3)
        self.assertEqual(batch.obs.shape, (2, 4, 2, 3))
        self.assertEqual(batch.actions.shape, (2, 3, 2))
        np.testing.assert_array_equal(batch.filled, [[1, 0, 0], [1, 1, 1]])
        np.testing.assert_array_equal(batch.obs[0, 2:], 0.0)
        np.testing.assert_array_equal(batch.alive[0, 2:], 0.0)
        np.testing.assert_array_equal(batch.rewards[0, :1], eps[0].rewards)
        last = batch.last_actions()
        self.assertEqual(last.shape, (2, 4, 2))
        np.testing.assert_array_equal(last[:, 0], -1)
        np.testing.assert_array_equal(last[1, 1:], eps[1].actions)

    def test_empty_batch(self):
        """a batch needs episodes"""
        self.assertRaises(ValueError, lambda: EpisodeBatch([]))

    def test_collect_two_step(self):
        """collection records the whole trajectory"""
        env = TwoStepGame()
        agent, params = _agent(env)
        ep = collect_episode(env, agent, params, 0.0)
        self.assertEqual(len(ep), 2)
        self.assertEqual(ep.obs.shape, (3, 2, 5))
        np.testing.assert_array_equal(ep.terminated, [0.0, 1.0])
        np.testing.assert_array_equal(ep.truncated, [0.0, 0.0])
        self.assertIsNone(ep.health)
        self.assertIn(ep.total_return, (0.0, 1.0, 7.0, 8.0))

    def test_collect_deterministic(self):
        """greedy collection with a seeded environment repeats exactly"""
        env = SkirmishGrid(SkirmishConfig(n_allies=3, n_enemies=2, horizon=10))
        agent, params = _agent(env, 1)
        first = collect_episode(env, agent, params, 0.0, seed=5)
        second = collect_episode(env, agent, params, 0.0, seed=5)
        np.testing.assert_array_equal(first.actions, second.actions)
        np.testing.assert_array_equal(first.obs, second.obs)
        self.assertEqual(first.health.shape, (len(first) + 1, 3))
        self.assertLessEqual(len(first), 10)

    def test_collect_truncation(self):
        """a horizon cut marks the last step truncated"""
        env = SkirmishGrid(SkirmishConfig(n_allies=2, n_enemies=1, attack_range=1, horizon=1))
        agent, params = _agent(env, 2)
        ep = collect_episode(env, agent, params, 0.0, seed=0)
        self.assertEqual(len(ep), 1)
        np.testing.assert_array_equal(ep.truncated, [1.0])
        np.testing.assert_array_equal(ep.terminated, [0.0])

    def test_write_trace(self):
        """one JSON line per transition"""
        ep = random_episode(np.random.default_rng(3), 3, 2, 3, 4, 3)
        with NamedTemporaryFile(dir=os.getcwd(), suffix=".jsonl", delete=DELETE_TEMP_FILES) as fobj:
            write_trace(ep, fobj.name)
            with open(fobj.name, encoding="utf-8") as fp:
                rows = [json.loads(line) for line in fp]
        self.assertEqual(len(rows), 3)
        self.assertEqual(rows[2]["t"], 2)
        self.assertTrue(rows[2]["terminated"])
        self.assertEqual(rows[0]["actions"], ep.actions[0].tolist())


class TestReplayBuffer(unittest.TestCase):
    """Test the episode replay buffer"""

    def test_init(self):
        """capacity must be positive"""
        buffer = ReplayBuffer(3)
        self.assertEqual(buffer.capacity, 3)
        self.assertEqual(len(buffer), 0)
        self.assertRaises(InitializationError, lambda: ReplayBuffer(0))

    def test_eviction(self):
        """the oldest episode leaves first"""
        rng = np.random.default_rng(4)
        buffer = ReplayBuffer(2)
        eps = [random_episode(rng, 1, 2, 3, 4, 3) for _ in range(3)]
        for ep in eps:
            buffer.add(ep)
        self.assertEqual(len(buffer), 2)
        self.assertEqual(buffer.episodes_added, 3)
        self.assertEqual([id(ep) for ep in buffer], [id(ep) for ep in eps[1:]])

    def test_sample(self):
        """samples are distinct stored episodes"""
        rng = np.random.default_rng(5)
        buffer = ReplayBuffer(10)
        for steps in range(1, 6):
            buffer.add(random_episode(rng, steps, 2, 3, 4, 3))
        batch = buffer.sample(5, np.random.default_rng(6))
        self.assertEqual(sorted(len(ep) for ep in batch.episodes), [1, 2, 3, 4, 5])
        self.assertTrue(buffer.can_sample(5))
        self.assertFalse(buffer.can_sample(6))

    def test_sample_errors(self):
        """too few episodes or a bad size raise"""
        buffer = ReplayBuffer(10)
        buffer.add(random_episode(np.random.default_rng(7), 1, 2, 3, 4, 3))
        self.assertRaises(ReplayBufferError, lambda: buffer.sample(2, np.random.default_rng(0)))
        self.assertRaises(ValueError, lambda: buffer.sample(0, np.random.default_rng(0)))


if __name__ == "__main__":
    unittest.main()
