#!/usr/bin/env python3
# -*- coding: utf-8 -*-
""" Unittest class """

import itertools
import sys
import unittest
from pathlib import Path

import numpy as np

this_dir = Path(__file__).parent
sys.path.insert(0, str(this_dir))
sys.path.insert(0, str(this_dir.parent))

from mgan.autodiff import ParameterTree, Tape, mul, reduce_sum
from mgan.exceptions import DegenerateMaskError
from mgan.mixers import MganMixer, QmixMixer, VdnMixer, graph_value, hyper_mix, make_mixer, vdn_mix

N_AGENTS = 3
OBS_DIM = 4
STATE_DIM = 5


def _mixer(algorithm: str = "mgan", seed: int = 0, n_graphs: int = 2):
    mixer = make_mixer(algorithm, N_AGENTS, OBS_DIM, STATE_DIM, n_graphs=n_graphs, embed_dim=4, mixing_embed=6)
    params = ParameterTree()
    mixer.init_params(params, np.random.default_rng(seed))
    return mixer, params


def _inputs(seed: int, batch: int = 4):
    rng = np.random.default_rng(seed)
    return (
        rng.normal(size=(batch, N_AGENTS)),
        rng.normal(size=(batch, N_AGENTS, OBS_DIM)),
        rng.normal(size=(batch, STATE_DIM)),
    )


def _q_tot(mixer, params, q, obs, state, alive):
    tape = Tape(params, record=False)
    return mixer.forward(tape, tape.constant(q), obs, state, alive).value


def _softmax(x, mask):
    z = np.where(mask > 0, np.exp(x - np.max(x[mask > 0])), 0.0)
    return z / z.sum()


class TestGraphValue(unittest.TestCase):
    """Test the per-graph credit assignment"""

    def _value(self, q, c, alive):
        tape = Tape()
        return float(graph_value(tape.constant(q), tape.constant(c), np.asarray(alive)).value)

    def test_uniform(self):
        """equal scalars average the individual values"""
        self.assertAlmostEqual(self._value([1.0, 2.0, 3.0], [0.5, 0.5, 0.5], [1, 1, 1]), 2.0)

    def test_peaked(self):
        """a dominant scalar concentrates the credit"""
        expected = float(np.dot(_softmax(np.array([10.0, 0.0, 0.0]), np.ones(3)), [1.0, 2.0, 3.0]))
        res = self._value([1.0, 2.0, 3.0], [10.0, 0.0, 0.0], [1, 1, 1])
        self.assertAlmostEqual(res, expected, places=12)
        self.assertAlmostEqual(res, 1.000136, places=5)

    def test_single_agent(self):
        """one agent gets all the credit"""
        self.assertAlmostEqual(self._value([4.5], [-7.0], [1]), 4.5)

    def test_dead_agents_excluded(self):
        """dead agents get no credit"""
        self.assertAlmostEqual(self._value([1.0, 100.0, 3.0], [0.0, 0.0, 0.0], [1, 0, 1]), 2.0)

    def test_nobody_alive(self):
        """an empty alive mask raises unless allowed"""
        self.assertRaises(DegenerateMaskError, lambda: self._value([1.0, 2.0], [0.0, 0.0], [0, 0]))


class TestHyperMix(unittest.TestCase):
    """Test the positive hypernetwork combination"""

    def test_zero_params(self):
        """zero hypernetwork parameters give zero"""
        _, params = _mixer()
        zeros = params.zeros_like()
        tape = Tape(zeros, record=False)
        res = hyper_mix(tape, tape.constant(np.ones((2, STATE_DIM))), tape.constant(np.ones((2, 2)) * 3.0))
        np.testing.assert_array_equal(res.value, [0.0, 0.0])

    def test_forced_unit_weights(self):
        """unit weights and zero bias sum the graph values"""
        _, params = _mixer()
        params = params.zeros_like()
        params.set("hyper.w.bias", np.ones(2))
        tape = Tape(params, record=False)
        res = hyper_mix(tape, tape.constant(np.ones((1, STATE_DIM))), tape.constant([[1.5, -0.5]]))
        np.testing.assert_allclose(res.value, [1.0])


class TestMganMixer(unittest.TestCase):
    """Test the composed multi-graph mixer"""

    def test_parameter_layout(self):
        """graph networks, transform and hypernetwork"""
        _, params = _mixer(n_graphs=3)
        self.assertEqual(params["hyper.w.weight"].shape, (3, STATE_DIM))
        self.assertEqual(params["hyper.b.weight"].shape, (1, STATE_DIM))
        self.assertTrue("graph.2.layers.1.mlp.bias" in params)
        self.assertTrue("transform.bias" in params)

    def test_closed_form(self):
        """the composed forward equals the closed form"""
        mixer, params = _mixer(seed=1)
        q, obs, state = _inputs(2)
        alive = np.array([[1, 1, 1], [1, 0, 1], [0, 0, 1], [1, 1, 0]])
        tape = Tape(params, record=False)
        scalars = mixer.embed(tape, obs, alive).scalar_values()
        res = _q_tot(mixer, params, q, obs, state, alive)
        for b in range(4):
            w = np.abs(params["hyper.w.weight"] @ state[b] + params["hyper.w.bias"])
            bias = float(params["hyper.b.weight"][0] @ state[b] + params["hyper.b.bias"][0])
            q_graphs = [float(np.dot(_softmax(scalars[g, b], alive[b]), q[b])) for g in range(2)]
            self.assertAlmostEqual(float(res[b]), float(np.dot(w, q_graphs)) + bias, delta=1e-10)

    def test_constant_values(self):
        """equal individual values k give k times the weight sum plus the bias"""
        mixer, params = _mixer(seed=3)
        _, obs, state = _inputs(4)
        alive = np.ones((4, N_AGENTS))
        res = _q_tot(mixer, params, np.full((4, N_AGENTS), 2.5), obs, state, alive)
        w = np.abs(state @ params["hyper.w.weight"].T + params["hyper.w.bias"])
        bias = state @ params["hyper.b.weight"][0] + params["hyper.b.bias"][0]
        np.testing.assert_allclose(res, 2.5 * w.sum(axis=1) + bias, atol=1e-10)

    def test_padding_row(self):
        """a row without live agents mixes to the bias"""
        mixer, params = _mixer(seed=5)
        q, obs, state = _inputs(6, batch=1)
        res = _q_tot(mixer, params, q, obs, state, np.zeros((1, N_AGENTS)))
        bias = state[0] @ params["hyper.b.weight"][0] + params["hyper.b.bias"][0]
        self.assertAlmostEqual(float(res[0]), float(bias), delta=1e-12)

    def test_vdn_reduction(self):
        """equal scalars and unit weights give G/n times the VDN sum"""
        mixer, params = _mixer(seed=7, n_graphs=4)
        params.set("transform.weight", np.zeros_like(params["transform.weight"]))
        params.set("hyper.w.weight", np.zeros_like(params["hyper.w.weight"]))
        params.set("hyper.w.bias", np.ones(4))
        params.set("hyper.b.weight", np.zeros_like(params["hyper.b.weight"]))
        params.set("hyper.b.bias", np.zeros(1))
        q, obs, state = _inputs(8)
        res = _q_tot(mixer, params, q, obs, state, np.ones((4, N_AGENTS)))
        np.testing.assert_allclose(res, 4.0 / N_AGENTS * q.sum(axis=1), atol=1e-12)

    def test_every_parameter_gets_gradient(self):
        """all mixer parameters take part in the gradient"""
        mixer, params = _mixer(seed=9)
        q, obs, state = _inputs(10)
        tape = Tape(params)
        out = mixer.forward(tape, tape.constant(q), obs, state, np.ones((4, N_AGENTS)))
        grads = tape.gradient(reduce_sum(mul(out, tape.constant([1.0, -0.5, 2.0, 0.7]))))
        for name in params.trainable_names():
            self.assertTrue(np.any(grads[name] != 0.0), name)


class TestMonotonicity(unittest.TestCase):
    """Test monotonicity and the greedy decomposition of the mixers"""

    def _q_gradient(self, mixer, params, q, obs, state, alive):
        tree = params.copy()
        tree.add("q", q)
        tape = Tape(tree)
        out = mixer.forward(tape, tape.parameter("q"), obs, state, alive)
        return tape.gradient(reduce_sum(out))["q"]

    def test_monotone(self):
        """dQ_tot/dQ_a is never negative"""
        for algorithm in ("mgan", "qmix"):
            mixer, params = _mixer(algorithm, seed=11)
            rng = np.random.default_rng(12)
            for _ in range(200):
                q = rng.normal(size=(5, N_AGENTS)) * 3.0
                obs = rng.normal(size=(5, N_AGENTS, OBS_DIM))
                state = rng.normal(size=(5, STATE_DIM)) * 2.0
                alive = (rng.random(size=(5, N_AGENTS)) < 0.8).astype(float)
                grad = self._q_gradient(mixer, params, q, obs, state, alive)
                self.assertGreaterEqual(float(grad.min()), 0.0, algorithm)

    def test_greedy_decomposition(self):
        """the joint maximum is reached at the per-agent maxima"""
        for algorithm in ("mgan", "qmix", "vdn"):
            rng = np.random.default_rng(14)
            for n_agents, n_actions in itertools.product((2, 3), (2, 3, 4)):
                joint = np.array(list(itertools.product(range(n_actions), repeat=n_agents)))
                for _ in range(200):
                    mixer = make_mixer(algorithm, n_agents, OBS_DIM, STATE_DIM, n_graphs=2, embed_dim=4, mixing_embed=6)
                    params = ParameterTree()
                    mixer.init_params(params, rng)
                    table = rng.normal(size=(n_agents, n_actions)) * 2.0
                    obs = rng.normal(size=(1, n_agents, OBS_DIM))
                    state = rng.normal(size=(1, STATE_DIM))
                    alive = np.ones((1, n_agents))
                    values = _q_tot(
                        mixer,
                        params,
                        table[np.arange(n_agents), joint],
                        np.repeat(obs, len(joint), axis=0),
                        np.repeat(state, len(joint), axis=0),
                        np.repeat(alive, len(joint), axis=0),
                    )
                    at_greedy = _q_tot(mixer, params, table.max(axis=1)[None], obs, state, alive)
                    msg = f"{algorithm} n={n_agents} |U|={n_actions}"
                    self.assertLessEqual(float(values.max()), float(at_greedy[0]) + 1e-9, msg)


class TestBaselines(unittest.TestCase):
    """Test the VDN and QMIX mixers"""

    def test_vdn(self):
        """the sum of the individual values with unit gradients"""
        tree = ParameterTree()
        tree.add("q", [[1.0, 2.0, 3.0]])
        tape = Tape(tree)
        out = vdn_mix(tape.parameter("q"))
        np.testing.assert_array_equal(out.value, [6.0])
        np.testing.assert_array_equal(tape.gradient(reduce_sum(out))["q"], [[1.0, 1.0, 1.0]])

    def test_vdn_mixer(self):
        """VDN has no parameters"""
        mixer = VdnMixer()
        params = ParameterTree()
        mixer.init_params(params, np.random.default_rng(0))
        self.assertEqual(len(params), 0)
        self.assertEqual(mixer.name, "vdn")

    def test_qmix_layout(self):
        """QMIX hypernetwork shapes"""
        mixer, params = _mixer("qmix")
        self.assertIsInstance(mixer, QmixMixer)
        self.assertEqual(params["qmix.hyper_w1.weight"].shape, (N_AGENTS * 6, STATE_DIM))
        self.assertEqual(params["qmix.v.1.weight"].shape, (1, 6))
        q, obs, state = _inputs(15)
        self.assertEqual(_q_tot(mixer, params, q, obs, state, np.ones((4, N_AGENTS))).shape, (4,))

    def test_make_mixer(self):
        """mixer factory"""
        self.assertIsInstance(_mixer("mgan")[0], MganMixer)
        self.assertRaises(ValueError, lambda: make_mixer("coma", 2, 2, 2))


if __name__ == "__main__":
    unittest.main()
