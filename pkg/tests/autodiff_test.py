#!/usr/bin/env python3
# -*- coding: utf-8 -*-
""" Unittest class """

import sys
import unittest
from pathlib import Path

import numpy as np

this_dir = Path(__file__).parent
sys.path.insert(0, str(this_dir))
sys.path.insert(0, str(this_dir.parent))

from mgan.autodiff import (
    ParameterTree,
    Tape,
    absolute,
    add,
    backward,
    concat,
    elu,
    gru_cell,
    linear,
    masked_softmax,
    matmul,
    mul,
    reduce_sum,
    relu,
    reshape,
    scale,
    sigmoid,
    stack,
    sub,
    take_along,
    tanh,
    transpose,
)
from mgan.exceptions import DegenerateMaskError, DimensionError, NonFiniteError, ParameterError, TapeError
from tests.utilities import max_gradient_error, sample_entries


def _tree(**values) -> ParameterTree:
    tree = ParameterTree()
    for name, value in values.items():
        tree.add(name, value)
    return tree


def _gru_tree(rng: np.random.Generator, in_dim: int, hid: int, zero: bool = False) -> ParameterTree:
    tree = ParameterTree()
    for gate in ("reset", "update", "candidate"):
        for kind, shape in (
            ("weight_ih", (hid, in_dim)),
            ("bias_ih", (hid,)),
            ("weight_hh", (hid, hid)),
            ("bias_hh", (hid,)),
        ):
            tree.add(f"gru.{gate}.{kind}", np.zeros(shape) if zero else rng.normal(size=shape) * 0.5)
    return tree


class TestTape(unittest.TestCase):
    """Test the tape bookkeeping and the backward pass"""

    def test_constant_no_gradient(self):
        """constants are not recorded and get no gradient"""
        tape = Tape(_tree(w=[1.0, 2.0]))
        c = tape.constant([3.0, 4.0])
        self.assertFalse(c.requires_grad)
        out = reduce_sum(c)
        self.assertEqual(len(tape), 0)
        grads = backward(tape, out)
        np.testing.assert_array_equal(grads["w"], [0.0, 0.0])

    def test_constant_non_finite(self):
        """constants holding NaN are rejected"""
        tape = Tape()
        self.assertRaises(NonFiniteError, lambda: tape.constant([1.0, np.nan]))

    def test_parameter_reuse(self):
        """reading a parameter twice returns the same variable"""
        tape = Tape(_tree(w=[1.0]))
        self.assertIs(tape.parameter("w"), tape.parameter("w"))

    def test_unknown_parameter(self):
        """unknown parameter names raise"""
        tape = Tape(_tree(w=[1.0]))
        self.assertRaises(ParameterError, lambda: tape.parameter("v"))

    def test_frozen_parameter(self):
        """frozen parameters take part in the forward pass only"""
        tree = _tree(w=[2.0], v=[3.0])
        tree.freeze("v")
        tape = Tape(tree)
        out = reduce_sum(mul(tape.parameter("w"), tape.parameter("v")))
        grads = backward(tape, out)
        self.assertEqual(list(grads), ["w"])
        np.testing.assert_allclose(grads["w"], [3.0])

    def test_no_record(self):
        """a non-recording tape computes values without records"""
        tape = Tape(_tree(w=[1.0, -1.0]), record=False)
        out = relu(tape.parameter("w"))
        np.testing.assert_array_equal(out.value, [1.0, 0.0])
        self.assertFalse(out.requires_grad)
        self.assertEqual(len(tape), 0)

    def test_unused_parameter_zero_grad(self):
        """parameters that do not reach the output get zeros"""
        tape = Tape(_tree(w=[1.0], unused=[[1.0, 2.0]]))
        grads = backward(tape, reduce_sum(scale(tape.parameter("w"), 3.0)))
        np.testing.assert_array_equal(grads["unused"], np.zeros((1, 2)))
        np.testing.assert_allclose(grads["w"], [3.0])

    def test_backward_consumes(self):
        """a tape cannot be reused after backward"""
        tape = Tape(_tree(w=[1.0]))
        out = reduce_sum(tape.parameter("w"))
        backward(tape, out)
        self.assertTrue(tape.consumed)
        self.assertRaises(TapeError, lambda: backward(tape, out))
        self.assertRaises(TapeError, lambda: tape.constant(1.0))

    def test_backward_non_scalar(self):
        """backward needs a single element output"""
        tape = Tape(_tree(w=[1.0, 2.0]))
        self.assertRaises(TapeError, lambda: backward(tape, tape.parameter("w")))

    def test_backward_foreign_output(self):
        """the output must come from the tape"""
        tape1 = Tape(_tree(w=[1.0]))
        tape2 = Tape(_tree(w=[1.0]))
        out = reduce_sum(tape2.parameter("w"))
        self.assertRaises(TapeError, lambda: backward(tape1, out))

    def test_mixed_tapes(self):
        """ops reject inputs from two tapes"""
        tape1 = Tape(_tree(w=[1.0]))
        tape2 = Tape(_tree(w=[1.0]))
        self.assertRaises(TapeError, lambda: add(tape1.parameter("w"), tape2.parameter("w")))

    def test_op_names(self):
        """recorded op names come back in order"""
        tape = Tape(_tree(w=[1.0, -2.0]))
        reduce_sum(relu(tape.parameter("w")))
        self.assertEqual(tape.op_names(), ["relu", "reduce_sum"])
        self.assertEqual(tape.op_count("relu"), 1)

    def test_fan_out_accumulates(self):
        """a value used twice accumulates both adjoints"""
        tape = Tape(_tree(w=[3.0]))
        w = tape.parameter("w")
        grads = backward(tape, reduce_sum(mul(w, w)))
        np.testing.assert_allclose(grads["w"], [6.0])


class TestOps(unittest.TestCase):
    """Test the primitive ops against known values and finite differences"""

    def check_op(self, tree, build, count=50, tol=1e-5, seed=0):
        """finite-difference check of `sum(build(tape) * projection)`"""
        rng = np.random.default_rng(seed)
        shape = build(Tape(tree, record=False)).shape
        projection = rng.normal(size=shape)

        def func(params):
            tape = Tape(params, record=False)
            return float(np.sum(build(tape).value * projection))

        tape = Tape(tree)
        out = reduce_sum(mul(build(tape), tape.constant(projection)))
        grads = backward(tape, out)
        entries = sample_entries(tree, count, rng)
        self.assertLess(max_gradient_error(func, grads, tree, entries), tol)

    def test_linear_value(self):
        """linear computes x W^T + b"""
        tape = Tape(_tree(x=[[1.0, 2.0]], w=[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], b=[0.5, 0.0, -1.0]))
        out = linear(tape.parameter("x"), tape.parameter("w"), tape.parameter("b"))
        np.testing.assert_allclose(out.value, [[1.5, 2.0, 2.0]])

    def test_linear_bad_shapes(self):
        """linear checks the inner dimensions"""
        tape = Tape(_tree(x=[[1.0, 2.0]], w=[[1.0, 0.0, 1.0]]))
        self.assertRaises(DimensionError, lambda: linear(tape.parameter("x"), tape.parameter("w")))

    def test_linear_gradient(self):
        """linear gradients match finite differences"""
        rng = np.random.default_rng(1)
        tree = _tree(x=rng.normal(size=(2, 3, 4)), w=rng.normal(size=(5, 4)), b=rng.normal(size=5))
        self.check_op(tree, lambda t: linear(t.parameter("x"), t.parameter("w"), t.parameter("b")))

    def test_smooth_gradients(self):
        """sigmoid, tanh and elu gradients match finite differences"""
        rng = np.random.default_rng(2)
        tree = _tree(x=rng.normal(size=(3, 4)))
        for fn in (sigmoid, tanh, elu):
            self.check_op(tree, lambda t, fn=fn: fn(t.parameter("x")))

    def test_relu_value(self):
        """relu zeroes negatives"""
        tape = Tape(_tree(x=[-1.0, 0.0, 2.0]))
        np.testing.assert_array_equal(relu(tape.parameter("x")).value, [0.0, 0.0, 2.0])

    def test_relu_absolute_gradient(self):
        """relu and abs gradients away from the kink"""
        tree = _tree(x=[-1.5, 0.7, 2.0, -0.3])
        self.check_op(tree, lambda t: relu(t.parameter("x")))
        self.check_op(tree, lambda t: absolute(t.parameter("x")))

    def test_binary_broadcast_gradients(self):
        """add, sub and mul reduce the adjoint back to the input shapes"""
        rng = np.random.default_rng(3)
        tree = _tree(a=rng.normal(size=(2, 3, 4)), b=rng.normal(size=(3, 1)))
        for fn in (add, sub, mul):
            self.check_op(tree, lambda t, fn=fn: fn(t.parameter("a"), t.parameter("b")))

    def test_binary_bad_shapes(self):
        """non broadcastable operands raise"""
        tape = Tape(_tree(a=np.zeros(3), b=np.zeros(4)))
        self.assertRaises(DimensionError, lambda: add(tape.parameter("a"), tape.parameter("b")))

    def test_matmul_transpose_gradient(self):
        """batched matmul with a transposed operand"""
        rng = np.random.default_rng(4)
        tree = _tree(a=rng.normal(size=(2, 3, 4)), b=rng.normal(size=(2, 5, 4)))
        self.check_op(tree, lambda t: matmul(t.parameter("a"), transpose(t.parameter("b"))))

    def test_matmul_bad_shapes(self):
        """matmul needs matching batch dimensions"""
        tape = Tape(_tree(a=np.zeros((2, 3, 4)), b=np.zeros((3, 4, 5))))
        self.assertRaises(DimensionError, lambda: matmul(tape.parameter("a"), tape.parameter("b")))

    def test_reshape_reduce_gradient(self):
        """reshape and partial sums"""
        rng = np.random.default_rng(5)
        tree = _tree(x=rng.normal(size=(2, 6)))
        self.check_op(tree, lambda t: reduce_sum(reshape(t.parameter("x"), (2, 3, 2)), axis=1))
        self.check_op(tree, lambda t: reduce_sum(t.parameter("x"), axis=-1, keepdims=True))

    def test_reshape_bad(self):
        """reshape keeps the element count"""
        tape = Tape(_tree(x=np.zeros(6)))
        self.assertRaises(DimensionError, lambda: reshape(tape.parameter("x"), (4, 2)))

    def test_concat(self):
        """concat joins the last axis and splits the adjoint"""
        rng = np.random.default_rng(6)
        tree = _tree(a=rng.normal(size=(2, 3)), b=rng.normal(size=(2, 2)))
        tape = Tape(tree, record=False)
        out = concat(tape.parameter("a"), tape.parameter("b"))
        self.assertEqual(out.shape, (2, 5))
        np.testing.assert_array_equal(out.value[:, 3:], tree["b"])
        self.check_op(tree, lambda t: concat(t.parameter("a"), t.parameter("b")))

    def test_concat_bad(self):
        """concat needs equal leading dimensions"""
        tape = Tape(_tree(a=np.zeros((2, 3)), b=np.zeros((3, 3))))
        self.assertRaises(DimensionError, lambda: concat(tape.parameter("a"), tape.parameter("b")))

    def test_stack_take_along_gradient(self):
        """stack and take_along route the adjoint to the picked entries"""
        rng = np.random.default_rng(7)
        tree = _tree(a=rng.normal(size=(2, 3)), b=rng.normal(size=(2, 3)))
        index = np.array([[0, 2], [1, 1]])
        self.check_op(tree, lambda t: take_along(stack([t.parameter("a"), t.parameter("b")], axis=1), index))

    def test_take_along_range(self):
        """out of range indices raise"""
        tape = Tape(_tree(x=np.zeros((2, 3))))
        self.assertRaises(IndexError, lambda: take_along(tape.parameter("x"), np.array([0, 3])))

    def test_masked_softmax_value(self):
        """masked entries get zero probability"""
        tape = Tape(_tree(x=[1.0, 0.0, 5.0]))
        out = masked_softmax(tape.parameter("x"), [1, 1, 0])
        np.testing.assert_allclose(out.value, [0.7310585786, 0.2689414214, 0.0], atol=1e-9)

    def test_masked_softmax_large_logits(self):
        """large logits do not overflow"""
        tape = Tape(_tree(x=[1000.0, 1000.0]))
        out = masked_softmax(tape.parameter("x"), [1, 1])
        np.testing.assert_allclose(out.value, [0.5, 0.5])

    def test_masked_softmax_empty(self):
        """an empty row raises unless allowed, then maps to zeros"""
        tape = Tape(_tree(x=[[1.0, 2.0], [3.0, 4.0]]))
        mask = np.array([[1, 1], [0, 0]])
        self.assertRaises(DegenerateMaskError, lambda: masked_softmax(tape.parameter("x"), mask))
        out = masked_softmax(tape.parameter("x"), mask, allow_empty=True)
        np.testing.assert_array_equal(out.value[1], [0.0, 0.0])
        self.assertAlmostEqual(float(out.value[0].sum()), 1.0)

    def test_masked_softmax_gradient(self):
        """masked softmax gradient; masked logits get none"""
        rng = np.random.default_rng(8)
        tree = _tree(x=rng.normal(size=(3, 4)))
        mask = np.array([[1, 1, 0, 1], [0, 1, 0, 0], [0, 0, 0, 0]])
        self.check_op(tree, lambda t: masked_softmax(t.parameter("x"), mask, allow_empty=True))
        tape = Tape(tree)
        out = reduce_sum(mul(masked_softmax(tape.parameter("x"), mask, allow_empty=True), tape.constant(rng.normal(size=(3, 4)))))
        grads = backward(tape, out)
        np.testing.assert_array_equal(grads["x"][mask == 0], 0.0)

    def test_gru_zero_weights(self):
        """with zero weights the new state is the mean of 0 and h"""
        rng = np.random.default_rng(9)
        tree = _gru_tree(rng, 3, 2, zero=True)
        tree.add("x", rng.normal(size=(1, 3)))
        tree.add("h", [[0.4, -0.8]])
        tape = Tape(tree)
        out = gru_cell(tape.parameter("x"), tape.parameter("h"))
        np.testing.assert_allclose(out.value, [[0.2, -0.4]])

    def test_gru_gradient(self):
        """GRU gradients over weights, input and state"""
        rng = np.random.default_rng(10)
        tree = _gru_tree(rng, 3, 4)
        tree.add("x", rng.normal(size=(2, 3)))
        tree.add("h", rng.normal(size=(2, 4)) * 0.5)
        self.check_op(tree, lambda t: gru_cell(t.parameter("x"), t.parameter("h")), count=60)

    def test_gru_missing_weights(self):
        """a GRU without its parameters raises"""
        tape = Tape(_tree(x=np.zeros((1, 2)), h=np.zeros((1, 2))))
        self.assertRaises(ParameterError, lambda: gru_cell(tape.parameter("x"), tape.parameter("h")))


if __name__ == "__main__":
    unittest.main()
