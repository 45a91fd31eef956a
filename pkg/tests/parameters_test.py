#!/usr/bin/env python3
# -*- coding: utf-8 -*-
""" Unittest class """

import os
import sys
import unittest
from pathlib import Path
from tempfile import NamedTemporaryFile

import numpy as np

this_dir = Path(__file__).parent
sys.path.insert(0, str(this_dir))
sys.path.insert(0, str(this_dir.parent))

from mgan.autodiff import ParameterTree
from mgan.exceptions import CheckpointError, DimensionError, NonFiniteError, ParameterError
from tests.utilities import calc_file_md5

DELETE_TEMP_FILES = True


def _sample_tree() -> ParameterTree:
    tree = ParameterTree()
    tree.add("agent.fc1.weight", np.arange(6, dtype=float).reshape(3, 2))
    tree.add("agent.fc1.bias", [0.5, -0.5, 1.5])
    tree.add("graph.0.scale", 2.0, trainable=False)
    return tree


class TestParameterTree(unittest.TestCase):
    """Test the named parameter store"""

    def test_init(self):
        """an empty tree"""
        tree = ParameterTree()
        self.assertEqual(len(tree), 0)
        self.assertEqual(tree.num_values, 0)
        self.assertEqual(tree.names(), [])

    def test_add_and_lookup(self):
        """entries keep insertion order and shapes"""
        tree = _sample_tree()
        self.assertEqual(len(tree), 3)
        self.assertEqual(tree.num_values, 10)
        self.assertEqual(tree.names(), ["agent.fc1.weight", "agent.fc1.bias", "graph.0.scale"])
        self.assertEqual(tree.trainable_names(), ["agent.fc1.weight", "agent.fc1.bias"])
        self.assertEqual(tree.shapes()["agent.fc1.weight"], (3, 2))
        self.assertEqual(tree["graph.0.scale"].shape, ())
        self.assertTrue("agent.fc1.bias" in tree)
        self.assertFalse("agent.fc2.bias" in tree)
        self.assertEqual(list(tree), tree.names())

    def test_duplicate_name(self):
        """names are unique"""
        tree = _sample_tree()
        self.assertRaises(ParameterError, lambda: tree.add("agent.fc1.bias", [0.0, 0.0, 0.0]))

    def test_unknown_name(self):
        """unknown names raise the library error"""
        tree = _sample_tree()
        self.assertRaises(ParameterError, lambda: tree["missing"])
        self.assertRaises(ParameterError, lambda: tree.is_trainable("missing"))
        self.assertRaises(ParameterError, lambda: tree.freeze("missing"))

    def test_non_finite(self):
        """NaN and Inf are rejected on add and set"""
        tree = _sample_tree()
        self.assertRaises(NonFiniteError, lambda: tree.add("x", [np.inf]))
        self.assertRaises(NonFiniteError, lambda: tree.set("agent.fc1.bias", [0.0, np.nan, 0.0]))

    def test_set_shape(self):
        """set keeps the shape"""
        tree = _sample_tree()
        tree.set("agent.fc1.bias", [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(tree["agent.fc1.bias"], [1.0, 2.0, 3.0])
        self.assertRaises(DimensionError, lambda: tree.set("agent.fc1.bias", [1.0, 2.0]))

    def test_copy_independent(self):
        """copies do not share storage"""
        tree = _sample_tree()
        other = tree.copy()
        self.assertTrue(other.values_equal(tree))
        other.set("agent.fc1.bias", [9.0, 9.0, 9.0])
        self.assertFalse(other.values_equal(tree))
        self.assertTrue(other.structure_equals(tree))
        self.assertFalse(other.is_trainable("graph.0.scale"))

    def test_assign(self):
        """assign copies every value"""
        tree = _sample_tree()
        other = tree.zeros_like()
        self.assertEqual(float(np.sum(other["agent.fc1.weight"])), 0.0)
        other.assign(tree)
        self.assertTrue(other.values_equal(tree))
        self.assertRaises(ParameterError, lambda: other.assign(ParameterTree()))

    def test_diff(self):
        """diff lists missing, extra and reshaped names"""
        tree = _sample_tree()
        other = ParameterTree()
        other.add("agent.fc1.weight", np.zeros((2, 3)))
        other.add("agent.fc2.bias", np.zeros(2))
        missing, extra, mismatched = tree.diff(other)
        self.assertEqual(missing, ["agent.fc1.bias", "graph.0.scale"])
        self.assertEqual(extra, ["agent.fc2.bias"])
        self.assertEqual(mismatched, ["agent.fc1.weight"])

    def test_str(self):
        """the string form lists each entry"""
        msg = str(_sample_tree())
        self.assertTrue(msg.startswith("ParameterTree (10 values):"))
        self.assertIn("\tagent.fc1.weight: [3, 2]", msg)
        self.assertIn("\tgraph.0.scale: [] (frozen)", msg)

    def test_frombytes(self):
        """bytes reload to an equal tree"""
        tree = _sample_tree()
        other = ParameterTree.frombytes(bytes(tree))
        self.assertTrue(other.values_equal(tree))
        self.assertEqual(other.trainable_names(), tree.trainable_names())

    def test_frombytes_errors(self):
        """truncated or padded bytes raise"""
        data = bytes(_sample_tree())
        self.assertRaises(CheckpointError, lambda: ParameterTree.frombytes(data[:-3]))
        self.assertRaises(CheckpointError, lambda: ParameterTree.frombytes(data + b"\x00"))
        self.assertRaises(CheckpointError, lambda: ParameterTree.frombytes(b"\x01"))

    def test_export(self):
        """export to a file matches the bytes export"""
        tree = _sample_tree()
        with NamedTemporaryFile(dir=os.getcwd(), suffix=".params", delete=DELETE_TEMP_FILES) as fobj:
            tree.export(fobj.name)
            with open(fobj.name, "rb") as fp:
                self.assertEqual(fp.read(), bytes(tree))
            md5_val = calc_file_md5(fobj.name)
        with NamedTemporaryFile(dir=os.getcwd(), suffix=".params", delete=DELETE_TEMP_FILES) as fobj:
            tree.copy().export(fobj.name)
            self.assertEqual(calc_file_md5(fobj.name), md5_val)


if __name__ == "__main__":
    unittest.main()
