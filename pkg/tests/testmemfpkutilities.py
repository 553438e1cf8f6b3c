"""Unittest file for memfpkutilities.py

License:
Author: memfpk developers
"""
import json
import math
import unittest

import numpy as np

from memfpk import memfpkutilities as mu

def _square_plus(task, shared):
  return task*task + shared

class MemfpkUtilitiesTestCase(unittest.TestCase):
  def test_require_hurst_correct_usage(self):
    self.assertEqual(mu.require_hurst(0.75), 0.75)
    self.assertEqual(mu.require_hurst("0.6"), 0.6)
    self.assertEqual(mu.require_hurst(0.5, allow_half=True), 0.5)

  def test_require_hurst_incorrect_usage(self):
    self.assertRaises(mu.MemfpkDomainError, mu.require_hurst, 0.5)
    self.assertRaises(mu.MemfpkDomainError, mu.require_hurst, 1.0)
    self.assertRaises(mu.MemfpkDomainError, mu.require_hurst, 0.3, True)
    self.assertRaises(mu.MemfpkDomainError, mu.require_hurst, float("nan"))
    self.assertRaises(mu.MemfpkDomainError, mu.require_hurst, "high")
    # Domain errors are value errors.
    self.assertRaises(ValueError, mu.require_hurst, 2.0)

  def test_require_positive_incorrect_usage(self):
    self.assertRaises(mu.MemfpkDomainError, mu.require_positive, "dt", 0.0)
    self.assertRaises(mu.MemfpkDomainError, mu.require_positive, "dt", -1.0)
    self.assertRaises(mu.MemfpkDomainError, mu.require_finite, "x", float("inf"))
    self.assertRaises(mu.MemfpkDomainError, mu.require_finite, "x", None)

  def test_trapezoid_correct_usage(self):
    x = np.linspace(0.0, 1.0, 101)
    self.assertAlmostEqual(mu.trapezoid(x, 0.01), 0.5, places=12)
    self.assertEqual(mu.trapezoid([3.0], 0.1), 0.0)
    running = mu.cumulative_trapezoid(x, 0.01)
    self.assertEqual(running.shape, x.shape)
    self.assertEqual(running[0], 0.0)
    self.assertAlmostEqual(running[-1], 0.5, places=12)
    self.assertAlmostEqual(running[50], 0.125, places=12)

  def test_create_system_sample_correct_usage(self):
    system_sample = mu.create_system_sample("memfpk_solver", {"steps":10}, 5.0)
    self.assertEqual(system_sample,
                     {"component":"memfpk_solver", "timestamp":5.0, "steps":10})
    system_sample = mu.create_system_sample("memfpk_solver", {})
    self.assertTrue(system_sample["timestamp"] > 0)

  def test_create_system_sample_incorrect_usage(self):
    self.assertRaises(ValueError, mu.create_system_sample, "solver;", {})
    self.assertRaises(ValueError, mu.create_system_sample, "solver:", {})
    self.assertRaises(TypeError, mu.create_system_sample, "solver", [1, 2])
    self.assertRaises(ValueError, mu.create_system_sample, "solver",
                      {"timestamp":1.0})

  def test_parse_key_values_correct_usage(self):
    text = ("# OU run\n"
            "scenario: ou\n"
            "output-times: [0.5, 1.0]\n"
            "\n"
            "dt = 1e-4  # fine\n"
            "kernel_mode: vada\n")
    record = mu.parse_key_values(text)
    self.assertEqual(record, {"scenario":"ou", "output_times":[0.5, 1.0],
                              "dt":1.0e-4, "kernel_mode":"vada"})

  def test_parse_key_values_incorrect_usage(self):
    self.assertRaises(ValueError, mu.parse_key_values, "scenario ou")
    self.assertRaises(ValueError, mu.parse_key_values, "dt: 1\ndt: 2")

  def test_format_float_correct_usage(self):
    value = 0.1 + 0.2
    self.assertEqual(float(mu.format_float(value)), value)
    self.assertEqual(mu.format_float(float("nan")), "nan")
    self.assertEqual(mu.format_float(float("-inf")), "-inf")
    self.assertEqual(mu.format_float(2), "2")

  def test_to_jsonable_correct_usage(self):
    value = {"a":np.float64(1.5), "b":np.arange(3), "c":(np.int64(2), np.bool_(True)),
             "d":float("nan"), 4:"text"}
    converted = mu.to_jsonable(value)
    self.assertEqual(converted, {"a":1.5, "b":[0, 1, 2], "c":[2, True], "d":"nan",
                                 "4":"text"})
    # Must serialize without a custom encoder.
    json.dumps(converted)

  def test_split_range_correct_usage(self):
    ranges = mu.split_range(10, 3)
    self.assertEqual(len(ranges), 3)
    self.assertEqual([i for r in ranges for i in r], list(range(10)))
    self.assertEqual(mu.split_range(2, 8), [range(0, 1), range(1, 2)])
    self.assertEqual(mu.split_range(5, 0), [range(0, 5)])

  def test_map_chunks_correct_usage(self):
    tasks = list(range(7))
    expected = [task*task + 1 for task in tasks]
    self.assertEqual(mu.map_chunks(_square_plus, tasks, 1, 1), expected)
    self.assertEqual(mu.map_chunks(_square_plus, tasks, 3, 1), expected)
    # Shared state is passed through the fork, so a lambda is fine.
    offset = lambda: 2
    results = mu.map_chunks(lambda task, shared: task + shared(), tasks, 1, offset)
    self.assertEqual(results, [task + 2 for task in tasks])

  def test_map_chunks_incorrect_usage(self):
    self.assertRaises(ValueError, mu.map_chunks, _square_plus, [1], 0)

  def test_error_types(self):
    self.assertTrue(issubclass(mu.MemfpkConfigError, ValueError))
    self.assertTrue(issubclass(mu.MemfpkNumericalError, ArithmeticError))
    self.assertFalse(issubclass(mu.MemfpkNumericalError, ValueError))
    self.assertTrue(math.isfinite(mu.require_finite("x", "1e3")))

if __name__ == "__main__":
  unittest.main()
