"""Unittest file for memfpkgrid.py

License:
Author: memfpk developers
"""
import unittest

import numpy as np

from memfpk import memfpkgrid as mg
from memfpk import memfpkutilities as mu

class MemfpkGridTestCase(unittest.TestCase):
  def test_grid_correct_usage(self):
    grid = mg.Grid1D(0.0, 1.0, 10)
    self.assertAlmostEqual(grid.dx, 0.1)
    self.assertAlmostEqual(grid.nodes[0], 0.05)
    self.assertAlmostEqual(grid.nodes[-1], 0.95)
    self.assertEqual(len(grid.edges()), 11)
    self.assertEqual(list(grid.cell_index([-0.1, 0.0, 0.05, 0.99, 1.0])),
                     [-1, 0, 0, 9, -1])
    self.assertTrue(grid.contains(1.0))
    self.assertFalse(grid.contains(1.01))
    self.assertEqual(grid.describe(), {"x_min":0.0, "x_max":1.0, "n_cells":10,
                                       "dx":grid.dx})
    self.assertEqual(mg.Grid1D.from_spacing(-8.0, 8.0, 0.01).n_cells, 1600)
    self.assertTrue(grid.same_as(mg.Grid1D(0.0, 1.0, 10)))
    self.assertFalse(grid.same_as(mg.Grid1D(0.0, 1.0, 20)))
    # Nodes are shared and read only.
    self.assertRaises(ValueError, grid.nodes.__setitem__, 0, 1.0)

  def test_grid_incorrect_usage(self):
    self.assertRaises(mu.MemfpkDomainError, mg.Grid1D, 1.0, 0.0, 10)
    self.assertRaises(mu.MemfpkDomainError, mg.Grid1D, 0.0, 1.0, 4)
    self.assertRaises(mu.MemfpkDomainError, mg.Grid1D, 0.0, 1.0, 10.5)
    self.assertRaises(mu.MemfpkDomainError, mg.Grid1D, 0.0, float("inf"), 10)
    self.assertRaises(mu.MemfpkDomainError, mg.Grid1D.from_spacing, 0.0, 1.0, 0.3)
    self.assertRaises(mu.MemfpkDomainError, mg.Grid1D.from_spacing, 0.0, 1.0, 0.0)

  def test_pdf_field_correct_usage(self):
    grid = mg.Grid1D(0.0, 1.0, 10)
    field = mg.PdfField(np.ones(10), 0.5, grid)
    self.assertAlmostEqual(field.mass(), 0.9)
    self.assertEqual(field.minimum(), 1.0)
    self.assertRaises(ValueError, mg.PdfField, np.ones(9), 0.5, grid)

  def test_pdf_surface_correct_usage(self):
    grid = mg.Grid1D(0.0, 1.0, 10)
    surface = mg.PdfSurface(grid, "memfpk")
    self.assertEqual(surface.values().shape, (0, 10))
    self.assertEqual(surface.mass_extrema()["min_mass"], None)
    values = np.ones(10)/0.9
    surface.append(mg.PdfField(values, 0.5, grid))
    surface.append(mg.PdfField(2.0*values, 1.0, grid), clamp_events=3)
    # Appended fields are copies.
    values[0] = 100.0
    self.assertEqual(surface.values().shape, (2, 10))
    self.assertAlmostEqual(surface.values()[0, 0], 1.0/0.9)
    self.assertEqual(surface.clamp_events, [0, 3])
    self.assertEqual(surface.index_of(1.0), 1)
    self.assertEqual(surface.index_of(0.5 + 1.0e-12), 0)
    self.assertEqual(surface.field(1).time, 1.0)
    extrema = surface.mass_extrema()
    self.assertAlmostEqual(extrema["min_mass"], 1.0)
    self.assertAlmostEqual(extrema["max_mass"], 2.0)
    self.assertAlmostEqual(extrema["max_mass_error"], 1.0)
    surface.record_macro(0.0, -1.0, 0.0, np.zeros(10))
    self.assertEqual(surface.m1_history, [-1.0])
    self.assertEqual(surface.diffusion_history[0].shape, (10,))

  def test_pdf_surface_incorrect_usage(self):
    grid = mg.Grid1D(0.0, 1.0, 10)
    surface = mg.PdfSurface(grid)
    surface.append(mg.PdfField(np.ones(10), 1.0, grid))
    self.assertRaises(ValueError, surface.append, mg.PdfField(np.ones(10), 1.0, grid))
    self.assertRaises(ValueError, surface.append, mg.PdfField(np.ones(10), 0.5, grid))
    other = mg.Grid1D(0.0, 2.0, 10)
    self.assertRaises(ValueError, surface.append, mg.PdfField(np.ones(10), 2.0, other))
    self.assertRaises(KeyError, surface.index_of, 0.7)

if __name__ == "__main__":
  unittest.main()
