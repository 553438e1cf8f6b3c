"""Unittest file for memfpkstats.py

License:
Author: memfpk developers
"""
import math
import unittest

import numpy as np

from memfpk import memfpkanalytic as ma
from memfpk import memfpkgrid as mg
from memfpk import memfpkstats as mst

def gaussian_field(grid, mean, std, time=1.0):
  x = grid.nodes
  values = np.exp(-0.5*((x - mean)/std)**2)/(std*math.sqrt(2.0*math.pi))
  return mg.PdfField(values, time, grid)

class MemfpkStatsTestCase(unittest.TestCase):
  def test_moments_from_pdf_correct_usage(self):
    grid = mg.Grid1D.from_spacing(-8.0, 8.0, 0.01)
    moments = mst.moments_from_pdf(gaussian_field(grid, 0.0, 1.0))
    self.assertAlmostEqual(moments.mean, 0.0, delta=1.0e-4)
    self.assertAlmostEqual(moments.std, 1.0, delta=1.0e-4)
    self.assertAlmostEqual(moments.skewness, 0.0, delta=1.0e-4)
    self.assertAlmostEqual(moments.kurtosis, 3.0, delta=1.0e-4)

    grid = mg.Grid1D.from_spacing(0.0, 2.0, 0.01)
    moments = mst.moments_from_pdf(gaussian_field(grid, 1.0, 0.1), grid)
    self.assertAlmostEqual(moments.mean, 1.0, delta=1.0e-6)
    self.assertAlmostEqual(moments.std, 0.1, delta=1.0e-6)

    params = ma.OuParams(1.0, 0.4, 0.4, 1.0, 0.65)
    grid = mg.Grid1D.from_spacing(-3.0, 3.0, 0.005)
    field = mg.PdfField(ma.ou_pdf(params, grid.nodes, 1.0), 1.0, grid)
    moments = mst.moments_from_pdf(field)
    self.assertAlmostEqual(moments.mean, math.exp(-1.0), delta=1.0e-6)
    self.assertAlmostEqual(moments.skewness, 0.0, delta=1.0e-6)
    self.assertAlmostEqual(moments.std, math.sqrt(ma.ou_variance(params, 1.0)),
                           delta=1.0e-6)

  def test_moments_from_pdf_incorrect_usage(self):
    grid = mg.Grid1D.from_spacing(-8.0, 8.0, 0.01)
    field = gaussian_field(grid, 0.0, 1.0)
    doubled = mg.PdfField(2.0*field.values, 1.0, grid)
    self.assertRaises(ValueError, mst.moments_from_pdf, doubled)
    scaled = mg.PdfField(1.001*field.values, 1.0, grid)
    self.assertRaises(ValueError, mst.moments_from_pdf, scaled)
    # A looser tolerance accepts a slightly off mass.
    self.assertAlmostEqual(mst.moments_from_pdf(scaled, grid, 1.0e-2).std, 1.0,
                           delta=1.0e-4)

  def test_moments_from_samples_correct_usage(self):
    moments = mst.moments_from_samples([1.0, 2.0, 3.0, 4.0])
    self.assertAlmostEqual(moments.mean, 2.5)
    self.assertAlmostEqual(moments.std, math.sqrt(5.0/3.0))
    self.assertAlmostEqual(moments.skewness, 0.0)
    self.assertAlmostEqual(moments.kurtosis, 2.5625/1.5625)
    constant = mst.moments_from_samples(np.full(5, 2.0))
    self.assertEqual(constant.as_tuple(), (2.0, 0.0, None, None))
    self.assertEqual(constant.describe()["kurtosis"], None)

    samples = np.random.Generator(np.random.Philox(3)).standard_normal(200000)
    moments = mst.moments_from_samples(samples)
    self.assertAlmostEqual(moments.mean, 0.0, delta=0.01)
    self.assertAlmostEqual(moments.std, 1.0, delta=0.01)
    self.assertAlmostEqual(moments.skewness, 0.0, delta=0.03)
    self.assertAlmostEqual(moments.kurtosis, 3.0, delta=0.06)

  def test_moments_from_samples_incorrect_usage(self):
    self.assertRaises(ValueError, mst.moments_from_samples, [1.0])
    self.assertRaises(ValueError, mst.moments_from_samples, [])

  def test_pdf_to_cdf_correct_usage(self):
    grid = mg.Grid1D.from_spacing(-8.0, 8.0, 0.01)
    cdf = mst.pdf_to_cdf(gaussian_field(grid, 0.0, 1.0))
    self.assertEqual(cdf[0], 0.0)
    self.assertEqual(cdf[-1], 1.0)
    self.assertTrue(np.all(np.diff(cdf) >= 0.0))
    self.assertAlmostEqual(0.5*(cdf[799] + cdf[800]), 0.5, places=12)

    grid = mg.Grid1D(0.0, 1.0, 100)
    cdf = mst.pdf_to_cdf(mg.PdfField(np.ones(100), 0.0, grid))
    self.assertTrue(np.allclose(np.diff(cdf), 1.0/99.0))

    params = ma.OuParams(1.0, 0.4, 0.4, 1.0, 0.65)
    grid = mg.Grid1D.from_spacing(-3.0, 3.0, 0.005)
    field = mg.PdfField(ma.ou_pdf(params, grid.nodes, 1.0), 1.0, grid)
    cdf = mst.pdf_to_cdf(field)
    # The trapezoid CDF starts at the first node, so compare increments.
    exact = ma.ou_cdf(params, grid.nodes, 1.0)
    self.assertTrue(np.max(np.abs((cdf - cdf[0]) - (exact - exact[0]))) < 1.0e-5)

  def test_pdf_local_maxima_correct_usage(self):
    grid = mg.Grid1D.from_spacing(-5.0, 5.0, 0.01)
    values = 0.5*(gaussian_field(grid, -2.003, 0.5).values +
                  gaussian_field(grid, 2.003, 0.5).values)
    maxima = mst.pdf_local_maxima(mg.PdfField(values, 1.0, grid))
    self.assertEqual(len(maxima), 2)
    self.assertAlmostEqual(grid.nodes[maxima[0]], -2.0, delta=0.01)
    self.assertAlmostEqual(grid.nodes[maxima[1]], 2.0, delta=0.01)
    self.assertEqual(len(mst.pdf_local_maxima(gaussian_field(grid, 0.002, 1.0))), 1)

  def test_compare_surfaces_correct_usage(self):
    grid = mg.Grid1D.from_spacing(-8.0, 8.0, 0.01)
    fields = [gaussian_field(grid, 0.0, 1.0).values,
              gaussian_field(grid, 0.5, 1.0).values]
    A = mst.surface_from_fields(grid, [0.5, 1.0], fields, "a")
    B = mst.surface_from_fields(grid, [0.5, 1.0], fields, "b")
    report = mst.compare_surfaces(A, B)
    self.assertEqual(report["linf"], 0.0)
    self.assertEqual(report["l1_per_time"], [0.0, 0.0])
    self.assertEqual(report["times"], [0.5, 1.0])

    shifted = mst.surface_from_fields(grid, [0.5, 1.0],
                                      [np.roll(row, 1) for row in fields])
    report = mst.compare_surfaces(A, shifted)
    expected = 2.0*grid.dx/math.sqrt(2.0*math.pi)
    for l1 in report["l1_per_time"]:
      self.assertAlmostEqual(l1/expected, 1.0, delta=0.05)
    self.assertTrue(report["linf"] < grid.dx)

  def test_compare_surfaces_incorrect_usage(self):
    grid = mg.Grid1D(0.0, 1.0, 10)
    A = mst.surface_from_fields(grid, [1.0], [np.ones(10)])
    B = mst.surface_from_fields(grid, [2.0], [np.ones(10)])
    C = mst.surface_from_fields(mg.Grid1D(0.0, 1.0, 20), [1.0], [np.ones(20)])
    D = mst.surface_from_fields(grid, [1.0, 2.0], [np.ones(10), np.ones(10)])
    self.assertRaises(ValueError, mst.compare_surfaces, A, B)
    self.assertRaises(ValueError, mst.compare_surfaces, A, C)
    self.assertRaises(ValueError, mst.compare_surfaces, A, D)

  def test_compare_kernels_correct_usage(self):
    a = np.array([1.0, 2.0, np.nan, 0.0])
    b = np.array([1.1, 2.2, 5.0, 3.0])
    self.assertAlmostEqual(mst.compare_kernels(a, b), 0.1)
    self.assertAlmostEqual(mst.compare_kernels(a, b, [True, False, True, True]), 0.1)
    self.assertAlmostEqual(mst.compare_kernels(a, np.array([1.2, 2.2, 0.0, 0.0]),
                                               [3.0, 1.0, 1.0, 1.0]), 0.175)
    self.assertTrue(math.isnan(mst.compare_kernels([np.nan], [1.0])))
    # A boolean array mask selects the same nodes as the list form.
    self.assertAlmostEqual(mst.compare_kernels(a, b, np.array([True, False, True,
                                                               True])), 0.1)

if __name__ == "__main__":
  unittest.main()
