"""Unittest file for memfpkfgn.py

License:
Author: memfpk developers
"""
import math
import unittest

import numpy as np

from memfpk import memfpkfgn as mf
from memfpk import memfpkspecial as ms
from memfpk import memfpkutilities as mu

def _within_standard_errors(test, products, expected, count=4.0):
  products = np.asarray(products, dtype=float)
  standard_error = products.std(ddof=1)/math.sqrt(len(products))
  test.assertTrue(abs(products.mean() - expected) <= count*standard_error,
                  repr(products.mean()) + " vs " + repr(expected) + " (se " +
                  repr(standard_error) + ")")

class MemfpkFgnTestCase(unittest.TestCase):
  def test_fgn_increment_autocov_correct_usage(self):
    self.assertEqual(mf.fgn_increment_autocov(0.5, 1, 1.0), 0.0)
    for H in [0.5, 0.6, 0.75, 0.95]:
      self.assertAlmostEqual(mf.fgn_increment_autocov(H, 0, 1.0), 1.0, places=14)
    self.assertAlmostEqual(mf.fgn_increment_autocov(0.75, 1, 1.0),
                           0.5*(2.0**1.5 - 2.0), places=14)
    self.assertAlmostEqual(mf.fgn_increment_autocov(0.75, 1, 1.0), 0.41421356,
                           places=8)
    # Variance of one increment is dt^(2H).
    self.assertAlmostEqual(mf.fgn_increment_autocov(0.7, 0, 0.01), 0.01**1.4,
                           places=15)
    lags = mf.fgn_increment_autocov(0.8, np.arange(5), 1.0)
    self.assertEqual(lags.shape, (5,))
    self.assertTrue(np.all(np.diff(lags) < 0))

  def test_fgn_increment_autocov_incorrect_usage(self):
    self.assertRaises(mu.MemfpkDomainError, mf.fgn_increment_autocov, 0.4, 1, 1.0)
    self.assertRaises(mu.MemfpkDomainError, mf.fgn_increment_autocov, 0.7, -1, 1.0)
    self.assertRaises(mu.MemfpkDomainError, mf.fgn_increment_autocov, 0.7, 1.5, 1.0)
    self.assertRaises(mu.MemfpkDomainError, mf.fgn_increment_autocov, 0.7, 1, 0.0)

  def test_spectral_density_correct_usage(self):
    self.assertAlmostEqual(mf.spectral_density(0.5, 3.0), 1.0/(2.0*math.pi),
                           places=14)
    expected = 0.7*ms.gamma_fn(1.4)*math.sin(0.7*math.pi)/math.pi
    self.assertAlmostEqual(mf.spectral_density(0.7, 1.0), expected, places=14)
    self.assertEqual(mf.spectral_density(0.7, -1.0), mf.spectral_density(0.7, 1.0))
    self.assertEqual(mf.spectral_density(0.7, 0.0), math.inf)
    self.assertAlmostEqual(mf.spectral_density(0.5, 0.0), 1.0/(2.0*math.pi),
                           places=14)

  def test_spectral_density_incorrect_usage(self):
    self.assertRaises(mu.MemfpkDomainError, mf.spectral_density, 1.2, 1.0)
    self.assertRaises(mu.MemfpkDomainError, mf.spectral_density, 0.7, float("nan"))

  def test_increment_grid_incorrect_usage(self):
    self.assertRaises(mu.MemfpkDomainError, mf.IncrementGrid, 0, 0.1)
    self.assertRaises(mu.MemfpkDomainError, mf.IncrementGrid, 2.5, 0.1)
    self.assertRaises(mu.MemfpkDomainError, mf.IncrementGrid, 10, -0.1)
    grid = mf.IncrementGrid(10, 0.1)
    self.assertAlmostEqual(grid.horizon, 1.0)
    self.assertEqual(len(grid.times()), 11)

  def test_sample_noise_correct_usage(self):
    grid = mf.IncrementGrid(64, 0.01)
    ensemble = mf.sample_noise(0.8, grid, 4000, 7)
    self.assertEqual(ensemble.fgn_increments.shape, (4000, 64))
    self.assertEqual(ensemble.gwn_increments.shape, (4000, 64))
    self.assertEqual(ensemble.method, "circulant")
    fgn = ensemble.fgn_increments
    gwn = ensemble.gwn_increments
    for lag in range(6):
      _within_standard_errors(self, fgn[:, 30]*fgn[:, 30 + lag],
                              mf.fgn_increment_autocov(0.8, lag, 0.01))
    _within_standard_errors(self, gwn[:, 10]**2, 0.01)
    _within_standard_errors(self, gwn[:, 10]*gwn[:, 11], 0.0)
    # FGN and GWN blocks are independent.
    _within_standard_errors(self, fgn[:, 5]*gwn[:, 5], 0.0)
    # Self-similarity of the summed increments.
    _within_standard_errors(self, fgn.sum(axis=1)**2, grid.horizon**1.6)
    # Ensembles are values.
    self.assertRaises(ValueError, fgn.__setitem__, (0, 0), 1.0)

  def test_sample_noise_white_limit(self):
    grid = mf.IncrementGrid(256, 0.01)
    ensemble = mf.sample_noise(0.5, grid, 2000, 11)
    fgn = ensemble.fgn_increments
    _within_standard_errors(self, fgn[:, 100]*fgn[:, 101], 0.0)
    _within_standard_errors(self, fgn[:, 100]**2, 0.01)

  def test_sample_noise_reproducible(self):
    grid = mf.IncrementGrid(32, 0.05)
    first = mf.sample_noise(0.75, grid, 12, 123)
    second = mf.sample_noise(0.75, grid, 12, 123)
    self.assertTrue(np.array_equal(first.fgn_increments, second.fgn_increments))
    self.assertTrue(np.array_equal(first.gwn_increments, second.gwn_increments))
    other = mf.sample_noise(0.75, grid, 12, 124)
    self.assertFalse(np.array_equal(first.fgn_increments, other.fgn_increments))
    # Worker count and batching do not change a path.
    forked = mf.sample_noise(0.75, grid, 12, 123, workers=3)
    self.assertTrue(np.array_equal(first.fgn_increments, forked.fgn_increments))
    self.assertTrue(np.array_equal(first.gwn_increments, forked.gwn_increments))
    tail = mf.sample_noise(0.75, grid, 5, 123, first_path=7)
    self.assertTrue(np.array_equal(first.fgn_increments[7:], tail.fgn_increments))
    self.assertEqual(list(tail.path_indices()), [7, 8, 9, 10, 11])
    self.assertEqual(tail.seed_descriptor()["first_path"], 7)

  def test_sample_noise_cholesky(self):
    grid = mf.IncrementGrid(16, 0.1)
    ensemble = mf.sample_noise(0.9, grid, 4000, 5, method="cholesky")
    self.assertEqual(ensemble.method, "cholesky")
    fgn = ensemble.fgn_increments
    for lag in range(3):
      _within_standard_errors(self, fgn[:, 4]*fgn[:, 4 + lag],
                              mf.fgn_increment_autocov(0.9, lag, 0.1))
    single = mf.sample_noise(0.9, mf.IncrementGrid(1, 0.1), 3, 5)
    self.assertEqual(single.fgn_increments.shape, (3, 1))

  def test_circulant_eigenvalues_correct_usage(self):
    for H in [0.55, 0.75, 0.95]:
      eigenvalues = mf.circulant_eigenvalues(H, 128)
      self.assertEqual(len(eigenvalues), 254)
      self.assertTrue(eigenvalues.min() > -1.0e-10)
    self.assertEqual(len(mf.circulant_eigenvalues(0.7, 1)), 0)

  def test_sample_noise_incorrect_usage(self):
    grid = mf.IncrementGrid(8, 0.1)
    self.assertRaises(mu.MemfpkDomainError, mf.sample_noise, 0.8, grid, 0, 1)
    self.assertRaises(mu.MemfpkDomainError, mf.sample_noise, 0.8, grid, 4, -1)
    self.assertRaises(mu.MemfpkDomainError, mf.sample_noise, 0.8, grid, 4, 1.5)
    self.assertRaises(mu.MemfpkDomainError, mf.sample_noise, 0.8, grid, 4, 2**64)
    self.assertRaises(mu.MemfpkDomainError, mf.sample_noise, 0.8, grid, 4, 1,
                      "wavelet")
    self.assertRaises(mu.MemfpkDomainError, mf.sample_noise, 0.8, grid, 4, 1,
                      "auto", 1, -2)
    self.assertRaises(mu.MemfpkDomainError, mf.sample_noise, 1.0, grid, 4, 1)
    self.assertRaises(TypeError, mf.sample_noise, 0.8, (8, 0.1), 4, 1)

  def test_fbm_paths_correct_usage(self):
    grid = mf.IncrementGrid(20, 0.05)
    ensemble = mf.sample_noise(0.7, grid, 3, 2)
    paths = mf.fbm_paths(ensemble)
    self.assertEqual(paths.shape, (3, 21))
    self.assertTrue(np.all(paths[:, 0] == 0.0))
    self.assertTrue(np.allclose(np.diff(paths, axis=1), ensemble.fgn_increments))

  def test_aggregate_variance_exponent_correct_usage(self):
    grid = mf.IncrementGrid(1024, 1.0)
    ensemble = mf.sample_noise(0.75, grid, 200, 3)
    exponent = mf.aggregate_variance_exponent(ensemble.fgn_increments)
    self.assertAlmostEqual(exponent, 1.5, delta=0.1)

  def test_aggregate_variance_exponent_incorrect_usage(self):
    self.assertRaises(ValueError, mf.aggregate_variance_exponent, np.ones((2, 8)))

if __name__ == "__main__":
  unittest.main()
