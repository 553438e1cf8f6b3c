"""Unittest file for memfpkspecial.py

License:
Author: memfpk developers
"""
import math
import unittest

from scipy import integrate
from scipy import special

from memfpk import memfpkspecial as msp
from memfpk import memfpkutilities as mu

class MemfpkSpecialTestCase(unittest.TestCase):
  def test_gamma_fn_correct_usage(self):
    self.assertAlmostEqual(msp.gamma_fn(0.5), math.sqrt(math.pi), delta=1.0e-14)
    self.assertAlmostEqual(msp.gamma_fn(1.0), 1.0, delta=1.0e-14)
    self.assertAlmostEqual(msp.gamma_fn(5.0), 24.0, delta=24.0e-12)
    # Reflection branch against the recurrence.
    self.assertAlmostEqual(msp.gamma_fn(0.3)/(msp.gamma_fn(1.3)/0.3), 1.0,
                           delta=1.0e-12)
    for a in [0.1, 0.45, 0.7, 2.5, 11.3, 100.0]:
      self.assertAlmostEqual(msp.gamma_fn(a)/math.gamma(a), 1.0, delta=1.0e-12)
      self.assertAlmostEqual(msp.log_gamma(a), math.lgamma(a),
                             delta=1.0e-12*max(1.0, abs(math.lgamma(a))))
    # Gamma and its logarithm share one Lanczos evaluation.
    for a in [0.5, 1.4, 7.25, 60.0, 170.5]:
      self.assertAlmostEqual(msp.gamma_fn(a)/math.exp(msp.log_gamma(a)), 1.0,
                             delta=1.0e-15)

  def test_gamma_fn_incorrect_usage(self):
    self.assertRaises(mu.MemfpkDomainError, msp.gamma_fn, 0.0)
    self.assertRaises(mu.MemfpkDomainError, msp.gamma_fn, -1.5)
    self.assertRaises(mu.MemfpkDomainError, msp.gamma_fn, float("nan"))
    self.assertRaises(mu.MemfpkDomainError, msp.gamma_fn, 200.0)
    self.assertRaises(mu.MemfpkDomainError, msp.log_gamma, 0.0)

  def test_upper_incomplete_gamma_correct_usage(self):
    self.assertAlmostEqual(msp.upper_incomplete_gamma(1.0, 2.0), math.exp(-2.0),
                           delta=1.0e-14)
    self.assertAlmostEqual(msp.upper_incomplete_gamma(0.5, 1.0)/
                           (math.sqrt(math.pi)*math.erfc(1.0)), 1.0, delta=1.0e-10)
    self.assertEqual(msp.upper_incomplete_gamma(0.3, 0.0), msp.gamma_fn(0.3))
    # Both branches of the regime split against scipy.
    for a in [0.1, 0.5, 0.9, 1.7, 3.0]:
      for z in [0.01, 0.5, a + 0.9, a + 1.1, 5.0, 20.0]:
        expected = special.gammaincc(a, z)*special.gamma(a)
        self.assertAlmostEqual(msp.upper_incomplete_gamma(a, z)/expected, 1.0,
                               delta=1.0e-10)

  def test_upper_incomplete_gamma_incorrect_usage(self):
    self.assertRaises(mu.MemfpkDomainError, msp.upper_incomplete_gamma, 0.0, 1.0)
    self.assertRaises(mu.MemfpkDomainError, msp.upper_incomplete_gamma, 1.0, -0.1)
    self.assertRaises(mu.MemfpkDomainError, msp.upper_incomplete_gamma, 1.0,
                      float("inf"))
    self.assertRaises(mu.MemfpkNumericalError, msp.upper_incomplete_gamma, 0.5, 10.0,
                      1.0e-15, 1)

  def test_upper_incomplete_gamma_monotone(self):
    for a in [0.2, 1.0, 2.5]:
      values = [msp.upper_incomplete_gamma(a, 0.25*k) for k in range(81)]
      for (left, right) in zip(values[:-1], values[1:]):
        self.assertTrue(right < left)

  def test_lower_incomplete_gamma_correct_usage(self):
    self.assertEqual(msp.lower_incomplete_gamma(0.7, 0.0), 0.0)
    for a in [0.1, 0.6, 1.0, 2.2, 3.0]:
      for z in [0.0, 0.3, 2.0, 7.5, 20.0]:
        (quadrature, _) = integrate.quad(lambda t: t**(a - 1.0)*math.exp(-t), 0.0, z,
                                         epsabs=0.0, epsrel=1.0e-12, limit=200)
        total = msp.lower_incomplete_gamma(a, z) + msp.upper_incomplete_gamma(a, z)
        self.assertAlmostEqual(total/msp.gamma_fn(a), 1.0, delta=1.0e-12)
        if z > 0.0:
          self.assertAlmostEqual(msp.lower_incomplete_gamma(a, z)/quadrature, 1.0,
                                 delta=1.0e-9)

if __name__ == "__main__":
  unittest.main()
