"""memfpk special functions.

The Gamma function and the incomplete Gamma functions needed by the closed-form
memory kernels. Gamma uses the Lanczos approximation (g = 7, nine coefficients),
the incomplete functions use the power series below z = a + 1 and the Legendre
continued fraction (modified Lentz) above it, following "Numerical Recipes in C",
2nd edition, chapter 6.

All functions are pure and take real scalars.

License:
Author: memfpk developers
"""
import math
import sys

from memfpk import memfpkutilities as mu

_LANCZOS_G = 7.0
_LANCZOS_COEFFICIENTS = [0.99999999999980993,
                         676.5203681218851,
                         -1259.1392167224028,
                         771.32342877765313,
                         -176.61502916214059,
                         12.507343278686905,
                         -0.13857109526572012,
                         9.9843695780195716e-6,
                         1.5056327351493116e-7]
_LOG_SQRT_2PI = 0.5*math.log(2.0*math.pi)
_TINY = sys.float_info.min/sys.float_info.epsilon

def _check_shape(a):
  value = mu.require_finite("a", a)
  if value <= 0.0:
    raise mu.MemfpkDomainError("a must be positive, got " + repr(a) + ".")
  return value

def _check_limit(z):
  value = mu.require_finite("z", z)
  if value < 0.0:
    raise mu.MemfpkDomainError("z must be non-negative, got " + repr(z) + ".")
  return value

def _lanczos_log(a):
  # ln Gamma(a) for a >= 1/2.
  x = a - 1.0
  series = _LANCZOS_COEFFICIENTS[0]
  for i in range(1, len(_LANCZOS_COEFFICIENTS)):
    series += _LANCZOS_COEFFICIENTS[i]/(x + i)
  t = x + _LANCZOS_G + 0.5
  return _LOG_SQRT_2PI + (x + 0.5)*math.log(t) - t + math.log(series)

def log_gamma(a):
  """Natural logarithm of the Gamma function.

  Arguments:
    a: A positive real shape parameter.

  Returns:
    ln Gamma(a) as a float.

  Exceptions:
    MemfpkDomainError:
      If a is non-positive or not finite.
  """
  a = _check_shape(a)
  if a < 0.5:
    # Reflection; sin(pi a) > 0 on (0, 1/2).
    return math.log(math.pi/math.sin(math.pi*a)) - _lanczos_log(1.0 - a)
  return _lanczos_log(a)

def gamma_fn(a):
  """The Gamma function Gamma(a) for a > 0.

  Arguments:
    a: A positive real shape parameter.

  Returns:
    Gamma(a) as a float.

  Exceptions:
    MemfpkDomainError:
      If a is non-positive, not finite, or Gamma(a) overflows a double.
  """
  a = _check_shape(a)
  if a < 0.5:
    return math.pi/(math.sin(math.pi*a)*gamma_fn(1.0 - a))
  if a > 171.0:
    raise mu.MemfpkDomainError("Gamma(a) overflows for a = " + repr(a) + ".")
  return math.exp(_lanczos_log(a))

def _prefactor(a, z):
  # z^a e^{-z}, evaluated in log form.
  return math.exp(a*math.log(z) - z)

def _lower_series(a, z, accuracy, max_iterations):
  # gamma(a, z) = z^a e^{-z} sum_n z^n / (a (a+1) ... (a+n)).
  term = 1.0/a
  total = term
  ap = a
  for n in range(1, max_iterations + 1):
    ap += 1.0
    term *= z/ap
    total += term
    if abs(term) < abs(total)*accuracy:
      return total*_prefactor(a, z)
  raise mu.MemfpkNumericalError("Incomplete gamma series did not converge for a = " +
                                repr(a) + ", z = " + repr(z) + ".")

def _upper_continued_fraction(a, z, accuracy, max_iterations):
  # Gamma(a, z) = z^a e^{-z} / (z + 1 - a - 1 (1 - a)/(z + 3 - a - ...)).
  b = z + 1.0 - a
  c = 1.0/_TINY
  d = 1.0/b
  h = d
  for i in range(1, max_iterations + 1):
    an = -i*(i - a)
    b += 2.0
    d = an*d + b
    if abs(d) < _TINY: d = _TINY
    c = b + an/c
    if abs(c) < _TINY: c = _TINY
    d = 1.0/d
    delta = d*c
    h *= delta
    if abs(delta - 1.0) < accuracy:
      return _prefactor(a, z)*h
  raise mu.MemfpkNumericalError("Incomplete gamma continued fraction did not " +
                                "converge for a = " + repr(a) + ", z = " + repr(z) + ".")

def upper_incomplete_gamma(a, z, accuracy=1.0e-15, max_iterations=500):
  """Upper incomplete Gamma function Gamma(a, z) = int_z^inf t^(a-1) e^(-t) dt.

  Arguments:
    a: A positive real shape parameter.
    z: A non-negative real lower limit.
    accuracy (optional): Relative convergence threshold of the series and continued
      fraction. Defaults to 1e-15.
    max_iterations (optional): Iteration limit. Defaults to 500.

  Returns:
    Gamma(a, z) as a float. Gamma(a, 0) equals Gamma(a).

  Exceptions:
    MemfpkDomainError:
      If a <= 0, z < 0 or either is not finite.
    MemfpkNumericalError:
      If the expansion does not converge within max_iterations.
  """
  a = _check_shape(a)
  z = _check_limit(z)
  if z == 0.0:
    return gamma_fn(a)
  if z < a + 1.0:
    return gamma_fn(a) - _lower_series(a, z, accuracy, max_iterations)
  return _upper_continued_fraction(a, z, accuracy, max_iterations)

def lower_incomplete_gamma(a, z, accuracy=1.0e-15, max_iterations=500):
  """Lower incomplete Gamma function gamma(a, z) = int_0^z t^(a-1) e^(-t) dt.

  Arguments and exceptions as upper_incomplete_gamma.
  """
  a = _check_shape(a)
  z = _check_limit(z)
  if z == 0.0:
    return 0.0
  if z < a + 1.0:
    return _lower_series(a, z, accuracy, max_iterations)
  return gamma_fn(a) - _upper_continued_fraction(a, z, accuracy, max_iterations)
