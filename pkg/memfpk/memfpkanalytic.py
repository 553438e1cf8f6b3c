"""memfpk analytic reference for the fractional Ornstein-Uhlenbeck process.

For dX = -alpha X dt + sigma_w dW + sigma_b dB_H the response is Gaussian with

  mean      mu(t)      = x0 e^(-alpha t)
  variance  sigma^2(t) = sigma_w^2/(2 alpha) (1 - e^(-2 alpha t)) + var0 e^(-2 alpha t)
                         + 2 sigma_b^2 int_0^t e^(-2 alpha (t-u)) G(u) du,

  G(u) = int_0^u e^(-alpha r) phi(r) dr,   phi(r) = H(2H-1) r^(2H-2).

G is accumulated by product integration (power weight exact on each panel,
exponential at the panel midpoint) and the outer integral by composite Simpson,
both on the graded grid u = t w^q, q = 5/(2H), which makes the integrand smooth in
w. Panels are doubled until the Richardson estimate of the relative error is
below 1e-7.

License:
Author: memfpk developers
"""
import functools
import math

import numpy as np

from memfpk import memfpkgrid as mg
from memfpk import memfpkutilities as mu

MIN_PANELS = 2048
MAX_PANELS = 2**20
TARGET_ACCURACY = 1.0e-7

class OuParams:
  def __init__(self, alpha, sigma_w, sigma_b, x0, H, var0=0.0):
    """Constructor for OuParams.

    Arguments:
      alpha: The decay rate, alpha > 0.
      sigma_w: The white-noise intensity, >= 0.
      sigma_b: The fractional-noise intensity, >= 0.
      x0: The initial mean.
      H: The Hurst parameter, 1/2 < H < 1.
      var0 (optional): The initial variance, >= 0. Defaults to 0.

    Exceptions:
      MemfpkDomainError:
        If a parameter is outside its domain or both intensities are 0.
    """
    self.alpha = mu.require_positive("alpha", alpha)
    self.sigma_w = mu.require_finite("sigma_w", sigma_w)
    self.sigma_b = mu.require_finite("sigma_b", sigma_b)
    if self.sigma_w < 0.0 or self.sigma_b < 0.0:
      raise mu.MemfpkDomainError("Noise intensities must be non-negative, got " +
                                 repr(sigma_w) + ", " + repr(sigma_b) + ".")
    if self.sigma_w == 0.0 and self.sigma_b == 0.0:
      raise mu.MemfpkDomainError("sigma_w and sigma_b cannot both be zero.")
    self.x0 = mu.require_finite("x0", x0)
    self.H = mu.require_hurst(H)
    self.var0 = mu.require_finite("var0", var0)
    if self.var0 < 0.0:
      raise mu.MemfpkDomainError("var0 must be non-negative, got " + repr(var0) + ".")

def _require_time(t):
  t = mu.require_finite("t", t)
  if t < 0.0:
    raise mu.MemfpkDomainError("t must be non-negative, got " + repr(t) + ".")
  return t

def ou_mean(p, t):
  return p.x0*math.exp(-p.alpha*_require_time(t))

def _graded_integral(alpha, H, t, panels):
  # int_0^t e^(-2 alpha (t-u)) G(u) du on the graded grid with an even panel count.
  q = 5.0/(2.0*H)
  w = np.linspace(0.0, 1.0, panels + 1)
  u = t*w**q
  power = u**(2.0*H - 1.0)
  increments = np.exp(-alpha*0.5*(u[:-1] + u[1:]))*H*(power[1:] - power[:-1])
  G = np.concatenate([[0.0], np.cumsum(increments)])
  integrand = np.exp(-2.0*alpha*(t - u))*G*q*t*w**(q - 1.0)
  simpson = integrand[0] + integrand[-1] + 4.0*np.sum(integrand[1:-1:2]) + \
      2.0*np.sum(integrand[2:-1:2])
  return simpson/(3.0*panels)

@functools.lru_cache(maxsize=4096)
def _fgn_integral(alpha, H, t):
  # Returns (value, relative error estimate, panels).
  panels = MIN_PANELS
  coarse = _graded_integral(alpha, H, t, panels)
  while True:
    fine = _graded_integral(alpha, H, t, 2*panels)
    estimate = abs(fine - coarse)/3.0
    scale = abs(fine) if fine != 0.0 else 1.0
    if estimate <= TARGET_ACCURACY*scale:
      return fine + (fine - coarse)/3.0, estimate/scale, 2*panels
    panels *= 2
    if 2*panels > MAX_PANELS:
      raise mu.MemfpkNumericalError("ou_variance did not reach relative accuracy " +
                                    repr(TARGET_ACCURACY) + " at t = " + repr(t) +
                                    "; achieved " + repr(estimate/scale) + ".")
    coarse = fine

def fgn_variance_part(p, t):
  """The fractional-noise contribution to the variance, with its accuracy estimate.

  Returns:
    (value, relative error estimate).

  Exceptions:
    MemfpkNumericalError:
      If the accuracy target is not reached within 2**20 panels.
  """
  t = _require_time(t)
  if t == 0.0 or p.sigma_b == 0.0:
    return 0.0, 0.0
  (value, estimate, _) = _fgn_integral(p.alpha, p.H, t)
  return 2.0*p.sigma_b**2*value, estimate

def ou_variance(p, t):
  """The response variance sigma^2(t).

  Arguments:
    p: The OuParams.
    t: The time, t >= 0.

  Returns:
    sigma^2(t); var0 at t = 0.

  Exceptions:
    MemfpkDomainError:
      If t < 0.
    MemfpkNumericalError:
      If the fractional part does not reach relative accuracy 1e-7.
  """
  t = _require_time(t)
  decay = math.exp(-2.0*p.alpha*t)
  white = p.sigma_w**2/(2.0*p.alpha)*(-math.expm1(-2.0*p.alpha*t))
  return white + p.var0*decay + fgn_variance_part(p, t)[0]

def _moments(p, t):
  variance = ou_variance(p, t)
  if not variance > 0.0:
    raise mu.MemfpkNumericalError("Variance " + repr(variance) + " at t = " +
                                  repr(t) + " is not positive.")
  return ou_mean(p, t), variance

def ou_pdf(p, x, t):
  """The Gaussian response density at x (a float or an array) and time t > 0.

  Exceptions:
    MemfpkNumericalError:
      If the variance is not positive (t = 0 with var0 = 0).
  """
  (mean, variance) = _moments(p, t)
  x = np.asarray(x, dtype=float)
  value = np.exp(-(x - mean)**2/(2.0*variance))/math.sqrt(2.0*math.pi*variance)
  if value.ndim == 0:
    return float(value)
  return value

def ou_cdf(p, x, t):
  """The Gaussian response CDF at x (a float or an array) and time t > 0."""
  (mean, variance) = _moments(p, t)
  scale = math.sqrt(2.0*variance)
  if np.ndim(x) == 0:
    return 0.5*math.erfc(-(float(x) - mean)/scale)
  return np.array([0.5*math.erfc(-(value - mean)/scale)
                   for value in np.asarray(x, dtype=float).ravel()]).reshape(np.shape(x))

def ou_surface(p, grid, times):
  """The analytic density at the nodes of a grid, as a PdfSurface labelled "analytic".

  Exceptions:
    TypeError:
      If times is not a list.
  """
  if not isinstance(times, (list, tuple, np.ndarray)):
    raise TypeError("The argument times must be a list of times.")
  surface = mg.PdfSurface(grid, "analytic")
  for t in times:
    surface.append(mg.PdfField(ou_pdf(p, grid.nodes, t), t, grid))
  return surface
