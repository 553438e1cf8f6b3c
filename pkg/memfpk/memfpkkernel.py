"""memfpk memory kernels.

The FGN memory kernel phi(t, s) = H(2H-1)|t-s|^(2H-2), the state functions phi1 and
phi2 that enter the exponential history functional, the closed-form kernels of the
constant (Case II) and linear (Case IV) systems, and the Volterra adjustable
decoupling approximation (VADA) that turns the history functional into the
state-local factor

  Psi(x, t) = K0 + d K1 + d^2 K2/2,   d = phi1(x) - E[phi1(X_t)],

with K_j the history integrals of exp{int_s^t E[phi1(X_u)] du} (t-s)^j phi(t, s).

The SystemSpec argument is any object with the callables f, f_prime, g, g_prime,
g_second, h, h_prime, h_second (see memfpksde.SystemSpec).

License:
Author: memfpk developers
"""
import functools
import math

import numpy as np
from scipy import special as scipy_special

from memfpk import memfpkspecial as ms
from memfpk import memfpkutilities as mu

DIFFUSION_FLOOR = 1.0e-12
VADA_ORDERS = (1, 2, 3)

# Gauss nodes per macro subinterval.
_QUADRATURE_NODES = 8

def phi(t, s, H):
  """The FGN memory kernel phi(t, s) = H(2H-1)(t-s)^(2H-2) for s < t.

  Arguments:
    t: The current time.
    s: An earlier time, or an array of them.
    H: The Hurst parameter, 1/2 < H < 1.

  Returns:
    phi(t, s), a float or an array shaped like s.

  Exceptions:
    MemfpkDomainError:
      If any s >= t; the kernel is only integrated over s < t.
  """
  H = mu.require_hurst(H)
  lag = float(t) - np.asarray(s, dtype=float)
  if np.any(lag <= 0.0):
    raise mu.MemfpkDomainError("phi(t, s) requires s < t, got t = " + repr(t) +
                               ", s = " + repr(s) + ".")
  value = H*(2.0*H - 1.0)*lag**(2.0*H - 2.0)
  if np.ndim(value) == 0:
    return float(value)
  return value

def _nonzero_h(spec, x):
  h = np.asarray(spec.h(x), dtype=float)
  zero = (h == 0.0)
  if np.any(zero):
    where = np.asarray(x, dtype=float)
    if where.ndim > 0:
      where = where[np.broadcast_to(zero, where.shape)][0]
    raise mu.MemfpkDomainError("h(x) = 0 at the singular point x = " +
                               repr(float(where)) + ".")
  return h

def phi1(spec, x):
  """phi1 = f' - f h'/h + g (g'' - (g' h h' + g h h'' - g' h'^2)/h^2)/2.

  If the system carries a phi1_override callable it is used instead, e.g. the
  Verhulst exponent -2 beta x.

  Arguments:
    spec: A SystemSpec.
    x: A state or an array of states.

  Returns:
    phi1(x) with the shape of x.

  Exceptions:
    MemfpkDomainError:
      If h(x) = 0 at some x.
  """
  override = getattr(spec, "phi1_override", None)
  if override != None:
    return override(x)
  h = _nonzero_h(spec, x)
  f = spec.f(x)
  g = spec.g(x)
  g_p = spec.g_prime(x)
  h_p = spec.h_prime(x)
  correction = (g_p*h*h_p + g*h*spec.h_second(x) - g_p*h_p**2)/h**2
  return spec.f_prime(x) - f*h_p/h + 0.5*g*(spec.g_second(x) - correction)

def phi2(spec, x):
  """phi2 = g' - g h'/h; vanishes exactly when g h' = h g'.

  Exceptions:
    MemfpkDomainError:
      If h(x) = 0 at some x.
  """
  h = _nonzero_h(spec, x)
  return spec.g_prime(x) - spec.g(x)*spec.h_prime(x)/h

def commutativity_check(spec, grid, tol=1.0e-10):
  """Checks the commutativity condition g h' = h g' on the nodes of a grid.

  Arguments:
    spec: A SystemSpec.
    grid: A Grid1D, or an array of states.
    tol (optional): Absolute tolerance. Defaults to 1e-10.

  Returns:
    True if max |g h' - h g'| <= tol over the nodes.
  """
  x = np.asarray(getattr(grid, "nodes", grid), dtype=float)
  defect = spec.g(x)*spec.h_prime(x) - spec.h(x)*spec.g_prime(x)
  return bool(np.max(np.abs(np.broadcast_to(defect, x.shape))) <= tol)

def kernel_case_constant(H, t):
  """Closed-form kernel factor H t^(2H-1) for constant history (phi1 = 0)."""
  H = mu.require_hurst(H)
  t = mu.require_finite("t", t)
  if t < 0.0:
    raise mu.MemfpkDomainError("t must be non-negative, got " + repr(t) + ".")
  if t == 0.0:
    return 0.0
  return H*t**(2.0*H - 1.0)

def kernel_case_linear(alpha, H, t):
  """Closed-form kernel factor of the linear system f = -alpha x.

  int_0^t e^(-alpha(t-s)) phi(t, s) ds
    = H(2H-1) alpha^(1-2H) (Gamma(2H-1) - Gamma(2H-1, alpha t))

  The bracket is evaluated as the lower incomplete Gamma function, which avoids
  the cancellation of the difference for small alpha t.

  Arguments:
    alpha: The decay rate, alpha > 0.
    H: The Hurst parameter, 1/2 < H < 1.
    t: The time, t >= 0.

  Returns:
    The kernel factor as a float; 0 at t = 0.

  Exceptions:
    MemfpkDomainError:
      If alpha <= 0, t < 0 or H is outside (1/2, 1).
  """
  alpha = mu.require_positive("alpha", alpha)
  H = mu.require_hurst(H)
  t = mu.require_finite("t", t)
  if t < 0.0:
    raise mu.MemfpkDomainError("t must be non-negative, got " + repr(t) + ".")
  if t == 0.0:
    return 0.0
  a = 2.0*H - 1.0
  return H*a*alpha**(-a)*ms.lower_incomplete_gamma(a, alpha*t)

class KernelMoments:
  def __init__(self, t, K0=0.0, K1=0.0, K2=0.0, K3=0.0):
    """Constructor for KernelMoments, the history integrals
    K_j = int_0^t exp{int_s^t m1 du} (t-s)^j phi(t, s) ds at time t.
    """
    self.t = float(t)
    self.K0 = float(K0)
    self.K1 = float(K1)
    self.K2 = float(K2)
    self.K3 = float(K3)

  def as_array(self):
    return np.array([self.K0, self.K1, self.K2, self.K3])

  @classmethod
  def from_array(cls, t, values):
    return cls(t, values[0], values[1], values[2], values[3])

  def scaled(self, H):
    """K_j/t^(2H-1+j); at t = 0 the t -> 0 limits H(2H-1)/(2H-1+j)."""
    exponents = 2.0*H - 1.0 + np.arange(4)
    if self.t == 0.0:
      return H*(2.0*H - 1.0)/exponents
    return self.as_array()/self.t**exponents

  @classmethod
  def unscaled(cls, t, H, scaled):
    exponents = 2.0*H - 1.0 + np.arange(4)
    if t == 0.0:
      return cls(0.0)
    return cls.from_array(t, np.asarray(scaled)*t**exponents)

  def describe(self):
    return {"t":self.t, "K0":self.K0, "K1":self.K1, "K2":self.K2, "K3":self.K3}

class VadaState:
  def __init__(self, refresh, micro_step, times=(), means=(), integrals=()):
    """Constructor for a VadaState, the macro-time history of E[phi1(X_t)].

    Arguments:
      refresh: The macro refresh interval in model seconds.
      micro_step: The solver time step; macro times may deviate from the exact
        refresh spacing by half of it.
      times, means, integrals (optional): Recorded macro times, means m1 and the
        trapezoid integrals I of m1. Use vada_record_mean to extend a state.
    """
    self.refresh = mu.require_positive("refresh", refresh)
    self.micro_step = mu.require_positive("micro_step", micro_step)
    self.times = np.array(times, dtype=float)
    self.means = np.array(means, dtype=float)
    self.integrals = np.array(integrals, dtype=float)

  def __len__(self):
    return len(self.times)

  def last_time(self):
    if len(self.times) == 0:
      return None
    return float(self.times[-1])

  def last_mean(self):
    if len(self.means) == 0:
      return 0.0
    return float(self.means[-1])

  def integral_at(self, t):
    """I(t), linear between macro times."""
    return float(np.interp(t, self.times, self.integrals))

def vada_record_mean(state, t, m1):
  """Appends one macro-time mean of phi1 to a VadaState.

  Arguments:
    state: The VadaState.
    t: The macro time. The first record may be at any time (the solver records at
      t = 0); later records must follow the last by one refresh interval, within
      half a micro step.
    m1: E[phi1(X_t)].

  Returns:
    A new VadaState with I extended by the trapezoid rule.

  Exceptions:
    MemfpkDomainError:
      If t is not increasing, is off the refresh spacing, or m1 is not finite.
  """
  t = mu.require_finite("t", t)
  m1 = mu.require_finite("m1", m1)
  times = list(state.times)
  means = list(state.means)
  integrals = list(state.integrals)
  if len(times) == 0:
    integral = 0.0
  else:
    last = times[-1]
    if t <= last:
      raise mu.MemfpkDomainError("Macro times must increase, got " + repr(t) +
                                 " after " + repr(last) + ".")
    if abs((t - last) - state.refresh) > 0.5*state.micro_step + 1.0e-12:
      raise mu.MemfpkDomainError("Macro time " + repr(t) + " is not one refresh " +
                                 "interval (" + repr(state.refresh) + ") after " +
                                 repr(last) + ".")
    integral = integrals[-1] + 0.5*(t - last)*(means[-1] + m1)
  times.append(t)
  means.append(m1)
  integrals.append(integral)
  return VadaState(state.refresh, state.micro_step, times, means, integrals)

@functools.lru_cache(maxsize=64)
def _jacobi_rule(exponent):
  # Nodes/weights on [0, 1] for the weight v^exponent.
  nodes, weights = scipy_special.roots_jacobi(_QUADRATURE_NODES, 0.0, exponent)
  return 0.5*(nodes + 1.0), weights*0.5**(exponent + 1.0)

@functools.lru_cache(maxsize=1)
def _legendre_rule():
  nodes, weights = np.polynomial.legendre.leggauss(_QUADRATURE_NODES)
  return 0.5*(nodes + 1.0), 0.5*weights

def _history_moments(times, integrals, t, H, order):
  # K_j, j = 0..order, for the piecewise-linear integral I on the macro nodes.
  # Within a subinterval exp{I(t) - I(s)} is an exact exponential; the subinterval
  # touching s = t carries the v^(2H-2+j) singularity in a Gauss-Jacobi rule.
  mask = times < t
  nodes = np.append(times[mask], t)
  values = np.append(integrals[mask], np.interp(t, times, integrals))
  lags = t - nodes
  widths = lags[:-1] - lags[1:]
  slopes = (values[1:] - values[:-1])/widths
  # exp{I(t) - I(s)} at the right end of each subinterval.
  right = np.exp(values[-1] - values[1:])
  prefactor = H*(2.0*H - 1.0)
  moments = np.zeros(4)

  legendre_nodes, legendre_weights = _legendre_rule()
  inner = slice(0, len(widths) - 1)
  v = lags[1:][inner, None] + widths[inner, None]*legendre_nodes[None, :]
  factor = right[inner, None]*np.exp(slopes[inner, None]*(v - lags[1:][inner, None]))
  for j in range(order + 1):
    integrand = factor*v**(2.0*H - 2.0 + j)
    moments[j] = np.sum(widths[inner, None]*legendre_weights[None, :]*integrand)

  last = widths[-1]
  for j in range(order + 1):
    exponent = 2.0*H - 2.0 + j
    jacobi_nodes, jacobi_weights = _jacobi_rule(exponent)
    v_last = last*jacobi_nodes
    smooth = right[-1]*np.exp(slopes[-1]*v_last)
    moments[j] += last**(exponent + 1.0)*np.sum(jacobi_weights*smooth)
  return prefactor*moments

def vada_kernel_moments(state, t, H, order=2):
  """History moments K_j(t) = int_0^t exp{I(t) - I(s)} (t-s)^j phi(t, s) ds.

  I is the recorded integral of E[phi1], linear between macro times. The power
  weight is integrated against the exact exponential of each subinterval (Gauss-
  Legendre away from s = t, Gauss-Jacobi on the weakly singular last subinterval),
  so a constant mean history reproduces the Case IV closed form.

  Arguments:
    state: A VadaState covering [0, t].
    t: The evaluation time.
    H: The Hurst parameter, 1/2 < H < 1.
    order (optional): The VADA truncation order 1, 2 or 3; K_j is computed for
      j <= order and the rest are 0. Defaults to 2.

  Returns:
    KernelMoments at t; all zero at t = 0.

  Exceptions:
    MemfpkDomainError:
      If t lies beyond the recorded history or order is not 1, 2 or 3.
  """
  H = mu.require_hurst(H)
  t = mu.require_finite("t", t)
  if order not in VADA_ORDERS:
    raise mu.MemfpkDomainError("VADA order must be 1, 2 or 3, got " + repr(order) +
                               ".")
  if len(state) == 0 or t < state.times[0] - 1.0e-12:
    raise mu.MemfpkDomainError("No recorded history covers t = " + repr(t) + ".")
  if t > state.times[-1] + 0.5*state.micro_step:
    raise mu.MemfpkDomainError("t = " + repr(t) + " is beyond the recorded " +
                               "history ending at " + repr(state.last_time()) + ".")
  if t <= state.times[0]:
    return KernelMoments(t)
  return KernelMoments.from_array(t, _history_moments(state.times, state.integrals,
                                                      t, H, order))

def vada_psi(moments, phi1_x, m1_now, order=2):
  """The VADA kernel factor Psi = K0 + d K1 + d^2 K2/2 (+ d^3 K3/6 at order 3).

  Arguments:
    moments: KernelMoments at the current time.
    phi1_x: phi1 at the state(s) x, a float or an array.
    m1_now: The current mean E[phi1(X_t)].
    order (optional): Truncation order 1, 2 or 3. Defaults to 2.

  Returns:
    Psi with the shape of phi1_x.
  """
  d = np.asarray(phi1_x, dtype=float) - m1_now
  psi = moments.K0 + d*moments.K1
  if order >= 2:
    psi = psi + 0.5*d**2*moments.K2
  if order >= 3:
    psi = psi + d**3*moments.K3/6.0
  if np.ndim(psi) == 0:
    return float(psi)
  return psi

class ClampRecord:
  """Counts the nodes where the diffusion coefficient was clamped to its floor."""
  def __init__(self):
    self.events = 0

class NodeCoefficients:
  def __init__(self, spec, x, floor=DIFFUSION_FLOOR):
    """Constructor for NodeCoefficients, the system functions frozen at fixed states.

    The solver assembles a_mem and b_mem at the grid nodes every micro step; only
    Psi changes between steps.

    Arguments:
      spec: A SystemSpec.
      x: A state or an array of states.
      floor (optional): The diffusion floor. Defaults to 1e-12.
    """
    self.x = np.asarray(x, dtype=float)
    g = np.asarray(spec.g(x), dtype=float)
    h = np.asarray(spec.h(x), dtype=float)
    self.drift = np.asarray(spec.f(x), dtype=float) + 0.5*g*np.asarray(spec.g_prime(x))
    self.drift_memory = h*np.asarray(spec.h_prime(x), dtype=float)
    self.diffusion = 0.5*g**2
    self.diffusion_memory = h**2
    self.floor = float(floor)

  def evaluate(self, psi, clamps=None):
    """(a_mem, b_mem) for the kernel factor psi (a scalar or one value per state).

    Exceptions:
      MemfpkDomainError:
        If psi is not finite.
    """
    psi = np.asarray(psi, dtype=float)
    if not np.all(np.isfinite(psi)):
      raise mu.MemfpkDomainError("psi must be finite.")
    a_mem = self.drift + self.drift_memory*psi
    b_mem = self.diffusion + self.diffusion_memory*psi
    low = b_mem < self.floor
    if np.any(low):
      if clamps != None:
        clamps.events += int(np.count_nonzero(low))
      b_mem = np.maximum(b_mem, self.floor)
    shape = np.broadcast(self.x, a_mem, b_mem).shape
    if shape == ():
      return float(a_mem), float(b_mem)
    return np.broadcast_to(a_mem, shape).copy(), np.broadcast_to(b_mem, shape).copy()

def mem_coefficients(spec, x, psi, clamps=None, floor=DIFFUSION_FLOOR):
  """Memory-dependent drift and diffusion coefficients.

  a_mem = f + g g'/2 + h h' Psi,   b_mem = g^2/2 + h^2 Psi, clamped below at floor.

  Arguments:
    spec: A SystemSpec.
    x: A state or an array of states.
    psi: The kernel factor at x (same shape, or a scalar).
    clamps (optional): A ClampRecord counting clamped nodes. Defaults to None.
    floor (optional): The diffusion floor. Defaults to 1e-12.

  Returns:
    (a_mem, b_mem) with the shape of x.

  Exceptions:
    MemfpkDomainError:
      If psi is not finite.
  """
  return NodeCoefficients(spec, x, floor).evaluate(psi, clamps)
