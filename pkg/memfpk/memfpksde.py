"""memfpk stochastic differential equations.

The scalar system

  dX = f(X) dt + g(X) dW + h(X) dB_H,

with W a Brownian motion and B_H an independent fractional Brownian motion, read
in the Stratonovich sense. This module defines the system (SystemSpec) and its
initial law (InitialLaw), and provides the Monte Carlo oracle: Heun integration of
path ensembles, histogram densities and moments, and the path-functional estimate
of the memory kernel factor Psi(x, t).

Path blocks may be simulated by forked worker processes. Every path draws its
initial state and noise from its own substream, so the ensemble does not depend on
the number of workers.

License:
Author: memfpk developers
"""
import time
import warnings

import numpy as np

from memfpk import memfpkfgn as mf
from memfpk import memfpkgrid as mg
from memfpk import memfpkkernel as mk
from memfpk import memfpkstats as mst
from memfpk import memfpkutilities as mu

DIVERGENCE_WARNING_FRACTION = 0.001
DIVERGENCE_ERROR_FRACTION = 0.05
INSIDE_WARNING_FRACTION = 0.995
INSIDE_ERROR_FRACTION = 0.9
MIN_BIN_COUNT = 50

def _broadcasting(function):
  # Scalars in, float out; arrays in, an array of the same shape out.
  def evaluate(x):
    value = function(x)
    if np.ndim(x) == 0:
      return float(value)
    return np.broadcast_to(np.asarray(value, dtype=float), np.shape(x)).copy()
  return evaluate

class SystemSpec:
  def __init__(self, f, f_prime, g, g_prime, g_second, h, h_prime, h_second,
               label="", domain=None, phi1_override=None):
    """Constructor for a SystemSpec.

    All callables take a state, or a numpy array of states, and may return a
    scalar for a constant function; the stored callables broadcast their result to
    the shape of the argument.

    Arguments:
      f, f_prime: The drift and its derivative.
      g, g_prime, g_second: The white-noise intensity and its two derivatives.
      h, h_prime, h_second: The fractional-noise intensity and its two derivatives.
      label (optional): A name for the system. Defaults to "".
      domain (optional): The (lower, upper) state domain, either end may be None.
        Defaults to the whole real line.
      phi1_override (optional): A callable replacing the phi1 composition of
        f, g and h in the memory kernel. Defaults to None.

    Exceptions:
      TypeError:
        If any of the eight functions is not callable.
      MemfpkDomainError:
        If the domain is empty.
    """
    functions = {"f":f, "f_prime":f_prime, "g":g, "g_prime":g_prime,
                 "g_second":g_second, "h":h, "h_prime":h_prime, "h_second":h_second}
    for name, function in functions.items():
      if not callable(function):
        raise TypeError("The argument " + name + " must be callable.")
      setattr(self, name, _broadcasting(function))
    if phi1_override != None and not callable(phi1_override):
      raise TypeError("The argument phi1_override must be callable.")
    self.phi1_override = None
    if phi1_override != None:
      self.phi1_override = _broadcasting(phi1_override)
    self.label = str(label)
    if domain == None:
      domain = (None, None)
    lower, upper = domain
    lower = None if lower == None else float(lower)
    upper = None if upper == None else float(upper)
    if lower != None and upper != None and not lower < upper:
      raise mu.MemfpkDomainError("The domain (" + repr(lower) + ", " + repr(upper) +
                                 ") is empty.")
    self.domain = (lower, upper)

  def with_phi1(self, phi1_override, label=None):
    """A copy of this system whose memory kernel uses another phi1."""
    return SystemSpec(self.f, self.f_prime, self.g, self.g_prime, self.g_second,
                      self.h, self.h_prime, self.h_second,
                      self.label if label == None else label, self.domain,
                      phi1_override)

  def in_domain(self, x):
    """Boolean array (or bool) telling which states lie inside the open domain."""
    x = np.asarray(x, dtype=float)
    inside = np.ones(x.shape, dtype=bool)
    if self.domain[0] != None:
      inside &= x > self.domain[0]
    if self.domain[1] != None:
      inside &= x < self.domain[1]
    if inside.ndim == 0:
      return bool(inside)
    return inside

  def validate_derivatives(self, points, tolerance=1.0e-6):
    """Compares the supplied derivatives with central differences.

    Each of f', g', h', g'', h'' is compared with the central difference of its
    antiderivative over a step of 1e-5 max(1, |x|).

    Arguments:
      points: The states to check, inside the domain.
      tolerance (optional): The allowed error relative to max(1, |derivative|).
        Defaults to 1e-6.

    Returns:
      A dict from derivative name to its largest scaled error.

    Exceptions:
      MemfpkDomainError:
        If a derivative disagrees with its difference quotient beyond tolerance.
    """
    x = np.atleast_1d(np.asarray(points, dtype=float))
    step = 1.0e-5*np.maximum(1.0, np.abs(x))
    pairs = [("f_prime", self.f, self.f_prime), ("g_prime", self.g, self.g_prime),
             ("g_second", self.g_prime, self.g_second),
             ("h_prime", self.h, self.h_prime), ("h_second", self.h_prime, self.h_second)]
    errors = {}
    for name, function, derivative in pairs:
      difference = (function(x + step) - function(x - step))/(2.0*step)
      exact = derivative(x)
      scaled = np.abs(difference - exact)/np.maximum(1.0, np.abs(exact))
      worst = int(np.argmax(scaled))
      errors[name] = float(scaled[worst])
      if not scaled[worst] <= tolerance:
        raise mu.MemfpkDomainError(name + " of " + repr(self.label) + " disagrees " +
                                   "with central differences at x = " +
                                   repr(float(x[worst])) + " (scaled error " +
                                   repr(errors[name]) + ").")
    return errors

  def is_commutative(self, grid, tol=1.0e-10):
    return mk.commutativity_check(self, grid, tol)

class InitialLaw:
  def __init__(self, kind, x0=None, mu0=None, var0=None):
    """Constructor for an InitialLaw, the law of X_0.

    Arguments:
      kind: "point" or "gaussian".
      x0 (optional): The initial state of a point law.
      mu0 (optional): The mean of a Gaussian law.
      var0 (optional): The variance of a Gaussian law, var0 > 0.

    Exceptions:
      MemfpkDomainError:
        If kind is unknown or the parameters of the kind are missing or invalid.
    """
    self.kind = str(kind)
    if self.kind == "point":
      if x0 == None:
        raise mu.MemfpkDomainError("A point law requires x0.")
      self.x0 = mu.require_finite("x0", x0)
      self.mu0 = self.x0
      self.var0 = 0.0
    elif self.kind == "gaussian":
      if mu0 == None or var0 == None:
        raise mu.MemfpkDomainError("A gaussian law requires mu0 and var0.")
      self.mu0 = mu.require_finite("mu0", mu0)
      self.var0 = mu.require_positive("var0", var0)
      self.x0 = None
    else:
      raise mu.MemfpkDomainError("kind must be 'point' or 'gaussian', got " +
                                 repr(kind) + ".")

  def sample(self, generator, size):
    """Draws size initial states from a numpy Generator."""
    if self.kind == "point":
      return np.full(int(size), self.x0)
    return self.mu0 + np.sqrt(self.var0)*generator.standard_normal(int(size))

  def describe(self):
    if self.kind == "point":
      return {"kind":self.kind, "x0":self.x0}
    return {"kind":self.kind, "mu0":self.mu0, "var0":self.var0}

class PathEnsemble:
  def __init__(self, states, step_indices, noise, label, divergent, dt=None):
    """Constructor for a PathEnsemble. Use simulate_ensemble to create one.

    Arguments:
      states: n_paths x len(step_indices) array of states.
      step_indices: The increment-grid step of every stored column, increasing.
      noise: The generating NoiseEnsemble.
      label: The SystemSpec label.
      divergent: Boolean per-path flags; a divergent path is frozen at its last
        finite state and excluded from every statistic.
      dt (optional): The grid step; defaults to the step of noise, which may be
        None for merged ensembles.
    """
    self.states = np.asarray(states, dtype=float)
    self.states.setflags(write=False)
    self.step_indices = np.array(step_indices, dtype=int)
    self.noise = noise
    self.label = str(label)
    self.divergent = np.array(divergent, dtype=bool)
    self.dt = float(noise.dt if dt == None else dt)
    self.system_samples = []

  @property
  def n_paths(self):
    return self.states.shape[0]

  @property
  def divergent_count(self):
    return int(np.count_nonzero(self.divergent))

  def times(self):
    return self.step_indices*self.dt

  def column(self, t_index):
    """The stored column of grid step t_index.

    Exceptions:
      KeyError:
        If step t_index was not stored.
    """
    where = np.searchsorted(self.step_indices, int(t_index))
    if where >= len(self.step_indices) or self.step_indices[where] != int(t_index):
      raise KeyError("Step " + str(t_index) + " was not stored in the ensemble.")
    return int(where)

  def values_at(self, t_index):
    """States of the non-divergent paths at grid step t_index."""
    return self.states[~self.divergent, self.column(t_index)]

  def has_full_history(self, t_index):
    """Whether every step 0..t_index is stored."""
    return (len(self.step_indices) > int(t_index) and
            np.array_equal(self.step_indices[:int(t_index) + 1],
                           np.arange(int(t_index) + 1)))

def heun_step(spec, x, dW, dBH, dt):
  """One Stratonovich Heun (predictor-corrector) step.

  Arguments:
    spec: The SystemSpec.
    x: The state, or an array of states.
    dW: The Brownian increment(s) over the step.
    dBH: The fractional Brownian increment(s) over the step.
    dt: The step, dt > 0.

  Returns:
    The new state(s). Non-finite values are returned as computed; the caller flags
    the path as divergent.
  """
  dt = mu.require_positive("dt", dt)
  f = spec.f(x)
  g = spec.g(x)
  h = spec.h(x)
  predictor = x + f*dt + g*dW + h*dBH
  return (x + 0.5*(f + spec.f(predictor))*dt + 0.5*(g + spec.g(predictor))*dW +
          0.5*(h + spec.h(predictor))*dBH)

def _initial_states(init, seed, paths):
  if init.kind == "point":
    return np.full(len(paths), init.x0)
  states = np.empty(len(paths))
  for row, path in enumerate(paths):
    states[row] = init.sample(mf.path_generator(seed, mf.INITIAL_STREAM, path), 1)[0]
  return states

def _simulate_chunk(task, shared):
  (rows, keep) = task
  (spec, init, noise) = shared
  x = _initial_states(init, noise.seed, noise.path_indices()[rows.start:rows.stop])
  dW = noise.gwn_increments[rows.start:rows.stop]
  dB = noise.fgn_increments[rows.start:rows.stop]
  stored = np.empty((len(x), len(keep)))
  divergent = ~np.isfinite(x)
  column = 0
  if keep[0] == 0:
    stored[:, 0] = x
    column = 1
  with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
    for step in range(noise.n_steps):
      new = heun_step(spec, x, dW[:, step], dB[:, step], noise.dt)
      divergent |= ~np.isfinite(new)
      x = np.where(divergent, x, new)
      if column < len(keep) and keep[column] == step + 1:
        stored[:, column] = x
        column += 1
  return stored, divergent

def simulate_ensemble(spec, init, noise, workers=1, keep=None):
  """Integrates one path per noise row with the Heun scheme.

  Arguments:
    spec: The SystemSpec.
    init: The InitialLaw; initial states come from the initial-state substream of
      every path.
    noise: The NoiseEnsemble supplying dW and dB_H.
    workers (optional): Number of worker processes. Defaults to 1.
    keep (optional): Increasing grid steps to store. Defaults to every step
      0..n_steps.

  Returns:
    A PathEnsemble.

  Exceptions:
    MemfpkDomainError:
      If keep holds steps outside 0..n_steps or is not increasing.
    MemfpkNumericalError:
      If more than 5% of the paths diverge. Above 0.1% a warning is issued.
  """
  started = time.time()
  if keep == None:
    keep = np.arange(noise.n_steps + 1)
  keep = np.array(keep, dtype=int)
  if (len(keep) == 0 or keep[0] < 0 or keep[-1] > noise.n_steps or
      np.any(np.diff(keep) <= 0)):
    raise mu.MemfpkDomainError("keep must be increasing steps in 0.." +
                               str(noise.n_steps) + ".")
  tasks = [(rows, keep) for rows in mu.split_range(noise.n_paths, workers)]
  results = mu.map_chunks(_simulate_chunk, tasks, workers,
                          shared=(spec, init, noise))
  states = np.concatenate([result[0] for result in results], axis=0)
  divergent = np.concatenate([result[1] for result in results])

  count = int(np.count_nonzero(divergent))
  fraction = count/float(noise.n_paths)
  if fraction > DIVERGENCE_ERROR_FRACTION:
    raise mu.MemfpkNumericalError(str(count) + " of " + str(noise.n_paths) +
                                  " paths of " + repr(spec.label) + " diverged.")
  if fraction > DIVERGENCE_WARNING_FRACTION:
    warnings.warn(str(count) + " of " + str(noise.n_paths) + " paths of " +
                  repr(spec.label) + " diverged and are excluded.")
  ensemble = PathEnsemble(states, keep, noise, spec.label, divergent)
  ensemble.system_samples.append(mu.create_system_sample(
      "memfpk_ensemble", {"paths":noise.n_paths, "steps":noise.n_steps,
                          "workers":int(workers), "divergent_paths":count,
                          "seconds":time.time() - started}))
  return ensemble

def empirical_pdf(ensemble, t_index, grid):
  """Histogram density of the ensemble at grid step t_index.

  Samples are binned into the grid cells; the density is scaled so its trapezoid
  mass equals the fraction of samples inside the grid.

  Arguments:
    ensemble: A PathEnsemble.
    t_index: The grid step.
    grid: The Grid1D.

  Returns:
    A PdfField at time t_index dt.

  Exceptions:
    MemfpkDomainError:
      If fewer than 90% of the samples lie inside the grid. Below 99.5% a warning
      is issued.
  """
  values = ensemble.values_at(t_index)
  index = grid.cell_index(values)
  inside = index >= 0
  fraction = float(np.mean(inside)) if len(values) > 0 else 0.0
  if fraction < INSIDE_ERROR_FRACTION:
    raise mu.MemfpkDomainError("Only " + repr(fraction) + " of the samples at step " +
                               str(t_index) + " lie inside [" + repr(grid.x_min) +
                               ", " + repr(grid.x_max) + "].")
  if fraction < INSIDE_WARNING_FRACTION:
    warnings.warn("Only " + repr(fraction) + " of the samples at step " +
                  str(t_index) + " lie inside the grid.")
  counts = np.bincount(index[inside], minlength=grid.n_cells)
  density = counts/(len(values)*grid.dx)
  mass = mu.trapezoid(density, grid.dx)
  if mass > 0.0:
    density = density*fraction/mass
  return mg.PdfField(density, t_index*ensemble.dt, grid)

def empirical_moments(ensemble, t_index):
  """Mean, std, skewness and raw kurtosis of the non-divergent paths at t_index.

  Returns:
    A MomentSet; skewness and kurtosis are None for a constant ensemble.

  Exceptions:
    ValueError:
      If fewer than two non-divergent paths remain.
  """
  return mst.moments_from_samples(ensemble.values_at(t_index))

class KernelEstimate:
  def __init__(self, values, counts, standard_errors, time, grid):
    """Constructor for a KernelEstimate, the binned Monte Carlo estimate of Psi.

    Arguments:
      values: Per-cell conditional means; NaN where a bin is too sparse.
      counts: Per-cell path counts.
      standard_errors: Per-cell standard errors of the means; NaN where missing.
      time: The estimation time.
      grid: The Grid1D.
    """
    self.values = np.asarray(values, dtype=float)
    self.counts = np.asarray(counts, dtype=int)
    self.standard_errors = np.asarray(standard_errors, dtype=float)
    self.time = float(time)
    self.grid = grid

  def populated(self):
    return np.isfinite(self.values)

def _kernel_chunk(task, shared):
  # Per-path F(t) for one block of rows, and its binned sums.
  (rows, t_index) = task
  (spec, ensemble, H, grid, phi1) = shared
  valid = np.flatnonzero(~ensemble.divergent[rows.start:rows.stop]) + rows.start
  paths = ensemble.states[valid, :t_index + 1]
  dW = ensemble.noise.gwn_increments[valid, :t_index]
  dt = ensemble.dt
  t = t_index*dt
  with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
    p1 = phi1(paths) if phi1 != None else mk.phi1(spec, paths)
    running = mu.cumulative_trapezoid(p1, dt)
    ito = np.zeros(paths.shape)
    ito[:, 1:] = np.cumsum(mk.phi2(spec, paths[:, :-1])*dW, axis=1)
    exponent = (running[:, -1:] - running) + (ito[:, -1:] - ito)
    middle = 0.5*(exponent[:, :-1] + exponent[:, 1:])
    lags = t - dt*np.arange(t_index + 1)
    lags[-1] = 0.0
    weights = H*(lags[:-1]**(2.0*H - 1.0) - lags[1:]**(2.0*H - 1.0))
    functional = np.exp(middle).dot(weights)
  usable = np.isfinite(functional)
  index = grid.cell_index(paths[usable, -1])
  inside = index >= 0
  values = functional[usable][inside]
  cells = index[inside]
  counts = np.bincount(cells, minlength=grid.n_cells)
  sums = np.bincount(cells, weights=values, minlength=grid.n_cells)
  squares = np.bincount(cells, weights=values**2, minlength=grid.n_cells)
  return counts, sums, squares, int(np.count_nonzero(~usable))

def mc_kernel_estimate(spec, ensemble, t_index, H, grid, phi1=None,
                       min_count=MIN_BIN_COUNT, workers=1, chunk_size=2048):
  """Monte Carlo estimate of the kernel factor Psi(x, t) along simulated paths.

  For every path

    F(t) = int_0^t exp{int_s^t phi1(X_u) du + int_s^t phi2(X_u) dW_u} phi(t, s) ds,

  with the du integral by the trapezoid rule, the dW integral as a left-endpoint
  (Ito) sum over the ensemble's own Brownian increments, and the s integral by
  product integration: the power weight is integrated exactly over each step and
  the exponential is taken at the step midpoint. Psi(x, t) = E[F(t) | X_t = x] is
  the mean of F over the paths ending in the cell of x.

  Arguments:
    spec: The SystemSpec.
    ensemble: A PathEnsemble storing every step up to t_index.
    t_index: The grid step of the estimation time.
    H: The Hurst parameter, 1/2 < H < 1.
    grid: The Grid1D whose cells are the bins.
    phi1 (optional): A callable replacing the phi1 of the spec. Defaults to None.
    min_count (optional): Bins with fewer paths are missing (NaN). Defaults to 50.
    workers (optional): Number of worker processes. Defaults to 1.
    chunk_size (optional): Paths per block. Defaults to 2048.

  Returns:
    A KernelEstimate; at t_index = 0 every value is 0.

  Exceptions:
    MemfpkDomainError:
      If the ensemble does not store the full history up to t_index or has no
      noise reference.
  """
  H = mu.require_hurst(H)
  t_index = int(t_index)
  if ensemble.noise == None or t_index < 0 or not ensemble.has_full_history(t_index):
    raise mu.MemfpkDomainError("The ensemble does not store every step up to " +
                               str(t_index) + ".")
  zeros = np.zeros(grid.n_cells)
  if t_index == 0:
    return KernelEstimate(zeros, zeros, zeros, 0.0, grid)
  blocks = max(1, int(np.ceil(ensemble.n_paths/float(chunk_size))))
  tasks = [(rows, t_index) for rows in mu.split_range(ensemble.n_paths, blocks)]
  results = mu.map_chunks(_kernel_chunk, tasks, workers,
                          shared=(spec, ensemble, H, grid, phi1))
  counts = np.sum([result[0] for result in results], axis=0)
  sums = np.sum([result[1] for result in results], axis=0)
  squares = np.sum([result[2] for result in results], axis=0)
  dropped = sum(result[3] for result in results)
  if dropped > 0:
    warnings.warn(str(dropped) + " paths have a non-finite kernel functional.")

  populated = counts >= int(min_count)
  values = np.full(grid.n_cells, np.nan)
  errors = np.full(grid.n_cells, np.nan)
  n = counts[populated]
  values[populated] = sums[populated]/n
  variance = np.maximum(squares[populated]/n - values[populated]**2, 0.0)
  errors[populated] = np.sqrt(variance*n/(n - 1.0))/np.sqrt(n)
  return KernelEstimate(values, counts, errors, t_index*ensemble.dt, grid)

def merge_ensembles(parts):
  """Concatenates the paths of ensembles that store the same steps.

  The merged ensemble keeps no noise reference, so it cannot feed
  mc_kernel_estimate.

  Exceptions:
    ValueError:
      If parts is empty or the stored steps or time steps differ.
  """
  if len(parts) == 0:
    raise ValueError("At least one ensemble is needed.")
  first = parts[0]
  for part in parts[1:]:
    if (not np.array_equal(part.step_indices, first.step_indices) or
        part.dt != first.dt):
      raise ValueError("Ensembles store different steps.")
  merged = PathEnsemble(np.concatenate([part.states for part in parts], axis=0),
                        first.step_indices, None, first.label,
                        np.concatenate([part.divergent for part in parts]), first.dt)
  for part in parts:
    merged.system_samples.extend(part.system_samples)
  return merged
