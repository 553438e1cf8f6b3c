"""memfpk fractional Gaussian noise.

Exact sampling of fractional Brownian motion increments (FGN) together with the
independent Gaussian white noise (GWN) increments that drive the Monte Carlo
oracle, and the second-order descriptors of the noise model.

FGN increments are drawn by circulant embedding of the increment autocovariance
(Davies-Harte, in the form given by Dieker, "Simulation of fractional Brownian
motion", 2006). If the embedding has an eigenvalue below -1e-10 the sampler falls
back to the Cholesky factor of the n_steps x n_steps covariance.

Random numbers come from counter-based Philox streams. The root seed is the Philox
key and every (stream, path) pair owns a disjoint block of the 256-bit counter
space, so a path's draws do not depend on how paths are split between workers.

License:
Author: memfpk developers
"""
import math

import numpy as np
from scipy import linalg

from memfpk import memfpkspecial as ms
from memfpk import memfpkutilities as mu

FGN_STREAM = 0
GWN_STREAM = 1
INITIAL_STREAM = 2

_EIGENVALUE_FLOOR = -1.0e-10

def path_generator(seed, stream, path):
  """Returns the numpy Generator of one (stream, path) substream.

  Arguments:
    seed: The root seed, an integer in [0, 2**64).
    stream: The stream index, e.g. FGN_STREAM.
    path: The path index.

  Exceptions:
    MemfpkDomainError:
      If seed is not an integer in [0, 2**64).
  """
  if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < 2**64:
    raise mu.MemfpkDomainError("seed must be an integer in [0, 2**64), got " +
                               repr(seed) + ".")
  counter = np.array([0, 0, int(stream), int(path)], dtype=np.uint64)
  return np.random.Generator(np.random.Philox(key=int(seed), counter=counter))

class IncrementGrid:
  def __init__(self, n_steps, dt):
    """Constructor for an IncrementGrid, the uniform time grid of a noise ensemble.

    Arguments:
      n_steps: The number of increments, a positive integer.
      dt: The time step in seconds, a positive real.

    Exceptions:
      MemfpkDomainError:
        If n_steps < 1 or dt <= 0.
    """
    if int(n_steps) != n_steps or int(n_steps) < 1:
      raise mu.MemfpkDomainError("n_steps must be a positive integer, got " +
                                 repr(n_steps) + ".")
    self.n_steps = int(n_steps)
    self.dt = mu.require_positive("dt", dt)

  @property
  def horizon(self):
    return self.n_steps*self.dt

  def times(self):
    """The n_steps + 1 grid times starting at 0."""
    return self.dt*np.arange(self.n_steps + 1)

class NoiseEnsemble:
  def __init__(self, fgn_increments, gwn_increments, H, grid, seed, method,
               first_path=0):
    """Constructor for a NoiseEnsemble. Use sample_noise to create one.

    Arguments:
      fgn_increments: n_paths x n_steps array of fractional Brownian increments.
      gwn_increments: n_paths x n_steps array of Brownian increments.
      H: The Hurst parameter of the FGN block.
      grid: The IncrementGrid.
      seed: The root seed.
      method: The FGN method actually used, "circulant" or "cholesky".
      first_path (optional): The substream index of the first row. Defaults to 0.
    """
    self.fgn_increments = np.asarray(fgn_increments, dtype=float)
    self.gwn_increments = np.asarray(gwn_increments, dtype=float)
    if self.fgn_increments.shape != self.gwn_increments.shape:
      raise ValueError("FGN and GWN blocks must have the same shape.")
    # Ensembles are values.
    self.fgn_increments.setflags(write=False)
    self.gwn_increments.setflags(write=False)
    self.H = float(H)
    self.grid = grid
    self.seed = int(seed)
    self.method = str(method)
    self.first_path = int(first_path)

  @property
  def n_paths(self):
    return self.fgn_increments.shape[0]

  @property
  def n_steps(self):
    return self.fgn_increments.shape[1]

  @property
  def dt(self):
    return self.grid.dt

  def seed_descriptor(self):
    return {"seed":self.seed, "H":self.H, "n_steps":self.grid.n_steps,
            "dt":self.grid.dt, "n_paths":self.n_paths, "first_path":self.first_path,
            "method":self.method}

  def path_indices(self):
    """The substream (path) index of every row."""
    return np.arange(self.first_path, self.first_path + self.n_paths)

def fgn_increment_autocov(H, lag, dt):
  """Autocovariance of fractional Brownian motion increments over a step dt.

  gamma(k) = dt^(2H) (|k+1|^(2H) + |k-1|^(2H) - 2|k|^(2H))/2

  Arguments:
    H: The Hurst parameter, 1/2 <= H < 1.
    lag: A non-negative integer lag, or an array of them.
    dt: The time step, dt > 0.

  Returns:
    gamma(lag), a float or an array shaped like lag.

  Exceptions:
    MemfpkDomainError:
      If H or dt are outside their domain or a lag is negative.
  """
  H = mu.require_hurst(H, allow_half=True)
  dt = mu.require_positive("dt", dt)
  k = np.asarray(lag, dtype=float)
  if np.any(k < 0) or np.any(k != np.floor(k)):
    raise mu.MemfpkDomainError("lag must be a non-negative integer, got " +
                               repr(lag) + ".")
  two_h = 2.0*H
  value = 0.5*dt**two_h*(np.abs(k + 1.0)**two_h + np.abs(k - 1.0)**two_h -
                         2.0*np.abs(k)**two_h)
  if np.ndim(value) == 0:
    return float(value)
  return value

def spectral_density(H, omega):
  """Power spectral density of unit FGN.

  S_H(omega) = H Gamma(2H) sin(H pi)/pi |omega|^(1-2H)

  Arguments:
    H: The Hurst parameter, 1/2 <= H < 1.
    omega: The angular frequency.

  Returns:
    S_H(omega) as a float. At omega = 0 the density diverges for H > 1/2 and
    math.inf is returned; for H = 1/2 it is the constant 1/(2 pi).

  Exceptions:
    MemfpkDomainError:
      If H is outside [1/2, 1) or omega is not finite.
  """
  H = mu.require_hurst(H, allow_half=True)
  omega = mu.require_finite("omega", omega)
  exponent = 1.0 - 2.0*H
  if omega == 0.0:
    if exponent < 0.0:
      return math.inf
    return 1.0/(2.0*math.pi)
  return H*ms.gamma_fn(2.0*H)*math.sin(H*math.pi)/math.pi*abs(omega)**exponent

def circulant_eigenvalues(H, n_steps):
  """Eigenvalues of the circulant embedding of the unit-step increment covariance.

  The embedding has size 2(n_steps - 1): first row gamma(0..n-1) followed by
  gamma(n-2..1).

  Returns:
    The real eigenvalues as an array, or an empty array when n_steps == 1.
  """
  if n_steps < 2:
    return np.zeros(0)
  autocov = fgn_increment_autocov(H, np.arange(n_steps), 1.0)
  row = np.concatenate([autocov, autocov[-2:0:-1]])
  return np.fft.fft(row).real

def _standard_normals(seed, stream, paths, size):
  normals = np.empty((len(paths), size))
  for row, path in enumerate(paths):
    normals[row] = path_generator(seed, stream, path).standard_normal(size)
  return normals

def _sample_chunk(task, factor):
  # One contiguous block of paths; used directly or through a worker pool.
  (H, n_steps, dt, seed, method, paths) = task
  scale = dt**H
  if n_steps == 1:
    fgn = _standard_normals(seed, FGN_STREAM, paths, 1)*scale
  elif method == "circulant":
    size = 2*(n_steps - 1)
    normals = _standard_normals(seed, FGN_STREAM, paths, 2*size)
    weighted = factor*(normals[:, :size] + 1j*normals[:, size:])
    fgn = np.fft.fft(weighted, axis=1).real[:, :n_steps]*scale
  else:
    normals = _standard_normals(seed, FGN_STREAM, paths, n_steps)
    fgn = normals.dot(factor.T)*scale
  gwn = _standard_normals(seed, GWN_STREAM, paths, n_steps)*math.sqrt(dt)
  return fgn, gwn

def sample_noise(H, grid, n_paths, seed, method="auto", workers=1, first_path=0):
  """Samples an ensemble of FGN and GWN increment paths.

  Arguments:
    H: The Hurst parameter, 1/2 <= H < 1.
    grid: An IncrementGrid.
    n_paths: The number of paths, a positive integer.
    seed: The root seed, an integer in [0, 2**64).
    method (optional): "auto" (circulant embedding with Cholesky fallback),
      "circulant" or "cholesky". Defaults to "auto".
    workers (optional): Number of worker processes. Results do not depend on it.
      Defaults to 1.
    first_path (optional): The path index of the first row. Ensembles drawn in
      batches with consecutive first_path values concatenate to the ensemble drawn
      at once. Defaults to 0.

  Returns:
    A NoiseEnsemble. The FGN block has the exact joint Gaussian law with covariance
    fgn_increment_autocov; the GWN block is i.i.d. N(0, dt) and independent of it.

  Exceptions:
    TypeError:
      If grid is not an IncrementGrid.
    MemfpkDomainError:
      If H, n_paths, seed or method are invalid, or method is "circulant" and the
      embedding has a negative eigenvalue.
    MemfpkNumericalError:
      If the Cholesky factorisation fails.
  """
  H = mu.require_hurst(H, allow_half=True)
  if not isinstance(grid, IncrementGrid):
    raise TypeError("The argument grid must be an IncrementGrid.")
  if int(n_paths) != n_paths or int(n_paths) < 1:
    raise mu.MemfpkDomainError("n_paths must be a positive integer, got " +
                               repr(n_paths) + ".")
  n_paths = int(n_paths)
  if int(first_path) != first_path or int(first_path) < 0:
    raise mu.MemfpkDomainError("first_path must be a non-negative integer, got " +
                               repr(first_path) + ".")
  first_path = int(first_path)
  path_generator(seed, FGN_STREAM, first_path)
  if method not in ("auto", "circulant", "cholesky"):
    raise mu.MemfpkDomainError("method must be 'auto', 'circulant' or 'cholesky', " +
                               "got " + repr(method) + ".")

  n_steps = grid.n_steps
  used = "cholesky" if method == "cholesky" else "circulant"
  factor = None
  if n_steps > 1 and used == "circulant":
    eigenvalues = circulant_eigenvalues(H, n_steps)
    if eigenvalues.min() < _EIGENVALUE_FLOOR:
      if method == "circulant":
        raise mu.MemfpkDomainError("Circulant embedding is not nonnegative for H = " +
                                   repr(H) + ", n_steps = " + str(n_steps) + ".")
      used = "cholesky"
    else:
      factor = np.sqrt(np.clip(eigenvalues, 0.0, None)/len(eigenvalues))
  if n_steps > 1 and used == "cholesky":
    covariance = linalg.toeplitz(fgn_increment_autocov(H, np.arange(n_steps), 1.0))
    try: factor = linalg.cholesky(covariance, lower=True)
    except linalg.LinAlgError:
      raise mu.MemfpkNumericalError("FGN covariance is not positive definite for " +
                                    "H = " + repr(H) + ", n_steps = " + str(n_steps) +
                                    ".")

  tasks = [(H, n_steps, grid.dt, int(seed), used,
            range(first_path + paths.start, first_path + paths.stop))
           for paths in mu.split_range(n_paths, workers)]
  results = mu.map_chunks(_sample_chunk, tasks, workers, shared=factor)
  fgn = np.concatenate([result[0] for result in results], axis=0)
  gwn = np.concatenate([result[1] for result in results], axis=0)
  return NoiseEnsemble(fgn, gwn, H, grid, seed, used, first_path)

def fbm_paths(ensemble):
  """Fractional Brownian motion paths with a leading zero column."""
  increments = ensemble.fgn_increments
  paths = np.zeros((increments.shape[0], increments.shape[1] + 1))
  paths[:, 1:] = np.cumsum(increments, axis=1)
  return paths

def aggregate_variance_exponent(increments, max_block=None):
  """Aggregated-variance estimate of 2H from FGN increment paths.

  Non-overlapping block sums of length m have variance proportional to m^(2H); the
  estimate is the least-squares slope of log variance against log m over
  m = 1, 2, 4, ... up to max_block.

  Arguments:
    increments: n_paths x n_steps array of FGN increments (zero mean).
    max_block (optional): The largest block length. Defaults to n_steps/8.

  Returns:
    The estimated exponent, close to 2H.

  Exceptions:
    ValueError:
      If fewer than two block lengths fit in a path.
  """
  increments = np.atleast_2d(np.asarray(increments, dtype=float))
  n_steps = increments.shape[1]
  if max_block == None:
    max_block = max(n_steps//8, 1)
  blocks = []
  m = 1
  while m <= max_block:
    blocks.append(m)
    m *= 2
  if len(blocks) < 2:
    raise ValueError("At least two block lengths are needed, n_steps = " +
                     str(n_steps) + ".")
  variances = []
  for m in blocks:
    count = n_steps//m
    sums = increments[:, :count*m].reshape(increments.shape[0], count, m).sum(axis=2)
    variances.append(np.mean(sums**2))
  slope, _ = np.polyfit(np.log(blocks), np.log(variances), 1)
  return float(slope)
