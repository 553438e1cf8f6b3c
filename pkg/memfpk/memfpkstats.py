"""memfpk statistics.

Moments and CDFs of grid densities and of samples, and the comparison metrics
between two density surfaces. Trapezoid quadrature is used throughout, matching
the accuracy order of the finite-difference grid.

License:
Author: memfpk developers
"""
import math

import numpy as np

from memfpk import memfpkgrid as mg
from memfpk import memfpkutilities as mu

class MomentSet:
  def __init__(self, mean, std, skewness=None, kurtosis=None):
    """Constructor for a MomentSet.

    Arguments:
      mean: The mean.
      std: The standard deviation, >= 0.
      skewness (optional): The standardized third moment, None when std = 0.
      kurtosis (optional): The raw standardized fourth moment (3 for a Gaussian),
        None when std = 0.
    """
    self.mean = float(mean)
    self.std = float(std)
    self.skewness = None if skewness == None else float(skewness)
    self.kurtosis = None if kurtosis == None else float(kurtosis)

  def as_tuple(self):
    return (self.mean, self.std, self.skewness, self.kurtosis)

  def describe(self):
    return {"mean":self.mean, "std":self.std, "skewness":self.skewness,
            "kurtosis":self.kurtosis}

def _standardize(mean, variance, third, fourth):
  # Central moments to a MomentSet.
  variance = max(variance, 0.0)
  std = math.sqrt(variance)
  if std == 0.0:
    return MomentSet(mean, 0.0)
  return MomentSet(mean, std, third/std**3, fourth/variance**2)

def moments_from_samples(values):
  """Sample mean, standard deviation, skewness and kurtosis.

  The standard deviation uses the unbiased variance; skewness and kurtosis are the
  plain standardized central moments.

  Arguments:
    values: A 1-D array with at least two samples.

  Returns:
    A MomentSet; skewness and kurtosis are None when all samples are equal.

  Exceptions:
    ValueError:
      If fewer than two samples are given.
  """
  values = np.asarray(values, dtype=float).ravel()
  if len(values) < 2:
    raise ValueError("At least two samples are needed, got " + str(len(values)) + ".")
  mean = float(np.mean(values))
  centered = values - mean
  m2 = float(np.mean(centered**2))
  if m2 == 0.0:
    return MomentSet(mean, 0.0)
  std = math.sqrt(m2*len(values)/(len(values) - 1.0))
  return MomentSet(mean, std, float(np.mean(centered**3))/m2**1.5,
                   float(np.mean(centered**4))/m2**2)

def moments_from_pdf(p, grid=None, mass_tolerance=1.0e-4):
  """Mean, standard deviation, skewness and kurtosis of a grid density.

  Arguments:
    p: A PdfField.
    grid (optional): The Grid1D; defaults to the field's grid.
    mass_tolerance (optional): Allowed deviation of the trapezoid mass from 1.
      Defaults to 1e-4.

  Returns:
    A MomentSet computed from trapezoid raw moments up to order four.

  Exceptions:
    ValueError:
      If the mass differs from 1 by more than mass_tolerance.
  """
  grid = grid or p.grid
  x = grid.nodes
  density = np.asarray(p.values, dtype=float)
  mass = mu.trapezoid(density, grid.dx)
  if abs(mass - 1.0) > mass_tolerance:
    raise ValueError("PDF mass " + repr(mass) + " differs from 1 by more than " +
                     repr(mass_tolerance) + ".")
  mean = mu.trapezoid(x*density, grid.dx)/mass
  centered = x - mean
  variance = mu.trapezoid(centered**2*density, grid.dx)/mass
  third = mu.trapezoid(centered**3*density, grid.dx)/mass
  fourth = mu.trapezoid(centered**4*density, grid.dx)/mass
  return _standardize(mean, variance, third, fourth)

def pdf_to_cdf(p, grid=None):
  """Cumulative distribution at the nodes of a grid density.

  Arguments:
    p: A nonnegative PdfField.
    grid (optional): The Grid1D; defaults to the field's grid.

  Returns:
    The per-node CDF: cumulative trapezoid, renormalised so the last node is 1, and
    clamped to [0, 1].
  """
  grid = grid or p.grid
  cdf = mu.cumulative_trapezoid(np.asarray(p.values, dtype=float), grid.dx)
  if cdf[-1] > 0.0:
    cdf = cdf/cdf[-1]
  return np.clip(cdf, 0.0, 1.0)

def pdf_local_maxima(p, grid=None, relative_height=1.0e-3):
  """Indices of strict interior local maxima of a density.

  Arguments:
    p: A PdfField.
    grid (optional): Unused, for call symmetry with the other functions.
    relative_height (optional): Maxima lower than this fraction of the global
      maximum are ignored. Defaults to 1e-3.

  Returns:
    A list of node indices.
  """
  values = np.asarray(p.values, dtype=float)
  floor = relative_height*values.max()
  interior = np.arange(1, len(values) - 1)
  peaks = interior[(values[1:-1] > values[:-2]) & (values[1:-1] > values[2:]) &
                   (values[1:-1] >= floor)]
  return [int(i) for i in peaks]

def compare_surfaces(A, B):
  """Pointwise comparison of two PdfSurfaces on the same grid and times.

  Arguments:
    A: A PdfSurface.
    B: A PdfSurface with the same grid and output times.

  Returns:
    A dict with "linf" (overall max abs difference), "linf_per_time" and
    "l1_per_time" (trapezoid integral of the abs difference) lists, and "times".

  Exceptions:
    ValueError:
      If grids or output times differ.
  """
  if not A.grid.same_as(B.grid):
    raise ValueError("Surfaces are on different grids.")
  if len(A.times) != len(B.times) or not np.allclose(A.times, B.times, rtol=0.0,
                                                      atol=1.0e-9):
    raise ValueError("Surfaces have different output times.")
  difference = np.abs(A.values() - B.values())
  if difference.size == 0:
    return {"times":[], "linf":0.0, "linf_per_time":[], "l1_per_time":[]}
  linf_per_time = [float(row.max()) for row in difference]
  l1_per_time = [mu.trapezoid(row, A.grid.dx) for row in difference]
  return {"times":list(A.times), "linf":float(difference.max()),
          "linf_per_time":linf_per_time, "l1_per_time":l1_per_time}

def compare_kernels(a, b, weight=1.0):
  """Mean relative difference between two kernel fields.

  Arguments:
    a: The reference values (e.g. the Monte Carlo kernel estimate); NaN entries
      (missing bins) are skipped.
    b: The compared values on the same nodes.
    weight (optional): A boolean mask or nonnegative weights restricting the
      average, e.g. nodes where p >= 0.1 max p. Defaults to 1 at every node.

  Returns:
    The weighted mean of |b - a|/|a| over usable nodes, or NaN if none is usable.
  """
  a = np.asarray(a, dtype=float)
  b = np.asarray(b, dtype=float)
  w = np.broadcast_to(np.asarray(weight, dtype=float), a.shape)
  usable = np.isfinite(a) & np.isfinite(b) & (w > 0) & (a != 0.0)
  if not np.any(usable):
    return float("nan")
  relative = np.abs(b[usable] - a[usable])/np.abs(a[usable])
  return float(np.sum(w[usable]*relative)/np.sum(w[usable]))

def surface_from_fields(grid, times, fields, label=""):
  """Builds a PdfSurface from per-time density arrays."""
  surface = mg.PdfSurface(grid, label)
  for time, values in zip(times, fields):
    surface.append(mg.PdfField(values, time, grid))
  return surface
