"""memfpk grids and density fields.

Grid1D is the cell-centred state grid shared by the memFPK solver, the Monte Carlo
histograms and the comparison statistics. PdfField is one density snapshot and
PdfSurface the time stack written by the solver, the analytic reference and the
Monte Carlo oracle alike.

License:
Author: memfpk developers
"""
import numpy as np

from memfpk import memfpkutilities as mu

NEGATIVITY_TOLERANCE = 1.0e-8

class Grid1D:
  def __init__(self, x_min, x_max, n_cells):
    """Constructor for a Grid1D.

    Nodes sit at cell centres, x_min + (i + 1/2) dx for i = 0..n_cells-1, with
    dx = (x_max - x_min)/n_cells.

    Arguments:
      x_min: The left domain edge.
      x_max: The right domain edge, x_max > x_min.
      n_cells: The number of cells, an integer >= 8.

    Exceptions:
      MemfpkDomainError:
        If x_min >= x_max or n_cells < 8.
    """
    self.x_min = mu.require_finite("x_min", x_min)
    self.x_max = mu.require_finite("x_max", x_max)
    if not self.x_min < self.x_max:
      raise mu.MemfpkDomainError("x_min must be less than x_max, got [" +
                                 repr(x_min) + ", " + repr(x_max) + "].")
    if int(n_cells) != n_cells or int(n_cells) < 8:
      raise mu.MemfpkDomainError("n_cells must be an integer >= 8, got " +
                                 repr(n_cells) + ".")
    self.n_cells = int(n_cells)
    self.dx = (self.x_max - self.x_min)/self.n_cells
    self.nodes = self.x_min + (np.arange(self.n_cells) + 0.5)*self.dx
    self.nodes.setflags(write=False)

  @classmethod
  def from_spacing(cls, x_min, x_max, dx):
    """Builds a grid from a cell width, which must divide the domain (to 1e-9)."""
    dx = mu.require_positive("dx", dx)
    cells = (float(x_max) - float(x_min))/dx
    n_cells = int(round(cells))
    if n_cells < 1 or abs(cells - n_cells) > 1.0e-9*max(1.0, cells):
      raise mu.MemfpkDomainError("dx = " + repr(dx) + " does not divide [" +
                                 repr(x_min) + ", " + repr(x_max) + "].")
    return cls(x_min, x_max, n_cells)

  def edges(self):
    """The n_cells + 1 cell edges."""
    return self.x_min + np.arange(self.n_cells + 1)*self.dx

  def cell_index(self, x):
    """Cell index of each x; -1 for points outside [x_min, x_max)."""
    x = np.asarray(x, dtype=float)
    index = np.floor((x - self.x_min)/self.dx).astype(int)
    inside = (x >= self.x_min) & (x < self.x_max) & (index < self.n_cells)
    return np.where(inside, index, -1)

  def contains(self, x):
    return self.x_min <= x <= self.x_max

  def same_as(self, other):
    return (isinstance(other, Grid1D) and self.n_cells == other.n_cells and
            abs(self.x_min - other.x_min) <= 1.0e-12*max(1.0, abs(self.x_min)) and
            abs(self.x_max - other.x_max) <= 1.0e-12*max(1.0, abs(self.x_max)))

  def describe(self):
    return {"x_min":self.x_min, "x_max":self.x_max, "n_cells":self.n_cells,
            "dx":self.dx}

class PdfField:
  def __init__(self, values, time, grid):
    """Constructor for a PdfField, a density sampled at the nodes of a grid.

    Arguments:
      values: Per-node density (1/state units), n_cells values.
      time: The time stamp.
      grid: The Grid1D.

    Exceptions:
      ValueError:
        If values do not match the grid.
    """
    self.values = np.array(values, dtype=float)
    if self.values.shape != (grid.n_cells,):
      raise ValueError("values must have one entry per grid node.")
    self.time = float(time)
    self.grid = grid

  def mass(self):
    """Trapezoid mass over the nodes."""
    return mu.trapezoid(self.values, self.grid.dx)

  def minimum(self):
    return float(np.min(self.values))

class PdfSurface:
  def __init__(self, grid, label=""):
    """Constructor for a PdfSurface, the stack of PdfFields at output times.

    Besides the densities a surface carries the per-time mass, the cumulative
    diffusion clamp events, and, for memFPK surfaces, the macro-time histories of
    the mean of phi1, the kernel factor K0 and the diffusion coefficient, and the
    final VadaState in kernel_state.

    Arguments:
      grid: The Grid1D shared by all fields.
      label (optional): A name such as "memfpk", "mcs" or "analytic". Defaults to "".
    """
    self.grid = grid
    self.label = str(label)
    self.times = []
    self.fields = []
    self.masses = []
    self.clamp_events = []
    self.macro_times = []
    self.m1_history = []
    self.kernel_history = []
    self.diffusion_history = []
    self.metadata = {}
    self.kernel_state = None
    self.system_samples = []

  def append(self, field, clamp_events=0):
    """Adds a PdfField at a time later than every stored time.

    Exceptions:
      ValueError:
        If the time is not strictly increasing or the grid differs.
    """
    if not field.grid.same_as(self.grid):
      raise ValueError("field grid does not match the surface grid.")
    if len(self.times) > 0 and field.time <= self.times[-1]:
      raise ValueError("output times must be strictly increasing, got " +
                       repr(field.time) + " after " + repr(self.times[-1]) + ".")
    self.times.append(field.time)
    self.fields.append(field.values.copy())
    self.masses.append(field.mass())
    self.clamp_events.append(int(clamp_events))

  def record_macro(self, time, m1, kernel_factor, diffusion):
    self.macro_times.append(float(time))
    self.m1_history.append(float(m1))
    self.kernel_history.append(float(kernel_factor))
    self.diffusion_history.append(np.array(diffusion, dtype=float))

  def values(self):
    """The surface as an n_times x n_cells array."""
    if len(self.fields) == 0:
      return np.zeros((0, self.grid.n_cells))
    return np.vstack(self.fields)

  def field(self, index):
    return PdfField(self.fields[index], self.times[index], self.grid)

  def index_of(self, time, tolerance=1.0e-9):
    """Index of the stored time equal to time within tolerance.

    Exceptions:
      KeyError:
        If no stored time matches.
    """
    for index, stored in enumerate(self.times):
      if abs(stored - time) <= tolerance*max(1.0, abs(time)):
        return index
    raise KeyError("time " + repr(time) + " is not on the surface.")

  def mass_extrema(self):
    if len(self.masses) == 0:
      return {"min_mass":None, "max_mass":None, "max_mass_error":None}
    masses = np.array(self.masses)
    return {"min_mass":float(masses.min()), "max_mass":float(masses.max()),
            "max_mass_error":float(np.max(np.abs(masses - 1.0)))}
