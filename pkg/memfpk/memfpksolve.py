"""memfpk memory-dependent Fokker-Planck solver.

Solves

  dp/dt = -d/dx (a_mem p) + d^2/dx^2 (b_mem p)

on a cell-centred Grid1D with an explicit conservative finite-volume step and
zero-flux boundaries, with the coefficients coupled to the density through the
kernel factor Psi(x, t).

Kernel moments are refreshed on a macro time grid. At each macro time t_k the
mean m1 = E[phi1(X)] is recorded, the moments are evaluated at t_k and, with m1
held, predicted at t_k+1; between the two the scaled moments K_j/t^(2H-1+j) are
interpolated linearly. Every kernel mode uses the same macro/micro sampling, and
each micro step evaluates the kernel at its midpoint.

License:
Author: memfpk developers
"""
import math
import time

import numpy as np

from memfpk import memfpkgrid as mg
from memfpk import memfpkkernel as mk
from memfpk import memfpkutilities as mu

KERNEL_MODES = ("vada", "closed_case_II", "closed_case_IV", "classical")
SCHEMES = ("hybrid", "upwind")
STABILITY_MARGIN = 0.9
OUTSIDE_MASS_LIMIT = 1.0e-5

def initial_width(init, grid):
  """The standard deviation of the initial density: 2 dx for a point law."""
  if init.kind == "point":
    return 2.0*grid.dx
  return math.sqrt(init.var0)

def init_pdf(init, grid):
  """The initial density on a grid.

  A point law x0 is regularised as a Gaussian of standard deviation 2 dx centred at
  x0; a Gaussian law is sampled at the nodes. The result is renormalised to unit
  trapezoid mass.

  Arguments:
    init: An InitialLaw.
    grid: The Grid1D.

  Returns:
    A PdfField at time 0.

  Exceptions:
    MemfpkDomainError:
      If more than 1e-5 of the (regularised) initial mass lies outside the grid.
  """
  center = init.mu0
  width = initial_width(init, grid)
  outside = 0.5*(math.erfc((center - grid.x_min)/(width*math.sqrt(2.0))) +
                 math.erfc((grid.x_max - center)/(width*math.sqrt(2.0))))
  if outside > OUTSIDE_MASS_LIMIT:
    raise mu.MemfpkDomainError("The initial law N(" + repr(center) + ", " +
                               repr(width**2) + ") is not supported by [" +
                               repr(grid.x_min) + ", " + repr(grid.x_max) + "].")
  z = (grid.nodes - center)/width
  values = np.exp(-0.5*z**2)/(width*math.sqrt(2.0*math.pi))
  values = values/mu.trapezoid(values, grid.dx)
  return mg.PdfField(values, 0.0, grid)

def fd_step(p, a, b, dt, scheme="hybrid"):
  """One explicit Euler step of the conservative flux form.

  The face flux is F = a_face p_face - ((b p)_(i+1) - (b p)_i)/dx with a_face the
  mean of the node drifts. With scheme "upwind" p_face is the upwind node value;
  with "hybrid" it is the central mean where the face Peclet number
  |a_face| dx/(2 min b) is at most 1 and the upwind value elsewhere. The boundary
  faces carry no flux, so the node sum is conserved to round-off.

  Arguments:
    p: The PdfField.
    a: Per-node drift a_mem.
    b: Per-node diffusion b_mem, >= 0.
    dt: The step.
    scheme (optional): "hybrid" or "upwind". Defaults to "hybrid".

  Returns:
    The PdfField at p.time + dt.

  Exceptions:
    MemfpkDomainError:
      If scheme is unknown or the coefficient shapes do not match the grid.
    MemfpkNumericalError:
      If dt exceeds a stability bound (the message names the binding one) or the
      update has a density below -1e-8.
  """
  if scheme not in SCHEMES:
    raise mu.MemfpkDomainError("scheme must be 'hybrid' or 'upwind', got " +
                               repr(scheme) + ".")
  dt = mu.require_positive("dt", dt)
  grid = p.grid
  dx = grid.dx
  for name, coefficient in (("a", a), ("b", b)):
    if np.shape(coefficient) not in ((), p.values.shape):
      raise mu.MemfpkDomainError(name + " must be a scalar or one value per node.")
  a = np.broadcast_to(np.asarray(a, dtype=float), p.values.shape)
  b = np.broadcast_to(np.asarray(b, dtype=float), p.values.shape)
  b_max = float(np.max(b))
  a_max = float(np.max(np.abs(a)))
  if b_max > 0.0 and dt > STABILITY_MARGIN*dx**2/(2.0*b_max):
    raise mu.MemfpkNumericalError("Diffusion stability bound violated: dt = " +
                                  repr(dt) + " > 0.9 dx^2/(2 max b) = " +
                                  repr(STABILITY_MARGIN*dx**2/(2.0*b_max)) + ".")
  if a_max > 0.0 and dt > STABILITY_MARGIN*dx/a_max:
    raise mu.MemfpkNumericalError("Advection stability bound violated: dt = " +
                                  repr(dt) + " > 0.9 dx/max|a| = " +
                                  repr(STABILITY_MARGIN*dx/a_max) + ".")

  density = p.values
  a_face = 0.5*(a[:-1] + a[1:])
  upwind = np.where(a_face > 0.0, density[:-1], density[1:])
  if scheme == "upwind":
    p_face = upwind
  else:
    b_face = np.minimum(b[:-1], b[1:])
    central = np.abs(a_face)*dx <= 2.0*b_face
    p_face = np.where(central, 0.5*(density[:-1] + density[1:]), upwind)
  bp = b*density
  flux = np.zeros(len(density) + 1)
  flux[1:-1] = a_face*p_face - (bp[1:] - bp[:-1])/dx
  updated = density - dt/dx*(flux[1:] - flux[:-1])
  low = float(np.min(updated))
  if low < -mg.NEGATIVITY_TOLERANCE:
    raise mu.MemfpkNumericalError("Density fell to " + repr(low) + " at t = " +
                                  repr(p.time + dt) + ".")
  return mg.PdfField(updated, p.time + dt, grid)

def _step_count(name, span, dt):
  count = int(round(span/dt))
  if count < 1 or abs(count*dt - span) > 1.0e-9*max(1.0, span):
    raise mu.MemfpkDomainError(name + " = " + repr(span) + " is not a positive " +
                               "multiple of dt = " + repr(dt) + ".")
  return count

def _output_steps(output_times, dt, n_steps):
  if not isinstance(output_times, (list, tuple, np.ndarray)):
    raise TypeError("The argument output_times must be a list of times.")
  steps = []
  for output in output_times:
    output = mu.require_finite("output time", output)
    step = int(round(output/dt))
    if step < 0 or step > n_steps or abs(step*dt - output) > 1.0e-9*max(1.0, output):
      raise mu.MemfpkDomainError("Output time " + repr(output) + " is not a step " +
                                 "of the solver grid in [0, " + repr(n_steps*dt) + "].")
    steps.append(step)
  return sorted(set(steps))

def _check_mode(spec, grid, kernel_mode, case_alpha, tol=1.0e-10):
  x = grid.nodes
  if kernel_mode == "vada":
    if not mk.commutativity_check(spec, x, tol):
      raise mu.MemfpkConfigError("VADA requires g h' = h g'; " + repr(spec.label) +
                                 " is not commutative. Use sde.mc_kernel_estimate " +
                                 "for its kernel.")
  elif kernel_mode == "closed_case_II":
    defects = [spec.f(x)*spec.h_prime(x) - spec.h(x)*spec.f_prime(x),
               spec.g(x)*spec.h_prime(x) - spec.h(x)*spec.g_prime(x)]
    if max(float(np.max(np.abs(d))) for d in defects) > tol:
      raise mu.MemfpkConfigError("closed_case_II requires f h' = h f' and " +
                                 "g h' = h g'.")
  elif kernel_mode == "closed_case_IV":
    if case_alpha == None:
      raise mu.MemfpkConfigError("closed_case_IV requires case_alpha.")
    mu.require_positive("case_alpha", case_alpha)
    if float(np.max(np.abs(spec.h_prime(x)))) > tol:
      raise mu.MemfpkConfigError("closed_case_IV requires a constant h.")
  elif kernel_mode != "classical":
    raise mu.MemfpkConfigError("kernel_mode must be one of " + str(KERNEL_MODES) +
                               ", got " + repr(kernel_mode) + ".")

class _MacroKernel:
  # Kernel moments at the current macro time and predicted at the next one.
  def __init__(self, kernel_mode, H, order, case_alpha):
    self.kernel_mode = kernel_mode
    self.H = H
    self.order = order
    self.case_alpha = case_alpha

  def closed_moments(self, t):
    if self.kernel_mode == "closed_case_II":
      return mk.KernelMoments(t, mk.kernel_case_constant(self.H, t))
    if self.kernel_mode == "closed_case_IV":
      return mk.KernelMoments(t, mk.kernel_case_linear(self.case_alpha, self.H, t))
    return mk.KernelMoments(t)

  def scaled(self, moments):
    # Classical mode has no kernel, including its t -> 0 limit.
    if self.kernel_mode == "classical":
      return np.zeros(4)
    return moments.scaled(self.H)

  def bracket(self, state, t, t_next, m1):
    if self.kernel_mode != "vada":
      return self.closed_moments(t), self.closed_moments(t_next)
    now = mk.vada_kernel_moments(state, t, self.H, self.order)
    provisional = mk.vada_record_mean(state, t_next, m1)
    return now, mk.vada_kernel_moments(provisional, t_next, self.H, self.order)

def solve_memfpk(spec, init, H, grid, dt, t_end, kernel_mode="vada",
                 case_alpha=None, output_times=None, macro_refresh=0.01,
                 vada_order=2, scheme="hybrid"):
  """Evolves the memFPK density from the initial law to t_end.

  Arguments:
    spec: The SystemSpec; every grid node must lie in its domain.
    init: The InitialLaw.
    H: The Hurst parameter, 1/2 < H < 1.
    grid: The Grid1D.
    dt: The micro (finite-difference) step.
    t_end: The final time, a multiple of dt.
    kernel_mode (optional): "vada", "closed_case_II" (Psi = H t^(2H-1)),
      "closed_case_IV" (the linear-system closed form with case_alpha) or
      "classical" (Psi = 0). Defaults to "vada".
    case_alpha (optional): The decay rate of closed_case_IV.
    output_times (optional): Times at which densities are stored, multiples of dt
      in [0, t_end]. Defaults to [t_end].
    macro_refresh (optional): The macro interval, a multiple of dt. Defaults to 0.01.
    vada_order (optional): 1, 2 or 3. Defaults to 2.
    scheme (optional): The fd_step face scheme. Defaults to "hybrid".

  Returns:
    A PdfSurface with the stored densities, their masses, the cumulative clamp
    events, the macro-time histories of m1, K0 and b_mem, and a system sample.

  Exceptions:
    TypeError:
      If output_times is not a list.
    MemfpkConfigError:
      If the kernel mode does not apply to the system.
    MemfpkDomainError:
      If an argument is outside its domain or a node is outside the system domain.
    MemfpkNumericalError:
      Propagated from fd_step.
  """
  started = time.time()
  H = mu.require_hurst(H)
  dt = mu.require_positive("dt", dt)
  t_end = mu.require_positive("t_end", t_end)
  macro_refresh = mu.require_positive("macro_refresh", macro_refresh)
  if vada_order not in mk.VADA_ORDERS:
    raise mu.MemfpkConfigError("vada_order must be 1, 2 or 3, got " +
                               repr(vada_order) + ".")
  if scheme not in SCHEMES:
    raise mu.MemfpkConfigError("scheme must be 'hybrid' or 'upwind', got " +
                               repr(scheme) + ".")
  n_steps = _step_count("t_end", t_end, dt)
  refresh_steps = _step_count("macro_refresh", macro_refresh, dt)
  if isinstance(output_times, np.ndarray):
    output_times = output_times.tolist()
  steps_out = _output_steps([t_end] if output_times == None else output_times, dt,
                            n_steps)
  if not np.all(spec.in_domain(grid.nodes)):
    raise mu.MemfpkDomainError("Grid [" + repr(grid.x_min) + ", " + repr(grid.x_max) +
                               "] has nodes outside the domain of " +
                               repr(spec.label) + " " + repr(spec.domain) + ".")
  _check_mode(spec, grid, kernel_mode, case_alpha)

  x = grid.nodes
  coefficients = mk.NodeCoefficients(spec, x)
  # Without fractional noise (h = 0 on the grid) the memory terms vanish.
  memoryless = not np.any(spec.h(x))
  phi1_nodes = None
  if kernel_mode == "vada":
    phi1_nodes = np.zeros(grid.n_cells) if memoryless else mk.phi1(spec, x)
  macro = _MacroKernel(kernel_mode, H, vada_order, case_alpha)
  state = mk.VadaState(refresh_steps*dt, dt)
  clamps = mk.ClampRecord()

  surface = mg.PdfSurface(grid, "memfpk")
  surface.metadata = {"kernel_mode":kernel_mode, "H":H, "dt":dt, "t_end":t_end,
                      "macro_refresh":refresh_steps*dt, "vada_order":vada_order,
                      "scheme":scheme, "sigma_init":initial_width(init, grid),
                      "case_alpha":case_alpha, "memoryless":memoryless}
  p = init_pdf(init, grid)
  wanted = set(steps_out)
  if 0 in wanted:
    surface.append(p, 0)
  minimum = p.minimum()
  m1 = math.nan
  for step in range(n_steps):
    t = step*dt
    if step % refresh_steps == 0:
      t_macro = t
      t_next = (step + refresh_steps)*dt
      if kernel_mode == "vada":
        m1 = mu.trapezoid(phi1_nodes*p.values, grid.dx)
        state = mk.vada_record_mean(state, t_macro, m1)
      (now, ahead) = macro.bracket(state, t_macro, t_next, m1)
      scaled_now = macro.scaled(now)
      scaled_next = macro.scaled(ahead)
    # The kernel enters each step at its midpoint.
    t_mid = t + 0.5*dt
    weight = (t_mid - t_macro)/(t_next - t_macro)
    moments = mk.KernelMoments.unscaled(t_mid, H, (1.0 - weight)*scaled_now +
                                        weight*scaled_next)
    if kernel_mode == "vada":
      psi = mk.vada_psi(moments, phi1_nodes, m1, vada_order)
    else:
      psi = moments.K0
    (a_mem, b_mem) = coefficients.evaluate(psi, clamps)
    if step % refresh_steps == 0:
      surface.record_macro(t, m1, moments.K0, b_mem)
    p = fd_step(p, a_mem, b_mem, dt, scheme)
    minimum = min(minimum, p.minimum())
    if step + 1 in wanted:
      surface.append(mg.PdfField(p.values, (step + 1)*dt, grid), clamps.events)
  if kernel_mode == "vada" and n_steps % refresh_steps == 0:
    state = mk.vada_record_mean(state, n_steps*dt,
                                mu.trapezoid(phi1_nodes*p.values, grid.dx))
  surface.kernel_state = state

  surface.system_samples.append(mu.create_system_sample(
      "memfpk_solver", {"steps":n_steps,
                        "macro_refreshes":len(surface.macro_times),
                        "clamp_events":clamps.events, "min_density":minimum,
                        "seconds":time.time() - started}))
  return surface

def psi_field(spec, surface, t):
  """The kernel factor Psi(x, t) at the grid nodes of a solved surface.

  Arguments:
    spec: The SystemSpec the surface was solved for.
    surface: A PdfSurface returned by solve_memfpk.
    t: A time covered by the recorded macro history.

  Returns:
    Psi at the nodes; for the closed and classical modes the same value at every
    node.

  Exceptions:
    MemfpkDomainError:
      If t lies beyond the recorded history (vada).
  """
  metadata = surface.metadata
  kernel_mode = metadata["kernel_mode"]
  if kernel_mode != "vada":
    macro = _MacroKernel(kernel_mode, metadata["H"], metadata["vada_order"],
                         metadata["case_alpha"])
    return np.full(surface.grid.n_cells, macro.closed_moments(float(t)).K0)
  state = surface.kernel_state
  moments = mk.vada_kernel_moments(state, t, metadata["H"], metadata["vada_order"])
  m1 = float(np.interp(t, state.times, state.means))
  return mk.vada_psi(moments, mk.phi1(spec, surface.grid.nodes), m1,
                     metadata["vada_order"])
