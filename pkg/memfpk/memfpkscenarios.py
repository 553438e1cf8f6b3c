"""memfpk scenarios.

A ScenarioConfig describes one experiment: the system and its parameters, the
grids, the methods to run and where to write the results. Scenario defaults are
the parameter tables of the four reference systems:

  ou          dX = -alpha X dt + sigma_w dW + sigma_b dB_H
  duffing     dX = (alpha X + beta X^3) dt + sigma_w dW + sigma_b dB_H
  verhulst    dX = (alpha X - beta X^2) dt + sigma_w X dW + sigma_b X dB_H
  hamiltonian dE = m(E) dt + s(E) dB_H, the averaged energy of a two-degree-of-
              freedom quasi-non-integrable Hamiltonian system
  custom      polynomial f, g and h given by coefficient lists

Configurations are read from a flat key-value file and overridden by command-line
flags; see memfpkrun.

License:
Author: memfpk developers
"""
import math

import numpy as np
from numpy.polynomial import Polynomial

from memfpk import memfpkgrid as mg
from memfpk import memfpksde as msde
from memfpk import memfpksolve as msolve
from memfpk import memfpkutilities as mu

SCENARIOS = ("ou", "duffing", "verhulst", "hamiltonian", "custom")
METHODS = ("memfpk", "mcs", "analytic")
KERNEL_EXPONENTS = ("eq4", "paper-printed")
FGN_METHODS = ("auto", "circulant", "cholesky")

COMMON_DEFAULTS = {
    "H":None, "x_min":None, "x_max":None, "dx":None, "dt":1.0e-4, "t_end":None,
    "output_times":None, "methods":None, "kernel_mode":"vada", "case_alpha":None,
    "mcs_paths":100000, "mcs_dt":1.0e-3, "seed":20240917, "macro_refresh":0.01,
    "out_dir":"memfpk_output", "kernel_exponent":"eq4", "vada_order":2,
    "scheme":"hybrid", "workers":1, "fgn_method":"auto", "oracle_paths":10000,
    "oracle_time":None, "verbose":False,
    "alpha":None, "beta":None, "sigma_w":None, "sigma_b":None, "x0":None,
    "mu0":None, "var0":None, "omega1":None, "omega2":None, "lam":None,
    "gamma":None, "d1":None, "d2":None, "h0":None,
    "f_coeffs":None, "g_coeffs":None, "h_coeffs":None}

SCENARIO_DEFAULTS = {
    "ou":{"alpha":1.0, "sigma_w":1.0, "sigma_b":1.0, "x0":1.0, "H":0.65,
          "x_min":-5.0, "x_max":5.0, "dx":0.05, "t_end":2.0,
          "output_times":[0.5, 1.0, 2.0], "methods":["memfpk", "analytic"]},
    "duffing":{"alpha":1.0, "beta":-1.0, "sigma_w":0.8, "sigma_b":0.6, "x0":0.0,
               "H":0.6, "x_min":-2.5, "x_max":2.5, "dx":0.05, "t_end":2.0,
               "output_times":[0.5, 1.0, 2.0], "methods":["memfpk", "mcs"]},
    "verhulst":{"alpha":4.0, "beta":1.0, "sigma_w":0.1, "sigma_b":0.3, "mu0":1.0,
                "var0":0.05, "H":0.8, "x_min":0.0, "x_max":7.0, "dx":0.1,
                "t_end":2.0, "output_times":[0.5, 1.0, 2.0],
                "methods":["memfpk", "mcs"], "oracle_time":1.0},
    # omega1 and omega2 are echoed for the record; the averaged energy
    # coefficients do not depend on them.
    "hamiltonian":{"omega1":1.414, "omega2":2.0, "lam":2.0, "gamma":0.01,
                   "d1":0.01, "d2":0.01, "h0":2.0, "H":0.7, "x_min":0.0,
                   "x_max":10.0, "dx":0.1, "t_end":10.0, "output_times":[5.0, 10.0],
                   "methods":["memfpk", "mcs"]},
    "custom":{"methods":["memfpk"]}}

REQUIRED = {
    "ou":("alpha", "sigma_w", "sigma_b"),
    "duffing":("alpha", "beta", "sigma_w", "sigma_b"),
    "verhulst":("alpha", "beta", "sigma_w", "sigma_b"),
    "hamiltonian":("gamma", "lam", "d1", "d2", "h0"),
    "custom":("f_coeffs", "g_coeffs", "h_coeffs")}

_FLOAT_FIELDS = ("H", "x_min", "x_max", "dx", "dt", "t_end", "case_alpha", "mcs_dt",
                 "macro_refresh", "oracle_time", "alpha", "beta", "sigma_w",
                 "sigma_b", "x0", "mu0", "var0", "omega1", "omega2", "lam", "gamma",
                 "d1", "d2", "h0")
_INT_FIELDS = ("mcs_paths", "seed", "vada_order", "workers", "oracle_paths")

def _as_list(name, value):
  # "0.5,1,2" or [0.5, 1, 2].
  if isinstance(value, str):
    value = [item.strip() for item in value.split(",") if item.strip() != ""]
  elif isinstance(value, (int, float)):
    value = [value]
  if not isinstance(value, (list, tuple)):
    raise mu.MemfpkConfigError(name + " must be a list, got " + repr(value) + ".")
  return list(value)

def _as_float(name, value):
  try: return mu.require_finite(name, value)
  except mu.MemfpkDomainError as e:
    raise mu.MemfpkConfigError(str(e))

def _as_int(name, value):
  try: number = int(value)
  except (TypeError, ValueError):
    raise mu.MemfpkConfigError(name + " must be an integer, got " + repr(value) + ".")
  if number != float(value):
    raise mu.MemfpkConfigError(name + " must be an integer, got " + repr(value) + ".")
  return number

class ScenarioConfig:
  def __init__(self, scenario="ou", **values):
    """Constructor for a ScenarioConfig.

    Fields not given take the scenario defaults, then the common defaults. Every
    field is validated and normalised; see COMMON_DEFAULTS for the field names.

    Arguments:
      scenario (optional): One of "ou", "duffing", "verhulst", "hamiltonian" or
        "custom". Defaults to "ou".
      values: Field overrides. Keys may use "-" for "_".

    Exceptions:
      MemfpkConfigError:
        If a field is unknown, missing for the scenario, or invalid.
    """
    self.scenario = str(scenario)
    if self.scenario not in SCENARIOS:
      raise mu.MemfpkConfigError("scenario must be one of " + str(SCENARIOS) +
                                 ", got " + repr(scenario) + ".")
    fields = dict(COMMON_DEFAULTS)
    fields.update(SCENARIO_DEFAULTS[self.scenario])
    for key, value in values.items():
      key = key.replace("-", "_")
      if key not in COMMON_DEFAULTS:
        raise mu.MemfpkConfigError("Unknown configuration key " + repr(key) + ".")
      if value != None:
        fields[key] = value
    if self.scenario == "ou" and fields["case_alpha"] == None:
      fields["case_alpha"] = fields["alpha"]

    for name in REQUIRED[self.scenario]:
      if fields[name] == None:
        raise mu.MemfpkConfigError("Scenario " + repr(self.scenario) + " requires " +
                                   repr(name) + ".")
    for name in ("H", "x_min", "x_max", "dx", "t_end"):
      if fields[name] == None:
        raise mu.MemfpkConfigError("Scenario " + repr(self.scenario) + " requires " +
                                   repr(name) + ".")
    for name in _FLOAT_FIELDS:
      if fields[name] != None:
        fields[name] = _as_float(name, fields[name])
    for name in _INT_FIELDS:
      fields[name] = _as_int(name, fields[name])
    for name in ("f_coeffs", "g_coeffs", "h_coeffs"):
      if fields[name] != None:
        fields[name] = [_as_float(name, c) for c in _as_list(name, fields[name])]
    fields["output_times"] = sorted(set(
        _as_float("output_times", t)
        for t in _as_list("output_times", fields["output_times"] or [fields["t_end"]])))
    fields["methods"] = [str(m) for m in _as_list("methods", fields["methods"])]
    fields["verbose"] = bool(fields["verbose"])
    for name in ("kernel_mode", "kernel_exponent", "scheme", "fgn_method", "out_dir"):
      fields[name] = str(fields[name])
    for key, value in fields.items():
      setattr(self, key, value)
    self._validate()

  def _validate(self):
    if not 0.5 < self.H < 1.0:
      raise mu.MemfpkConfigError("H must satisfy 1/2 < H < 1, got " + repr(self.H) +
                                 ".")
    for name in ("dt", "t_end", "mcs_dt", "macro_refresh"):
      if not getattr(self, name) > 0.0:
        raise mu.MemfpkConfigError(name + " must be positive.")
    try: self.grid()
    except mu.MemfpkDomainError as e:
      raise mu.MemfpkConfigError(str(e))
    for t in self.output_times:
      if t < 0.0 or t > self.t_end:
        raise mu.MemfpkConfigError("Output time " + repr(t) + " is outside [0, " +
                                   repr(self.t_end) + "].")
    if len(self.methods) == 0 or any(m not in METHODS for m in self.methods):
      raise mu.MemfpkConfigError("methods must be a non-empty subset of " +
                                 str(METHODS) + ", got " + repr(self.methods) + ".")
    if "analytic" in self.methods:
      if self.scenario != "ou":
        raise mu.MemfpkConfigError("The analytic method exists only for ou.")
      if min(self.output_times) <= 0.0:
        raise mu.MemfpkConfigError("The analytic method needs output times > 0.")
    if self.kernel_mode not in msolve.KERNEL_MODES:
      raise mu.MemfpkConfigError("kernel_mode must be one of " +
                                 str(msolve.KERNEL_MODES) + ".")
    if self.kernel_mode == "closed_case_IV" and self.case_alpha == None:
      raise mu.MemfpkConfigError("closed_case_IV requires case_alpha.")
    if self.kernel_exponent not in KERNEL_EXPONENTS:
      raise mu.MemfpkConfigError("kernel_exponent must be 'eq4' or " +
                                 "'paper-printed'.")
    if self.scheme not in msolve.SCHEMES:
      raise mu.MemfpkConfigError("scheme must be 'hybrid' or 'upwind'.")
    if self.fgn_method not in FGN_METHODS:
      raise mu.MemfpkConfigError("fgn_method must be one of " + str(FGN_METHODS) +
                                 ".")
    if self.vada_order not in (1, 2, 3):
      raise mu.MemfpkConfigError("vada_order must be 1, 2 or 3.")
    if self.mcs_paths < 2 or self.oracle_paths < 2 or self.workers < 1:
      raise mu.MemfpkConfigError("mcs_paths and oracle_paths must be >= 2 and " +
                                 "workers >= 1.")
    if not 0 <= self.seed < 2**64:
      raise mu.MemfpkConfigError("seed must be in [0, 2**64).")
    if self.scenario == "hamiltonian" and self.d1 + self.d2 <= 0.0:
      raise mu.MemfpkConfigError("hamiltonian requires d1 + d2 > 0.")
    if self.scenario == "verhulst" and self.x_min < 0.0:
      raise mu.MemfpkConfigError("verhulst requires a grid on x > 0, got x_min = " +
                                 repr(self.x_min) + ".")
    if self.oracle_time != None and not 0.0 < self.oracle_time <= self.t_end:
      raise mu.MemfpkConfigError("oracle_time must lie in (0, t_end].")

  def grid(self):
    return mg.Grid1D.from_spacing(self.x_min, self.x_max, self.dx)

  def echo(self):
    """The configuration as a dict of plain values, e.g. for report.json."""
    fields = {"scenario":self.scenario}
    for key in COMMON_DEFAULTS:
      value = getattr(self, key)
      fields[key] = list(value) if isinstance(value, list) else value
    return fields

  @classmethod
  def from_echo(cls, fields):
    """Rebuilds a ScenarioConfig from echo()."""
    fields = dict(fields)
    return cls(fields.pop("scenario", "ou"), **fields)

  def to_text(self):
    """The configuration as a key-value file readable by parse_key_values."""
    return "".join(key + ": " + repr(value) + "\n"
                   for key, value in self.echo().items())

def _polynomial_functions(coefficients):
  polynomial = Polynomial(coefficients)
  first = polynomial.deriv(1)
  second = polynomial.deriv(2)
  return polynomial, first, second

def _verhulst_linear_exponent(beta):
  return lambda x: -2.0*beta*np.asarray(x, dtype=float)

def _hamiltonian_functions(gamma, lam, d):
  # Averaged drift m(E) and intensity s(E) with their derivatives.
  def root(E):
    return np.sqrt(1.0 + 4.0*lam*np.asarray(E, dtype=float))
  def R(E):
    return (root(E) - 1.0)/lam
  def R1(E):
    return 2.0/root(E)
  def R2(E):
    return -4.0*lam/root(E)**3
  def Q(E):
    r = R(E)
    return E - r/4.0 + lam*r**2/12.0
  def Q1(E):
    return 1.0 - R1(E)/4.0 + lam*R(E)*R1(E)/6.0
  def Q2(E):
    return -R2(E)/4.0 + lam*(R1(E)**2 + R(E)*R2(E))/6.0
  scale = math.sqrt(2.0*d)
  def s(E):
    return scale*np.sqrt(Q(E))
  def s1(E):
    return scale*Q1(E)/(2.0*np.sqrt(Q(E)))
  def s2(E):
    q = Q(E)
    return scale*(Q2(E)/(2.0*np.sqrt(q)) - Q1(E)**2/(4.0*q**1.5))
  return {"f":lambda E: -2.0*gamma*Q(E), "f_prime":lambda E: -2.0*gamma*Q1(E),
          "h":s, "h_prime":s1, "h_second":s2}

def _zero(x):
  return 0.0

def build_system(config):
  """The SystemSpec and InitialLaw of a scenario.

  Arguments:
    config: A ScenarioConfig.

  Returns:
    (spec, init).

  Exceptions:
    MemfpkConfigError:
      If the scenario parameters are inconsistent, e.g. a custom h with a zero on
      the grid, or an initial law missing.
  """
  c = config
  if c.scenario == "ou":
    spec = msde.SystemSpec(lambda x: -c.alpha*x, lambda x: -c.alpha,
                           lambda x: c.sigma_w, _zero, _zero,
                           lambda x: c.sigma_b, _zero, _zero, label="ou")
  elif c.scenario == "duffing":
    spec = msde.SystemSpec(lambda x: c.alpha*x + c.beta*x**3,
                           lambda x: c.alpha + 3.0*c.beta*x**2,
                           lambda x: c.sigma_w, _zero, _zero,
                           lambda x: c.sigma_b, _zero, _zero, label="duffing")
  elif c.scenario == "verhulst":
    override = None
    if c.kernel_exponent == "paper-printed":
      override = _verhulst_linear_exponent(c.beta)
    spec = msde.SystemSpec(lambda x: c.alpha*x - c.beta*x**2,
                           lambda x: c.alpha - 2.0*c.beta*x,
                           lambda x: c.sigma_w*x, lambda x: c.sigma_w, _zero,
                           lambda x: c.sigma_b*x, lambda x: c.sigma_b, _zero,
                           label="verhulst", domain=(0.0, None),
                           phi1_override=override)
  elif c.scenario == "hamiltonian":
    functions = _hamiltonian_functions(c.gamma, c.lam, c.d1 + c.d2)
    spec = msde.SystemSpec(functions["f"], functions["f_prime"], _zero, _zero, _zero,
                           functions["h"], functions["h_prime"],
                           functions["h_second"], label="hamiltonian",
                           domain=(0.0, None))
  else:
    (f, f1, _) = _polynomial_functions(c.f_coeffs)
    (g, g1, g2) = _polynomial_functions(c.g_coeffs)
    (h, h1, h2) = _polynomial_functions(c.h_coeffs)
    spec = msde.SystemSpec(f, f1, g, g1, g2, h, h1, h2, label="custom")
    if np.any(h(c.grid().nodes) == 0.0):
      raise mu.MemfpkConfigError("The custom h vanishes at a grid node.")

  try:
    if c.scenario == "hamiltonian":
      init = msde.InitialLaw("point", x0=c.h0)
    elif c.mu0 != None and c.var0 != None:
      init = msde.InitialLaw("gaussian", mu0=c.mu0, var0=c.var0)
    elif c.x0 != None:
      init = msde.InitialLaw("point", x0=c.x0)
    else:
      raise mu.MemfpkConfigError("Scenario " + repr(c.scenario) + " requires x0 " +
                                 "or mu0 and var0.")
  except mu.MemfpkDomainError as e:
    raise mu.MemfpkConfigError(str(e))
  return spec, init

def alternative_exponent(config):
  """The Verhulst system with the other kernel exponent variant, and its name."""
  other = "paper-printed" if config.kernel_exponent == "eq4" else "eq4"
  fields = config.echo()
  fields["kernel_exponent"] = other
  return build_system(ScenarioConfig.from_echo(fields))[0], other
