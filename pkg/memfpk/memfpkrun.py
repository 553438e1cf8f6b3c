"""memfpk run is the experiment runner.

A run builds the scenario system, then executes the requested methods:

  memfpk    the memory-dependent Fokker-Planck solver
  mcs       Monte Carlo simulation of the SDE (the reference for nonlinear systems)
  analytic  the closed-form Gaussian law (ou only)

and writes into the output directory:

  pdf_surface.csv  method, t, then the density at every grid node
  cdf.csv          method, t, then the CDF at every grid node
  moments.csv      method, t, mean, std, skewness, kurtosis
  report.json      the configuration echo, surface comparisons, mass and clamp
                   records, divergent paths, warnings and one system sample per phase

Usage:
  PYTHONPATH=. python memfpk/memfpkrun.py --scenario ou --hurst 0.65 --method memfpk,analytic
  PYTHONPATH=. python memfpk/memfpkrun.py --config duffing.cfg --mcs-paths 20000

Exit codes are 0 on success, 2 for a configuration error and 3 for a numerical
failure; artifacts of a failed run are removed.

License:
Author: memfpk developers
"""
import argparse
import csv
import json
import os
import sys
import time
import warnings

import numpy as np

from memfpk import memfpkanalytic as man
from memfpk import memfpkfgn as mf
from memfpk import memfpkgrid as mg
from memfpk import memfpkkernel as mk
from memfpk import memfpkscenarios as msc
from memfpk import memfpksde as msde
from memfpk import memfpksolve as msolve
from memfpk import memfpkstats as mst
from memfpk import memfpkutilities as mu

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
ARTIFACTS = ("pdf_surface.csv", "cdf.csv", "moments.csv", "report.json")
# Upper bound on increments held per noise block (per FGN or GWN array).
_BLOCK_VALUES = 8000000
_KERNEL_REGION = 0.1

def build_parser():
  parser = argparse.ArgumentParser(
      description="Solve memory-dependent Fokker-Planck equations of SDEs driven " +
                  "by fractional and white Gaussian noise.")
  parser.add_argument("--scenario", choices=msc.SCENARIOS)
  parser.add_argument("--config", help="A key: value configuration file.")
  parser.add_argument("--hurst", dest="H", type=float)
  parser.add_argument("--method", dest="methods",
                      help="Comma separated subset of memfpk,mcs,analytic.")
  parser.add_argument("--output-times", dest="output_times",
                      help="Comma separated output times.")
  for name in ("dx", "dt", "t-end", "x-min", "x-max", "case-alpha", "mcs-dt",
               "macro-refresh", "oracle-time", "sigma-b", "sigma-w", "alpha", "beta",
               "x0", "mu0", "var0", "omega1", "omega2", "lam", "gamma", "d1", "d2",
               "h0"):
    parser.add_argument("--" + name, dest=name.replace("-", "_"), type=float)
  for name in ("mcs-paths", "seed", "vada-order", "workers", "oracle-paths"):
    parser.add_argument("--" + name, dest=name.replace("-", "_"), type=int)
  parser.add_argument("--kernel-mode", dest="kernel_mode",
                      choices=msolve.KERNEL_MODES)
  parser.add_argument("--kernel-exponent", dest="kernel_exponent",
                      choices=msc.KERNEL_EXPONENTS)
  parser.add_argument("--scheme", choices=msolve.SCHEMES)
  parser.add_argument("--fgn-method", dest="fgn_method", choices=msc.FGN_METHODS)
  parser.add_argument("--out-dir", dest="out_dir")
  for name in ("f-coeffs", "g-coeffs", "h-coeffs"):
    parser.add_argument("--" + name, dest=name.replace("-", "_"),
                        help="Comma separated polynomial coefficients, lowest first.")
  parser.add_argument("--verbose", action="store_const", const=True, default=None)
  return parser

def load_config(argv=None):
  """Builds the ScenarioConfig of a command line.

  Flags override values of the --config file, which override scenario defaults.

  Exceptions:
    MemfpkConfigError:
      If the file cannot be read or parsed, or the configuration is invalid.
  """
  arguments = vars(build_parser().parse_args(argv))
  values = {}
  path = arguments.pop("config")
  if path != None:
    try:
      with open(path) as config_file:
        values = mu.parse_key_values(config_file.read())
    except (OSError, ValueError) as e:
      raise mu.MemfpkConfigError("Cannot read configuration " + repr(path) + ": " +
                                 str(e))
  for key, value in arguments.items():
    if value != None:
      values[key] = value
  scenario = values.pop("scenario", "ou")
  return msc.ScenarioConfig(scenario, **values)

def _steps(name, t, dt):
  count = int(round(t/dt))
  if abs(count*dt - t) > 1.0e-9*max(1.0, t):
    raise mu.MemfpkConfigError(name + " = " + repr(t) + " is not a multiple of " +
                               repr(dt) + ".")
  return count

def run_memfpk(config, spec, init, grid):
  return msolve.solve_memfpk(spec, init, config.H, grid, config.dt, config.t_end,
                             config.kernel_mode, config.case_alpha,
                             config.output_times, config.macro_refresh,
                             config.vada_order, config.scheme)

def run_mcs(config, spec, init, n_steps, paths, keep=None):
  """Simulates paths in blocks of bounded size and merges them.

  Every block draws the substreams of its own path indices, so the merged ensemble
  equals the ensemble simulated at once.
  """
  increments = mf.IncrementGrid(n_steps, config.mcs_dt)
  block = max(64, _BLOCK_VALUES//max(1, n_steps))
  parts = []
  for start in range(0, paths, block):
    noise = mf.sample_noise(config.H, increments, min(block, paths - start),
                            config.seed, config.fgn_method, config.workers, start)
    parts.append(msde.simulate_ensemble(spec, init, noise, config.workers, keep))
  return msde.merge_ensembles(parts)

def analytic_params(config):
  if config.mu0 != None and config.var0 != None:
    return man.OuParams(config.alpha, config.sigma_w, config.sigma_b, config.mu0,
                        config.H, config.var0)
  return man.OuParams(config.alpha, config.sigma_w, config.sigma_b, config.x0,
                      config.H)

def kernel_oracle(config, spec, surface, init, grid):
  """Compares the VADA kernel factor with the Monte Carlo path-functional estimate.

  Both kernel exponent variants are evaluated: the oracle always uses the exponent
  composed from f, g and h ("eq4"); VADA uses each variant's exponent in its mean
  history and fluctuation terms. The comparison averages over the nodes where the
  oracle ensemble's density is at least 0.1 of its maximum.
  """
  t = config.oracle_time
  n_steps = _steps("oracle_time", t, config.mcs_dt)
  _steps("oracle_time", t, config.macro_refresh)
  noise = mf.sample_noise(config.H, mf.IncrementGrid(n_steps, config.mcs_dt),
                          config.oracle_paths, config.seed, config.fgn_method,
                          config.workers)
  ensemble = msde.simulate_ensemble(spec, init, noise, config.workers)
  density = msde.empirical_pdf(ensemble, n_steps, grid).values
  region = density >= _KERNEL_REGION*density.max()

  (other_spec, other) = msc.alternative_exponent(config)
  specs = {config.kernel_exponent:spec, other:other_spec}
  vada = {config.kernel_exponent:msolve.psi_field(spec, surface, t)}
  other_surface = msolve.solve_memfpk(other_spec, init, config.H, grid, config.dt, t,
                                      "vada", None, [t], config.macro_refresh,
                                      config.vada_order, config.scheme)
  vada[other] = msolve.psi_field(other_spec, other_surface, t)
  oracle = {name:msde.mc_kernel_estimate(specs[name], ensemble, n_steps, config.H,
                                         grid, workers=config.workers)
            for name in specs}
  reference = oracle["eq4"].values
  divergence = {name:mst.compare_kernels(reference, vada[name], region)
                for name in specs}
  self_consistency = {name:mst.compare_kernels(oracle[name].values, vada[name],
                                               region) for name in specs}
  finite = {name:value for name, value in divergence.items() if np.isfinite(value)}
  favoured = min(finite, key=finite.get) if finite else None
  return {"time":t, "paths":config.oracle_paths,
          "populated_bins":int(np.count_nonzero(oracle["eq4"].populated())),
          "vada_vs_eq4_oracle":divergence,
          "vada_vs_own_oracle":self_consistency,
          "oracle_variant_divergence":mst.compare_kernels(
              reference, oracle["paper-printed"].values, region),
          "favoured_exponent":favoured,
          "system_samples":ensemble.system_samples + other_surface.system_samples}

def _moment_row(method, t, moments):
  return [method, mu.format_float(t)] + [
      "nan" if value == None else mu.format_float(value)
      for value in moments.as_tuple()]

def _surface_rows(method, surface, values_of):
  return [[method, mu.format_float(t)] + [mu.format_float(v) for v in values_of(i)]
          for i, t in enumerate(surface.times)]

def write_artifacts(out_dir, grid, surfaces, cdfs, moment_rows, report,
                    written=None):
  """Writes the four artifacts and returns their paths.

  Each path is appended to written (when given) before its file is opened, so a
  caller can remove the partial artifacts of a failed write.
  """
  header = ["method", "t"] + [mu.format_float(x) for x in grid.nodes]
  if written == None:
    written = []
  def write_table(name, head, rows):
    path = os.path.join(out_dir, name)
    written.append(path)
    with open(path, "w", newline="") as table:
      writer = csv.writer(table)
      writer.writerow(head)
      writer.writerows(rows)
  pdf_rows = []
  cdf_rows = []
  for method, surface in surfaces.items():
    pdf_rows += _surface_rows(method, surface, lambda i: surface.fields[i])
    cdf_rows += _surface_rows(method, surface, lambda i: cdfs[method][i])
  write_table("pdf_surface.csv", header, pdf_rows)
  write_table("cdf.csv", header, cdf_rows)
  write_table("moments.csv", ["method", "t", "mean", "std", "skewness", "kurtosis"],
              moment_rows)
  path = os.path.join(out_dir, "report.json")
  written.append(path)
  with open(path, "w") as report_file:
    json.dump(mu.to_jsonable(report), report_file, indent=2, sort_keys=True)
  return written

def _phase(name, phases, verbose, started):
  seconds = time.time() - started
  phases.append(mu.create_system_sample("memfpk_run", {"phase":name,
                                                       "seconds":seconds}))
  if verbose:
    print("memfpk: " + name + " finished in " + "%.3f" % seconds + " s")

def execute(config):
  """Runs every requested method and returns the data of the artifacts.

  Returns:
    (surfaces, cdfs, moment_rows, report).
  """
  grid = config.grid()
  (spec, init) = msc.build_system(config)
  phases = []
  surfaces = {}
  cdfs = {}
  moment_rows = []
  report = {"config":config.echo(), "grid":grid.describe(),
            "initial_law":init.describe(),
            "sigma_init":msolve.initial_width(init, grid),
            "commutative":mk.commutativity_check(spec, grid),
            "comparisons":{}}

  if "memfpk" in config.methods:
    started = time.time()
    surface = run_memfpk(config, spec, init, grid)
    surfaces["memfpk"] = surface
    cdfs["memfpk"] = [mst.pdf_to_cdf(surface.field(i)) for i in range(len(surface.times))]
    for i, t in enumerate(surface.times):
      moment_rows.append(_moment_row("memfpk", t, mst.moments_from_pdf(surface.field(i))))
    report["memfpk"] = {"mass":surface.mass_extrema(),
                        "clamp_events":surface.clamp_events[-1],
                        "min_density":surface.system_samples[-1]["min_density"],
                        "macro_times":surface.macro_times,
                        "kernel_history":surface.kernel_history,
                        "m1_history":surface.m1_history,
                        "metadata":surface.metadata,
                        "local_maxima":{mu.format_float(t):len(mst.pdf_local_maxima(
                            surface.field(i))) for i, t in enumerate(surface.times)}}
    phases += surface.system_samples
    _phase("memfpk", phases, config.verbose, started)

  if "mcs" in config.methods:
    started = time.time()
    n_steps = _steps("t_end", config.t_end, config.mcs_dt)
    keep = [_steps("output time", t, config.mcs_dt) for t in config.output_times]
    ensemble = run_mcs(config, spec, init, n_steps, config.mcs_paths, keep)
    surface = mg.PdfSurface(grid, "mcs")
    for t, step in zip(config.output_times, keep):
      surface.append(mg.PdfField(msde.empirical_pdf(ensemble, step, grid).values, t,
                                 grid))
      moment_rows.append(_moment_row("mcs", t, msde.empirical_moments(ensemble, step)))
    surfaces["mcs"] = surface
    cdfs["mcs"] = [mst.pdf_to_cdf(surface.field(i)) for i in range(len(surface.times))]
    report["mcs"] = {"paths":ensemble.n_paths,
                     "divergent_paths":ensemble.divergent_count,
                     "dt":config.mcs_dt}
    phases += ensemble.system_samples
    _phase("mcs", phases, config.verbose, started)

  if "analytic" in config.methods:
    started = time.time()
    params = analytic_params(config)
    surface = man.ou_surface(params, grid, config.output_times)
    surfaces["analytic"] = surface
    cdfs["analytic"] = [man.ou_cdf(params, grid.nodes, t) for t in surface.times]
    for t in surface.times:
      moments = mst.MomentSet(man.ou_mean(params, t),
                              np.sqrt(man.ou_variance(params, t)), 0.0, 3.0)
      moment_rows.append(_moment_row("analytic", t, moments))
    _phase("analytic", phases, config.verbose, started)

  for (a, b) in (("memfpk", "analytic"), ("memfpk", "mcs"), ("mcs", "analytic")):
    if a in surfaces and b in surfaces:
      report["comparisons"][a + "_vs_" + b] = mst.compare_surfaces(surfaces[a],
                                                                   surfaces[b])

  if (config.scenario == "verhulst" and "memfpk" in surfaces and
      "mcs" in surfaces and config.oracle_time != None):
    started = time.time()
    report["kernel_oracle"] = kernel_oracle(config, spec, surfaces["memfpk"], init,
                                            grid)
    phases += report["kernel_oracle"].pop("system_samples")
    _phase("kernel_oracle", phases, config.verbose, started)
  report["phases"] = phases
  return surfaces, cdfs, moment_rows, report

def run(config):
  """Runs a scenario and writes its artifacts.

  Arguments:
    config: A ScenarioConfig.

  Returns:
    The exit status: 0, 2 (configuration error) or 3 (numerical failure).
  """
  written = []
  created = not os.path.isdir(config.out_dir)
  try:
    with warnings.catch_warnings(record=True) as caught:
      warnings.simplefilter("always")
      (surfaces, cdfs, moment_rows, report) = execute(config)
    report["warnings"] = [str(w.message) for w in caught]
    os.makedirs(config.out_dir, exist_ok=True)
    write_artifacts(config.out_dir, config.grid(), surfaces, cdfs, moment_rows,
                    report, written)
  except mu.MemfpkConfigError as e:
    _remove(written, config.out_dir, created)
    print("memfpk: configuration error: " + str(e), file=sys.stderr)
    return EXIT_CONFIG
  except (ArithmeticError, ValueError, KeyError) as e:
    _remove(written, config.out_dir, created)
    print("memfpk: numerical failure: " + str(e), file=sys.stderr)
    return EXIT_NUMERICAL
  except OSError as e:
    _remove(written, config.out_dir, created)
    print("memfpk: cannot write artifacts: " + str(e), file=sys.stderr)
    return EXIT_CONFIG
  if config.verbose:
    print("memfpk: wrote " + ", ".join(written))
  return EXIT_OK

def _remove(written, out_dir, created):
  for path in written:
    if os.path.isfile(path):
      os.remove(path)
  if created and os.path.isdir(out_dir) and len(os.listdir(out_dir)) == 0:
    os.rmdir(out_dir)

def main(argv=None):
  try: config = load_config(argv)
  except mu.MemfpkConfigError as e:
    print("memfpk: configuration error: " + str(e), file=sys.stderr)
    return EXIT_CONFIG
  return run(config)

if __name__ == "__main__":
  sys.exit(main())
