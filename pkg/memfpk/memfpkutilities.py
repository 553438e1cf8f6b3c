"""memfpk utilities are a common shared library for memfpk components, such as
the error types, argument validation, system samples that report what a component
did, the flat key-value record format used by scenario files, and float
formatting for artifacts.

License:
Author: memfpk developers
"""
import ast
import math
import multiprocessing
import re
import time

import numpy as np

class MemfpkDomainError(ValueError):
  """A numeric argument lies outside the domain of an operation."""

class MemfpkConfigError(ValueError):
  """A scenario configuration is invalid or incomplete."""

class MemfpkNumericalError(ArithmeticError):
  """A numerical procedure failed, e.g. a stability bound or accuracy target."""

def require_finite(name, value):
  """Converts value to a float and checks it is finite.

  Arguments:
    name: The argument name used in the error message.
    value: The value to check.

  Returns:
    value as a float.

  Exceptions:
    MemfpkDomainError:
      If value cannot be converted to a float or is not finite.
  """
  try: number = float(value)
  except (TypeError, ValueError):
    raise MemfpkDomainError(name + " must be a real number, got " + repr(value) + ".")
  if not math.isfinite(number):
    raise MemfpkDomainError(name + " must be finite, got " + repr(value) + ".")
  return number

def require_positive(name, value):
  """Like require_finite, additionally requiring value > 0."""
  number = require_finite(name, value)
  if number <= 0.0:
    raise MemfpkDomainError(name + " must be positive, got " + repr(value) + ".")
  return number

def require_hurst(H, allow_half=False):
  """Checks a Hurst parameter.

  Arguments:
    H: The Hurst parameter.
    allow_half (optional): Whether H = 1/2 (white noise) is accepted. Sampling and
      descriptor routines accept it for testing; the solver does not. Defaults to
      False.

  Returns:
    H as a float.

  Exceptions:
    MemfpkDomainError:
      If H is outside (1/2, 1), or [1/2, 1) when allow_half is True.
  """
  value = require_finite("H", H)
  if allow_half:
    if not 0.5 <= value < 1.0:
      raise MemfpkDomainError("H must satisfy 1/2 <= H < 1, got " + repr(H) + ".")
  elif not 0.5 < value < 1.0:
    raise MemfpkDomainError("H must satisfy 1/2 < H < 1, got " + repr(H) + ".")
  return value

def trapezoid(values, dx):
  """Trapezoid integral of equally spaced samples.

  Arguments:
    values: A 1-D array of samples.
    dx: The sample spacing.

  Returns:
    The trapezoid integral as a float.
  """
  values = np.asarray(values, dtype=float)
  if len(values) < 2:
    return 0.0
  return float(dx*(np.sum(values) - 0.5*(values[0] + values[-1])))

def cumulative_trapezoid(values, dx):
  """Running trapezoid integral with a leading zero, same length as values."""
  values = np.asarray(values, dtype=float)
  out = np.zeros(values.shape)
  if values.shape[-1] > 1:
    out[..., 1:] = np.cumsum(0.5*dx*(values[..., 1:] + values[..., :-1]), axis=-1)
  return out

def create_system_sample(component, sample, timestamp=None):
  """Creates a system sample that reports the behaviour of a component.

  Arguments:
    component: An alphanumeric value naming the component, e.g. "memfpk_solver".
      It should not contain a ":" or ";".
    sample: A dict of counters and timings. It should not contain any of the keys
      "component" or "timestamp".
    timestamp (optional): The epoch time in seconds. If a timestamp is not provided
      the current time is used.

  Returns:
    A dict with the keys "component", "timestamp" and the entries of sample.

  Exceptions:
    TypeError:
      If sample is not a dict.
    ValueError:
      If component contains a ":" or ";" or sample uses a reserved key.
  """
  name = str(component)
  if ":" in name or ";" in name:
    raise ValueError("component cannot contain a ':' or ';'.")
  if not isinstance(sample, dict):
    raise TypeError("The argument sample must be a dict.")
  special_keys = ["component", "timestamp"]
  if any(key in sample for key in special_keys):
    raise ValueError("sample cannot contain any of the special keys:" +
                     str(special_keys))
  tstamp = time.time()
  if timestamp != None: tstamp = float(timestamp)
  system_sample = {"component":name, "timestamp":tstamp}
  system_sample.update(sample)
  return system_sample

def parse_value(text):
  """Parses a record value, as a Python literal when possible, otherwise as text."""
  stripped = text.strip()
  try: return ast.literal_eval(stripped)
  except (ValueError, SyntaxError):
    return stripped

def parse_key_values(text):
  """Parses a flat key-value record.

  One "key: value" per line, blank lines and "#" comments ignored. Keys may use "-"
  or "_" interchangeably and are returned with "_".

  Arguments:
    text: The record as a string.

  Returns:
    A dict from key to parsed value.

  Exceptions:
    ValueError:
      If a non-empty line is not of the form "key: value" or a key repeats.
  """
  record = {}
  for number, line in enumerate(str(text).splitlines(), start=1):
    content = line.split("#", 1)[0].strip()
    if content == "":
      continue
    match = re.match(r"^([A-Za-z][\w-]*)\s*[:=]\s*(.*)$", content)
    if not match:
      raise ValueError("Line " + str(number) + " is malformed: " + repr(line))
    key = match.group(1).replace("-", "_")
    if key in record:
      raise ValueError("Key " + repr(key) + " is given more than once.")
    record[key] = parse_value(match.group(2))
  return record

def format_float(value):
  """Formats a float with 17 significant digits, so it round-trips exactly."""
  value = float(value)
  if math.isnan(value):
    return "nan"
  if math.isinf(value):
    return "inf" if value > 0 else "-inf"
  return "%.17g" % value

def to_jsonable(value):
  """Converts numpy scalars/arrays and non-finite floats to JSON-safe values."""
  if isinstance(value, dict):
    return {str(k):to_jsonable(v) for k, v in value.items()}
  if isinstance(value, (list, tuple)):
    return [to_jsonable(v) for v in value]
  if isinstance(value, np.ndarray):
    return [to_jsonable(v) for v in value.tolist()]
  if isinstance(value, (bool, np.bool_)):
    return bool(value)
  if isinstance(value, (int, np.integer)):
    return int(value)
  if isinstance(value, (float, np.floating)):
    number = float(value)
    if not math.isfinite(number):
      return format_float(number)
    return float(format_float(number))
  return value

def split_range(count, workers):
  """Splits range(count) into at most workers contiguous ranges of similar size."""
  workers = max(1, int(workers))
  chunks = min(workers, max(1, int(count)))
  bounds = np.linspace(0, int(count), chunks + 1).astype(int)
  return [range(bounds[i], bounds[i + 1]) for i in range(chunks)]

# State handed to forked workers; set only for the duration of map_chunks.
_shared_state = None

def _call_with_shared(item):
  (function, task) = item
  return function(task, _shared_state)

def map_chunks(function, tasks, workers=1, shared=None):
  """Applies function(task, shared) to every task, in order, optionally in worker
  processes.

  Workers are forked, so shared may hold objects that cannot be pickled, such as a
  SystemSpec built from lambdas. Only the tasks and results travel between
  processes.

  Arguments:
    function: A module-level function of (task, shared).
    tasks: A list of picklable tasks.
    workers (optional): The number of worker processes. With 1 the tasks run in the
      calling process. Defaults to 1.
    shared (optional): An object passed to every call. Defaults to None.

  Returns:
    The list of results in task order, whatever the number of workers.

  Exceptions:
    ValueError:
      If workers is not a positive integer.
  """
  global _shared_state
  workers = int(workers)
  if workers < 1:
    raise ValueError("workers must be a positive integer.")
  if workers == 1 or len(tasks) == 1:
    return [function(task, shared) for task in tasks]
  _shared_state = shared
  try:
    context = multiprocessing.get_context("fork")
    with context.Pool(processes=min(workers, len(tasks))) as pool:
      return pool.map(_call_with_shared, [(function, task) for task in tasks])
  finally:
    _shared_state = None
