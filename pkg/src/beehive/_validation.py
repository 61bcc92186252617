"""Small input-validation helpers used by the estimators and engines."""
from __future__ import annotations

import math
import numbers

import numpy as np

from .exceptions import InvalidParams

SEED_MAX = 2**64


def check_seed(seed) -> int:
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, numbers.Integral):
        raise InvalidParams(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < SEED_MAX:
        raise InvalidParams(f"seed must fit in an unsigned 64-bit integer, got {seed}")
    return seed


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed; the only RNG the engines use."""
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def check_int(name, value, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvalidParams(f"{name} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise InvalidParams(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_real(name, value, low=None, high=None, low_open=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real) or math.isnan(value):
        raise InvalidParams(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if low is not None and (value < low or (low_open and value == low)):
        op = ">" if low_open else ">="
        raise InvalidParams(f"{name} must be {op} {low}, got {value}")
    if high is not None and value > high:
        raise InvalidParams(f"{name} must be <= {high}, got {value}")
    return value


def check_stlim(value):
    if value is None or (isinstance(value, float) and math.isinf(value) and value > 0):
        return math.inf
    return check_int("stlim", value, minimum=1)


def check_optional_real(name, value):
    if value is None:
        return None
    return check_real(name, value)
