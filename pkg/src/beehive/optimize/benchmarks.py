"""Benchmark fitness functions in maximization form.

All functions accept a single point of shape ``(d,)`` or a batch of
shape ``(k, d)`` and return a float or a ``(k,)`` array respectively.
"""
import numpy as np

from ..exceptions import OutOfDomain
from .spaces import BoxSpace

SCHWEFEL_CONSTANT = 418.9829
SCHWEFEL_OPTIMUM = 420.9687
SCHWEFEL_BOUND = 500.0


def schwefel(x):
    """Inverted Schwefel: ``-(418.9829*d - sum(x_i * sin(sqrt(|x_i|))))``.

    Global maximum is about 0 at ``x_i = 420.9687``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise OutOfDomain("schwefel needs at least one dimension")
    # written so that NaN also fails the check
    if not np.abs(x).max() <= SCHWEFEL_BOUND:
        raise OutOfDomain("schwefel is defined on [-500, 500]^d")
    d = x.shape[-1]
    value = np.sum(x * np.sin(np.sqrt(np.abs(x))), axis=-1) - SCHWEFEL_CONSTANT * d
    return float(value) if x.ndim == 1 else value


def schwefel_space(dim: int) -> BoxSpace:
    return BoxSpace.cube(-SCHWEFEL_BOUND, SCHWEFEL_BOUND, dim)


def sphere(x):
    """Negated sphere ``-||x||^2``; maximum 0 at the origin."""
    x = np.asarray(x, dtype=float)
    value = -np.sum(x * x, axis=-1)
    return float(value) if x.ndim == 1 else value
