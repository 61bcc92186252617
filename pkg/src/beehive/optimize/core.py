"""Value types shared by the optimization engines."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np


@dataclass(frozen=True)
class Candidate:
    """An evaluated point. ``index`` is its position in the evaluation order."""

    position: Any
    fitness: float
    index: int = -1

    def __eq__(self, other):
        if not isinstance(other, Candidate):
            return NotImplemented
        return (
            self.fitness == other.fitness
            and self.index == other.index
            and np.array_equal(np.asarray(self.position), np.asarray(other.position))
        )

    __hash__ = None


@dataclass
class Site:
    best: Candidate
    stagnant_cycles: int = 0


@dataclass(frozen=True)
class OptimizationReport:
    best: Candidate
    evaluations: int
    iterations_run: int
    fitness_history: tuple[float, ...]
    stop_reason: str = "budget-exhausted"
    population: tuple[Candidate, ...] = field(default=(), repr=False)


class Evaluator:
    """Counts fitness calls and adapts scalar evaluators to batches.

    A vectorized fitness receives the whole batch (an ``(k, d)`` array for
    boxes, a list of elements for graphs); a scalar one receives each
    decoded position in turn.
    """

    def __init__(self, fitness: Callable, space, vectorized: bool = False):
        self.fitness = fitness
        self.space = space
        self.vectorized = vectorized
        self.count = 0

    def __call__(self, rows: np.ndarray) -> np.ndarray:
        if len(rows) == 0:
            return np.empty(0)
        if self.vectorized:
            values = np.asarray(self.fitness(self.space.decode_batch(rows)), dtype=float).reshape(len(rows))
        else:
            values = np.array([float(self.fitness(self.space.decode(r))) for r in rows])
        if not np.all(np.isfinite(values)):
            raise ValueError("fitness returned a non-finite value")
        self.count += len(rows)
        return values


def rank_order(fitness: np.ndarray, index: np.ndarray) -> np.ndarray:
    """Indices sorted by descending fitness, ties by earliest evaluation."""
    return np.lexsort((index, -fitness))
