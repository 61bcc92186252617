"""Generational genetic algorithm used as a baseline."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import check_int, check_optional_real, check_real, make_rng
from ..exceptions import InvalidParams
from .core import Candidate, Evaluator, OptimizationReport, rank_order


@dataclass(frozen=True)
class GaParams:
    population_size: int = 40
    crossover_rate: float = 0.9
    mutation_rate: float = 0.05
    tournament_size: int = 3
    max_generations: int = 100
    target_fitness: float | None = None

    def __post_init__(self):
        check_int("population_size", self.population_size, 2)
        check_real("crossover_rate", self.crossover_rate, 0.0, 1.0)
        check_real("mutation_rate", self.mutation_rate, 0.0, 1.0)
        check_int("tournament_size", self.tournament_size, 1)
        check_int("max_generations", self.max_generations, 1)
        object.__setattr__(self, "target_fitness", check_optional_real("target_fitness", self.target_fitness))


def ga_optimize(
    fitness: Callable,
    space,
    params: GaParams,
    seed: int,
    vectorized: bool = False,
) -> OptimizationReport:
    """Tournament selection, crossover, mutation and single elitism.

    On a box, crossover is an arithmetic blend ``w*a + (1-w)*b`` with
    ``w ~ U(0, 1)`` per child, and mutation redraws each gene uniformly
    with probability ``mutation_rate``. On a graph, crossover picks either
    parent with equal odds and mutation redraws the whole element.
    The best individual always survives into the next generation.
    """
    if not isinstance(params, GaParams):
        raise InvalidParams("params must be a GaParams instance")
    rng = make_rng(seed)
    evaluate = Evaluator(fitness, space, vectorized)
    size = params.population_size
    n_children = size - 1

    pop = space.sample(rng, size)
    fit = evaluate(pop)
    idx = np.arange(size)

    def champion():
        return rank_order(fit, idx)[0]

    b = champion()
    best = (pop[b].copy(), float(fit[b]), int(idx[b]))
    history: list[float] = []
    stop_reason = "budget-exhausted"
    generations = 0

    def reached():
        return params.target_fitness is not None and best[1] >= params.target_fitness

    if reached():
        stop_reason = "target-reached"
    else:
        for _ in range(params.max_generations):
            elite = champion()
            contenders = rng.integers(0, size, size=(2 * n_children, params.tournament_size))
            winners = contenders[np.arange(2 * n_children), np.argmax(fit[contenders], axis=1)]
            mothers, fathers = pop[winners[0::2]], pop[winners[1::2]]
            cross = rng.random(n_children) < params.crossover_rate

            if space.discrete:
                take_father = cross & (rng.random(n_children) < 0.5)
                children = np.where(take_father, fathers, mothers)
                mutate = rng.random(n_children) < params.mutation_rate
            else:
                w = rng.random((n_children, 1))
                children = np.where(cross[:, None], w * mothers + (1.0 - w) * fathers, mothers)
                mutate = rng.random(children.shape) < params.mutation_rate
            children = np.where(mutate, space.sample(rng, n_children), children)

            first = evaluate.count
            child_fit = evaluate(children)
            pop = np.concatenate((pop[elite : elite + 1], children))
            fit = np.concatenate((fit[elite : elite + 1], child_fit))
            idx = np.concatenate((idx[elite : elite + 1], first + np.arange(n_children)))

            b = champion()
            if fit[b] > best[1]:
                best = (pop[b].copy(), float(fit[b]), int(idx[b]))
            generations += 1
            history.append(best[1])
            if reached():
                stop_reason = "target-reached"
                break

    population = tuple(Candidate(space.decode(pop[i]), float(fit[i]), int(idx[i])) for i in range(size))
    return OptimizationReport(
        best=Candidate(space.decode(best[0]), best[1], best[2]),
        evaluations=evaluate.count,
        iterations_run=generations,
        fitness_history=tuple(history),
        stop_reason=stop_reason,
        population=population,
    )


class GeneticOptimizer(BaseEstimator):
    def __init__(self, population_size=40, crossover_rate=0.9, mutation_rate=0.05,
                 tournament_size=3, max_generations=100, target_fitness=None,
                 vectorized=False, random_state=0):
        self.population_size = population_size
        self.crossover_rate = crossover_rate
        self.mutation_rate = mutation_rate
        self.tournament_size = tournament_size
        self.max_generations = max_generations
        self.target_fitness = target_fitness
        self.vectorized = vectorized
        self.random_state = random_state

    def fit(self, fitness, space):
        params = GaParams(
            population_size=self.population_size,
            crossover_rate=self.crossover_rate,
            mutation_rate=self.mutation_rate,
            tournament_size=self.tournament_size,
            max_generations=self.max_generations,
            target_fitness=self.target_fitness,
        )
        self.report_ = ga_optimize(fitness, space, params, self.random_state, self.vectorized)
        self.best_ = self.report_.best
        self.best_position_ = self.best_.position
        self.best_fitness_ = self.best_.fitness
        self.n_evaluations_ = self.report_.evaluations
        return self

    def score(self, fitness=None, space=None):
        check_is_fitted(self, "report_")
        return self.best_fitness_
