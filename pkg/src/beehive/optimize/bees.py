"""Maximizing Bees Algorithm over a box or a graph of elements."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import check_int, check_optional_real, check_real, check_stlim, make_rng
from ..exceptions import InvalidParams
from .core import Candidate, Evaluator, OptimizationReport, rank_order


@dataclass(frozen=True)
class BeesParams:
    """Control parameters.

    n scouts, m selected sites of which e are elite. Elite sites get
    nep recruits, the other m - e sites get nsp. ngh is the patch size:
    a fraction of each dimension's range for boxes, a hop radius for
    graphs. A site that fails to improve for stlim consecutive
    iterations is abandoned (``stlim=None`` never abandons).
    """

    n: int = 10
    m: int = 5
    e: int = 1
    nsp: int = 2
    nep: int = 4
    ngh: float = 1.0
    stlim: float = 10
    max_iterations: int = 100
    target_fitness: float | None = None

    def __post_init__(self):
        n = check_int("n", self.n, 1)
        m = check_int("m", self.m, 1)
        e = check_int("e", self.e, 1)
        if not e <= m <= n:
            raise InvalidParams(f"need 1 <= e <= m <= n, got e={e}, m={m}, n={n}")
        nsp = check_int("nsp", self.nsp, 1)
        nep = check_int("nep", self.nep, 1)
        if nep < nsp:
            raise InvalidParams(f"nep ({nep}) must be >= nsp ({nsp})")
        object.__setattr__(self, "ngh", check_real("ngh", self.ngh, low=0.0, low_open=True))
        object.__setattr__(self, "stlim", check_stlim(self.stlim))
        check_int("max_iterations", self.max_iterations, 1)
        object.__setattr__(self, "target_fitness", check_optional_real("target_fitness", self.target_fitness))

    def evaluation_budget(self, iterations: int | None = None) -> int:
        """Fitness calls for a full run without early stop or abandonment."""
        it = self.max_iterations if iterations is None else iterations
        per_iter = self.e * self.nep + (self.m - self.e) * self.nsp + (self.n - self.m)
        return self.n + it * per_iter


def bees_optimize(
    fitness: Callable,
    space,
    params: BeesParams,
    seed: int,
    vectorized: bool = False,
) -> OptimizationReport:
    """Run the Bees Algorithm and return the best candidate ever evaluated.

    Each iteration ranks the population, recruits bees around the m best
    sites, keeps a site's new centre only when its best recruit beats it,
    drops sites stagnant for ``stlim`` iterations and replaces the n - m
    unselected bees with fresh random scouts. Ties in ranking go to the
    earliest evaluation.
    """
    if not isinstance(params, BeesParams):
        raise InvalidParams("params must be a BeesParams instance")
    rng = make_rng(seed)
    evaluate = Evaluator(fitness, space, vectorized)
    p = params

    pos = space.sample(rng, p.n)
    fit = evaluate(pos)
    idx = np.arange(p.n)
    stag = np.zeros(p.n, dtype=np.int64)

    b = rank_order(fit, idx)[0]
    best_pos, best_fit, best_idx = pos[b].copy(), float(fit[b]), int(idx[b])
    history: list[float] = []
    stop_reason = "budget-exhausted"
    iterations = 0

    def reached():
        return p.target_fitness is not None and best_fit >= p.target_fitness

    # per-site recruit layout is fixed while at least m bees remain
    layout: dict[int, tuple] = {}

    def segments(k):
        if k not in layout:
            counts = np.where(np.arange(k) < p.e, p.nep, p.nsp)
            offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
            width = int(counts.max())
            mask = np.arange(width) < counts[:, None]
            layout[k] = (counts, offsets, mask)
        return layout[k]

    if reached():
        stop_reason = "target-reached"
    else:
        n_scouts = p.n - p.m
        for _ in range(p.max_iterations):
            sel = rank_order(fit, idx)[: p.m]
            k = sel.size
            if k:
                counts, offsets, mask = segments(k)
                recruits = space.neighborhood(np.repeat(pos[sel], counts, axis=0), p.ngh, rng)
            else:
                recruits = pos[:0]
            scouts = space.sample(rng, n_scouts)
            n_rec = len(recruits)

            first = evaluate.count
            values = evaluate(np.concatenate((recruits, scouts)))
            if values.size:
                j = int(np.argmax(values))
                if values[j] > best_fit:
                    best_fit, best_idx = float(values[j]), first + j
                    best_pos = (recruits[j] if j < n_rec else scouts[j - n_rec]).copy()

            survivors = sel
            if k:
                rfit = values[:n_rec]
                padded = np.full(mask.shape, -np.inf)
                padded[mask] = rfit
                winner = offsets + np.argmax(padded, axis=1)
                improved = rfit[winner] > fit[sel]
                upd = sel[improved]
                won = winner[improved]
                pos[upd] = recruits[won]
                fit[upd] = rfit[won]
                idx[upd] = first + won
                stag[sel] = np.where(improved, 0, stag[sel] + 1)
                survivors = sel[stag[sel] < p.stlim]

            pos = np.concatenate((pos[survivors], scouts))
            fit = np.concatenate((fit[survivors], values[n_rec:]))
            idx = np.concatenate((idx[survivors], first + n_rec + np.arange(n_scouts)))
            stag = np.concatenate((stag[survivors], np.zeros(n_scouts, dtype=np.int64)))

            iterations += 1
            history.append(best_fit)
            if reached():
                stop_reason = "target-reached"
                break

    population = tuple(
        Candidate(space.decode(pos[i]), float(fit[i]), int(idx[i])) for i in rank_order(fit, idx)
    )
    return OptimizationReport(
        best=Candidate(space.decode(best_pos), best_fit, best_idx),
        evaluations=evaluate.count,
        iterations_run=iterations,
        fitness_history=tuple(history),
        stop_reason=stop_reason,
        population=population,
    )


class BeesOptimizer(BaseEstimator):
    """Estimator wrapper around :func:`bees_optimize`.

    ``fit(fitness, space)`` runs the search; results land in ``best_``,
    ``best_position_``, ``best_fitness_`` and ``report_``.
    """

    def __init__(self, n=10, m=5, e=1, nsp=2, nep=4, ngh=0.1, stlim=10,
                 max_iterations=100, target_fitness=None, vectorized=False, random_state=0):
        self.n = n
        self.m = m
        self.e = e
        self.nsp = nsp
        self.nep = nep
        self.ngh = ngh
        self.stlim = stlim
        self.max_iterations = max_iterations
        self.target_fitness = target_fitness
        self.vectorized = vectorized
        self.random_state = random_state

    def _params(self) -> BeesParams:
        return BeesParams(
            n=self.n, m=self.m, e=self.e, nsp=self.nsp, nep=self.nep, ngh=self.ngh,
            stlim=self.stlim, max_iterations=self.max_iterations, target_fitness=self.target_fitness,
        )

    def fit(self, fitness, space):
        self.report_ = bees_optimize(fitness, space, self._params(), self.random_state, self.vectorized)
        self.best_ = self.report_.best
        self.best_position_ = self.best_.position
        self.best_fitness_ = self.best_.fitness
        self.n_evaluations_ = self.report_.evaluations
        return self

    def score(self, fitness=None, space=None):
        check_is_fitted(self, "report_")
        return self.best_fitness_
