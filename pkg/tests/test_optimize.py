import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone

from beehive.exceptions import EmptySpace, InvalidParams, OutOfDomain
from beehive.optimize import (
    BeesOptimizer,
    BeesParams,
    BoxSpace,
    GaParams,
    GeneticOptimizer,
    GraphSpace,
    bees_optimize,
    ga_optimize,
    neighborhood_sample,
    schwefel,
    schwefel_space,
    sphere,
)
from oracles import grid_argmax


class Recorder:
    """Wraps a scalar fitness and logs every value it returns, in order."""

    def __init__(self, f):
        self.f = f
        self.values = []

    def __call__(self, x):
        v = self.f(x)
        self.values.append(v)
        return v


class RecordingBox(BoxSpace):
    def __init__(self, lower, upper):
        super().__init__(lower, upper)
        self.patches = []

    def neighborhood(self, centers, ngh, rng):
        out = super().neighborhood(centers, ngh, rng)
        self.patches.append((centers.copy(), ngh, out.copy()))
        return out


def quad(x):
    return -float((x[0] - 3.0) ** 2)


# -- bees engine ----------------------------------------------------------

def test_constant_fitness():
    params = BeesParams(max_iterations=10)
    rep = bees_optimize(lambda x: 5.0, BoxSpace.cube(-1, 1, 3), params, seed=0)
    assert rep.best.fitness == 5.0
    assert rep.fitness_history == (5.0,) * 10
    assert rep.iterations_run == 10


def test_quadratic_reaches_optimum():
    # grid oracle at step 1e-4 places the optimum at x = 3
    xs, _ = grid_argmax(lambda x: -(x - 3.0) ** 2, 0.0, 10.0, 1e-4)
    assert abs(xs - 3.0) < 1e-9
    params = BeesParams(n=20, m=5, e=2, nsp=5, nep=10, ngh=0.1, stlim=5, max_iterations=200)
    for seed in range(5):
        rep = bees_optimize(quad, BoxSpace([0.0], [10.0]), params, seed=seed)
        assert abs(rep.best.position[0] - xs) <= 0.05


def test_bees_determinism():
    params = BeesParams(n=12, m=4, e=2, nsp=2, nep=5, ngh=0.2, stlim=3, max_iterations=30)
    space = schwefel_space(3)
    a = bees_optimize(schwefel, space, params, seed=99)
    b = bees_optimize(schwefel, space, params, seed=99)
    c = bees_optimize(schwefel, space, params, seed=100)
    assert a == b
    assert a.best != c.best


def test_vectorized_matches_scalar():
    params = BeesParams(n=15, m=5, e=2, nsp=3, nep=6, ngh=0.1, stlim=4, max_iterations=40)
    space = schwefel_space(2)
    a = bees_optimize(schwefel, space, params, seed=3)
    b = bees_optimize(schwefel, space, params, seed=3, vectorized=True)
    assert a == b


def test_target_fitness_stops_early():
    params = BeesParams(n=20, m=5, e=2, nsp=5, nep=10, ngh=0.1, max_iterations=500, target_fitness=-1e-2)
    rep = bees_optimize(quad, BoxSpace([0.0], [10.0]), params, seed=1)
    assert rep.stop_reason == "target-reached"
    assert rep.iterations_run < 500
    assert rep.best.fitness >= -1e-2


def test_best_is_best_ever_evaluated():
    rec = Recorder(schwefel)
    params = BeesParams(n=10, m=4, e=1, nsp=2, nep=4, ngh=0.1, stlim=2, max_iterations=25)
    rep = bees_optimize(rec, schwefel_space(2), params, seed=5)
    assert rep.best.fitness == max(rec.values)
    assert rec.values[rep.best.index] == rep.best.fitness
    assert rep.evaluations == len(rec.values)


@pytest.mark.parametrize(
    "kw",
    [dict(e=3, m=2), dict(m=11, n=10), dict(nep=1, nsp=2), dict(ngh=0.0), dict(ngh=-1.0),
     dict(stlim=0), dict(max_iterations=0), dict(n=0), dict(nsp=0), dict(e=0), dict(ngh=float("nan"))],
)
def test_invalid_bees_params(kw):
    with pytest.raises(InvalidParams):
        BeesParams(**kw)


def test_infinite_stlim_spellings():
    assert BeesParams(stlim=None).stlim == math.inf
    assert BeesParams(stlim=math.inf).stlim == math.inf


def test_bad_params_type():
    with pytest.raises(InvalidParams):
        bees_optimize(quad, BoxSpace([0.0], [1.0]), {"n": 3}, seed=0)


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
def test_seed_must_be_u64(seed):
    with pytest.raises(InvalidParams):
        bees_optimize(quad, BoxSpace([0.0], [1.0]), BeesParams(), seed=seed)


def test_empty_spaces():
    with pytest.raises(EmptySpace):
        GraphSpace([])
    with pytest.raises(EmptySpace):
        BoxSpace([1.0], [0.0])
    with pytest.raises(EmptySpace):
        BoxSpace([], [])


bees_params = st.builds(
    lambda n, m_frac, e_frac, nsp, extra, ngh, iters: BeesParams(
        n=n, m=max(1, round(n * m_frac)), e=max(1, round(max(1, round(n * m_frac)) * e_frac)),
        nsp=nsp, nep=nsp + extra, ngh=ngh, stlim=None, max_iterations=iters),
    st.integers(1, 12), st.floats(0.0, 1.0), st.floats(0.0, 1.0),
    st.integers(1, 4), st.integers(0, 4), st.floats(0.01, 2.0), st.integers(1, 15),
)


@settings(max_examples=60, deadline=None)
@given(bees_params, st.integers(0, 2**64 - 1))
def test_evaluation_budget_exact_without_abandonment(params, seed):
    rec = Recorder(sphere)
    rep = bees_optimize(rec, BoxSpace.cube(-2, 2, 2), params, seed)
    assert rep.evaluations == params.evaluation_budget() == len(rec.values)
    assert rep.evaluations >= rep.iterations_run


@settings(max_examples=60, deadline=None)
@given(bees_params, st.integers(1, 4), st.integers(0, 2**64 - 1))
def test_evaluation_budget_bound_with_abandonment(params, stlim, seed):
    p = BeesParams(**{**params.__dict__, "stlim": stlim})
    rep = bees_optimize(lambda x: 1.0, BoxSpace.cube(0, 1, 2), p, seed)
    assert rep.evaluations <= p.evaluation_budget()


@settings(max_examples=60, deadline=None)
@given(bees_params, st.integers(0, 2**64 - 1))
def test_history_monotone_and_patch_containment(params, seed):
    space = RecordingBox([-3.0, 0.0], [5.0, 1.0])
    rep = bees_optimize(schwefel_like, space, params, seed)
    h = np.array(rep.fitness_history)
    assert np.all(np.diff(h) >= 0)
    for centers, ngh, out in space.patches:
        half = 0.5 * ngh * space.span
        assert np.all(np.abs(out - centers) <= half + 1e-12)
        assert np.all(out >= space.lower) and np.all(out <= space.upper)


def schwefel_like(x):
    return float(np.sum(x * np.sin(np.sqrt(np.abs(x)))))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(1, 4), st.integers(1, 10), st.integers(0, 2**64 - 1))
def test_degenerates_to_random_search(n, nep, iters, seed):
    # every bee is an elite site and the patch covers the whole box
    params = BeesParams(n=n, m=n, e=n, nsp=nep, nep=nep, ngh=2.0, stlim=None, max_iterations=iters)
    rec = Recorder(schwefel_like)
    rep = bees_optimize(rec, BoxSpace.cube(-100, 100, 2), params, seed)
    vals = np.array(rec.values)
    generations = [vals[:n]] + [vals[n + i * n * nep: n + (i + 1) * n * nep] for i in range(iters)]
    assert sum(len(g) for g in generations) == len(vals)
    for g in generations:
        assert rep.best.fitness >= g.max()
    assert rep.best.fitness == vals.max()


# -- neighborhood sampling ----------------------------------------------

def test_tiny_patch_stays_at_center():
    rng = np.random.default_rng(0)
    space = BoxSpace([0.0], [1.0])
    for c in (0.0, 0.3, 1.0):
        for _ in range(100):
            x = neighborhood_sample(np.array([c]), 1e-12, space, rng)
            assert abs(x[0] - c) <= 1e-12


def test_patch_at_lower_bound():
    rng = np.random.default_rng(1)
    space = BoxSpace([0.0], [10.0])
    xs = space.neighborhood(np.zeros((1000, 1)), 0.1, rng)
    assert np.all((xs >= 0.0) & (xs <= 1.0))


def test_discrete_one_hop():
    space = GraphSpace(["c", "a", "b", "z", "far"], {"c": {"a", "b"}, "z": {"far"}, "b": {"z"}})
    rng = np.random.default_rng(2)
    seen = {neighborhood_sample("c", 1, space, rng) for _ in range(300)}
    assert seen == {"a", "b", "c"}
    seen2 = {neighborhood_sample("c", 2, space, rng) for _ in range(300)}
    assert seen2 == {"a", "b", "c", "z"}


def test_bees_on_graph_space_finds_max():
    elements = list(range(50))
    adj = {i: {i - 1, i + 1} for i in elements}
    space = GraphSpace(elements, adj)
    params = BeesParams(n=5, m=3, e=1, nsp=2, nep=4, ngh=1, stlim=5, max_iterations=60)
    rep = bees_optimize(lambda k: -abs(k - 37), space, params, seed=4)
    assert rep.best.position == 37


# -- GA -----------------------------------------------------------------

def test_ga_constant_fitness():
    rep = ga_optimize(lambda x: 5.0, BoxSpace.cube(-1, 1, 2), GaParams(max_generations=3), seed=0)
    assert rep.fitness_history[0] == 5.0
    assert rep.best.fitness == 5.0


def test_ga_sphere():
    params = GaParams(population_size=40, max_generations=300)
    rep = ga_optimize(sphere, BoxSpace.cube(-5, 5, 2), params, seed=1, vectorized=True)
    assert rep.best.fitness >= -1e-3


def test_ga_elitism_without_variation():
    rec = Recorder(schwefel_like)
    params = GaParams(population_size=12, crossover_rate=0.0, mutation_rate=0.0, max_generations=20)
    rep = ga_optimize(rec, BoxSpace.cube(-50, 50, 2), params, seed=8)
    initial_best = max(rec.values[:12])
    assert np.all(np.diff(rep.fitness_history) >= 0)
    assert any(c.fitness == initial_best for c in rep.population)
    assert rep.best.fitness == initial_best


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 20), st.floats(0, 1), st.floats(0, 1), st.integers(1, 5),
       st.integers(1, 20), st.integers(0, 2**64 - 1))
def test_ga_invariants(size, cx, mut, tour, gens, seed):
    params = GaParams(size, cx, mut, tour, gens)
    rec = Recorder(schwefel_like)
    space = BoxSpace.cube(-100, 100, 3)
    rep = ga_optimize(rec, space, params, seed)
    assert len(rep.population) == size
    assert rep.evaluations == size + gens * (size - 1) == len(rec.values)
    assert np.all(np.diff(rep.fitness_history) >= 0)
    assert rep.best.fitness == max(rec.values)
    assert all(space.contains(c.position) for c in rep.population)
    assert rep == ga_optimize(schwefel_like, space, params, seed)


def test_ga_on_graph_space():
    space = GraphSpace(range(30))
    rep = ga_optimize(lambda k: -(k - 11) ** 2, space, GaParams(population_size=20, mutation_rate=0.3, max_generations=50), seed=3)
    assert rep.best.position == 11
    assert all(c.position in range(30) for c in rep.population)


@pytest.mark.parametrize(
    "kw",
    [dict(population_size=1), dict(crossover_rate=1.5), dict(mutation_rate=-0.1),
     dict(tournament_size=0), dict(max_generations=0)],
)
def test_invalid_ga_params(kw):
    with pytest.raises(InvalidParams):
        GaParams(**kw)


# -- benchmarks -----------------------------------------------------------

def test_schwefel_values():
    assert schwefel(np.zeros(6)) == pytest.approx(-2513.8974, abs=1e-9)
    assert abs(schwefel(np.full(6, 420.9687))) <= 1e-3
    batch = schwefel(np.array([np.zeros(6), np.full(6, 420.9687)]))
    assert batch.shape == (2,)


def test_schwefel_grid_argmax():
    x, y = grid_argmax(lambda xs: schwefel(xs[:, None]), -500.0, 500.0, 0.001)
    assert abs(x - 420.9687) <= 0.01
    assert abs(y) <= 1e-3


@pytest.mark.parametrize("x", [[501.0], [0.0, -500.5], [float("nan")], []])
def test_schwefel_out_of_domain(x):
    with pytest.raises(OutOfDomain):
        schwefel(np.array(x))


def test_sphere():
    assert sphere(np.zeros(3)) == 0.0
    assert sphere(np.array([1.0, 2.0])) == -5.0


# -- estimator front ends -------------------------------------------------

def test_bees_estimator_api():
    est = BeesOptimizer(n=20, m=5, e=2, nsp=5, nep=10, ngh=0.1, stlim=5, max_iterations=50, random_state=2)
    assert est.get_params()["nep"] == 10
    est.set_params(max_iterations=80)
    est.fit(quad, BoxSpace([0.0], [10.0]))
    assert abs(est.best_position_[0] - 3.0) <= 0.05
    assert est.score() == est.best_fitness_
    assert est.n_evaluations_ <= BeesParams(n=20, m=5, e=2, nsp=5, nep=10, max_iterations=80).evaluation_budget()
    twin = clone(est).fit(quad, BoxSpace([0.0], [10.0]))
    assert twin.report_ == est.report_


def test_ga_estimator_api():
    est = GeneticOptimizer(max_generations=50, vectorized=True, random_state=5)
    est.fit(sphere, BoxSpace.cube(-5, 5, 2))
    assert est.best_fitness_ == est.report_.best.fitness
    assert clone(est).get_params() == est.get_params()


def test_unfitted_estimator():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        BeesOptimizer().score()
