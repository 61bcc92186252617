"""Bees-guided registry discovery followed by QoS selection.

Registries play the role of flower patches and probes the role of bees.
The fitness of a registry is the Wu-Palmer similarity between its
domain and the wanted domain; a registry's "patch" is its peer
neighborhood. A registry is never probed twice in one run.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import make_rng
from .exceptions import EmptyNetwork, InvalidParams, NoServicesInBestRegistry
from .network import PeerNetwork, RegistryDescription, ServiceDescriptor
from .optimize.bees import BeesParams
from .optimize.ga import GaParams, ga_optimize
from .optimize.spaces import GraphSpace
from .qos import check_level, check_weights, nearest_qos_service
from .taxonomy import Taxonomy, normalize_concept

SIMILARITY_ONE = "similarity-one"
BUDGET_EXHAUSTED = "budget-exhausted"
ALL_PROBED = "all-probed"


@dataclass(frozen=True)
class DiscoveryQuery:
    wanted_domain: str
    qos_weights: Mapping[str, float] = field(default_factory=dict)
    requested_level: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "wanted_domain", normalize_concept(self.wanted_domain))
        object.__setattr__(self, "qos_weights", MappingProxyType(dict(self.qos_weights)))
        object.__setattr__(self, "requested_level", check_level(self.requested_level))

    def validate(self, net: PeerNetwork, taxonomy: Taxonomy):
        taxonomy.depth(self.wanted_domain)
        check_weights(self.qos_weights, list(net.attributes))


@dataclass(frozen=True)
class IterationRecord:
    probed: tuple[str, ...]
    similarities: tuple[float, ...]
    elite: str


@dataclass(frozen=True)
class DiscoveryTrace:
    iterations: tuple[IterationRecord, ...]
    total_probes: int
    stop_reason: str

    @property
    def probed_ids(self) -> list[str]:
        return [rid for rec in self.iterations for rid in rec.probed]

    def best_so_far(self) -> list[float]:
        out, best = [], 0.0
        for rec in self.iterations:
            best = max([best, *rec.similarities])
            out.append(best)
        return out


@dataclass(frozen=True)
class DiscoveryResult:
    registry_id: str
    similarity: float
    selected_service: ServiceDescriptor
    trace: DiscoveryTrace


def _rank_key(item):
    rid, sim = item
    return (-sim, rid)


class _ProbeSession:
    """Probes registries once each, remembering what they revealed."""

    def __init__(self, net: PeerNetwork, taxonomy: Taxonomy, wanted: str):
        if len(net) == 0:
            raise EmptyNetwork("network has no registries")
        self.net = net
        self.taxonomy = taxonomy
        self.wanted = taxonomy.ancestors(wanted)[0]
        self.similarity: dict[str, float] = {}
        self.descriptions: dict[str, RegistryDescription] = {}
        self.records: list[IterationRecord] = []

    def probe_batch(self, batch) -> None:
        # results are consumed in id order so the outcome never depends
        # on the order in which parallel probes would come back
        ids = sorted(batch)
        sims = []
        for rid in ids:
            desc = self.net.probe(rid)
            sim = self.taxonomy.similarity(self.wanted, desc.domain)
            self.descriptions[rid] = desc
            self.similarity[rid] = sim
            sims.append(sim)
        self.records.append(IterationRecord(tuple(ids), tuple(sims), self.ranking()[0]))

    def ranking(self) -> list[str]:
        return [rid for rid, _ in sorted(self.similarity.items(), key=_rank_key)]

    def best(self) -> tuple[str, float]:
        rid = self.ranking()[0]
        return rid, self.similarity[rid]

    def unprobed(self) -> list[str]:
        return [rid for rid in self.net.registry_ids if rid not in self.similarity]

    def trace(self, stop_reason: str) -> DiscoveryTrace:
        return DiscoveryTrace(tuple(self.records), len(self.similarity), stop_reason)


def _stop_reason(session: _ProbeSession):
    if session.best()[1] == 1.0:
        return SIMILARITY_ONE
    if len(session.similarity) == len(session.net):
        return ALL_PROBED
    return None


def _pick(rng: np.random.Generator, pool: Sequence[str], k: int) -> list[str]:
    k = min(k, len(pool))
    if k <= 0:
        return []
    return [pool[i] for i in rng.choice(len(pool), size=k, replace=False)]


def _patch(net: PeerNetwork, center: str, hops: int) -> list[str]:
    """Registries within ``hops`` of ``center``, excluding it, sorted."""
    seen = {center}
    frontier = [center]
    for _ in range(hops):
        nxt = []
        for rid in frontier:
            for nb in sorted(net.adjacency[rid]):
                if nb not in seen:
                    seen.add(nb)
                    nxt.append(nb)
        frontier = nxt
    seen.discard(center)
    return sorted(seen)


def _run_bees(net, taxonomy, query, params: BeesParams, seed) -> tuple[_ProbeSession, str]:
    if not isinstance(params, BeesParams):
        raise InvalidParams("params must be a BeesParams instance")
    session = _ProbeSession(net, taxonomy, query.wanted_domain)
    rng = make_rng(seed)
    hops = max(1, int(params.ngh))

    session.probe_batch(_pick(rng, session.unprobed(), params.n))
    reason = _stop_reason(session)
    if reason:
        return session, reason

    n_sites = 1 + params.m - params.e
    for _ in range(params.max_iterations):
        chosen: set[str] = set()
        batch: list[str] = []
        for rank, site in enumerate(session.ranking()[:n_sites]):
            quota = params.nep if rank == 0 else params.nsp
            pool = [r for r in _patch(net, site, hops) if r not in session.similarity and r not in chosen]
            picked = _pick(rng, pool, quota)
            chosen.update(picked)
            batch.extend(picked)
        pool = [r for r in session.unprobed() if r not in chosen]
        batch.extend(_pick(rng, pool, params.n - params.m))
        if not batch:
            return session, BUDGET_EXHAUSTED
        session.probe_batch(batch)
        reason = _stop_reason(session)
        if reason:
            return session, reason
    return session, BUDGET_EXHAUSTED


def discover_registry(net: PeerNetwork, taxonomy: Taxonomy, query: DiscoveryQuery,
                      params: BeesParams, seed: int) -> tuple[str, DiscoveryTrace]:
    """Find the registry whose domain best matches ``query.wanted_domain``.

    Scouts probe ``n`` random registries. Each following iteration
    re-ranks everything probed so far, sends ``nep`` probes into the peer
    neighborhood of the top (elite) registry and ``nsp`` into the
    neighborhoods of the next ``m - e`` registries, and ``n - m`` scouts
    to random unprobed registries. The run stops at similarity 1.0, when
    every registry has been probed, or after ``max_iterations``.
    Ties go to the smallest registry id.
    """
    session, reason = _run_bees(net, taxonomy, query, params, seed)
    return session.best()[0], session.trace(reason)


def exhaustive_discover(net: PeerNetwork, taxonomy: Taxonomy, query: DiscoveryQuery) -> str:
    """Probe every registry once and return the most similar one."""
    return _sweep(net, taxonomy, query).best()[0]


def _sweep(net, taxonomy, query) -> _ProbeSession:
    session = _ProbeSession(net, taxonomy, query.wanted_domain)
    session.probe_batch(net.registry_ids)
    return session


def _run_ga(net, taxonomy, query, params: GaParams, seed) -> tuple[_ProbeSession, str]:
    """GA baseline over the registry graph; repeated visits cost no probe."""
    session = _ProbeSession(net, taxonomy, query.wanted_domain)
    space = GraphSpace(net.registry_ids, net.adjacency)
    size = params.population_size
    log: list[tuple[int, str]] = []
    calls = [0]

    def fitness(rid):
        if rid not in session.similarity:
            log.append((calls[0], rid))
            desc = net.probe(rid)
            session.descriptions[rid] = desc
            session.similarity[rid] = taxonomy.similarity(session.wanted, desc.domain)
        calls[0] += 1
        return session.similarity[rid]

    run_params = GaParams(
        population_size=size, crossover_rate=params.crossover_rate,
        mutation_rate=params.mutation_rate, tournament_size=params.tournament_size,
        max_generations=params.max_generations, target_fitness=1.0,
    )
    ga_optimize(fitness, space, run_params, seed)

    # split the probe log into generations: size calls first, size - 1 after
    by_gen: dict[int, list[str]] = {}
    for call, rid in log:
        gen = 0 if call < size else 1 + (call - size) // (size - 1)
        by_gen.setdefault(gen, []).append(rid)
    seen: dict[str, float] = {}
    for gen in sorted(by_gen):
        ids = sorted(by_gen[gen])
        seen.update((rid, session.similarity[rid]) for rid in ids)
        elite = min(seen.items(), key=_rank_key)[0]
        session.records.append(IterationRecord(tuple(ids), tuple(session.similarity[r] for r in ids), elite))
    return session, _stop_reason(session) or BUDGET_EXHAUSTED


def _select(session: _ProbeSession, rid: str, net: PeerNetwork, query: DiscoveryQuery,
            exclude=()) -> ServiceDescriptor:
    services = [s for s in session.descriptions[rid].services if s.id not in exclude]
    if not services:
        raise NoServicesInBestRegistry(f"registry {rid!r} has no selectable services")
    return nearest_qos_service(services, net.attributes, query.qos_weights, query.requested_level)


def _finish(session, reason, net, query, exclude) -> DiscoveryResult:
    rid, sim = session.best()
    service = _select(session, rid, net, query, exclude)
    return DiscoveryResult(rid, sim, service, session.trace(reason))


def discover_and_select(net: PeerNetwork, taxonomy: Taxonomy, query: DiscoveryQuery,
                        params: BeesParams, seed: int, exclude: Sequence[str] = ()) -> DiscoveryResult:
    """Bees discovery, then the nearest-QoS service of the winning registry.

    Services listed in ``exclude`` are never selected.
    """
    query.validate(net, taxonomy)
    session, reason = _run_bees(net, taxonomy, query, params, seed)
    return _finish(session, reason, net, query, exclude)


def sweep_and_select(net: PeerNetwork, taxonomy: Taxonomy, query: DiscoveryQuery,
                     exclude: Sequence[str] = ()) -> DiscoveryResult:
    query.validate(net, taxonomy)
    session = _sweep(net, taxonomy, query)
    return _finish(session, ALL_PROBED, net, query, exclude)


def ga_discover_and_select(net: PeerNetwork, taxonomy: Taxonomy, query: DiscoveryQuery,
                           params: GaParams, seed: int, exclude: Sequence[str] = ()) -> DiscoveryResult:
    query.validate(net, taxonomy)
    session, reason = _run_ga(net, taxonomy, query, params, seed)
    return _finish(session, reason, net, query, exclude)


class BeesDiscovery(BaseEstimator):
    """Estimator front end: ``fit(network, taxonomy)``, then ``predict(queries)``.

    ``predict`` returns the winning registry id per query;
    ``select`` returns full :class:`DiscoveryResult` objects.
    """

    def __init__(self, n=10, m=5, e=1, nsp=2, nep=4, ngh=1, stlim=10,
                 max_iterations=100, random_state=0):
        self.n = n
        self.m = m
        self.e = e
        self.nsp = nsp
        self.nep = nep
        self.ngh = ngh
        self.stlim = stlim
        self.max_iterations = max_iterations
        self.random_state = random_state

    def fit(self, network: PeerNetwork, taxonomy: Taxonomy):
        if len(network) == 0:
            raise EmptyNetwork("network has no registries")
        self.params_ = BeesParams(
            n=self.n, m=self.m, e=self.e, nsp=self.nsp, nep=self.nep, ngh=self.ngh,
            stlim=self.stlim, max_iterations=self.max_iterations,
        )
        self.network_ = network
        self.taxonomy_ = taxonomy
        return self

    def predict(self, queries: Sequence[DiscoveryQuery]) -> np.ndarray:
        check_is_fitted(self, "params_")
        return np.array([
            discover_registry(self.network_, self.taxonomy_, q, self.params_, self.random_state)[0]
            for q in queries
        ], dtype=object)

    def select(self, queries: Sequence[DiscoveryQuery]) -> list[DiscoveryResult]:
        check_is_fitted(self, "params_")
        return [discover_and_select(self.network_, self.taxonomy_, q, self.params_, self.random_state)
                for q in queries]
