"""Failure substitution backed by a TTL equivalence cache.

Time is a logical clock of integer ticks passed in by the caller; the
module never reads the wall clock. An entry inserted at ``t`` with time
to live ``ttl`` is live while ``now < t + ttl``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Mapping

from .discovery import DiscoveryQuery, discover_and_select
from .exceptions import (
    InvalidParams,
    NoServicesInBestRegistry,
    NoSubstituteAvailable,
    SelfSubstitution,
    UnknownFailedService,
)
from .network import PeerNetwork, ServiceDescriptor
from .optimize.bees import BeesParams
from .taxonomy import Taxonomy

DEFAULT_TTL = 1000

CACHE_HIT = "cache-hit"
DISCOVERED = "discovered"


@dataclass(frozen=True)
class CacheEntry:
    failed_id: str
    substitute_id: str
    inserted_at: int
    ttl: int

    @property
    def expires_at(self) -> int:
        return self.inserted_at + self.ttl

    def alive(self, now: int) -> bool:
        return now < self.expires_at


class EquivalenceCache:
    """Map from failed service id to a substitute, with per-entry TTL.

    With ``capacity`` set, inserting past it evicts the entry that
    expires first (ties: smallest failed id). Entries are replaced
    whole, so a concurrent reader sees either the old or the new one.
    """

    def __init__(self, ttl: int = DEFAULT_TTL, capacity: int | None = None):
        if ttl <= 0:
            raise InvalidParams(f"ttl must be positive, got {ttl}")
        if capacity is not None and capacity < 1:
            raise InvalidParams(f"capacity must be >= 1, got {capacity}")
        self.ttl = ttl
        self.capacity = capacity
        self.entries: dict[str, CacheEntry] = {}
        self._write = threading.Lock()

    def __len__(self):
        return len(self.entries)

    def __contains__(self, failed_id):
        return failed_id in self.entries

    def lookup(self, failed_id: str, now: int) -> str | None:
        entry = self.entries.get(failed_id)
        if entry is None or not entry.alive(now):
            return None
        return entry.substitute_id

    def insert(self, failed_id: str, substitute_id: str, now: int, ttl: int | None = None) -> "EquivalenceCache":
        if failed_id == substitute_id:
            raise SelfSubstitution(f"service {failed_id!r} cannot substitute itself")
        ttl = self.ttl if ttl is None else ttl
        if ttl <= 0:
            raise InvalidParams(f"ttl must be positive, got {ttl}")
        with self._write:
            self.entries[failed_id] = CacheEntry(failed_id, substitute_id, now, ttl)
            if self.capacity is not None:
                while len(self.entries) > self.capacity:
                    victim = min(self.entries.values(), key=lambda e: (e.expires_at, e.failed_id))
                    del self.entries[victim.failed_id]
        return self

    def evict_expired(self, now: int) -> int:
        with self._write:
            dead = [k for k, e in self.entries.items() if not e.alive(now)]
            for k in dead:
                del self.entries[k]
        return len(dead)

    def drop(self, failed_id: str) -> None:
        with self._write:
            self.entries.pop(failed_id, None)

    def dump(self) -> str:
        """Two tab-separated columns: failed id, substitute id."""
        return "".join(f"{k}\t{self.entries[k].substitute_id}\n" for k in sorted(self.entries))


def cache_lookup(cache: EquivalenceCache, failed_id: str, now: int) -> str | None:
    return cache.lookup(failed_id, now)


def cache_insert(cache: EquivalenceCache, failed_id: str, substitute_id: str, now: int) -> EquivalenceCache:
    return cache.insert(failed_id, substitute_id, now)


def evict_expired(cache: EquivalenceCache, now: int) -> int:
    return cache.evict_expired(now)


@dataclass(frozen=True)
class Substitution:
    service: ServiceDescriptor
    source: str
    probes: int
    registry_id: str


def substitute(failed_id: str, cache: EquivalenceCache, net: PeerNetwork, taxonomy: Taxonomy,
               params: BeesParams, weights: Mapping[str, float], requested_level: float,
               now: int, seed: int) -> Substitution:
    """Replace a failed service.

    A live cache entry whose substitute still exists short-circuits the
    search with zero probes. Otherwise the failed service's community
    domain drives a bees discovery (the failed service itself is never
    selected) and the new pair is cached at ``now``.
    """
    home = net.registry_of(failed_id)
    if home is None:
        raise UnknownFailedService(f"service {failed_id!r} is not in the network")

    cached = cache.lookup(failed_id, now)
    if cached is not None:
        svc = net.find_service(cached)
        if svc is not None:
            return Substitution(svc, CACHE_HIT, 0, net.registry_of(cached))
        cache.drop(failed_id)

    query = DiscoveryQuery(net.registries[home].domain, weights, requested_level)
    try:
        result = discover_and_select(net, taxonomy, query, params, seed, exclude=(failed_id,))
    except NoServicesInBestRegistry:
        raise NoSubstituteAvailable(
            f"no service other than {failed_id!r} is available in the best matching community"
        ) from None
    cache.insert(failed_id, result.selected_service.id, now)
    return Substitution(result.selected_service, DISCOVERED, result.trace.total_probes, result.registry_id)
