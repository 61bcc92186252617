"""Scenario files: flat ``key = value`` documents driving the CLI.

Example::

    taxonomy = builtin
    generate.registries = 30
    generate.services = 3-8
    query.domain = hotel_booking
    query.weights = availability:0.4,throughput:0.1,response_time_ms:0.3,cost:0.2
    query.level = 0.8
    methods = bees,sweep
    bees.n = 10
    seeds = 1-50

Relative paths are resolved against the scenario file's directory.
See README.md for the complete key list.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .discovery import DiscoveryQuery
from .exceptions import BeehiveError
from .network import DEFAULT_ATTRIBUTES, GeneratorParams, PeerNetwork, generate_network, load_network, parse_attributes
from .optimize.bees import BeesParams
from .optimize.ga import GaParams
from .substitution import DEFAULT_TTL
from .taxonomy import Taxonomy, balanced_taxonomy, builtin_taxonomy, load_taxonomy

METHODS = ("bees", "sweep", "ga")
RANDOM_REGISTRY = "random-registry"

_BEES_KEYS = {"n": int, "m": int, "e": int, "nsp": int, "nep": int, "ngh": float,
              "stlim": int, "max_iterations": int}
_GA_KEYS = {"population_size": int, "crossover_rate": float, "mutation_rate": float,
            "tournament_size": int, "max_generations": int}
_KNOWN = {
    "taxonomy", "network", "methods", "seeds", "failures", "out",
    "query.domain", "query.weights", "query.level",
    "generate.registries", "generate.services", "generate.attributes",
    "generate.adjacency", "generate.k", "generate.seed", "generate.unique_domains",
    "cache.ttl", "cache.capacity",
    *(f"bees.{k}" for k in _BEES_KEYS), *(f"ga.{k}" for k in _GA_KEYS),
}


class ScenarioError(BeehiveError, ValueError):
    """Malformed or inconsistent scenario; the CLI maps it to exit code 2."""


def parse_document(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or not key:
            raise ScenarioError(f"line {lineno}: expected 'key = value'")
        if key not in _KNOWN:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ScenarioError(f"line {lineno}: key {key!r} given twice")
        out[key] = value.strip()
    return out


def parse_seeds(text: str) -> list[int]:
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, dash, hi = part.partition("-")
        try:
            if dash:
                seeds.extend(range(int(lo), int(hi) + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise ScenarioError(f"bad seed list entry {part!r}") from None
    if not seeds:
        raise ScenarioError("seeds must not be empty")
    if any(not 0 <= s < 2**64 for s in seeds):
        raise ScenarioError("seeds must be unsigned 64-bit integers")
    return seeds


def parse_range(text: str) -> tuple[int, int]:
    lo, dash, hi = text.partition("-")
    try:
        return (int(lo), int(hi)) if dash else (int(lo), int(lo))
    except ValueError:
        raise ScenarioError(f"bad range {text!r}, expected 'min-max'") from None


def parse_weights(text: str) -> dict[str, float]:
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, sep, value = part.partition(":")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ScenarioError(f"bad weight {part.strip()!r}, expected 'name:value'") from None
        if not sep:
            raise ScenarioError(f"bad weight {part.strip()!r}, expected 'name:value'")
    return out


def parse_failures(text: str) -> list[tuple[int, str]]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        sid, at, tick = part.rpartition("@")
        if not at or not sid:
            raise ScenarioError(f"bad failure {part!r}, expected 'service_id@tick'")
        try:
            out.append((int(tick), sid.strip()))
        except ValueError:
            raise ScenarioError(f"bad tick in failure {part!r}") from None
    return sorted(out, key=lambda x: x[0])


def _typed(key, raw, cast):
    try:
        return cast(raw)
    except ValueError:
        raise ScenarioError(f"{key}: cannot read {raw!r} as {cast.__name__}") from None


@dataclass
class Scenario:
    taxonomy_source: str = "builtin"
    network_path: Path | None = None
    generator: GeneratorParams | None = None
    generator_seed: int | None = None
    wanted_domain: str = ""
    weights: dict[str, float] | None = None
    requested_level: float = 1.0
    methods: tuple[str, ...] = ("bees",)
    bees: BeesParams = field(default_factory=BeesParams)
    ga: GaParams = field(default_factory=GaParams)
    seeds: list[int] = field(default_factory=lambda: [0])
    failures: list[tuple[int, str]] = field(default_factory=list)
    cache_ttl: int = DEFAULT_TTL
    cache_capacity: int | None = None
    out: Path | None = None
    base_dir: Path = Path(".")
    _taxonomy: Taxonomy | None = field(default=None, repr=False)
    _fixed_network: str | None = field(default=None, repr=False)

    def taxonomy(self) -> Taxonomy:
        """Load on first use. I/O errors propagate as ``OSError``."""
        if self._taxonomy is None:
            src = self.taxonomy_source
            if src == "builtin":
                self._taxonomy = builtin_taxonomy()
            elif src.startswith("balanced:"):
                b, _, levels = src[len("balanced:"):].partition("x")
                self._taxonomy = balanced_taxonomy(_typed("taxonomy", b, int), _typed("taxonomy", levels, int))
            else:
                path = self.base_dir / src
                self._taxonomy = load_taxonomy(path.read_text(encoding="utf-8"))
        return self._taxonomy

    def network(self, seed: int) -> PeerNetwork:
        """Network for one run; fresh per seed unless pinned to a file or seed."""
        tax = self.taxonomy()
        if self.network_path is not None:
            if self._fixed_network is None:
                self._fixed_network = (self.base_dir / self.network_path).read_text(encoding="utf-8")
            return load_network(self._fixed_network, tax)
        if self.generator_seed is not None:
            if self._fixed_network is None:
                self._fixed_network = generate_network(self.generator, tax, self.generator_seed)[1]
            return load_network(self._fixed_network, tax)
        return generate_network(self.generator, tax, seed)[0]

    def qos_weights(self, net: PeerNetwork) -> dict[str, float]:
        """Scenario weights, or an even split over the network's attributes."""
        if self.weights is not None:
            return dict(self.weights)
        return {a: 1.0 / len(net.attributes) for a in net.attributes}

    def query(self, net: PeerNetwork, seed: int) -> DiscoveryQuery:
        domain = self.wanted_domain
        if not domain:
            raise ScenarioError("scenario needs 'query.domain'")
        if domain == RANDOM_REGISTRY:
            # choice depends only on the seed, never on the method being run
            import numpy as np

            ids = net.registry_ids
            domain = net.registries[ids[int(np.random.default_rng(seed).integers(len(ids)))]].domain
        return DiscoveryQuery(domain, self.qos_weights(net), self.requested_level)


def scenario_from_dict(d: dict[str, str], base_dir: Path = Path(".")) -> Scenario:
    sc = Scenario(base_dir=base_dir)
    try:
        sc.taxonomy_source = d.get("taxonomy", "builtin")
        if "network" in d:
            if any(k.startswith("generate.") for k in d):
                raise ScenarioError("give either 'network' or 'generate.*' keys, not both")
            sc.network_path = Path(d["network"])
        else:
            if "generate.registries" not in d:
                raise ScenarioError("scenario needs 'network' or 'generate.registries'")
            smin, smax = parse_range(d.get("generate.services", "3-8"))
            attrs = parse_attributes(d["generate.attributes"]) if "generate.attributes" in d else dict(DEFAULT_ATTRIBUTES)
            sc.generator = GeneratorParams(
                registry_count=_typed("generate.registries", d["generate.registries"], int),
                services_min=smin, services_max=smax, attributes=attrs,
                adjacency=d.get("generate.adjacency", "taxonomy-proximity"),
                k=_typed("generate.k", d.get("generate.k", "4"), int),
                unique_domains=d.get("generate.unique_domains", "true").lower() in ("1", "true", "yes"),
            )
            if "generate.seed" in d:
                sc.generator_seed = parse_seeds(d["generate.seed"])[0]

        sc.wanted_domain = d.get("query.domain", "")
        if "query.weights" in d:
            sc.weights = parse_weights(d["query.weights"])
        sc.requested_level = _typed("query.level", d.get("query.level", "1.0"), float)

        methods = tuple(m.strip() for m in d.get("methods", "bees").split(",") if m.strip())
        bad = [m for m in methods if m not in METHODS]
        if bad or not methods:
            raise ScenarioError(f"methods must be drawn from {METHODS}, got {methods}")
        sc.methods = methods

        bees = {k: _typed(f"bees.{k}", d[f"bees.{k}"], cast) for k, cast in _BEES_KEYS.items() if f"bees.{k}" in d}
        sc.bees = BeesParams(**bees)
        ga = {k: _typed(f"ga.{k}", d[f"ga.{k}"], cast) for k, cast in _GA_KEYS.items() if f"ga.{k}" in d}
        sc.ga = GaParams(**ga)

        sc.seeds = parse_seeds(d.get("seeds", "0"))
        sc.failures = parse_failures(d.get("failures", ""))
        sc.cache_ttl = _typed("cache.ttl", d.get("cache.ttl", str(DEFAULT_TTL)), int)
        if sc.cache_ttl <= 0:
            raise ScenarioError("cache.ttl must be positive")
        if d.get("cache.capacity"):
            sc.cache_capacity = _typed("cache.capacity", d["cache.capacity"], int)
        if "out" in d:
            sc.out = base_dir / d["out"]
    except ScenarioError:
        raise
    except BeehiveError as exc:
        raise ScenarioError(str(exc)) from exc
    return sc


def load_scenario(path) -> Scenario:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return scenario_from_dict(parse_document(text), path.parent if str(path.parent) else Path(os.curdir))
