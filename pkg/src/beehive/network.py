"""Service registries (communities) on a peer-to-peer overlay.

Network files are XML::

    <network attributes="availability:higher,response_time_ms:lower">
      <registry id="r000" domain="hotel_booking">
        <service id="s0000" name="..." url="...">
          <qos availability="0.99" response_time_ms="120.0"/>
        </service>
      </registry>
      <edge a="r000" b="r001"/>
    </network>

Edges are undirected; declaring one direction is enough.
"""
from __future__ import annotations

import math
import re
import threading
import xml.etree.ElementTree as ET
from xml.sax.saxutils import quoteattr
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from ._validation import make_rng
from .exceptions import (
    AsymmetricAdjacency,
    DuplicateServiceId,
    InvalidGeneratorParams,
    SchemaViolation,
    UnknownConcept,
    UnknownDomainConcept,
    UnknownRegistry,
)
from .taxonomy import Taxonomy, normalize_concept

HIGHER = "higher"
LOWER = "lower"

DEFAULT_ATTRIBUTES = {
    "availability": HIGHER,
    "throughput": HIGHER,
    "response_time_ms": LOWER,
    "cost": LOWER,
}

DEFAULT_TAU = 0.5

_ATTR_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.-]*$")


@dataclass(frozen=True)
class ServiceDescriptor:
    id: str
    name: str
    url: str
    qos: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "qos", MappingProxyType(dict(self.qos)))

    def __eq__(self, other):
        if not isinstance(other, ServiceDescriptor):
            return NotImplemented
        return (self.id, self.name, self.url, dict(self.qos)) == (
            other.id, other.name, other.url, dict(other.qos)
        )

    def __hash__(self):
        return hash(self.id)


@dataclass
class Registry:
    id: str
    domain: str
    services: list[ServiceDescriptor] = field(default_factory=list)


@dataclass(frozen=True)
class RegistryDescription:
    """What a probe reveals about a registry."""

    id: str
    domain: str
    services: tuple[ServiceDescriptor, ...]


def parse_attributes(text: str) -> dict[str, str]:
    """Parse ``"a1:higher,a2:lower"`` into an ordered direction map."""
    out: dict[str, str] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, direction = part.partition(":")
        name, direction = name.strip(), direction.strip().lower()
        if not sep or direction not in (HIGHER, LOWER) or not name:
            raise SchemaViolation(f"attribute {part!r} needs a ':higher' or ':lower' suffix")
        if not _ATTR_NAME.match(name):
            raise SchemaViolation(f"attribute name {name!r} is not a valid XML name")
        if name in out:
            raise SchemaViolation(f"attribute {name!r} declared twice")
        out[name] = direction
    if not out:
        raise SchemaViolation("network declares no QoS attributes")
    return out


def format_attributes(attributes: Mapping[str, str]) -> str:
    return ",".join(f"{k}:{v}" for k, v in attributes.items())


class PeerNetwork:
    """Registries, their peer adjacency and a probe counter.

    Reads are safe from several threads; the probe counter is guarded by
    a lock so the final count is exact. Mutating calls such as
    :meth:`add_service` need exclusive access.
    """

    def __init__(self, attributes: Mapping[str, str], registries: Iterable[Registry] = (),
                 edges: Iterable[tuple[str, str]] = ()):
        self.attributes = dict(attributes)
        self.registries: dict[str, Registry] = {}
        self.adjacency: dict[str, set[str]] = {}
        self._service_home: dict[str, str] = {}
        self._lock = threading.Lock()
        self.probe_counter = 0
        for reg in registries:
            self.add_registry(reg)
        for a, b in edges:
            self.add_edge(a, b)

    def __len__(self):
        return len(self.registries)

    def __repr__(self):
        return f"PeerNetwork(registries={len(self)}, services={self.service_count})"

    def __eq__(self, other):
        if not isinstance(other, PeerNetwork):
            return NotImplemented
        return (
            self.attributes == other.attributes
            and self.registries == other.registries
            and self.adjacency == other.adjacency
        )

    @property
    def registry_ids(self) -> list[str]:
        return sorted(self.registries)

    @property
    def service_count(self) -> int:
        return len(self._service_home)

    def add_registry(self, reg: Registry):
        if reg.id in self.registries:
            raise SchemaViolation(f"duplicate registry id {reg.id!r}")
        for svc in reg.services:
            if svc.id in self._service_home:
                raise DuplicateServiceId(f"service id {svc.id!r} appears more than once")
            unknown = set(svc.qos) - set(self.attributes)
            if unknown:
                raise SchemaViolation(f"service {svc.id!r} uses undeclared attributes {sorted(unknown)}")
        self.registries[reg.id] = reg
        self.adjacency.setdefault(reg.id, set())
        for svc in reg.services:
            self._service_home[svc.id] = reg.id

    def add_edge(self, a: str, b: str):
        if a == b:
            raise AsymmetricAdjacency(f"self-loop on registry {a!r}")
        for end in (a, b):
            if end not in self.registries:
                raise AsymmetricAdjacency(f"edge endpoint {end!r} is not a registry")
        self.adjacency[a].add(b)
        self.adjacency[b].add(a)

    def add_service(self, rid: str, svc: ServiceDescriptor):
        if svc.id in self._service_home:
            raise DuplicateServiceId(f"service id {svc.id!r} already registered")
        self._registry(rid).services.append(svc)
        self._service_home[svc.id] = rid

    def edges(self) -> list[tuple[str, str]]:
        return sorted((a, b) for a, nbrs in self.adjacency.items() for b in nbrs if a < b)

    def _registry(self, rid: str) -> Registry:
        try:
            return self.registries[rid]
        except KeyError:
            raise UnknownRegistry(f"unknown registry {rid!r}") from None

    def probe(self, rid: str) -> RegistryDescription:
        """Fetch a registry description; every call counts as one probe."""
        reg = self._registry(rid)
        with self._lock:
            self.probe_counter += 1
        return RegistryDescription(reg.id, reg.domain, tuple(reg.services))

    def neighbors(self, rid: str) -> frozenset[str]:
        self._registry(rid)
        return frozenset(self.adjacency[rid])

    def registry_of(self, service_id: str) -> str | None:
        """Home registry of a service, without probing."""
        return self._service_home.get(service_id)

    def find_service(self, service_id: str) -> ServiceDescriptor | None:
        rid = self._service_home.get(service_id)
        if rid is None:
            return None
        for svc in self.registries[rid].services:
            if svc.id == service_id:
                return svc
        return None

    def reset_probes(self) -> int:
        with self._lock:
            count, self.probe_counter = self.probe_counter, 0
        return count

    def to_xml(self) -> str:
        q = quoteattr
        lines = [f"<network attributes={q(format_attributes(self.attributes))}>"]
        for rid in self.registry_ids:
            reg = self.registries[rid]
            if not reg.services:
                lines.append(f"  <registry id={q(reg.id)} domain={q(reg.domain)} />")
                continue
            lines.append(f"  <registry id={q(reg.id)} domain={q(reg.domain)}>")
            for svc in reg.services:
                qos = " ".join(f'{k}="{float(v)!r}"' for k, v in svc.qos.items())
                lines.append(f"    <service id={q(svc.id)} name={q(svc.name)} url={q(svc.url)}>")
                lines.append(f"      <qos {qos} />")
                lines.append("    </service>")
            lines.append("  </registry>")
        lines.extend(f"  <edge a={q(a)} b={q(b)} />" for a, b in self.edges())
        lines.append("</network>")
        return "\n".join(lines) + "\n"


def _require(el: ET.Element, name: str) -> str:
    value = el.get(name)
    if value is None or not value.strip():
        raise SchemaViolation(f"<{el.tag}> is missing attribute {name!r}")
    return value.strip()


def load_network(document: str, taxonomy: Taxonomy) -> PeerNetwork:
    """Parse and validate a network file against ``taxonomy``."""
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise SchemaViolation(f"not well-formed XML: {exc}") from None
    if root.tag != "network":
        raise SchemaViolation(f"root element must be <network>, got <{root.tag}>")
    net = PeerNetwork(parse_attributes(_require(root, "attributes")))

    edges = []
    for child in root:
        if child.tag == "edge":
            edges.append((_require(child, "a"), _require(child, "b")))
            continue
        if child.tag != "registry":
            raise SchemaViolation(f"unexpected element <{child.tag}> in <network>")
        rid = _require(child, "id")
        domain = normalize_concept(_require(child, "domain"))
        if domain not in taxonomy:
            raise UnknownDomainConcept(f"registry {rid!r} has domain {domain!r} not in the taxonomy")
        services = []
        for s_el in child:
            if s_el.tag != "service":
                raise SchemaViolation(f"unexpected element <{s_el.tag}> in <registry>")
            qos_els = [q for q in s_el if q.tag == "qos"]
            if len(qos_els) != 1 or len(s_el) != 1:
                raise SchemaViolation(f"service {s_el.get('id')!r} needs exactly one <qos> child")
            qos = {}
            for k, v in qos_els[0].attrib.items():
                try:
                    qos[k] = float(v)
                except ValueError:
                    raise SchemaViolation(f"QoS value {k}={v!r} is not a number") from None
                if not math.isfinite(qos[k]):
                    raise SchemaViolation(f"QoS value {k}={v!r} is not finite")
            services.append(ServiceDescriptor(
                _require(s_el, "id"), s_el.get("name", ""), s_el.get("url", ""), qos
            ))
        net.add_registry(Registry(rid, domain, services))
    for a, b in edges:
        net.add_edge(a, b)
    return net


def classify_service(net: PeerNetwork, taxonomy: Taxonomy, svc: ServiceDescriptor,
                     svc_domain: str, tau: float = DEFAULT_TAU) -> str:
    """Add ``svc`` to the most similar registry, or open a new one.

    The best registry must reach similarity ``tau``; ties go to the
    smallest registry id. A new registry gets the next free ``rNNN`` id
    and no peers.
    """
    if net.registry_of(svc.id) is not None:
        raise DuplicateServiceId(f"service id {svc.id!r} already registered")
    domain = normalize_concept(svc_domain)
    if domain not in taxonomy:
        raise UnknownConcept(f"unknown concept {svc_domain!r}")
    best_id, best_sim = None, -1.0
    for rid in net.registry_ids:
        sim = taxonomy.similarity(domain, net.registries[rid].domain)
        if sim > best_sim:
            best_id, best_sim = rid, sim
    if best_id is not None and best_sim >= tau:
        net.add_service(best_id, svc)
        return best_id
    new_id = _next_registry_id(net)
    net.add_registry(Registry(new_id, domain, [svc]))
    return new_id


def _next_registry_id(net: PeerNetwork) -> str:
    i = len(net.registries)
    while f"r{i:03d}" in net.registries:
        i += 1
    return f"r{i:03d}"


# -- synthetic test beds -----------------------------------------------------

_QOS_RANGES = {
    "availability": (0.90, 0.9999, 4),
    "throughput": (10.0, 500.0, 1),
    "response_time_ms": (20.0, 1500.0, 1),
    "cost": (0.0, 5.0, 3),
    "reliability": (0.80, 0.999, 3),
    "latency_ms": (5.0, 300.0, 1),
}


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs for :func:`generate_network`.

    ``adjacency`` is ``"taxonomy-proximity"`` (each registry links to its
    ``k`` most similar peers, then links are made symmetric) or ``"none"``.
    """

    registry_count: int = 10
    services_min: int = 3
    services_max: int = 8
    attributes: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_ATTRIBUTES))
    adjacency: str = "taxonomy-proximity"
    k: int = 4
    unique_domains: bool = True

    def validate(self, taxonomy: Taxonomy):
        if not isinstance(self.registry_count, int) or self.registry_count < 1:
            raise InvalidGeneratorParams(f"registry_count must be >= 1, got {self.registry_count!r}")
        if not 0 <= self.services_min <= self.services_max:
            raise InvalidGeneratorParams("need 0 <= services_min <= services_max")
        if self.adjacency not in ("taxonomy-proximity", "none"):
            raise InvalidGeneratorParams(f"unknown adjacency model {self.adjacency!r}")
        if self.adjacency == "taxonomy-proximity" and self.k < 0:
            raise InvalidGeneratorParams("k must be >= 0")
        if not self.attributes:
            raise InvalidGeneratorParams("at least one QoS attribute is required")
        for name, direction in self.attributes.items():
            if direction not in (HIGHER, LOWER):
                raise InvalidGeneratorParams(f"attribute {name!r} has direction {direction!r}")
        leaves = taxonomy.leaves()
        if self.unique_domains and len(leaves) < self.registry_count:
            raise InvalidGeneratorParams(
                f"taxonomy has {len(leaves)} leaves, fewer than {self.registry_count} registries"
            )


def _qos_value(name: str, rng: np.random.Generator) -> float:
    low, high, digits = _QOS_RANGES.get(name, (0.0, 1.0, 4))
    return round(float(low + (high - low) * rng.random()), digits)


def generate_network(params: GeneratorParams, taxonomy: Taxonomy, seed: int) -> tuple[PeerNetwork, str]:
    """Synthesize a network and its file text, deterministically per seed."""
    params.validate(taxonomy)
    rng = make_rng(seed)
    leaves = taxonomy.leaves()
    count = params.registry_count
    picks = rng.choice(len(leaves), size=count, replace=not params.unique_domains)
    domains = [leaves[i] for i in picks]
    width = max(3, len(str(count - 1)))

    registries = []
    serial = 0
    for i, domain in enumerate(domains):
        rid = f"r{i:0{width}d}"
        n_svc = int(rng.integers(params.services_min, params.services_max + 1))
        services = []
        for _ in range(n_svc):
            sid = f"s{serial:05d}"
            serial += 1
            qos = {name: _qos_value(name, rng) for name in params.attributes}
            services.append(ServiceDescriptor(sid, f"{domain}-{sid}", f"http://{rid}.example.net/{sid}", qos))
        registries.append(Registry(rid, domain, services))

    edges = []
    if params.adjacency == "taxonomy-proximity" and params.k > 0 and count > 1:
        sim = taxonomy.similarity_matrix(domains)
        np.fill_diagonal(sim, -np.inf)
        # registries are in id order, so a stable sort breaks ties by id
        order = np.argsort(-sim, axis=1, kind="stable")[:, : min(params.k, count - 1)]
        for i, row in enumerate(order):
            edges.extend((registries[i].id, registries[j].id) for j in row)

    net = PeerNetwork(params.attributes, registries, edges)
    return net, net.to_xml()


def load_network_file(path, taxonomy: Taxonomy) -> PeerNetwork:
    with open(path, encoding="utf-8") as fh:
        return load_network(fh.read(), taxonomy)


# functional aliases

def probe_registry(net: PeerNetwork, rid: str) -> RegistryDescription:
    return net.probe(rid)


def neighbors_of(net: PeerNetwork, rid: str) -> frozenset[str]:
    return net.neighbors(rid)
