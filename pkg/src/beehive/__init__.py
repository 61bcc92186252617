"""Web service discovery with the Bees Algorithm.

Registries of services are grouped by business domain in a peer network;
a bees search probes registries to find the domain closest to a request
under Wu-Palmer similarity, then picks the service whose QoS score is
nearest to the client's requested level. Failed services are replaced
through a TTL equivalence cache.
"""
from .discovery import (
    BeesDiscovery,
    DiscoveryQuery,
    DiscoveryResult,
    DiscoveryTrace,
    discover_and_select,
    discover_registry,
    exhaustive_discover,
    ga_discover_and_select,
    sweep_and_select,
)
from .exceptions import BeehiveError
from .network import (
    GeneratorParams,
    PeerNetwork,
    Registry,
    ServiceDescriptor,
    classify_service,
    generate_network,
    load_network,
    neighbors_of,
    probe_registry,
)
from .optimize import BeesOptimizer, BeesParams, GaParams, GeneticOptimizer, bees_optimize, ga_optimize
from .qos import QosSelector, nearest_qos_service, normalize_attributes, qos_score
from .substitution import EquivalenceCache, cache_insert, cache_lookup, evict_expired, substitute
from .taxonomy import (
    Taxonomy,
    builtin_taxonomy,
    depth,
    load_taxonomy,
    lowest_common_ancestor,
    wu_palmer_similarity,
)

__version__ = "0.1.0"

__all__ = [
    "BeehiveError",
    "BeesDiscovery",
    "BeesOptimizer",
    "BeesParams",
    "DiscoveryQuery",
    "DiscoveryResult",
    "DiscoveryTrace",
    "EquivalenceCache",
    "GaParams",
    "GeneratorParams",
    "GeneticOptimizer",
    "PeerNetwork",
    "QosSelector",
    "Registry",
    "ServiceDescriptor",
    "Taxonomy",
    "bees_optimize",
    "builtin_taxonomy",
    "cache_insert",
    "cache_lookup",
    "classify_service",
    "depth",
    "discover_and_select",
    "discover_registry",
    "evict_expired",
    "exhaustive_discover",
    "ga_discover_and_select",
    "ga_optimize",
    "generate_network",
    "load_network",
    "load_taxonomy",
    "lowest_common_ancestor",
    "nearest_qos_service",
    "neighbors_of",
    "normalize_attributes",
    "probe_registry",
    "qos_score",
    "substitute",
    "sweep_and_select",
    "wu_palmer_similarity",
]
