"""Exception hierarchy shared by all beehive modules."""


class BeehiveError(Exception):
    """Base class for every error raised by this package."""


# taxonomy

class TaxonomyError(BeehiveError, ValueError):
    pass


class EmptyDocument(TaxonomyError):
    pass


class DuplicateConcept(TaxonomyError):
    pass


class CycleDetected(TaxonomyError):
    pass


class MultipleRoots(TaxonomyError):
    pass


class OrphanConcept(TaxonomyError):
    pass


class MalformedLine(TaxonomyError):
    pass


class UnknownConcept(BeehiveError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# optimizer

class InvalidParams(BeehiveError, ValueError):
    pass


class EmptySpace(BeehiveError, ValueError):
    pass


class OutOfDomain(BeehiveError, ValueError):
    pass


# registry network

class SchemaViolation(BeehiveError, ValueError):
    pass


class UnknownDomainConcept(SchemaViolation):
    pass


class DuplicateServiceId(BeehiveError, ValueError):
    pass


class AsymmetricAdjacency(SchemaViolation):
    pass


class UnknownRegistry(BeehiveError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidGeneratorParams(BeehiveError, ValueError):
    pass


# discovery

class EmptyNetwork(BeehiveError, ValueError):
    pass


class NoServicesInBestRegistry(BeehiveError, LookupError):
    pass


# qos

class MissingAttribute(BeehiveError, ValueError):
    pass


class AttributeSetMismatch(BeehiveError, ValueError):
    pass


class EmptyServiceList(BeehiveError, ValueError):
    pass


# substitution

class SelfSubstitution(BeehiveError, ValueError):
    pass


class UnknownFailedService(BeehiveError, LookupError):
    pass


class NoSubstituteAvailable(BeehiveError, LookupError):
    pass
