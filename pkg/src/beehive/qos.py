"""QoS normalization, weighted scoring and nearest-level selection."""
from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import (
    AttributeSetMismatch,
    EmptyServiceList,
    InvalidParams,
    MissingAttribute,
)
from .network import HIGHER, LOWER, ServiceDescriptor

WEIGHT_SUM_TOL = 1e-9


class InvalidWeights(InvalidParams):
    pass


def check_weights(weights: Mapping[str, float], attributes: Sequence[str] | None = None) -> dict[str, float]:
    """Validate QoS weights: each in [0, 1], summing to 1 within 1e-9.

    With ``attributes`` given, the weight keys must match it exactly.
    """
    w = {str(k): float(v) for k, v in weights.items()}
    if attributes is not None and set(w) != set(attributes):
        raise AttributeSetMismatch(
            f"weights cover {sorted(w)}, network declares {sorted(attributes)}"
        )
    for k, v in w.items():
        if not 0.0 <= v <= 1.0:
            raise InvalidWeights(f"weight for {k!r} must lie in [0, 1], got {v}")
    total = math.fsum(w.values())
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise InvalidWeights(f"weights must sum to 1, got {total!r}")
    return w


def check_level(level) -> float:
    level = float(level)
    if not 0.0 <= level <= 1.0:
        raise InvalidParams(f"requested level must lie in [0, 1], got {level}")
    return level


def _raw_matrix(services: Sequence[ServiceDescriptor], attrs: Sequence[str]) -> np.ndarray:
    rows = []
    for svc in services:
        try:
            rows.append([float(svc.qos[a]) for a in attrs])
        except KeyError as exc:
            raise MissingAttribute(f"service {svc.id!r} lacks attribute {exc.args[0]!r}") from None
    return np.array(rows, dtype=float).reshape(len(services), len(attrs))


def _minmax(raw, low, high, directions):
    """Min-max scale columns; a constant column maps to 1.0."""
    spread = high - low
    flat = spread == 0
    safe = np.where(flat, 1.0, spread)
    up = (raw - low) / safe
    down = (high - raw) / safe
    out = np.where(np.array([d == HIGHER for d in directions]), up, down)
    out = np.where(flat, 1.0, out)
    return np.clip(out, 0.0, 1.0)


def normalize_attributes(services: Sequence[ServiceDescriptor],
                         directions: Mapping[str, str]) -> list[dict[str, float]]:
    """Min-max normalize every declared attribute over ``services``.

    Higher-is-better maps to ``(v - min) / (max - min)``, lower-is-better
    to ``(max - v) / (max - min)``. Constant attributes score 1.0.
    """
    if not services:
        raise EmptyServiceList("cannot normalize an empty service list")
    attrs = list(directions)
    for a, d in directions.items():
        if d not in (HIGHER, LOWER):
            raise InvalidParams(f"attribute {a!r} has unknown direction {d!r}")
    raw = _raw_matrix(services, attrs)
    norm = _minmax(raw, raw.min(axis=0), raw.max(axis=0), [directions[a] for a in attrs])
    return [dict(zip(attrs, map(float, row))) for row in norm]


def qos_score(normalized: Mapping[str, float], weights: Mapping[str, float]) -> float:
    """Weighted sum of normalized attributes, clipped into [0, 1]."""
    if set(normalized) != set(weights):
        raise AttributeSetMismatch(
            f"normalized attributes {sorted(normalized)} differ from weights {sorted(weights)}"
        )
    total = math.fsum(weights[a] * normalized[a] for a in sorted(weights))
    return min(1.0, max(0.0, total))


def score_services(services, directions, weights) -> list[float]:
    return [qos_score(n, weights) for n in normalize_attributes(services, directions)]


def nearest_qos_service(services: Sequence[ServiceDescriptor], directions: Mapping[str, str],
                        weights: Mapping[str, float], requested_level: float) -> ServiceDescriptor:
    """Service whose QoS score is closest to ``requested_level``.

    Ties go to the higher score, then to the smallest service id.
    """
    if not services:
        raise EmptyServiceList("no services to select from")
    level = check_level(requested_level)
    weights = check_weights(weights, list(directions))
    scores = score_services(services, directions, weights)
    pick = min(range(len(services)),
               key=lambda i: (abs(scores[i] - level), -scores[i], services[i].id))
    return services[pick]


class QosSelector(TransformerMixin, BaseEstimator):
    """Learn min-max bounds from a service list, then score or select.

    ``transform`` maps services to QoS scores using the fitted bounds;
    ``predict`` returns the service nearest to ``requested_level`` among
    the services it is given.
    """

    def __init__(self, weights=None, requested_level=1.0):
        self.weights = weights
        self.requested_level = requested_level

    def fit(self, services, directions):
        if not services:
            raise EmptyServiceList("cannot fit on an empty service list")
        self.attributes_ = list(directions)
        self.directions_ = dict(directions)
        self.weights_ = check_weights(self.weights, self.attributes_)
        raw = _raw_matrix(services, self.attributes_)
        self.data_min_ = raw.min(axis=0)
        self.data_max_ = raw.max(axis=0)
        return self

    def transform(self, services):
        check_is_fitted(self, "data_min_")
        raw = _raw_matrix(services, self.attributes_)
        norm = _minmax(raw, self.data_min_, self.data_max_,
                       [self.directions_[a] for a in self.attributes_])
        w = np.array([self.weights_[a] for a in self.attributes_])
        return np.clip(norm @ w, 0.0, 1.0)

    def fit_transform(self, services, directions=None, **fit_params):
        return self.fit(services, directions).transform(services)

    def predict(self, services):
        """Nearest-level service among ``services``, normalized over them."""
        check_is_fitted(self, "directions_")
        return nearest_qos_service(services, self.directions_, self.weights_, self.requested_level)
