"""Search spaces shared by the bees and GA engines.

Both spaces work on batches: positions are rows of a numpy array.
A :class:`BoxSpace` row is a real vector; a :class:`GraphSpace` row is
an integer index into the sorted element list.
"""
from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Mapping

import numpy as np

from ..exceptions import EmptySpace


class BoxSpace:
    """Axis-aligned box ``lower <= x <= upper``."""

    discrete = False

    def __init__(self, lower, upper):
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise EmptySpace("lower and upper must be 1-D arrays of equal length")
        if lower.size == 0:
            raise EmptySpace("box has no dimensions")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise EmptySpace("box bounds must be finite")
        if np.any(lower > upper):
            raise EmptySpace("lower bound exceeds upper bound")
        self.lower = lower
        self.upper = upper

    @classmethod
    def cube(cls, low: float, high: float, dim: int) -> "BoxSpace":
        return cls([low] * dim, [high] * dim)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    def __repr__(self):
        return f"BoxSpace(dim={self.dim})"

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        return self.lower + rng.random((k, self.dim)) * self.span

    def neighborhood(self, centers: np.ndarray, ngh: float, rng: np.random.Generator) -> np.ndarray:
        """Uniform draw in a patch of edge ``ngh*span`` centred on each row.

        The patch is intersected with the box, so samples never leave it.
        """
        half = 0.5 * ngh * self.span
        low = np.maximum(centers - half, self.lower)
        high = np.minimum(centers + half, self.upper)
        return low + rng.random(centers.shape) * (high - low)

    def encode(self, position) -> np.ndarray:
        return np.asarray(position, dtype=float).reshape(self.dim)

    def decode(self, row) -> np.ndarray:
        return np.array(row, dtype=float)

    def decode_batch(self, rows: np.ndarray) -> np.ndarray:
        return rows

    def contains(self, position) -> bool:
        x = np.asarray(position, dtype=float)
        return x.shape == (self.dim,) and bool(np.all(x >= self.lower) and np.all(x <= self.upper))


class GraphSpace:
    """Finite set of elements with an optional symmetric adjacency.

    The neighborhood of radius ``r`` is every element within ``floor(r)``
    hops, the center included.
    """

    discrete = True

    def __init__(self, elements: Iterable[Hashable], adjacency: Mapping | None = None):
        self.elements = sorted(set(elements), key=str)
        if not self.elements:
            raise EmptySpace("graph space has no elements")
        self._index = {el: i for i, el in enumerate(self.elements)}
        adjacency = adjacency or {}
        links: list[set[int]] = [set() for _ in self.elements]
        for a, nbrs in adjacency.items():
            if a not in self._index:
                continue
            for b in nbrs:
                if b in self._index and b != a:
                    links[self._index[a]].add(self._index[b])
                    links[self._index[b]].add(self._index[a])
        self._links = [sorted(s) for s in links]
        self._balls: dict[tuple[int, int], np.ndarray] = {}

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"GraphSpace(size={len(self)})"

    @property
    def dim(self) -> int:
        return 1

    def index(self, element) -> int:
        return self._index[element]

    def ball(self, center: int, radius: int) -> np.ndarray:
        key = (center, radius)
        if key not in self._balls:
            seen = {center}
            queue = deque([(center, 0)])
            while queue:
                node, dist = queue.popleft()
                if dist == radius:
                    continue
                for nb in self._links[node]:
                    if nb not in seen:
                        seen.add(nb)
                        queue.append((nb, dist + 1))
            self._balls[key] = np.array(sorted(seen), dtype=np.int64)
        return self._balls[key]

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        return rng.integers(0, len(self.elements), size=k)

    def neighborhood(self, centers: np.ndarray, ngh: float, rng: np.random.Generator) -> np.ndarray:
        radius = int(np.floor(ngh))
        balls = [self.ball(int(c), radius) for c in centers]
        sizes = np.array([b.size for b in balls], dtype=np.int64)
        picks = rng.integers(0, sizes) if len(balls) else np.empty(0, dtype=np.int64)
        return np.array([b[p] for b, p in zip(balls, picks)], dtype=np.int64)

    def encode(self, position) -> int:
        return self._index[position]

    def decode(self, row):
        return self.elements[int(row)]

    def decode_batch(self, rows: np.ndarray) -> list:
        return [self.elements[int(r)] for r in rows]

    def contains(self, position) -> bool:
        return position in self._index


def neighborhood_sample(center, ngh: float, space, rng: np.random.Generator):
    """Draw one point from the patch of size ``ngh`` around ``center``."""
    c = np.asarray([space.encode(center)])
    return space.decode(space.neighborhood(c, ngh, rng)[0])
