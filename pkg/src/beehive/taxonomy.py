"""Rooted concept taxonomy and Wu-Palmer similarity.

Taxonomy files are plain text, one ``child<TAB>parent`` edge per line.
The root concept only ever appears on the parent side. Lines starting
with ``#`` and blank lines are ignored. Concept ids are case-folded.
"""
from __future__ import annotations

from functools import lru_cache
from importlib import resources
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .exceptions import (
    CycleDetected,
    DuplicateConcept,
    EmptyDocument,
    MalformedLine,
    MultipleRoots,
    OrphanConcept,
    UnknownConcept,
)

__all__ = [
    "Taxonomy",
    "normalize_concept",
    "load_taxonomy",
    "builtin_taxonomy",
    "balanced_taxonomy",
    "depth",
    "lowest_common_ancestor",
    "wu_palmer_similarity",
]


def normalize_concept(token: str) -> str:
    """Case-fold a concept token and join inner whitespace with ``_``."""
    return "_".join(str(token).split()).lower()


class Taxonomy:
    """Immutable single-parent concept tree.

    Depths are precomputed at construction, ``depth(root) == 1``.
    Build instances with :func:`load_taxonomy` or :meth:`from_edges`;
    the constructor assumes ``parent_of`` is already a valid tree.
    """

    __slots__ = ("_root", "_parent_of", "_depth", "_children")

    def __init__(self, root: str, parent_of: Mapping[str, str]):
        self._root = root
        self._parent_of = MappingProxyType(dict(parent_of))
        depths = {root: 1}
        children: dict[str, list[str]] = {root: []}
        for c in parent_of:
            children.setdefault(c, [])
        for c, p in parent_of.items():
            children.setdefault(p, []).append(c)
        # breadth-first from the root keeps depth assignment linear
        frontier = [root]
        while frontier:
            nxt = []
            for node in frontier:
                for ch in children[node]:
                    depths[ch] = depths[node] + 1
                    nxt.append(ch)
            frontier = nxt
        self._depth = MappingProxyType(depths)
        self._children = MappingProxyType(
            {k: tuple(sorted(v)) for k, v in children.items()}
        )

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]]) -> "Taxonomy":
        lines = "\n".join(f"{c}\t{p}" for c, p in edges)
        return load_taxonomy(lines)

    @property
    def root(self) -> str:
        return self._root

    @property
    def parent_of(self) -> Mapping[str, str]:
        return self._parent_of

    @property
    def concepts(self) -> list[str]:
        return sorted(self._depth)

    def __contains__(self, concept) -> bool:
        return normalize_concept(concept) in self._depth

    def __len__(self) -> int:
        return len(self._depth)

    def __eq__(self, other):
        if not isinstance(other, Taxonomy):
            return NotImplemented
        return self._root == other._root and dict(self._parent_of) == dict(other._parent_of)

    def __hash__(self):
        return hash((self._root, frozenset(self._parent_of.items())))

    def __repr__(self):
        return f"Taxonomy(root={self._root!r}, concepts={len(self)})"

    def children(self, concept: str) -> tuple[str, ...]:
        return self._children[self._check(concept)]

    def leaves(self) -> list[str]:
        return sorted(c for c, ch in self._children.items() if not ch)

    def _check(self, concept: str) -> str:
        if concept in self._depth:
            return concept
        c = normalize_concept(concept)
        if c not in self._depth:
            raise UnknownConcept(f"unknown concept {concept!r}")
        return c

    def ancestors(self, concept: str) -> list[str]:
        """Path from ``concept`` up to the root, both inclusive."""
        c = self._check(concept)
        path = [c]
        while c != self._root:
            c = self._parent_of[c]
            path.append(c)
        return path

    def depth(self, concept: str) -> int:
        return self._depth[self._check(concept)]

    def lowest_common_ancestor(self, a: str, b: str) -> str:
        a, b = self._check(a), self._check(b)
        da, db = self._depth[a], self._depth[b]
        # lift the deeper node, then climb in lockstep
        while da > db:
            a = self._parent_of[a]
            da -= 1
        while db > da:
            b = self._parent_of[b]
            db -= 1
        while a != b:
            a = self._parent_of[a]
            b = self._parent_of[b]
        return a

    def similarity(self, a: str, b: str) -> float:
        """Wu-Palmer similarity ``2*depth(lca) / (depth(a) + depth(b))``."""
        a, b = self._check(a), self._check(b)
        lca = self.lowest_common_ancestor(a, b)
        return 2.0 * self._depth[lca] / (self._depth[a] + self._depth[b])

    def similarity_matrix(self, concepts: list[str]) -> np.ndarray:
        """Pairwise Wu-Palmer similarities, bit-identical to :meth:`similarity`."""
        paths = [self.ancestors(c)[::-1] for c in concepts]
        ids = {c: i for i, c in enumerate(self._depth)}
        width = max(len(p) for p in paths)
        enc = np.full((len(paths), width), -1)
        for i, path in enumerate(paths):
            enc[i, : len(path)] = [ids[c] for c in path]
        d = np.array([len(p) for p in paths])
        common = np.cumprod(enc[:, None, :] == enc[None, :, :], axis=2).sum(axis=2)
        # padding matches padding, so cap at the shorter path
        common = np.minimum(common, np.minimum.outer(d, d))
        return 2.0 * common / (d[:, None] + d[None, :]).astype(float)

    def to_text(self) -> str:
        """Serialize as an edge list, parents before children."""
        out = []
        frontier = [self._root]
        while frontier:
            nxt = []
            for node in frontier:
                for ch in self._children[node]:
                    out.append(f"{ch}\t{node}\n")
                    nxt.append(ch)
            frontier = nxt
        return "".join(out)


def load_taxonomy(document: str) -> Taxonomy:
    """Parse and validate a taxonomy edge list.

    Raises
    ------
    EmptyDocument
        No edges after stripping comments and blanks.
    DuplicateConcept
        A child is given a parent twice.
    OrphanConcept
        A line names a concept without a parent.
    MultipleRoots
        More than one concept lacks a parent.
    CycleDetected
        Parent links loop instead of reaching the root.
    """
    parent_of: dict[str, str] = {}
    orphans: list[str] = []
    for lineno, raw in enumerate(document.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        parts = [normalize_concept(p) for p in parts if p.strip()]
        if len(parts) == 1:
            orphans.append(parts[0])
            continue
        if len(parts) != 2:
            raise MalformedLine(f"line {lineno}: expected 'child<TAB>parent', got {raw!r}")
        child, parent = parts
        if child == parent:
            raise CycleDetected(f"line {lineno}: {child!r} is its own parent")
        if child in parent_of:
            raise DuplicateConcept(
                f"line {lineno}: {child!r} already has parent {parent_of[child]!r}"
            )
        parent_of[child] = parent

    if orphans:
        parents = set(parent_of.values())
        unparented = [o for o in orphans if o not in parent_of and o not in parents]
        if unparented:
            raise OrphanConcept(f"concept {unparented[0]!r} has no parent and is not the root")
    if not parent_of:
        raise EmptyDocument("taxonomy document contains no edges")

    roots = sorted({p for p in parent_of.values() if p not in parent_of})
    if len(roots) > 1:
        raise MultipleRoots(f"found {len(roots)} roots: {', '.join(roots[:5])}")
    if not roots:
        raise CycleDetected("every concept has a parent; parent links must loop")
    root = roots[0]

    reaches_root = {root}
    for start in parent_of:
        path = []
        seen = set()
        node = start
        while node not in reaches_root:
            if node in seen:
                raise CycleDetected(f"cycle through {node!r}")
            seen.add(node)
            path.append(node)
            node = parent_of[node]
        reaches_root.update(path)

    return Taxonomy(root, parent_of)


def builtin_taxonomy() -> Taxonomy:
    """The bundled business-domain taxonomy."""
    text = resources.files("beehive.data").joinpath("business_domains.tsv").read_text("utf-8")
    return load_taxonomy(text)


@lru_cache(maxsize=16)
def balanced_taxonomy(branching: int, levels: int, root: str = "thing") -> Taxonomy:
    """Complete tree with ``branching**levels`` leaves below ``root``.

    Concept names encode their path, e.g. ``c0_2_1`` is the second child
    of ``c0_2``.
    """
    if branching < 1 or levels < 1:
        raise ValueError("branching and levels must be >= 1")
    parent_of = {}
    frontier = [(root, "c")]
    for level in range(levels):
        nxt = []
        for node, prefix in frontier:
            for i in range(branching):
                name = f"{prefix}{i}" if level == 0 else f"{prefix}_{i}"
                parent_of[name] = node
                nxt.append((name, name))
        frontier = nxt
    return Taxonomy(root, parent_of)


def depth(t: Taxonomy, c: str) -> int:
    return t.depth(c)


def lowest_common_ancestor(t: Taxonomy, a: str, b: str) -> str:
    return t.lowest_common_ancestor(a, b)


def wu_palmer_similarity(t: Taxonomy, a: str, b: str) -> float:
    return t.similarity(a, b)
