"""Rooted concept hierarchy and Wu-Palmer similarity between concepts.

The hierarchy is read from an edge list with one ``parent,child`` pair per
line.  Node names are matched case-insensitively; the root sits at depth 1.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

import numpy as np

__all__ = ["TaxonomyError", "UnknownConceptError", "Taxonomy", "load_taxonomy", "read_taxonomy"]


class TaxonomyError(ValueError):
    pass


class UnknownConceptError(TaxonomyError, KeyError):
    def __init__(self, name: str):
        super().__init__(f"concept {name!r} is not in the taxonomy")
        self.name = name

    def __str__(self) -> str:
        return self.args[0]


def _key(name: str) -> str:
    return " ".join(name.split()).casefold()


class Taxonomy:
    """Immutable tree of concepts.

    Args:
        edges: ``(parent, child)`` pairs. Exactly one node may never appear
            as a child; it becomes the root.

    Raises:
        TaxonomyError: if there is no root, more than one root, a cycle, or
            a child listed under two different parents.
    """

    def __init__(self, edges: Iterable[tuple[str, str]]):
        parent: dict[str, str] = {}
        names: dict[str, str] = {}
        for p, c in edges:
            pk, ck = _key(p), _key(c)
            if not pk or not ck:
                raise TaxonomyError(f"empty concept name in edge ({p!r}, {c!r})")
            names.setdefault(pk, p.strip())
            names.setdefault(ck, c.strip())
            if ck in parent and parent[ck] != pk:
                raise TaxonomyError(
                    f"concept {c!r} has conflicting parents {names[parent[ck]]!r} and {p!r}"
                )
            parent[ck] = pk
        if not names:
            raise TaxonomyError("no root found: taxonomy is empty")
        roots = sorted(k for k in names if k not in parent)
        if not roots:
            raise TaxonomyError("cycle detected: every concept has a parent, no root found")
        if len(roots) > 1:
            raise TaxonomyError("multiple roots: " + ", ".join(names[r] for r in roots))

        children: dict[str, list[str]] = {k: [] for k in names}
        for ck, pk in parent.items():
            children[pk].append(ck)
        depth = {roots[0]: 1}
        stack = [roots[0]]
        while stack:
            node = stack.pop()
            for ck in children[node]:
                depth[ck] = depth[node] + 1
                stack.append(ck)
        if len(depth) != len(names):
            stuck = sorted(names[k] for k in names if k not in depth)
            raise TaxonomyError("cycle detected among: " + ", ".join(stuck))

        self._parent = parent
        self._names = names
        self._depth = depth
        self._children = {k: tuple(sorted(v)) for k, v in children.items()}
        self.root = names[roots[0]]
        # Stable node order used for vectorised lookups.
        self._order = tuple(sorted(names))
        self._index = {k: i for i, k in enumerate(self._order)}
        self._wup_cache: dict[tuple[str, str], float] = {}

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: str) -> bool:
        return _key(name) in self._names

    def __iter__(self):
        return (self._names[k] for k in self._order)

    def _resolve(self, name: str) -> str:
        key = _key(name)
        if key not in self._names:
            raise UnknownConceptError(name)
        return key

    def name(self, concept: str) -> str:
        """Canonical spelling of ``concept`` as written in the edge list."""
        return self._names[self._resolve(concept)]

    def depth(self, concept: str) -> int:
        return self._depth[self._resolve(concept)]

    def parent(self, concept: str) -> str | None:
        pk = self._parent.get(self._resolve(concept))
        return None if pk is None else self._names[pk]

    def leaves(self) -> list[str]:
        return [self._names[k] for k in self._order if not self._children[k]]

    def ancestors(self, concept: str) -> list[str]:
        """Path from ``concept`` up to the root, both ends included."""
        return [self._names[k] for k in self._path(self._resolve(concept))]

    def _path(self, key: str) -> list[str]:
        path = [key]
        while key in self._parent:
            key = self._parent[key]
            path.append(key)
        return path

    def lcs(self, a: str, b: str) -> str:
        """Least common subsumer: the deepest node above-or-equal to both."""
        ka, kb = self._resolve(a), self._resolve(b)
        above_a = set(self._path(ka))
        for node in self._path(kb):
            if node in above_a:
                return self._names[node]
        raise AssertionError("tree has a single root")  # pragma: no cover

    def wu_palmer(self, a: str, b: str) -> float:
        """2 * depth(lcs) / (depth(a) + depth(b))."""
        return self._wup(self._resolve(a), self._resolve(b))

    def _wup(self, ka: str, kb: str) -> float:
        pair = (ka, kb) if ka <= kb else (kb, ka)
        sim = self._wup_cache.get(pair)
        if sim is None:
            common = self._depth[_key(self.lcs(ka, kb))]
            sim = self._wup_cache[pair] = 2 * common / (self._depth[ka] + self._depth[kb])
        return sim

    def interest_distance(self, wanted: Iterable[str], offered: Iterable[str]) -> float:
        """One minus the best Wu-Palmer similarity over all (wanted, offered) pairs."""
        wanted = [self._resolve(c) for c in wanted]
        offered = [self._resolve(c) for c in offered]
        if not wanted or not offered:
            raise TaxonomyError("interest sets must be non-empty")
        return 1 - max(self._wup(p, q) for p in wanted for q in offered)

    def index(self, concept: str) -> int:
        return self._index[self._resolve(concept)]

    def similarity_table(self) -> np.ndarray:
        """Wu-Palmer similarity for every node pair, in :meth:`index` order."""
        n = len(self._order)
        table = np.empty((n, n))
        for i, a in enumerate(self._order):
            for j, b in enumerate(self._order):
                table[i, j] = self._wup(a, b)
        return table


def load_taxonomy(source: str) -> Taxonomy:
    """Build a :class:`Taxonomy` from ``parent,child`` lines (``#`` starts a comment)."""
    edges = []
    for lineno, raw in enumerate(source.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not all(parts):
            raise TaxonomyError(f"line {lineno}: expected 'parent,child', got {raw!r}")
        edges.append((parts[0], parts[1]))
    return Taxonomy(edges)


def read_taxonomy(path: str | Path) -> Taxonomy:
    return load_taxonomy(Path(path).read_text(encoding="utf-8"))
