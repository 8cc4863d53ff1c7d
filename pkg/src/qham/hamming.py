"""Hamming graphs H(D, n) and their full bipartite graphs around the zero word."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Sequence

import numpy as np


class InvalidInstanceError(ValueError):
    """Raised for parameters outside D >= 1, n >= 3 or malformed words."""


def hamming_distance(u: Sequence[int], v: Sequence[int]) -> int:
    if len(u) != len(v):
        raise InvalidInstanceError(f"words of different lengths {len(u)} and {len(v)}")
    return sum(1 for p, q in zip(u, v) if p != q)


@dataclass(frozen=True)
class HammingSpace:
    """Words of length ``D`` over the alphabet {0, ..., n-1}.

    Vertex ``k`` is the word whose base-``n`` digits (most significant first)
    spell ``k``; the base vertex is the all-zero word, index 0.
    """

    D: int
    n: int

    def __post_init__(self):
        if not isinstance(self.D, int) or self.D < 1:
            raise InvalidInstanceError(f"D must be a positive integer, got {self.D!r}")
        if not isinstance(self.n, int) or self.n < 3:
            raise InvalidInstanceError(f"n must be an integer >= 3, got {self.n!r}")

    @property
    def order(self) -> int:
        return self.n ** self.D

    @property
    def base(self) -> int:
        return 0

    def word(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.order:
            raise InvalidInstanceError(f"vertex index {index} out of range")
        digits = []
        for _ in range(self.D):
            index, r = divmod(index, self.n)
            digits.append(r)
        return tuple(reversed(digits))

    def index(self, word: Sequence[int]) -> int:
        if len(word) != self.D or any(not 0 <= s < self.n for s in word):
            raise InvalidInstanceError(f"{word!r} is not a word of H({self.D},{self.n})")
        k = 0
        for s in word:
            k = k * self.n + s
        return k

    @cached_property
    def weights(self) -> np.ndarray:
        """Distance from the base vertex (Hamming weight) of every vertex."""
        w = np.zeros(self.order, dtype=np.int64)
        for k in range(self.order):
            w[k] = sum(1 for s in self.word(k) if s)
        return w

    def class_sizes(self) -> list[int]:
        return [comb(self.D, i) * (self.n - 1) ** i for i in range(self.D + 1)]


def distance_partition(space: HammingSpace) -> list[list[int]]:
    """Vertex classes at distance 0, ..., D from the base vertex."""
    classes: list[list[int]] = [[] for _ in range(space.D + 1)]
    for k, w in enumerate(space.weights):
        classes[int(w)].append(k)
    return classes


@dataclass(frozen=True, eq=False)
class SpaceGraph:
    """Undirected graph on the vertices of a Hamming space."""

    space: HammingSpace
    edges: frozenset
    adjacency: tuple = field(repr=False)

    @property
    def order(self) -> int:
        return self.space.order

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def distances_from(self, source: int) -> np.ndarray:
        dist = np.full(self.order, -1, dtype=np.int64)
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    @cached_property
    def all_distances(self) -> np.ndarray:
        """All-pairs path distances (-1 for unreachable)."""
        return np.stack([self.distances_from(v) for v in range(self.order)])

    def is_connected(self) -> bool:
        return bool((self.distances_from(self.space.base) >= 0).all())

    def is_bipartite(self) -> bool:
        w = self.space.weights
        return all((w[i] - w[j]) % 2 == 1 for i, j in self.edges)

    def edge_list_text(self) -> str:
        return "".join(f"{i} {j}\n" for i, j in sorted(self.edges))


class FullBipartiteGraph(SpaceGraph):
    """H(D, n) with every edge between equidistant vertices (from x) removed."""


def _build(space: HammingSpace, keep_flat: bool) -> tuple[frozenset, tuple]:
    w = space.weights
    nbrs: list[list[int]] = [[] for _ in range(space.order)]
    edges = set()
    for k in range(space.order):
        word = space.word(k)
        for pos in range(space.D):
            for s in range(space.n):
                if s == word[pos]:
                    continue
                other = space.index(word[:pos] + (s,) + word[pos + 1:])
                if not keep_flat and w[other] == w[k]:
                    continue
                nbrs[k].append(other)
                if k < other:
                    edges.add((k, other))
    return frozenset(edges), tuple(tuple(sorted(v)) for v in nbrs)


def hamming_graph(space: HammingSpace) -> SpaceGraph:
    edges, adj = _build(space, keep_flat=True)
    return SpaceGraph(space, edges, adj)


def full_bipartite(space: HammingSpace) -> FullBipartiteGraph:
    edges, adj = _build(space, keep_flat=False)
    return FullBipartiteGraph(space, edges, adj)


@dataclass(frozen=True)
class AroundX:
    """Intersection numbers around the base vertex, or a witness against constancy."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        return self.witness is None


def intersection_numbers_around_x(g: SpaceGraph) -> AroundX:
    """Check that a_i, b_i, c_i around the base vertex do not depend on the vertex."""
    D = g.space.D
    w = g.space.weights
    first: dict[int, tuple[int, tuple[int, int, int]]] = {}
    for y in range(g.order):
        i = int(w[y])
        counts = [0, 0, 0]  # same, next, previous class
        for z in g.adjacency[y]:
            delta = int(w[z]) - i
            counts[{0: 0, 1: 1, -1: 2}[delta]] += 1
        key = tuple(counts)
        if i not in first:
            first[i] = (y, key)
        elif first[i][1] != key:
            y0, k0 = first[i]
            return AroundX((), (), (), witness={
                "class": i, "vertices": [y0, y],
                "counts": {"a": [k0[0], key[0]], "b": [k0[1], key[1]], "c": [k0[2], key[2]]},
            })
    a = tuple(first[i][1][0] for i in range(D + 1))
    b = tuple(first[i][1][1] for i in range(D + 1))
    c = tuple(first[i][1][2] for i in range(D + 1))
    return AroundX(a, b, c)
