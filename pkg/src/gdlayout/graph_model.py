"""Graph structure, generator families, and graph-theoretic distances.

Graphs are simple, undirected, and indexed 0..n-1. Edges are stored
canonically: each as (i, j) with i < j, the whole tuple sorted. All layout
code relies on that ordering for deterministic iteration.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DisconnectedGraph, GraphError


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph.

    ideal_lengths, when present, is aligned with edges (one target length
    per edge) and is consumed by the ideal-edge-length loss in place of the
    mean-edge-length default.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    ideal_lengths: Optional[np.ndarray] = None
    adjacency: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise GraphError(f"graph needs at least one node, got n={self.n}")
        adj = np.zeros((self.n, self.n), dtype=bool)
        seen = set()
        for e in self.edges:
            if len(e) != 2:
                raise GraphError(f"edge {e!r} is not a pair")
            i, j = e
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphError(f"edge {e} out of range for n={self.n}")
            if i == j:
                raise GraphError(f"self-loop at node {i}")
            if i > j:
                raise GraphError(f"edge {e} not in canonical (min, max) order")
            if (i, j) in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add((i, j))
            adj[i, j] = adj[j, i] = True
        if tuple(sorted(self.edges)) != self.edges:
            raise GraphError("edge tuple not sorted")
        if self.ideal_lengths is not None:
            il = np.asarray(self.ideal_lengths, dtype=float)
            if il.shape != (len(self.edges),):
                raise GraphError("ideal_lengths must align with edges")
            if not np.all(il > 0):
                raise GraphError("ideal edge lengths must be positive")
            object.__setattr__(self, "ideal_lengths", il)
        object.__setattr__(self, "adjacency", adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1).astype(int)

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i])

    def edge_array(self) -> np.ndarray:
        """Edges as an (m, 2) int array (empty graphs give shape (0, 2))."""
        if not self.edges:
            return np.zeros((0, 2), dtype=int)
        return np.array(self.edges, dtype=int)


def make_graph(n: int, edges: Iterable[Sequence[int]],
               ideal_lengths: Optional[Sequence[float]] = None) -> Graph:
    """Build a Graph from unordered edge pairs, canonicalizing as needed.

    Accepts edges in any order/orientation; ideal_lengths (if given) must be
    parallel to the *input* edge sequence and is re-aligned here.
    """
    pairs = []
    for e in edges:
        if len(e) != 2:
            raise GraphError(f"edge {e!r} is not a pair")
        i, j = int(e[0]), int(e[1])
        if i == j:
            raise GraphError(f"self-loop at node {i}")
        pairs.append((min(i, j), max(i, j)))
    if ideal_lengths is None:
        order = sorted(range(len(pairs)), key=lambda k: pairs[k])
        return Graph(n=n, edges=tuple(pairs[k] for k in order))
    if len(ideal_lengths) != len(pairs):
        raise GraphError("ideal_lengths must align with edges")
    order = sorted(range(len(pairs)), key=lambda k: pairs[k])
    return Graph(
        n=n,
        edges=tuple(pairs[k] for k in order),
        ideal_lengths=np.array([float(ideal_lengths[k]) for k in order]),
    )


# ---------------------------------------------------------------------------
# generator families
# ---------------------------------------------------------------------------

def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError(f"cycle needs n >= 3, got {n}")
    edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    return make_graph(n, edges)


def path(n: int) -> Graph:
    if n < 1:
        raise GraphError(f"path needs n >= 1, got {n}")
    return make_graph(n, [(i, i + 1) for i in range(n - 1)])


def grid(w: int, h: int) -> Graph:
    """w columns by h rows; node (row r, col c) has index r*w + c."""
    if w < 1 or h < 1:
        raise GraphError(f"grid needs w, h >= 1, got {w}x{h}")
    edges = []
    for r in range(h):
        for c in range(w):
            v = r * w + c
            if c + 1 < w:
                edges.append((v, v + 1))
            if r + 1 < h:
                edges.append((v, v + w))
    return make_graph(w * h, edges)


def balanced_tree(branching: int, depth: int) -> Graph:
    """Rooted tree, every internal node has `branching` children, `depth`
    levels below the root (depth 0 is a single node). BFS numbering."""
    if branching < 1 or depth < 0:
        raise GraphError(f"balanced_tree needs branching >= 1, depth >= 0, "
                         f"got {branching}, {depth}")
    edges = []
    next_id = 1
    frontier = [0]
    for _ in range(depth):
        new_frontier = []
        for parent in frontier:
            for _ in range(branching):
                edges.append((parent, next_id))
                new_frontier.append(next_id)
                next_id += 1
        frontier = new_frontier
    return make_graph(next_id, edges)


def complete(n: int) -> Graph:
    if n < 1:
        raise GraphError(f"complete needs n >= 1, got {n}")
    return make_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise GraphError(f"complete_bipartite needs a, b >= 1, got {a}, {b}")
    return make_graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def cube() -> Graph:
    """3-cube: 8 nodes indexed by bit pattern, edges between Hamming-1 pairs."""
    edges = []
    for v in range(8):
        for bit in (1, 2, 4):
            u = v ^ bit
            if u > v:
                edges.append((v, u))
    return make_graph(8, edges)


def dodecahedron() -> Graph:
    """Dodecahedral graph: outer 10-cycle 0..9, inner nodes 10..19 joined by
    spokes, inner edges skip by 2 (a generalized Petersen construction)."""
    edges = []
    for i in range(10):
        edges.append((i, (i + 1) % 10))        # outer ring
        edges.append((i, 10 + i))              # spoke
        edges.append((10 + i, 10 + (i + 2) % 10))  # inner star
    return make_graph(20, edges)


FAMILIES = {
    "cycle": (cycle, ("n",)),
    "path": (path, ("n",)),
    "grid": (grid, ("w", "h")),
    "balanced_tree": (balanced_tree, ("branching", "depth")),
    "complete": (complete, ("n",)),
    "complete_bipartite": (complete_bipartite, ("a", "b")),
    "cube": (cube, ()),
    "dodecahedron": (dodecahedron, ()),
}


def generate(family: str, **params) -> Graph:
    """Dispatch by family name; unknown names and bad arities raise GraphError."""
    if family not in FAMILIES:
        raise GraphError(f"unknown graph family {family!r}; "
                         f"known: {', '.join(sorted(FAMILIES))}")
    fn, names = FAMILIES[family]
    missing = [p for p in names if p not in params]
    extra = [p for p in params if p not in names]
    if missing or extra:
        raise GraphError(f"family {family!r} takes parameters {names}, "
                         f"missing {missing}, unexpected {extra}")
    return fn(**{p: int(params[p]) for p in names})


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def shortest_paths(g: Graph) -> np.ndarray:
    """All-pairs hop-count distances via BFS from every node, as float (n, n).

    Raises DisconnectedGraph if any pair is unreachable: every loss that
    consumes this matrix assumes finite distances.
    """
    n = g.n
    neigh = [g.neighbors(i) for i in range(n)]
    dist = np.full((n, n), -1.0)
    for s in range(n):
        dist[s, s] = 0.0
        q = deque([s])
        while q:
            u = q.popleft()
            du = dist[s, u]
            for v in neigh[u]:
                if dist[s, v] < 0:
                    dist[s, v] = du + 1.0
                    q.append(v)
    if np.any(dist < 0):
        bad = np.argwhere(dist < 0)
        i, j = bad[0]
        raise DisconnectedGraph(
            f"graph is disconnected: no path between nodes {i} and {j}")
    return dist
