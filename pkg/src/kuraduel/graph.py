"""Blue and Red networks, the cross-network between them, and Laplacians.

All graphs are dense 0/1 matrices with 0-based node indices local to their
population. Instances are immutable (their arrays are flagged read-only), so
they can be shared freely between threads and worker processes.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConnectivityError,
    DegeneratePartitionError,
    DimensionError,
    EdgeListParseError,
    GraphSizeError,
)

MAX_NODES = 20_000


def _frozen(a, dtype=np.int8):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph stored as a symmetric 0/1 adjacency matrix."""

    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.shape != (self.n, self.n):
            raise DimensionError(f"adjacency shape {a.shape} does not match n={self.n}")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        if (a != a.T).any():
            raise ValueError("adjacency must be symmetric")
        if np.diagonal(a).any():
            raise ValueError("adjacency must have a zero diagonal")
        object.__setattr__(self, "adjacency", _frozen(a))

    @classmethod
    def from_edges(cls, n, edges):
        a = np.zeros((n, n), dtype=np.int8)
        for u, v in edges:
            a[u, v] = a[v, u] = 1
        return cls(n, a)

    @property
    def degrees(self):
        return self.adjacency.sum(axis=1).astype(np.int64)

    @property
    def n_edges(self):
        return int(self.adjacency.sum()) // 2

    def edges(self):
        """Sorted list of (u, v) pairs with u < v."""
        iu, iv = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(iu.tolist(), iv.tolist()))

    def n_components(self):
        seen = np.zeros(self.n, dtype=bool)
        nbrs = [np.flatnonzero(row) for row in self.adjacency]
        count = 0
        for start in range(self.n):
            if seen[start]:
                continue
            count += 1
            seen[start] = True
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for v in nbrs[u]:
                    if not seen[v]:
                        seen[v] = True
                        queue.append(v)
        return count

    def is_connected(self):
        return self.n_components() == 1

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash((self.n, self.adjacency.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.n_edges})"


@dataclass(frozen=True, eq=False)
class CrossNetwork:
    """Directed coupling blocks: ``a_br`` is N x M (Blue rows), ``a_rb`` is M x N."""

    a_br: np.ndarray
    a_rb: np.ndarray

    def __post_init__(self):
        a_br = np.asarray(self.a_br)
        a_rb = np.asarray(self.a_rb)
        if a_br.ndim != 2 or a_rb.shape != a_br.shape[::-1]:
            raise DimensionError(
                f"cross blocks must be N x M and M x N, got {a_br.shape} and {a_rb.shape}"
            )
        for a in (a_br, a_rb):
            if not np.isin(a, (0, 1)).all():
                raise ValueError("cross-network entries must be 0 or 1")
        object.__setattr__(self, "a_br", _frozen(a_br))
        object.__setattr__(self, "a_rb", _frozen(a_rb))

    @property
    def n_blue(self):
        return self.a_br.shape[0]

    @property
    def n_red(self):
        return self.a_br.shape[1]

    @property
    def is_mutual(self):
        return np.array_equal(self.a_rb, self.a_br.T)

    def __eq__(self, other):
        if not isinstance(other, CrossNetwork):
            return NotImplemented
        return np.array_equal(self.a_br, other.a_br) and np.array_equal(self.a_rb, other.a_rb)

    def __hash__(self):
        return hash((self.a_br.shape, self.a_br.tobytes(), self.a_rb.tobytes()))


@dataclass(frozen=True)
class RedPartition:
    """Red split into R1 (cross-linked to Blue) and R2 (the rest).

    Degree totals follow the naming d_T^(XY) = number of X->Y links; inside
    Red the R1-R2 count is symmetric.
    """

    r1: tuple
    r2: tuple
    d_r1r2: int
    d_br1: int
    d_r1b: int
    d_br2: int
    d_r2b: int

    @property
    def m1(self):
        return len(self.r1)

    @property
    def m2(self):
        return len(self.r2)

    @property
    def m(self):
        return self.m1 + self.m2

    @property
    def order(self):
        """Red indices ordered R1 then R2."""
        return np.array(self.r1 + self.r2, dtype=np.int64)


def complete_kary_tree(branching, depth, max_nodes=MAX_NODES):
    """Complete ``branching``-ary tree of the given depth, numbered breadth first."""
    if branching < 1:
        raise ValueError("branching must be >= 1")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    # closed form overflows quickly for large b, so count level by level
    n, level = 0, 1
    for _ in range(depth + 1):
        n += level
        if n > max_nodes:
            raise GraphSizeError(f"tree({branching}, {depth}) exceeds {max_nodes} nodes")
        level *= branching
    # BFS numbering: children of node i are b*i+1 .. b*i+b
    edges = [(i, (i - 1) // branching) for i in range(1, n)]
    return Graph.from_edges(n, edges)


def tree_leaves(tree):
    """Leaves of a BFS-numbered rooted tree (the root counts only when alone)."""
    if tree.n == 1:
        return [0]
    deg = tree.degrees
    return [i for i in range(1, tree.n) if deg[i] == 1]


def erdos_renyi(n, p, seed, require_connected=True, max_retries=1000):
    """G(n, p) graph; with ``require_connected`` redraw until one component.

    Draw k uses the RNG stream seeded with ``[seed, k]``, so the result depends
    only on (n, p, seed).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if n < 1:
        raise ValueError("n must be positive")
    iu, iv = np.triu_indices(n, 1)
    for attempt in range(max_retries if require_connected else 1):
        rng = np.random.default_rng([int(seed), attempt])
        mask = rng.random(iu.size) < p
        a = np.zeros((n, n), dtype=np.int8)
        a[iu[mask], iv[mask]] = 1
        a[iv[mask], iu[mask]] = 1
        g = Graph(n, a)
        if not require_connected or g.is_connected():
            return g
    raise ConnectivityError(
        f"no connected G({n}, {p}) draw within {max_retries} retries (seed={seed})"
    )


def degree_matrix(g):
    return np.diag(g.degrees.astype(float))


def laplacian(g):
    a = g.adjacency.astype(float)
    return np.diag(a.sum(axis=1)) - a


def leaf_matching_cross(blue, red, symmetric=True):
    """One-to-one links from each Blue leaf to the identically indexed Red node."""
    leaves = tree_leaves(blue)
    if red.n <= max(leaves):
        raise DimensionError(
            f"red has {red.n} nodes but blue leaf indices reach {max(leaves)}"
        )
    a_br = np.zeros((blue.n, red.n), dtype=np.int8)
    a_br[leaves, leaves] = 1
    a_rb = a_br.T.copy() if symmetric else np.zeros((red.n, blue.n), dtype=np.int8)
    return CrossNetwork(a_br, a_rb)


def cross_degrees(x):
    """Row sums of both blocks and the total Blue->Red link count d_T^(BR)."""
    d_br = x.a_br.sum(axis=1).astype(np.int64)
    d_rb = x.a_rb.sum(axis=1).astype(np.int64)
    return d_br, d_rb, int(x.a_br.sum())


def partition_red(red, x):
    linked = (x.a_br.sum(axis=0) > 0) | (x.a_rb.sum(axis=1) > 0)
    r1 = tuple(np.flatnonzero(linked).tolist())
    r2 = tuple(np.flatnonzero(~linked).tolist())
    if not r1 or not r2:
        raise DegeneratePartitionError(
            f"red partition is degenerate (M1={len(r1)}, M2={len(r2)})"
        )
    r1i, r2i = list(r1), list(r2)
    return RedPartition(
        r1=r1,
        r2=r2,
        d_r1r2=int(red.adjacency[np.ix_(r1i, r2i)].sum()),
        d_br1=int(x.a_br[:, r1i].sum()),
        d_r1b=int(x.a_rb[r1i, :].sum()),
        d_br2=int(x.a_br[:, r2i].sum()),
        d_r2b=int(x.a_rb[r2i, :].sum()),
    )


def read_edge_list(text):
    """Parse the edge-list format.

    Grammar: an optional ``population NAME`` line, a ``nodes K`` header, then
    one ``u v`` pair per line. Blank lines and ``#`` comments are ignored.
    """
    n = None
    edges = set()
    pending = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "population":
            continue
        if parts[0] == "nodes":
            if n is not None:
                raise EdgeListParseError("duplicate 'nodes' header", lineno)
            if len(parts) != 2 or not parts[1].isdigit():
                raise EdgeListParseError(f"bad header {line!r}", lineno)
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise EdgeListParseError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(f"non-integer node in {line!r}", lineno) from None
        pending.append((lineno, u, v))
    if n is None:
        raise EdgeListParseError("missing 'nodes K' header")
    for lineno, u, v in pending:
        if u < 0 or v < 0 or u >= n or v >= n:
            raise EdgeListParseError(f"node index out of range 0..{n - 1}", lineno)
        if u == v:
            raise EdgeListParseError(f"self-loop on node {u}", lineno)
        key = (min(u, v), max(u, v))
        if key in edges:
            raise EdgeListParseError(f"duplicate edge {key[0]} {key[1]}", lineno)
        edges.add(key)
    return Graph.from_edges(n, sorted(edges))


def write_edge_list(g, population=None):
    lines = []
    if population:
        lines.append(f"population {population}")
    lines.append(f"nodes {g.n}")
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines)
