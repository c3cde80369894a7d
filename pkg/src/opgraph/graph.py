"""Immutable undirected graph with the shortest-path machinery.

Node ids are dense integers 0..n-1; structured labels live in a separate
table (see labels.py) so every algorithm here stays label-free. Edges are
kept canonical (u < v, lexicographically sorted), which makes the on-disk
format, digests, and greedy scan orders reproducible by construction.
"""

from __future__ import annotations

import hashlib

import numpy as np

from . import kernels
from .errors import InputError

UNREACHABLE = kernels.UNREACHED
MANY = 2


class Graph:
    """Immutable simple graph in CSR form.

    ``edges`` is the canonical (m, 2) int32 array with u < v, sorted
    lexicographically. ``indptr``/``indices`` hold the usual CSR adjacency
    with each row sorted ascending. Instances never mutate; every derived
    graph is a new value.
    """

    __slots__ = ("n", "m", "edges", "indptr", "indices", "_keys", "_rowkeys")

    def __init__(self, n: int, edges) -> None:
        if n < 0:
            raise InputError(f"node count must be nonnegative, got {n}")
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if arr.size:
            if arr.min() < 0 or arr.max() >= n:
                raise InputError("edge endpoint out of range")
            if (arr[:, 0] == arr[:, 1]).any():
                raise InputError("self-loops are not allowed")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        order = np.lexsort((hi, lo))
        lo, hi = lo[order], hi[order]
        keys = lo * n + hi
        if keys.size and (np.diff(keys) == 0).any():
            raise InputError("duplicate edges are not allowed")
        self.n = int(n)
        self.m = int(len(keys))
        self.edges = np.column_stack([lo, hi]).astype(np.int32)
        ends = np.concatenate([lo, hi])
        other = np.concatenate([hi, lo])
        counts = np.bincount(ends, minlength=n) if self.m else np.zeros(n, dtype=np.int64)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        slot_order = np.lexsort((other, ends))
        self.indices = other[slot_order].astype(np.int32)
        self._keys = keys
        self._rowkeys = None

    @classmethod
    def from_edge_list(cls, n: int, pairs) -> "Graph":
        return cls(n, np.array(list(pairs), dtype=np.int64).reshape(-1, 2))

    @property
    def edge_keys(self) -> np.ndarray:
        """Sorted int64 keys u*n + v for the canonical edges."""
        return self._keys

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def _canon_keys(self, pairs) -> np.ndarray:
        arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        return np.minimum(arr[:, 0], arr[:, 1]) * self.n + np.maximum(arr[:, 0], arr[:, 1])

    def edge_index(self, pairs) -> np.ndarray:
        """Index of each (u, v) in the canonical edge array, -1 when absent."""
        keys = self._canon_keys(pairs)
        if self.m == 0:
            return np.full(len(keys), -1, dtype=np.int64)
        pos = np.searchsorted(self._keys, keys)
        pos_c = np.clip(pos, 0, self.m - 1)
        ok = (pos < self.m) & (self._keys[pos_c] == keys)
        return np.where(ok, pos, -1)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.edge_index([(u, v)])[0] >= 0)

    def edge_slots(self, edge_indices) -> np.ndarray:
        """CSR slot pair (u->v, v->u) for each canonical edge index.

        Rows of ``indices`` are sorted, so each directed slot is found by one
        searchsorted over the concatenated row-key array.
        """
        if self._rowkeys is None:
            row_ids = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
            self._rowkeys = row_ids * self.n + self.indices
        e = self.edges[np.asarray(edge_indices, dtype=np.int64)]
        u = e[:, 0].astype(np.int64)
        v = e[:, 1].astype(np.int64)
        s_uv = np.searchsorted(self._rowkeys, u * self.n + v)
        s_vu = np.searchsorted(self._rowkeys, v * self.n + u)
        return np.column_stack([s_uv, s_vu])

    def delete_edges(self, removed) -> "Graph":
        """New graph without the given edges; absent edges are an error."""
        arr = np.asarray(removed, dtype=np.int64).reshape(-1, 2)
        if arr.size == 0:
            return Graph(self.n, self.edges)
        idx = self.edge_index(arr)
        if (idx < 0).any():
            bad = arr[int(np.argmax(idx < 0))]
            raise InputError(f"edge ({bad[0]}, {bad[1]}) is not in the graph")
        keep = np.ones(self.m, dtype=bool)
        keep[idx] = False
        return Graph(self.n, self.edges[keep])

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"n {self.n} m {self.m}\n".encode())
        h.update(self.edges.astype("<i4").tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.m == other.m
            and bool((self.edges == other.edges).all())
        )

    def __hash__(self):  # pragma: no cover - identity hashing is never relied on
        return hash((self.n, self.m))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def bfs_distances(g: Graph, source: int, max_depth: int = -1) -> np.ndarray:
    """Exact distances from source; UNREACHABLE (-1) where no path exists."""
    if not 0 <= source < g.n:
        raise InputError(f"source {source} out of range for n={g.n}")
    return kernels.bfs_distances(g.indptr, g.indices, source, max_depth)


def count_shortest_paths(g: Graph, s: int, t: int, max_depth: int = -1) -> tuple[int, int]:
    """(distance, multiplicity) with multiplicity saturated in {0, 1, MANY}.

    Computed by dynamic programming over the BFS-layered DAG; saturation at 2
    keeps the counter overflow-free.
    """
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise InputError("pair endpoint out of range")
    dist, mult = kernels.bfs_count(g.indptr, g.indices, s, max_depth)
    d = int(dist[t])
    if d < 0:
        return UNREACHABLE, 0
    return d, int(mult[t])


def delete_edges(g: Graph, removed) -> Graph:
    return g.delete_edges(removed)


def is_path(g: Graph, nodes) -> bool:
    """True when consecutive entries are edges of g (backtracking allowed)."""
    seq = np.asarray(nodes, dtype=np.int64)
    if len(seq) < 2:
        return True
    pairs = np.column_stack([seq[:-1], seq[1:]])
    return bool((g.edge_index(pairs) >= 0).all())


def path_edges(nodes) -> np.ndarray:
    """Canonical (u, v) rows for the consecutive hops of a node sequence."""
    seq = np.asarray(nodes, dtype=np.int64)
    a, b = seq[:-1], seq[1:]
    return np.column_stack([np.minimum(a, b), np.maximum(a, b)])
