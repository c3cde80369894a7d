"""Alternating-coordinate product that trades edge-disjointness for
2-path-disjointness.

Nodes are (u1, u2, i) with i in {1, 2} over the base node set. Edges come in
two families, both driven by the forward orientation of canonical base
edges: family 1 advances the first coordinate and moves i from 1 to 2,
family 2 advances the second coordinate and moves i from 2 back to 1. The
product pair of base pairs (p1, p2) connects (s1, s2, 1) to (t1, t2, 1), and
its canonical path alternates single forward steps in each coordinate, so
its length is exactly 2*Delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .avgfree import ConstructionParams
from .base_graph import LayeredGraph, PairSet
from .errors import ConstructionViolation
from .graph import Graph
from .labels import NodeLabelTable, ProductNode


@dataclass(frozen=True)
class ForwardOrientation:
    """Directed copies of exactly the base edges lying on canonical paths.

    fwd rows are (u, v) in traversal order; owner[r] is the pair whose path
    claimed row r. Well-definedness needs edge-disjoint canonical paths, so a
    doubly-claimed edge is an error here, not a report entry.
    """

    fwd: np.ndarray
    owner: np.ndarray
    unoriented_count: int


@dataclass(frozen=True)
class CompressedGraph:
    graph: Graph
    labels: NodeLabelTable
    pairs: PairSet
    params: ConstructionParams
    base: LayeredGraph
    base_pairs: PairSet
    orientation: ForwardOrientation

    @property
    def base_n(self) -> int:
        return self.base.graph.n


def product_id(u1, u2, i, n: int):
    """Dense id of (u1, u2, i): ((u1 * n) + u2) * 2 + (i - 1)."""
    return (np.asarray(u1, dtype=np.int64) * n + np.asarray(u2, dtype=np.int64)) * 2 + (
        np.asarray(i, dtype=np.int64) - 1
    )


def orient(lg: LayeredGraph, ps: PairSet) -> ForwardOrientation:
    g = lg.graph
    paths = ps.paths.astype(np.int64)
    P, L1 = paths.shape
    hops = L1 - 1
    u = paths[:, :-1].ravel()
    v = paths[:, 1:].ravel()
    owner = np.repeat(np.arange(P, dtype=np.int64), hops)
    keys = np.minimum(u, v) * g.n + np.maximum(u, v)
    order = np.argsort(keys, kind="stable")
    dup = np.flatnonzero(np.diff(keys[order]) == 0)
    if dup.size:
        a, b = owner[order[dup[0]]], owner[order[dup[0] + 1]]
        key = int(keys[order[dup[0]]])
        raise ConstructionViolation(
            f"edge ({key // g.n}, {key % g.n}) lies on the canonical paths of "
            f"pairs {a} and {b}; forward orientation is ill-defined"
        )
    return ForwardOrientation(
        fwd=np.column_stack([u, v]).astype(np.int32),
        owner=owner.astype(np.int32),
        unoriented_count=g.m - len(u),
    )


def compress(lg: LayeredGraph, ps: PairSet, o: ForwardOrientation | None = None) -> CompressedGraph:
    if o is None:
        o = orient(lg, ps)
    n = lg.graph.n
    a = o.fwd[:, 0].astype(np.int64)
    b = o.fwd[:, 1].astype(np.int64)
    w = np.arange(n, dtype=np.int64)

    # family 1: (a, w, 1) -- (b, w, 2); family 2: (w, a, 2) -- (w, b, 1)
    e1u = ((a[:, None] * n + w[None, :]) * 2).ravel()
    e1v = ((b[:, None] * n + w[None, :]) * 2 + 1).ravel()
    e2u = ((w[None, :] * n + a[:, None]) * 2 + 1).ravel()
    e2v = ((w[None, :] * n + b[:, None]) * 2).ravel()
    edges = np.column_stack([np.concatenate([e1u, e2u]), np.concatenate([e1v, e2v])])
    g = Graph(2 * n * n, edges)

    base_paths = ps.paths.astype(np.int64)
    P, L1 = base_paths.shape
    delta = L1 - 1
    i1 = np.repeat(np.arange(P), P)
    i2 = np.tile(np.arange(P), P)
    p1 = base_paths[i1]
    p2 = base_paths[i2]
    rho = np.empty((P * P, 2 * delta + 1), dtype=np.int64)
    rho[:, 0] = product_id(p1[:, 0], p2[:, 0], 1, n)
    for s in range(delta):
        rho[:, 2 * s + 1] = product_id(p1[:, s + 1], p2[:, s], 2, n)
        rho[:, 2 * s + 2] = product_id(p1[:, s + 1], p2[:, s + 1], 1, n)
    pairs = PairSet(
        pairs=np.column_stack([rho[:, 0], rho[:, -1]]).astype(np.int32),
        paths=rho.astype(np.int32),
        witness={"i1": i1.astype(np.int64), "i2": i2.astype(np.int64)},
    )

    ids = np.arange(2 * n * n)
    labels = NodeLabelTable(
        [ProductNode(int(x // (2 * n)), int((x // 2) % n), int(x % 2 + 1)) for x in ids]
    )
    params = lg.params.with_stage(Delta=2 * lg.params.k)
    return CompressedGraph(g, labels, pairs, params, lg, ps, o)


def build_rho(cg: CompressedGraph, pair_index: int) -> np.ndarray:
    return cg.pairs.paths[pair_index].copy()


@dataclass
class CompressedAuditReport:
    unique_sp_failures: list
    distance_failures: list
    two_path_violations: list

    @property
    def ok(self) -> bool:
        return not (self.unique_sp_failures or self.distance_failures or self.two_path_violations)

    def to_json_obj(self) -> dict:
        return {
            "unique_sp_failures": self.unique_sp_failures,
            "distance_failures": self.distance_failures,
            "two_path_violations": self.two_path_violations,
        }


def audit_compressed(cg: CompressedGraph) -> CompressedAuditReport:
    """BFS recheck of distance 2*Delta + uniqueness, plus the exhaustive
    2-path registry.

    The registry keys every unordered consecutive edge pair (a, b, c) of
    every canonical path; a key claimed by two distinct pairs is a
    violation. Unordered subsumes ordered here: a reversed traversal would
    have to walk some forward edge backwards, which no canonical path does.
    """
    g = cg.graph
    two_delta = cg.params.Delta
    distance_failures = []
    unique_sp_failures = []

    pairs = cg.pairs.pairs
    order = np.argsort(pairs[:, 0], kind="stable")
    i = 0
    while i < len(order):
        src = int(pairs[order[i], 0])
        dist, mult = kernels.bfs_count(g.indptr, g.indices, src, two_delta)
        while i < len(order) and int(pairs[order[i], 0]) == src:
            row = int(order[i])
            t = int(pairs[row, 1])
            d_obs = int(dist[t])
            if d_obs != two_delta:
                distance_failures.append((row, d_obs))
            elif int(mult[t]) != 1:
                unique_sp_failures.append((row, d_obs, int(mult[t])))
            i += 1

    two_path_violations = _shared_two_paths(g.n, cg.pairs.paths)
    return CompressedAuditReport(unique_sp_failures, distance_failures, two_path_violations)


def _shared_two_paths(n: int, paths: np.ndarray) -> list:
    P, L1 = paths.shape
    if L1 < 3:
        return []
    nn = np.int64(n)
    a = paths[:, :-2].astype(np.int64)
    b = paths[:, 1:-1].astype(np.int64)
    c = paths[:, 2:].astype(np.int64)
    lo = np.minimum(a, c)
    hi = np.maximum(a, c)
    keys = ((lo * nn + b) * nn + hi).ravel()
    owners = np.repeat(np.arange(P, dtype=np.int64), L1 - 2)
    order = np.argsort(keys, kind="stable")
    keys, owners = keys[order], owners[order]
    out = []
    for pos in np.flatnonzero(np.diff(keys) == 0):
        if owners[pos] != owners[pos + 1]:
            key = int(keys[pos])
            mid = (key // nn) % nn
            out.append((int(owners[pos]), int(owners[pos + 1]), (int(key // (nn * nn)), int(mid), int(key % nn))))
    return out


def reachable_core(cg: CompressedGraph) -> tuple[Graph, np.ndarray, dict]:
    """Subgraph induced by nodes reachable from any pair endpoint.

    Visualization aid only; the canonical object keeps the full node set, so
    the returned note marks this extraction non-canonical.
    """
    g = cg.graph
    seeds = np.unique(cg.pairs.pairs.ravel()).astype(np.int32)
    dist = kernels.bfs_multi(g.indptr, g.indices, seeds)
    kept = np.flatnonzero(dist >= 0)
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[kept] = np.arange(len(kept))
    mask = (remap[g.edges[:, 0]] >= 0) & (remap[g.edges[:, 1]] >= 0)
    core = Graph(len(kept), remap[g.edges[mask].astype(np.int64)])
    return core, kept, {"non_canonical": True, "kept_nodes": int(len(kept))}
