"""Layered pair-preserving graph over a k-average-free set.

Nodes are (x, j) with x in [1, (k+1)N] and layer j in 0..k; edges join (x, j)
to (x+a, j+1) for every a in A. Each pair (x in [1, N], a in A) connects
(x, 0) to (x + k*a, k); its canonical path steps by a in every layer, and
average-freeness of A is exactly what makes that path the unique shortest
one while keeping all canonical paths pairwise edge-disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .avgfree import AvgFreeSet, ConstructionParams, verify_avgfree
from .errors import ConstructionViolation, InputError
from .graph import Graph, path_edges
from .labels import BaseNode, NodeLabelTable


@dataclass(frozen=True)
class LayeredGraph:
    graph: Graph
    labels: NodeLabelTable
    params: ConstructionParams
    avgfree: AvgFreeSet


@dataclass(frozen=True)
class PairSet:
    """Pairs with canonical paths; witness columns are stage-specific."""

    pairs: np.ndarray  # (P, 2) int32 node ids
    paths: np.ndarray  # (P, L+1) int32, row r is the canonical path of pair r
    witness: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.pairs)


def node_id(x: int, j: int, k: int) -> int:
    """1-based coordinate x and layer j to the dense id (x-1)*(k+1) + j."""
    return (x - 1) * (k + 1) + j


def node_coords(i: int, k: int) -> tuple[int, int]:
    return i // (k + 1) + 1, i % (k + 1)


def build_base(
    a: AvgFreeSet, *, check: bool = True, check_budget: int | None = None
) -> tuple[LayeredGraph, PairSet]:
    """Build the layered graph and pair set for the set ``a``.

    ``check=False`` waives the average-freeness verification; the waiver is
    recorded in params (and from there in manifests) as avgfree_verified.
    """
    k = a.k
    if k < 1:
        raise InputError("k = 0 is degenerate: pairs would have distance 0")
    if check:
        kwargs = {} if check_budget is None else {"budget": check_budget}
        bad = verify_avgfree(a, **kwargs)
        if bad:
            raise ConstructionViolation(f"set is not {k}-average-free, e.g. {bad[0]}")
    N = a.universe_N
    M = (k + 1) * N  # x range of the node grid
    A = a.elements
    n = M * (k + 1)

    edge_chunks = []
    for a_val in A.tolist():
        span = M - a_val
        if span <= 0:
            continue
        x = np.arange(1, span + 1, dtype=np.int64)
        for j in range(k):
            u = (x - 1) * (k + 1) + j
            v = (x + a_val - 1) * (k + 1) + (j + 1)
            edge_chunks.append(np.column_stack([u, v]))
    edges = np.concatenate(edge_chunks) if edge_chunks else np.empty((0, 2), dtype=np.int64)
    g = Graph(n, edges)

    # pairs in x-major, a-minor order
    xs = np.repeat(np.arange(1, N + 1, dtype=np.int64), len(A))
    avals = np.tile(A, N)
    steps = np.arange(k + 1, dtype=np.int64)
    paths = ((xs[:, None] + steps[None, :] * avals[:, None]) - 1) * (k + 1) + steps[None, :]
    pairs = np.column_stack([paths[:, 0], paths[:, -1]])
    ps = PairSet(
        pairs=pairs.astype(np.int32),
        paths=paths.astype(np.int32),
        witness={"a": avals.copy(), "x": xs.copy()},
    )

    labels = NodeLabelTable([BaseNode(i // (k + 1) + 1, i % (k + 1)) for i in range(n)])
    prov = a.provenance
    params = ConstructionParams(
        k=k,
        p=prov.get("p"),
        d=prov.get("d"),
        q=(k + 1) * prov["p"] if prov.get("p") else None,
        N=N,
        r_star=prov.get("r_star"),
        Delta=k,
        fixture=bool(prov.get("manual")),
        avgfree_verified=check,
    )
    params.validate()
    return LayeredGraph(g, labels, params, a), ps


@dataclass
class BaseAuditReport:
    unique_sp_failures: list
    distance_failures: list
    edge_disjoint_violations: list

    @property
    def ok(self) -> bool:
        return not (self.unique_sp_failures or self.distance_failures or self.edge_disjoint_violations)

    def to_json_obj(self) -> dict:
        return {
            "unique_sp_failures": self.unique_sp_failures,
            "distance_failures": self.distance_failures,
            "edge_disjoint_violations": self.edge_disjoint_violations,
        }


def audit_base(lg: LayeredGraph, ps: PairSet) -> BaseAuditReport:
    """Recheck the three pair-set guarantees by BFS, nothing assumed.

    Every pair must sit at distance exactly k with a unique shortest path,
    and no edge may occur in two canonical paths. BFS runs once per distinct
    source with a depth cutoff of k, so the cost is the k-ball around each
    source rather than the whole graph.
    """
    g = lg.graph
    k = lg.params.k
    distance_failures = []
    unique_sp_failures = []

    order = np.argsort(ps.pairs[:, 0], kind="stable")
    i = 0
    while i < len(order):
        src = int(ps.pairs[order[i], 0])
        dist, mult = kernels.bfs_count(g.indptr, g.indices, src, k)
        while i < len(order) and int(ps.pairs[order[i], 0]) == src:
            row = int(order[i])
            t = int(ps.pairs[row, 1])
            d_obs = int(dist[t])
            if d_obs != k:
                distance_failures.append((row, d_obs))
            elif int(mult[t]) != 1:
                unique_sp_failures.append((row, d_obs, int(mult[t])))
            i += 1

    edge_disjoint_violations = _shared_path_edges(g, ps.paths)
    return BaseAuditReport(unique_sp_failures, distance_failures, edge_disjoint_violations)


def _shared_path_edges(g: Graph, paths: np.ndarray) -> list:
    """Rows (pair_i, pair_j, (u, v)) for every edge on two canonical paths."""
    P, L1 = paths.shape
    hops = L1 - 1
    u = np.minimum(paths[:, :-1], paths[:, 1:]).astype(np.int64)
    v = np.maximum(paths[:, :-1], paths[:, 1:]).astype(np.int64)
    keys = (u * g.n + v).ravel()
    owners = np.repeat(np.arange(P, dtype=np.int64), hops)
    order = np.argsort(keys, kind="stable")
    keys, owners = keys[order], owners[order]
    out = []
    dup = np.flatnonzero(np.diff(keys) == 0)
    for pos in dup:
        key = int(keys[pos])
        out.append((int(owners[pos]), int(owners[pos + 1]), (key // g.n, key % g.n)))
    return out


def validate_canonical_paths(g: Graph, ps: PairSet) -> None:
    """Static sanity: each stored path is a real path with the pair endpoints."""
    for row in range(len(ps)):
        seq = ps.paths[row]
        if seq[0] != ps.pairs[row, 0] or seq[-1] != ps.pairs[row, 1]:
            raise ConstructionViolation(f"pair {row}: path endpoints disagree")
        if (g.edge_index(path_edges(seq)) < 0).any():
            raise ConstructionViolation(f"pair {row}: canonical path leaves the graph")
