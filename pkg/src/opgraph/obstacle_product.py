"""Edge extension plus clique replacement, with per-pair clique-edge
certificates.

Every host edge becomes a chain whose clique-to-clique length is exactly
ell; every host node v becomes a clique on deg(v) nodes, one per incident
edge. A host pair at distance Delta therefore sits at distance
D = Delta*ell + (Delta-1) in the product: Delta chain segments of ell edges
plus Delta-1 clique hops. Those Delta-1 clique edges are the pair's
certificate; certificates of distinct pairs are disjoint whenever the host
paths were 2-path disjoint, and deleting a full certificate forces a detour
of at least k = Delta-1 extra edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .avgfree import ConstructionParams
from .base_graph import PairSet
from .errors import ConstructionViolation, InputError
from .graph import Graph
from .labels import CliqueNode, NodeLabelTable, PathNode


@dataclass(frozen=True)
class EdgeExtension:
    """Chains and attachments, before cliques are wired up.

    Clique node ids come first (grouped by host node, edge-ascending inside
    each group, so host.indptr delimits the groups); chain node ids follow,
    edge-major. cl_of_slot maps CSR-style slot 2*e + side to the clique node
    of that endpoint, where side 0 is the smaller endpoint. Each chain has
    ell-1 interior nodes so that the clique-to-clique segment has exactly
    ell edges.
    """

    host: Graph
    ell: int
    interior: int
    node_count: int
    cl_of_slot: np.ndarray
    clique_owner: np.ndarray
    clique_edge: np.ndarray
    chain_edges: np.ndarray
    skipped_isolated: int

    def clique_node(self, e: int, side: int) -> int:
        return int(self.cl_of_slot[2 * e + side])


def extend_edges(host: Graph, ell: int) -> EdgeExtension:
    if ell < 1:
        raise InputError(f"ell must be >= 1, got {ell}")
    m = host.m
    interior = ell - 1
    ends = host.edges.astype(np.int64).ravel()  # slot 2e+side
    order = np.argsort(ends, kind="stable")  # clique ids grouped by owner
    cl_of_slot = np.empty(2 * m, dtype=np.int64)
    cl_of_slot[order] = np.arange(2 * m)
    clique_owner = ends[order]
    clique_edge = order // 2

    e = np.arange(m, dtype=np.int64)
    lo_cl = cl_of_slot[2 * e]  # side 0 = smaller endpoint: chains start there
    hi_cl = cl_of_slot[2 * e + 1]
    if interior == 0:
        chain = np.column_stack([lo_cl, hi_cl])
    else:
        first = 2 * m + e * interior
        rows = [np.column_stack([lo_cl, first])]
        for i in range(interior - 1):
            rows.append(np.column_stack([first + i, first + i + 1]))
        rows.append(np.column_stack([first + interior - 1, hi_cl]))
        chain = np.concatenate(rows)
    return EdgeExtension(
        host=host,
        ell=ell,
        interior=interior,
        node_count=2 * m + interior * m,
        cl_of_slot=cl_of_slot,
        clique_owner=clique_owner,
        clique_edge=clique_edge,
        chain_edges=chain,
        skipped_isolated=int((host.degrees == 0).sum()),
    )


def replace_cliques(ext: EdgeExtension) -> tuple[Graph, NodeLabelTable, int]:
    """Complete each host node's clique and assemble the final graph.

    Returns (graph, labels, clique_edge_count). Host nodes of degree 0 have
    no clique nodes at all; they are dropped (callers record the count from
    ext.skipped_isolated as a manifest warning).
    """
    host = ext.host
    blocks = []
    for v in range(host.n):
        start, stop = int(host.indptr[v]), int(host.indptr[v + 1])
        deg = stop - start
        if deg >= 2:
            a, b = np.triu_indices(deg, k=1)
            blocks.append(np.column_stack([a + start, b + start]))
    clique_edges = np.concatenate(blocks) if blocks else np.empty((0, 2), dtype=np.int64)
    g = Graph(ext.node_count, np.concatenate([ext.chain_edges, clique_edges]))

    rows = []
    edges64 = host.edges.astype(np.int64)
    for c in range(2 * host.m):
        e = int(ext.clique_edge[c])
        rows.append(CliqueNode(int(ext.clique_owner[c]), int(edges64[e, 0]), int(edges64[e, 1])))
    for e in range(host.m):
        for i in range(1, ext.interior + 1):
            rows.append(PathNode(int(edges64[e, 0]), int(edges64[e, 1]), i))
    return g, NodeLabelTable(rows), int(len(clique_edges))


@dataclass(frozen=True)
class ObstacleGraph:
    graph: Graph
    labels: NodeLabelTable
    host: Graph
    host_pairs: PairSet
    pairs: PairSet
    certificates: np.ndarray  # (P, Delta-1, 2) clique-edge endpoints, canonical
    cert_edge_index: np.ndarray  # (P, Delta-1) indices into graph.edges
    params: ConstructionParams
    clique_edge_count: int
    host_kind: str

    @property
    def D(self) -> int:
        return self.params.D

    @property
    def k(self) -> int:
        return self.params.Delta - 1


def build_op(
    host: Graph,
    host_pairs: PairSet,
    delta_host: int,
    *,
    params: ConstructionParams | None = None,
    host_kind: str = "unspecified",
    check_host: bool = True,
) -> ObstacleGraph:
    """Run the extension and clique replacement over an audited host.

    The host pair set must consist of unique shortest paths of length
    exactly delta_host that are pairwise 2-path disjoint; the audits of the
    producing stage establish that, and check_host recomputes the distance
    part here by bounded BFS.
    """
    delta = int(delta_host)
    if delta < 2:
        raise InputError(
            f"Delta = {delta} is degenerate: the separation k = Delta-1 would vanish"
        )
    if host_pairs.paths.shape[1] != delta + 1:
        raise InputError(
            f"host paths have {host_pairs.paths.shape[1] - 1} hops, expected {delta}"
        )
    if check_host:
        for row in range(len(host_pairs)):
            s, t = map(int, host_pairs.pairs[row])
            dist = kernels.bfs_distances(host.indptr, host.indices, s, delta)
            if int(dist[t]) != delta:
                raise InputError(f"host pair {row} is not at distance {delta}")

    ell = 3 * delta
    D = delta * ell + (delta - 1)
    ext = extend_edges(host, ell)
    g, labels, clique_edge_count = replace_cliques(ext)

    P = len(host_pairs)
    paths = np.empty((P, D + 1), dtype=np.int64)
    certs = np.empty((P, delta - 1, 2), dtype=np.int64)
    edges64 = host.edges.astype(np.int64)
    host_eidx = host.edge_index(
        np.stack([host_pairs.paths[:, :-1], host_pairs.paths[:, 1:]], axis=2).reshape(-1, 2)
    ).reshape(P, delta)
    if (host_eidx < 0).any():
        raise ConstructionViolation("a host canonical path leaves the host graph")

    interior = ext.interior
    for r in range(P):
        hp = host_pairs.paths[r].astype(np.int64)
        pos = 0
        for s in range(delta):
            e = int(host_eidx[r, s])
            enter_side = 0 if hp[s] == edges64[e, 0] else 1
            c_in = ext.clique_node(e, enter_side)
            c_out = ext.clique_node(e, 1 - enter_side)
            paths[r, pos] = c_in
            first = 2 * host.m + e * interior
            if enter_side == 0:
                seg = np.arange(first, first + interior)
            else:
                seg = np.arange(first + interior - 1, first - 1, -1)
            paths[r, pos + 1 : pos + 1 + interior] = seg
            paths[r, pos + 1 + interior] = c_out
            pos += ell
            if s < delta - 1:
                nxt = ext.clique_node(int(host_eidx[r, s + 1]), 0 if hp[s + 1] == edges64[host_eidx[r, s + 1], 0] else 1)
                certs[r, s, 0] = min(c_out, nxt)
                certs[r, s, 1] = max(c_out, nxt)
                pos += 1  # the clique hop to the next segment's entry node
        if pos != D:
            raise ConstructionViolation(f"pair {r}: path has {pos} hops, expected {D}")

    cert_idx = g.edge_index(certs.reshape(-1, 2)).reshape(P, delta - 1)
    if (cert_idx < 0).any():
        raise ConstructionViolation("a certificate edge is missing from the graph")

    pairs = PairSet(
        pairs=np.column_stack([paths[:, 0], paths[:, -1]]).astype(np.int32),
        paths=paths.astype(np.int32),
        witness={"host_index": np.arange(P, dtype=np.int64)},
    )
    if params is None:
        params = ConstructionParams(k=delta - 1, Delta=delta)
    params = params.with_stage(Delta=delta, ell=ell, D=D)
    return ObstacleGraph(
        graph=g,
        labels=labels,
        host=host,
        host_pairs=host_pairs,
        pairs=pairs,
        certificates=certs,
        cert_edge_index=cert_idx,
        params=params,
        clique_edge_count=clique_edge_count,
        host_kind=host_kind,
    )


@dataclass
class OPAuditReport:
    distance_failures: list
    certificate_disjointness_violations: list
    detour_failures: list

    @property
    def ok(self) -> bool:
        return not (
            self.distance_failures
            or self.certificate_disjointness_violations
            or self.detour_failures
        )

    def to_json_obj(self) -> dict:
        return {
            "distance_failures": self.distance_failures,
            "certificate_disjointness_violations": self.certificate_disjointness_violations,
            "detour_failures": self.detour_failures,
        }


def audit_op(og: ObstacleGraph, *, deletion_scope: int | None = None, seed: int = 0) -> OPAuditReport:
    """Recheck the three product guarantees by BFS.

    (a) every pair at distance exactly D; (b) certificates pairwise
    disjoint; (c) deleting a pair's full certificate pushes that pair to
    >= D + k while every other pair stays at exactly D. deletion_scope
    bounds how many pairs get the deletion treatment (None = all),
    seed-sampled without replacement when bounded.
    """
    g = og.graph
    D = og.D
    k = og.k
    P = len(og.pairs)
    distance_failures = []
    for r in range(P):
        s, t = map(int, og.pairs.pairs[r])
        d_obs = int(kernels.bfs_distances(g.indptr, g.indices, s, D)[t])
        if d_obs != D:
            distance_failures.append((r, d_obs))

    cert_viol = []
    flat = og.cert_edge_index.ravel()
    owners = np.repeat(np.arange(P, dtype=np.int64), og.cert_edge_index.shape[1])
    present = flat >= 0  # loaded artifacts may have lost edges; absent can't collide
    flat, owners = flat[present], owners[present]
    order = np.argsort(flat, kind="stable")
    fs, os_ = flat[order], owners[order]
    for pos in np.flatnonzero(np.diff(fs) == 0):
        u, v = map(int, g.edges[int(fs[pos])])
        cert_viol.append((int(os_[pos]), int(os_[pos + 1]), (u, v)))

    detour_failures = []
    if deletion_scope is None or deletion_scope >= P:
        rows = range(P)
    else:
        rng = np.random.default_rng(seed)
        rows = sorted(rng.choice(P, size=deletion_scope, replace=False).tolist())
    slots_all = g.edge_slots(np.arange(g.m))
    for r in rows:
        alive = np.ones(len(g.indices), dtype=np.uint8)
        for e in og.cert_edge_index[r]:
            if e >= 0:
                alive[slots_all[e]] = 0
        s, t = map(int, og.pairs.pairs[r])
        d_del = kernels.bfs_target_masked(g.indptr, g.indices, alive, s, t, D + k)
        if 0 <= d_del < D + k:
            detour_failures.append((r, r, d_del))
        for q in range(P):
            if q == r:
                continue
            sq, tq = map(int, og.pairs.pairs[q])
            d_q = kernels.bfs_target_masked(g.indptr, g.indices, alive, sq, tq, D)
            if d_q != D:
                detour_failures.append((r, q, int(d_q)))
    return OPAuditReport(distance_failures, cert_viol, detour_failures)


def clique_sequence(og: ObstacleGraph, nodes) -> list[int]:
    """Host nodes whose cliques a node sequence visits, consecutive repeats
    collapsed; chain nodes contribute nothing."""
    out: list[int] = []
    for nid in nodes:
        lab = og.labels[int(nid)]
        if isinstance(lab, CliqueNode) and (not out or out[-1] != lab.v):
            out.append(lab.v)
    return out


def faithfulness_check(og: ObstacleGraph, pair_index: int) -> list:
    """After each single certificate-edge deletion, any found s'-t' path
    shorter than D + Delta must visit exactly the canonical clique sequence.

    Returns a list of (edge_position, observed_dist, observed_sequence)
    findings; empty means faithful.
    """
    canonical = clique_sequence(og, og.pairs.paths[pair_index])
    s, t = map(int, og.pairs.pairs[pair_index])
    findings = []
    for pos in range(og.certificates.shape[1]):
        sub = og.graph.delete_edges([og.certificates[pair_index, pos]])
        dist, parent = kernels.bfs_parents(sub.indptr, sub.indices, s)
        d = int(dist[t])
        if d < 0 or d >= og.D + og.params.Delta:
            continue
        walk = [t]
        while walk[-1] != s:
            walk.append(int(parent[walk[-1]]))
        walk.reverse()
        seq = clique_sequence(og, walk)
        if seq != canonical:
            findings.append((pos, d, seq))
    return findings
