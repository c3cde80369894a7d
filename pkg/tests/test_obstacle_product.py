"""Edge extension + clique replacement, pinned to BFS-oracle values
computed independently before the builders existed."""

import numpy as np
import pytest

from opgraph import (
    ConstructionViolation,
    Graph,
    InputError,
    audit_op,
    bfs_distances,
    build_family_member,
    build_op,
    clique_sequence,
    extend_edges,
    faithfulness_check,
    family_member_distances,
    replace_cliques,
)
from opgraph.labels import CliqueNode, PathNode
from opgraph.verification import FamilyMember, SubgraphMask
from conftest import random_graph

INF = float("inf")


def test_extension_arithmetic():
    host = random_graph(30, 60, 1)
    ext = extend_edges(host, ell=5)
    assert ext.interior == 4
    assert ext.node_count == 2 * host.m + 4 * host.m  # (ell + 1) * m


def test_clique_ids_group_by_owner():
    host = Graph(4, [[0, 1], [0, 2], [1, 2], [2, 3]])
    ext = extend_edges(host, ell=3)
    # clique node c belongs to host node owner[c]; ids are grouped by owner
    owners = ext.clique_owner.tolist()
    assert owners == sorted(owners)
    assert np.bincount(ext.clique_owner, minlength=4).tolist() == host.degrees.tolist()
    for e in range(host.m):
        for side in (0, 1):
            c = ext.clique_node(e, side)
            assert ext.clique_owner[c] == host.edges[e, side]
            assert ext.clique_edge[c] == e
    # degree-0 host nodes get nothing
    lonely = Graph(3, [[0, 1]])
    assert extend_edges(lonely, 3).skipped_isolated == 1


def test_replace_cliques_labels():
    host = Graph(3, [[0, 1], [1, 2]])
    ext = extend_edges(host, ell=3)
    g, labels, clique_edges = replace_cliques(ext)
    assert g.n == ext.node_count
    # node 1 has degree 2 -> one clique edge; endpoints degree 1 -> none
    assert clique_edges == 1
    kinds = [type(l).__name__ for l in labels.rows]
    assert kinds.count("CliqueNode") == 2 * host.m
    assert kinds.count("PathNode") == (3 - 1) * host.m
    for i, lab in enumerate(labels.rows):
        if isinstance(lab, PathNode):
            assert 1 <= lab.i <= ext.interior


def test_op2_frozen_shape(op2_fx):
    og = op2_fx
    assert (og.graph.n, og.graph.m) == (126, 136)
    assert (og.D, og.k, og.params.ell) == (13, 1, 6)
    assert og.clique_edge_count == 28
    assert og.certificates.shape == (4, 1, 2)


def test_op4_frozen_shape(op4_fx):
    og = op4_fx
    assert (og.graph.n, og.graph.m) == (3744, 3728)
    assert (og.D, og.k, og.params.ell) == (51, 3, 12)
    assert og.clique_edge_count == 272
    assert og.certificates.shape == (16, 3, 2)


def test_audits_clean(op2_fx, op4_fx):
    assert audit_op(op2_fx).ok
    assert audit_op(op4_fx).ok


def test_pair_distance_equals_D(op4_fx):
    og = op4_fx
    for s, t in og.pairs.pairs[:5]:
        assert bfs_distances(og.graph, int(s))[int(t)] == og.D


def test_certificates_disjoint(op4_fx):
    idx = op4_fx.cert_edge_index.ravel()
    assert len(np.unique(idx)) == len(idx)


def _full_cert_distance(og, r):
    return family_member_distances(og, build_family_member(og, [r]))[r]


def test_op2_full_certificate_detours(op2_fx):
    assert [_full_cert_distance(op2_fx, r) for r in range(4)] == [14.0] * 4


def test_op4_full_certificate_detours(op4_fx):
    got = [_full_cert_distance(op4_fx, r) for r in range(16)]
    want = [INF if r % 4 in (0, 3) else 54.0 for r in range(16)]
    assert got == want  # bottleneck pairs disconnect, the rest detour to D+k


def test_op4_single_edge_detours(op4_fx):
    og = op4_fx

    def vec(r):
        out = []
        for slot in range(3):
            alive = np.ones(og.graph.m, dtype=bool)
            alive[og.cert_edge_index[r, slot]] = False
            m = FamilyMember(frozenset(), SubgraphMask(og.graph, alive))
            d = family_member_distances(og, m)[r]
            out.append(None if d == INF else int(d))
        return out

    assert vec(1) == [52, 52, 52]
    assert vec(0) == [52, None, None]
    assert vec(4) == [52, 52, None]


def test_other_pairs_unmoved_by_full_deletion(op4_fx):
    og = op4_fx
    member = build_family_member(og, [5])
    dists = family_member_distances(og, member)
    for r, d in enumerate(dists):
        if r != 5:
            assert d == og.D


def test_deletions_commute(op4_fx):
    og = op4_fx
    m_ab = build_family_member(og, [1, 2])
    alive_a = build_family_member(og, [1]).mask.alive
    alive_b = build_family_member(og, [2]).mask.alive
    np.testing.assert_array_equal(m_ab.mask.alive, alive_a & alive_b)


def test_separation_is_monotone(op4_fx):
    og = op4_fx
    d_small = family_member_distances(og, build_family_member(og, [1]))
    d_large = family_member_distances(og, build_family_member(og, [1, 2, 5]))
    assert d_large[1] >= d_small[1]  # more deletions never shorten


def test_degenerate_delta_rejected(base_fx):
    lg, ps = base_fx
    with pytest.raises(InputError) as exc:
        build_op(lg.graph, ps, 1)
    assert "degenerate" in str(exc.value)


def test_host_path_length_checked(base_fx):
    lg, ps = base_fx
    with pytest.raises(InputError):
        build_op(lg.graph, ps, 3)  # paths have 2 hops, not 3


def test_clique_sequence_of_canonical_path(op2_fx):
    og = op2_fx
    seq = clique_sequence(og, og.pairs.paths[0])
    hp = og.host_pairs.paths[0]
    # the canonical walk visits the host path's node cliques in order
    assert seq == [int(x) for x in hp]


def test_faithfulness(op2_fx):
    assert faithfulness_check(op2_fx, 0) == []


def test_certificate_edges_are_clique_edges(op4_fx):
    og = op4_fx
    for r in range(len(og.pairs)):
        for u, v in og.certificates[r]:
            lu, lv = og.labels[int(u)], og.labels[int(v)]
            assert isinstance(lu, CliqueNode) and isinstance(lv, CliqueNode)
            assert lu.v == lv.v  # same owning host node
