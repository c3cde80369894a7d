import numpy as np
import pytest

from opgraph import (
    Graph,
    InputError,
    girth,
    op_retention,
    spanner_greedy_mult,
    spanner_plus2,
    spanner_plus6,
    verify_spanner,
)

from conftest import complete_graph, random_graph

INF = float("inf")


def _check_additive(g, res, beta):
    audit = verify_spanner(g, res.kept, kind="additive")
    assert audit.bound <= beta, (res.algo, audit.witness)
    return audit


@pytest.mark.parametrize("seed", range(6))
def test_plus2_random(seed):
    g = random_graph(n=120, m=600, seed=seed, force_connected=True)
    res = spanner_plus2(g)
    assert res.m_out <= res.m_in
    _check_additive(g, res, 2)


def test_plus2_size_bound():
    # n^{3/2} scaling with slack for the BFS trees of the centers
    g = random_graph(n=400, m=6000, seed=3, force_connected=True)
    res = spanner_plus2(g)
    assert res.m_out <= 8 * int(400 ** 1.5)
    _check_additive(g, res, 2)


def test_plus2_keeps_sparse_graph_whole():
    g = random_graph(n=60, m=70, seed=1, force_connected=True)
    res = spanner_plus2(g)
    # all degrees below the threshold: nothing is heavy, nothing is dropped
    if g.degrees.max() < res.params["threshold"]:
        assert res.m_out == g.m


@pytest.mark.parametrize("seed", range(4))
def test_plus6_random(seed):
    g = random_graph(n=90, m=800, seed=seed, force_connected=True)
    res = spanner_plus6(g)
    _check_additive(g, res, 6)


def test_plus6_on_obstacle_instance(op2_fx):
    g = op2_fx.graph
    res = spanner_plus6(g)
    audit = _check_additive(g, res, 6)
    assert audit.mode == "all-pairs"


def test_greedy_t1_is_identity():
    g = random_graph(n=40, m=120, seed=5)
    res = spanner_greedy_mult(g, t=1)
    assert res.m_out == g.m
    assert bool(res.kept.all())


def test_greedy_rejects_bad_t():
    g = complete_graph(5)
    with pytest.raises(InputError):
        spanner_greedy_mult(g, t=0)


@pytest.mark.parametrize("n", [8, 15, 24])
def test_greedy_t2_on_cliques(n):
    g = complete_graph(n)
    res = spanner_greedy_mult(g, t=2)
    h = res.graph(g)
    gi = girth(h)
    assert gi > 4, gi  # 2t = 4: every surviving cycle is length 5 or more
    audit = verify_spanner(g, res.kept, kind="ratio")
    assert audit.bound <= 3.0


@pytest.mark.parametrize("seed", range(3))
def test_greedy_t2_ratio_random(seed):
    g = random_graph(n=70, m=900, seed=seed, force_connected=True)
    res = spanner_greedy_mult(g, t=2)
    audit = verify_spanner(g, res.kept, kind="ratio")
    assert audit.bound <= 3.0


def test_girth_values():
    tri = Graph(3, [[0, 1], [1, 2], [0, 2]])
    assert girth(tri) == 3.0
    square = Graph(4, [[0, 1], [1, 2], [2, 3], [0, 3]])
    assert girth(square) == 4.0
    tree = Graph(4, [[0, 1], [1, 2], [1, 3]])
    assert girth(tree) == INF
    assert girth(Graph(3, [])) == INF


def test_verify_additive_exact_breakage():
    # path 0-1-2 plus shortcut 0-2; dropping the shortcut costs +1
    g = Graph(3, [[0, 1], [1, 2], [0, 2]])
    kept = np.ones(g.m, dtype=bool)
    kept[g.edge_index([[0, 2]])[0]] = False
    audit = verify_spanner(g, kept, kind="additive")
    assert audit.bound == 1.0
    assert audit.witness == (0, 2, 1, 2)  # (u, v, before, after)


def test_verify_disconnection_is_infinite():
    g = Graph(3, [[0, 1], [1, 2]])
    kept = np.array([True, False])
    audit = verify_spanner(g, kept, kind="additive")
    assert audit.bound == INF
    assert verify_spanner(g, kept, kind="ratio").bound == INF


def test_verify_respects_pair_scope():
    # beyond the all-pairs limit the audit walks the supplied pairs; a
    # scope that misses the broken corner sees nothing
    g = Graph(4, [[0, 1], [1, 2], [2, 3], [0, 3]])
    kept = np.ones(g.m, dtype=bool)
    kept[g.edge_index([[0, 3]])[0]] = False
    scoped = verify_spanner(
        g, kept, kind="additive", pairs=np.array([[0, 1]]), sample=0, all_pairs_limit=2
    )
    assert scoped.bound == 0.0 and scoped.pairs_checked == 1
    hit = verify_spanner(
        g, kept, kind="additive", pairs=np.array([[0, 3]]), sample=0, all_pairs_limit=2
    )
    assert hit.bound == 2.0  # 0-3 detours around the whole square
    full = verify_spanner(g, kept, kind="additive")
    assert full.bound == 2.0 and full.mode == "all-pairs"


def test_verify_sampled_mode():
    g = random_graph(n=300, m=2000, seed=9, force_connected=True)
    res = spanner_plus2(g)
    audit = verify_spanner(g, res.kept, kind="additive", all_pairs_limit=10, sample=500, seed=4)
    assert audit.mode.startswith("sampled:")
    assert 0 < audit.pairs_checked <= 500  # self-pairs are discarded
    assert audit.bound <= 2.0


def test_verify_kept_shape_checked():
    g = complete_graph(4)
    with pytest.raises(InputError):
        verify_spanner(g, np.ones(g.m - 1, dtype=bool))


def test_edgeless_graph_passes_through():
    g = Graph(5, [])
    for res in (spanner_plus2(g), spanner_plus6(g), spanner_greedy_mult(g, 2)):
        assert res.m_out == 0
    assert verify_spanner(g, np.zeros(0, dtype=bool)).bound == 0.0


def test_disconnected_input_tolerated():
    # two components; spanners must not conjure cross edges or hang
    a = random_graph(n=30, m=60, seed=2, force_connected=True)
    shifted = a.edges + 30
    g = Graph(60, np.vstack([a.edges, shifted]))
    for res in (spanner_plus2(g), spanner_plus6(g)):
        audit = verify_spanner(g, res.kept, kind="additive")
        assert audit.bound <= {"plus2": 2.0, "plus6": 6.0}[res.algo]


def test_op_retention_counts(op4_fx):
    og = op4_fx
    full = np.ones(og.graph.m, dtype=bool)
    rep = op_retention(og, full)
    assert rep["cert_edges_total"] == 48
    assert rep["kept_cert_edges"] == 48
    assert rep["pairs_with_intact_certificate"] == 16
    assert rep["clique_edges_total"] == 272

    cut = full.copy()
    cut[og.cert_edge_index[0]] = False
    rep2 = op_retention(og, cut)
    assert rep2["kept_cert_edges"] == 45
    assert rep2["pairs_with_intact_certificate"] == 15


def test_result_manifest_shape(op2_fx):
    res = spanner_plus2(op2_fx.graph)
    obj = res.to_manifest_obj()
    assert obj["algo"] == "plus2"
    assert obj["m_out"] == int(res.kept.sum())
    assert "verified_bound" in obj
