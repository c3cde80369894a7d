import numpy as np
import pytest

from opgraph import Graph, build_base, build_op, compress
from opgraph.pipeline import fixture_set


def random_graph(n: int, m: int, seed: int, force_connected: bool = False) -> Graph:
    """Deterministic simple random graph on n nodes, about m edges."""
    rng = np.random.default_rng(seed)
    u = rng.integers(0, n, size=3 * m + n)
    v = rng.integers(0, n, size=3 * m + n)
    keep = u != v
    lo = np.minimum(u[keep], v[keep])
    hi = np.maximum(u[keep], v[keep])
    edges = np.unique(np.stack([lo, hi], axis=1), axis=0)
    if len(edges) > m:
        pick = rng.choice(len(edges), size=m, replace=False)
        edges = edges[np.sort(pick)]
    if force_connected:
        # stitch a random spanning path through every node
        perm = rng.permutation(n)
        path = np.stack([perm[:-1], perm[1:]], axis=1)
        lo = np.minimum(path[:, 0], path[:, 1])
        hi = np.maximum(path[:, 0], path[:, 1])
        edges = np.unique(np.concatenate([edges, np.stack([lo, hi], axis=1)]), axis=0)
    return Graph(n, edges)


def complete_graph(n: int) -> Graph:
    iu = np.triu_indices(n, k=1)
    return Graph(n, np.stack([iu[0], iu[1]], axis=1))


def to_networkx(g: Graph):
    nx = pytest.importorskip("networkx")
    gx = nx.Graph()
    gx.add_nodes_from(range(g.n))
    gx.add_edges_from(map(tuple, g.edges.tolist()))
    return gx


@pytest.fixture(scope="session")
def base_fx():
    a = fixture_set()
    return build_base(a)


@pytest.fixture(scope="session")
def product_fx(base_fx):
    return compress(*base_fx)


@pytest.fixture(scope="session")
def op2_fx(base_fx):
    lg, ps = base_fx
    return build_op(lg.graph, ps, 2, params=lg.params, host_kind="base")


@pytest.fixture(scope="session")
def op4_fx(product_fx):
    cg = product_fx
    return build_op(cg.graph, cg.pairs, 4, params=cg.params, host_kind="product")
