"""Pure-Python BFS kernels, the fallback twin of the compiled module.

Same signatures and semantics as ``_speedups``; only speed differs. All
kernels operate on CSR adjacency (indptr int64, indices int32, rows sorted
ascending) and treat ``max_depth < 0`` as "no cutoff". Distances use -1 for
"not reached" (which under a cutoff means "beyond the cutoff or unreachable,
undetermined"); target searches additionally use -2 for "cutoff pruned the
search before the target was seen".
"""

from collections import deque

import numpy as np

UNREACHED = -1
CUTOFF = -2


def bfs_distances(indptr, indices, source, max_depth=-1):
    n = len(indptr) - 1
    dist = np.full(n, UNREACHED, dtype=np.int32)
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        du = int(dist[u])
        if max_depth >= 0 and du >= max_depth:
            continue
        for v in indices[indptr[u] : indptr[u + 1]]:
            if dist[v] < 0:
                dist[v] = du + 1
                q.append(int(v))
    return dist


def bfs_count(indptr, indices, source, max_depth=-1):
    """Distances plus shortest-path multiplicity saturated at 2."""
    n = len(indptr) - 1
    dist = np.full(n, UNREACHED, dtype=np.int32)
    mult = np.zeros(n, dtype=np.uint8)
    dist[source] = 0
    mult[source] = 1
    q = deque([source])
    while q:
        u = q.popleft()
        du = int(dist[u])
        if max_depth >= 0 and du >= max_depth:
            continue
        mu = int(mult[u])
        for v in indices[indptr[u] : indptr[u + 1]]:
            if dist[v] < 0:
                dist[v] = du + 1
                mult[v] = mu
                q.append(int(v))
            elif dist[v] == du + 1 and mult[v] < 2:
                # saturating: 2 stands for "many"
                mult[v] = min(2, int(mult[v]) + mu)
    return dist, mult


def bfs_parents(indptr, indices, source):
    """Distances plus a deterministic parent array.

    parent[v] is the lowest-id neighbor of v at distance dist[v]-1; rows are
    sorted, so the first qualifying neighbor wins. parent is -1 for the
    source and for unreached nodes.
    """
    dist = bfs_distances(indptr, indices, source)
    n = len(indptr) - 1
    parent = np.full(n, -1, dtype=np.int32)
    for v in range(n):
        dv = dist[v]
        if dv <= 0:
            continue
        for u in indices[indptr[v] : indptr[v + 1]]:
            if dist[u] == dv - 1:
                parent[v] = u
                break
    return dist, parent


def bfs_multi(indptr, indices, sources):
    n = len(indptr) - 1
    dist = np.full(n, UNREACHED, dtype=np.int32)
    q = deque()
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            q.append(int(s))
    while q:
        u = q.popleft()
        du = int(dist[u])
        for v in indices[indptr[u] : indptr[u + 1]]:
            if dist[v] < 0:
                dist[v] = du + 1
                q.append(int(v))
    return dist


def bfs_masked(indptr, indices, alive, source, max_depth=-1):
    """BFS that only crosses CSR slots with alive[slot] == 1."""
    n = len(indptr) - 1
    dist = np.full(n, UNREACHED, dtype=np.int32)
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        du = int(dist[u])
        if max_depth >= 0 and du >= max_depth:
            continue
        for s in range(indptr[u], indptr[u + 1]):
            if not alive[s]:
                continue
            v = indices[s]
            if dist[v] < 0:
                dist[v] = du + 1
                q.append(int(v))
    return dist


def bfs_target_masked(indptr, indices, alive, source, target, max_depth=-1):
    """Masked source-to-target distance with early exit.

    Returns the distance, UNREACHED (-1) when the component is exhausted, or
    CUTOFF (-2) when max_depth pruned the search before an answer was known.
    """
    if source == target:
        return 0
    n = len(indptr) - 1
    dist = np.full(n, UNREACHED, dtype=np.int32)
    dist[source] = 0
    q = deque([source])
    pruned = False
    while q:
        u = q.popleft()
        du = int(dist[u])
        if max_depth >= 0 and du >= max_depth:
            pruned = True
            continue
        for s in range(indptr[u], indptr[u + 1]):
            if not alive[s]:
                continue
            v = indices[s]
            if dist[v] < 0:
                if v == target:
                    return du + 1
                dist[v] = du + 1
                q.append(int(v))
    return CUTOFF if pruned else UNREACHED
