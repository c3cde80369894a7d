# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled BFS kernels. Semantics documented in _pykernels.py."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

UNREACHED = -1
CUTOFF = -2


def bfs_distances(indptr, indices, int source, int max_depth=-1):
    cdef cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef Py_ssize_t n = ip.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] dist = dist_arr
    queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef cnp.int64_t s
    cdef int u, v, du
    with nogil:
        dist[source] = 0
        queue[tail] = source
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if max_depth >= 0 and du >= max_depth:
                continue
            for s in range(ip[u], ip[u + 1]):
                v = ix[s]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
    return dist_arr


def bfs_count(indptr, indices, int source, int max_depth=-1):
    cdef cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef Py_ssize_t n = ip.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    mult_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.int32_t[::1] dist = dist_arr
    cdef cnp.uint8_t[::1] mult = mult_arr
    queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef cnp.int64_t s
    cdef int u, v, du, mu, mv
    with nogil:
        dist[source] = 0
        mult[source] = 1
        queue[tail] = source
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if max_depth >= 0 and du >= max_depth:
                continue
            mu = mult[u]
            for s in range(ip[u], ip[u + 1]):
                v = ix[s]
                if dist[v] < 0:
                    dist[v] = du + 1
                    mult[v] = <cnp.uint8_t>mu
                    queue[tail] = v
                    tail += 1
                elif dist[v] == du + 1 and mult[v] < 2:
                    mv = mult[v] + mu
                    if mv > 2:
                        mv = 2
                    mult[v] = <cnp.uint8_t>mv
    return dist_arr, mult_arr


def bfs_parents(indptr, indices, int source):
    cdef cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    dist_arr = bfs_distances(indptr, indices, source)
    cdef cnp.int32_t[::1] dist = dist_arr
    cdef Py_ssize_t n = ip.shape[0] - 1
    parent_arr = np.full(n, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] parent = parent_arr
    cdef cnp.int64_t s
    cdef Py_ssize_t v
    cdef int dv, u
    with nogil:
        for v in range(n):
            dv = dist[v]
            if dv <= 0:
                continue
            for s in range(ip[v], ip[v + 1]):
                u = ix[s]
                # rows are sorted ascending, so the first hit is the lowest id
                if dist[u] == dv - 1:
                    parent[v] = u
                    break
    return dist_arr, parent_arr


def bfs_multi(indptr, indices, sources):
    cdef cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef cnp.int32_t[::1] src = np.ascontiguousarray(sources, dtype=np.int32)
    cdef Py_ssize_t n = ip.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] dist = dist_arr
    queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0, i
    cdef cnp.int64_t s
    cdef int u, v, du
    with nogil:
        for i in range(src.shape[0]):
            u = src[i]
            if dist[u] < 0:
                dist[u] = 0
                queue[tail] = u
                tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            for s in range(ip[u], ip[u + 1]):
                v = ix[s]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
    return dist_arr


def bfs_masked(indptr, indices, alive, int source, int max_depth=-1):
    cdef cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef cnp.uint8_t[::1] al = np.ascontiguousarray(alive, dtype=np.uint8)
    cdef Py_ssize_t n = ip.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] dist = dist_arr
    queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef cnp.int64_t s
    cdef int u, v, du
    with nogil:
        dist[source] = 0
        queue[tail] = source
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if max_depth >= 0 and du >= max_depth:
                continue
            for s in range(ip[u], ip[u + 1]):
                if not al[s]:
                    continue
                v = ix[s]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
    return dist_arr


def bfs_target_masked(indptr, indices, alive, int source, int target, int max_depth=-1):
    cdef cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef cnp.uint8_t[::1] al = np.ascontiguousarray(alive, dtype=np.uint8)
    cdef Py_ssize_t n = ip.shape[0] - 1
    cdef int result = -1
    cdef bint pruned = 0
    if source == target:
        return 0
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] dist = dist_arr
    queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef cnp.int64_t s
    cdef int u, v, du
    with nogil:
        dist[source] = 0
        queue[tail] = source
        tail += 1
        while head < tail and result < 0:
            u = queue[head]
            head += 1
            du = dist[u]
            if max_depth >= 0 and du >= max_depth:
                pruned = 1
                continue
            for s in range(ip[u], ip[u + 1]):
                if not al[s]:
                    continue
                v = ix[s]
                if dist[v] < 0:
                    if v == target:
                        result = du + 1
                        break
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
    if result >= 0:
        return result
    return -2 if pruned else -1
