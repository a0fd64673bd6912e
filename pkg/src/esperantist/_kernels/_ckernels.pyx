# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# distutils: language = c++
"""Compiled hot loops: orbit enumeration, Laplacian matvec, graph BFS."""

import numpy as np

from libc.stdint cimport int64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from cython.operator cimport dereference as deref


cdef inline int64_t _encode(const int64_t* x, Py_ssize_t N, int64_t ell) nogil:
    cdef int64_t code = 0
    cdef Py_ssize_t i
    for i in range(N):
        code = code * ell + x[i]
    return code


def orbit_bfs(left, right, base, int64_t ell, bint projective, Py_ssize_t cap):
    """Breadth-first orbit of ``base`` under ``x -> L_s x R_s (mod ell)``.

    Points are encoded base-``ell`` in int64, so ``ell ** (m * p)`` must be
    below ``2 ** 62``; the dispatcher checks this before calling.
    """
    cdef const int64_t[:, :, ::1] L = np.ascontiguousarray(left, dtype=np.int64)
    cdef Py_ssize_t k = L.shape[0], m = L.shape[1]
    cdef const int64_t[:, ::1] B = np.ascontiguousarray(
        np.asarray(base, dtype=np.int64).reshape(m, -1))
    cdef Py_ssize_t p = B.shape[1], N = m * p
    cdef bint has_right = right is not None and len(right) > 0
    cdef const int64_t[:, :, ::1] R
    if has_right:
        R = np.ascontiguousarray(right, dtype=np.int64)
    else:
        R = np.zeros((1, 1, 1), dtype=np.int64)

    cdef vector[int64_t] inv
    inv.resize(ell, 0)
    cdef int64_t a
    if projective:
        for a in range(1, ell):
            inv[a] = pow(int(a), -1, int(ell))

    cdef vector[int64_t] pts
    cdef vector[int64_t] nbr
    cdef unordered_map[int64_t, int64_t] index
    cdef vector[int64_t] y, z
    y.resize(N)
    z.resize(N)

    cdef Py_ssize_t i, j, t, s, head = 0, count = 1
    cdef int64_t acc, code, lead
    cdef const int64_t* x
    cdef unordered_map[int64_t, int64_t].iterator it
    cdef bint complete = True

    for i in range(m):
        for j in range(p):
            y[i * p + j] = ((B[i, j] % ell) + ell) % ell
    if projective:
        _normalize(&y[0], N, ell, inv)
    for i in range(N):
        pts.push_back(y[i])
    index[_encode(&y[0], N, ell)] = 0

    with nogil:
        while head < count:
            for s in range(k):
                x = &pts[head * N]
                for i in range(m):
                    for j in range(p):
                        acc = 0
                        for t in range(m):
                            acc = acc + L[s, i, t] * x[t * p + j]
                        y[i * p + j] = acc % ell
                if has_right:
                    for i in range(m):
                        for j in range(p):
                            acc = 0
                            for t in range(p):
                                acc = acc + y[i * p + t] * R[s, t, j]
                            z[i * p + j] = acc % ell
                    for i in range(N):
                        y[i] = z[i]
                if projective:
                    _normalize(&y[0], N, ell, inv)
                code = _encode(&y[0], N, ell)
                it = index.find(code)
                if it == index.end():
                    if count >= cap:
                        complete = False
                        break
                    index[code] = count
                    for i in range(N):
                        pts.push_back(y[i])
                    nbr.push_back(count)
                    count += 1
                else:
                    nbr.push_back(deref(it).second)
            if not complete:
                break
            head += 1

    points = np.empty((count, N), dtype=np.int64)
    cdef int64_t[:, ::1] P = points
    for i in range(count):
        for j in range(N):
            P[i, j] = pts[i * N + j]
    if not complete:
        return points, None, False
    out = np.empty((count, k), dtype=np.int64)
    cdef int64_t[:, ::1] O = out
    for i in range(count):
        for s in range(k):
            O[i, s] = nbr[i * k + s]
    return points, out, True


cdef inline void _normalize(int64_t* y, Py_ssize_t N, int64_t ell,
                            vector[int64_t]& inv) noexcept nogil:
    cdef Py_ssize_t i
    cdef int64_t lead = 0
    for i in range(N):
        if y[i] != 0:
            lead = y[i]
            break
    if lead == 0 or lead == 1:
        return
    lead = inv[lead]
    for i in range(N):
        y[i] = (y[i] * lead) % ell


def laplacian_apply(nbr, v):
    """Return ``(r I - A) v``; sums over generators in fixed order."""
    cdef const int64_t[:, ::1] T = np.ascontiguousarray(nbr, dtype=np.int64)
    cdef const double[::1] x = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t n = T.shape[0], r = T.shape[1], i, j
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef double acc
    with nogil:
        for i in range(n):
            acc = 0.0
            for j in range(r):
                acc = acc + x[T[i, j]]
            y[i] = r * x[i] - acc
    return out


def bfs_distances(nbr, Py_ssize_t source):
    """Hop distances from ``source`` (-1 where unreachable)."""
    cdef const int64_t[:, ::1] T = np.ascontiguousarray(nbr, dtype=np.int64)
    cdef Py_ssize_t n = T.shape[0], r = T.shape[1]
    dist_arr = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] dist = dist_arr
    cdef vector[int64_t] queue
    cdef Py_ssize_t head = 0, j
    cdef int64_t u, w
    with nogil:
        queue.push_back(source)
        dist[source] = 0
        while head < <Py_ssize_t>queue.size():
            u = queue[head]
            head += 1
            for j in range(r):
                w = T[u, j]
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.push_back(w)
    return dist_arr


def components(nbr):
    """Connected-component labels (edges taken as undirected) and count."""
    cdef const int64_t[:, ::1] T = np.ascontiguousarray(nbr, dtype=np.int64)
    cdef Py_ssize_t n = T.shape[0], r = T.shape[1], i, j, head
    # reverse adjacency so a directed table still yields weak components
    cdef vector[vector[int64_t]] rev
    rev.resize(n)
    for i in range(n):
        for j in range(r):
            rev[T[i, j]].push_back(i)
    labels_arr = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] labels = labels_arr
    cdef vector[int64_t] queue
    cdef int64_t u, w, comp = 0
    with nogil:
        for i in range(n):
            if labels[i] >= 0:
                continue
            queue.clear()
            queue.push_back(i)
            labels[i] = comp
            head = 0
            while head < <Py_ssize_t>queue.size():
                u = queue[head]
                head += 1
                for j in range(r):
                    w = T[u, j]
                    if labels[w] < 0:
                        labels[w] = comp
                        queue.push_back(w)
                for j in range(<Py_ssize_t>rev[u].size()):
                    w = rev[u][j]
                    if labels[w] < 0:
                        labels[w] = comp
                        queue.push_back(w)
            comp += 1
    return labels_arr, int(comp)


def count_cycles(perm):
    """Number of cycles of a permutation given as an image array."""
    cdef const int64_t[::1] P = np.ascontiguousarray(perm, dtype=np.int64)
    cdef Py_ssize_t n = P.shape[0], start
    cdef int64_t j, cycles = 0
    seen_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] seen = seen_arr
    with nogil:
        for start in range(n):
            if seen[start]:
                continue
            cycles += 1
            j = start
            while not seen[j]:
                seen[j] = 1
                j = P[j]
    return int(cycles)


def bfs_order(nbr, Py_ssize_t source):
    """Vertices reachable from ``source`` in BFS discovery order."""
    cdef const int64_t[:, ::1] T = np.ascontiguousarray(nbr, dtype=np.int64)
    cdef Py_ssize_t n = T.shape[0], r = T.shape[1], head = 0, j
    seen_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] seen = seen_arr
    cdef vector[int64_t] queue
    cdef int64_t u, w
    with nogil:
        queue.push_back(source)
        seen[source] = 1
        while head < <Py_ssize_t>queue.size():
            u = queue[head]
            head += 1
            for j in range(r):
                w = T[u, j]
                if not seen[w]:
                    seen[w] = 1
                    queue.push_back(w)
    out = np.empty(queue.size(), dtype=np.int64)
    cdef int64_t[::1] O = out
    for j in range(<Py_ssize_t>queue.size()):
        O[j] = queue[j]
    return out
