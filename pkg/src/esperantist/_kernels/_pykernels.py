"""Pure-Python (numpy) implementations of the hot kernels.

Each function mirrors the compiled version in ``_ckernels.pyx`` exactly,
including element ordering, so the two backends are interchangeable.
"""

import numpy as np


def _normalize_projective(pts, inv_table):
    """Scale each row so its first nonzero coordinate is 1."""
    nz = pts != 0
    first = nz.argmax(axis=1)
    lead = pts[np.arange(pts.shape[0]), first]
    return pts * inv_table[lead][:, None]


def orbit_bfs(left, right, base, ell, projective, cap):
    """Breadth-first orbit of ``base`` under ``x -> L_s x R_s (mod ell)``.

    Returns ``(points, nbr, complete)`` where ``points`` has one flattened
    point per row in discovery order and ``nbr[i, s]`` is the index of the
    image of point ``i`` under generator ``s``. When the orbit would exceed
    ``cap`` the partial point list is returned with ``complete=False``.
    """
    left = np.asarray(left, dtype=np.int64)
    k, m, _ = left.shape
    base = np.asarray(base, dtype=np.int64).reshape(m, -1)
    p = base.shape[1]
    has_right = right is not None and len(right) > 0
    if has_right:
        right = np.asarray(right, dtype=np.int64)
    inv_table = None
    if projective:
        inv_table = np.zeros(ell, dtype=np.int64)
        for a in range(1, ell):
            inv_table[a] = pow(a, -1, ell)

    start = base.reshape(1, -1) % ell
    if projective:
        start = _normalize_projective(start, inv_table) % ell

    index = {start.tobytes(): 0}
    blocks = [start]
    nbr_blocks = []
    count = 1
    frontier = start
    while frontier.shape[0]:
        f = frontier.shape[0]
        mats = frontier.reshape(f, m, p)
        # images[f, s] = L_s X_f (R_s)
        imgs = np.einsum("sij,fjq->fsiq", left, mats) % ell
        if has_right:
            imgs = np.einsum("fsiq,sqr->fsir", imgs, right) % ell
        imgs = imgs.reshape(f * k, m * p)
        if projective:
            imgs = _normalize_projective(imgs, inv_table) % ell
        imgs = np.ascontiguousarray(imgs)
        ids = np.empty(f * k, dtype=np.int64)
        new_rows = []
        for j in range(f * k):
            key = imgs[j].tobytes()
            idx = index.get(key)
            if idx is None:
                if count >= cap:
                    pts = np.concatenate(blocks + ([imgs[new_rows]] if new_rows else []))
                    return pts, None, False
                idx = count
                index[key] = idx
                count += 1
                new_rows.append(j)
            ids[j] = idx
        nbr_blocks.append(ids.reshape(f, k))
        frontier = imgs[new_rows] if new_rows else imgs[:0]
        if new_rows:
            blocks.append(frontier)
    points = np.concatenate(blocks)
    nbr = np.concatenate(nbr_blocks) if nbr_blocks else np.zeros((1, k), dtype=np.int64)
    return points, nbr, True


def laplacian_apply(nbr, v):
    """Return ``(r I - A) v`` for the neighbour table ``nbr`` of shape (n, r)."""
    nbr = np.asarray(nbr)
    v = np.asarray(v, dtype=np.float64)
    r = nbr.shape[1]
    acc = np.zeros_like(v)
    # sequential accumulation over generators keeps results bit-identical
    # to the compiled loop
    for j in range(r):
        acc += v[nbr[:, j]]
    return r * v - acc


def bfs_distances(nbr, source):
    """Hop distances from ``source`` (-1 where unreachable)."""
    nbr = np.asarray(nbr)
    n = nbr.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        d += 1
        cand = np.unique(nbr[frontier].ravel())
        cand = cand[dist[cand] < 0]
        dist[cand] = d
        frontier = cand
    return dist


def components(nbr):
    """Connected-component labels (treating edges as undirected) and count."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    nbr = np.asarray(nbr)
    n, r = nbr.shape
    rows = np.repeat(np.arange(n), r)
    adj = csr_matrix((np.ones(n * r, dtype=np.int8), (rows, nbr.ravel())), shape=(n, n))
    count, labels = connected_components(adj, directed=True, connection="weak")
    # relabel in order of first appearance
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty(count, dtype=np.int64)
    remap[order] = np.arange(count)
    return remap[labels], int(count)


def count_cycles(perm):
    """Number of cycles of a permutation given as an image array."""
    perm = np.asarray(perm)
    seen = np.zeros(perm.shape[0], dtype=bool)
    cycles = 0
    for start in range(perm.shape[0]):
        if seen[start]:
            continue
        cycles += 1
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
    return cycles


def bfs_order(nbr, source):
    """Vertices reachable from ``source`` in BFS discovery order."""
    nbr = np.asarray(nbr)
    seen = np.zeros(nbr.shape[0], dtype=bool)
    seen[source] = True
    order = [source]
    head = 0
    while head < len(order):
        for w in nbr[order[head]].tolist():
            if not seen[w]:
                seen[w] = True
                order.append(w)
        head += 1
    return np.array(order, dtype=np.int64)
