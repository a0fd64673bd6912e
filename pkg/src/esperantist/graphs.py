"""Cayley and Schreier multigraphs of generator sets acting on finite sets.

Every graph is stored as a neighbour table ``nbr`` of shape (n, r): row
``x`` lists ``s . x`` for each generator ``s`` in generator order. The
adjacency matrix is therefore ``A[x, y] = #{s : s . x = y}``. A generator
fixing ``x`` contributes one loop (diagonal entry 1), and an involution
contributes a single edge counted once from each endpoint, so each vertex
has degree exactly r = |S| and the Laplacian rows sum to zero.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse

from . import _kernels
from .algebra import (
    DEFAULT_CAP,
    GeneratorSet,
    GroupTable,
    MatrixModP,
    RowEncoder,
    enumerate_group,
    split_block_diag,
)
from .errors import CapExceededError

ACTION_KINDS = (
    "left-translation",
    "projective-line",
    "nonzero-vectors",
    "coset-by-subgroup",
    "diagonal-quotient",
)

LOOP_CONVENTION = "one incidence per generator per vertex; loop adds 1 to A[x,x]"
EXPORT_VERSION = 1


@dataclass(frozen=True)
class GroupAction:
    """How a generator set acts on a finite point set.

    ``subgroup`` is required for ``coset-by-subgroup`` (cosets xH, acted on
    by left multiplication). ``diagonal-quotient`` expects block-diagonal
    generators diag(a, b) and acts on m x m matrices by x -> a x b^-1.
    """

    kind: str
    subgroup: GroupTable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise ValueError(f"unknown action kind {self.kind!r}")
        if self.kind == "coset-by-subgroup" and self.subgroup is None:
            raise ValueError("coset-by-subgroup needs a subgroup table")

    @property
    def descriptor(self) -> str:
        if self.kind == "coset-by-subgroup":
            return f"coset-by-subgroup[index-of-order-{len(self.subgroup)}]"
        return self.kind


class RegularMultigraph:
    """r-regular multigraph given by a generator neighbour table."""

    def __init__(self, nbr, labels=None, *, action="custom", catalog="custom",
                 modulus=None, generator_fingerprint="", vertex_transitive=False):
        nbr = np.ascontiguousarray(nbr, dtype=np.int64)
        if nbr.ndim != 2:
            raise ValueError("neighbour table must be 2-dimensional")
        n = nbr.shape[0]
        if nbr.size and (nbr.min() < 0 or nbr.max() >= n):
            raise ValueError("neighbour table refers to a missing vertex")
        self.nbr = nbr
        self.nbr.setflags(write=False)
        self.labels = labels
        self.action = action
        self.catalog = catalog
        self.modulus = modulus
        self.generator_fingerprint = generator_fingerprint
        self.vertex_transitive = vertex_transitive
        self.loop_convention = LOOP_CONVENTION

    @property
    def n(self) -> int:
        return self.nbr.shape[0]

    @property
    def r(self) -> int:
        return self.nbr.shape[1]

    def __len__(self):
        return self.n

    @cached_property
    def component_labels(self):
        return _kernels.components(self.nbr)

    @property
    def n_components(self) -> int:
        return self.component_labels[1]

    @property
    def connected(self) -> bool:
        return self.n_components == 1

    def adjacency(self) -> sparse.csr_matrix:
        """Sparse adjacency with edge multiplicities (loops on the diagonal)."""
        n, r = self.nbr.shape
        rows = np.repeat(np.arange(n), r)
        a = sparse.csr_matrix((np.ones(n * r), (rows, self.nbr.ravel())), shape=(n, n))
        a.sum_duplicates()
        return a

    def laplacian_dense(self) -> np.ndarray:
        lap = -self.adjacency().toarray()
        lap[np.diag_indices(self.n)] += self.r
        return lap

    def is_symmetric(self) -> bool:
        a = self.adjacency()
        return (a != a.T).nnz == 0

    def laplacian_row_sums(self) -> np.ndarray:
        """Row sums of r I - A computed exactly in integers."""
        degree = np.asarray(self.adjacency().sum(axis=1)).ravel().astype(np.int64)
        return self.r - degree

    def export(self) -> str:
        """Canonical text edge list: header, then one ``u s v`` line per edge."""
        head = [
            f"# esperantist-graph v{EXPORT_VERSION}",
            f"# n={self.n} r={self.r} action={self.action} catalog={self.catalog} "
            f"ell={self.modulus}",
            f"# generators={self.generator_fingerprint}",
        ]
        n, r = self.nbr.shape
        u = np.repeat(np.arange(n), r)
        s = np.tile(np.arange(r), n)
        body = np.column_stack([u, s, self.nbr.ravel()])
        lines = "\n".join(" ".join(map(str, row)) for row in body.tolist())
        return "\n".join(head) + "\n" + lines + ("\n" if lines else "")

    @cached_property
    def cache_key(self) -> str:
        return hashlib.sha256(self.export().encode()).hexdigest()

    def __repr__(self):
        return (f"RegularMultigraph(n={self.n}, r={self.r}, action={self.action!r}, "
                f"catalog={self.catalog!r}, ell={self.modulus})")


def read_export(text: str) -> RegularMultigraph:
    """Parse the output of :meth:`RegularMultigraph.export`."""
    meta = {}
    fingerprint = ""
    edges = []
    for line in text.splitlines():
        if line.startswith("# generators="):
            fingerprint = line[len("# generators="):]
        elif line.startswith("# n="):
            for tok in line[2:].split():
                key, _, val = tok.partition("=")
                meta[key] = val
        elif line and not line.startswith("#"):
            edges.append([int(t) for t in line.split()])
    n, r = int(meta["n"]), int(meta["r"])
    nbr = np.zeros((n, r), dtype=np.int64)
    for u, s, v in edges:
        nbr[u, s] = v
    ell = None if meta.get("ell") in (None, "None") else int(meta["ell"])
    return RegularMultigraph(nbr, action=meta["action"], catalog=meta["catalog"], modulus=ell,
                             generator_fingerprint=fingerprint)


def laplacian_apply(g: RegularMultigraph, v) -> np.ndarray:
    """Apply Delta = r I - A to a vector of length n."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (g.n,):
        raise ValueError(f"vector length {v.shape} does not match n={g.n}")
    return _kernels.laplacian_apply(g.nbr, v)


def _graph_kwargs(gens: GeneratorSet, action: str, transitive: bool) -> dict:
    return dict(action=action, catalog=gens.label, modulus=gens.modulus,
                generator_fingerprint=gens.fingerprint(), vertex_transitive=transitive)


def cayley_graph_from_table(table: GroupTable) -> RegularMultigraph:
    labels = table.elements.reshape(len(table), -1)
    return RegularMultigraph(table.nbr, labels, **_graph_kwargs(table.generators, "cayley", True))


def cayley_graph(gens: GeneratorSet, cap: int = DEFAULT_CAP) -> RegularMultigraph:
    """Cayley graph C(G, S); vertices are group elements in BFS order."""
    return cayley_graph_from_table(enumerate_group(gens, cap))


def _as_column(basepoint, m) -> np.ndarray:
    v = np.asarray(basepoint, dtype=np.int64).reshape(-1)
    if v.shape != (m,):
        raise ValueError(f"basepoint must be a vector of length {m}")
    return v.reshape(m, 1)


def _default_basepoint(kind: str, m: int):
    if kind in ("projective-line", "nonzero-vectors"):
        v = np.zeros(m, dtype=np.int64)
        v[0] = 1
        return v
    return np.eye(m, dtype=np.int64)


def schreier_graph(gens: GeneratorSet, action: GroupAction, basepoint=None,
                   cap: int = DEFAULT_CAP) -> RegularMultigraph:
    """Schreier graph on the orbit of ``basepoint``.

    Vertices are orbit points in BFS discovery order (generators scanned in
    order); vertex labels are canonical point representatives.

    Raises:
        ValueError: basepoint outside the action's point set.
        CapExceededError: orbit larger than ``cap``.
    """
    ell, kind = gens.modulus, action.kind
    left = gens.stack()
    m = gens.dim
    if kind == "coset-by-subgroup":
        return _coset_graph(gens, action.subgroup, basepoint, cap)
    if basepoint is None:
        basepoint = _default_basepoint(kind, m if kind != "diagonal-quotient" else m // 2)
    right = None
    projective = False
    if kind in ("projective-line", "nonzero-vectors"):
        base = _as_column(basepoint, m)
        if not (base % ell).any():
            raise ValueError("basepoint must be a nonzero vector")
        projective = kind == "projective-line"
    elif kind == "left-translation":
        base = _check_invertible_point(basepoint, m, ell)
    elif kind == "diagonal-quotient":
        if m % 2:
            raise ValueError("diagonal-quotient needs block-diagonal generators of even size")
        half = m // 2
        blocks = [split_block_diag(g) for g in gens]
        for g, (a, b) in zip(gens, blocks):
            arr = g.array
            if arr[:half, half:].any() or arr[half:, :half].any():
                raise ValueError("diagonal-quotient generators must be block diagonal")
        left = np.stack([a.array for a, _ in blocks])
        right = np.stack([b.inverse().array for _, b in blocks])
        base = _check_invertible_point(basepoint, half, ell)
    points, nbr, complete = _kernels.orbit_bfs(left, right, base, ell, projective, cap)
    if not complete:
        raise CapExceededError(points.shape[0], cap)
    transitive = kind == "left-translation"
    return RegularMultigraph(nbr, points, **_graph_kwargs(gens, action.descriptor, transitive))


def _check_invertible_point(basepoint, m, ell) -> np.ndarray:
    x = np.asarray(basepoint, dtype=np.int64)
    if x.shape != (m, m):
        raise ValueError(f"basepoint must be a {m}x{m} matrix")
    if MatrixModP.from_array(x, ell).det() == 0:
        raise ValueError("basepoint must be an invertible matrix")
    return x


def _coset_graph(gens: GeneratorSet, subgroup: GroupTable, basepoint, cap) -> RegularMultigraph:
    """Graph on left cosets xH with edges xH -> s x H."""
    table = enumerate_group(gens, cap)
    ell = gens.modulus
    for h in subgroup.generators:
        if h not in table:
            raise ValueError("subgroup generator is not in the group generated by gens")
    # cosets xH are the components of x -- x h over the generators of H
    right = np.stack([
        table.lookup(np.matmul(table.elements, h.array) % ell) for h in subgroup.generators
    ], axis=1)
    coset_of, n_cosets = _kernels.components(right)
    if n_cosets * len(subgroup) != len(table):
        raise ValueError("subgroup order does not divide the group order consistently")
    _, rep = np.unique(coset_of, return_index=True)
    qnbr = coset_of[table.nbr[rep]]
    start = 0
    if basepoint is not None:
        x = MatrixModP.from_array(np.asarray(basepoint), ell)
        start = int(coset_of[table.index(x)])
    order = _kernels.bfs_order(qnbr, start)
    relabel = np.full(n_cosets, -1, dtype=np.int64)
    relabel[order] = np.arange(len(order))
    nbr = relabel[qnbr[order]]
    # canonical label: lexicographically smallest element of each coset
    flat = table.elements.reshape(len(table), -1)
    keys = np.lexsort(flat.T[::-1])
    rank = np.empty(len(table), dtype=np.int64)
    rank[keys] = np.arange(len(table))
    best = np.full(n_cosets, len(table), dtype=np.int64)
    np.minimum.at(best, coset_of, rank)
    labels = flat[keys[best[order]]]
    desc = f"coset-by-subgroup[|H|={len(subgroup)}]"
    return RegularMultigraph(nbr, labels, **_graph_kwargs(gens, desc, False))


def permutation_graph(perms, labels=None, action="permutation") -> RegularMultigraph:
    """Graph on {0..n-1} from explicit permutations (one per generator).

    The full point set is kept, so a non-transitive family of permutations
    gives a disconnected graph. Pass the permutations of a symmetric set
    (each inverse included) for an undirected graph.
    """
    perms = [np.asarray(p, dtype=np.int64) for p in perms]
    n = perms[0].shape[0]
    for p in perms:
        if p.shape != (n,) or not np.array_equal(np.sort(p), np.arange(n)):
            raise ValueError("each generator must act as a permutation of the point set")
    return RegularMultigraph(np.stack(perms, axis=1), labels, action=action)


def cyclic_cayley_graph(n: int, steps) -> RegularMultigraph:
    """Cayley graph of Z/nZ with the given steps, closed under negation."""
    sym = list(dict.fromkeys(s % n for s in steps))
    for s in list(sym):
        if (-s) % n not in sym:
            sym.append((-s) % n)
    pts = np.arange(n)
    g = permutation_graph([(pts + s) % n for s in sym], action=f"cyclic-Z/{n}")
    g.vertex_transitive = True
    return g


def orbit_sizes(gens: GeneratorSet, kind: str) -> list:
    """Sizes of all orbits on the full point set of a vector action."""
    if kind not in ("projective-line", "nonzero-vectors"):
        raise ValueError("orbit_sizes supports vector actions only")
    ell, m = gens.modulus, gens.dim
    allpts = np.array(np.unravel_index(np.arange(1, ell**m), (ell,) * m)).T
    if kind == "projective-line":
        lead = allpts[np.arange(len(allpts)), (allpts != 0).argmax(axis=1)]
        allpts = allpts[lead == 1]
    enc = RowEncoder(allpts, ell)
    seen = np.zeros(len(allpts), dtype=bool)
    sizes = []
    left = gens.stack()
    for i in range(len(allpts)):
        if seen[i]:
            continue
        pts, _, _ = _kernels.orbit_bfs(left, None, allpts[i].reshape(m, 1), ell,
                                       kind == "projective-line", len(allpts) + 1)
        seen[enc.lookup(pts)] = True
        sizes.append(len(pts))
    return sizes


def maximal_subgroup_index_bound(ell: int, g: int) -> float:
    """Lower bound (ell^g - 1)/2 on the index of a maximal subgroup of Sp_2g(F_ell)."""
    return (ell**g - 1) / 2
