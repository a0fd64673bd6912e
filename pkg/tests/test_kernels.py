"""Compiled and pure-Python kernels must agree exactly."""

import numpy as np
import pytest

from esperantist import _kernels
from esperantist.algebra import catalog_generators
from esperantist.graphs import cyclic_cayley_graph

pytestmark = pytest.mark.skipif(len(_kernels.backends()) < 2,
                                reason="compiled extension not built")


def _both():
    b = _kernels.backends()
    return b["compiled"], b["python"]


@pytest.mark.parametrize("projective", [False, True])
@pytest.mark.parametrize("ell", [3, 5, 7])
def test_vector_orbit_parity(ell, projective):
    c, p = _both()
    left = catalog_generators("sl2-elementary", ell=ell).stack()
    base = np.array([[1], [0]])
    pc, nc, okc = c.orbit_bfs(left, None, base, ell, projective, 10**6)
    pp, np_, okp = p.orbit_bfs(left, None, base, ell, projective, 10**6)
    assert okc and okp
    assert np.array_equal(pc, pp) and np.array_equal(nc, np_)


def test_group_and_two_sided_parity():
    c, p = _both()
    gens = catalog_generators("gamma2-legendre", ell=5).stack()
    eye = np.eye(2, dtype=np.int64)
    for right in (None, gens[::-1].copy()):
        a = c.orbit_bfs(gens, right, eye, 5, False, 10**6)
        b = p.orbit_bfs(gens, right, eye, 5, False, 10**6)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_cap_truncation_parity():
    c, p = _both()
    gens = catalog_generators("sl2-elementary", ell=7).stack()
    eye = np.eye(2, dtype=np.int64)
    a = c.orbit_bfs(gens, None, eye, 7, False, 50)
    b = p.orbit_bfs(gens, None, eye, 7, False, 50)
    assert not a[2] and not b[2]
    assert len(a[0]) == len(b[0]) <= 50


def test_laplacian_apply_bit_identical(rng):
    c, p = _both()
    g = cyclic_cayley_graph(97, [1, 5, 11])
    v = rng.standard_normal(97)
    assert np.array_equal(c.laplacian_apply(g.nbr, v), p.laplacian_apply(g.nbr, v))


def test_traversals_agree(rng):
    c, p = _both()
    nbr = rng.integers(0, 60, size=(60, 3))
    assert np.array_equal(c.bfs_distances(nbr, 0), p.bfs_distances(nbr, 0))
    assert np.array_equal(c.bfs_order(nbr, 5), p.bfs_order(nbr, 5))
    lc, kc = c.components(nbr)
    lp, kp = p.components(nbr)
    assert kc == kp and np.array_equal(lc, lp)
    perm = rng.permutation(200)
    assert c.count_cycles(perm) == p.count_cycles(perm)


def test_backend_selection_is_reported():
    assert _kernels.BACKEND in _kernels.backends()
