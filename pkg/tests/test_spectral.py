import math

import numpy as np
import pytest

from esperantist.algebra import catalog_generators
from esperantist.errors import DisconnectedGraphError
from esperantist.graphs import GroupAction, cayley_graph, cyclic_cayley_graph, permutation_graph, schreier_graph
from esperantist.spectral import connectivity, lambda1, lambda1_dense, lambda1_iterative


def cycle_gap(n):
    return 2 - 2 * math.cos(2 * math.pi / n)


@pytest.mark.parametrize("n", [3, 4, 5, 10, 64, 101])
def test_cycle_dense(n):
    assert lambda1_dense(cyclic_cayley_graph(n, [1])).lambda1 == pytest.approx(cycle_gap(n), abs=1e-12)


@pytest.mark.parametrize("n", [16, 256])
def test_cycle_iterative(n):
    rep = lambda1_iterative(cyclic_cayley_graph(n, [1]))
    assert abs(rep.lambda1 - cycle_gap(n)) < 1e-9
    assert rep.method == "iterative" and rep.residual <= rep.tolerance


@pytest.mark.parametrize("ell,kind", [(5, "sl2-elementary"), (7, "gamma2-legendre"),
                                      (11, "sl2-elementary")])
def test_dense_and_iterative_agree(ell, kind):
    g = cayley_graph(catalog_generators(kind, ell=ell))
    assert abs(lambda1_dense(g).lambda1 - lambda1_iterative(g).lambda1) < 1e-8


def test_iterative_vector_is_deflated_eigenvector():
    g = cayley_graph(catalog_generators("gamma2-legendre", ell=7))
    rep, y = lambda1_iterative(g, return_vector=True)
    assert abs(y.sum()) / math.sqrt(g.n) < 1e-10
    lap = g.laplacian_dense()
    rayleigh = float(y @ lap @ y) / float(y @ y)
    assert rayleigh == pytest.approx(rep.lambda1, abs=1e-9)
    assert np.linalg.norm(lap @ y - rep.lambda1 * y) <= 1e-8


def test_iterative_is_deterministic():
    g = schreier_graph(catalog_generators("sl2-elementary", ell=31), GroupAction("nonzero-vectors"))
    a, b = lambda1_iterative(g), lambda1_iterative(g)
    assert a == b


def test_dispatch_by_threshold():
    g = cayley_graph(catalog_generators("sl2-elementary", ell=5))
    assert lambda1(g).method == "dense"
    assert lambda1(g, dense_threshold=50).method == "iterative"
    with pytest.raises(ValueError, match="threshold"):
        lambda1_dense(g, threshold=50)


def test_single_vertex_rejected():
    g = permutation_graph([[0]])
    with pytest.raises(ValueError, match="single-vertex"):
        lambda1_dense(g)


def test_two_triangles_disconnected():
    perm = [1, 2, 0, 4, 5, 3]
    inv = [2, 0, 1, 5, 3, 4]
    g = permutation_graph([perm, inv])
    assert connectivity(g) == (False, 2)
    with pytest.raises(DisconnectedGraphError) as info:
        lambda1(g)
    assert info.value.n_components == 2
    with pytest.raises(DisconnectedGraphError):
        lambda1_iterative(g)


def test_bad_tolerance():
    with pytest.raises(ValueError):
        lambda1_iterative(cyclic_cayley_graph(8, [1]), tol=0)


def test_report_records_loop_convention():
    rep = lambda1(cyclic_cayley_graph(8, [1]))
    assert "loop" in rep.loop_convention and rep.n == 8 and rep.r == 2
