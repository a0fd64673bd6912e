"""Randomised invariants over generator sets and graphs."""

import itertools

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from esperantist.algebra import MatrixModP, closure, quotient_index_prime_to_ell, symmetrize
from esperantist.graphs import GroupAction, cayley_graph, cyclic_cayley_graph, orbit_sizes, schreier_graph
from esperantist.metrics import diameter, dsc_check, interlacing_check
from esperantist.spectral import lambda1_dense, lambda1_iterative
from esperantist.surfaces import compose

PRIMES = st.sampled_from([3, 5, 7])


def _gl2(ell):
    return [MatrixModP.from_rows([[a, b], [c, d]], ell)
            for a, b, c, d in itertools.product(range(ell), repeat=4) if (a * d - b * c) % ell]


GL2 = {ell: _gl2(ell) for ell in (3, 5, 7)}


@st.composite
def generator_lists(draw):
    ell = draw(PRIMES)
    k = draw(st.integers(1, 3))
    return ell, [draw(st.sampled_from(GL2[ell])) for _ in range(k)]


PROPS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@PROPS
@given(generator_lists())
def test_symmetrize_is_closed_under_inverse(data):
    _, mats = data
    s = symmetrize(mats)
    members = set(s)
    assert all(g.inverse() in members for g in s)
    assert list(s)[: len(dict.fromkeys(mats))] == list(dict.fromkeys(mats))


@PROPS
@given(generator_lists(), st.data())
def test_closure_is_closed_under_products(data, draw):
    ell, mats = data
    table = closure(mats)
    n = len(table)
    for _ in range(10):
        i = draw.draw(st.integers(0, n - 1))
        j = draw.draw(st.integers(0, n - 1))
        assert table.element(i) @ table.element(j) in table
    assert (ell * (ell - 1) ** 2 * (ell + 1)) % n == 0  # Lagrange inside GL2


@PROPS
@given(generator_lists())
def test_quotient_index_prime_to_ell(data):
    ell, mats = data
    assert quotient_index_prime_to_ell(closure(mats), ell)


@PROPS
@given(generator_lists(), st.sampled_from(["projective-line", "nonzero-vectors"]))
def test_orbits_partition_the_point_set(data, kind):
    ell, mats = data
    sizes = orbit_sizes(symmetrize(mats), kind)
    assert sum(sizes) == (ell + 1 if kind == "projective-line" else ell**2 - 1)


@PROPS
@given(generator_lists())
def test_cayley_laplacian_is_symmetric_with_zero_rows(data):
    _, mats = data
    g = cayley_graph(symmetrize(mats))
    assert g.is_symmetric() and g.connected
    assert not g.laplacian_row_sums().any()


@PROPS
@given(generator_lists())
def test_quotient_gap_dominates_parent(data):
    _, mats = data
    gens = symmetrize(mats)
    parent = cayley_graph(gens)
    quot = schreier_graph(gens, GroupAction("projective-line"))
    if parent.n < 2 or quot.n < 2:
        return
    assert interlacing_check(lambda1_dense(parent).lambda1, lambda1_dense(quot).lambda1, 1e-8,
                             parent, quot)


@PROPS
@given(st.integers(3, 80), st.lists(st.integers(1, 40), min_size=1, max_size=3))
def test_circulant_dsc_and_solvers(n, steps):
    g = cyclic_cayley_graph(n, steps)
    if not g.connected:
        return
    dense = lambda1_dense(g).lambda1
    k = np.arange(n)
    sym = sorted({s % n for s in steps} | {(-s) % n for s in steps})
    exact = min(sum(1 - np.cos(2 * np.pi * j * s / n) for s in sym) for j in k[1:])
    assert abs(dense - exact) < 1e-9
    assert abs(lambda1_iterative(g).lambda1 - dense) < 1e-8
    _, ok = dsc_check(dense, g.r, diameter(g))
    assert ok


@PROPS
@given(st.permutations(list(range(7))), st.permutations(list(range(7))))
def test_compose_is_associative(a, b):
    c = list(reversed(range(7)))
    assert np.array_equal(compose(compose(a, b), c), compose(a, compose(b, c)))
