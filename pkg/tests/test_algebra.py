import itertools

import numpy as np
import pytest

from esperantist.algebra import (
    GeneratorSet,
    MatrixModP,
    catalog_generators,
    closure,
    derived_subgroup,
    enumerate_group,
    is_perfect,
    is_prime,
    order_ell_mask,
    plus_subgroup,
    quotient_index_prime_to_ell,
    symmetrize,
    symplectic_form,
)
from esperantist.errors import CapExceededError, SingularMatrixError


def brute_sl2(ell):
    """All 2x2 matrices over F_ell with determinant 1, by exhaustion."""
    return {(a, b, c, d) for a, b, c, d in itertools.product(range(ell), repeat=4)
            if (a * d - b * c) % ell == 1}


def _mul(x, y, ell):
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % ell, (a * f + b * h) % ell,
            (c * e + d * g) % ell, (c * f + d * h) % ell)


def _inv(x, ell):
    a, b, c, d = x
    det_inv = pow(a * d - b * c, -1, ell)
    return tuple(v * det_inv % ell for v in (d, -b, -c, a))


def brute_closure(gens, ell):
    seen = {(1, 0, 0, 1)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _mul(g, x, ell)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


@pytest.mark.parametrize("ell", [3, 5, 7])
def test_sl2_matches_brute_force(ell):
    table = enumerate_group(catalog_generators("sl2-elementary", ell=ell))
    got = {tuple(int(v) for v in e.ravel()) for e in table.elements}
    assert got == brute_sl2(ell)


@pytest.mark.parametrize("ell", [2, 3, 5, 7, 11, 13])
def test_sl2_order_formula(ell):
    assert len(enumerate_group(catalog_generators("sl2-elementary", ell=ell))) == ell * (ell**2 - 1)


def test_identity_first_and_table_consistent():
    table = enumerate_group(catalog_generators("gamma2-legendre", ell=5))
    assert table.element(0).is_identity()
    for s, g in enumerate(table.generators):
        for i in (0, 7, 50):
            assert table.element(int(table.nbr[i, s])) == g @ table.element(i)


def test_matrix_arithmetic():
    a = MatrixModP.from_rows([[2, 3], [1, 4]], 7)
    assert a.det() == (8 - 3) % 7
    assert (a @ a.inverse()).is_identity()
    assert a**0 == MatrixModP.identity(2, 7)
    assert a**3 == a @ a @ a
    assert (a**-1) == a.inverse()
    with pytest.raises(ValueError):
        MatrixModP.from_rows([[1, 2], [3, 4]], 9)


def test_singular_matrix_rejected():
    with pytest.raises(SingularMatrixError):
        symmetrize([MatrixModP.from_rows([[1, 0], [0, 1]], 5), MatrixModP.from_rows([[1, 2], [2, 4]], 5)])


def test_symmetrize_appends_inverses_in_order():
    a = MatrixModP.from_rows([[1, 1], [0, 1]], 5)
    b = MatrixModP.from_rows([[1, 0], [1, 1]], 5)
    s = symmetrize([a, b, a])
    assert list(s) == [a, b, a.inverse(), b.inverse()]


def test_symmetrize_self_inverse_kept_once():
    w = MatrixModP.from_rows([[0, 1], [4, 0]], 5)
    assert w.inverse() != w  # order 4, inverse is -w
    s = symmetrize([w])
    assert len(s) == 2
    inv = MatrixModP.from_rows([[0, 4], [1, 0]], 5)
    assert list(s) == [w, inv]
    minus_one = MatrixModP.from_rows([[4, 0], [0, 4]], 5)
    assert list(symmetrize([minus_one])) == [minus_one]


def test_generator_set_validation():
    a = MatrixModP.from_rows([[1, 1], [0, 1]], 5)
    with pytest.raises(ValueError, match="inverse"):
        GeneratorSet((a,))
    with pytest.raises(ValueError, match="empty"):
        GeneratorSet(())
    with pytest.raises(ValueError, match="mixed moduli"):
        symmetrize([a, MatrixModP.from_rows([[1, 1], [0, 1]], 7)])
    with pytest.raises(ValueError, match="mixed dimensions"):
        symmetrize([a, MatrixModP.identity(3, 5)])


def test_cap_exceeded_reports_partial_size():
    with pytest.raises(CapExceededError) as info:
        enumerate_group(catalog_generators("sl2-elementary", ell=11), cap=100)
    assert info.value.partial_size <= 100 and info.value.cap == 100


def brute_derived(elements, ell):
    comms = {_mul(_mul(x, y, ell), _mul(_inv(x, ell), _inv(y, ell), ell), ell)
             for x in elements for y in elements}
    return brute_closure(comms, ell)


@pytest.mark.parametrize("ell", [2, 3, 5])
def test_perfect_matches_commutator_oracle(ell):
    table = enumerate_group(catalog_generators("sl2-elementary", ell=ell))
    elems = [tuple(int(v) for v in e.ravel()) for e in table.elements]
    oracle = brute_derived(elems, ell)
    assert len(derived_subgroup(table)) == len(oracle)
    assert is_perfect(table) == (len(oracle) == len(elems))


@pytest.mark.parametrize("ell,expected", [(2, False), (3, False), (5, True), (7, True)])
def test_is_perfect_small(ell, expected):
    assert is_perfect(enumerate_group(catalog_generators("sl2-elementary", ell=ell))) is expected


def test_derived_subgroup_of_sl2_f3_is_quaternion():
    table = enumerate_group(catalog_generators("sl2-elementary", ell=3))
    assert len(derived_subgroup(table)) == 8


@pytest.mark.parametrize("ell", [5, 7])
def test_plus_subgroup_full_and_idempotent(ell):
    table = enumerate_group(catalog_generators("sl2-elementary", ell=ell))
    plus = plus_subgroup(table, ell)
    assert len(plus) == len(table)
    assert len(plus_subgroup(plus, ell)) == len(plus)


def test_order_ell_mask_counts_unipotents():
    # SL2(F_ell) has ell^2 - 1 nontrivial unipotents, all of order ell
    table = enumerate_group(catalog_generators("sl2-elementary", ell=7))
    assert int(order_ell_mask(table, 7).sum()) == 48


def test_plus_subgroup_of_diagonal_torus_is_trivial():
    d = MatrixModP.from_rows([[2, 0], [0, 3]], 5)
    torus = closure([d])
    assert len(plus_subgroup(torus, 5)) == 1
    assert quotient_index_prime_to_ell(torus, 5)


def test_plus_rejects_small_ell():
    e = np.eye(4, dtype=np.int64)
    e[0, 3] = 1
    table = closure([MatrixModP.from_array(e, 2)])
    with pytest.raises(ValueError, match="dim-1"):
        plus_subgroup(table, 2)
    with pytest.raises(ValueError, match="modulus"):
        plus_subgroup(table, 3)


def test_catalog_examples():
    g = catalog_generators("gamma2-legendre", ell=5)
    assert len(g) == 4 and g.label == "gamma2-legendre"
    assert len(enumerate_group(g)) == 120
    prod = catalog_generators("product-sl2-diagonal-test", ell=5)
    assert prod.dim == 4 and len(prod) == 6
    sp = catalog_generators("sp2g-level2-transvections", ell=3, g=2)
    j = symplectic_form(2)
    for x in sp:
        assert np.array_equal((x.array.T @ j @ x.array - j) % 3, np.zeros((4, 4)))
    custom = catalog_generators("custom", ell=7, matrices=[[[1, 3], [0, 1]]])
    assert len(custom) == 2


def test_sp4_f3_order():
    gens = catalog_generators("sp2g-level2-transvections", ell=3, g=2)
    assert len(enumerate_group(gens)) == 51840


@pytest.mark.parametrize("kind,params,match", [
    ("gamma2-legendre", {"ell": 2}, "odd"),
    ("sl2-elementary", {"ell": 9}, "prime"),
    ("custom", {"ell": 5}, "nonempty"),
    ("custom", {"ell": 5, "matrices": [[[1, 2]]]}, "malformed"),
    ("nope", {"ell": 5}, "unknown"),
])
def test_catalog_errors(kind, params, match):
    with pytest.raises(ValueError, match=match):
        catalog_generators(kind, **params)


def test_is_prime():
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
