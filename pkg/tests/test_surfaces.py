import itertools
import math
import warnings

import mpmath
import numpy as np
import pytest

from esperantist.algebra import catalog_generators
from esperantist.graphs import GroupAction, cayley_graph, schreier_graph
from esperantist.surfaces import (
    CoverDescriptor,
    compose,
    cover_from_generators,
    genus_from_monodromy,
    gonality_chain,
    hyperbolic_area,
    invert,
    liyau_bound,
    quantitative_gonality,
)


def test_compose_applies_right_argument_first():
    a = np.array([1, 2, 0])
    b = np.array([0, 2, 1])
    assert list(compose(a, b)) == [a[b[i]] for i in range(3)]
    assert list(compose(a, invert(a))) == [0, 1, 2]


def test_s3_three_punctures_is_sphere():
    t1 = [1, 0, 2]     # (0 1)
    t2 = [0, 2, 1]     # (1 2)
    t3 = invert(compose(t1, t2))
    cd = CoverDescriptor(0, 3, 3, [t1, t2, t3])
    res = genus_from_monodromy(cd)
    assert res.genus == 0 and res.chi_open == -3 and res.chi_closed == 2


@pytest.mark.parametrize("g0,p", [(0, 3), (0, 5), (1, 1), (2, 0)])
def test_identity_cover_keeps_base_genus(g0, p):
    cd = CoverDescriptor(g0, p, 1, [[0]] * p, [([0], [0])] * g0)
    assert genus_from_monodromy(cd).genus == g0


def test_relation_and_transitivity_are_checked():
    swap = [1, 0]
    with pytest.raises(ValueError, match="relation"):
        genus_from_monodromy(CoverDescriptor(0, 3, 2, [swap, swap, swap]))
    with pytest.raises(ValueError, match="transitive"):
        genus_from_monodromy(CoverDescriptor(0, 3, 2, [[0, 1]] * 3))
    with pytest.raises(ValueError, match="hyperbolic"):
        CoverDescriptor(0, 2, 2, [swap, swap])
    with pytest.raises(ValueError, match="permutations"):
        CoverDescriptor(0, 3, 2, [[0, 0], swap, swap])


def _sl2_elements(ell):
    return [m for m in itertools.product(range(ell), repeat=4)
            if (m[0] * m[3] - m[1] * m[2]) % ell == 1]


def _mul(x, y, ell):
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % ell, (a * f + b * h) % ell,
            (c * e + d * g) % ell, (c * f + d * h) % ell)


def legendre_genus_oracle(ell):
    """Genus of the level-ell Legendre cover by walking cycles of
    x -> A x, x -> B x and x -> (AB)^-1 x on SL2(F_ell)."""
    elems = _sl2_elements(ell)
    a = (1, 2, 0, 1)
    b = (1, 0, 2, 1)
    ab = _mul(a, b, ell)
    # (AB)^-1 for a det-1 matrix [[p,q],[r,s]] is [[s,-q],[-r,p]]
    ab_inv = (ab[3], -ab[1] % ell, -ab[2] % ell, ab[0])
    cycles = 0
    for g in (a, b, ab_inv):
        seen = set()
        for x in elems:
            if x in seen:
                continue
            cycles += 1
            y = x
            while y not in seen:
                seen.add(y)
                y = _mul(g, y, ell)
    chi = -len(elems) + cycles
    return (2 - chi) // 2


@pytest.mark.parametrize("ell", [3, 5])
def test_legendre_cover_matches_oracle(ell):
    g = cayley_graph(catalog_generators("gamma2-legendre", ell=ell))
    assert genus_from_monodromy(cover_from_generators(g.nbr)).genus == legendre_genus_oracle(ell)


def test_legendre_cover_values():
    got = [genus_from_monodromy(cover_from_generators(
        cayley_graph(catalog_generators("gamma2-legendre", ell=ell)).nbr)).genus for ell in (3, 5, 7)]
    assert got == [2, 27, 65]


@pytest.mark.parametrize("ell", [5, 7, 11])
def test_genus_monotone_under_refinement(ell):
    gens = catalog_generators("gamma2-legendre", ell=ell)
    full = genus_from_monodromy(cover_from_generators(cayley_graph(gens).nbr))
    line = genus_from_monodromy(cover_from_generators(
        schreier_graph(gens, GroupAction("projective-line")).nbr))
    assert line.genus <= full.genus


def test_area_and_liyau():
    assert hyperbolic_area(-3) == pytest.approx(6 * math.pi)
    with pytest.raises(ValueError):
        hyperbolic_area(0)
    assert liyau_bound(0.2, 8 * math.pi) == pytest.approx(0.2)
    with pytest.warns(UserWarning, match="1/4"):
        liyau_bound(0.3, 1.0)


def test_quantitative_gonality_golden():
    mpmath.mp.dps = 30
    expected = mpmath.mpf("0.1") * 1000 / mpmath.log(2000) ** 2
    assert quantitative_gonality(1000, 0.1, 1.0) == pytest.approx(float(expected), rel=1e-14)
    with pytest.raises(ValueError):
        quantitative_gonality(0, 0.1, 1.0)


def test_chain_values_and_audit():
    cert = gonality_chain(0.5, 2.0, 10, n=100, chi_open=-100, c_prime=0.01, A=1.0)
    assert cert.lambda1_surface == 1.0
    assert cert.genus_gonality == pytest.approx(18.0)
    assert cert.area == pytest.approx(200 * math.pi)
    assert cert.liyau_gonality == pytest.approx(25.0)
    assert cert.verify()
    assert [row[0] for row in cert.audit] == ["lambda1_surface", "genus_gonality", "area",
                                              "liyau_gonality", "quant_gonality"]
    assert "c_B" in cert.assumptions[0]
    assert cert.conventions["log_base"] == "natural"


def test_chain_vacuous_for_small_genus():
    cert = gonality_chain(0.5, 1.0, 1)
    assert cert.vacuous and cert.genus_gonality == 0.0 and cert.verify()


def test_chain_rejects_bad_inputs():
    with pytest.raises(ValueError):
        gonality_chain(0.5, 0.0, 3)
    with pytest.raises(ValueError):
        gonality_chain(-0.1, 1.0, 3)


def test_tampered_certificate_fails_replay():
    cert = gonality_chain(0.5, 1.0, 10, n=100, chi_open=-50)
    cert.genus_gonality *= 1 + 1e-9
    assert not cert.verify()


def test_chain_does_not_warn_above_quarter():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gonality_chain(1.2, 1.0, 5, chi_open=-10)
