"""Genus of covers from permutation monodromy, hyperbolic area, and the
gonality bound chain.

Permutations are image arrays on {0..n-1} and compose right to left:
``compose(a, b)`` applies ``b`` first. For a base of genus g0 with p
punctures the monodromy must satisfy

    [a_1, b_1] ... [a_g0, b_g0] s_1 s_2 ... s_p = 1,   [a, b] = a b a^-1 b^-1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import _kernels

LOG_BASE = "natural"
PERMUTATION_CONVENTION = "right-to-left: compose(a, b) applies b first"
FORMULA_VERSION = 1
BURGER_BANNER = "c_B is an assumed comparison constant (existence only), not computed"


def compose(a, b) -> np.ndarray:
    return np.asarray(a)[np.asarray(b)]


def invert(a) -> np.ndarray:
    a = np.asarray(a)
    out = np.empty_like(a)
    out[a] = np.arange(a.shape[0])
    return out


def commutator(a, b) -> np.ndarray:
    return compose(compose(a, b), compose(invert(a), invert(b)))


@dataclass
class CoverDescriptor:
    """Degree-n cover of a genus-g0 surface with p punctures."""

    base_genus: int
    punctures: int
    degree: int
    monodromy: list
    handles: list = field(default_factory=list)

    def __post_init__(self):
        if self.base_genus < 0 or self.punctures < 0:
            raise ValueError("base genus and puncture count must be nonnegative")
        if 2 - 2 * self.base_genus - self.punctures >= 0:
            raise ValueError("base surface is not hyperbolic (needs 2 - 2 g0 - p < 0)")
        if len(self.monodromy) != self.punctures:
            raise ValueError("need one monodromy permutation per puncture")
        if len(self.handles) != self.base_genus:
            raise ValueError("need one (a, b) permutation pair per handle")
        self.monodromy = [np.asarray(s, dtype=np.int64) for s in self.monodromy]
        self.handles = [(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
                        for a, b in self.handles]
        ident = np.arange(self.degree)
        for p in self._all_perms():
            if p.shape != (self.degree,) or not np.array_equal(np.sort(p), ident):
                raise ValueError("monodromy entries must be permutations of the fibre")

    def _all_perms(self):
        out = list(self.monodromy)
        for a, b in self.handles:
            out += [a, b]
        return out

    @property
    def base_euler_characteristic(self) -> int:
        return 2 - 2 * self.base_genus - self.punctures

    def relation_holds(self) -> bool:
        total = np.arange(self.degree)
        for a, b in self.handles:
            total = compose(total, commutator(a, b))
        for s in self.monodromy:
            total = compose(total, s)
        return bool(np.array_equal(total, np.arange(self.degree)))

    def is_transitive(self) -> bool:
        perms = self._all_perms()
        if self.degree == 1:
            return True
        table = np.stack(perms + [invert(p) for p in perms], axis=1)
        return len(_kernels.bfs_order(table, 0)) == self.degree


@dataclass(frozen=True)
class GenusResult:
    genus: int
    chi_open: int
    chi_closed: int


def genus_from_monodromy(cd: CoverDescriptor) -> GenusResult:
    """Riemann-Hurwitz: chi(C) = n chi(U) + sum over punctures of #cycles."""
    if not cd.is_transitive():
        raise ValueError("monodromy is not transitive: the cover is disconnected")
    if not cd.relation_holds():
        raise ValueError("monodromy violates the surface-group relation")
    chi_open = cd.degree * cd.base_euler_characteristic
    chi_closed = chi_open + sum(_kernels.count_cycles(s) for s in cd.monodromy)
    if chi_closed % 2 or chi_closed > 2:
        raise ArithmeticError(f"inconsistent Euler characteristic {chi_closed}")
    return GenusResult((2 - chi_closed) // 2, chi_open, chi_closed)


def cover_from_generators(nbr, generator_indices=(0, 1)) -> CoverDescriptor:
    """Cover of the sphere minus len(indices)+1 points from a graph's action.

    Puncture i has the monodromy of generator ``generator_indices[i]``
    (column of the neighbour table); the last puncture gets the inverse of
    their product so the relation holds.
    """
    nbr = np.asarray(nbr)
    sigmas = [nbr[:, i].copy() for i in generator_indices]
    prod = np.arange(nbr.shape[0])
    for s in sigmas:
        prod = compose(prod, s)
    sigmas.append(invert(prod))
    return CoverDescriptor(0, len(sigmas), nbr.shape[0], sigmas)


def hyperbolic_area(chi: int) -> float:
    """Gauss-Bonnet area -2 pi chi of a finite-type hyperbolic surface."""
    if chi >= 0:
        raise ValueError(f"chi={chi} is not negative: surface is not hyperbolic")
    return -2.0 * math.pi * chi


def liyau_bound(lambda1_surface: float, area: float) -> float:
    """Gonality lower bound lambda1 * area / (8 pi)."""
    if lambda1_surface <= 0 or area <= 0:
        raise ValueError("lambda1 and area must be positive")
    if lambda1_surface > 0.25:
        warnings.warn("surface lambda1 above 1/4; the bottom of the spectrum is capped at 1/4",
                      stacklevel=2)
    return lambda1_surface * area / (8.0 * math.pi)


def quantitative_gonality(n: int, c_prime: float, A: float) -> float:
    """c' n / (log 2n)^(2A), natural log."""
    if n < 1 or c_prime <= 0 or A < 0:
        raise ValueError("need n >= 1, c' > 0, A >= 0")
    return c_prime * n / math.log(2 * n) ** (2 * A)


@dataclass
class GonalityCertificate:
    graph_lambda1: float
    c_B: float
    genus: int
    n: Optional[int] = None
    chi_open: Optional[int] = None
    c_prime: Optional[float] = None
    A: Optional[float] = None
    lambda1_surface: float = 0.0
    area: Optional[float] = None
    liyau_gonality: Optional[float] = None
    genus_gonality: float = 0.0
    quant_gonality: Optional[float] = None
    vacuous: bool = False
    audit: list = field(default_factory=list)
    assumptions: tuple = (BURGER_BANNER,)
    conventions: dict = field(default_factory=lambda: {
        "log_base": LOG_BASE,
        "permutation": PERMUTATION_CONVENTION,
        "formula_version": FORMULA_VERSION,
    })

    def as_dict(self) -> dict:
        out = asdict(self)
        out["assumptions"] = list(self.assumptions)
        return out

    def replay(self) -> dict:
        """Recompute every derived value along a different association order."""
        out = {"lambda1_surface": self.graph_lambda1 * self.c_B}
        out["genus_gonality"] = (
            0.0 if self.genus < 2 else (self.genus - 1) * self.graph_lambda1 * (self.c_B * 2))
        if self.chi_open is not None:
            out["area"] = 2.0 * (-self.chi_open) * math.pi
            out["liyau_gonality"] = (-self.chi_open / 4.0) * self.c_B * self.graph_lambda1
        if self.c_prime is not None and self.n is not None:
            out["quant_gonality"] = math.exp(
                math.log(self.c_prime) + math.log(self.n)
                - 2 * self.A * math.log(math.log(2 * self.n)))
        return out

    def verify(self, rtol: float = 1e-12) -> bool:
        for key, val in self.replay().items():
            mine = getattr(self, key)
            if not math.isclose(mine, val, rel_tol=rtol, abs_tol=0.0 if val else 1e-300):
                return False
        return True


def gonality_chain(graph_lambda1: float, c_B: float, genus: int, n: int | None = None,
                   chi_open: int | None = None, c_prime: float | None = None,
                   A: float | None = None) -> GonalityCertificate:
    """Gonality lower bounds from a graph spectral gap.

    The surface eigenvalue is taken as c_B * lambda1(graph); c_B is an
    assumption recorded in the certificate. The genus bound is
    2 lambda1(surface) (genus - 1), flagged vacuous for genus <= 1. With the
    open Euler characteristic, the area bound lambda1(surface) mu / (8 pi)
    is added; with a fitted (c', A) and n, the size bound c' n / (log 2n)^2A.
    """
    if c_B <= 0:
        raise ValueError("c_B must be positive")
    if graph_lambda1 < 0:
        raise ValueError("graph lambda1 must be nonnegative")
    if c_prime is not None and A is None:
        A = 0.0
    cert = GonalityCertificate(graph_lambda1, c_B, genus, n, chi_open, c_prime, A)
    lam_s = c_B * graph_lambda1
    cert.lambda1_surface = lam_s
    cert.audit.append(("lambda1_surface", "c_B * lambda1_graph", lam_s))
    if genus < 2:
        cert.vacuous = True
        cert.genus_gonality = 0.0
    else:
        cert.genus_gonality = 2.0 * lam_s * (genus - 1)
    cert.audit.append(("genus_gonality", "2 * lambda1_surface * (genus - 1)", cert.genus_gonality))
    if chi_open is not None:
        cert.area = hyperbolic_area(chi_open)
        cert.audit.append(("area", "-2 pi chi_open", cert.area))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cert.liyau_gonality = (lam_s * cert.area / (8.0 * math.pi)) if lam_s > 0 else 0.0
        cert.audit.append(("liyau_gonality", "lambda1_surface * area / (8 pi)",
                           cert.liyau_gonality))
    if c_prime is not None and n is not None:
        cert.quant_gonality = quantitative_gonality(n, c_prime, A)
        cert.audit.append(("quant_gonality", "c' n / (log 2n)^(2A)", cert.quant_gonality))
    return cert


def genus_growth(sizes, genera, A: float) -> list:
    """genus * (log 2n)^A / n per member; bounded below along a family
    whose graphs satisfy the spectral-gap lower bound with exponent A."""
    return [g * math.log(2 * n) ** A / n for n, g in zip(sizes, genera)]
