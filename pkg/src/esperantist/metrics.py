"""Graph diameters, the graph-side inequalities, and family-level fits.

Logarithms are natural throughout; every fit report records this.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import DisconnectedGraphError
from .graphs import RegularMultigraph

DEFAULT_A_GRID = tuple(0.5 * i for i in range(13))
EXACT_DIAMETER_LIMIT = 100_000
LOG_BASE = "natural"


@dataclass(frozen=True)
class DiameterBracket:
    lower: int
    upper: Optional[int]

    @property
    def exact(self) -> bool:
        return self.upper is not None and self.lower == self.upper


def eccentricity(g: RegularMultigraph, source: int) -> int:
    dist = _kernels.bfs_distances(g.nbr, source)
    if (dist < 0).any():
        raise DisconnectedGraphError(g.n_components)
    return int(dist.max())


def diameter_bracket(g: RegularMultigraph, samples: int = 16) -> DiameterBracket:
    """Certified bracket on the diameter from a few BFS sweeps.

    The lower end is the largest eccentricity seen (double sweep from each
    sampled source); the upper end is twice the smallest eccentricity seen.
    """
    if not g.connected:
        raise DisconnectedGraphError(g.n_components)
    sources = np.unique(np.linspace(0, g.n - 1, min(samples, g.n)).astype(np.int64))
    lower, best = 0, None
    for s in sources:
        dist = _kernels.bfs_distances(g.nbr, int(s))
        ecc = int(dist.max())
        far = int(dist.argmax())
        lower = max(lower, ecc, eccentricity(g, far))
        best = ecc if best is None else min(best, ecc)
    return DiameterBracket(lower, min(2 * best, g.n - 1))


def diameter(g: RegularMultigraph) -> int:
    """Exact diameter.

    Vertex-transitive graphs need a single BFS; other graphs take the
    maximum eccentricity over all vertices (up to EXACT_DIAMETER_LIMIT
    vertices, beyond which use :func:`diameter_bracket`).
    """
    if not g.connected:
        raise DisconnectedGraphError(g.n_components)
    if g.vertex_transitive:
        return eccentricity(g, 0)
    if g.n > EXACT_DIAMETER_LIMIT:
        raise ValueError(
            f"n={g.n} is above the exact all-sources limit; use diameter_bracket")
    return max(eccentricity(g, s) for s in range(g.n))


def dsc_check(lambda1, r: int, diam, tol: float = 1e-12) -> tuple:
    """Check lambda1 >= 1 / (r * diam^2).

    ``lambda1`` may be a float or a converged SpectralReport. ``diam`` must
    be exact or carry an upper bound: the bound shrinks as diam grows, so
    only an upper bound on the diameter gives a valid comparison.

    Returns:
        (bound, passed)
    """
    if hasattr(lambda1, "lambda1"):
        if not getattr(lambda1, "converged", True):
            raise ValueError("spectral report did not converge")
        lambda1 = lambda1.lambda1
    if isinstance(diam, DiameterBracket):
        if diam.upper is None:
            raise ValueError("a diameter bracket without an upper bound cannot be used")
        diam = diam.upper
    if diam < 1 or r < 1:
        raise ValueError("diam and r must be positive")
    bound = 1.0 / (r * diam * diam)
    return bound, bool(lambda1 + tol >= bound)


def interlacing_check(parent_lambda1: float, quotient_lambda1: float, tol: float = 1e-8,
                      parent_graph: RegularMultigraph | None = None,
                      quotient_graph: RegularMultigraph | None = None) -> bool:
    """Quotient spectral gap is at least the parent's (up to ``tol``).

    When both graphs are given they must come from the same generator set.
    """
    if parent_graph is not None and quotient_graph is not None:
        if parent_graph.generator_fingerprint != quotient_graph.generator_fingerprint:
            raise ValueError("parent and quotient graphs use different generator sets")
    return bool(quotient_lambda1 >= parent_lambda1 - tol)


@dataclass
class FamilyMember:
    index: int
    n: int
    lambda1: float
    diameter: Optional[int] = None
    genus: Optional[int] = None


@dataclass
class FamilyRecord:
    family_id: str
    members: list = field(default_factory=list)

    def sizes_increasing(self) -> bool:
        ns = [m.n for m in self.members]
        return all(a < b for a, b in zip(ns, ns[1:]))


@dataclass
class EsperantistFit:
    A: float
    c: float
    trend_ok: bool
    witnesses: dict
    expander_c: float
    grid: tuple
    log_base: str = LOG_BASE
    note: str = "trend heuristic diagnosis, not a proof"

    def as_dict(self) -> dict:
        out = asdict(self)
        out["witnesses"] = {str(k): v for k, v in self.witnesses.items()}
        return out


def _witnesses(members, A):
    return [m.lambda1 * math.log(2 * m.n) ** A for m in members]


def _non_decreasing(seq, rtol=1e-9):
    return all(b >= a * (1 - rtol) for a, b in zip(seq, seq[1:]))


def esperantist_fit(fam: FamilyRecord, A_grid=DEFAULT_A_GRID) -> EsperantistFit:
    """Fit lambda1 >= c / (log 2n)^A on a grid of exponents.

    For each A the constant c(A) is the minimum witness lambda1 (log 2n)^A.
    The smallest A whose witnesses are non-decreasing along the family is
    returned; if none is, the largest grid value is returned with
    ``trend_ok=False``.
    """
    members = fam.members
    if len(members) < 3:
        raise ValueError("esperantist_fit needs at least 3 members")
    if any(not (m.lambda1 > 0) for m in members):
        raise ValueError("every member must have lambda1 > 0")
    grid = tuple(sorted(float(a) for a in A_grid))
    table = {A: _witnesses(members, A) for A in grid}
    chosen = next((A for A in grid if _non_decreasing(table[A])), None)
    trend_ok = chosen is not None
    if chosen is None:
        chosen = grid[-1]
    expander_c = min(_witnesses(members, 0.0))
    return EsperantistFit(chosen, min(table[chosen]), trend_ok, table, expander_c, grid)


@dataclass
class KelnerReport:
    ratios: list
    spread: Optional[float]
    bounded: Optional[bool]
    slack: float
    note: str = ("ratio uses the declared generator set; the embedded-graph "
                 "generator set of the genus argument may change the constant")


def kelner_ratio(fam: FamilyRecord, slack: float = 10.0) -> KelnerReport:
    """Per-member lambda1 * n / max(genus, 1), with a spread check max/min <= slack."""
    if any(m.genus is None for m in fam.members):
        raise ValueError("kelner_ratio needs the genus of every member")
    ratios = [m.lambda1 * m.n / max(m.genus, 1) for m in fam.members]
    if len(ratios) < 2:
        return KelnerReport(ratios, None, None, slack)
    spread = max(ratios) / min(ratios)
    return KelnerReport(ratios, spread, spread <= slack, slack)


def diameter_growth(fam: FamilyRecord, powers=(1, 2, 3)) -> dict:
    """diam / (log n)^p per member for each p."""
    out = {}
    for p in powers:
        out[p] = [m.diameter / math.log(m.n) ** p if m.diameter is not None and m.n > 1 else None
                  for m in fam.members]
    return out
