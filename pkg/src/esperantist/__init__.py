"""Spectral gaps of congruence-quotient Cayley and Schreier graphs, and the
genus and gonality lower bounds they imply for the covering curves."""

__version__ = "0.1.0"

from ._kernels import BACKEND  # noqa: E402
from .algebra import (  # noqa: E402
    GeneratorSet,
    GroupTable,
    MatrixModP,
    catalog_generators,
    enumerate_group,
    is_perfect,
    plus_subgroup,
    quotient_index_prime_to_ell,
    symmetrize,
)
from .graphs import (  # noqa: E402
    GroupAction,
    RegularMultigraph,
    cayley_graph,
    laplacian_apply,
    schreier_graph,
)
from .spectral import SpectralReport, connectivity, lambda1_dense, lambda1_iterative  # noqa: E402

__all__ = [
    "BACKEND",
    "GeneratorSet",
    "GroupAction",
    "GroupTable",
    "MatrixModP",
    "RegularMultigraph",
    "SpectralReport",
    "catalog_generators",
    "cayley_graph",
    "connectivity",
    "enumerate_group",
    "is_perfect",
    "lambda1_dense",
    "lambda1_iterative",
    "laplacian_apply",
    "plus_subgroup",
    "quotient_index_prime_to_ell",
    "schreier_graph",
    "symmetrize",
]
