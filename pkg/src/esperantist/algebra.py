"""Exact matrix groups over prime fields.

Matrices are stored in canonical form: a row-major tuple of residues in
``[0, ell)``. Groups are enumerated by breadth-first closure under left
multiplication, and that discovery order fixes every downstream vertex
numbering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import CapExceededError, SingularMatrixError

DEFAULT_CAP = 2_000_000

CATALOG_KINDS = (
    "sl2-elementary",
    "gamma2-legendre",
    "sp2g-level2-transvections",
    "product-sl2-diagonal-test",
    "custom",
)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class MatrixModP:
    """Square matrix over F_ell in canonical (reduced, row-major) form."""

    dim: int
    modulus: int
    entries: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not is_prime(self.modulus):
            raise ValueError(f"modulus {self.modulus} is not prime")
        if len(self.entries) != self.dim * self.dim:
            raise ValueError("entry count does not match dim")
        reduced = tuple(int(e) % self.modulus for e in self.entries)
        object.__setattr__(self, "entries", reduced)

    @classmethod
    def from_rows(cls, rows, modulus: int) -> "MatrixModP":
        rows = [list(r) for r in rows]
        m = len(rows)
        if any(len(r) != m for r in rows):
            raise ValueError("matrix must be square")
        return cls(m, modulus, tuple(e for r in rows for e in r))

    @classmethod
    def from_array(cls, arr, modulus: int) -> "MatrixModP":
        arr = np.asarray(arr)
        return cls(arr.shape[0], modulus, tuple(int(e) for e in arr.ravel()))

    @classmethod
    def identity(cls, dim: int, modulus: int) -> "MatrixModP":
        return cls.from_array(np.eye(dim, dtype=np.int64), modulus)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.dim, self.dim)

    def rows(self) -> list:
        return self.array.tolist()

    def __matmul__(self, other: "MatrixModP") -> "MatrixModP":
        self._check_compatible(other)
        return MatrixModP.from_array(self.array @ other.array % self.modulus, self.modulus)

    def __pow__(self, e: int) -> "MatrixModP":
        if e < 0:
            return self.inverse() ** (-e)
        result = np.eye(self.dim, dtype=np.int64)
        base = self.array
        while e:
            if e & 1:
                result = result @ base % self.modulus
            base = base @ base % self.modulus
            e >>= 1
        return MatrixModP.from_array(result, self.modulus)

    def _check_compatible(self, other):
        if self.dim != other.dim or self.modulus != other.modulus:
            raise ValueError("matrices differ in dimension or modulus")

    def is_identity(self) -> bool:
        return self == MatrixModP.identity(self.dim, self.modulus)

    def det(self) -> int:
        """Determinant in [0, ell), by Gaussian elimination mod ell."""
        a = [list(r) for r in self.rows()]
        p, m = self.modulus, self.dim
        det = 1
        for c in range(m):
            pivot = next((r for r in range(c, m) if a[r][c] % p), None)
            if pivot is None:
                return 0
            if pivot != c:
                a[c], a[pivot] = a[pivot], a[c]
                det = -det
            det = det * a[c][c] % p
            inv = pow(a[c][c], -1, p)
            for r in range(c + 1, m):
                f = a[r][c] * inv % p
                if f:
                    a[r] = [(x - f * y) % p for x, y in zip(a[r], a[c])]
        return det % p

    def inverse(self) -> "MatrixModP":
        p, m = self.modulus, self.dim
        a = [list(r) + [int(i == j) for j in range(m)] for i, r in enumerate(self.rows())]
        for c in range(m):
            pivot = next((r for r in range(c, m) if a[r][c] % p), None)
            if pivot is None:
                raise ZeroDivisionError("matrix is singular mod %d" % p)
            a[c], a[pivot] = a[pivot], a[c]
            inv = pow(a[c][c], -1, p)
            a[c] = [x * inv % p for x in a[c]]
            for r in range(m):
                if r != c and a[r][c]:
                    f = a[r][c]
                    a[r] = [(x - f * y) % p for x, y in zip(a[r], a[c])]
        return MatrixModP.from_rows([row[m:] for row in a], p)

    def __repr__(self):
        return f"MatrixModP({self.rows()}, mod {self.modulus})"


@dataclass(frozen=True)
class GeneratorSet:
    """Symmetric, duplicate-free list of invertible generators."""

    generators: tuple
    label: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise ValueError("generator set is empty")
        _check_uniform(gens)
        if len(set(gens)) != len(gens):
            raise ValueError("generator set contains duplicates")
        members = set(gens)
        for i, g in enumerate(gens):
            if g.det() == 0:
                raise SingularMatrixError(i)
            if g.inverse() not in members:
                raise ValueError(f"generator {i} has no inverse in the set")

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    @property
    def dim(self) -> int:
        return self.generators[0].dim

    @property
    def modulus(self) -> int:
        return self.generators[0].modulus

    def stack(self) -> np.ndarray:
        """Generators as an int64 array of shape (k, m, m)."""
        return np.stack([g.array for g in self.generators])

    def fingerprint(self) -> str:
        parts = [f"{self.dim}:{self.modulus}"] + [",".join(map(str, g.entries)) for g in self]
        return ";".join(parts)


def _check_uniform(gens: Sequence[MatrixModP]):
    dims = {g.dim for g in gens}
    mods = {g.modulus for g in gens}
    if len(mods) > 1:
        raise ValueError(f"mixed moduli {sorted(mods)}")
    if len(dims) > 1:
        raise ValueError(f"mixed dimensions {sorted(dims)}")


def symmetrize(gens: Iterable[MatrixModP], label: str = "custom", params=None) -> GeneratorSet:
    """Close a generator list under inverses.

    Inputs keep their order (duplicates dropped); inverses that are not
    already present follow, in the order of the matrices they invert.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("generator list is empty")
    _check_uniform(gens)
    for i, g in enumerate(gens):
        if g.det() == 0:
            raise SingularMatrixError(i)
    out = list(dict.fromkeys(gens))
    seen = set(out)
    for g in list(out):
        h = g.inverse()
        if h not in seen:
            seen.add(h)
            out.append(h)
    return GeneratorSet(tuple(out), label, dict(params or {}))


class RowEncoder:
    """Vectorised lookup of flattened points (rows of residues) by content."""

    def __init__(self, rows: np.ndarray, modulus: int):
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        self.modulus = modulus
        self.width = rows.shape[1]
        self._int = modulus**self.width < 2**63
        if self._int:
            self._powers = modulus ** np.arange(self.width - 1, -1, -1, dtype=np.int64)
            codes = rows @ self._powers
            self._order = np.argsort(codes, kind="stable")
            self._sorted = codes[self._order]
        else:
            self._dict = {r.tobytes(): i for i, r in enumerate(rows)}

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        """Indices of ``rows`` in the table, -1 where absent."""
        rows = np.ascontiguousarray(np.asarray(rows, dtype=np.int64).reshape(-1, self.width))
        if self._int:
            codes = rows @ self._powers
            pos = np.searchsorted(self._sorted, codes)
            pos = np.minimum(pos, len(self._sorted) - 1)
            hit = self._sorted[pos] == codes
            return np.where(hit, self._order[pos], -1)
        return np.array([self._dict.get(r.tobytes(), -1) for r in rows], dtype=np.int64)


class GroupTable:
    """Finite matrix group enumerated by BFS from the identity.

    ``elements[i]`` is the i-th discovered element and ``nbr[i, s]`` is the
    index of ``generators[s] @ elements[i]``. The identity sits at index 0.
    Instances are treated as immutable.
    """

    def __init__(self, elements: np.ndarray, nbr: np.ndarray, generators: GeneratorSet):
        self.elements = elements
        self.nbr = nbr
        self.generators = generators
        self.modulus = generators.modulus
        self.dim = generators.dim
        self.elements.setflags(write=False)
        self.nbr.setflags(write=False)

    def __len__(self):
        return self.elements.shape[0]

    @cached_property
    def _encoder(self) -> RowEncoder:
        return RowEncoder(self.elements.reshape(len(self), -1), self.modulus)

    def lookup(self, mats: np.ndarray) -> np.ndarray:
        """Positions of a batch of (m, m) arrays, -1 for non-members."""
        return self._encoder.lookup(np.asarray(mats).reshape(-1, self.dim * self.dim))

    def index(self, g: MatrixModP) -> int:
        pos = int(self.lookup(g.array)[0])
        if pos < 0:
            raise KeyError(g)
        return pos

    def __contains__(self, g: MatrixModP) -> bool:
        return int(self.lookup(g.array)[0]) >= 0

    def element(self, i: int) -> MatrixModP:
        return MatrixModP.from_array(self.elements[i], self.modulus)

    @property
    def order(self) -> int:
        return len(self)

    def __iter__(self):
        return (self.element(i) for i in range(len(self)))

    def is_trivial(self) -> bool:
        return len(self) == 1


def enumerate_group(gens: GeneratorSet, cap: int = DEFAULT_CAP) -> GroupTable:
    """Breadth-first closure of ``gens`` from the identity.

    Raises:
        CapExceededError: the group has more than ``cap`` elements.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if not len(gens):
        raise ValueError("generator list is empty")
    m, ell = gens.dim, gens.modulus
    base = np.eye(m, dtype=np.int64)
    points, nbr, complete = _kernels.orbit_bfs(gens.stack(), None, base, ell, False, cap)
    if not complete:
        raise CapExceededError(points.shape[0], cap)
    return GroupTable(points.reshape(-1, m, m), nbr, gens)


def closure(mats: Sequence[MatrixModP], cap: int = DEFAULT_CAP, label: str = "custom") -> GroupTable:
    """Subgroup generated by an arbitrary list of invertible matrices."""
    return enumerate_group(symmetrize(mats, label), cap)


def _batch_power(x: np.ndarray, e: int, ell: int) -> np.ndarray:
    n, m, _ = x.shape
    result = np.broadcast_to(np.eye(m, dtype=np.int64), x.shape).copy()
    base = x.copy()
    while e:
        if e & 1:
            result = np.matmul(result, base) % ell
        base = np.matmul(base, base) % ell
        e >>= 1
    return result


def order_ell_mask(g: GroupTable, ell: int) -> np.ndarray:
    """Boolean mask of the elements of exact order ``ell`` (ell prime)."""
    m = g.dim
    eye = np.eye(m, dtype=np.int64)
    is_id = (g.elements == eye).all(axis=(1, 2))
    powered = _batch_power(np.asarray(g.elements), ell, ell)
    return (powered == eye).all(axis=(1, 2)) & ~is_id


def _incremental_closure(g: GroupTable, candidates: np.ndarray, label: str) -> GroupTable:
    """Subgroup of ``g`` generated by the elements at ``candidates``.

    Candidates are scanned in table order and only those not yet in the
    running subgroup are kept as generators.
    """
    ell, m = g.modulus, g.dim
    chosen: list = []
    sub = closure([MatrixModP.identity(m, ell)], label=label)
    for idx in candidates:
        x = g.element(int(idx))
        if x in sub:
            continue
        chosen.append(x)
        sub = closure(chosen, cap=len(g), label=label)
        if len(sub) == len(g):
            break
    return sub


def _check_plus_preconditions(g: GroupTable, ell: int):
    if ell != g.modulus:
        raise ValueError(f"ell={ell} does not match group modulus {g.modulus}")
    if ell < g.dim - 1:
        raise ValueError(
            f"ell={ell} < dim-1={g.dim - 1}: order-ell elements need not be exactly "
            "the nontrivial unipotents, so G+ is not determined by this test"
        )


def plus_subgroup(g: GroupTable, ell: int) -> GroupTable:
    """Subgroup generated by the elements of exact order ``ell``."""
    _check_plus_preconditions(g, ell)
    candidates = np.flatnonzero(order_ell_mask(g, ell))
    return _incremental_closure(g, candidates, "plus")


def quotient_index_prime_to_ell(g: GroupTable, ell: int) -> bool:
    plus = plus_subgroup(g, ell)
    return (len(g) // len(plus)) % ell != 0


def commutator(a: MatrixModP, b: MatrixModP) -> MatrixModP:
    return a @ b @ a.inverse() @ b.inverse()


def derived_subgroup(g: GroupTable) -> GroupTable:
    """Commutator subgroup [G, G].

    Computed as the normal closure of the commutators of generator pairs,
    which equals the subgroup generated by all commutators.
    """
    ell, m = g.modulus, g.dim
    gens = list(g.generators)
    ident = MatrixModP.identity(m, ell)
    comms = [c for c in dict.fromkeys(commutator(s, t) for s in gens for t in gens) if c != ident]
    if not comms:
        return closure([ident], label="derived")
    sub_gens = list(comms)
    sub = closure(sub_gens, cap=len(g), label="derived")
    changed = len(sub) < len(g)
    while changed:
        changed = False
        for s in gens:
            s_inv = s.inverse()
            for h in list(sub_gens):
                c = s @ h @ s_inv
                if c not in sub:
                    sub_gens.append(c)
                    sub = closure(sub_gens, cap=len(g), label="derived")
                    changed = len(sub) < len(g)
                    break
            if changed or len(sub) == len(g):
                break
    return sub


def is_perfect(g: GroupTable) -> bool:
    """True iff the group equals its commutator subgroup."""
    if g.is_trivial():
        return True
    return len(derived_subgroup(g)) == len(g)


def generated_by_order_ell(g: GroupTable, ell: int) -> bool:
    return len(plus_subgroup(g, ell)) == len(g)


# --- catalog -----------------------------------------------------------------


def _block_diag(a: MatrixModP, b: MatrixModP) -> MatrixModP:
    m = a.dim
    out = np.zeros((2 * m, 2 * m), dtype=np.int64)
    out[:m, :m] = a.array
    out[m:, m:] = b.array
    return MatrixModP.from_array(out, a.modulus)


def split_block_diag(g: MatrixModP):
    """Inverse of the block-diagonal packing used for product generators."""
    m = g.dim // 2
    arr = g.array
    return (MatrixModP.from_array(arr[:m, :m], g.modulus),
            MatrixModP.from_array(arr[m:, m:], g.modulus))


def symplectic_form(g: int) -> np.ndarray:
    """Standard alternating form [[0, I], [-I, 0]] on Z^{2g}."""
    j = np.zeros((2 * g, 2 * g), dtype=np.int64)
    j[:g, g:] = np.eye(g, dtype=np.int64)
    j[g:, :g] = -np.eye(g, dtype=np.int64)
    return j


def transvection_chain(g: int) -> list:
    """2g integer vectors with <c_i, c_{i+1}> = +-1 and all other pairings 0.

    Order: f_1, e_1, f_1 - f_2, e_2, ..., f_{g-1} - f_g, e_g in the basis
    (e_1..e_g, f_1..f_g).
    """
    def e(i):
        v = np.zeros(2 * g, dtype=np.int64)
        v[i] = 1
        return v

    chain = [e(g), e(0)]
    for j in range(1, g):
        chain.append(e(g + j - 1) - e(g + j))
        chain.append(e(j))
    return chain


def level2_transvection(v: np.ndarray, form: np.ndarray) -> np.ndarray:
    """Integer matrix of x -> x + 2 <x, v> v, the square of the transvection along v."""
    # <x, v> = x^T J v, so the map is I + 2 v (J v)^T
    return np.eye(len(v), dtype=np.int64) + 2 * np.outer(v, form @ v)


def catalog_generators(kind: str, **params) -> GeneratorSet:
    """Named generating sets.

    Kinds and parameters:

    * ``sl2-elementary`` (``ell``): the two elementary transvections.
    * ``gamma2-legendre`` (``ell`` odd): [[1,2],[0,1]] and [[1,0],[2,1]].
    * ``sp2g-level2-transvections`` (``ell`` odd, ``g``): squares of the
      symplectic transvections along a chain of 2g vectors.
    * ``product-sl2-diagonal-test`` (``ell`` odd, optional ``pairs``):
      block-diagonal pairs (a, b) in SL2 x SL2; by default the Legendre
      pairs (A, A), (B, 1), (1, B) of a two-factor Legendre family.
    * ``custom`` (``ell``, ``matrices``): user-supplied matrices.
    """
    ell = params.get("ell")
    if ell is None or not is_prime(int(ell)):
        raise ValueError(f"catalog {kind!r} needs a prime 'ell', got {ell!r}")
    ell = int(ell)
    rec = {"ell": ell}
    if kind == "sl2-elementary":
        gens = [MatrixModP.from_rows([[1, 1], [0, 1]], ell),
                MatrixModP.from_rows([[1, 0], [1, 1]], ell)]
    elif kind == "gamma2-legendre":
        if ell == 2:
            raise ValueError("gamma2-legendre needs odd ell: level-2 matrices are trivial mod 2")
        gens = [MatrixModP.from_rows([[1, 2], [0, 1]], ell),
                MatrixModP.from_rows([[1, 0], [2, 1]], ell)]
    elif kind == "sp2g-level2-transvections":
        if ell == 2:
            raise ValueError("level-2 transvections are trivial mod 2")
        genus = int(params.get("g", 1))
        if genus < 1:
            raise ValueError("g must be >= 1")
        rec["g"] = genus
        form = symplectic_form(genus)
        gens = [MatrixModP.from_array(level2_transvection(v, form), ell)
                for v in transvection_chain(genus)]
    elif kind == "product-sl2-diagonal-test":
        if ell == 2:
            raise ValueError("product-sl2-diagonal-test needs odd ell")
        pairs = params.get("pairs")
        if pairs is None:
            a = [[1, 2], [0, 1]]
            b = [[1, 0], [2, 1]]
            one = [[1, 0], [0, 1]]
            pairs = [(a, a), (b, one), (one, b)]
        else:
            rec["pairs"] = [[list(map(list, x)), list(map(list, y))] for x, y in pairs]
        gens = [_block_diag(MatrixModP.from_rows(x, ell), MatrixModP.from_rows(y, ell))
                for x, y in pairs]
    elif kind == "custom":
        mats = params.get("matrices")
        if not mats:
            raise ValueError("custom catalog needs a nonempty 'matrices' list")
        gens = []
        for i, rows in enumerate(mats):
            try:
                gens.append(MatrixModP.from_rows(rows, ell))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"malformed custom matrix at index {i}: {exc}") from exc
        rec["matrices"] = [list(map(list, r)) for r in mats]
    else:
        raise ValueError(f"unknown catalog kind {kind!r}; expected one of {CATALOG_KINDS}")
    return symmetrize(gens, kind, rec)
