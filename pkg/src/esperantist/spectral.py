"""Smallest nonzero Laplacian eigenvalue of connected regular multigraphs."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import ConvergenceError, DisconnectedGraphError
from .graphs import RegularMultigraph

DENSE_THRESHOLD = 3000
DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 50_000
# scale of the deterministic start vector sin((i + 1) * START_SCALE)
START_SCALE = 0.6180339887498949


@dataclass
class SpectralReport:
    lambda1: float
    method: str
    residual: float
    iterations: int
    tolerance: float
    connected: bool
    n: int = 0
    r: int = 0
    loop_convention: str = ""
    converged: bool = True

    def as_dict(self) -> dict:
        return asdict(self)


def connectivity(g: RegularMultigraph) -> tuple:
    """(connected, number of components) via BFS over the neighbour table."""
    count = g.n_components
    return count == 1, count


def _require_connected(g: RegularMultigraph):
    ok, count = connectivity(g)
    if not ok:
        raise DisconnectedGraphError(count)
    if g.n < 2:
        raise ValueError("a single-vertex graph has no nonzero Laplacian eigenvalue")


def lambda1_dense(g: RegularMultigraph, threshold: int = DENSE_THRESHOLD) -> SpectralReport:
    """Second-smallest eigenvalue of the dense Laplacian."""
    _require_connected(g)
    if g.n > threshold:
        raise ValueError(f"n={g.n} exceeds the dense threshold {threshold}")
    vals = scipy.linalg.eigh(g.laplacian_dense(), eigvals_only=True, subset_by_index=[0, 1])
    lam = max(float(vals[1]), 0.0)
    return SpectralReport(lam, "dense", 0.0, 0, 0.0, True, g.n, g.r, g.loop_convention)


def start_vector(n: int, scale: float = START_SCALE) -> np.ndarray:
    v = np.sin(np.arange(1, n + 1) * scale)
    v -= v.mean()
    return v / np.linalg.norm(v)


def _deflate(v: np.ndarray) -> np.ndarray:
    return v - v.mean()


def _orthonormalize(w, basis):
    """Classical Gram-Schmidt against ``basis`` columns, repeated once, then
    re-deflated so rounding noise cannot reintroduce the constant vector."""
    h = basis.T @ w
    w = w - basis @ h
    h2 = basis.T @ w
    w = w - basis @ h2
    return _deflate(w), h + h2


def lanczos_smallest(matvec, n, tol, max_iter, v0=None, basis_size=None, keep=None):
    """Thick-restart Lanczos for the smallest eigenpair of a symmetric operator
    restricted to the complement of the constant vector.

    Returns ``(theta, y, residual, matvecs)``.

    Raises:
        ConvergenceError: ``max_iter`` matvecs spent without reaching ``tol``.
    """
    dim = n - 1  # dimension of the deflated space
    m = min(basis_size or 80, dim)
    k_keep = min(keep or max(m // 2, 1), m - 1) if m > 1 else 0
    V = np.zeros((n, m + 1))
    T = np.zeros((m, m))
    V[:, 0] = start_vector(n) if v0 is None else _deflate(v0) / np.linalg.norm(_deflate(v0))
    k = 0
    matvecs = 0
    best = (np.inf, None, np.inf)
    restart_scale = START_SCALE
    while True:
        beta = 0.0
        j = k
        while j < m:
            w = _deflate(matvec(V[:, j]))
            matvecs += 1
            wnorm = float(np.linalg.norm(w))
            w, h = _orthonormalize(w, V[:, : j + 1])
            T[: j + 1, j] = h[: j + 1]
            T[j, : j + 1] = h[: j + 1]
            beta = float(np.linalg.norm(w))
            if j + 1 < m:
                if beta <= 1e-12 * max(wnorm, 1e-300):
                    # invariant subspace: continue with a fresh direction
                    restart_scale += 0.7548776662466927
                    w = _deflate(np.sin(np.arange(1, n + 1) * restart_scale))
                    w, _ = _orthonormalize(w, V[:, : j + 1])
                    w, _ = _orthonormalize(w, V[:, : j + 1])
                    nw = np.linalg.norm(w)
                    if nw < 1e-10:
                        m = j + 1
                        break
                    V[:, j + 1] = w / nw
                    T[j + 1, j] = T[j, j + 1] = 0.0
                else:
                    V[:, j + 1] = w / beta
                    T[j + 1, j] = T[j, j + 1] = beta
            else:
                V[:, m] = w / beta if beta > 0 else 0.0
            j += 1

        theta, U = np.linalg.eigh(T[:m, :m])
        est = np.abs(beta * U[m - 1, :])
        y = V[:, :m] @ U[:, 0]
        y /= np.linalg.norm(y)
        if est[0] <= tol or m == dim or matvecs >= max_iter:
            ay = _deflate(matvec(y))
            matvecs += 1
            lam = float(y @ ay)
            res = float(np.linalg.norm(ay - lam * y))
            if res < best[2]:
                best = (lam, y, res)
            if res <= tol:
                return lam, y, res, matvecs
            if matvecs >= max_iter:
                raise ConvergenceError(best[0], best[2], matvecs)
        # thick restart with the k smallest Ritz vectors
        k = k_keep
        V[:, :k] = V[:, :m] @ U[:, :k]
        V[:, k] = V[:, m]
        T[:] = 0.0
        T[np.arange(k), np.arange(k)] = theta[:k]
        T[k, :k] = T[:k, k] = beta * U[m - 1, :k]
        # reorthonormalize the carried block against rounding drift
        Q, _ = np.linalg.qr(V[:, : k + 1])
        sign = np.sign(np.einsum("ij,ij->j", Q, V[:, : k + 1]))
        V[:, : k + 1] = Q * sign


def lambda1_iterative(g: RegularMultigraph, tol: float = DEFAULT_TOL,
                      max_iter: int = DEFAULT_MAX_ITER, basis_size: int | None = None,
                      return_vector: bool = False):
    """Smallest nonzero eigenvalue by deflated thick-restart Lanczos.

    The start vector is deterministic (sin of the scaled vertex index) and
    the matvec sums neighbours in fixed generator order, so repeated runs
    return bit-identical reports.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _require_connected(g)
    nbr = g.nbr

    def matvec(v):
        return _kernels.laplacian_apply(nbr, v)

    lam, y, res, its = lanczos_smallest(matvec, g.n, tol, max_iter, basis_size=basis_size)
    report = SpectralReport(max(lam, 0.0), "iterative", res, its, tol, True, g.n, g.r,
                            g.loop_convention)
    if return_vector:
        return report, y
    return report


def lambda1(g: RegularMultigraph, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
            dense_threshold: int = DENSE_THRESHOLD) -> SpectralReport:
    """Dense solve below the threshold, iterative above it."""
    if g.n <= dense_threshold:
        return lambda1_dense(g, dense_threshold)
    return lambda1_iterative(g, tol, max_iter)
