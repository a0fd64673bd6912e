"""Hot kernels with a compiled core and a numpy fallback.

The compiled extension is used when it imports cleanly; setting
``ESPERANTIST_PURE_PYTHON=1`` forces the fallback. ``BACKEND`` names the
active choice.
"""

import os

from . import _pykernels

try:
    if os.environ.get("ESPERANTIST_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "compiled" if _ckernels is not None else "python"
_impl = _ckernels if _ckernels is not None else _pykernels

# int64 codes must not overflow inside the compiled orbit search
_CODE_LIMIT = 2**62


def backends():
    """Mapping of available backend names to kernel modules."""
    out = {"python": _pykernels}
    if _ckernels is not None:
        out["compiled"] = _ckernels
    return out


def orbit_bfs(left, right, base, ell, projective, cap):
    m = len(left[0])
    size = m * (len(base[0]) if hasattr(base[0], "__len__") else 1)
    if _ckernels is not None and ell**size < _CODE_LIMIT:
        return _ckernels.orbit_bfs(left, right, base, ell, projective, cap)
    return _pykernels.orbit_bfs(left, right, base, ell, projective, cap)


def laplacian_apply(nbr, v):
    return _impl.laplacian_apply(nbr, v)


def bfs_distances(nbr, source):
    return _impl.bfs_distances(nbr, source)


def components(nbr):
    return _impl.components(nbr)


def count_cycles(perm):
    return _impl.count_cycles(perm)


def bfs_order(nbr, source):
    return _impl.bfs_order(nbr, source)
