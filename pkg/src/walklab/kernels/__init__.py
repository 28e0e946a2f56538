"""Hot kernels: G(n,p) edge draws, BFS distances and the clash-removing search.

The compiled ``_core`` extension is used when it imports; otherwise (or when
the environment variable ``WALKLAB_PURE`` is set to a non-empty value other
than ``0``) the numpy/Python versions in ``_pure`` are selected.
"""

from __future__ import annotations

import os

from . import _pure
from ._pure import CLASHED, INCLUDED, NEVER_REACHED, splitmix64

_force_pure = os.environ.get("WALKLAB_PURE", "") not in ("", "0")

_compiled = None
if not _force_pure:
    try:
        from . import _core as _compiled  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "pure"
_impl = _compiled if _compiled is not None else _pure

gnp_edges = _impl.gnp_edges
bfs_distances = _impl.bfs_distances
mbfs = _impl.mbfs

__all__ = [
    "BACKEND",
    "CLASHED",
    "INCLUDED",
    "NEVER_REACHED",
    "bfs_distances",
    "gnp_edges",
    "mbfs",
    "splitmix64",
]
