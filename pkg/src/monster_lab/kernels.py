"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is used when the
extension is missing or when ``MONSTER_LAB_PURE`` is set to a non-empty value
other than ``0``.
"""

import os

from . import _pykernels as pure

BACKEND = "python"

if os.environ.get("MONSTER_LAB_PURE", "0") in ("", "0"):
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = pure
    else:
        BACKEND = "cython"
else:
    _impl = pure

bfs = _impl.bfs
eccentricities = _impl.eccentricities
girth = _impl.girth
walk_hits = _impl.walk_hits
walk_lengths = _impl.walk_lengths
window_presence = _impl.window_presence

__all__ = [
    "BACKEND",
    "bfs",
    "eccentricities",
    "girth",
    "pure",
    "walk_hits",
    "walk_lengths",
    "window_presence",
]
