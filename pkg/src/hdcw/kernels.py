"""Hot kernels with a compiled backend and a numpy fallback.

``orbit`` enumerates every row reachable from ``start`` under the letter maps
(``row -> maps[a][row]``) in length-lex order of least witnesses.
``has_cycle`` tests, per row, whether the partial map
``i -> loc[row[colmap[i]]]`` on ``len(colmap)`` points has a cycle
(negative entries mean undefined).

Set ``HDCW_PURE_PYTHON=1`` to force the fallback.
"""
import os

import numpy as np

from hdcw import _orbit_py
from hdcw.errors import CapExceeded

_compiled = None
if not os.environ.get("HDCW_PURE_PYTHON"):
    try:
        from hdcw import _orbit as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _orbit_py

DEFAULT_CAP = 10**6


def orbit_cap():
    return int(os.environ.get("HDCW_PROFILE_CAP", DEFAULT_CAP))


def orbit(start, maps, cap=None, plus=False, impl=None):
    """Return ``(rows, parent, letter)`` for the BFS orbit of ``start``.

    With ``plus`` the start row itself is not an element; enumeration begins
    with its one-letter images, so every entry has a nonempty witness.
    ``parent[i] == -1`` marks a child of the start (or the start itself).
    """
    impl = impl or _impl
    cap = orbit_cap() if cap is None else cap
    start = np.asarray(start, dtype=np.int32)
    maps = np.asarray(maps, dtype=np.int32)
    if start.shape[0] == 0:
        # every row is the empty row
        if plus:
            if maps.shape[0] == 0:
                return np.empty((0, 0), np.int32), np.empty(0, np.int32), np.empty(0, np.int32)
            return np.empty((1, 0), np.int32), np.array([-1], np.int32), np.array([0], np.int32)
        return np.empty((1, 0), np.int32), np.array([-1], np.int32), np.array([-1], np.int32)
    try:
        return impl.orbit(start, maps, cap, plus)
    except OverflowError as exc:
        raise CapExceeded(str(exc)) from None


def has_cycle(rows, colmap, loc, impl=None):
    impl = impl or _impl
    rows = np.asarray(rows, dtype=np.int32)
    if rows.ndim != 2 or rows.shape[0] == 0 or len(colmap) == 0:
        return np.zeros(rows.shape[0] if rows.ndim == 2 else 0, dtype=bool)
    return impl.has_cycle(rows, np.asarray(colmap, np.int32), np.asarray(loc, np.int32))


def witness(parent, letter, i, plus=False):
    """Word (tuple of letter indices) realizing orbit entry ``i``."""
    out = []
    while i >= 0:
        if letter[i] >= 0:
            out.append(int(letter[i]))
        i = int(parent[i])
    return tuple(reversed(out))
