"""Pure-Python (numpy) versions of the compiled kernels in ``_orbit.pyx``."""
import numpy as np


def orbit(start, maps, cap, plus=False):
    start = np.ascontiguousarray(start, dtype=np.int32)
    maps = np.ascontiguousarray(maps, dtype=np.int32)
    k = maps.shape[0]
    seen = {}
    rows, parents, letters = [], [], []

    def add(row, parent, letter):
        key = row.tobytes()
        if key in seen:
            return
        if len(rows) >= cap:
            raise OverflowError("orbit size cap %d exceeded" % cap)
        seen[key] = len(rows)
        rows.append(row)
        parents.append(parent)
        letters.append(letter)

    if plus:
        for a in range(k):
            add(maps[a][start], -1, a)
    else:
        add(start, -1, -1)
    head = 0
    while head < len(rows):
        # expand the current layer at once, then dedupe in order
        stop = len(rows)
        layer = np.stack(rows[head:stop])
        kids = maps[:, layer]  # (k, layer, m)
        for i in range(stop - head):
            for a in range(k):
                add(kids[a, i], head + i, a)
        head = stop
    m = start.shape[0]
    out = np.stack(rows) if rows else np.empty((0, m), dtype=np.int32)
    return (out.astype(np.int32, copy=False).reshape(len(rows), m),
            np.array(parents, dtype=np.int32), np.array(letters, dtype=np.int32))


def has_cycle(rows, colmap, loc):
    rows = np.asarray(rows, dtype=np.int32)
    colmap = np.asarray(colmap, dtype=np.int64)
    loc = np.asarray(loc, dtype=np.int64)
    nrows, d = rows.shape[0], colmap.shape[0]
    if d == 0 or nrows == 0:
        return np.zeros(nrows, dtype=bool)
    dead = colmap < 0
    f = loc[rows[:, np.where(dead, 0, colmap)]]
    f[:, dead] = -1
    # a point survives d applications of a partial map on d points only on a cycle
    x = np.tile(np.arange(d), (nrows, 1))
    for _ in range(d):
        alive = x >= 0
        x = np.where(alive, np.take_along_axis(f, np.where(alive, x, 0), axis=1), -1)
    return (x >= 0).any(axis=1)
