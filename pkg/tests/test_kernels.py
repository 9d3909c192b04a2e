import itertools

import numpy as np
import pytest

from hdcw import _orbit_py, kernels
from hdcw.errors import CapExceeded

try:
    from hdcw import _orbit as compiled
except ImportError:  # extension not built
    compiled = None


def _random_maps(rng, k, size):
    return rng.integers(0, size, size=(k, size)).astype(np.int32)


def test_backend_is_named():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.skipif(compiled is None, reason="compiled extension not built")
@pytest.mark.parametrize("plus", [False, True])
def test_backends_agree_on_orbits(plus):
    rng = np.random.default_rng(0)
    for _ in range(30):
        size = int(rng.integers(2, 7))
        maps = _random_maps(rng, int(rng.integers(1, 4)), size)
        start = rng.integers(0, size, size=int(rng.integers(1, 5))).astype(np.int32)
        a = kernels.orbit(start, maps, 10**5, plus, impl=compiled)
        b = kernels.orbit(start, maps, 10**5, plus, impl=_orbit_py)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)
        rows = a[0]
        loc = -np.ones(size, np.int32)
        loc[: min(size, start.shape[0])] = np.arange(min(size, start.shape[0]))
        cols = np.arange(rows.shape[1], dtype=np.int32)
        assert np.array_equal(kernels.has_cycle(rows, cols, loc, impl=compiled),
                              kernels.has_cycle(rows, cols, loc, impl=_orbit_py))


def test_orbit_is_length_lex_with_least_witnesses():
    # two letters on Z_5: +1 and *2
    maps = np.array([[(i + 1) % 5 for i in range(5)], [(2 * i) % 5 for i in range(5)]], np.int32)
    rows, parent, letter = kernels.orbit(np.array([1], np.int32), maps, 100)
    seen = {}
    for i, row in enumerate(rows):
        w = kernels.witness(parent, letter, i)
        v = 1
        for a in w:
            v = maps[a][v]
        assert v == row[0]
        seen[int(row[0])] = w
    # brute-force least witnesses
    best = {}
    for n in range(6):
        for w in itertools.product(range(2), repeat=n):
            v = 1
            for a in w:
                v = maps[a][v]
            best.setdefault(v, w)
    assert seen == best
    assert [len(seen[int(r[0])]) for r in rows] == sorted(len(w) for w in best.values())


def test_plus_mode_excludes_the_empty_word():
    maps = np.array([[1, 0]], np.int32)
    rows, parent, letter = kernels.orbit(np.array([0], np.int32), maps, 100, plus=True)
    ws = [kernels.witness(parent, letter, i) for i in range(len(rows))]
    assert () not in ws
    assert ws[0] == (0,)


def test_has_cycle():
    # values 0..2 are tracked points, 3 is a dead value
    rows = np.array([[1, 0, 3], [1, 2, 3], [3, 3, 3]], np.int32)
    loc = np.array([0, 1, 2, -1], np.int32)
    cols = np.arange(3, dtype=np.int32)
    # row 0: 0->1->0 cycle; row 1: 0->1->2->dead; row 2: nothing
    assert list(kernels.has_cycle(rows, cols, loc)) == [True, False, False]


def test_orbit_cap():
    maps = np.array([[(i + 1) % 50 for i in range(50)]], np.int32)
    with pytest.raises(CapExceeded):
        kernels.orbit(np.array([0], np.int32), maps, 10)
