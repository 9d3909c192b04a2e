# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled orbit enumeration and functional-graph cycle detection."""
import numpy as np

cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, uint32_t, uint64_t

cnp.import_array()


cdef inline uint64_t _hash_row(int32_t[:, ::1] buf, Py_ssize_t i, Py_ssize_t m) noexcept nogil:
    cdef uint64_t h = 1469598103934665603ULL
    cdef Py_ssize_t j
    for j in range(m):
        h ^= <uint64_t>(<uint32_t>buf[i, j])
        h *= 1099511628211ULL
    return h ^ (h >> 31)


cdef inline Py_ssize_t _probe(int64_t[::1] tab, int32_t[:, ::1] rows, int32_t[:, ::1] cand,
                              Py_ssize_t m, uint64_t mask, Py_ssize_t* slot_out) noexcept nogil:
    # Returns the index of a stored row equal to cand[0], or -1 with the free slot.
    cdef uint64_t slot = _hash_row(cand, 0, m) & mask
    cdef int64_t e
    cdef Py_ssize_t idx, j
    cdef bint same
    while True:
        e = tab[slot]
        if e == 0:
            slot_out[0] = <Py_ssize_t>slot
            return -1
        idx = <Py_ssize_t>(e - 1)
        same = True
        for j in range(m):
            if rows[idx, j] != cand[0, j]:
                same = False
                break
        if same:
            return idx
        slot = (slot + 1) & mask


def orbit(start, maps, Py_ssize_t cap, bint plus=False):
    """Length-lex BFS of start under the letter maps; see hdcw.kernels.orbit."""
    st_np = np.ascontiguousarray(start, dtype=np.int32)
    mp_np = np.ascontiguousarray(maps, dtype=np.int32)
    cdef Py_ssize_t m = st_np.shape[0]
    cdef Py_ssize_t k = mp_np.shape[0]
    cdef int32_t[:, ::1] mp = mp_np
    cdef Py_ssize_t capacity = 256
    cdef Py_ssize_t tsize = 1024
    rows_np = np.empty((capacity, m), dtype=np.int32)
    par_np = np.empty(capacity, dtype=np.int32)
    let_np = np.empty(capacity, dtype=np.int32)
    tab_np = np.zeros(tsize, dtype=np.int64)
    cand_np = np.empty((1, m), dtype=np.int32)
    cdef int32_t[:, ::1] rows = rows_np
    cdef int32_t[::1] par = par_np
    cdef int32_t[::1] let = let_np
    cdef int64_t[::1] tab = tab_np
    cdef int32_t[:, ::1] cand = cand_np
    cdef int32_t[::1] st = st_np
    cdef uint64_t mask = tsize - 1
    cdef Py_ssize_t count = 0, head, a, j, slot = 0, found, i, src
    cdef int32_t parent_idx
    cdef bint from_start

    head = -1 if plus else 0
    if not plus:
        for j in range(m):
            rows[0, j] = st[j]
            cand[0, j] = st[j]
        _probe(tab, rows, cand, m, mask, &slot)
        tab[slot] = 1
        par[0] = -1
        let[0] = -1
        count = 1
        head = 0

    while True:
        from_start = head < 0
        if not from_start and head >= count:
            break
        for a in range(k):
            if from_start:
                for j in range(m):
                    cand[0, j] = mp[a, st[j]]
            else:
                for j in range(m):
                    cand[0, j] = mp[a, rows[head, j]]
            found = _probe(tab, rows, cand, m, mask, &slot)
            if found >= 0:
                continue
            if count >= cap:
                raise OverflowError("orbit size cap %d exceeded" % cap)
            if count == capacity:
                capacity *= 2
                rows_np = np.resize(rows_np, (capacity, m)) if m else np.empty((capacity, 0), dtype=np.int32)
                par_np = np.resize(par_np, capacity)
                let_np = np.resize(let_np, capacity)
                rows = rows_np
                par = par_np
                let = let_np
            for j in range(m):
                rows[count, j] = cand[0, j]
            par[count] = -1 if from_start else <int32_t>head
            let[count] = <int32_t>a
            tab[slot] = count + 1
            count += 1
            if 2 * count > tsize:
                tsize *= 4
                mask = tsize - 1
                tab_np = np.zeros(tsize, dtype=np.int64)
                tab = tab_np
                for i in range(count):
                    for j in range(m):
                        cand[0, j] = rows[i, j]
                    _probe(tab, rows, cand, m, mask, &slot)
                    tab[slot] = i + 1
        head += 1
    return (np.array(rows_np[:count], dtype=np.int32),
            np.array(par_np[:count], dtype=np.int32),
            np.array(let_np[:count], dtype=np.int32))


def has_cycle(rows, colmap, loc):
    """Per row, whether i -> loc[row[colmap[i]]] has a cycle; see hdcw.kernels."""
    rw_np = np.ascontiguousarray(rows, dtype=np.int32)
    cm_np = np.ascontiguousarray(colmap, dtype=np.int32)
    lc_np = np.ascontiguousarray(loc, dtype=np.int32)
    cdef int32_t[:, ::1] rw = rw_np
    cdef int32_t[::1] cm = cm_np
    cdef int32_t[::1] lc = lc_np
    cdef Py_ssize_t nrows = rw_np.shape[0]
    cdef Py_ssize_t d = cm_np.shape[0]
    out_np = np.zeros(nrows, dtype=np.bool_)
    tag_np = np.zeros(max(d, 1), dtype=np.int64)
    cdef cnp.npy_bool[::1] out = out_np
    cdef int64_t[::1] tag = tag_np
    cdef Py_ssize_t r, s, x, c
    cdef int64_t base, marker
    for r in range(nrows):
        base = <int64_t>r * (d + 1)
        for s in range(d):
            if tag[s] > base:
                continue
            marker = base + s + 1
            x = s
            while x >= 0 and tag[x] <= base:
                tag[x] = marker
                c = cm[x]
                x = -1 if c < 0 else lc[rw[r, c]]
            if x >= 0 and tag[x] == marker:
                out[r] = True
                break
    return out_np
