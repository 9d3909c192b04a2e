"""Exact language queries backed by a reduced deterministic co-Büchi automaton D.

Searches over words go through orbits of *restricted safe profiles*: a row
records, for a handful of tracked D-states, where the safe run of a word leads
(or ``DEAD`` once a rank-1 step happened), plus one column following the
residual class. Two facts make these rows sufficient:

* for ``ux ∼ u``, ``u x^ω ∈ L`` iff the safe partial map of x on the states of
  class(u) has a cycle (D is deterministic, so every state of the class is
  reached by some word equivalent to u);
* every predicate below only looks at tracked states of that form.

A length-lex BFS over rows visits each row first through its least witness, so
the first row satisfying a predicate gives the least word satisfying it.
"""
from dataclasses import dataclass, field

import numpy as np

from hdcw import kernels
from hdcw.automaton import (
    DET_CAP,
    complete,
    det_state_partition,
    determinize_breakpoint,
    equivalent,
    from_arrays,
    moore_reduce,
    normalize,
    restrict_reachable,
    safe_language_equal,
)
from hdcw.errors import AlphabetError
from hdcw.words import EPS, UPWord


def prepare_reference(A, cap=DET_CAP):
    """Deterministic, complete, normalized, reachable and rank-bisimulation reduced."""
    A = complete(A)
    if not (A.is_deterministic and A.is_complete):
        A = determinize_breakpoint(A, cap)
    D = normalize(restrict_reachable(A))
    while True:
        delta, rank, init = D.arrays()
        d2, r2, i2, _ = moore_reduce(delta, rank, init)
        D2 = normalize(from_arrays(D.alphabet, d2, r2, i2))
        if D2 == D:
            return D
        D = D2


@dataclass(frozen=True)
class SafeProfile:
    target: tuple
    safe: tuple
    witness: tuple

    def compose(self, other):
        """Profile of self.witness · other.witness (witness left unset)."""
        target = tuple(other.target[t] for t in self.target)
        safe = tuple(s and other.safe[t] for s, t in zip(self.safe, self.target))
        return target, safe


@dataclass(frozen=True)
class SflSignature:
    uv_class: int
    safe_set: frozenset


@dataclass(frozen=True)
class P1:
    """u x^ω ∈ L − L(H), u x ∼ u; H is an A[C]-shaped hypothesis."""

    u: tuple
    hypothesis: object  # CoBuchiAutomaton
    hyp_classes: tuple  # residual class per hypothesis state, -1 for a sink


@dataclass(frozen=True)
class P2:
    """u ∼ u v̄ x, (u, v̄ x v̄) not ⊥, u (v̄ x)^ω ∉ L."""

    u: tuple
    vbar: tuple


@dataclass(frozen=True)
class P3:
    """u ∼ u w v̄ x, (u, w v̄ x v̄) neither ⊥ nor ≈ (u, w v̄)."""

    u: tuple
    w: tuple
    vbar: tuple


@dataclass
class OracleStats:
    orbit_rows: int = 0
    orbits: int = 0
    largest_orbit: int = 0
    p3_cache_hits: int = 0
    extra: dict = field(default_factory=dict)


class LanguageOracle:
    """Decision procedures for ∼_L, ≈⊥, ≈, ≡ and least-witness searches."""

    def __init__(self, A, det_cap=DET_CAP, orbit_cap=None):
        D = prepare_reference(A, det_cap)
        self.D = D
        self.alphabet = D.alphabet
        self.det_cap = det_cap
        self.orbit_cap = kernels.orbit_cap() if orbit_cap is None else orbit_cap
        delta, rank, init = D.arrays()
        self.delta, self.rank, self.init = delta, rank, init
        self.n, self.k = delta.shape
        self.stats = OracleStats()

        # residual classes, numbered in length-lex order of their least word
        part = det_state_partition(delta, rank)
        access = self._access_words()
        order, renum = [], {}
        for q in sorted(range(self.n), key=lambda q: (len(access[q]), access[q])):
            if part[q] not in renum:
                renum[part[q]] = len(order)
                order.append(access[q])
        self.lang_class = np.array([renum[c] for c in part], dtype=np.int64)
        self.residual_reps = order
        self.num_classes = len(order)
        self.class_states = [np.flatnonzero(self.lang_class == c) for c in range(self.num_classes)]
        self.class_delta = np.zeros((self.num_classes, self.k), dtype=np.int64)
        for c, states in enumerate(self.class_states):
            self.class_delta[c] = self.lang_class[delta[states[0]]]

        # extended value space for rows: D states, class markers, DEAD
        self.DEAD = self.n + self.num_classes
        ext = np.empty((self.k, self.DEAD + 1), dtype=np.int32)
        for a in range(self.k):
            ext[a, : self.n] = np.where(rank[:, a] == 2, delta[:, a], self.DEAD)
            ext[a, self.n : self.DEAD] = self.n + self.class_delta[:, a]
            ext[a, self.DEAD] = self.DEAD
        self.ext = ext
        self._dl = delta.tolist()
        self._p3_cache = {}
        self._cls_dist = {}
        self.max_witness = 2 * self.n**3

    # -- basics -----------------------------------------------------------

    def _access_words(self):
        access = {self.init: EPS}
        queue = [self.init]
        for q in queue:
            for a in range(self.k):
                t = int(self.delta[q, a])
                if t not in access:
                    access[t] = access[q] + (a,)
                    queue.append(t)
        return access

    def _check(self, w):
        for a in w:
            if not (isinstance(a, (int, np.integer)) and 0 <= a < self.k):
                raise AlphabetError("letter %r outside alphabet" % (a,))

    def state_of(self, u, start=None):
        self._check(u)
        q = self.init if start is None else start
        dl = self._dl
        for a in u:
            q = dl[q][a]
        return q

    def class_of(self, u):
        return int(self.lang_class[self.state_of(u)])

    def class_after(self, c, w):
        for a in w:
            c = int(self.class_delta[c, a])
        return c

    def mem_up(self, w):
        self._check(w.spoke)
        self._check(w.period)
        from hdcw.automaton import member_up

        return member_up(self.D, w)

    def member(self, u, v):
        return self.mem_up(UPWord(u, v))

    def fold(self, values, w):
        """Apply the extended safe maps of w to an array of row values."""
        vals = np.asarray(values, dtype=np.int64)
        for a in w:
            vals = self.ext[a][vals]
        return vals

    def R(self, u):
        """States of D whose language class is class(u)."""
        return self.class_states[self.class_of(u)]

    def safe_set(self, u, v):
        self._check(v)
        vals = self.fold(self.R(u), v)
        return frozenset(int(x) for x in vals[vals < self.n])

    def safe_image(self, states, x):
        vals = self.fold(sorted(states), x)
        return frozenset(int(t) for t in vals[vals < self.n])

    # -- ⊥, ≡ and friends -----------------------------------------------------

    def bot_test(self, u, v):
        """(u, v) ≈ ⊥: every run from class(u) takes a rank-1 step on v."""
        if not v:
            return False
        return not self.safe_set(u, v)

    def nt_test(self, u):
        return any(not self.bot_test(u, (a,)) for a in range(self.k))

    def sfl_signature(self, u, v):
        return SflSignature(self.class_of(tuple(u) + tuple(v)), self.safe_set(u, v))

    def equivL_test(self, p1, p2):
        s1, s2 = self.sfl_signature(*p1), self.sfl_signature(*p2)
        if s1.uv_class != s2.uv_class:
            return False
        if s1.safe_set == s2.safe_set:
            return True
        return safe_language_equal(self.D, s1.safe_set, s2.safe_set, self.det_cap)

    def max_m(self, u, vbar, x):
        """Largest m with (u, v̄(x v̄)^m) not ⊥."""
        S = self.safe_set(u, vbar)
        if not S:
            raise ValueError("(u, v̄) is ⊥")
        step = tuple(x) + tuple(vbar)
        for m in range(self.n + 1):
            S2 = self.safe_image(S, step)
            if not S2:
                return m
            if S2 == S:
                break
            S = S2
        raise RuntimeError("max_m did not terminate within |D| rounds")

    # -- orbit helpers ----------------------------------------------------

    def _orbit(self, start, maps=None, plus=False):
        rows, parent, letter = kernels.orbit(
            np.asarray(start, dtype=np.int32), self.ext if maps is None else maps, self.orbit_cap, plus)
        self.stats.orbits += 1
        self.stats.orbit_rows += len(rows)
        self.stats.largest_orbit = max(self.stats.largest_orbit, len(rows))
        return rows, parent, letter

    def _local(self, states, size=None):
        loc = -np.ones(size or self.DEAD + 1, dtype=np.int32)
        loc[np.asarray(states, dtype=np.int64)] = np.arange(len(states), dtype=np.int32)
        return loc

    def _witness(self, parent, letter, i):
        w = kernels.witness(parent, letter, i)
        assert len(w) <= self.max_witness, "witness longer than 2|D|^3"
        return w

    def _approx_search(self, cu, cls_y, f1, f2):
        """Least z separating two safe maps on class(u) states, or None.

        f1, f2 map each state of class(u) (in order) to a D-state or DEAD.
        """
        R = self.class_states[cu]
        d = len(R)
        start = np.concatenate([[self.n + cls_y], f1, f2]).astype(np.int32)
        rows, parent, letter = self._orbit(start)
        loc = self._local(R)
        valid = rows[:, 0] == self.n + cu
        c1 = kernels.has_cycle(rows, np.arange(1, d + 1), loc)
        c2 = kernels.has_cycle(rows, np.arange(d + 1, 2 * d + 1), loc)
        hits = np.flatnonzero(valid & (c1 != c2))
        if len(hits) == 0:
            return None
        return self._witness(parent, letter, int(hits[0]))

    def approx_distinguisher(self, p1, p2):
        """None if p1 ≈ p2; ("class", None) if the classes differ; else ("suffix", z)."""
        (u, v), (u2, v2) = p1, p2
        if not v or not v2:
            raise ValueError("≈ needs nonempty second components")
        cu = self.class_of(u)
        if cu != self.class_of(u2) or self.class_of(tuple(u) + tuple(v)) != self.class_of(tuple(u2) + tuple(v2)):
            return ("class", None)
        R = self.class_states[cu]
        z = self._approx_search(cu, self.class_of(tuple(u) + tuple(v)), self.fold(R, v), self.fold(R, v2))
        return None if z is None else ("suffix", z)

    def approx_test(self, p1, p2):
        return self.approx_distinguisher(p1, p2) is None

    def class_distinguisher(self, c1, c2):
        """Least lasso (t, s) with exactly one of r1·t·s^ω, r2·t·s^ω in L."""
        if c1 == c2:
            return None
        key = (min(c1, c2), max(c1, c2))
        cache = self._cls_dist
        if key not in cache:
            q1 = int(self.class_states[key[0]][0])
            q2 = int(self.class_states[key[1]][0])
            same, w = equivalent(self.D.replace(initial=[q1]), self.D.replace(initial=[q2]), self.det_cap)
            assert not same, "distinct classes must have different languages"
            cache[key] = w
        return cache[key]

    def loop_witness(self, u, v):
        """Least y with u v y ∼ u and u (v y)^ω ∈ L (y nonempty when v is), or None."""
        u, v = tuple(u), tuple(v)
        cu = self.class_of(u)
        R = self.class_states[cu]
        d = len(R)
        start = np.concatenate([[self.n + self.class_after(cu, v)], self.fold(R, v)]).astype(np.int32)
        rows, parent, letter = self._orbit(start, plus=not v)
        valid = rows[:, 0] == self.n + cu
        cyc = kernels.has_cycle(rows, np.arange(1, d + 1), self._local(R))
        hits = np.flatnonzero(valid & cyc)
        return None if len(hits) == 0 else self._witness(parent, letter, int(hits[0]))

    # -- least-witness searches --------------------------------------------

    def least_x(self, pred):
        if isinstance(pred, P2):
            return self._least_p2(pred)
        if isinstance(pred, P3):
            return self._least_p3(pred)
        if isinstance(pred, P1):
            return self._least_p1(pred)
        raise TypeError("unknown predicate %r" % (pred,))

    def _ok_after(self, vbar, size):
        """ok[value]: value is a D-state with a safe run on vbar."""
        ok = np.zeros(size, dtype=bool)
        ok[: self.n] = self.fold(np.arange(self.n), vbar) < self.n
        return ok

    def _least_p2(self, pred):
        u, vbar = tuple(pred.u), tuple(pred.vbar)
        cu = self.class_of(u)
        R = self.class_states[cu]
        rho_v = self.fold(R, vbar)
        S1 = np.unique(rho_v[rho_v < self.n])
        start = np.concatenate([[self.n + self.class_after(cu, vbar)], S1]).astype(np.int32)
        rows, parent, letter = self._orbit(start, plus=True)
        valid = rows[:, 0] == self.n + cu
        ok = self._ok_after(vbar, self.DEAD + 1)
        not_bot = ok[rows[:, 1:]].any(axis=1) if len(S1) else np.zeros(len(rows), bool)
        col = {int(s): j + 1 for j, s in enumerate(S1)}
        colmap = np.array([col.get(int(t), -1) for t in rho_v], dtype=np.int32)
        in_L = kernels.has_cycle(rows, colmap, self._local(R))
        hits = np.flatnonzero(valid & not_bot & ~in_L)
        return None if len(hits) == 0 else self._witness(parent, letter, int(hits[0]))

    def _least_p3(self, pred):
        u, w, vbar = tuple(pred.u), tuple(pred.w), tuple(pred.vbar)
        cu = self.class_of(u)
        R = self.class_states[cu]
        y0 = w + vbar
        rho0 = self.fold(R, y0)
        S0 = np.unique(rho0[rho0 < self.n])
        cls_y0 = self.class_after(cu, y0)
        start = np.concatenate([[self.n + cls_y0], S0]).astype(np.int32)
        rows, parent, letter = self._orbit(start, plus=True)
        valid = rows[:, 0] == self.n + cu
        ok = self._ok_after(vbar, self.DEAD + 1)
        not_bot = ok[rows[:, 1:]].any(axis=1) if len(S0) else np.zeros(len(rows), bool)
        col = {int(s): j + 1 for j, s in enumerate(S0)}
        cols0 = [col.get(int(t), -1) for t in rho0]
        cls_y1 = self.class_after(cu, vbar)
        cache = self._p3_cache.setdefault((cu, y0, vbar), {})
        for i in np.flatnonzero(valid & not_bot):
            row = rows[i]
            key = row.tobytes()
            verdict = cache.get(key)
            if verdict is None:
                if cls_y1 != cls_y0:
                    verdict = True
                else:
                    mid = np.array([row[c] if c >= 0 else self.DEAD for c in cols0], dtype=np.int64)
                    f1 = self.fold(mid, vbar)
                    verdict = self._approx_search(cu, cls_y1, f1, rho0) is not None
                cache[key] = verdict
            else:
                self.stats.p3_cache_hits += 1
            if verdict:
                return self._witness(parent, letter, int(i))
        return None

    def _least_p1(self, pred):
        u, H, hcls = tuple(pred.u), pred.hypothesis, np.asarray(pred.hyp_classes)
        if H.alphabet != self.alphabet:
            raise AlphabetError("hypothesis alphabet differs from the oracle's")
        cu = self.class_of(u)
        R = self.class_states[cu]
        m = H.num_states
        base = self.DEAD + 1
        maps = np.empty((self.k, base + m), dtype=np.int32)
        maps[:, :base] = self.ext
        for a in range(self.k):
            for p in range(m):
                safe = [q for q, r in H.succ[p][a] if r == 2]
                if len(safe) > 1:
                    raise ValueError("hypothesis is not safe-deterministic")
                maps[a, base + p] = base + safe[0] if safe else self.DEAD
        P = np.flatnonzero(hcls == cu)
        readable = bool(H.reach_mask(u) & sum(1 << int(p) for p in P))
        start = np.concatenate([[self.n + cu], R, base + P]).astype(np.int32)
        rows, parent, letter = self._orbit(start, maps=maps, plus=True)
        d = len(R)
        valid = rows[:, 0] == self.n + cu
        in_L = kernels.has_cycle(rows, np.arange(1, d + 1), self._local(R, base + m))
        if readable and len(P):
            in_H = kernels.has_cycle(rows, np.arange(d + 1, d + 1 + len(P)), self._local(base + P, base + m))
        else:
            in_H = np.zeros(len(rows), dtype=bool)
        hits = np.flatnonzero(valid & in_L & ~in_H)
        return None if len(hits) == 0 else self._witness(parent, letter, int(hits[0]))

    # -- full profiles ------------------------------------------------------

    def profiles(self):
        """All safe profiles of D in length-lex order of their least witnesses."""
        maps = np.empty((self.k, 2 * self.n), dtype=np.int32)
        for a in range(self.k):
            t = self.delta[:, a]
            s2 = (self.rank[:, a] == 2).astype(np.int64)
            maps[a, 0::2] = 2 * t
            maps[a, 1::2] = 2 * t + s2
        start = 2 * np.arange(self.n) + 1
        rows, parent, letter = self._orbit(start, maps=maps)
        out = []
        for i, row in enumerate(rows):
            out.append(SafeProfile(tuple(int(x) for x in row // 2), tuple(bool(x) for x in row % 2),
                                   kernels.witness(parent, letter, i)))
        return out


def build_oracle(A, det_cap=DET_CAP, orbit_cap=None):
    return LanguageOracle(A, det_cap, orbit_cap)


def least_x_satisfying(o, pred):
    return o.least_x(pred)
