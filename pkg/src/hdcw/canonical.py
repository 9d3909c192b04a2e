"""The idealized learner that builds the canonical minimal HD co-Büchi automaton.

States are representative pairs (u, v) of pointed ≡-classes. The automaton is
grown one safe component at a time: find a lasso u x^ω in L that the current
hypothesis misses, extend (u, x^d) to a pointed pair, and add the component
generated by its extensions.
"""
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from hdcw.automaton import CoBuchiAutomaton, complete, equivalent, to_mask
from hdcw.oracle import P1, P2, P3
from hdcw.words import EPS


@dataclass(frozen=True)
class PairState:
    u: tuple
    v: tuple

    def text(self, alphabet):
        return "%s:%s" % (alphabet.format_word(self.u), alphabet.format_word(self.v))


@dataclass
class Component:
    anchor: PairState
    members: list
    delta2: dict  # (member index, letter) -> member index

    def __len__(self):
        return len(self.members)


@dataclass
class FindPointedTrace:
    u: tuple
    v: tuple
    loop1: list = field(default_factory=list)  # (x, m) per first-loop iteration
    loop2: list = field(default_factory=list)  # x per second-loop iteration
    result: tuple = None  # w v̄

    def bound_ok(self, alpha):
        wv = self.result
        return len(wv) <= 2 * alpha**2 * len(self.v) + 4 * alpha**6 and wv[: len(self.v)] == self.v


@dataclass
class CanonicalAutomaton:
    automaton: CoBuchiAutomaton
    pairs: list  # PairState per state, None for a completion sink
    state_classes: tuple  # residual class per state, -1 for a sink
    components: list  # list of state-id lists
    alpha: int
    traces: list = field(default_factory=list)


@dataclass(frozen=True)
class ThetaSet:
    pair: tuple
    states: frozenset


def find_R(o):
    return list(o.residual_reps)


def find_pointed(o, u, v):
    """Extend (u, v) to a pointed pair (u, w v̄); returns (PairState, trace)."""
    u, v = tuple(u), tuple(v)
    if not v or o.bot_test(u, v) or o.class_of(u + v) != o.class_of(u):
        raise ValueError("find_pointed needs a nonempty, non-⊥, class-looping (u, v)")
    trace = FindPointedTrace(u, v)
    cap = 4 * (o.n + 1)
    vbar = v
    for _ in range(cap):
        x = o.least_x(P2(u, vbar))
        if x is None:
            break
        m = o.max_m(u, vbar, x)
        trace.loop1.append((x, m))
        vbar = vbar + (x + vbar) * m
    else:
        raise RuntimeError("first FindPointed loop exceeded %d rounds" % cap)
    w = EPS
    for _ in range(cap):
        x = o.least_x(P3(u, w, vbar))
        if x is None:
            break
        trace.loop2.append(x)
        w = w + vbar + x
    else:
        raise RuntimeError("second FindPointed loop exceeded %d rounds" % cap)
    trace.result = w + vbar
    return PairState(u, w + vbar), trace


def build_component(o, pair):
    """Members (u, v w) by length-lex BFS over w, one per ≈-class that is not ⊥."""
    u, v = pair.u, pair.v
    if not v:
        return Component(pair, [pair], {})
    words, classes = [EPS], [o.class_of(u + v)]
    delta2 = {}
    i = 0
    while i < len(words):
        for a in range(o.k):
            wa = words[i] + (a,)
            if o.bot_test(u, v + wa):
                continue
            c = o.class_of(u + v + wa)
            j = next((j for j, w in enumerate(words)
                      if classes[j] == c and o.approx_test((u, v + w), (u, v + wa))), None)
            if j is None:
                j = len(words)
                words.append(wa)
                classes.append(c)
            delta2[(i, a)] = j
        i += 1
    return Component(pair, [PairState(u, v + w) for w in words], delta2)


def assemble(o, comps, traces=None):
    """A[C]: component rank-2 edges plus every class-respecting rank-1 edge."""
    pairs, cls, groups, trans = [], [], [], set()
    for comp in comps:
        base = len(pairs)
        groups.append(list(range(base, base + len(comp.members))))
        for m in comp.members:
            pairs.append(m)
            cls.append(o.class_of(m.u + m.v))
        trans.update((base + i, a, 2, base + j) for (i, a), j in comp.delta2.items())
    cls_arr = np.array(cls, dtype=np.int64)
    for s, c in enumerate(cls):
        for a in range(o.k):
            target = o.class_delta[c, a]
            trans.update((s, a, 1, int(t)) for t in np.flatnonzero(cls_arr == target))
    eps_cls = o.class_of(EPS)
    initial = [s for s, c in enumerate(cls) if c == eps_cls]
    labels = {s: p.text(o.alphabet) for s, p in enumerate(pairs)}
    A = complete(CoBuchiAutomaton(o.alphabet, len(pairs), initial, trans, labels))
    extra = A.num_states - len(pairs)
    return CanonicalAutomaton(
        A, pairs + [None] * extra, tuple(cls) + (-1,) * extra, groups, len(pairs), list(traces or []))


class LearnObserver:
    """Hooks called by idealized_learn; the default does nothing."""

    def on_reps(self, reps):
        pass

    def on_nt(self, u, verdict):
        pass

    def on_lasso(self, u, x, tried):
        pass

    def on_find_pointed(self, trace):
        pass

    def on_component(self, comp):
        pass

    def on_final(self, ca):
        pass


def idealized_learn(o, observer=None):
    """Build the canonical automaton for the oracle's language."""
    obs = observer or LearnObserver()
    R = find_R(o)
    obs.on_reps(R)
    comps = []
    for u in R:
        nt = o.nt_test(u)
        obs.on_nt(u, nt)
        if not nt:
            comps.append(build_component(o, PairState(u, EPS)))
    traces = []
    ca = assemble(o, comps)
    for _ in range(o.n + o.num_classes + 1):
        same, _ = equivalent(o.D, ca.automaton, o.det_cap)
        if same:
            break
        found, tried = None, []
        for u in R:
            tried.append(u)
            x = o.least_x(P1(u, ca.automaton, ca.state_classes))
            if x is not None:
                found = (u, x)
                break
        if found is None:
            raise RuntimeError("languages differ but no looping lasso separates them")
        u, x = found
        obs.on_lasso(u, x, tried)
        d = max([len(c) for c in comps] + [1])
        pair, trace = find_pointed(o, u, x * d)
        traces.append(trace)
        obs.on_find_pointed(trace)
        comp = build_component(o, pair)
        for s, p in enumerate(ca.pairs):
            if p is not None and ca.state_classes[s] == o.class_of(pair.u + pair.v):
                if o.equivL_test((p.u, p.v), (pair.u, pair.v)):
                    raise AssertionError("iteration produced no new component")
        comps.append(comp)
        obs.on_component(comp)
        ca = assemble(o, comps, traces)
    else:
        raise RuntimeError("idealized learner exceeded its iteration bound")
    ca.traces = traces
    obs.on_final(ca)
    return ca


def minimize(A, det_cap=None, orbit_cap=None):
    """complete → determinize → normalize → oracle → idealized learner."""
    from hdcw.oracle import build_oracle

    kw = {}
    if det_cap is not None:
        kw["det_cap"] = det_cap
    o = build_oracle(A, orbit_cap=orbit_cap, **kw)
    return idealized_learn(o)


# ---------------------------------------------------------------------------
# diagnostics on a finished canonical automaton


def theta_diag(ca, u, v):
    A = ca.automaton
    m = A.reach_mask(u)
    for a in v:
        m = A.image2(m, a)
    from hdcw.automaton import bits

    return ThetaSet((tuple(u), tuple(v)), frozenset(bits(m)))


def _safe_step(A, q, a):
    for t, r in A.succ[q][a]:
        if r == 2:
            return t
    return None


def _safe_run(A, q, z):
    for a in z:
        if q is None:
            return None
        q = _safe_step(A, q, a)
    return q


def _shortest_safe_path(A, src, dst):
    prev = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            path = []
            while prev[x] is not None:
                x, a = prev[x]
                path.append(a)
            return tuple(reversed(path))
        for a in range(A.k):
            t = _safe_step(A, x, a)
            if t is not None and t not in prev:
                prev[t] = (x, a)
                queue.append(t)
    return None


def _shortest_kill(A, q, p):
    """Shortest y with a safe run from q and none from p (safe-deterministic A)."""
    prev = {(q, p): None}
    queue = deque([(q, p)])
    while queue:
        x = queue.popleft()
        for a in range(A.k):
            tq = _safe_step(A, x[0], a)
            if tq is None:
                continue
            tp = None if x[1] is None else _safe_step(A, x[1], a)
            node = (tq, tp)
            if node in prev:
                continue
            prev[node] = (x, a)
            if tp is None:
                path, y = [], node
                while prev[y] is not None:
                    y, b = prev[y]
                    path.append(b)
                return tuple(reversed(path))
            queue.append(node)
    return None


def safe_included(A, q, p):
    """L^sf(q) ⊆ L^sf(p) in a safe-deterministic automaton."""
    return _shortest_kill(A, q, p) is None


def is_central(ca, q, z):
    A = ca.automaton
    if _safe_run(A, q, z) != q:
        return False
    same = [p for p in range(A.num_states) if ca.state_classes[p] == ca.state_classes[q]]
    return all(_safe_run(A, p, z) in (q, None) for p in same)


def central_sequence(ca, q):
    """A central sequence for q, built as in the α³ size argument."""
    A = ca.automaton
    same = [p for p in range(A.num_states) if p != q and ca.state_classes[p] == ca.state_classes[q]]
    if not same:
        return EPS
    maximal = [p for p in same + [q]
               if not any(r != p and safe_included(A, p, r) for r in same + [q])]
    if q in maximal:
        z = _central_for_maximal(A, q, same)
    else:
        top = next(p for p in maximal if safe_included(A, q, p))
        zt = _central_for_maximal(A, top, [p for p in same + [q] if p != top])
        z = _shortest_safe_path(A, q, top) + zt + _shortest_safe_path(A, top, q)
    if not is_central(ca, q, z):
        raise AssertionError("constructed word is not central for state %d" % q)
    return z


def _central_for_maximal(A, q, others):
    zs = {}
    for p in others:
        y = _shortest_kill(A, q, p)
        back = _shortest_safe_path(A, _safe_run(A, q, y), q)
        zs[p] = y + back
    z = zs[others[0]]
    for _ in range(len(others) + 1):
        bad = [(p, _safe_run(A, p, z)) for p in others]
        bad = [(p, t) for p, t in bad if t is not None and t != q]
        if not bad:
            return z
        z = z + zs[bad[0][1]]
    raise AssertionError("central sequence construction did not converge")
