"""Transition-based co-Büchi automata.

A run is accepting iff it takes finitely many rank-1 transitions. States are
``0..n-1``, letters are indices into the alphabet, and transitions are
``(src, letter, rank, dst)`` tuples.
"""
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from hdcw.errors import AlphabetError, CapExceeded
from hdcw.words import Alphabet, UPWord, llkey

DET_CAP = 10**6


def bits(mask):
    """Indices of the set bits of an int, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def to_mask(states):
    m = 0
    for q in states:
        m |= 1 << q
    return m


class CoBuchiAutomaton:
    """Immutable co-Büchi automaton with rank-1 (unsafe) and rank-2 (safe) transitions."""

    def __init__(self, alphabet, num_states, initial, transitions, labels=None):
        self.alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
        self.num_states = int(num_states)
        self.initial = frozenset(int(q) for q in initial)
        self.transitions = frozenset((int(p), int(a), int(r), int(q)) for p, a, r, q in transitions)
        self.labels = dict(labels or {})
        n, k = self.num_states, len(self.alphabet)
        for q in self.initial:
            if not 0 <= q < n:
                raise ValueError("initial state %d out of range" % q)
        for p, a, r, q in self.transitions:
            if not (0 <= p < n and 0 <= q < n):
                raise ValueError("transition endpoint out of range: %r" % ((p, a, r, q),))
            if not 0 <= a < k:
                raise AlphabetError("letter index %d out of range" % a)
            if r not in (1, 2):
                raise ValueError("rank must be 1 or 2, got %d" % r)

    @property
    def k(self):
        return len(self.alphabet)

    def __eq__(self, other):
        return (
            isinstance(other, CoBuchiAutomaton)
            and self.alphabet == other.alphabet
            and self.num_states == other.num_states
            and self.initial == other.initial
            and self.transitions == other.transitions
        )

    def __hash__(self):
        return hash((self.alphabet, self.num_states, self.initial, self.transitions))

    def __repr__(self):
        return "CoBuchiAutomaton(states=%d, letters=%d, transitions=%d)" % (
            self.num_states, self.k, len(self.transitions))

    def replace(self, transitions=None, initial=None, labels=None, num_states=None):
        return CoBuchiAutomaton(
            self.alphabet,
            self.num_states if num_states is None else num_states,
            self.initial if initial is None else initial,
            self.transitions if transitions is None else transitions,
            self.labels if labels is None else labels,
        )

    @cached_property
    def succ(self):
        """succ[p][a] -> sorted tuple of (dst, rank)."""
        table = [[[] for _ in range(self.k)] for _ in range(self.num_states)]
        for p, a, r, q in self.transitions:
            table[p][a].append((q, r))
        return [[tuple(sorted(cell)) for cell in row] for row in table]

    @cached_property
    def post_masks(self):
        """post_masks[a][p]: bitmask of all a-successors of p."""
        out = [[0] * self.num_states for _ in range(self.k)]
        for p, a, _r, q in self.transitions:
            out[a][p] |= 1 << q
        return out

    @cached_property
    def post2_masks(self):
        """Like post_masks but rank-2 transitions only."""
        out = [[0] * self.num_states for _ in range(self.k)]
        for p, a, r, q in self.transitions:
            if r == 2:
                out[a][p] |= 1 << q
        return out

    @cached_property
    def is_deterministic(self):
        return len(self.initial) <= 1 and all(len(c) <= 1 for row in self.succ for c in row)

    @cached_property
    def is_complete(self):
        return bool(self.initial) and all(c for row in self.succ for c in row)

    def arrays(self):
        """(delta, rank, init) for a deterministic complete automaton."""
        if not (self.is_deterministic and self.is_complete):
            raise ValueError("arrays() needs a deterministic complete automaton")
        delta = np.zeros((self.num_states, self.k), dtype=np.int64)
        rank = np.zeros((self.num_states, self.k), dtype=np.int64)
        for p, a, r, q in self.transitions:
            delta[p, a] = q
            rank[p, a] = r
        return delta, rank, next(iter(self.initial))

    def image(self, mask, a):
        out = 0
        post = self.post_masks[a]
        for q in bits(mask):
            out |= post[q]
        return out

    def image2(self, mask, a):
        out = 0
        post = self.post2_masks[a]
        for q in bits(mask):
            out |= post[q]
        return out

    def reach_mask(self, word, start=None):
        m = to_mask(self.initial) if start is None else start
        for a in word:
            m = self.image(m, a)
        return m

    def check_word(self, word):
        for a in word:
            if not 0 <= a < self.k:
                raise AlphabetError("letter index %r outside alphabet" % (a,))

    @cached_property
    def det_lists(self):
        """arrays() as nested lists, for fast scalar stepping."""
        delta, rank, init = self.arrays()
        return delta.tolist(), rank.tolist(), init

    @cached_property
    def _residuals(self):
        return _residual_info(self)


def from_arrays(alphabet, delta, rank, init, labels=None):
    n, k = delta.shape
    trans = [(p, a, int(rank[p, a]), int(delta[p, a])) for p in range(n) for a in range(k)]
    return CoBuchiAutomaton(alphabet, n, [init], trans, labels)


# ---------------------------------------------------------------------------
# graph helpers


def scc_labels(n, src, dst):
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    g = csr_matrix((np.ones(len(src), dtype=np.int32), (np.asarray(src), np.asarray(dst))), shape=(n, n))
    return connected_components(g, directed=True, connection="strong")[1]


def reachable_from(n, src, dst, sources):
    """Boolean mask of nodes reachable from ``sources`` (a collection of node ids)."""
    sources = list(sources)
    out = np.zeros(n, dtype=bool)
    if not sources:
        return out
    src = np.concatenate([np.asarray(src, dtype=np.int64), np.full(len(sources), n)])
    dst = np.concatenate([np.asarray(dst, dtype=np.int64), np.asarray(sources, dtype=np.int64)])
    g = csr_matrix((np.ones(len(src), dtype=np.int32), (src, dst)), shape=(n + 1, n + 1))
    order = breadth_first_order(g, n, directed=True, return_predecessors=False)
    out[order[order < n]] = True
    return out


# ---------------------------------------------------------------------------
# basic operations


def complete(A):
    """Route missing (state, letter) pairs to a fresh rank-1 sink."""
    missing = [(p, a) for p in range(A.num_states) for a in range(A.k) if not A.succ[p][a]]
    if not missing and A.initial:
        return A
    sink = A.num_states
    trans = set(A.transitions)
    trans.update((p, a, 1, sink) for p, a in missing)
    trans.update((sink, a, 1, sink) for a in range(A.k))
    initial = A.initial or {sink}
    return A.replace(transitions=trans, initial=initial, num_states=sink + 1)


def safe_reach(A, states, x):
    """States reachable from ``states`` reading x with rank-2 transitions only."""
    A.check_word(x)
    m = to_mask(states)
    for a in x:
        if not m:
            break
        m = A.image2(m, a)
    return frozenset(bits(m))


def member_up(A, w):
    """Whether A accepts ``w.spoke · w.period^ω``."""
    A.check_word(w.spoke)
    A.check_word(w.period)
    if A.is_deterministic and A.is_complete:
        return _member_det(A, w)
    start = A.reach_mask(w.spoke)
    if not start:
        return False
    # layered graph over (period position, state); accept iff the rank-2 part
    # of the reachable region has a cycle (found by pruning sink nodes)
    p, succ = len(w.period), A.succ
    seen = {(0, q) for q in bits(start)}
    stack = list(seen)
    out2 = {}
    while stack:
        i, q = stack.pop()
        j = (i + 1) % p
        safe = []
        for t, r in succ[q][w.period[i]]:
            node = (j, t)
            if r == 2:
                safe.append(node)
            if node not in seen:
                seen.add(node)
                stack.append(node)
        out2[(i, q)] = safe
    outdeg = {v: len(ts) for v, ts in out2.items()}
    pred = {}
    for v, ts in out2.items():
        for t in ts:
            pred.setdefault(t, []).append(v)
    # peel nodes that cannot lie on a cycle: no safe successors left
    queue = [v for v, d in outdeg.items() if d == 0]
    alive = len(outdeg)
    while queue:
        v = queue.pop()
        alive -= 1
        for u in pred.get(v, ()):
            outdeg[u] -= 1
            if outdeg[u] == 0:
                queue.append(u)
    return alive > 0


def _member_det(A, w):
    delta, rank, init = A.det_lists
    q = init
    for a in w.spoke:
        q = delta[q][a]
    seen = {}
    safe_blocks = []
    while q not in seen:
        seen[q] = len(safe_blocks)
        ok = True
        for a in w.period:
            ok = ok and rank[q][a] == 2
            q = delta[q][a]
        safe_blocks.append(ok)
    return all(safe_blocks[seen[q]:])


def rank2_scc(A):
    src = [p for p, _a, r, _q in A.transitions if r == 2]
    dst = [q for _p, _a, r, q in A.transitions if r == 2]
    return scc_labels(A.num_states, src, dst)


def normalize(A):
    """Re-rank every rank-2 transition that leaves its safe SCC to rank 1."""
    lab = rank2_scc(A)
    trans = {(p, a, 1 if r == 2 and lab[p] != lab[q] else r, q) for p, a, r, q in A.transitions}
    if trans == A.transitions:
        return A
    return A.replace(transitions=trans)


def restrict_reachable(A):
    """Drop unreachable states, keeping the relative order of the others."""
    src = [p for p, _a, _r, _q in A.transitions]
    dst = [q for _p, _a, _r, q in A.transitions]
    keep = reachable_from(A.num_states, src, dst, sorted(A.initial))
    if keep.all():
        return A
    new = -np.ones(A.num_states, dtype=np.int64)
    new[keep] = np.arange(int(keep.sum()))
    trans = [(int(new[p]), a, r, int(new[q])) for p, a, r, q in A.transitions if keep[p]]
    labels = {int(new[q]): lab for q, lab in A.labels.items() if keep[q]}
    return CoBuchiAutomaton(A.alphabet, int(keep.sum()), [int(new[q]) for q in A.initial], trans, labels)


# ---------------------------------------------------------------------------
# determinization


def _breakpoint_explore(A, roots, cap):
    """Explore breakpoint macrostates (R, S) from the given roots.

    Returns (delta, rank, root_ids, macros); states are numbered in BFS order
    with letters in alphabet order.
    """
    k = A.k
    index, macros = {}, []
    delta_rows, rank_rows = [], []
    img_cache, img2_cache = {}, {}

    def img(m, a, table, cache):
        key = (m, a)
        val = cache.get(key)
        if val is None:
            val = 0
            for q in bits(m):
                val |= table[a][q]
            cache[key] = val
        return val

    def add(mac):
        i = index.get(mac)
        if i is None:
            if len(macros) >= cap:
                raise CapExceeded("determinization exceeded %d states" % cap)
            i = index[mac] = len(macros)
            macros.append(mac)
        return i

    root_ids = [add(r) for r in roots]
    head = 0
    while head < len(macros):
        R, S = macros[head]
        drow, rrow = [], []
        for a in range(k):
            R2 = img(R, a, A.post_masks, img_cache)
            S2 = img(S, a, A.post2_masks, img2_cache)
            if S2:
                drow.append(add((R2, S2)))
                rrow.append(2)
            else:
                drow.append(add((R2, R2)))
                rrow.append(1)
        delta_rows.append(drow)
        rank_rows.append(rrow)
        head += 1
    delta = np.array(delta_rows, dtype=np.int64).reshape(len(macros), k)
    rank = np.array(rank_rows, dtype=np.int64).reshape(len(macros), k)
    return delta, rank, root_ids, macros


def determinize_breakpoint(A, cap=DET_CAP):
    """Deterministic complete normalized automaton with L equal to L(A)."""
    A = complete(A)
    I = to_mask(A.initial)
    delta, rank, _roots, _ = _breakpoint_explore(A, [(I, I)], cap)
    return normalize(from_arrays(A.alphabet, delta, rank, 0))


def moore_reduce(delta, rank, init):
    """Quotient by the coarsest rank-respecting bisimulation; keeps first-index order."""
    n, k = delta.shape
    block = np.zeros(n, dtype=np.int64)
    count = 1
    while True:
        sig = np.column_stack([block] + [block[delta[:, a]] * 2 + (rank[:, a] - 1) for a in range(k)])
        _, first, inv = np.unique(sig, axis=0, return_index=True, return_inverse=True)
        inv = inv.reshape(-1)
        # renumber blocks by first occurrence for stable output
        order = np.argsort(first)
        renum = np.empty_like(order)
        renum[order] = np.arange(len(order))
        new = renum[inv]
        if len(order) == count:
            block = new
            break
        block, count = new, len(order)
    reps = np.array([np.flatnonzero(block == b)[0] for b in range(count)], dtype=np.int64)
    return block[delta[reps]], rank[reps], int(block[init]), block


def det_state_partition(delta, rank):
    """Language-equivalence class id per state of a deterministic complete automaton.

    Works on the full product D×D: L(p) ⊄ L(q) iff (p, q) reaches a cycle that
    is all rank-2 on the p side and takes some rank-1 step on the q side.
    """
    n, k = delta.shape
    N = n * n
    P = np.repeat(np.arange(n), n)
    Q = np.tile(np.arange(n), n)
    src = np.tile(np.arange(N), k)
    dst = np.concatenate([delta[P, a] * n + delta[Q, a] for a in range(k)])
    rp = np.concatenate([rank[P, a] for a in range(k)])
    rq = np.concatenate([rank[Q, a] for a in range(k)])
    m2 = rp == 2
    lab = scc_labels(N, src[m2], dst[m2])
    bad = m2 & (rq == 1) & (lab[src] == lab[dst])
    not_incl = reachable_from(N, dst, src, np.unique(src[bad]))  # reverse edges
    not_incl = not_incl.reshape(n, n)
    eq = ~not_incl & ~not_incl.T
    cls = -np.ones(n, dtype=np.int64)
    c = 0
    for p in range(n):
        if cls[p] < 0:
            cls[eq[p]] = c
            c += 1
    return cls


def _residual_info(A):
    """(cls, post_cls): language class per state and of each a⁻¹L(p)."""
    n, k = A.num_states, A.k
    roots = [(1 << q, 1 << q) for q in range(n)]
    for p in range(n):
        for a in range(k):
            m = A.post_masks[a][p]
            roots.append((m, m))
    delta, rank, root_ids, _ = _breakpoint_explore(A, roots, DET_CAP)
    part = det_state_partition(delta, rank)
    ids = part[np.array(root_ids, dtype=np.int64)]
    return ids[:n].copy(), ids[n:].reshape(n, k).copy()


def residual_classes(A):
    """Language-class id per state (state-rooted languages compared exactly)."""
    return A._residuals[0]


# ---------------------------------------------------------------------------
# normalization, saturation, pruning and structural checks


def unsafe_saturate(A):
    """Add every rank-1 transition p -a-> q with L(q) = a⁻¹L(p)."""
    cls, post_cls = A._residuals
    trans = set(A.transitions)
    for p in range(A.num_states):
        for a in range(A.k):
            trans.update((p, a, 1, q) for q in range(A.num_states) if cls[q] == post_cls[p, a])
    return A.replace(transitions=trans)


def semantic_prune(A):
    """Drop transitions p -a-> q with L(q) ≠ a⁻¹L(p), then re-complete."""
    cls, post_cls = A._residuals
    trans = {(p, a, r, q) for p, a, r, q in A.transitions if cls[q] == post_cls[p, a]}
    return complete(A.replace(transitions=trans))


@dataclass(frozen=True)
class StructuralReport:
    normalized: bool
    semantically_deterministic: bool
    unsafe_saturated: bool
    safe_deterministic: bool


def is_normalized(A):
    lab = rank2_scc(A)
    return all(lab[p] == lab[q] for p, _a, r, q in A.transitions if r == 2)


def is_safe_deterministic(A):
    return all(sum(1 for _q, r in cell if r == 2) <= 1 for row in A.succ for cell in row)


def structural_checks(A):
    cls, post_cls = A._residuals
    semdet = all(cls[q] == post_cls[p, a] for p, a, _r, q in A.transitions)
    sat = all(
        (p, a, 1, q) in A.transitions
        for p in range(A.num_states)
        for a in range(A.k)
        for q in range(A.num_states)
        if cls[q] == post_cls[p, a]
    )
    return StructuralReport(is_normalized(A), semdet, sat, is_safe_deterministic(A))


def hd_certificate(A):
    """Sufficient condition for history-determinism (False does not refute it)."""
    r = structural_checks(A)
    return r.semantically_deterministic and r.unsafe_saturated and r.safe_deterministic


# ---------------------------------------------------------------------------
# resolver


@dataclass(frozen=True)
class ResolverState:
    """Base/top-state resolver position after reading ``word``.

    The word is kept because recomputing a base needs the prefix read so far.
    ``last_rank`` is the rank of the transition taken by the last step (0 at start).
    """

    word: tuple
    base_prefix_len: int
    base_state: int
    top_state: int
    last_rank: int = 0

    @property
    def word_read_len(self):
        return len(self.word)


def _order_key(order):
    if order is None:
        return lambda q: q
    pos = {q: i for i, q in enumerate(order)}
    return lambda q: pos[q]


def resolver_start(A, order=None):
    key = _order_key(order)
    p = min(A.initial, key=key)
    return ResolverState((), 0, p, p)


def resolver_step(A, rs, a, order=None):
    key = _order_key(order)
    word = rs.word + (a,)
    safe = [q for q, r in A.succ[rs.top_state][a] if r == 2]
    if safe:
        return ResolverState(word, rs.base_prefix_len, rs.base_state, min(safe, key=key), 2)
    reach = A.reach_mask(word[: rs.base_prefix_len])
    for j in range(rs.base_prefix_len, len(word) + 1):
        for p in sorted(bits(reach), key=key):
            top = safe_reach(A, [p], word[j:])
            if top:
                return ResolverState(word, j, p, min(top, key=key), 1)
        if j < len(word):
            reach = A.image(reach, word[j])
    raise RuntimeError("resolver has no continuation; is the automaton complete?")


def resolver_run(A, w, steps, order=None):
    """Ranks of the first ``steps`` resolver transitions on ``w`` (a UPWord)."""
    rs = resolver_start(A, order)
    ranks = []
    for i in range(steps):
        prev = rs.top_state
        rs = resolver_step(A, rs, w.letter_at(i), order)
        if not any(q == rs.top_state and (rs.last_rank == 1 or r == 2) for q, r in A.succ[prev][w.letter_at(i)]):
            raise RuntimeError("resolver moved along a missing transition")
        ranks.append(rs.last_rank)
    return ranks


# ---------------------------------------------------------------------------
# equivalence


def _as_det(A, cap):
    A = complete(A)
    if not (A.is_deterministic and A.is_complete):
        A = determinize_breakpoint(A, cap)
    return A.arrays()


def _product(dA, dB, cap):
    """BFS over the reachable product; nodes in length-lex order of access words."""
    (delta_a, rank_a, ia), (delta_b, rank_b, ib) = dA, dB
    k = delta_a.shape[1]
    da, ra, db, rb = delta_a.tolist(), rank_a.tolist(), delta_b.tolist(), rank_b.tolist()
    index = {(ia, ib): 0}
    nodes = [(ia, ib)]
    parent, via = [-1], [-1]
    src, dst, let, r1, r2 = [], [], [], [], []
    head = 0
    while head < len(nodes):
        p, q = nodes[head]
        for a in range(k):
            t = (da[p][a], db[q][a])
            j = index.get(t)
            if j is None:
                if len(nodes) >= cap:
                    raise CapExceeded("product exceeded %d states" % cap)
                j = index[t] = len(nodes)
                nodes.append(t)
                parent.append(head)
                via.append(a)
            src.append(head)
            dst.append(j)
            let.append(a)
            r1.append(ra[p][a])
            r2.append(rb[q][a])
        head += 1
    return nodes, parent, via, tuple(np.array(x, dtype=np.int64) for x in (src, dst, let, r1, r2))


def _access(parent, via, i):
    out = []
    while i > 0:
        out.append(via[i])
        i = parent[i]
    return tuple(reversed(out))


def _violation(nodes, parent, via, edges, side):
    """Least lasso in L(first) minus L(second) (side 0) or the reverse (side 1)."""
    src, dst, let, r1, r2 = edges
    ra, rb = (r1, r2) if side == 0 else (r2, r1)
    N = len(nodes)
    m2 = ra == 2
    lab = scc_labels(N, src[m2], dst[m2])
    bad = m2 & (rb == 1) & (lab[src] == lab[dst])
    if not bad.any():
        return None
    bad_labels = set(lab[src[bad]].tolist())
    node = min(i for i in range(N) if lab[i] in bad_labels)
    comp = lab[node]
    inside = m2 & (lab[src] == comp) & (lab[dst] == comp)
    out = {}
    for s, d, a, b in zip(src[inside].tolist(), dst[inside].tolist(), let[inside].tolist(), rb[inside].tolist()):
        out.setdefault(s, []).append((a, d, b))
    for s in out:
        out[s].sort()

    def bfs(start, goal_edge):
        prev = {start: None}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for a, d, b in out.get(x, ()):
                if goal_edge(a, d, b):
                    path, y = [a], x
                    while prev[y] is not None:
                        y, c = prev[y]
                        path.append(c)
                    return tuple(reversed(path)), d
                if d not in prev:
                    prev[d] = (x, a)
                    queue.append(d)
        return None, None

    first, mid = bfs(node, lambda a, d, b: b == 1)
    if mid == node:
        back = ()
    else:
        back, _ = bfs(mid, lambda a, d, b: d == node)
    return UPWord(_access(parent, via, node), first + back)


def includes(A, B, cap=DET_CAP):
    """(L(A) ⊆ L(B), witness in L(A) minus L(B) or None)."""
    _same_alphabet(A, B)
    nodes, parent, via, edges = _product(_as_det(A, cap), _as_det(B, cap), cap)
    w = _violation(nodes, parent, via, edges, 0)
    return w is None, w


def equivalent(A, B, cap=DET_CAP):
    """(L(A) = L(B), least counterexample lasso or None)."""
    _same_alphabet(A, B)
    nodes, parent, via, edges = _product(_as_det(A, cap), _as_det(B, cap), cap)
    ws = [w for w in (_violation(nodes, parent, via, edges, s) for s in (0, 1)) if w is not None]
    if not ws:
        return True, None
    return False, min(ws, key=lambda w: (len(w), llkey(w.spoke + w.period)))


def _same_alphabet(A, B):
    if A.alphabet != B.alphabet:
        raise AlphabetError("alphabet mismatch: %r vs %r" % (A.alphabet, B.alphabet))


def safe_language_equal(A, S1, S2, cap=DET_CAP):
    """Whether the state sets accept the same finite words using rank-2 transitions."""
    start = (to_mask(S1), to_mask(S2))
    seen = {start}
    queue = deque([start])
    while queue:
        m1, m2 = queue.popleft()
        if bool(m1) != bool(m2):
            return False
        if not m1:
            continue
        for a in range(A.k):
            t = (A.image2(m1, a), A.image2(m2, a))
            if t not in seen:
                if len(seen) >= cap:
                    raise CapExceeded("subset construction exceeded %d states" % cap)
                seen.add(t)
                queue.append(t)
    return True


def isomorphic(A, B):
    """Graph isomorphism respecting letters, ranks and initial flags (labels ignored)."""
    if A.alphabet != B.alphabet or A.num_states != B.num_states or len(A.transitions) != len(B.transitions):
        return False
    return nx.is_isomorphic(
        _as_graph(A), _as_graph(B),
        node_match=lambda x, y: x["init"] == y["init"],
        edge_match=lambda x, y: x["lab"] == y["lab"],
    )


def _as_graph(A):
    g = nx.DiGraph()
    for q in range(A.num_states):
        g.add_node(q, init=q in A.initial)
    labs = {}
    for p, a, r, q in A.transitions:
        labs.setdefault((p, q), set()).add((a, r))
    for (p, q), lab in labs.items():
        g.add_edge(p, q, lab=frozenset(lab))
    return g
