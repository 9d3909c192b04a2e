"""Passive learner: the idealized algorithm with every language test replaced by a sample test.

All sample predicates only use positive evidence, so a true verdict stays true
on every extension of the sample. Existential quantifiers range over finite
candidate sets read off the sample entries (prefixes and periodic
decompositions up to a length budget).
"""
from dataclasses import dataclass, field

from hdcw.automaton import (
    CoBuchiAutomaton,
    complete,
    includes,
    member_up,
    unsafe_saturate,
)
from hdcw.canonical import Component, PairState
from hdcw.samples import Sample
from hdcw.words import EPS, UPWord, canonicalize, is_prefix_of_power, llkey, residual


class Abort(Exception):
    """The sample is too thin for a coherent run."""


def _sorted(words):
    return sorted(set(words), key=llkey)


class SampleContext:
    """Sample-relative predicates with memoization; R is set once found."""

    def __init__(self, sample, R=None):
        self.sample = sample
        self.R = list(R) if R is not None else None
        self.k = len(sample.alphabet)
        self.index = dict(sample.labels)
        ents = list(sample.labels.items())
        self._entries = ents
        self.budget = max([len(w.spoke) + 2 * len(w.period) for w, _ in ents] + [0])
        self.max_period = max([len(w.period) for w, _ in ents] + [1])
        self._prefix_idx = None
        self._cache = {}
        self.log = None  # optional list receiving (predicate, args, verdict)

    def _memo(self, key, fn):
        c = self._cache
        if key not in c:
            c[key] = fn()
            if self.log is not None:
                self.log.append((key[0], key[1:], c[key]))
        return c[key]

    # -- membership -------------------------------------------------------

    def label(self, u, v):
        if not v:
            return None
        return self.index.get(canonicalize(UPWord(tuple(u), tuple(v))))

    def in_S(self, u, v):
        return self.label(u, v) is True

    def notin_S(self, u, v):
        return self.label(u, v) is False

    # -- decompositions -----------------------------------------------------

    def prefix_index(self):
        """prefix -> {residual: label} for prefixes up to the budget."""
        if self._prefix_idx is None:
            idx = {}
            for w, lab in self._entries:
                for n in range(self.budget + 1):
                    x = w.prefix(n)
                    idx.setdefault(x, {})[residual(w, x)] = lab
            self._prefix_idx = idx
        return self._prefix_idx

    def residuals(self, x):
        """{r: label} over entries x·r."""
        x = tuple(x)
        if len(x) <= self.budget:
            return self.prefix_index().get(x, {})
        return self._memo(("res", x), lambda: {
            r: lab for r, lab in ((residual(w, x), lab) for w, lab in self._entries) if r is not None})

    def loops(self, u, v, label):
        """x with (u, v x) labeled ``label`` in S, v x nonempty and |x| within budget."""
        u, v = tuple(u), tuple(v)

        def compute():
            out = set()
            for r, lab in self.residuals(u).items():
                if lab != label or r.spoke:
                    continue
                p = r.period
                P = len(p)
                if not is_prefix_of_power(v, p):
                    continue
                j = max(1, -(-len(v) // P))
                while j * P - len(v) <= self.budget:
                    out.add(tuple(p[i % P] for i in range(len(v), j * P)))
                    j += 1
            return _sorted(out)

        return self._memo(("loops", u, v, label), compute)

    def extensions(self, u, v):
        """x with v x a prefix of some positive periodic word after u, |x| within budget."""
        u, v = tuple(u), tuple(v)

        def compute():
            out = set()
            for r, lab in self.residuals(u).items():
                if lab and not r.spoke and is_prefix_of_power(v, r.period):
                    p, P = r.period, len(r.period)
                    for n in range(self.budget + 1):
                        out.add(tuple(p[i % P] for i in range(len(v), len(v) + n)))
            return _sorted(out)

        return self._memo(("ext", u, v), compute)

    # -- ∼ ----------------------------------------------------------------------

    def nsim_S(self, x, y):
        x, y = tuple(x), tuple(y)
        if x == y:
            return False
        if llkey(y) < llkey(x):
            x, y = y, x

        def compute():
            dx, dy = self.residuals(x), self.residuals(y)
            if len(dy) < len(dx):
                dx, dy = dy, dx
            return any(dy.get(r, lab) != lab for r, lab in dx.items())

        return self._memo(("nsim", x, y), compute)

    def separated(self, x):
        x = tuple(x)
        return self._memo(("sep", x), lambda: frozenset(i for i, r in enumerate(self.R) if self.nsim_S(x, r)))

    def sim_S(self, x, y):
        """Some u ∈ R is the only representative not separated from x and y."""
        if self.R is None:
            raise ValueError("sim_S needs R")
        both = self.separated(x) & self.separated(y)
        return len(self.R) - len(both) <= 1

    # -- ⊥ and ≈ ----------------------------------------------------------------

    def not_bot_S(self, u, v):
        u, v = tuple(u), tuple(v)
        if not v:
            return True
        return self._memo(("not_bot", u, v), lambda: any(
            self.sim_S(u + v + x, u) for x in self.loops(u, v, True)))

    def bot_S(self, u, v):
        return not self.not_bot_S(u, v)

    def napprox_S(self, p1, p2):
        (u, v), (u2, v2) = (tuple(p1[0]), tuple(p1[1])), (tuple(p2[0]), tuple(p2[1]))

        def compute():
            if self.nsim_S(u, u2) or self.nsim_S(u + v, u2 + v2):
                return True
            for label in (True, False):
                for x in self.loops(u, v, label):
                    if self.label(u2, v2 + x) == (not label) and self.sim_S(u + v + x, u):
                        return True
            return False

        return self._memo(("napprox", u, v, u2, v2), compute)


# ---------------------------------------------------------------------------
# the learner and its sub-steps


def find_R_S(S, ctx=None):
    ctx = ctx or SampleContext(S)
    pool = _sorted(ctx.prefix_index())
    R = [EPS]
    while True:
        D = next((x for x in pool if x not in R and all(ctx.nsim_S(x, y) for y in R)), None)
        if D is None:
            return R
        R.append(D)


def find_NT_S(R, ctx):
    return [u for u in R if any(x and ctx.sim_S(u + x, u) for x in ctx.loops(u, EPS, True))]


def automaton_S(R, comps, ctx):
    """A[C] with rank-1 edges and initial states decided by ∼_S."""
    pairs, trans = [], set()
    for comp in comps:
        base = len(pairs)
        pairs.extend(comp.members)
        trans.update((base + i, a, 2, base + j) for (i, a), j in comp.delta2.items())
    words = [p.u + p.v for p in pairs]
    for s, w in enumerate(words):
        for a in range(ctx.k):
            trans.update((s, a, 1, t) for t, w2 in enumerate(words) if ctx.sim_S(w + (a,), w2))
    initial = [s for s, w in enumerate(words) if ctx.sim_S(w, EPS)]
    labels = {s: p.text(ctx.sample.alphabet) for s, p in enumerate(pairs)}
    return complete(CoBuchiAutomaton(ctx.sample.alphabet, len(pairs), initial, trans, labels))


def differs_S(A, ctx):
    """L ≠_S L(A)."""
    return any(member_up(A, w) != lab for w, lab in ctx.sample.labels.items())


def find_u_S(A, R, ctx):
    for u in R:
        for x in ctx.loops(u, EPS, True):
            if x and ctx.sim_S(u + x, u) and not member_up(A, UPWord(u, x)):
                return u
    return None


def find_x_S(u, A, R, ctx):
    for y in ctx.loops(u, EPS, True):
        if y and ctx.sim_S(u + y, u) and not member_up(A, UPWord(u, y)):
            return y
    return None


def construct_S(u, v, R, ctx):
    """C(u, v): ≈_S-representatives extending (u, v) and their rank-2 edges."""
    u, v = tuple(u), tuple(v)
    pool = ctx.extensions(u, v)
    K = [EPS]
    while True:
        x = next((x for x in pool if x not in K and ctx.not_bot_S(u, v + x)
                  and all(ctx.napprox_S((u, v + x), (u, v + y)) for y in K)), None)
        if x is None:
            break
        K.append(x)
    delta2 = {}
    for i, x in enumerate(K):
        for a in range(ctx.k):
            xa = v + x + (a,)
            if not ctx.not_bot_S(u, xa):
                continue
            T = [j for j in range(len(K))
                 if all(ctx.napprox_S((u, xa), (u, v + z)) for zi, z in enumerate(K) if zi != j)]
            if len(T) > 1:
                raise Abort("ambiguous rank-2 edge in a component")
            if T:
                delta2[(i, a)] = T[0]
    return Component(PairState(u, v), [PairState(u, v + x) for x in K], delta2)


@dataclass
class PassiveTrace:
    u: tuple
    v: tuple
    loop1: list = field(default_factory=list)
    loop2: list = field(default_factory=list)
    result: tuple = None


def find_pointed_in_S(u, v, R, ctx, trace=None):
    u, v = tuple(u), tuple(v)
    trace = trace if trace is not None else PassiveTrace(u, v)
    vbar = v
    while True:
        x = next((x for x in ctx.loops(u, vbar, False)
                  if x and ctx.sim_S(u, u + vbar + x) and ctx.not_bot_S(u, vbar + x + vbar)), None)
        if x is None:
            break
        step = x + vbar
        mmax = 2 + (ctx.max_period + len(vbar)) // len(step)
        m = max(m for m in range(1, mmax + 1) if m == 1 or ctx.not_bot_S(u, vbar + step * m))
        trace.loop1.append((x, m))
        vbar = vbar + step * m
    w = EPS
    while True:
        y = w + vbar
        cands = set()
        for r, lab in ctx.residuals(u).items():
            if not lab or r.spoke or not is_prefix_of_power(y, r.period):
                continue
            p, P = r.period, len(r.period)
            for i in range(len(y) + 1, len(y) + ctx.budget + 1):
                if all(p[(i + t) % P] == vbar[t] for t in range(len(vbar))):
                    cands.add(tuple(p[t % P] for t in range(len(y), i)))
        x = next((x for x in _sorted(cands)
                  if ctx.sim_S(u, u + y + x) and ctx.not_bot_S(u, y + x + vbar)
                  and ctx.napprox_S((u, y + x + vbar), (u, y))), None)
        if x is None:
            break
        trace.loop2.append(x)
        w = y + x
    trace.result = w + vbar
    return PairState(u, w + vbar), trace


def default_automaton(S):
    """An HD automaton accepting exactly the positive words of S."""
    from hdcw.oracle import prepare_reference

    k = len(S.alphabet)
    trans, initial, n = set(), [], 0
    for w in sorted(S.positives, key=lambda w: (llkey(w.spoke), llkey(w.period))):
        spoke, period = w.spoke, w.period
        states = list(range(n, n + len(spoke) + len(period)))
        n += len(states)
        initial.append(states[0])
        for i, a in enumerate(spoke):
            trans.add((states[i], a, 1, states[i + 1]))
        c0 = len(spoke)
        for j, a in enumerate(period):
            trans.add((states[c0 + j], a, 2, states[c0 + (j + 1) % len(period)]))
    A = complete(CoBuchiAutomaton(S.alphabet, n, initial, trans))
    return unsafe_saturate(prepare_reference(A))


@dataclass
class LearnResult:
    automaton: CoBuchiAutomaton
    aborted: bool
    reason: str = ""
    R: list = field(default_factory=list)
    components: list = field(default_factory=list)
    traces: list = field(default_factory=list)


def learn_verbose(S, ctx=None):
    ctx = ctx or SampleContext(S)
    try:
        return _learn(S, ctx)
    except Abort as exc:
        return LearnResult(default_automaton(S), True, str(exc))


def learn(S):
    return learn_verbose(S).automaton


def _learn(S, ctx):
    R = find_R_S(S, ctx)
    ctx.R = R
    NT = find_NT_S(R, ctx)
    comps = [Component(PairState(u, EPS), [PairState(u, EPS)], {}) for u in R if u not in NT]
    A = automaton_S(R, comps, ctx)
    traces = []
    for _ in range(len(S.labels) + 1):
        if not differs_S(A, ctx):
            return LearnResult(A, False, "", R, comps, traces)
        u = find_u_S(A, R, ctx)
        if u is None:
            raise Abort("no u")
        x = find_x_S(u, A, R, ctx)
        if x is None:
            raise Abort("no x")
        d = max([len(c) for c in comps] + [1])
        pair, trace = find_pointed_in_S(u, x * d, R, ctx)
        traces.append(trace)
        comp = construct_S(pair.u, pair.v, R, ctx)
        A2 = automaton_S(R, comps + [comp], ctx)
        grows = includes(A, A2)[0] and not includes(A2, A)[0]
        if not grows or any(member_up(A2, w) for w in S.negatives):
            raise Abort("hypothesis did not grow consistently")
        comps.append(comp)
        A = A2
    raise Abort("iteration bound")
