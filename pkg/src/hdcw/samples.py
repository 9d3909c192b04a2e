"""Samples of ultimately periodic words, their text format, and characteristic samples."""
import random
from dataclasses import dataclass, field

from hdcw.errors import FormatError, SampleConflict
from hdcw.words import EPS, Alphabet, UPWord, canonicalize, llkey

SAMPLE_HEADER = "sample v1"


def up_key(w):
    return (len(w.spoke) + len(w.period), llkey(w.spoke + w.period), len(w.spoke))


class Sample:
    """Labeled UP words, stored in canonical form; immutable."""

    def __init__(self, alphabet, positives=(), negatives=()):
        self.alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
        labels = {}
        for label, words in ((True, positives), (False, negatives)):
            for w in words:
                c = canonicalize(w)
                if labels.get(c, label) != label:
                    raise SampleConflict("%s is labeled both ways" % self.alphabet.format_up(c))
                labels[c] = label
        self.labels = labels
        self.positives = frozenset(w for w, lab in labels.items() if lab)
        self.negatives = frozenset(w for w, lab in labels.items() if not lab)

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        return isinstance(other, Sample) and self.alphabet == other.alphabet and self.labels == other.labels

    def __hash__(self):
        return hash((self.alphabet, self.positives, self.negatives))

    def __repr__(self):
        return "Sample(+%d, -%d)" % (len(self.positives), len(self.negatives))

    @property
    def size(self):
        return sum(len(w) for w in self.labels)

    def label(self, w):
        """True / False for a labeled word (any representation), None when absent."""
        return self.labels.get(canonicalize(w))

    def entries(self):
        """(word, label) pairs in a fixed order."""
        return sorted(self.labels.items(), key=lambda e: up_key(e[0]))

    def extend(self, labeled):
        """New sample with the extra (word, label) pairs added."""
        pos, neg = set(self.positives), set(self.negatives)
        for w, lab in labeled:
            (pos if lab else neg).add(w)
        return Sample(self.alphabet, pos, neg)


def dumps(S):
    lines = [SAMPLE_HEADER, "alphabet " + " ".join(S.alphabet.symbols)]
    for w, lab in S.entries():
        lines.append("%s %s" % ("+" if lab else "-", S.alphabet.format_up(w)))
    return "\n".join(lines) + "\n"


def loads(text):
    alphabet, pos, neg = None, [], []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if not seen_header:
                if line != SAMPLE_HEADER:
                    raise FormatError("expected %r header" % SAMPLE_HEADER)
                seen_header = True
            elif line.startswith("alphabet"):
                alphabet = Alphabet(line.split()[1:])
            elif line[0] in "+-":
                if alphabet is None:
                    raise FormatError("entry before alphabet")
                w = alphabet.parse_up(line[1:].strip())
                (pos if line[0] == "+" else neg).append(w)
            else:
                raise FormatError("cannot parse %r" % line)
        except FormatError as exc:
            if isinstance(exc, SampleConflict):
                raise
            raise FormatError("line %d: %s" % (lineno, exc)) from None
        except ValueError as exc:
            raise FormatError("line %d: %s" % (lineno, exc)) from None
    if alphabet is None:
        raise FormatError("missing alphabet line")
    return Sample(alphabet, pos, neg)


def read(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def write(S, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(S))


# ---------------------------------------------------------------------------
# consistency and random extension


def consistent_with(S, o):
    return all(o.mem_up(w) == lab for w, lab in S.labels.items())


def random_up(rng, k, max_spoke=6, max_period=6):
    u = tuple(rng.randrange(k) for _ in range(rng.randint(0, max_spoke)))
    v = tuple(rng.randrange(k) for _ in range(rng.randint(1, max_period)))
    return UPWord(u, v)


def extend_consistently(S, o, n, seed=0):
    """S plus n seeded random UP words labeled by the oracle."""
    rng = random.Random(seed)
    extra = [random_up(rng, len(S.alphabet)) for _ in range(n)]
    return S.extend((w, o.mem_up(w)) for w in extra)


def random_sample(alphabet, rng, n_entries, max_spoke=6, max_period=6):
    """Arbitrary labels; a word drawn twice keeps its first label."""
    alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
    labels = {}
    for _ in range(n_entries):
        w = canonicalize(random_up(rng, len(alphabet), max_spoke, max_period))
        labels.setdefault(w, rng.random() < 0.5)
    return Sample(alphabet, [w for w, lab in labels.items() if lab], [w for w, lab in labels.items() if not lab])


# ---------------------------------------------------------------------------
# characteristic samples


@dataclass
class WitnessLog:
    """(predicate, arguments, verdict, emitted entries) in emission order."""

    records: list = field(default_factory=list)

    def add(self, pred, args, verdict, entries):
        self.records.append((pred, args, verdict, tuple(entries)))

    def entries(self):
        out = {}
        for _p, _a, _v, es in self.records:
            for w, lab in es:
                out[canonicalize(w)] = lab
        return out

    def as_sample(self, alphabet):
        es = self.entries()
        return Sample(alphabet, [w for w, lab in es.items() if lab], [w for w, lab in es.items() if not lab])


class _Emitter:
    """Turns the steps of an idealized run into the sample entries that make them stick."""

    def __init__(self, o):
        self.o = o
        self.log = WitnessLog()
        self.reps = list(o.residual_reps)
        self._class_done = set()

    def lasso(self, u, v):
        w = UPWord(tuple(u), tuple(v))
        return (w, self.o.mem_up(w))

    def separate(self, x, r):
        """Entries with x t s^ω and r t s^ω labeled differently."""
        ts = self.o.class_distinguisher(self.o.class_of(x), self.o.class_of(r))
        return [self.lasso(tuple(x) + ts.spoke, ts.period), self.lasso(tuple(r) + ts.spoke, ts.period)]

    def cls(self, x):
        """x ≁_S r for every representative r outside the class of x."""
        x = tuple(x)
        if x in self._class_done:
            return
        self._class_done.add(x)
        c = self.o.class_of(x)
        entries = []
        for r in self.reps:
            if self.o.class_of(r) != c:
                entries += self.separate(x, r)
        self.log.add("sim", (x,), True, entries)

    def not_bot(self, u, v):
        if not v:
            return
        y = self.o.loop_witness(u, v)
        if y is None:
            raise AssertionError("expected a non-⊥ pair")
        self.cls(tuple(u) + tuple(v) + y)
        self.log.add("not_bot", (u, v), True, [self.lasso(u, tuple(v) + y)])

    def napprox(self, p1, p2):
        (u, v), (u2, v2) = p1, p2
        kind = self.o.approx_distinguisher(p1, p2)
        if kind is None:
            raise AssertionError("expected ≉ pairs")
        if kind[0] == "class":
            if self.o.class_of(u) != self.o.class_of(u2):
                entries = self.separate(u, u2)
            else:
                entries = self.separate(tuple(u) + tuple(v), tuple(u2) + tuple(v2))
        else:
            z = kind[1]
            self.cls(tuple(u) + tuple(v) + z)
            entries = [self.lasso(u, tuple(v) + z), self.lasso(u2, tuple(v2) + z)]
        self.log.add("napprox", (p1, p2), True, entries)


class _CharObserver:
    def __init__(self, em):
        self.em = em
        self.comps = []

    def on_reps(self, reps):
        em = self.em
        for i, x in enumerate(reps):
            for y in reps[:i]:
                em.log.add("nsim", (x, y), True, em.separate(x, y) + em.separate(y, x))
            em.cls(x)

    def on_nt(self, u, verdict):
        if verdict:
            x = self.em.o.loop_witness(u, EPS)
            self.em.cls(tuple(u) + x)
            self.em.log.add("nt", (u,), True, [self.em.lasso(u, x)])

    def on_lasso(self, u, x, tried):
        self.em.cls(tuple(u) + x)
        self.em.log.add("find_x", (u,), x, [self.em.lasso(u, x)])

    def on_find_pointed(self, trace):
        em, u = self.em, trace.u
        vbar = trace.v
        for x, m in trace.loop1:
            em.cls(u + vbar + x)
            em.not_bot(u, vbar + x + vbar)
            em.log.add("loop1", (u, vbar), x, [em.lasso(u, vbar + x)])
            vm = vbar + (x + vbar) * m
            em.not_bot(u, vm)
            vbar = vm
        w = EPS
        for x in trace.loop2:
            em.cls(u + w + vbar + x)
            em.not_bot(u, w + vbar + x + vbar)
            em.napprox((u, w + vbar + x + vbar), (u, w + vbar))
            w = w + vbar + x

    def on_component(self, comp):
        self.comps.append(comp)
        em = self.em
        u = comp.anchor.u
        members = [m.v for m in comp.members]
        for i, vi in enumerate(members):
            em.not_bot(u, vi)
            for vj in members[:i]:
                em.napprox((u, vi), (u, vj))
        for (i, a), j in comp.delta2.items():
            va = members[i] + (a,)
            em.not_bot(u, va)
            for z, vz in enumerate(members):
                if z != j:
                    em.napprox((u, va), (u, vz))

    def on_final(self, ca):
        em = self.em
        k = em.o.k
        for p in ca.pairs:
            if p is None:
                continue
            em.cls(p.u + p.v)
            for a in range(k):
                em.cls(p.u + p.v + (a,))
        em.cls(EPS)


def charsample(o, log=None, pointed=()):
    """A sample on which the passive learner repeats the idealized run for o.

    ``pointed`` lists extra (u, v) inputs whose FindPointed runs should also
    be reproducible from the sample.
    """
    from hdcw.canonical import find_pointed, idealized_learn

    em = _Emitter(o)
    obs = _CharObserver(em)
    idealized_learn(o, obs)
    for u, v in pointed:
        obs.on_find_pointed(find_pointed(o, u, v)[1])
    if log is not None:
        log.records.extend(em.log.records)
    return em.log.as_sample(o.alphabet)
