"""Finite and ultimately periodic words.

Words are tuples of letter indices; the alphabet order is the index order, so
``(len(w), w)`` is the length-lexicographic key.
"""
from dataclasses import dataclass

from hdcw.errors import AlphabetError, FormatError

EPS = ()


def llkey(w):
    return (len(w), w)


def ll_min(words):
    return min(words, key=llkey)


@dataclass(frozen=True)
class UPWord:
    """The ultimately periodic word ``spoke · period^ω``."""

    spoke: tuple
    period: tuple

    def __post_init__(self):
        object.__setattr__(self, "spoke", tuple(self.spoke))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise ValueError("period must be nonempty")

    def __len__(self):
        return len(self.spoke) + len(self.period)

    def letter_at(self, i):
        s = len(self.spoke)
        return self.spoke[i] if i < s else self.period[(i - s) % len(self.period)]

    def prefix(self, n):
        return tuple(self.letter_at(i) for i in range(n))


def primitive_root(p):
    n = len(p)
    for d in range(1, n + 1):
        if n % d == 0 and p[:d] * (n // d) == p:
            return p[:d]
    return p


def canonicalize(w):
    """Unique representative: primitive period, shortest spoke."""
    spoke, period = tuple(w.spoke), primitive_root(tuple(w.period))
    while spoke and spoke[-1] == period[-1]:
        spoke = spoke[:-1]
        period = period[-1:] + period[:-1]
    return UPWord(spoke, period)


def is_prefix_of_power(x, p, offset=0):
    """Whether x is a prefix of the infinite word (p rotated by offset)^ω."""
    n = len(p)
    return all(c == p[(offset + i) % n] for i, c in enumerate(x))


def residual(e, x):
    """Canonical form of x⁻¹e, or None when x is not a prefix of e."""
    s, p = e.spoke, e.period
    if len(x) <= len(s):
        if s[: len(x)] != tuple(x):
            return None
        return canonicalize(UPWord(s[len(x):], p))
    if tuple(x[: len(s)]) != s:
        return None
    rest = x[len(s):]
    if not is_prefix_of_power(rest, p):
        return None
    r = len(rest) % len(p)
    return UPWord((), p[r:] + p[:r])


def prepend(x, e):
    return canonicalize(UPWord(tuple(x) + e.spoke, e.period))


def up_equal_positional(w1, w2):
    """Compare two UP words letter by letter over a sufficient horizon."""
    n = max(len(w1.spoke), len(w2.spoke)) + len(w1.period) * len(w2.period)
    return all(w1.letter_at(i) == w2.letter_at(i) for i in range(n))


class Alphabet:
    """Ordered symbol list with text encoding of words."""

    def __init__(self, symbols):
        self.symbols = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols) or not self.symbols:
            raise AlphabetError("alphabet symbols must be distinct and nonempty")
        for s in self.symbols:
            if not s or any(c.isspace() for c in s) or any(c in ":.#" for c in s):
                raise AlphabetError("bad symbol %r" % s)
        self.index = {s: i for i, s in enumerate(self.symbols)}
        self.prefix_free = not any(
            a != b and b.startswith(a) for a in self.symbols for b in self.symbols
        )

    def __len__(self):
        return len(self.symbols)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return "Alphabet(%r)" % (self.symbols,)

    def parse_word(self, text):
        """Parse a finite word; '.' or whitespace may separate symbols."""
        text = text.strip()
        if not text:
            return EPS
        out = []
        for chunk in text.replace(".", " ").split():
            out.extend(self._tokenize(chunk))
        return tuple(out)

    def _tokenize(self, chunk):
        # dynamic programming split of chunk into symbols; ambiguity is an error
        n = len(chunk)
        ways = [None] * (n + 1)
        ways[0] = ()
        count = [0] * (n + 1)
        count[0] = 1
        for i in range(n):
            if not count[i]:
                continue
            for s, idx in self.index.items():
                if chunk.startswith(s, i):
                    j = i + len(s)
                    count[j] += count[i]
                    if ways[j] is None:
                        ways[j] = ways[i] + (idx,)
        if not count[n]:
            raise AlphabetError("cannot read %r over alphabet %s" % (chunk, " ".join(self.symbols)))
        if count[n] > 1:
            raise FormatError("ambiguous word %r; separate symbols with '.'" % chunk)
        return ways[n]

    def parse_up(self, text):
        if text.count(":") != 1:
            raise FormatError("expected u:v, got %r" % text)
        u, v = text.split(":")
        period = self.parse_word(v)
        if not period:
            raise FormatError("empty period in %r" % text)
        return UPWord(self.parse_word(u), period)

    def format_word(self, w):
        sep = "" if self.prefix_free else "."
        return sep.join(self.symbols[a] for a in w)

    def format_up(self, w):
        return "%s:%s" % (self.format_word(w.spoke), self.format_word(w.period))
