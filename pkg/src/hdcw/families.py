"""Reference automata for the three example language families.

* ``allfin(k)``: words over a1..ak that do not contain every letter infinitely often.
* ``astart``: words over a, b, c that start with a and have finitely many c or
  a finite odd number of b.
* ``counter(k)``: the counter family over a0..a(k+1) whose minimal automaton
  has states q_i^0, q_i^1 for i = 0..k.
"""
from dataclasses import dataclass

from hdcw.automaton import CoBuchiAutomaton

FAMILIES = ("allfin", "astart", "counter")


@dataclass(frozen=True)
class FamilySpec:
    family: str
    k: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError("unknown family %r (expected one of %s)" % (self.family, ", ".join(FAMILIES)))
        if self.k < 1:
            raise ValueError("k must be positive")

    @property
    def name(self):
        return self.family if self.family == "astart" else "%s(%d)" % (self.family, self.k)


def alphabet_of(spec):
    if spec.family == "allfin":
        return ["a%d" % i for i in range(1, spec.k + 1)]
    if spec.family == "astart":
        return ["a", "b", "c"]
    return ["a%d" % i for i in range(spec.k + 2)]


def _all_rank1(n, k):
    return {(p, a, 1, q) for p in range(n) for a in range(k) for q in range(n)}


def allfin(k):
    # state i stands for "letter a(i+1) is eventually absent"
    trans = _all_rank1(k, k)
    trans |= {(i, j, 2, i) for i in range(k) for j in range(k) if j != i}
    labels = {i: "no a%d" % (i + 1) for i in range(k)}
    return CoBuchiAutomaton(alphabet_of(FamilySpec("allfin", k)), k, range(k), trans, labels)


# residual classes of astart and their letter successors
_ASTART_CLASS = {0: "eps", 1: "b", 2: "a", 3: "ab", 4: "ab"}
_ASTART_NEXT = {
    "eps": ("a", "b", "b"),
    "a": ("a", "ab", "a"),
    "ab": ("ab", "a", "ab"),
    "b": ("b", "b", "b"),
}


def astart():
    a, b, c = 0, 1, 2
    trans = set()
    for p, cls in _ASTART_CLASS.items():
        for letter, target in enumerate(_ASTART_NEXT[cls]):
            trans.update((p, letter, 1, q) for q, qc in _ASTART_CLASS.items() if qc == target)
    trans |= {(2, a, 2, 2), (2, b, 2, 3), (3, b, 2, 2), (3, a, 2, 3), (4, a, 2, 4), (4, c, 2, 4)}
    labels = {0: ":", 1: "b:", 2: "a:", 3: "a:b", 4: "ab:c"}
    return CoBuchiAutomaton(["a", "b", "c"], 5, [0], trans, labels)


def counter_state(i, h):
    return 2 * i + h


def counter(k):
    n, letters = 2 * (k + 1), k + 2
    trans = _all_rank1(n, letters)
    for i in range(k + 1):
        q0, q1 = counter_state(i, 0), counter_state(i, 1)
        trans.add((q0, i, 2, q1))
        trans.update((q1, j, 2, q0) for j in range(i + 1, letters))
        trans.update((q, j, 2, q) for j in range(i) for q in (q0, q1))
    labels = {counter_state(i, h): "q%d^%d" % (i, h) for i in range(k + 1) for h in (0, 1)}
    return CoBuchiAutomaton(alphabet_of(FamilySpec("counter", k)), n, range(n), trans, labels)


def make(spec):
    if spec.family == "allfin":
        return allfin(spec.k)
    if spec.family == "astart":
        return astart()
    return counter(spec.k)


def family_facts(spec):
    """Quantities the language family is known to have."""
    k = spec.k
    if spec.family == "allfin":
        return {"canonical_states": k, "equivL_classes": 2**k, "pointed_classes": k, "sim_classes": 1}
    if spec.family == "astart":
        return {"canonical_states": 5, "nonbot_classes": 6, "nonpointed_classes": 1, "sim_classes": 4}
    return {"canonical_states": 2 * (k + 1), "v%d_length" % k: 2 ** (k + 1) - 1, "sim_classes": 1}
