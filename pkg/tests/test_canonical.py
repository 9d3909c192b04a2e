import random

import pytest
from brute import random_automaton
from conftest import ALL_SPECS, canonical_for, oracle_for

from hdcw.automaton import (
    CoBuchiAutomaton,
    equivalent,
    hd_certificate,
    includes,
    isomorphic,
    safe_language_equal,
    structural_checks,
)
from hdcw.canonical import (
    LearnObserver,
    PairState,
    assemble,
    build_component,
    central_sequence,
    find_pointed,
    find_R,
    idealized_learn,
    is_central,
    minimize,
    theta_diag,
)
from hdcw.families import FamilySpec, counter_state, make
from hdcw.oracle import build_oracle
from hdcw.words import EPS

ASTART = FamilySpec("astart")
A, B, C = 0, 1, 2


def union(X, Y):
    n = X.num_states
    trans = set(X.transitions) | {(p + n, a, r, q + n) for p, a, r, q in Y.transitions}
    return CoBuchiAutomaton(X.alphabet, n + Y.num_states, X.initial, trans)


def safe_twin(ca, ref, s):
    """Reference states whose safe language equals that of canonical state s."""
    U = union(ca.automaton, ref)
    n = ca.automaton.num_states
    return {q for q in range(ref.num_states) if safe_language_equal(U, {s}, {n + q})}


# -- find_R / find_pointed ---------------------------------------------------


def test_find_R():
    assert find_R(oracle_for(ASTART)) == [(), (A,), (B,), (A, B)]
    assert find_R(oracle_for(FamilySpec("allfin", 2))) == [()]
    assert find_R(oracle_for(FamilySpec("counter", 2))) == [()]


def test_find_pointed_counter2_trace():
    pair, trace = find_pointed(oracle_for(FamilySpec("counter", 2)), EPS, (0, 0))
    assert pair == PairState(EPS, (0, 0, 2, 0, 0, 1, 0, 0, 2, 0, 0))
    assert trace.loop1 == [((2,), 1)]
    assert trace.loop2 == [(1,)]


def test_find_pointed_astart_already_pointed():
    pair, trace = find_pointed(oracle_for(ASTART), (A,), (A,))
    assert pair == PairState((A,), (A,))
    assert trace.loop1 == [] and trace.loop2 == []


def test_find_pointed_allfin2():
    spec = FamilySpec("allfin", 2)
    pair, _ = find_pointed(oracle_for(spec), EPS, (0, 0))
    assert 0 in pair.v and 1 not in pair.v
    assert len(theta_diag(canonical_for(spec), pair.u, pair.v).states) == 1


def test_find_pointed_rejects_bad_input():
    o = oracle_for(FamilySpec("allfin", 2))
    with pytest.raises(ValueError):
        find_pointed(o, EPS, EPS)
    with pytest.raises(ValueError):
        find_pointed(o, EPS, (0, 1))


# -- components and assembly --------------------------------------------------


def test_component_astart():
    comp = build_component(oracle_for(ASTART), PairState((A,), (A,)))
    assert len(comp.members) == 2
    assert comp.delta2 == {(0, A): 0, (0, B): 1, (1, B): 0, (1, A): 1}


def test_trivial_component():
    o = oracle_for(ASTART)
    comp = build_component(o, PairState((B,), EPS))
    assert comp.members == [PairState((B,), EPS)] and comp.delta2 == {}


def test_component_allfin2_single_loop():
    comp = build_component(oracle_for(FamilySpec("allfin", 2)), PairState(EPS, (1,)))
    assert len(comp.members) == 1
    assert comp.delta2 == {(0, 1): 0}


def test_component_members_pairwise_distinct():
    o = oracle_for(FamilySpec("counter", 2))
    comp = build_component(o, find_pointed(o, EPS, (0, 0))[0])
    ms = comp.members
    for i in range(len(ms)):
        for j in range(i):
            assert not o.approx_test((ms[i].u, ms[i].v), (ms[j].u, ms[j].v))


def test_assemble_trivial_components_is_empty():
    o = oracle_for(ASTART)
    comps = [build_component(o, PairState(u, EPS)) for u in find_R(o) if not o.nt_test(u)]
    ca = assemble(o, comps)
    empty = CoBuchiAutomaton(o.alphabet, 1, [0], [(0, a, 1, 0) for a in range(3)])
    assert equivalent(ca.automaton, empty)[0]


def test_assemble_subset_is_included():
    rng = random.Random(0)
    for spec in (ASTART, FamilySpec("counter", 2), FamilySpec("allfin", 3)):
        o = oracle_for(spec)
        full = canonical_for(spec)
        comps = _components(o)
        for _ in range(3):
            sub = [c for c in comps if rng.random() < 0.6]
            assert includes(assemble(o, sub).automaton, full.automaton)[0]


def test_assemble_full_astart_matches_reference():
    assert equivalent(canonical_for(ASTART).automaton, make(ASTART))[0]


# -- idealized learner --------------------------------------------------------


class Recorder(LearnObserver):
    def __init__(self, o):
        self.o = o
        self.comps = []

    def on_nt(self, u, verdict):
        if not verdict:
            self.comps.append(build_component(self.o, PairState(u, EPS)))

    def on_component(self, comp):
        self.comps.append(comp)


def _components(o):
    rec = Recorder(o)
    idealized_learn(o, rec)
    return rec.comps


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_allfin_sizes(k):
    assert canonical_for(FamilySpec("allfin", k)).alpha == k


def test_astart_size():
    assert canonical_for(ASTART).alpha == 5


@pytest.mark.parametrize("k", [1, 2, 3])
def test_counter_sizes(k):
    assert canonical_for(FamilySpec("counter", k)).alpha == 2 * (k + 1)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.name)
def test_canonical_structure(spec):
    ca = canonical_for(spec)
    A_ = ca.automaton
    r = structural_checks(A_)
    assert r.normalized and r.semantically_deterministic and r.unsafe_saturated and r.safe_deterministic
    assert hd_certificate(A_)
    assert equivalent(A_, oracle_for(spec).D)[0]
    for trace in ca.traces:
        assert trace.bound_ok(ca.alpha)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.name)
def test_safe_minimality(spec):
    ca = canonical_for(spec)
    A_ = ca.automaton
    for p in range(ca.alpha):
        for q in range(p):
            if ca.state_classes[p] == ca.state_classes[q]:
                assert not safe_language_equal(A_, {p}, {q})


@pytest.mark.parametrize("spec", [ASTART, FamilySpec("counter", 2), FamilySpec("allfin", 3)], ids=lambda s: s.name)
def test_monotone_growth(spec):
    o = oracle_for(spec)
    comps = _components(o)
    n_trivial = sum(1 for u in find_R(o) if not o.nt_test(u))
    prev = assemble(o, comps[:n_trivial]).automaton
    for i in range(n_trivial + 1, len(comps) + 1):
        cur = assemble(o, comps[:i]).automaton
        assert includes(prev, cur)[0]
        assert not includes(cur, prev)[0]
        prev = cur


@pytest.mark.parametrize("spec", [ASTART, FamilySpec("counter", 2), FamilySpec("allfin", 3)], ids=lambda s: s.name)
def test_idempotence(spec):
    ca = canonical_for(spec)
    again = idealized_learn(build_oracle(ca.automaton))
    assert isomorphic(again.automaton, ca.automaton)


def _split_state(A_, s):
    """Copy state s; every edge into s also enters the copy."""
    n = A_.num_states
    trans = set(A_.transitions)
    trans |= {(n, a, r, q) for p, a, r, q in A_.transitions if p == s}
    trans |= {(p, a, r, n) for p, a, r, q in A_.transitions if q == s}
    trans |= {(n, a, r, n) for p, a, r, q in A_.transitions if p == s and q == s}
    initial = set(A_.initial) | ({n} if s in A_.initial else set())
    return CoBuchiAutomaton(A_.alphabet, n + 1, initial, trans)


def test_duplication_robustness():
    rng = random.Random(1)
    for spec in (ASTART, FamilySpec("counter", 1), FamilySpec("allfin", 3)):
        ca = canonical_for(spec)
        for _ in range(2):
            split = _split_state(ca.automaton, rng.randrange(ca.alpha))
            assert equivalent(split, ca.automaton)[0]
            assert minimize(split).alpha == ca.alpha


def test_random_inputs_minimize_to_hd():
    rng = random.Random(2)
    for _ in range(15):
        X = random_automaton(rng, rng.randint(1, 4), 2)
        ca = minimize(X)
        assert hd_certificate(ca.automaton)
        assert equivalent(ca.automaton, X)[0]


# -- diagnostics --------------------------------------------------------------


@pytest.mark.parametrize("spec", [ASTART, FamilySpec("allfin", 2), FamilySpec("counter", 1)], ids=lambda s: s.name)
def test_theta_empty_iff_bot(spec):
    o, ca = oracle_for(spec), canonical_for(spec)
    rng = random.Random(3)
    for _ in range(200):
        u = tuple(rng.randrange(o.k) for _ in range(rng.randint(0, 3)))
        v = tuple(rng.randrange(o.k) for _ in range(rng.randint(1, 4)))
        assert (not theta_diag(ca, u, v).states) == o.bot_test(u, v)


def test_theta_counter2():
    spec = FamilySpec("counter", 2)
    ca = canonical_for(spec)
    theta = theta_diag(ca, EPS, (0, 0, 2, 0, 0)).states
    twins = set()
    for s in theta:
        twins |= safe_twin(ca, make(spec), s)
    assert twins == {counter_state(1, 0), counter_state(2, 1)}


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.name)
def test_theta_of_members_is_singleton(spec):
    ca = canonical_for(spec)
    for s, p in enumerate(ca.pairs[: ca.alpha]):
        if p.v:
            assert theta_diag(ca, p.u, p.v).states == {s}


def test_central_sequence_initial_astart():
    ca = canonical_for(ASTART)
    s = ca.pairs.index(PairState(EPS, EPS))
    assert central_sequence(ca, s) == EPS


@pytest.mark.parametrize("spec", [FamilySpec("allfin", 2), FamilySpec("allfin", 3), ASTART,
                                  FamilySpec("counter", 1), FamilySpec("counter", 2)], ids=lambda s: s.name)
def test_central_sequences(spec):
    ca = canonical_for(spec)
    for q in range(ca.alpha):
        z = central_sequence(ca, q)
        assert is_central(ca, q, z)
        assert len(z) < ca.alpha**3
