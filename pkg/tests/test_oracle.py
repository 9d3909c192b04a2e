import random

import pytest
from brute import brute_bot, brute_distinguished, lang_class, lang_member, random_up, rng_for, words_upto
from conftest import SMALL_SPECS, oracle_for

from hdcw.automaton import CoBuchiAutomaton
from hdcw.canonical import PairState, assemble, build_component
from hdcw.errors import AlphabetError, CapExceeded
from hdcw.families import FamilySpec, make
from hdcw.oracle import P1, P2, P3, build_oracle
from hdcw.words import EPS, UPWord

ASTART = FamilySpec("astart")
A, B, C = 0, 1, 2


def rand_word(rng, k, lo, hi):
    return tuple(rng.randrange(k) for _ in range(rng.randint(lo, hi)))


# -- construction and classes -----------------------------------------------


def test_astart_classes(astart_oracle):
    o = astart_oracle
    assert o.num_classes == 4
    assert o.residual_reps == [(), (A,), (B,), (A, B)]


@pytest.mark.parametrize("spec", [FamilySpec("allfin", k) for k in (1, 2, 3)] +
                         [FamilySpec("counter", k) for k in (1, 2)], ids=lambda s: s.name)
def test_single_class_families(spec):
    o = oracle_for(spec)
    assert o.num_classes == 1
    assert o.residual_reps == [()]


def test_reference_is_deterministic_normalized(astart_oracle):
    from hdcw.automaton import is_normalized

    D = astart_oracle.D
    assert D.is_deterministic and D.is_complete and is_normalized(D)


def test_class_of(astart_oracle):
    o = astart_oracle
    assert o.class_of((A, B, B)) == o.class_of((A,))
    assert o.class_of(EPS) == o.lang_class[o.init]
    assert o.class_of((A, B)) != o.class_of((A,))


def test_class_of_matches_definition():
    for spec in SMALL_SPECS:
        o = oracle_for(spec)
        k = o.k
        words = list(words_upto(k, 4))
        ids = {}
        for w in words:
            ids.setdefault(lang_class(spec, w), set()).add(o.class_of(w))
        assert all(len(v) == 1 for v in ids.values())
        assert len({next(iter(v)) for v in ids.values()}) == len(ids)


def test_class_of_bad_symbol(astart_oracle):
    with pytest.raises(AlphabetError):
        astart_oracle.class_of((7,))


def test_allfin_class_trivial(allfin2_oracle):
    rng = random.Random(0)
    assert len({allfin2_oracle.class_of(rand_word(rng, 2, 0, 6)) for _ in range(50)}) == 1


# -- membership and ⊥ ---------------------------------------------------------


def test_mem_up_examples(astart_oracle):
    o = astart_oracle
    assert o.mem_up(UPWord((A,), (B,)))
    assert not o.mem_up(UPWord((B,), (A,)))
    assert not o.mem_up(UPWord((A,), (B, C)))


@pytest.mark.parametrize("spec", SMALL_SPECS, ids=lambda s: s.name)
def test_mem_up_matches_definition(spec):
    o = oracle_for(spec)
    rng = rng_for("mem", spec)
    for _ in range(300):
        w = random_up(rng, o.k, 8)
        assert o.mem_up(w) == lang_member(spec, w)


def test_bot_examples(allfin2_oracle):
    o = allfin2_oracle
    assert not o.bot_test((0,), EPS)
    assert o.bot_test(EPS, (0, 1))
    assert not o.bot_test(EPS, (0,))


@pytest.mark.parametrize("spec", SMALL_SPECS, ids=lambda s: s.name)
def test_bot_matches_brute_force(spec):
    o = oracle_for(spec)
    rng = rng_for("bot", spec)
    for _ in range(120):
        u, v = rand_word(rng, o.k, 0, 4), rand_word(rng, o.k, 0, 4)
        assert o.bot_test(u, v) == brute_bot(spec, u, v)


def test_nt(astart_oracle):
    o = astart_oracle
    assert o.nt_test((A,)) and o.nt_test((A, B))
    assert not o.nt_test(EPS) and not o.nt_test((B,))
    for k in (2, 3):
        assert oracle_for(FamilySpec("allfin", k)).nt_test(EPS)
    # with one letter the language is empty
    assert not oracle_for(FamilySpec("allfin", 1)).nt_test(EPS)


# -- profiles ---------------------------------------------------------------


def direct_profile(o, w):
    target, safe = [], []
    for p in range(o.n):
        q, ok = p, True
        for a in w:
            ok = ok and o.rank[q, a] == 2
            q = o.delta[q, a]
        target.append(int(q))
        safe.append(bool(ok))
    return tuple(target), tuple(safe)


def test_single_state_profile():
    o = build_oracle(CoBuchiAutomaton(["a", "b"], 1, [0], [(0, 0, 2, 0), (0, 1, 2, 0)]))
    ps = o.profiles()
    assert len(ps) == 1
    assert ps[0].target == (0,) and ps[0].safe == (True,) and ps[0].witness == ()


def test_profiles_bound_and_witnesses():
    for spec in (FamilySpec("allfin", 2), ASTART, FamilySpec("counter", 1)):
        o = oracle_for(spec)
        ps = o.profiles()
        assert len(ps) <= (2 * o.n) ** o.n
        for p in ps:
            assert (p.target, p.safe) == direct_profile(o, p.witness)
        keys = [(len(p.witness), p.witness) for p in ps]
        assert keys == sorted(keys)


def test_profile_count_matches_closure(allfin2_oracle):
    o = allfin2_oracle
    found, length = set(), 0
    while True:
        new = {direct_profile(o, w) for w in words_upto(o.k, length, length)}
        if length > 0 and new <= found:
            break
        found |= new
        length += 1
    assert len(o.profiles()) == len(found)


def test_profile_monoid_laws():
    o = oracle_for(FamilySpec("counter", 1))
    by_key = {(p.target, p.safe): p for p in o.profiles()}
    rng = random.Random(3)
    for _ in range(1000):
        x, y = rand_word(rng, o.k, 0, 5), rand_word(rng, o.k, 0, 5)
        px, py = by_key[direct_profile(o, x)], by_key[direct_profile(o, y)]
        assert px.compose(py) == direct_profile(o, x + y)


def test_profile_cap():
    o = build_oracle(make(FamilySpec("counter", 2)), orbit_cap=5)
    with pytest.raises(CapExceeded):
        o.profiles()


# -- ≈ and ≡ ------------------------------------------------------------------


def test_approx_reflexive(astart_oracle):
    assert astart_oracle.approx_test(((A,), (B,)), ((A,), (B,)))


def test_approx_astart(astart_oracle):
    assert astart_oracle.approx_test(((A,), (B, B)), ((A,), (B, B, B, B)))


def test_approx_counter_example(counter2_oracle):
    v1 = (0, 0, 2, 0, 0)
    assert not counter2_oracle.approx_test((EPS, v1 + (1,) + v1), (EPS, v1))


def test_approx_needs_nonempty(astart_oracle):
    with pytest.raises(ValueError):
        astart_oracle.approx_test(((A,), EPS), ((A,), (B,)))


@pytest.mark.parametrize("spec", SMALL_SPECS, ids=lambda s: s.name)
def test_approx_against_brute_force(spec):
    o = oracle_for(spec)
    rng = rng_for("approx", spec)
    for _ in range(60):
        u, v = rand_word(rng, o.k, 0, 3), rand_word(rng, o.k, 1, 3)
        if rng.random() < 0.5:
            u2, v2 = u, v + rand_word(rng, o.k, 1, 2)
        else:
            u2, v2 = rand_word(rng, o.k, 0, 3), rand_word(rng, o.k, 1, 3)
        verdict = o.approx_distinguisher((u, v), (u2, v2))
        reason = brute_distinguished(spec, (u, v), (u2, v2), bound=5)
        if reason is not None:
            assert verdict is not None
        if verdict is not None and verdict[0] == "suffix":
            z = verdict[1]
            assert lang_class(spec, u + v + z) == lang_class(spec, u)
            assert lang_member(spec, UPWord(u, v + z)) != lang_member(spec, UPWord(u2, v2 + z))


def test_equivL_examples(allfin2_oracle, astart_oracle):
    assert allfin2_oracle.equivL_test((EPS, (0,)), (EPS, (0,)))
    assert allfin2_oracle.equivL_test((EPS, (0,)), ((1,), (0, 0)))
    assert not astart_oracle.equivL_test(((A, B), EPS), ((A, B), (C,)))


def test_sfl_signature_is_safe_image(astart_oracle):
    o = astart_oracle
    sig = o.sfl_signature((A,), (B,))
    assert sig.uv_class == o.class_of((A, B))
    assert sig.safe_set == o.safe_image(o.R((A,)), (B,))


def test_equivL_is_an_equivalence():
    o = oracle_for(FamilySpec("counter", 1))
    rng = random.Random(4)
    for _ in range(1000):
        p, q, r = [(EPS, rand_word(rng, o.k, 0, 4)) for _ in range(3)]
        assert o.equivL_test(p, p)
        assert o.equivL_test(p, q) == o.equivL_test(q, p)
        if o.equivL_test(p, q) and o.equivL_test(q, r):
            assert o.equivL_test(p, r)


# -- least-x searches and m ---------------------------------------------------


def _trivial_hypothesis(o):
    comps = [build_component(o, PairState(u, EPS)) for u in o.residual_reps if not o.nt_test(u)]
    return assemble(o, comps)


def test_p1_astart_trivial_components(astart_oracle):
    ca = _trivial_hypothesis(astart_oracle)
    assert astart_oracle.least_x(P1((A,), ca.automaton, ca.state_classes)) == (A,)
    assert astart_oracle.least_x(P1(EPS, ca.automaton, ca.state_classes)) is None


def test_p2_p3_counter(counter2_oracle):
    o = counter2_oracle
    assert o.least_x(P2(EPS, (0, 0))) == (2,)
    assert o.least_x(P3(EPS, EPS, (0, 0, 2, 0, 0))) == (1,)


def _brute_p2(spec, u, vbar, bound):
    k = len(make(spec).alphabet)
    for x in words_upto(k, bound, 1):
        if (lang_class(spec, u + vbar + x) == lang_class(spec, u)
                and not brute_bot(spec, u, vbar + x + vbar, bound=3)
                and not lang_member(spec, UPWord(u, vbar + x))):
            return x
    return None


def test_p2_no_longer_than_brute_force():
    spec = FamilySpec("counter", 1)
    o = oracle_for(spec)
    rng = rng_for("p2")
    hits = 0
    for _ in range(25):
        u, vbar = rand_word(rng, o.k, 0, 2), rand_word(rng, o.k, 1, 3)
        x = o.least_x(P2(u, vbar))
        bx = _brute_p2(spec, u, vbar, 4)
        if bx is not None:
            hits += 1
            assert x is not None and (len(x), x) <= (len(bx), bx)
        if x is not None:
            assert not o.bot_test(u, vbar + x + vbar)
            assert not o.member(u, vbar + x)
            assert o.class_of(u + vbar + x) == o.class_of(u)
    assert hits > 0


def test_max_m(counter2_oracle):
    assert counter2_oracle.max_m(EPS, (0, 0), (2,)) == 1


def test_max_m_zero_when_bot():
    o = oracle_for(FamilySpec("allfin", 2))
    # a1 then a2: every continuation of a1 a2 a1 is ⊥
    assert o.bot_test(EPS, (0, 1, 0))
    assert o.max_m(EPS, (0,), (1,)) == 0


def _scan_m(o, u, vbar, x):
    m = 0
    while m < o.n and not o.bot_test(u, vbar + (x + vbar) * (m + 1)):
        m += 1
    return m


def test_max_m_matches_scan():
    o = oracle_for(FamilySpec("allfin", 3))
    assert o.max_m(EPS, (0,), (1, 2)) == _scan_m(o, EPS, (0,), (1, 2)) == 0
    # a1 (a2 a1)^m never uses a3, so no m empties the safe set
    assert _scan_m(o, EPS, (0,), (1,)) == o.n
    with pytest.raises(RuntimeError):
        o.max_m(EPS, (0,), (1,))


def test_class_distinguisher_and_loop_witness(astart_oracle):
    o = astart_oracle
    w = o.class_distinguisher(0, 1)
    assert o.member(o.residual_reps[0] + w.spoke, w.period) != o.member(o.residual_reps[1] + w.spoke, w.period)
    y = o.loop_witness((A,), EPS)
    assert y and o.member((A,), y) and o.class_of((A,) + y) == o.class_of((A,))
    assert o.loop_witness(EPS, EPS) is None
