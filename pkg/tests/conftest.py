import functools

import pytest

from hdcw.canonical import idealized_learn
from hdcw.families import FamilySpec, make
from hdcw.oracle import build_oracle
from hdcw.samples import charsample

SMALL_SPECS = [FamilySpec("allfin", 1), FamilySpec("allfin", 2), FamilySpec("astart"),
               FamilySpec("counter", 1), FamilySpec("counter", 2)]
ALL_SPECS = [FamilySpec("allfin", k) for k in (1, 2, 3)] + [FamilySpec("astart")] + \
    [FamilySpec("counter", k) for k in (1, 2, 3)]


@functools.lru_cache(maxsize=None)
def oracle_for(spec):
    return build_oracle(make(spec))


@functools.lru_cache(maxsize=None)
def canonical_for(spec):
    return idealized_learn(oracle_for(spec))


@functools.lru_cache(maxsize=None)
def charsample_for(spec):
    return charsample(oracle_for(spec))


@pytest.fixture
def astart_oracle():
    return oracle_for(FamilySpec("astart"))


@pytest.fixture
def counter2_oracle():
    return oracle_for(FamilySpec("counter", 2))


@pytest.fixture
def allfin2_oracle():
    return oracle_for(FamilySpec("allfin", 2))
