"""Canonical minimal history-deterministic co-Büchi automata and their passive learning."""
from hdcw.automaton import (
    CoBuchiAutomaton,
    complete,
    determinize_breakpoint,
    equivalent,
    hd_certificate,
    includes,
    isomorphic,
    member_up,
    normalize,
    structural_checks,
)
from hdcw.canonical import find_pointed, idealized_learn, minimize, theta_diag
from hdcw.errors import AlphabetError, CapExceeded, FormatError, HdcwError, SampleConflict
from hdcw.families import FamilySpec, family_facts, make
from hdcw.learner import learn
from hdcw.oracle import LanguageOracle, build_oracle
from hdcw.samples import Sample, charsample
from hdcw.words import Alphabet, UPWord, canonicalize

__version__ = "0.1.0"
