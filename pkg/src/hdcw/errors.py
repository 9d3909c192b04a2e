"""Exception types shared across the package."""


class HdcwError(Exception):
    """Base class for package errors."""


class FormatError(HdcwError):
    """Malformed automaton, word or sample text."""


class AlphabetError(HdcwError, ValueError):
    """A symbol outside the declared alphabet, or mismatched alphabets."""


class CapExceeded(HdcwError):
    """A desk-scale size cap (determinization, orbit, subset construction) was hit."""


class SampleConflict(FormatError):
    """The same ultimately periodic word carries both labels."""
