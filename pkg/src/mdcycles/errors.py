"""Exception hierarchy shared by every mdcycles module.

All library errors derive from :class:`MdCyclesError`, so callers (and the
CLI) can catch one type. Each subclass also derives from the closest builtin
(``ValueError``/``IndexError``) so generic handlers keep working.
"""


class MdCyclesError(Exception):
    """Base class for all data and analysis errors."""


class RangeError(MdCyclesError, IndexError):
    """An index or date lies outside the valid range."""


class AlignmentError(MdCyclesError, ValueError):
    """Two series do not share start and length."""


class OrderingError(MdCyclesError, ValueError):
    """Arguments are in the wrong order (e.g. a later index given first)."""


class LengthError(MdCyclesError, ValueError):
    """Input sequence too short for the requested operation."""


class SchemaError(MdCyclesError, ValueError):
    """Input table lacks required columns or is empty."""


class ParseError(MdCyclesError, ValueError):
    """A cell could not be parsed; carries row/column context in the message."""


class IntegrityError(MdCyclesError, ValueError):
    """Loaded data violates an identity it must satisfy."""


class CoverageError(MdCyclesError, ValueError):
    """A seasonal phase has no observations."""


class DomainError(MdCyclesError, ValueError):
    """Argument outside the mathematical domain of a formula."""


class InsufficiencyError(MdCyclesError):
    """Too few peaks to define a cycle.

    ``candidates`` holds every peak that was detected so the caller can show it.
    """

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class SelectionError(MdCyclesError):
    """A peak selection strategy could not be satisfied."""

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class ConfigError(MdCyclesError, ValueError):
    """Malformed analysis configuration."""
