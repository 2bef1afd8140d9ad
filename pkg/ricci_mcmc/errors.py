# ricci_mcmc/errors.py

"""
Exception hierarchy for ricci_mcmc.

Every failure raised by the library derives from RicciMCMCError so callers
(and the CLI) can catch the whole family at once. Two intermediate groups
exist:

- DistributionError: the input is not a strictly positive probability vector
- UsageError: the caller supplied a bad config or an unparsable file

The CLI maps UsageError to exit status 2 and every other RicciMCMCError
to exit status 1.
"""

from __future__ import annotations
from pathlib import Path
from typing import Optional, Union


class RicciMCMCError(Exception):
    """Base class for all ricci_mcmc errors."""
    pass


class DistributionError(RicciMCMCError):
    """Raised when a vector is not a valid point of the open simplex."""
    pass


class NonPositiveEntry(DistributionError):
    """Raised when a distribution has an entry <= 0."""
    pass


class NotNormalized(DistributionError):
    """Raised when entries do not sum to 1 within tolerance."""
    pass


class TooFewStates(DistributionError):
    """Raised when fewer than two states are given."""
    pass


class DimensionMismatch(RicciMCMCError):
    """Raised when two operands disagree on the number of states."""
    pass


class DomainError(RicciMCMCError):
    """Raised when an argument lies outside the domain of a function."""
    pass


class NegativeInput(DomainError):
    pass


class StepTooLarge(RicciMCMCError):
    """Raised when dt exceeds the positivity-preserving bound 1/max(-Q_ii)."""
    pass


class NumericalBlowup(RicciMCMCError):
    """Raised when an integrated state leaves any sane range (|p_i| > 10)."""
    pass


class DegeneratePhi(RicciMCMCError):
    """Raised when phi'' vanishes where a theta limit needs it."""
    pass


class EmptyEdgeSet(RicciMCMCError):
    """Raised when a weight matrix has no positive off-diagonal entry."""
    pass


class SingularPencil(RicciMCMCError):
    """Raised when the Gamma-one form has no nontrivial direction."""
    pass


class ZeroEdge(RicciMCMCError):
    """Raised when a local rate is requested on a pair with zero weight."""
    pass


class UsageError(RicciMCMCError):
    """Raised for caller mistakes: bad configuration or unreadable input."""
    pass


class ConfigError(UsageError):
    pass


class ParseError(UsageError):
    """Raised when a distribution file cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IoError(RicciMCMCError):
    """Raised when an output file cannot be written."""

    def __init__(self, path: Union[str, Path], reason: str):
        self.path = Path(path)
        super().__init__(f"cannot write {self.path}: {reason}")
