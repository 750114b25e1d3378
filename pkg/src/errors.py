"""
Exception hierarchy for the reliability-bounds toolkit.

Every error carries the process exit code the CLI reports for it, so the
command-line surface and the library agree on one classification.
"""

from typing import Optional


class ReliabilityError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 1


# =============================================================================
# CHANNEL INGESTION
# =============================================================================

class ChannelParseError(ReliabilityError):
    """Channel document is not valid JSON or has the wrong shape."""

    exit_code = 2


class ChannelValidationError(ReliabilityError):
    """Channel document parsed but does not describe a valid DMC."""

    exit_code = 3

    def __init__(self, message: str, row: Optional[int] = None):
        super().__init__(message)
        self.row = row


class NonStochasticRow(ChannelValidationError):
    """A row does not sum exactly to 1."""


class NegativeEntry(ChannelValidationError):
    """A transition probability is negative."""


class EmptyAlphabet(ChannelValidationError):
    """No rows, or a row with no entries."""


class RaggedRows(ChannelValidationError):
    """Rows have different lengths."""


class InvalidEpsilon(ChannelValidationError):
    """Typewriter crossover outside [0, 1/2] or q < 2."""


class AlphabetMismatch(ChannelValidationError):
    """Two channels (or a document header and its rows) disagree on alphabet sizes."""


class IndexOutOfRange(ChannelValidationError):
    """An input index does not exist in the channel."""


# =============================================================================
# SIZE AND BUDGET
# =============================================================================

class SizeOverflow(ReliabilityError):
    """A product alphabet exceeds the configured size cap."""

    exit_code = 4


class BudgetExceeded(ReliabilityError):
    """An exact search was asked to run beyond its vertex budget."""

    exit_code = 4


# =============================================================================
# DEGENERATE INPUTS
# =============================================================================

class DegenerateMatrix(ReliabilityError):
    """Game matrix is empty or has an all-zero column."""

    exit_code = 3


class DegenerateGame(ReliabilityError):
    """Smoothed game has value 0, so its log-rate is undefined."""

    exit_code = 3


class DegenerateChannel(ReliabilityError):
    """Quantity undefined for this channel (e.g. R_crit when C = 0)."""

    exit_code = 3


# =============================================================================
# NUMERICS
# =============================================================================

class NonConvergence(ReliabilityError):
    """An iterative optimizer ran out of iterations without certifying its result."""


class RhoCapExceeded(ReliabilityError):
    """The rho bracket reached its cap while the objective was still increasing."""

    def __init__(self, rate: float, rho_cap: float):
        super().__init__(
            f"objective still increasing at rho_cap={rho_cap:g} for R={rate:.6g}; "
            "R is close to the divergence boundary, raise --rho-cap"
        )
        self.rate = rate
        self.rho_cap = rho_cap
