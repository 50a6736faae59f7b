"""Exception hierarchy for the toroid simulator.

Everything raised on purpose derives from ToroidError.  Input-shaped
problems (bad files, bad arguments, rejected operations) are ordinary
subclasses; InvariantViolationError is reserved for internal consistency
failures and maps to a distinct process exit code in the CLI.
"""


class ToroidError(Exception):
    """Base class for all simulator errors."""


class InvariantViolationError(ToroidError):
    """An internal consistency check failed; indicates a bug, not bad input."""


# --- numerics ---------------------------------------------------------------

class AmountOverflowError(ToroidError):
    """An amount or intermediate product exceeded the supported capacity."""


class NegativeAmountError(ToroidError):
    """An amount would become negative (amounts are unsigned)."""


class NegativeResultError(ToroidError):
    """A rate product would produce a negative amount (factor below zero)."""


class NonPositiveFactorError(ToroidError):
    """A growth factor (1 + r) was zero or negative."""


# --- controller -------------------------------------------------------------

class ZeroSupplyError(ToroidError):
    """A rate that divides by total supply was requested at zero supply."""


class ConfigError(ToroidError):
    """A configuration file could not be parsed or contained bad values."""


# --- ledger -----------------------------------------------------------------

class LedgerError(ToroidError):
    """Base class for rejected ledger operations."""


class ZeroCollateralError(LedgerError):
    pass


class NonDivisibleCollateralError(LedgerError):
    """Collateral is not an exact multiple of the peg ratio in raw units."""


class UnknownAccountError(LedgerError):
    pass


class SelfTransferError(LedgerError):
    pass


class InsufficientBalanceError(LedgerError):
    pass


class HoldingPeriodNotMetError(LedgerError):
    pass


class InsufficientForRefundError(LedgerError):
    """Balance fell below the refund obligation (negative interest)."""


class ExceedsCollateralError(LedgerError):
    pass


class SnapshotError(LedgerError):
    """A ledger snapshot could not be parsed."""


# --- market -----------------------------------------------------------------

class NonPositiveReturnError(ToroidError):
    """Market returns must be strictly positive multiplicative factors."""


# --- harness ----------------------------------------------------------------

class MarketDataError(ToroidError):
    """A market data file could not be parsed; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonMonotoneDatesError(MarketDataError):
    pass


class NonPositivePriceError(MarketDataError):
    pass
