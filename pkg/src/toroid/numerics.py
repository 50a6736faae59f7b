"""Exact fixed-point primitives for token amounts, rates and the rebase index.

Token quantities are unsigned integer counts of nano-units (10^-9 of one
token), rates are signed integer parts-per-billion, and the cumulative
rebase index is an exact rational kept as an integer numerator/denominator
pair.  All arithmetic floors toward negative infinity, so quantization
error is one-sided: rebasement can round value away but never mints
unbacked dust.  Every operation is pure integer math and therefore
bit-reproducible across hosts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    AmountOverflowError,
    NegativeAmountError,
    NegativeResultError,
    NonPositiveFactorError,
)

# One whole token in raw nano-units.
UNIT = 10**9

# Amounts and intermediates are kept within 128 bits so products with
# rates stay well inside practical integer sizes.
MAX_RAW = 2**127 - 1

# Index renormalization: once numerator or denominator outgrows this bound
# the fraction is rescaled onto a fixed power-of-ten denominator.  The
# relative error of one rescale is below 5e-28 for any index value above
# 10^-3, far inside the 1e-15 budget the rest of the system assumes.
_RENORM_LIMIT = 2**128
_RENORM_DEN = 10**30
_RENORM_MIN_NUM = 10**27


def _parse_fixed(text: str, *, scale: int, allow_sign: bool) -> int:
    """Parse a decimal string into an integer scaled by 10^scale digits."""
    s = text.strip()
    if not s:
        raise ValueError("empty decimal string")
    sign = 1
    if s[0] in "+-":
        if s[0] == "-":
            if not allow_sign:
                raise ValueError(f"negative value not allowed: {text!r}")
            sign = -1
        s = s[1:]
    if not s or s == ".":
        raise ValueError(f"malformed decimal string: {text!r}")
    whole, _, frac = s.partition(".")
    whole = whole or "0"
    if not whole.isdigit() or (frac and not frac.isdigit()):
        raise ValueError(f"malformed decimal string: {text!r}")
    if len(frac) > scale:
        extra = frac[scale:]
        if extra.strip("0"):
            raise ValueError(f"more than {scale} fractional digits: {text!r}")
        frac = frac[:scale]
    frac = frac.ljust(scale, "0")
    return sign * (int(whole) * 10**scale + int(frac or "0"))


def _format_fixed(value: int, *, scale: int) -> str:
    sign = "-" if value < 0 else ""
    whole, frac = divmod(abs(value), 10**scale)
    return f"{sign}{whole}.{frac:0{scale}d}"


def format_raw(value: int) -> str:
    """Render a signed raw nano-unit count as a decimal token string."""
    return _format_fixed(value, scale=9)


@dataclass(frozen=True, slots=True, order=True)
class Amount:
    """A non-negative token quantity in raw nano-units.

    The unit kind (TRD or base coin) is carried by context; the two are
    never mixed inside a single value.
    """

    raw: int

    def __post_init__(self) -> None:
        if not isinstance(self.raw, int):
            raise TypeError(f"raw must be int, got {type(self.raw).__name__}")
        if self.raw < 0:
            raise NegativeAmountError(f"amount cannot be negative: {self.raw}")
        if self.raw > MAX_RAW:
            raise AmountOverflowError(f"amount exceeds capacity: {self.raw}")

    @classmethod
    def from_tokens(cls, tokens: str | int) -> Amount:
        """Build from a whole-token count or decimal token string."""
        if isinstance(tokens, int):
            return cls(tokens * UNIT)
        return cls(_parse_fixed(tokens, scale=9, allow_sign=False))

    def tokens(self) -> str:
        """Render as a decimal token string with nine fractional digits."""
        return _format_fixed(self.raw, scale=9)

    def __add__(self, other: Amount) -> Amount:
        return Amount(self.raw + other.raw)

    def __sub__(self, other: Amount) -> Amount:
        if other.raw > self.raw:
            raise NegativeAmountError(
                f"subtraction would go negative: {self.raw} - {other.raw}"
            )
        return Amount(self.raw - other.raw)

    def is_zero(self) -> bool:
        return self.raw == 0


@dataclass(frozen=True, slots=True, order=True)
class Rate:
    """A dimensionless signed rate in parts-per-billion (value = ppb / 10^9)."""

    ppb: int

    def __post_init__(self) -> None:
        if not isinstance(self.ppb, int):
            raise TypeError(f"ppb must be int, got {type(self.ppb).__name__}")

    @classmethod
    def from_decimal(cls, text: str) -> Rate:
        return cls(_parse_fixed(text, scale=9, allow_sign=True))

    def decimal(self) -> str:
        """Render as a signed decimal string with nine fractional digits."""
        return _format_fixed(self.ppb, scale=9)

    def __neg__(self) -> Rate:
        return Rate(-self.ppb)


ZERO_RATE = Rate(0)


@dataclass(frozen=True, slots=True)
class Index:
    """Cumulative rebase factor Pi(1 + r_i) as an exact positive rational."""

    num: int
    den: int

    def __post_init__(self) -> None:
        if self.den <= 0:
            raise NonPositiveFactorError(f"index denominator must be > 0: {self.den}")
        if self.num <= 0:
            raise NonPositiveFactorError(f"index numerator must be > 0: {self.num}")

    @classmethod
    def identity(cls) -> Index:
        return cls(1, 1)

    def value(self) -> Fraction:
        """Exact represented value, for diagnostics and test oracles."""
        return Fraction(self.num, self.den)


def mul_amount_rate(a: Amount, r: Rate) -> Amount:
    """Scale an amount by a rate, flooring to raw units.

    The product must be non-negative: scaling by a negative factor (as
    happens when a multiplier 1 + r goes below zero) is refused rather
    than wrapped into an unsigned amount.
    """
    prod = a.raw * r.ppb
    if prod < 0:
        raise NegativeResultError(
            f"scaling {a.raw} raw by {r.ppb} ppb would be negative"
        )
    return Amount(prod // UNIT)


def one_plus(r: Rate) -> Index:
    """The multiplier (1 + r) as an exact index factor."""
    factor = UNIT + r.ppb
    if factor <= 0:
        raise NonPositiveFactorError(f"1 + r must be positive, got {r.ppb} ppb")
    g = math.gcd(factor, UNIT)
    return Index(factor // g, UNIT // g)


def apply_index(shares: Amount, idx: Index) -> Amount:
    """Convert share units to token units at the given index, flooring."""
    return Amount(shares.raw * idx.num // idx.den)


def grow_index(idx: Index, r: Rate) -> Index:
    """Multiply the index by (1 + r) exactly, renormalizing when large.

    Renormalization first reduces by gcd (lossless); only when the
    reduced terms still exceed the size limit is the fraction rescaled
    onto a fixed denominator, and only when doing so keeps the relative
    error below 5e-28.  Growing at r = 0 is an exact identity.
    """
    factor = UNIT + r.ppb
    if factor <= 0:
        raise NonPositiveFactorError(f"1 + r must be positive, got {r.ppb} ppb")
    num = idx.num * factor
    den = idx.den * UNIT
    g = math.gcd(num, den)
    num //= g
    den //= g
    if num > _RENORM_LIMIT or den > _RENORM_LIMIT:
        rescaled = (num * _RENORM_DEN + den // 2) // den
        if rescaled >= _RENORM_MIN_NUM:
            g = math.gcd(rescaled, _RENORM_DEN)
            num, den = rescaled // g, _RENORM_DEN // g
        # else: the index has collapsed below ~1e-3; keep it exact rather
        # than accept a renormalization error outside the budget.
    return Index(num, den)
