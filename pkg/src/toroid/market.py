"""Exogenous-demand price model with the one-way peg as an arbitrage clamp.

Market cap follows an input return series while each rebasement dilutes
the per-token price by exactly 1/(1 + r) in the same period.  The peg is
a pure ceiling: whenever the implied TRD price would exceed peg_ratio
times the base-coin price, arbitrageurs fund the contract for cheap TRD,
so the price is clamped there and the supply that such funding would have
minted is recorded.

Prices are diagnostic floats, deliberately outside the fixed-point core;
they are never fed back into balance arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .controller import RebaseConfig
from .errors import NonPositiveFactorError, NonPositiveReturnError
from .numerics import UNIT, Amount, Rate


@dataclass(frozen=True, slots=True)
class MarketState:
    trd_price: float
    base_price: float
    arb_minted_cum: Amount = Amount(0)


def initial_market(base_price: float, cfg: RebaseConfig) -> MarketState:
    """Launch state: TRD starts at its ceiling, one peg ratio of base coin."""
    return MarketState(
        trd_price=(cfg.peg_ratio.ppb / UNIT) * base_price,
        base_price=base_price,
    )


def step_price(
    state: MarketState,
    market_return: float,
    r: Rate,
    cfg: RebaseConfig,
    supply: Amount,
) -> MarketState:
    """Advance one period: demand moves cap by the return, rebasement dilutes.

    supply is the post-rebase total; it sizes the notional arbitrage mint
    whenever the peg clamp binds.
    """
    if market_return <= 0:
        raise NonPositiveReturnError(f"market return must be > 0, got {market_return}")
    factor = UNIT + r.ppb
    if factor <= 0:
        raise NonPositiveFactorError(f"1 + r must be positive, got {r.ppb} ppb")
    growth = factor / UNIT
    base_price = state.base_price * market_return
    implied = state.trd_price * market_return / growth
    ceiling = (cfg.peg_ratio.ppb / UNIT) * base_price
    arb_minted = state.arb_minted_cum
    if implied > ceiling:
        # Supply that would dilute the implied price back down to the peg.
        excess = Fraction(implied) / Fraction(ceiling) - 1
        arb_minted += Amount(int(supply.raw * excess))
        trd_price = ceiling
    else:
        trd_price = implied
    return MarketState(
        trd_price=trd_price,
        base_price=base_price,
        arb_minted_cum=arb_minted,
    )
