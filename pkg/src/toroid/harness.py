"""Backtest loop: market data in, period-by-period series out.

Each input row is one period of base-coin price and transaction count.
The loop computes the market return, feeds the transaction count to the
controller, rebases the ledger, steps the price model, and emits one
series row.  Identical inputs produce byte-identical output files.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .controller import PeriodMetrics, RebaseConfig, combined_rate
from .errors import (
    InvariantViolationError,
    MarketDataError,
    NonMonotoneDatesError,
    NonPositivePriceError,
)
from .ledger import Ledger
from .market import initial_market, step_price
from .numerics import UNIT, Amount, Rate

MARKET_CSV_HEADER = "date,price,tx_count"
SERIES_CSV_HEADER = (
    "date,trd_price,trd_supply,r_initial,r_vol,r_gas_cap,r_combined,tx_count"
)

_GENESIS = "genesis"
_ARBITRAGEUR = "arb"


@dataclass(frozen=True, slots=True)
class MarketRow:
    date: dt.date
    price: float
    tx_count: int


@dataclass(frozen=True, slots=True)
class SeriesRow:
    date: dt.date
    trd_price: float
    trd_supply: Amount
    r_initial: Rate
    r_vol: Rate
    r_gas_cap: Rate
    r_combined: Rate
    tx_count: int


def load_market_csv(path: str | Path) -> list[MarketRow]:
    """Parse a date,price,tx_count file; dates must strictly increase."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0].strip() != MARKET_CSV_HEADER:
        raise MarketDataError(
            f"expected header {MARKET_CSV_HEADER!r}", line=1
        )
    rows: list[MarketRow] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 3:
            raise MarketDataError(f"expected 3 fields, got {len(fields)}", line=lineno)
        try:
            date = dt.date.fromisoformat(fields[0].strip())
        except ValueError as exc:
            raise MarketDataError(f"bad date {fields[0]!r}", line=lineno) from exc
        try:
            price = float(fields[1])
        except ValueError as exc:
            raise MarketDataError(f"bad price {fields[1]!r}", line=lineno) from exc
        if price <= 0:
            raise NonPositivePriceError(f"price must be > 0, got {fields[1]}", line=lineno)
        try:
            tx_count = int(fields[2])
        except ValueError as exc:
            raise MarketDataError(f"bad tx count {fields[2]!r}", line=lineno) from exc
        if tx_count < 0:
            raise MarketDataError(f"tx count must be >= 0, got {tx_count}", line=lineno)
        if rows and date <= rows[-1].date:
            raise NonMonotoneDatesError(
                f"date {date} does not follow {rows[-1].date}", line=lineno
            )
        rows.append(MarketRow(date=date, price=price, tx_count=tx_count))
    return rows


def run_backtest(
    rows: list[MarketRow],
    cfg: RebaseConfig,
    initial_supply: Amount,
    gas_cost_trd_override: Amount | None = None,
    arb_injection: bool = False,
) -> list[SeriesRow]:
    """Drive the controller, ledger and market over a historical series.

    The first row seeds the starting price and previous-period volume; one
    output row is emitted per subsequent input row.  A genesis account
    holding initial_supply against equivalent collateral seeds the ledger.
    gas_cost_trd_override restates the per-transaction gas cost in TRD,
    overriding the configured base-coin cost.
    """
    if not rows:
        raise MarketDataError("no market rows")
    if initial_supply.raw <= 0:
        raise ValueError("initial supply must be positive")
    if gas_cost_trd_override is not None:
        cost_base = gas_cost_trd_override.raw * cfg.peg_ratio.ppb
        if cost_base % UNIT != 0 or cost_base == 0:
            raise ValueError(
                "gas cost override must convert exactly at the peg"
            )
        cfg = replace(cfg, gas_cost_base=Amount(cost_base // UNIT))

    ledger = Ledger(cfg.peg_ratio)
    genesis_collateral = initial_supply.raw * cfg.peg_ratio.ppb
    if genesis_collateral % UNIT != 0:
        raise ValueError("initial supply has no exact collateral at the peg")
    ledger.open_account(Amount(genesis_collateral // UNIT), account_id=_GENESIS)

    market = initial_market(rows[0].price, cfg)
    v_prev = rows[0].tx_count
    prev_price = rows[0].price
    out: list[SeriesRow] = []
    for row in rows[1:]:
        market_return = row.price / prev_price
        metrics = PeriodMetrics(
            t=ledger.current_period,
            v=row.tx_count,
            v_prev=v_prev,
            s=ledger.total_supply(),
        )
        breakdown = combined_rate(metrics, cfg)
        supply = ledger.rebase(breakdown.r_combined)
        minted_before = market.arb_minted_cum
        market = step_price(market, market_return, breakdown.r_combined, cfg, supply)
        if market.trd_price > (cfg.peg_ratio.ppb / UNIT) * market.base_price:
            raise InvariantViolationError("TRD price escaped the peg ceiling")
        if arb_injection:
            newly_minted = market.arb_minted_cum - minted_before
            supply = _inject_arbitrage(ledger, cfg, newly_minted, supply)
        out.append(
            SeriesRow(
                date=row.date,
                trd_price=market.trd_price,
                trd_supply=supply,
                r_initial=breakdown.r_initial,
                r_vol=breakdown.r_vol,
                r_gas_cap=breakdown.r_gas_cap,
                r_combined=breakdown.r_combined,
                tx_count=row.tx_count,
            )
        )
        v_prev = row.tx_count
        prev_price = row.price
    return out


def _inject_arbitrage(
    ledger: Ledger, cfg: RebaseConfig, minted: Amount, supply: Amount
) -> Amount:
    """Feed the clamp's notional mint into a dedicated arbitrageur account.

    The mint is rounded down to the nearest amount with exact collateral
    at the peg; a zero result leaves the ledger untouched.
    """
    if minted.raw == 0:
        return supply
    step = UNIT // math.gcd(cfg.peg_ratio.ppb, UNIT)
    rounded = minted.raw - minted.raw % step
    if rounded == 0:
        return supply
    collateral = Amount(rounded * cfg.peg_ratio.ppb // UNIT)
    if _ARBITRAGEUR in ledger.accounts:
        ledger.deposit(_ARBITRAGEUR, collateral)
    else:
        ledger.open_account(collateral, account_id=_ARBITRAGEUR)
    return ledger.total_supply()


def _format_price(price: float) -> str:
    return f"{price:.9f}"


def write_series_csv(rows: list[SeriesRow], path: str | Path) -> None:
    """Write series rows; rates are nine-decimal fixed strings.

    Output is byte-stable: fixed header, fixed formatting, "\\n" endings.
    """
    lines = [SERIES_CSV_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                (
                    row.date.isoformat(),
                    _format_price(row.trd_price),
                    row.trd_supply.tokens(),
                    row.r_initial.decimal(),
                    row.r_vol.decimal(),
                    row.r_gas_cap.decimal(),
                    row.r_combined.decimal(),
                    str(row.tx_count),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


def read_series_csv(path: str | Path) -> list[SeriesRow]:
    """Parse a series file written by write_series_csv."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != SERIES_CSV_HEADER:
        raise MarketDataError(f"expected header {SERIES_CSV_HEADER!r}", line=1)
    rows: list[SeriesRow] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 8:
            raise MarketDataError(f"expected 8 fields, got {len(fields)}", line=lineno)
        try:
            rows.append(
                SeriesRow(
                    date=dt.date.fromisoformat(fields[0]),
                    trd_price=float(fields[1]),
                    trd_supply=Amount.from_tokens(fields[2]),
                    r_initial=Rate.from_decimal(fields[3]),
                    r_vol=Rate.from_decimal(fields[4]),
                    r_gas_cap=Rate.from_decimal(fields[5]),
                    r_combined=Rate.from_decimal(fields[6]),
                    tx_count=int(fields[7]),
                )
            )
        except ValueError as exc:
            raise MarketDataError(str(exc), line=lineno) from exc
    return rows
