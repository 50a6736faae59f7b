"""Synthetic market data generator for the bundled sample series.

The price path is a geometric random walk: each day's log return is
drift + vol * z, with z a standard normal drawn as a sum of twelve
uniforms minus six.  Daily transaction counts grow with both adoption
(linearly in t + 10, tracking the supply's own early growth so the gas
cap stays a meaningful fraction of the volume response) and the price
level, with a +/-5% uniform wobble.  The scale is chosen so the cap sits
near one percent: ordinary volume swings pass through the controller
while multi-sigma days exceed the cap and get clamped.

Everything is platform-reproducible by construction: the Mersenne
Twister is bit-exact everywhere, uniform sums use only IEEE-754
additions, and the exponential runs through Decimal (correctly rounded)
before prices are quantized to nine decimals.

Regenerate the bundled file with:  python -m toroid.datagen
"""

from __future__ import annotations

import datetime as dt
import random
import sys
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from pathlib import Path

from .harness import MARKET_CSV_HEADER

DEFAULT_PERIODS = 500
DEFAULT_SEED = 7
DEFAULT_START_DATE = dt.date(2017, 1, 1)
DEFAULT_START_PRICE = Decimal("100.000000000")
DRIFT = Decimal("0.0015")
VOL = Decimal("0.05")
TX_SCALE = 4.0
TX_NOISE = 0.10

_CENT = Decimal("0.000000001")


def generate_sample_market(
    periods: int = DEFAULT_PERIODS,
    seed: int = DEFAULT_SEED,
    start_date: dt.date = DEFAULT_START_DATE,
    start_price: Decimal = DEFAULT_START_PRICE,
) -> list[tuple[dt.date, Decimal, int]]:
    """Build (date, price, tx_count) tuples for the synthetic series."""
    rng = random.Random(seed)
    rows: list[tuple[dt.date, Decimal, int]] = []
    price = start_price
    with localcontext() as ctx:
        ctx.prec = 40
        for t in range(periods):
            if t > 0:
                z = sum(rng.random() for _ in range(12)) - 6.0
                log_return = DRIFT + VOL * Decimal(z)
                price = (price * log_return.exp()).quantize(
                    _CENT, rounding=ROUND_HALF_EVEN
                )
            wobble = 1.0 + TX_NOISE * (rng.random() - 0.5)
            tx_count = max(1, int(TX_SCALE * (t + 10) * float(price) * wobble))
            rows.append((start_date + dt.timedelta(days=t), price, tx_count))
    return rows


def render_market_csv(rows: list[tuple[dt.date, Decimal, int]]) -> str:
    lines = [MARKET_CSV_HEADER]
    for date, price, tx_count in rows:
        lines.append(f"{date.isoformat()},{price},{tx_count}")
    return "\n".join(lines) + "\n"


def write_sample_market(path: str | Path) -> int:
    """Generate the default series into path; returns the row count."""
    rows = generate_sample_market()
    Path(path).write_text(render_market_csv(rows), encoding="utf-8", newline="")
    return len(rows)


def main(argv: list[str] | None = None) -> None:
    args = sys.argv[1:] if argv is None else argv
    if args:
        target = Path(args[0])
    else:
        target = Path(__file__).resolve().parents[2] / "data" / "sample_market.csv"
    count = write_sample_market(target)
    print(f"wrote {count} rows to {target}")


if __name__ == "__main__":
    main()
