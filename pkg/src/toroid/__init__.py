"""Toroid: a deterministic simulator for a collateral-backed, one-way-pegged
elastic-supply token with gas-cost-capped rebasement and an adversary
harness for pricing volume-manipulation attacks."""

from .adversary import (
    AttackReport,
    SybilScenario,
    render_reports_csv,
    run_pump_and_dump,
    run_sybil,
    sybil_cost,
)
from .controller import (
    PeriodMetrics,
    RateBreakdown,
    RebaseConfig,
    combined_rate,
    gas_cap_rate,
    initial_rate,
    load_config,
    parse_config,
    volume_rate,
)
from .errors import ToroidError
from .harness import (
    MarketRow,
    SeriesRow,
    load_market_csv,
    read_series_csv,
    run_backtest,
    write_series_csv,
)
from .ledger import Account, Ledger
from .market import MarketState, initial_market, step_price
from .numerics import (
    UNIT,
    Amount,
    Index,
    Rate,
    apply_index,
    grow_index,
    mul_amount_rate,
    one_plus,
)

__version__ = "0.1.0"

__all__ = [
    "Account",
    "Amount",
    "AttackReport",
    "Index",
    "Ledger",
    "MarketRow",
    "MarketState",
    "PeriodMetrics",
    "Rate",
    "RateBreakdown",
    "RebaseConfig",
    "SeriesRow",
    "SybilScenario",
    "ToroidError",
    "UNIT",
    "apply_index",
    "combined_rate",
    "gas_cap_rate",
    "grow_index",
    "initial_market",
    "initial_rate",
    "load_config",
    "load_market_csv",
    "mul_amount_rate",
    "one_plus",
    "parse_config",
    "read_series_csv",
    "render_reports_csv",
    "run_backtest",
    "run_pump_and_dump",
    "run_sybil",
    "step_price",
    "sybil_cost",
    "volume_rate",
    "write_series_csv",
    "__version__",
]
