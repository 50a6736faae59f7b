"""Prices manipulation attacks and renders a profitability verdict.

Each attack runs two simulations from bit-identical initial ledgers: one
with the injected transaction volume, one without.  Whatever the attacker
gained is the difference between the two runs, so honest dynamics cancel
exactly.  The accounting deliberately favors the attacker: injected
transactions cost exactly the configured gas and nothing else (no fees,
no slippage), and Sybil gains are valued at the peg ceiling, the best
price any sale could fetch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .controller import PeriodMetrics, RebaseConfig, combined_rate
from .errors import InvariantViolationError, NonDivisibleCollateralError
from .ledger import Ledger
from .market import MarketState, initial_market, step_price
from .numerics import UNIT, Amount, format_raw

_ATTACKER = "attacker"
_GENESIS = "genesis"


@dataclass(frozen=True, slots=True)
class SybilScenario:
    """One volume-manipulation scenario.

    delta_v_per_period  spurious transactions injected each period
    periods             attack duration in periods
    baseline_v          honest transactions per period
    start_supply        total TRD at scenario start (attacker included)
    attacker_holdings   TRD the attacker acquired before the attack
    start_period        period ordinal at scenario start (default is
                        just past the standard bootstrap window)
    """

    delta_v_per_period: int
    periods: int
    baseline_v: int
    start_supply: Amount
    attacker_holdings: Amount
    start_period: int = 90

    def __post_init__(self) -> None:
        if self.periods < 1:
            raise ValueError("periods must be >= 1")
        if self.delta_v_per_period < 0 or self.baseline_v < 0:
            raise ValueError("transaction counts must be >= 0")
        if self.attacker_holdings.raw > self.start_supply.raw:
            raise ValueError("attacker cannot hold more than the total supply")


@dataclass(frozen=True, slots=True)
class AttackReport:
    """Outcome of one scenario; net_profit_base is signed raw base units."""

    cost_base: Amount
    extra_supply_trd: Amount
    attacker_gain_base: Amount
    net_profit_base: int
    profitable: bool


def sybil_cost(v: int, cfg: RebaseConfig) -> Amount:
    """Gas cost of v injected transactions, in base coin.  Exactly linear."""
    if v < 0:
        raise ValueError("transaction count must be >= 0")
    return Amount(v * cfg.gas_cost_base.raw)


def _collateral_for(minted: Amount, cfg: RebaseConfig) -> Amount:
    scaled = minted.raw * cfg.peg_ratio.ppb
    if scaled % UNIT != 0:
        raise NonDivisibleCollateralError(
            f"{minted.tokens()} TRD has no exact collateral at the peg"
        )
    return Amount(scaled // UNIT)


def _seed_ledger(scenario: SybilScenario, cfg: RebaseConfig) -> Ledger:
    ledger = Ledger(cfg.peg_ratio, start_period=scenario.start_period)
    honest = scenario.start_supply - scenario.attacker_holdings
    if honest.raw > 0:
        ledger.open_account(_collateral_for(honest, cfg), account_id=_GENESIS)
    if scenario.attacker_holdings.raw > 0:
        ledger.open_account(
            _collateral_for(scenario.attacker_holdings, cfg), account_id=_ATTACKER
        )
    return ledger


def _attacker_balance(ledger: Ledger) -> Amount:
    if _ATTACKER not in ledger.accounts:
        return Amount(0)
    return ledger.balance_of(_ATTACKER)


def _extra(post_attack: Amount, counterfactual: Amount, what: str) -> Amount:
    if post_attack.raw < counterfactual.raw:
        raise InvariantViolationError(
            f"injected volume reduced {what}: "
            f"{post_attack.tokens()} < {counterfactual.tokens()}"
        )
    return post_attack - counterfactual


def _run_flat_arm(
    scenario: SybilScenario, cfg: RebaseConfig, inject: bool
) -> Ledger:
    ledger = _seed_ledger(scenario, cfg)
    v_prev = scenario.baseline_v
    for _ in range(scenario.periods):
        v = scenario.baseline_v + (scenario.delta_v_per_period if inject else 0)
        metrics = PeriodMetrics(
            t=ledger.current_period, v=v, v_prev=v_prev, s=ledger.total_supply()
        )
        breakdown = combined_rate(metrics, cfg)
        ledger.rebase(breakdown.r_combined)
        v_prev = v
    return ledger


def run_sybil(scenario: SybilScenario, cfg: RebaseConfig) -> AttackReport:
    """Flat-market Sybil attack: inject volume, value the gain at the peg.

    Both arms see an identical flat market (return 1 every period); the
    only difference is the injected transaction count.
    """
    attacked = _run_flat_arm(scenario, cfg, inject=True)
    baseline = _run_flat_arm(scenario, cfg, inject=False)
    extra_supply = _extra(
        attacked.total_supply(), baseline.total_supply(), "total supply"
    )
    extra_holdings = _extra(
        _attacker_balance(attacked), _attacker_balance(baseline), "attacker balance"
    )
    gain = Amount(extra_holdings.raw * cfg.peg_ratio.ppb // UNIT)
    cost = sybil_cost(scenario.delta_v_per_period * scenario.periods, cfg)
    net = gain.raw - cost.raw
    return AttackReport(
        cost_base=cost,
        extra_supply_trd=extra_supply,
        attacker_gain_base=gain,
        net_profit_base=net,
        profitable=net > 0,
    )


def _run_priced_arm(
    scenario: SybilScenario,
    cfg: RebaseConfig,
    buy_period: int,
    sell_period: int,
    inject: bool,
) -> tuple[Ledger, MarketState]:
    ledger = _seed_ledger(scenario, cfg)
    market = initial_market(1.0, cfg)
    v_prev = scenario.baseline_v
    for p in range(1, sell_period + 1):
        inject_now = inject and buy_period < p
        v = scenario.baseline_v + (scenario.delta_v_per_period if inject_now else 0)
        metrics = PeriodMetrics(
            t=ledger.current_period, v=v, v_prev=v_prev, s=ledger.total_supply()
        )
        breakdown = combined_rate(metrics, cfg)
        supply = ledger.rebase(breakdown.r_combined)
        market = step_price(market, 1.0, breakdown.r_combined, cfg, supply)
        v_prev = v
    return ledger, market


def run_pump_and_dump(
    scenario: SybilScenario,
    buy_period: int,
    sell_period: int,
    cfg: RebaseConfig,
) -> AttackReport:
    """Pump-and-dump: accumulate, inflate the rebasement, liquidate.

    The attacker's position is in place by buy_period, spurious volume is
    injected in every period after buy_period through sell_period, and the
    position unwinds at the simulated (post-dilution) price of sell_period.
    The gain is the attack-vs-counterfactual balance difference valued at
    that sale price, so it includes both the rebasement accrued on the
    holdings and the price move the attack itself caused.
    """
    if buy_period < 0:
        raise ValueError("buy_period must be >= 0")
    if not buy_period < sell_period <= scenario.periods:
        raise ValueError("need buy_period < sell_period <= periods")
    attacked, market = _run_priced_arm(
        scenario, cfg, buy_period, sell_period, inject=True
    )
    baseline, _ = _run_priced_arm(
        scenario, cfg, buy_period, sell_period, inject=False
    )
    extra_supply = _extra(
        attacked.total_supply(), baseline.total_supply(), "total supply"
    )
    extra_holdings = _extra(
        _attacker_balance(attacked), _attacker_balance(baseline), "attacker balance"
    )
    # Sale price in base coin per TRD, taken exactly from the float pair.
    sale = Fraction(market.trd_price) / Fraction(market.base_price)
    gain = Amount(int(extra_holdings.raw * sale))
    cost = sybil_cost(
        scenario.delta_v_per_period * (sell_period - buy_period), cfg
    )
    net = gain.raw - cost.raw
    return AttackReport(
        cost_base=cost,
        extra_supply_trd=extra_supply,
        attacker_gain_base=gain,
        net_profit_base=net,
        profitable=net > 0,
    )


ATTACK_CSV_HEADER = (
    "scenario_id,delta_v,periods,cost_base,extra_supply_trd,"
    "gain_base,net_profit_base,profitable"
)


def render_reports_csv(
    entries: list[tuple[str, SybilScenario, AttackReport]],
) -> str:
    """Render attack reports as CSV rows under ATTACK_CSV_HEADER."""
    lines = [ATTACK_CSV_HEADER]
    for scenario_id, scenario, report in entries:
        lines.append(
            ",".join(
                (
                    scenario_id,
                    str(scenario.delta_v_per_period),
                    str(scenario.periods),
                    report.cost_base.tokens(),
                    report.extra_supply_trd.tokens(),
                    report.attacker_gain_base.tokens(),
                    format_raw(report.net_profit_base),
                    "true" if report.profitable else "false",
                )
            )
        )
    return "\n".join(lines) + "\n"
