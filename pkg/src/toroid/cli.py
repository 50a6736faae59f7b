"""Command-line interface.

Subcommands:
  simulate          backtest a market CSV into a series CSV
  attack sybil      price a Sybil volume-injection scenario
  attack pump-dump  price a pump-and-dump scenario
  ledger demo       scripted walk-through of the peg mechanics

Exit codes: 0 success, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .adversary import (
    SybilScenario,
    render_reports_csv,
    run_pump_and_dump,
    run_sybil,
)
from .controller import RebaseConfig, load_config
from .errors import InvariantViolationError, ToroidError
from .harness import load_market_csv, run_backtest, write_series_csv
from .ledger import Ledger
from .numerics import Amount, Rate, format_raw

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors instead of 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="toroid", description="Toroid stablecoin simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser(
        "simulate", help="run a historical backtest", parents=[], add_help=True
    )
    sim.add_argument("--data", required=True, help="input market CSV")
    sim.add_argument("--config", required=True, help="controller config file")
    sim.add_argument("--initial-supply", required=True, metavar="TRD")
    sim.add_argument("--out", required=True, help="output series CSV")
    sim.add_argument("--gas-cost-trd", metavar="TRD", default=None,
                     help="override per-transaction gas cost, in TRD")
    sim.add_argument("--no-gas-cap", action="store_true")
    sim.add_argument("--no-bootstrap-floor", action="store_true")
    sim.add_argument("--arb-injection", action="store_true",
                     help="feed clamp-driven arbitrage mints into the ledger")

    attack = sub.add_parser("attack", help="price a manipulation scenario")
    attack_sub = attack.add_subparsers(dest="attack_kind", required=True)

    def add_attack_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--delta-v", required=True, type=int,
                       help="injected transactions per period")
        p.add_argument("--periods", required=True, type=int)
        p.add_argument("--baseline-v", required=True, type=int,
                       help="honest transactions per period")
        p.add_argument("--supply", required=True, metavar="TRD",
                       help="total TRD at scenario start")
        p.add_argument("--holdings", metavar="TRD", default=None,
                       help="attacker's pre-attack TRD (default: supply/10)")
        p.add_argument("--start-period", type=int, default=None,
                       help="scenario start period (default: after bootstrap)")
        p.add_argument("--config", required=True)
        p.add_argument("--no-gas-cap", action="store_true")
        p.add_argument("--id", default=None, help="scenario id for the CSV row")
        p.add_argument("--out", required=True, help="output report CSV")

    sybil = attack_sub.add_parser("sybil", help="volume injection, flat market")
    add_attack_common(sybil)

    pump = attack_sub.add_parser("pump-dump", help="buy, inflate, liquidate")
    add_attack_common(pump)
    pump.add_argument("--buy", required=True, type=int, metavar="T",
                      help="period the position is in place")
    pump.add_argument("--sell", required=True, type=int, metavar="T",
                      help="period the position unwinds")

    ledger = sub.add_parser("ledger", help="ledger utilities")
    ledger_sub = ledger.add_subparsers(dest="ledger_kind", required=True)
    ledger_sub.add_parser("demo", help="walk through the peg rules")

    return parser


def _load_cfg(args: argparse.Namespace) -> RebaseConfig:
    cfg = load_config(args.config)
    if getattr(args, "no_gas_cap", False):
        cfg = replace(cfg, gas_cap_enabled=False)
    if getattr(args, "no_bootstrap_floor", False):
        cfg = replace(cfg, floor_zero_during_bootstrap=False)
    return cfg


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    rows = load_market_csv(args.data)
    initial_supply = Amount.from_tokens(args.initial_supply)
    override = (
        Amount.from_tokens(args.gas_cost_trd) if args.gas_cost_trd else None
    )
    series = run_backtest(
        rows,
        cfg,
        initial_supply,
        gas_cost_trd_override=override,
        arb_injection=args.arb_injection,
    )
    write_series_csv(series, args.out)
    if series:
        last = series[-1]
        print(
            f"{len(series)} periods -> {args.out}; final supply "
            f"{last.trd_supply.tokens()} TRD, final price {last.trd_price:.9f}"
        )
    else:
        print(f"0 periods -> {args.out} (need at least two input rows)")
    return EXIT_OK


def _build_scenario(args: argparse.Namespace, cfg: RebaseConfig) -> SybilScenario:
    supply = Amount.from_tokens(args.supply)
    if args.holdings is not None:
        holdings = Amount.from_tokens(args.holdings)
    else:
        holdings = Amount(supply.raw // 10)
    start = args.start_period if args.start_period is not None else cfg.bootstrap_periods
    return SybilScenario(
        delta_v_per_period=args.delta_v,
        periods=args.periods,
        baseline_v=args.baseline_v,
        start_supply=supply,
        attacker_holdings=holdings,
        start_period=start,
    )


def _report_out(args, scenario, report, default_id: str) -> int:
    scenario_id = args.id if args.id is not None else default_id
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_reports_csv([(scenario_id, scenario, report)]))
    verdict = "PROFITABLE" if report.profitable else "not profitable"
    print(
        f"{scenario_id}: cost {report.cost_base.tokens()} base, "
        f"gain {report.attacker_gain_base.tokens()} base, "
        f"net {format_raw(report.net_profit_base)} base -> {verdict}"
    )
    return EXIT_OK


def _cmd_attack_sybil(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    scenario = _build_scenario(args, cfg)
    report = run_sybil(scenario, cfg)
    return _report_out(args, scenario, report, "sybil")


def _cmd_attack_pump_dump(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    scenario = _build_scenario(args, cfg)
    report = run_pump_and_dump(scenario, args.buy, args.sell, cfg)
    return _report_out(args, scenario, report, "pump-dump")


def _cmd_ledger_demo(args: argparse.Namespace) -> int:
    cfg = RebaseConfig()
    ledger = Ledger(cfg.peg_ratio)

    def show(step: str) -> None:
        print(f"== {step}")
        for account in ledger.accounts.values():
            print(
                f"   {account.id}: balance {ledger.balance_of(account.id).tokens()} TRD, "
                f"collateral {account.collateral.tokens()} base, "
                f"minted {account.minted.tokens()} TRD"
            )
        print(
            f"   supply {ledger.total_supply().tokens()} TRD, "
            f"collateral pool {ledger.total_collateral.tokens()} base"
        )

    print("One-way peg walk-through (peg ratio 0.1 base per TRD)")
    alice, minted = ledger.open_account(Amount.from_tokens(1), account_id="alice")
    show(f"rule 1: alice deposits 1 base, mints {minted.tokens()} TRD")

    minted = ledger.deposit(alice, Amount.from_tokens("0.5"))
    show(f"rule 2: alice deposits 0.5 base more, mints {minted.tokens()} TRD")

    bob, minted = ledger.open_account(Amount.from_tokens(2), account_id="bob")
    show(f"rule 1 again: bob deposits 2 base, mints {minted.tokens()} TRD")

    supply = ledger.rebase(Rate.from_decimal("0.1"))
    show(f"period closes with +10% rebasement, supply now {supply.tokens()} TRD")

    ledger.transfer(alice, bob, Amount.from_tokens(1))
    show("alice sends bob 1 TRD (counts toward next period's volume)")

    burned = ledger.withdraw(alice, Amount.from_tokens("1.5"))
    show(
        f"rules 3-4: alice reclaims her full 1.5 base collateral, burning "
        f"{burned.tokens()} TRD; the interest stays in her wallet"
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "attack":
            if args.attack_kind == "sybil":
                return _cmd_attack_sybil(args)
            return _cmd_attack_pump_dump(args)
        if args.command == "ledger":
            return _cmd_ledger_demo(args)
        raise AssertionError(f"unhandled command {args.command!r}")
    except InvariantViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ToroidError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
