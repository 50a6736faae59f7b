"""Per-period rebasement rate computation.

The combined rate has three ingredients: a decaying bootstrap incentive
1/(t + t0), a volume response driven by the ratio of consecutive
transaction counts, and a gas-cost cap that clamps the volume response so
that the supply change attributable to transaction count, valued at the
peg, can never exceed the gas burned to produce those transactions.  That
clamp is what makes count manipulation uneconomical.

All functions here are pure and stateless; sweeps over scenarios can call
them from as many threads as they like.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_FLOOR, Decimal, localcontext
from pathlib import Path

from .errors import ConfigError, ZeroSupplyError
from .numerics import UNIT, Amount, Rate

# Natural-log precision (decimal digits).  Decimal ln is correctly rounded,
# so the floored ppb result is identical on every platform.
_LN_PRECISION = 50

# Combined rate never goes below -0.99: one period can never wipe more
# than 99% of supply, whatever the configuration.
HARD_FLOOR_PPB = -990_000_000


@dataclass(frozen=True, slots=True)
class RebaseConfig:
    """All controller constants.

    t0                          initial-rate offset: first period grows 1/t0
    bootstrap_periods           length of the incentive bootstrap window
    k_v                         gain on the log volume ratio
    gas_cost_base               base-coin cost of one transaction (raw units)
    peg_ratio                   base coin per TRD (the one-way peg ceiling)
    gas_cap_enabled             clamp the volume response to the gas cap
    floor_zero_during_bootstrap forbid negative rebasement while bootstrapping
    period_seconds              wall-clock length of one period
    """

    t0: int = 10
    bootstrap_periods: int = 90
    k_v: Rate = Rate(100_000_000)
    gas_cost_base: Amount = Amount(400_000)
    peg_ratio: Rate = Rate(100_000_000)
    gas_cap_enabled: bool = True
    floor_zero_during_bootstrap: bool = True
    period_seconds: int = 86400

    def __post_init__(self) -> None:
        if self.t0 < 1:
            raise ConfigError(f"t0 must be >= 1, got {self.t0}")
        if self.peg_ratio.ppb <= 0:
            raise ConfigError("peg_ratio must be positive")
        if self.gas_cost_base.raw <= 0:
            raise ConfigError("gas_cost_base must be positive")
        if self.bootstrap_periods < 0:
            raise ConfigError("bootstrap_periods must be >= 0")
        if self.period_seconds < 1:
            raise ConfigError("period_seconds must be >= 1")

    def gas_cost_trd(self) -> Amount:
        """Per-transaction gas cost converted to TRD at the peg, flooring."""
        return Amount(self.gas_cost_base.raw * UNIT // self.peg_ratio.ppb)


@dataclass(frozen=True, slots=True)
class PeriodMetrics:
    """Endogenous inputs measured over one period.

    t       period ordinal since launch
    v       transfer count this period
    v_prev  transfer count the previous period
    s       total TRD supply at period start
    """

    t: int
    v: int
    v_prev: int
    s: Amount


@dataclass(frozen=True, slots=True)
class RateBreakdown:
    r_initial: Rate
    r_vol: Rate
    r_gas_cap: Rate
    r_combined: Rate


def initial_rate(t: int, cfg: RebaseConfig) -> Rate:
    """Bootstrap incentive rate 1/(t + t0), floored to ppb.

    Strictly decreasing in t and vanishing as t grows: 10% at t=0 and 1%
    at t=90 under the defaults.
    """
    return Rate(UNIT // (t + cfg.t0))


def gas_cap_rate(m: PeriodMetrics, cfg: RebaseConfig) -> Rate:
    """Largest volume-driven rate the period's gas expenditure can justify.

    v transactions cost v * gas_cost_base in base coin; converted to TRD at
    the peg and spread over supply s that bounds the rate at
    v * gas_cost_trd / s.  Linear in v, inverse in s, never negative.
    """
    if m.s.raw == 0:
        raise ZeroSupplyError("gas cap undefined at zero supply")
    return Rate(m.v * cfg.gas_cost_trd().raw * UNIT // m.s.raw)


def volume_rate(m: PeriodMetrics, cfg: RebaseConfig) -> Rate:
    """Volume response k_v * ln(v / v_prev), both counts floored at 1.

    Floored to ppb (toward negative infinity), so negative responses are
    conservatively deepened by at most one ppb.  Zero when the counts are
    equal; sign otherwise matches the direction of the change, except that
    sub-ppb positive responses floor to zero.
    """
    v = max(m.v, 1)
    v_prev = max(m.v_prev, 1)
    if v == v_prev:
        return Rate(0)
    with localcontext() as ctx:
        ctx.prec = _LN_PRECISION
        ln_ratio = (Decimal(v) / Decimal(v_prev)).ln()
        scaled = ln_ratio * cfg.k_v.ppb
        return Rate(int(scaled.to_integral_value(rounding=ROUND_FLOOR)))


def clamp_rate(r_vol: Rate, r_gas_cap: Rate) -> Rate:
    """Clamp the volume response into [-r_gas_cap, +r_gas_cap]."""
    return Rate(max(-r_gas_cap.ppb, min(r_gas_cap.ppb, r_vol.ppb)))


def combine_components(
    t: int, r_initial: Rate, r_vol: Rate, r_gas_cap: Rate, cfg: RebaseConfig
) -> Rate:
    """Assemble the combined rate from already-computed components."""
    if cfg.gas_cap_enabled:
        body = clamp_rate(r_vol, r_gas_cap)
    else:
        body = r_vol
    combined = r_initial.ppb + body.ppb
    if cfg.floor_zero_during_bootstrap and t < cfg.bootstrap_periods:
        combined = max(combined, 0)
    return Rate(max(combined, HARD_FLOOR_PPB))


def combined_rate(m: PeriodMetrics, cfg: RebaseConfig) -> RateBreakdown:
    """Full per-period rate: incentive plus gas-capped volume response.

    The gas cap is computed (and reported) even when clamping is disabled,
    so uncapped runs still expose how far they stray past it.
    """
    r_i = initial_rate(m.t, cfg)
    r_v = volume_rate(m, cfg)
    r_cap = gas_cap_rate(m, cfg)
    return RateBreakdown(
        r_initial=r_i,
        r_vol=r_v,
        r_gas_cap=r_cap,
        r_combined=combine_components(m.t, r_i, r_v, r_cap, cfg),
    )


# --- configuration files ------------------------------------------------

_CONFIG_KEYS = (
    "t0",
    "bootstrap_periods",
    "k_v",
    "gas_cost_base",
    "peg_ratio",
    "gas_cap_enabled",
    "floor_zero_during_bootstrap",
    "period_seconds",
)

_TRUE_WORDS = {"true", "yes", "1", "on"}
_FALSE_WORDS = {"false", "no", "0", "off"}


def _parse_bool(key: str, raw: str) -> bool:
    word = raw.lower()
    if word in _TRUE_WORDS:
        return True
    if word in _FALSE_WORDS:
        return False
    raise ConfigError(f"{key}: expected true/false, got {raw!r}")


def parse_config(text: str) -> RebaseConfig:
    """Parse flat key = value configuration text.

    Rates are decimal strings, amounts are decimal token counts, and
    unknown keys are rejected.  Blank lines and '#' comments are ignored.
    """
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, eq, raw = stripped.partition("=")
        if not eq:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key = key.strip()
        raw = raw.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = raw

    kwargs: dict[str, object] = {}
    try:
        if "t0" in values:
            kwargs["t0"] = int(values["t0"])
        if "bootstrap_periods" in values:
            kwargs["bootstrap_periods"] = int(values["bootstrap_periods"])
        if "period_seconds" in values:
            kwargs["period_seconds"] = int(values["period_seconds"])
        if "k_v" in values:
            kwargs["k_v"] = Rate.from_decimal(values["k_v"])
        if "peg_ratio" in values:
            kwargs["peg_ratio"] = Rate.from_decimal(values["peg_ratio"])
        if "gas_cost_base" in values:
            kwargs["gas_cost_base"] = Amount.from_tokens(values["gas_cost_base"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if "gas_cap_enabled" in values:
        kwargs["gas_cap_enabled"] = _parse_bool(
            "gas_cap_enabled", values["gas_cap_enabled"]
        )
    if "floor_zero_during_bootstrap" in values:
        kwargs["floor_zero_during_bootstrap"] = _parse_bool(
            "floor_zero_during_bootstrap", values["floor_zero_during_bootstrap"]
        )
    return RebaseConfig(**kwargs)


def load_config(path: str | Path) -> RebaseConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def dump_config(cfg: RebaseConfig) -> str:
    """Render a config back to the flat key = value format."""
    lines = [
        f"t0 = {cfg.t0}",
        f"bootstrap_periods = {cfg.bootstrap_periods}",
        f"k_v = {cfg.k_v.decimal()}",
        f"gas_cost_base = {cfg.gas_cost_base.tokens()}",
        f"peg_ratio = {cfg.peg_ratio.decimal()}",
        f"gas_cap_enabled = {'true' if cfg.gas_cap_enabled else 'false'}",
        "floor_zero_during_bootstrap = "
        + ("true" if cfg.floor_zero_during_bootstrap else "false"),
        f"period_seconds = {cfg.period_seconds}",
    ]
    return "\n".join(lines) + "\n"
