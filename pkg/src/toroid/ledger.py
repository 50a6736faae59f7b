"""Account and collateral state machine with pro-rated lazy rebasement.

Balances are not stored directly.  Each account holds index-invariant
share units; one global index (the running product of all 1 + r factors)
converts shares to TRD.  A rebase therefore touches a single fraction,
every balance scales in exact proportion, and an account opened at period
t is untouched by every rebasement before t, because its shares were
converted at the index current when it entered.

Shares carry an extra factor of 10^9 below raw token precision, so the
floor error of a share conversion sits nine decimal digits under one raw
unit and whole-raw arithmetic (mint, burn, rebase of round amounts) comes
out exact at token precision.

Collateral bookkeeping is pure integer addition: collateral is always
exactly minted * peg_ratio, deposits and withdrawals move both sides in
exact proportion, and nothing else ever touches them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ExceedsCollateralError,
    HoldingPeriodNotMetError,
    InsufficientBalanceError,
    InsufficientForRefundError,
    NonDivisibleCollateralError,
    SelfTransferError,
    SnapshotError,
    UnknownAccountError,
    ZeroCollateralError,
)
from .numerics import UNIT, Amount, Index, Rate, apply_index, grow_index

# Internal share units per raw token unit at index 1.
SHARE_SCALE = 10**9


@dataclass
class Account:
    """One wallet: share units, locked collateral, and the refund obligation.

    collateral == minted * peg_ratio holds exactly at all times; partial
    withdrawals reduce both in proportion.
    """

    id: str
    shares: Amount
    collateral: Amount
    minted: Amount
    created_period: int


class Ledger:
    """Single-owner mutable state machine; operations are serialized.

    Safe to hand between threads, never to mutate concurrently.  Run many
    scenarios in parallel by giving each its own Ledger.
    """

    def __init__(
        self,
        peg_ratio: Rate,
        min_holding_periods: int = 1,
        start_period: int = 0,
    ):
        if peg_ratio.ppb <= 0:
            raise ValueError("peg_ratio must be positive")
        if min_holding_periods < 0:
            raise ValueError("min_holding_periods must be >= 0")
        self.peg_ratio = peg_ratio
        self.min_holding_periods = min_holding_periods
        self.accounts: dict[str, Account] = {}
        self.index = Index.identity()
        self.current_period = start_period
        self.tx_count_this_period = 0
        self.tx_count_prev_period = 0
        self.total_collateral = Amount(0)
        self._next_account_seq = 1

    # -- conversions -------------------------------------------------

    def _minted_for(self, collateral: Amount) -> Amount:
        """TRD minted for collateral; must divide exactly at the peg."""
        scaled = collateral.raw * UNIT
        if scaled % self.peg_ratio.ppb != 0:
            raise NonDivisibleCollateralError(
                f"{collateral.tokens()} base is not an exact multiple of the peg"
            )
        return Amount(scaled // self.peg_ratio.ppb)

    def _to_shares_ceil(self, amount: Amount) -> Amount:
        """Shares granted when tokens enter; ceiling keeps entry balances exact."""
        num, den = self.index.num, self.index.den
        return Amount(-((-amount.raw * SHARE_SCALE * den) // num))

    def _to_shares_floor(self, amount: Amount) -> Amount:
        """Shares removed when tokens leave; flooring never debits extra."""
        num, den = self.index.num, self.index.den
        return Amount(amount.raw * SHARE_SCALE * den // num)

    def _shares_to_balance(self, shares: Amount) -> Amount:
        return Amount(apply_index(shares, self.index).raw // SHARE_SCALE)

    # -- queries -------------------------------------------------------

    def _get(self, account_id: str) -> Account:
        try:
            return self.accounts[account_id]
        except KeyError:
            raise UnknownAccountError(f"unknown account {account_id!r}") from None

    def balance_of(self, account_id: str) -> Amount:
        return self._shares_to_balance(self._get(account_id).shares)

    def total_supply(self) -> Amount:
        total = 0
        for account in self.accounts.values():
            total += self._shares_to_balance(account.shares).raw
        return Amount(total)

    # -- operations ------------------------------------------------------

    def open_account(
        self, collateral: Amount, account_id: str | None = None
    ) -> tuple[str, Amount]:
        """Open a wallet by locking collateral; returns (id, minted TRD)."""
        if collateral.raw == 0:
            raise ZeroCollateralError("cannot open an account with zero collateral")
        minted = self._minted_for(collateral)
        if account_id is None:
            account_id = f"a{self._next_account_seq}"
            self._next_account_seq += 1
        if "," in account_id or "\n" in account_id:
            raise ValueError(f"account id may not contain ',' or newline: {account_id!r}")
        if account_id in self.accounts:
            raise ValueError(f"account id already exists: {account_id!r}")
        self.accounts[account_id] = Account(
            id=account_id,
            shares=self._to_shares_ceil(minted),
            collateral=collateral,
            minted=minted,
            created_period=self.current_period,
        )
        self.total_collateral += collateral
        return account_id, minted

    def deposit(self, account_id: str, collateral: Amount) -> Amount:
        """Add collateral to an existing wallet; returns the TRD minted."""
        account = self._get(account_id)
        if collateral.raw == 0:
            raise ZeroCollateralError("cannot deposit zero collateral")
        minted = self._minted_for(collateral)
        account.shares += self._to_shares_ceil(minted)
        account.collateral += collateral
        account.minted += minted
        self.total_collateral += collateral
        return minted

    def transfer(self, src: str, dst: str, amount: Amount) -> None:
        """Move TRD between wallets; counts toward this period's volume."""
        if src == dst:
            raise SelfTransferError(f"cannot transfer {src!r} to itself")
        sender = self._get(src)
        receiver = self._get(dst)
        if self.balance_of(src).raw < amount.raw:
            raise InsufficientBalanceError(
                f"{src!r} holds {self.balance_of(src).tokens()} TRD, "
                f"cannot send {amount.tokens()}"
            )
        moved = self._to_shares_floor(amount)
        sender.shares -= moved
        receiver.shares += moved
        self.tx_count_this_period += 1

    def rebase(self, r: Rate) -> Amount:
        """Close the period: grow the index by (1 + r), roll the tx counters.

        Every balance scales by (1 + r) to within one raw unit; shares are
        untouched.  Returns the new total supply.
        """
        self.index = grow_index(self.index, r)
        self.tx_count_prev_period = self.tx_count_this_period
        self.tx_count_this_period = 0
        self.current_period += 1
        return self.total_supply()

    def withdraw(self, account_id: str, collateral_out: Amount) -> Amount:
        """Release collateral, burning the proportional originally-minted TRD.

        Interest (balance above the refund obligation) stays in the wallet.
        Returns the TRD burned.
        """
        account = self._get(account_id)
        if collateral_out.raw == 0:
            raise ZeroCollateralError("cannot withdraw zero collateral")
        if collateral_out.raw > account.collateral.raw:
            raise ExceedsCollateralError(
                f"{account_id!r} holds {account.collateral.tokens()} base, "
                f"cannot release {collateral_out.tokens()}"
            )
        age = self.current_period - account.created_period
        if age < self.min_holding_periods:
            raise HoldingPeriodNotMetError(
                f"{account_id!r} is {age} periods old, "
                f"minimum holding is {self.min_holding_periods}"
            )
        burned = self._minted_for(collateral_out)
        balance = self.balance_of(account_id)
        if balance.raw < burned.raw:
            raise InsufficientForRefundError(
                f"{account_id!r} holds {balance.tokens()} TRD, "
                f"refund requires burning {burned.tokens()}"
            )
        account.shares -= self._to_shares_floor(burned)
        account.minted -= burned
        account.collateral -= collateral_out
        self.total_collateral -= collateral_out
        return burned

    # -- snapshots -----------------------------------------------------

    def snapshot(self) -> str:
        """Serialize full state; the round trip is bit-exact."""
        lines = [
            f"{self.index.num},{self.index.den},{self.current_period},"
            f"{self.tx_count_this_period},{self.tx_count_prev_period}"
        ]
        for account in self.accounts.values():
            lines.append(
                f"{account.id},{account.shares.raw},{account.collateral.raw},"
                f"{account.minted.raw},{account.created_period}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def restore(
        cls,
        text: str,
        peg_ratio: Rate,
        min_holding_periods: int = 1,
    ) -> Ledger:
        lines = text.splitlines()
        if not lines:
            raise SnapshotError("empty snapshot")
        header = lines[0].split(",")
        if len(header) != 5:
            raise SnapshotError(f"bad header: {lines[0]!r}")
        try:
            num, den, period, tx_this, tx_prev = (int(x) for x in header)
        except ValueError as exc:
            raise SnapshotError(f"bad header: {lines[0]!r}") from exc
        ledger = cls(peg_ratio, min_holding_periods, start_period=period)
        ledger.index = Index(num, den)
        ledger.tx_count_this_period = tx_this
        ledger.tx_count_prev_period = tx_prev
        total_collateral = 0
        max_seq = 0
        for lineno, line in enumerate(lines[1:], start=2):
            fields = line.split(",")
            if len(fields) != 5:
                raise SnapshotError(f"line {lineno}: expected 5 fields: {line!r}")
            account_id = fields[0]
            try:
                shares, collateral, minted, created = (int(x) for x in fields[1:])
            except ValueError as exc:
                raise SnapshotError(f"line {lineno}: bad integer: {line!r}") from exc
            ledger.accounts[account_id] = Account(
                id=account_id,
                shares=Amount(shares),
                collateral=Amount(collateral),
                minted=Amount(minted),
                created_period=created,
            )
            total_collateral += collateral
            if account_id.startswith("a") and account_id[1:].isdigit():
                max_seq = max(max_seq, int(account_id[1:]))
        ledger.total_collateral = Amount(total_collateral)
        ledger._next_account_seq = max_seq + 1
        return ledger
