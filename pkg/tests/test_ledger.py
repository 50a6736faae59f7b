import random

import pytest

from toroid.errors import (
    ExceedsCollateralError,
    HoldingPeriodNotMetError,
    InsufficientBalanceError,
    InsufficientForRefundError,
    NonDivisibleCollateralError,
    NonPositiveFactorError,
    SelfTransferError,
    UnknownAccountError,
    ZeroCollateralError,
)
from toroid.ledger import SHARE_SCALE, Ledger
from toroid.numerics import UNIT, Amount, Rate, apply_index, one_plus

PEG = Rate.from_decimal("0.1")


def fresh() -> Ledger:
    return Ledger(PEG)


class TestOpenAccount:
    def test_one_base_mints_ten_trd(self):
        ledger = fresh()
        account_id, minted = ledger.open_account(Amount.from_tokens(1))
        assert minted == Amount.from_tokens(10)
        assert ledger.balance_of(account_id) == minted
        assert ledger.total_supply() == minted
        assert ledger.total_collateral == Amount.from_tokens(1)

    def test_zero_collateral_rejected(self):
        with pytest.raises(ZeroCollateralError):
            fresh().open_account(Amount(0))

    def test_entry_after_growth_converts_at_current_index(self):
        # 0.1 base at index 11/10 mints 1 TRD; the share count at raw
        # granularity is floor(1e9 * 10 / 11)
        ledger = fresh()
        ledger.open_account(Amount.from_tokens(1))
        ledger.rebase(Rate.from_decimal("0.1"))
        account_id, minted = ledger.open_account(Amount.from_tokens("0.1"))
        assert minted == Amount.from_tokens(1)
        assert ledger.accounts[account_id].shares.raw // SHARE_SCALE == 909_090_909
        assert ledger.balance_of(account_id) == minted

    def test_non_divisible_collateral(self):
        ledger = Ledger(Rate.from_decimal("0.3"))
        with pytest.raises(NonDivisibleCollateralError):
            ledger.open_account(Amount(1))
        ledger.open_account(Amount(3))

    def test_duplicate_id_rejected(self):
        ledger = fresh()
        ledger.open_account(Amount.from_tokens(1), account_id="x")
        with pytest.raises(ValueError):
            ledger.open_account(Amount.from_tokens(1), account_id="x")

    def test_id_with_comma_rejected(self):
        with pytest.raises(ValueError):
            fresh().open_account(Amount.from_tokens(1), account_id="a,b")


class TestDeposit:
    def test_deposit_mints_at_peg(self):
        ledger = fresh()
        account_id, _ = ledger.open_account(Amount.from_tokens(1))
        minted = ledger.deposit(account_id, Amount.from_tokens("0.5"))
        assert minted == Amount.from_tokens(5)
        assert ledger.balance_of(account_id) == Amount.from_tokens(15)
        assert ledger.accounts[account_id].minted == Amount.from_tokens(15)

    def test_zero_deposit_rejected(self):
        ledger = fresh()
        account_id, _ = ledger.open_account(Amount.from_tokens(1))
        with pytest.raises(ZeroCollateralError):
            ledger.deposit(account_id, Amount(0))

    def test_unknown_account(self):
        with pytest.raises(UnknownAccountError):
            fresh().deposit("ghost", Amount.from_tokens(1))


class TestTransfer:
    def test_full_balance_moves(self):
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(1))
        b, _ = ledger.open_account(Amount.from_tokens(1))
        ledger.transfer(a, b, Amount.from_tokens(10))
        assert ledger.balance_of(a) == Amount(0)
        assert ledger.balance_of(b) == Amount.from_tokens(20)
        assert ledger.tx_count_this_period == 1

    def test_insufficient_balance(self):
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(1))
        b, _ = ledger.open_account(Amount.from_tokens(1))
        with pytest.raises(InsufficientBalanceError):
            ledger.transfer(a, b, Amount.from_tokens(11))

    def test_self_transfer(self):
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(1))
        with pytest.raises(SelfTransferError):
            ledger.transfer(a, a, Amount(1))

    def test_unknown_parties(self):
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(1))
        with pytest.raises(UnknownAccountError):
            ledger.transfer(a, "ghost", Amount(1))
        with pytest.raises(UnknownAccountError):
            ledger.transfer("ghost", a, Amount(1))

    def test_transfer_at_grown_index(self):
        # moving 1 TRD at index 11/10: share floor leaves the receiver at
        # most one raw unit short
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(1))
        ledger.rebase(Rate.from_decimal("0.1"))
        b, _ = ledger.open_account(Amount.from_tokens(1))
        before = ledger.balance_of(b)
        ledger.transfer(a, b, Amount.from_tokens(1))
        received = ledger.balance_of(b) - before
        assert UNIT - 1 <= received.raw <= UNIT

    def test_supply_neutral_within_one_raw(self):
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(3))
        b, _ = ledger.open_account(Amount.from_tokens(2))
        ledger.rebase(Rate.from_decimal("0.037"))
        index_before = ledger.index
        supply_before = ledger.total_supply()
        ledger.transfer(a, b, Amount.from_tokens("7.123456789"))
        assert abs(ledger.total_supply().raw - supply_before.raw) <= 1
        assert ledger.index == index_before


class TestRebase:
    def test_pro_rated_growth(self):
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(1))
        b, _ = ledger.open_account(Amount.from_tokens(2))
        supply = ledger.rebase(Rate.from_decimal("0.1"))
        assert ledger.balance_of(a) == Amount.from_tokens(11)
        assert ledger.balance_of(b) == Amount.from_tokens(22)
        assert supply == Amount.from_tokens(33)

    def test_zero_rate_identity(self):
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(1))
        ledger.rebase(Rate(0))
        assert ledger.balance_of(a) == Amount.from_tokens(10)

    def test_negative_rebasement(self):
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(1))
        b, _ = ledger.open_account(Amount.from_tokens(2))
        ledger.rebase(Rate.from_decimal("-0.2"))
        assert ledger.balance_of(a) == Amount.from_tokens(8)
        assert ledger.balance_of(b) == Amount.from_tokens(16)

    def test_counters_roll(self):
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(1))
        b, _ = ledger.open_account(Amount.from_tokens(1))
        ledger.transfer(a, b, Amount(5))
        ledger.transfer(b, a, Amount(5))
        assert ledger.tx_count_this_period == 2
        ledger.rebase(Rate(0))
        assert ledger.tx_count_prev_period == 2
        assert ledger.tx_count_this_period == 0
        assert ledger.current_period == 1

    def test_non_positive_factor(self):
        ledger = fresh()
        with pytest.raises(NonPositiveFactorError):
            ledger.rebase(Rate(-UNIT))


class TestWithdraw:
    def test_interest_stays_after_full_withdrawal(self):
        # open 10 TRD for 1 base, +10% rebasement, full withdrawal: the
        # refund is exactly 1 base and exactly 1 TRD of interest remains
        ledger = fresh()
        account_id, _ = ledger.open_account(Amount.from_tokens(1))
        ledger.rebase(Rate.from_decimal("0.1"))
        assert ledger.balance_of(account_id) == Amount.from_tokens(11)
        burned = ledger.withdraw(account_id, Amount.from_tokens(1))
        assert burned == Amount.from_tokens(10)
        assert ledger.balance_of(account_id) == Amount.from_tokens(1)
        account = ledger.accounts[account_id]
        assert account.collateral == Amount(0)
        assert account.minted == Amount(0)
        assert ledger.total_collateral == Amount(0)

    def test_negative_interest_blocks_full_withdrawal(self):
        ledger = fresh()
        account_id, _ = ledger.open_account(Amount.from_tokens(1))
        ledger.rebase(Rate.from_decimal("-0.2"))
        assert ledger.balance_of(account_id) == Amount.from_tokens(8)
        with pytest.raises(InsufficientForRefundError):
            ledger.withdraw(account_id, Amount.from_tokens(1))
        burned = ledger.withdraw(account_id, Amount.from_tokens("0.8"))
        assert burned == Amount.from_tokens(8)
        assert ledger.balance_of(account_id) == Amount(0)
        assert ledger.accounts[account_id].minted == Amount.from_tokens(2)
        assert ledger.accounts[account_id].collateral == Amount.from_tokens("0.2")

    def test_holding_period(self):
        ledger = fresh()
        account_id, _ = ledger.open_account(Amount.from_tokens(1))
        with pytest.raises(HoldingPeriodNotMetError):
            ledger.withdraw(account_id, Amount.from_tokens(1))

    def test_exceeds_collateral(self):
        ledger = fresh()
        account_id, _ = ledger.open_account(Amount.from_tokens(1))
        ledger.rebase(Rate(0))
        with pytest.raises(ExceedsCollateralError):
            ledger.withdraw(account_id, Amount.from_tokens("1.1"))

    def test_zero_withdrawal_rejected(self):
        ledger = fresh()
        account_id, _ = ledger.open_account(Amount.from_tokens(1))
        ledger.rebase(Rate(0))
        with pytest.raises(ZeroCollateralError):
            ledger.withdraw(account_id, Amount(0))

    def test_unknown_account(self):
        with pytest.raises(UnknownAccountError):
            fresh().withdraw("ghost", Amount.from_tokens(1))

    def test_peg_obligation_after_partial(self):
        ledger = fresh()
        account_id, _ = ledger.open_account(Amount.from_tokens(2))
        ledger.rebase(Rate.from_decimal("0.05"))
        ledger.withdraw(account_id, Amount.from_tokens("0.7"))
        account = ledger.accounts[account_id]
        assert account.minted == Amount.from_tokens(13)
        assert account.collateral == Amount.from_tokens("1.3")
        assert account.collateral.raw == account.minted.raw * PEG.ppb // UNIT


class TestTimestampInsulation:
    def test_entry_balance_ignores_prior_history(self):
        # same deposit, wildly different prior rebasement history: the
        # entry balance is the minted amount either way
        history_a = fresh()
        history_b = fresh()
        history_a.open_account(Amount.from_tokens(1), account_id="seed")
        history_b.open_account(Amount.from_tokens(1), account_id="seed")
        rng = random.Random(88)
        for _ in range(25):
            history_a.rebase(Rate(rng.randrange(-300_000_000, 500_000_000)))
        for _ in range(3):
            history_b.rebase(Rate(rng.randrange(-300_000_000, 500_000_000)))
        for ledger in (history_a, history_b):
            account_id, minted = ledger.open_account(Amount.from_tokens("7.3"))
            assert ledger.balance_of(account_id) == minted


class TestSnapshot:
    def test_round_trip_bit_exact(self):
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(1))
        b, _ = ledger.open_account(Amount.from_tokens("2.5"))
        ledger.rebase(Rate.from_decimal("0.123456789"))
        ledger.transfer(a, b, Amount.from_tokens(3))
        ledger.rebase(Rate.from_decimal("-0.01"))
        ledger.deposit(b, Amount.from_tokens("0.1"))
        text = ledger.snapshot()
        restored = Ledger.restore(text, PEG)
        assert restored.snapshot() == text
        assert restored.index == ledger.index
        assert restored.total_supply() == ledger.total_supply()
        assert restored.total_collateral == ledger.total_collateral
        assert restored.balance_of(a) == ledger.balance_of(a)

    def test_restored_ledger_keeps_working(self):
        ledger = fresh()
        a, _ = ledger.open_account(Amount.from_tokens(1))
        ledger.rebase(Rate.from_decimal("0.1"))
        restored = Ledger.restore(ledger.snapshot(), PEG)
        new_id, _ = restored.open_account(Amount.from_tokens(1))
        assert new_id not in ledger.accounts
        assert restored.balance_of(new_id) == Amount.from_tokens(10)


class TestRandomizedInvariants:
    """Seeded operation-sequence fuzzing of the conservation rules.

    The heavyweight version with a much larger sequence count lives in the
    acceptance suite; this one keeps day-to-day runs fast.
    """

    def _run_sequence(self, rng: random.Random) -> None:
        ledger = fresh()
        expected_collateral = 0
        ids: list[str] = []
        for _ in range(rng.randrange(4, 11)):
            op = rng.random()
            if op < 0.3 or len(ids) < 2:
                collateral = Amount(rng.randrange(1, 10**7) * 100)
                account_id, minted = ledger.open_account(collateral)
                ids.append(account_id)
                expected_collateral += collateral.raw
                # entry balance equals the minted amount exactly
                assert ledger.balance_of(account_id) == minted
            elif op < 0.5:
                collateral = Amount(rng.randrange(1, 10**7) * 100)
                ledger.deposit(rng.choice(ids), collateral)
                expected_collateral += collateral.raw
            elif op < 0.7:
                src, dst = rng.sample(ids, 2)
                balance = ledger.balance_of(src)
                if balance.raw == 0:
                    continue
                amount = Amount(rng.randrange(0, balance.raw + 1))
                ledger.transfer(src, dst, amount)
            elif op < 0.9:
                r = Rate(rng.randrange(-500_000_000, 1_000_000_000))
                balances = {i: ledger.balance_of(i) for i in ids}
                shares = {i: ledger.accounts[i].shares for i in ids}
                ledger.rebase(r)
                # proportionality: shares untouched; every balance scales by
                # (1 + r) within one raw unit of quantization, plus one more
                # when positive growth amplifies the pre-rebase floor loss
                slack = 1 if r.ppb <= 0 else 2
                for i in ids:
                    assert ledger.accounts[i].shares == shares[i]
                    scaled = apply_index(balances[i], one_plus(r)).raw
                    actual = ledger.balance_of(i).raw
                    assert 0 <= actual - scaled <= slack
                # pairwise balance ratios survive the rebase up to one raw
                # unit of jitter on each side
                for x, y in zip(ids, ids[1:]):
                    lhs = ledger.balance_of(x).raw * balances[y].raw
                    rhs = ledger.balance_of(y).raw * balances[x].raw
                    assert abs(lhs - rhs) <= 2 * (balances[x].raw + balances[y].raw)
            else:
                account_id = rng.choice(ids)
                account = ledger.accounts[account_id]
                if account.collateral.raw == 0:
                    continue
                if ledger.current_period - account.created_period < 1:
                    continue
                out = Amount(rng.randrange(1, account.collateral.raw + 1) // 100 * 100)
                if out.raw == 0:
                    continue
                burned = Amount(out.raw * UNIT // PEG.ppb)
                if ledger.balance_of(account_id).raw < burned.raw:
                    continue
                ledger.withdraw(account_id, out)
                expected_collateral -= out.raw

        # collateral conservation is exact
        assert ledger.total_collateral.raw == expected_collateral
        assert ledger.total_collateral.raw == sum(
            a.collateral.raw for a in ledger.accounts.values()
        )
        # peg obligation: minted TRD is always exactly backed
        assert ledger.total_collateral.raw == sum(
            a.minted.raw * PEG.ppb // UNIT for a in ledger.accounts.values()
        )
        # conservation: balances match the share pool within floor dust
        implied = apply_index(
            Amount(sum(a.shares.raw for a in ledger.accounts.values())), ledger.index
        ).raw // SHARE_SCALE
        total = ledger.total_supply().raw
        assert 0 <= implied - total <= len(ledger.accounts)

    def test_sequences(self):
        rng = random.Random(20_250_101)
        for _ in range(1500):
            self._run_sequence(rng)
