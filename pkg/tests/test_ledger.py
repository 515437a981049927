"""Hash-chained credit ledger tests with independent digest oracles."""
import hashlib

import pytest
from hypothesis import given, strategies as st

from tdgsim.ledger import (GENESIS_PREV, AuditError, CreditBlock, Ledger,
                           LedgerError, block_digest, parse_ledger_lines,
                           split_credits)


def test_block_digest_matches_hand_computed_sha256():
    payload = "0|" + "0" * 64 + "|wu00001|a:500,b:500|7"
    expected = hashlib.sha256(payload.encode()).hexdigest()
    assert block_digest(0, GENESIS_PREV, "wu00001",
                        [("a", 500), ("b", 500)], 7) == expected


def test_split_even():
    assert split_credits(900, ["a", "b", "c"]) == [("a", 300), ("b", 300), ("c", 300)]


def test_split_remainder_goes_to_lowest_ids():
    assert split_credits(10, ["b", "a", "c"]) == [("a", 4), ("b", 3), ("c", 3)]
    assert split_credits(2, ["z", "y", "x"]) == [("x", 1), ("y", 1), ("z", 0)]


def test_split_rejects_bad_input():
    with pytest.raises(LedgerError):
        split_credits(100, [])
    with pytest.raises(LedgerError):
        split_credits(-1, ["a"])
    with pytest.raises(LedgerError):
        split_credits(100, ["a", "a"])


@given(st.integers(0, 10**9),
       st.sets(st.text(st.characters(min_codepoint=97, max_codepoint=122),
                       min_size=1, max_size=6), min_size=1, max_size=20))
def test_split_conserves_total_and_stays_fair(total, agents):
    allocs = split_credits(total, sorted(agents))
    amounts = [mc for _, mc in allocs]
    assert sum(amounts) == total
    assert max(amounts) - min(amounts) <= 1


def build_ledger():
    ledger = Ledger()
    ledger.append_block("wu0", [("a", 600), ("b", 400)], 3)
    ledger.append_block("wu1", [("b", 1000)], 4)
    ledger.append_block("wu2", split_credits(999, ["a", "b", "c"]), 9)
    return ledger


def test_chain_links_and_verifies():
    ledger = build_ledger()
    assert ledger.blocks[0].prev_hash == GENESIS_PREV
    assert ledger.blocks[1].prev_hash == ledger.blocks[0].hash
    assert ledger.verify_chain() is None


def test_append_checks_expected_total():
    ledger = Ledger()
    with pytest.raises(LedgerError):
        ledger.append_block("wu0", [("a", 1)], 1, expected_total=2)


def test_tampered_amount_is_detected():
    ledger = build_ledger()
    victim = ledger.blocks[1]
    ledger.blocks[1] = CreditBlock(victim.index, victim.prev_hash, victim.wu,
                                   (("b", 999),), victim.tick, victim.hash)
    assert ledger.verify_chain() == 1
    with pytest.raises(AuditError):
        ledger.balances()


def test_truncating_tail_keeps_prefix_valid():
    ledger = build_ledger()
    ledger.blocks.pop()
    assert ledger.verify_chain() is None  # append-only model: prefix stands


def test_balances_and_totals():
    ledger = build_ledger()
    balances = ledger.balances()
    assert balances == {"a": 600 + 333, "b": 400 + 1000 + 333, "c": 333}
    assert sum(balances.values()) == ledger.total_committed() == 2999
    assert ledger.balance("nobody") == 0


def test_export_parse_round_trip():
    ledger = build_ledger()
    lines = list(ledger.export_lines())
    parsed = parse_ledger_lines(lines)
    assert parsed.blocks == ledger.blocks
    assert parsed.verify_chain() is None


def test_parse_rejects_malformed_line():
    with pytest.raises(LedgerError):
        parse_ledger_lines(["not a ledger line"])


def test_parse_handles_agent_ids_with_dashes():
    ledger = Ledger()
    ledger.append_block("wu0", [("rel-003", 250), ("rel-011", 250)], 2)
    parsed = parse_ledger_lines(ledger.export_lines())
    assert parsed.verify_chain() is None
    assert parsed.balances() == {"rel-003": 250, "rel-011": 250}
