from __future__ import annotations

import threading
from fractions import Fraction as F

import pytest

from seqauction import (
    CriticalKind,
    LexUtility,
    OutcomeTrace,
    Preference,
    TieTypeI,
    TieTypeIIA,
    TieTypeIIB,
    TraceKind,
    TwoPhase,
    canonical_trace,
    classify,
    critical_price,
    item_split,
    losing_utility,
    tie_expected_utility,
    utility,
    winning_utility,
)
from seqauction import canonical
from seqauction import piecewise as pw
from seqauction.canonical import tie_process_utilities, type_two_a_orderings

# one interior ratio per phase, B2 = 1: (B1, [(winner, price), ...])
TWO_ITEM_PHASES = [
    (F(2, 5), [(2, F(2, 5)), (2, F(2, 5))]),
    (F(11, 20), [(1, F(9, 20)), (2, F(1, 10))]),
    (F(3, 4), [(1, F(3, 8)), (2, F(3, 8))]),
]
THREE_ITEM_PHASES = [
    (F(1, 5), [(2, F(1, 5))] * 3),
    (F(7, 20), [(1, F(3, 10)), (2, F(1, 20)), (2, F(1, 20))]),
    (F(7, 16), [(1, F(1, 4)), (2, F(3, 16)), (2, F(3, 16))]),
    (F(3, 4), [(2, F(1, 3)), (2, F(1, 3)), (1, F(1, 3))]),
    (F(7, 8), [(2, F(3, 8)), (2, F(5, 16)), (1, F(5, 16))]),
    (F(19, 20), [(2, F(9, 20)), (2, F(2, 5)), (1, F(3, 20))]),
]


def rounds_of(tr):
    return [(r.winner, r.price) for r in tr.rounds]


@pytest.mark.parametrize("b1, want", TWO_ITEM_PHASES)
def test_two_item_phases(b1, want):
    tr = canonical_trace(b1, 1, 2)
    assert tr.kind == TraceKind.DETERMINISTIC
    assert rounds_of(tr) == want


@pytest.mark.parametrize("b1, want", THREE_ITEM_PHASES)
def test_three_item_phases(b1, want):
    tr = canonical_trace(b1, 1, 3)
    assert tr.kind == TraceKind.DETERMINISTIC
    assert rounds_of(tr) == want


def test_three_item_tie_phase():
    # every ratio strictly between 1/2 and 2/3 is a near-ratio coin tie in which
    # agent 1 ends with one item and agent 2 with two, all at B1/2
    for b1 in (F(11, 20), F(3, 5), F(13, 20)):
        tr = canonical_trace(b1, 1, 3)
        assert tr.kind == TraceKind.TIE_IIB and tr.rounds == ()
        assert tr.case == TieTypeIIB(1, 1, b1 / 2)
        assert tr.expected_utility_1 == LexUtility(1, b1 / 2)
        assert tr.expected_utility_2 == LexUtility(2, 1 - b1)


class TestItemSplit:
    @pytest.mark.parametrize(
        "b1, b2, k, k1, k2, boundary",
        [
            (F(3, 4), 1, 2, 1, 1, False),
            (F(1, 5), 1, 3, 0, 3, False),
            (2, 3, 5, 2, 3, False),
            (1, 1, 1, 1, 0, True),
        ],
    )
    def test_examples(self, b1, b2, k, k1, k2, boundary):
        s = item_split(b1, b2, k)
        assert (s.k1, s.k2, s.boundary) == (k1, k2, boundary)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            item_split(0, 1, 2)
        with pytest.raises(ValueError):
            item_split(1, 1, 0)


class TestClassify:
    def test_examples(self):
        assert classify(F(11, 20), 1, 2) == TwoPhase(1, 1, 1)
        assert classify(1, 1, 2) == TieTypeIIA(1, 1, F(1, 2))
        assert classify(1, F(4, 5), 2) == TwoPhase(2, 1, 1)
        assert classify(F(1, 2), 1, 2) == TieTypeI(1, 1, F(1, 2))

    def test_one_sided_profiles_normalize_to_single_phase(self):
        assert classify(F(1, 5), 1, 3) == TwoPhase(2, 3, 0)
        assert classify(5, 1, 3) == TwoPhase(1, 3, 0)

    def test_tie_prices_match_budgets(self):
        c = classify(F(2, 3), 1, 3)  # (k1+1)/(k2+1) with k1 = 1, k2 = 2
        assert isinstance(c, TieTypeIIA)
        assert c.p_star == F(2, 3) / (c.k1 + 1) == F(1) / (c.k2 + 1)
        c = classify(F(1, 3), 1, 2)  # k1/(k2+1) with k1 = 1, k2 = 2? no: k = 2 gives 1/2
        assert not isinstance(c, TieTypeI)
        c = classify(F(1, 3), 1, 3)
        assert isinstance(c, TieTypeI) and c.p_star == F(1, 3) / c.k1 == F(1) / (c.k2 + 1)


class TestUtilities:
    def test_examples(self):
        assert utility(1, F(3, 4), 1, 2) == LexUtility(1, F(3, 8))
        assert utility(2, 1, F(7, 20), 3) == LexUtility(2, F(9, 10))
        assert utility(1, 1, 1, 1) == LexUtility(F(1, 2), F(1, 2))
        assert utility(1, F(5, 7), 3, 0) == LexUtility(0, F(5, 7))

    def test_winning_and_losing_examples(self):
        assert winning_utility(1, F(3, 4), 1, 2, F(3, 8)) == LexUtility(1, F(3, 8))
        assert winning_utility(2, 1, F(3, 4), 2, F(3, 8)) == LexUtility(1, F(5, 8))
        assert winning_utility(1, F(2, 3), F(9, 7), 1, F(1, 5)) == LexUtility(1, F(2, 3) - F(1, 5))
        assert losing_utility(1, F(3, 4), 1, 2, F(3, 8)) == LexUtility(1, F(1, 8))
        assert losing_utility(2, 1, F(3, 4), 2, F(3, 8)) == LexUtility(1, F(5, 8))
        # losing the last item leaves no items whatever the opponent paid
        assert losing_utility(1, F(2, 3), F(9, 7), 1, F(9, 7)) == LexUtility(0, F(2, 3))
        # an exhausted opponent concedes every remaining item for free
        assert losing_utility(1, F(2, 3), F(9, 7), 2, F(9, 7)) == LexUtility(1, F(2, 3))

    def test_price_limits(self):
        with pytest.raises(ValueError):
            winning_utility(1, F(1, 2), 1, 2, F(3, 4))
        with pytest.raises(ValueError):
            losing_utility(1, 1, F(1, 2), 2, F(3, 4))
        with pytest.raises(ValueError):
            utility(3, 1, 1, 1)

    @pytest.mark.parametrize("b1, b2", [(F(3, 2), 1), (F(1, 3), F(2, 5)), (1, 1), (F(7, 9), F(7, 9))])
    def test_single_item_base_case(self, b1, b2):
        # last item: the richer agent pays the poorer agent's budget
        u = utility(1, b1, b2, 1)
        if b1 > b2:
            assert u == LexUtility(1, b1 - b2)
        elif b1 < b2:
            assert u == LexUtility(0, b1)
        else:
            assert u == LexUtility(F(1, 2), b1 / 2)


class TestCriticalPrice:
    def test_examples(self):
        c = critical_price(2, 1, F(3, 4), 2)
        assert (c.price, c.kind) == (F(3, 8), CriticalKind.INDIFFERENCE)
        assert c.preference_at_price == Preference.INDIFFERENT
        assert critical_price(2, 1, F(11, 20), 2).price == F(9, 20)
        assert critical_price(1, F(7, 8), 1, 3).price == F(3, 8)
        assert critical_price(1, F(1, 5), 1, 3).kind == CriticalKind.NONEXISTENT

    def test_win_discontinuity_price_formula(self):
        # at a jump of W the price is B_self - (k_i/k_-i) * B_other
        seen = 0
        for j in range(1, 60):
            b = F(j, 20)
            for k in (2, 3, 4):
                c = critical_price(1, b, 1, k)
                if c.kind != CriticalKind.WIN_DISCONTINUITY:
                    continue
                seen += 1
                sub = item_split(b - c.price, 1, k - 1)
                assert b - c.price == F(sub.k1, sub.k2 + 1)
        assert seen > 0

    def test_nonexistent_needs_a_poor_agent(self):
        for j in range(1, 80):
            b = F(j, 40)
            for k in (2, 3, 4):
                c = critical_price(1, b, 1, k)
                if c.kind == CriticalKind.NONEXISTENT:
                    assert b <= F(1, k)
                    assert c.price == b


class TestTraces:
    def test_examples(self):
        assert rounds_of(canonical_trace(F(7, 20), 1, 3)) == [(1, F(3, 10)), (2, F(1, 20)), (2, F(1, 20))]
        assert rounds_of(canonical_trace(F(1, 5), 1, 3)) == [(2, F(1, 5))] * 3
        tr = canonical_trace(F(1, 2), 1, 2)
        assert tr.kind == TraceKind.TIE_I and tr.tie.p_star == F(1, 2)
        assert tr.final_budgets is None

    def test_bids_encode_bump_semantics(self):
        tr = canonical_trace(F(3, 4), 1, 2)
        r = tr.rounds[0]
        assert str(r.bids[0]) == "3/8+" and str(r.bids[1]) == "3/8"

    def test_tie_utilities(self):
        tr = canonical_trace(F(1, 2), 1, 2)
        assert tr.expected_utility_1 == LexUtility(F(3, 4), F(1, 8))
        assert tr.expected_utility_2 == LexUtility(F(5, 4), F(5, 8))
        tr = canonical_trace(1, 1, 2)
        assert tr.kind == TraceKind.TIE_IIA
        assert tr.expected_utility_1 == tr.expected_utility_2 == LexUtility(1, F(1, 2))

    def test_tie_can_open_after_a_deterministic_prefix(self):
        tr = canonical_trace(F(3, 2), 1, 6)
        assert tr.kind == TraceKind.TIE_IIB
        assert tr.tie.start_round > 1 and len(tr.rounds) == tr.tie.start_round - 1
        x, y = F(3, 2), F(1)
        for r in tr.rounds:
            x, y = (x - r.price, y) if r.winner == 1 else (x, y - r.price)
        left = 6 - len(tr.rounds)
        sub = tie_process_utilities(x, y, left, tr.tie.case)
        assert tr.expected_utility_1.items == tr.winners.count(1) + sub[0].items
        assert tr.expected_utility_1.money == sub[0].money

    @pytest.mark.parametrize(
        "b1, b2, k",
        [(F(3, 4), 1, 2), (F(19, 20), 1, 3), (F(1, 2), 1, 2), (F(3, 5), 1, 3), (1, 1, 2), (F(3, 2), 1, 6)],
    )
    def test_json_round_trip(self, b1, b2, k):
        tr = canonical_trace(b1, b2, k)
        obj = tr.to_json()
        assert set(obj) >= {"items", "b1", "b2", "case", "rounds", "utilities", "final_budgets"}
        assert OutcomeTrace.from_json(obj) == tr

    def test_json_rejects_mismatched_case(self):
        obj = canonical_trace(F(3, 4), 1, 2).to_json()
        obj["case"] = "TieTypeI"
        with pytest.raises(ValueError):
            OutcomeTrace.from_json(obj)


class TestTieOracles:
    def test_type_one_closed_form_single_item(self):
        case = classify(1, 1, 1)
        assert tie_expected_utility(1, 1, 1, 1, case) == LexUtility(F(1, 2), F(1, 2))

    def test_type_two_a_orderings(self):
        first, second = type_two_a_orderings(1, 1, 2)
        assert first == second == (LexUtility(1, F(1, 2)), LexUtility(1, F(1, 2)))

    def test_rejects_mismatched_case(self):
        with pytest.raises(ValueError):
            tie_expected_utility(1, F(3, 4), 1, 2, TieTypeI(1, 1, F(1, 2)))
        with pytest.raises(ValueError):
            tie_process_utilities(F(3, 4), 1, 2, TwoPhase(1, 1, 1))


def test_table_matches_round_utilities():
    for k in (1, 2, 3, 4):
        t = pw.table(k)
        for j in range(1, 50):
            x = F(j, 13)
            items, money = t.evaluate(x, F(1))
            assert LexUtility(items, money) == utility(1, x, 1, k)


def test_table_breakpoint_counts():
    assert [len(pw.table(k).bps) for k in range(2, 6)] == [5, 13, 29, 61]
    assert [b for b in pw.table(2).bps if b < 1] == [F(1, 2), F(2, 3)]
    assert [b for b in pw.table(3).bps if b < 1] == [
        F(1, 3), F(3, 8), F(1, 2), F(2, 3), F(5, 6), F(9, 10)
    ]
    # the value's kinks mirror under swapping the agents
    bps = pw.table(4).bps
    assert sorted(1 / b for b in bps) == bps


def test_cache_does_not_change_results():
    samples = [(F(j, 17), F(1), k) for j in range(1, 30) for k in (2, 3, 4)]
    before = [canonical_trace(*s) for s in samples]
    canonical._first_round.cache_clear()
    after = [canonical_trace(*s) for s in samples]
    assert before == after


def test_concurrent_traces_agree():
    samples = [(F(j, 11), F(1), 4) for j in range(1, 40)]
    expected = [canonical_trace(*s) for s in samples]
    canonical._first_round.cache_clear()
    results: dict[int, list] = {}

    def work(idx):
        results[idx] = [canonical_trace(*s) for s in samples]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(results[i] == expected for i in range(4))
