"""Structural properties of canonical outcomes, as reusable checkers.

Each checker raises ``AssertionError`` with a readable message.  They are
shared by the property tests and the acceptance battery so both exercise
exactly the same statements.
"""

from __future__ import annotations

import random
from fractions import Fraction

from seqauction import (
    TraceKind,
    TwoPhase,
    canonical_trace,
    critical_price,
    item_split,
    losing_utility,
    utility,
    winning_utility,
)
from seqauction import piecewise as pw
from seqauction.core import lex_compare

PRICE_SAMPLES = 9


def _label(b1, b2, k) -> str:
    return f"(B1={b1}, B2={b2}, k={k})"


def check_price_monotone(b1, b2, k) -> None:
    tr = canonical_trace(b1, b2, k)
    prices = tr.prices
    for a, b in zip(prices, prices[1:]):
        assert b <= a, f"prices increase {prices} at {_label(b1, b2, k)}"


def check_two_phase(b1, b2, k) -> None:
    tr = canonical_trace(b1, b2, k)
    if tr.kind != TraceKind.DETERMINISTIC:
        return
    case = tr.case
    assert isinstance(case, TwoPhase), f"deterministic trace with case {case}"
    want = [case.first_winner] * case.k_first + [3 - case.first_winner] * case.k_second
    assert tr.winners == want, f"winners {tr.winners} != {want} at {_label(b1, b2, k)}"


def check_item_counts(b1, b2, k) -> None:
    tr = canonical_trace(b1, b2, k)
    split = item_split(b1, b2, k)
    items1 = tr.expected_utility_1.items
    assert items1 + tr.expected_utility_2.items == k
    if split.boundary:
        assert split.k1 - 1 < items1 < split.k1, (
            f"boundary expected items {items1} outside ({split.k1 - 1}, {split.k1})"
        )
    else:
        assert items1 == split.k1, f"agent 1 gets {items1}, split says {split.k1}"
    if tr.kind == TraceKind.DETERMINISTIC:
        assert tr.winners.count(1) == split.k1


def check_second_phase_prices(b1, b2, k) -> None:
    tr = canonical_trace(b1, b2, k)
    if tr.kind != TraceKind.DETERMINISTIC:
        return
    case = tr.case
    if case.k_first == 0 or case.k_second == 0:
        return
    first = case.first_winner
    start = b1 if first == 1 else b2
    residual = start - sum(tr.prices[: case.k_first])
    for p in tr.prices[case.k_first :]:
        assert p == residual, f"second-phase price {p} != residual {residual}"


def check_default_price_bound(b1, b2, k) -> None:
    tr = canonical_trace(b1, b2, k)
    if tr.kind != TraceKind.DETERMINISTIC:
        return
    budgets = {1: b1, 2: b2}
    for agent in (1, 2):
        paid = [r.price for r in tr.rounds if r.winner == agent]
        if not paid:
            continue
        other_items = k - len(paid)
        bound = budgets[3 - agent] / (other_items + 1)
        avg = sum(paid) / len(paid)
        assert avg <= bound, f"agent {agent} average {avg} > {bound} at {_label(b1, b2, k)}"


def check_budgets_respected(b1, b2, k) -> None:
    tr = canonical_trace(b1, b2, k)
    left = [b1, b2]
    for r in tr.rounds:
        assert r.price <= left[r.winner - 1], "price above winner's remaining budget"
        loser_bid = r.bids[2 - r.winner]
        assert not loser_bid.bump and loser_bid.amount == r.price
        assert r.bids[r.winner - 1].bump and r.bids[r.winner - 1].amount == r.price
        left[r.winner - 1] -= r.price
    if tr.kind == TraceKind.DETERMINISTIC:
        assert tr.final_budgets == (left[0], left[1])
        assert tr.expected_utility_1.money == left[0]
        assert tr.expected_utility_2.money == left[1]


def check_scaling(b1, b2, k, lam: Fraction) -> None:
    base = canonical_trace(b1, b2, k)
    scaled = canonical_trace(lam * b1, lam * b2, k)
    assert scaled.winners == base.winners
    assert scaled.case.tag == base.case.tag
    assert scaled.prices == [lam * p for p in base.prices]
    assert scaled.expected_utility_1.money == lam * base.expected_utility_1.money
    assert scaled.expected_utility_1.items == base.expected_utility_1.items


def _price_grid(top: Fraction) -> list[Fraction]:
    return [top * Fraction(j, PRICE_SAMPLES - 1) for j in range(PRICE_SAMPLES)]


def check_win_lose_monotone(b_self, b_other, k) -> None:
    """Winning utility strictly decreases and losing utility never decreases in ``p``."""
    wins = [winning_utility(1, b_self, b_other, k, p) for p in _price_grid(b_self)]
    for a, b in zip(wins, wins[1:]):
        assert lex_compare(b, a) < 0, f"W not decreasing: {a} then {b}"
    loses = [losing_utility(1, b_self, b_other, k, p) for p in _price_grid(b_other)]
    for a, b in zip(loses, loses[1:]):
        assert lex_compare(b, a) >= 0, f"L decreasing: {a} then {b}"


def check_utility_monotone(b_self, b_other, k, bump: Fraction) -> None:
    """More own money is strictly better; more opponent money never helps."""
    base = utility(1, b_self, b_other, k)
    richer = utility(1, b_self + bump, b_other, k)
    assert lex_compare(richer, base) > 0, f"U not increasing in own budget at {base}"
    rival = utility(1, b_self, b_other + bump, k)
    assert lex_compare(rival, base) <= 0, f"U increasing in other's budget at {base}"


def check_weak_preference_at_price(b1, b2, k) -> None:
    """Each round's loser weakly prefers winning at the price it let go."""
    tr = canonical_trace(b1, b2, k)
    left = [b1, b2]
    for r in tr.rounds:
        m = k - r.round_index + 1
        loser = 3 - r.winner
        own, opp = left[loser - 1], left[r.winner - 1]
        w = winning_utility(loser, own, opp, m, r.price)
        l = losing_utility(loser, own, opp, m, r.price)
        assert lex_compare(w, l) >= 0, f"loser strictly prefers losing at {r.price}"
        left[r.winner - 1] -= r.price


def check_critical_price_sides(b_self, b_other, k) -> None:
    """Winning beats losing below the critical price and loses above it."""
    c = critical_price(1, b_self, b_other, k)
    for p in _price_grid(b_self):
        if p in (c.price,) or p > b_other:
            continue
        w = winning_utility(1, b_self, b_other, k, p)
        l = losing_utility(1, b_self, b_other, k, p)
        if p < c.price:
            assert lex_compare(w, l) > 0, f"below critical {c.price}: W <= L at {p}"
        else:
            assert lex_compare(w, l) < 0, f"above critical {c.price}: W >= L at {p}"


def check_all(b1, b2, k, rng: random.Random) -> None:
    """Run every per-instance property on one profile."""
    check_price_monotone(b1, b2, k)
    check_two_phase(b1, b2, k)
    check_item_counts(b1, b2, k)
    check_second_phase_prices(b1, b2, k)
    check_default_price_bound(b1, b2, k)
    check_budgets_respected(b1, b2, k)
    check_scaling(b1, b2, k, Fraction(rng.randint(1, 50), rng.randint(1, 50)))
    check_win_lose_monotone(b1, b2, k)
    check_utility_monotone(b1, b2, k, Fraction(1, rng.randint(2, 1000)))
    check_weak_preference_at_price(b1, b2, k)
    check_critical_price_sides(b1, b2, k)


def continuity_limits(k: int) -> list[tuple[str, object, object]]:
    """Extrapolated one-sided limits at every ``k_i/(k_-i + 1)`` boundary.

    Returns ``(label, got, want)`` triples.  Near a boundary ``r*`` the
    value is linear on the last piece before (and the first piece after)
    ``r*``; two points inside that piece determine the limit exactly.
    """
    bps = pw.table(k).bps
    out = []
    for k_i in range(1, k + 1):
        k_o = k - k_i
        star = Fraction(k_i, k_o + 1)
        below = max([b for b in bps if b < star], default=star / 2)
        above = min([b for b in bps if b > star], default=star * 2)
        for side, lo, hi, want_items, own_money, other_money in (
            ("below", below, star, k_i - 1, star, Fraction(1)),
            ("above", star, above, k_i, Fraction(0), Fraction(0)),
        ):
            r1, r2 = lo + (hi - lo) / 3, lo + 2 * (hi - lo) / 3
            # vary own budget with B_-i = 1; the limit keeps B_i = r*
            got = _extrapolate(k, [(r, Fraction(1)) for r in (r1, r2)], star, own_axis=True)
            out.append((f"k={k} k_i={k_i} own {side}", got, (want_items, own_money)))
            # vary the opponent's budget with B_i = 1: ratio r means B_-i = 1/r
            got = _extrapolate(
                k, [(Fraction(1), 1 / r) for r in (r1, r2)], 1 / star, own_axis=False
            )
            out.append((f"k={k} k_i={k_i} other {side}", got, (want_items, other_money)))
    return out


def _extrapolate(k, pts, target, own_axis: bool):
    (x1, y1), (x2, y2) = pts
    u1, u2 = utility(1, x1, y1, k), utility(1, x2, y2, k)
    if u1.items != u2.items:
        return ("items vary", u1.items, u2.items)
    t1, t2 = (x1, x2) if own_axis else (y1, y2)
    slope = (u2.money - u1.money) / (t2 - t1)
    return (u1.items, u1.money + slope * (target - t1))

