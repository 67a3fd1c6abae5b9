"""Exact one-shot deviation audit of canonical traces.

For every on-path round and each agent we try a finite set of alternative
bids, resolve that round by first-price rules (higher bid wins and pays its
own amount, equal bids flip a fair coin) and let both agents play the
canonical outcome afterwards.  Utilities are piecewise linear in the bid,
so trying every breakpoint, every midpoint between breakpoints and both
bump flags is exhaustive.

A bumped bid ``a+`` stands for ``a + eps`` with ``eps`` vanishing: whoever
wins with it is charged ``a`` in the record, and the continuation is the
limit of the subgame value as the payer's remaining budget approaches
``budget - a`` from below.  The distinction only matters when that
subgame sits exactly on a jump of the value function.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .. import piecewise as pw
from ..canonical import TraceKind, _budget, _items, _value, canonical_trace
from ..core import BidValue, LexUtility, RatLike, average, bid_compare, lex_compare

DEFAULT_MAX_ITEMS = 6


@dataclass(frozen=True)
class DeviationCheck:
    round_index: int
    agent: int
    bid: BidValue
    deviation_utility: LexUtility
    equilibrium_utility: LexUtility
    gain_sign: int


@dataclass(frozen=True)
class DeviationReport:
    instance: tuple[Fraction, Fraction, int]
    checks: tuple[DeviationCheck, ...]
    worst_gain_sign: int

    @property
    def passed(self) -> bool:
        return self.worst_gain_sign <= 0

    def to_json(self) -> dict:
        from ..core import render_rat

        b1, b2, k = self.instance
        worst = [c for c in self.checks if c.gain_sign == self.worst_gain_sign]
        return {
            "b1": render_rat(b1),
            "b2": render_rat(b2),
            "items": k,
            "checks": len(self.checks),
            "worst_gain_sign": self.worst_gain_sign,
            "passed": self.passed,
            "first_worst": (
                None
                if not worst
                else {
                    "round": worst[0].round_index,
                    "agent": worst[0].agent,
                    "bid": worst[0].bid.to_json(),
                    "deviation_utility": worst[0].deviation_utility.to_json(),
                    "equilibrium_utility": worst[0].equilibrium_utility.to_json(),
                }
            ),
        }


def price_breakpoints(sub: pw.Table, own: Fraction, opp: Fraction) -> list[Fraction]:
    """Prices in ``[0, own]`` where winning or losing utility changes formula.

    Winning at ``p`` leaves ratio ``(own - p)/opp``; losing leaves
    ``own/(opp - p)``, so each table breakpoint ``b`` maps to one price on
    each side, plus the price that exhausts the opponent.
    """
    cands = {Fraction(0), own}
    for b in sub.bps:
        p = own - b * opp
        if 0 < p < own:
            cands.add(p)
        p = opp - own / b
        if 0 < p < own:
            cands.add(p)
    if opp < own:
        cands.add(opp)
    return sorted(cands)


def candidate_bids(
    sub: pw.Table, own: Fraction, opp: Fraction, opponent_bid: BidValue
) -> list[BidValue]:
    """Deviation bids: breakpoints, midpoints, the opponent's bid, and 0.

    Each amount is tried with and without the bump, except that a bump is
    infeasible at the agent's whole budget.
    """
    base = price_breakpoints(sub, own, opp)
    amounts = set(base)
    amounts.update((a + b) / 2 for a, b in zip(base, base[1:]))
    if opponent_bid.amount <= own:
        amounts.add(opponent_bid.amount)
    amounts.add(Fraction(0))
    bids = []
    for a in sorted(amounts):
        bids.append(BidValue(a))
        if a < own:
            bids.append(BidValue(a, True))
    return bids


def deviation_utility(
    sub: pw.Table,
    own: Fraction,
    opp: Fraction,
    bid: BidValue,
    opponent_bid: BidValue,
) -> LexUtility:
    """Utility of bidding ``bid`` against ``opponent_bid`` this round only."""
    if bid.amount > own:
        raise ValueError("deviation bid exceeds own budget")

    def win() -> LexUtility:
        left = own - bid.amount
        if bid.bump:
            rest = sub.evaluate_own_below(left, opp)
        else:
            rest = sub.evaluate(left, opp)
        return LexUtility(1, 0) + LexUtility(*rest)

    def lose() -> LexUtility:
        left = opp - opponent_bid.amount
        if opponent_bid.bump:
            return LexUtility(*sub.evaluate_other_below(own, left))
        return LexUtility(*sub.evaluate(own, left))

    order = bid_compare(bid, opponent_bid)
    if order > 0:
        return win()
    if order < 0:
        return lose()
    return average(win(), lose())


def one_shot_deviation_check(
    b1: RatLike, b2: RatLike, k: int, max_items: int = DEFAULT_MAX_ITEMS
) -> DeviationReport:
    """Audit every on-path round of a deterministic canonical trace."""
    b1, b2, k = _budget(b1, "B1"), _budget(b2, "B2"), _items(k)
    if k > max_items:
        raise ValueError(f"deviation audit is bounded to k <= {max_items}, got {k}")
    trace = canonical_trace(b1, b2, k)
    if trace.kind != TraceKind.DETERMINISTIC:
        raise ValueError("deviation audit needs a deterministic trace")
    checks: list[DeviationCheck] = []
    budgets = [b1, b2]
    for rnd in trace.rounds:
        left = k - rnd.round_index + 1
        sub = pw.table(left - 1)
        for agent in (1, 2):
            own, opp = budgets[agent - 1], budgets[2 - agent]
            opponent_bid = rnd.bids[2 - agent]
            eq = _value(own, opp, left)
            for bid in candidate_bids(sub, own, opp, opponent_bid):
                dev = deviation_utility(sub, own, opp, bid, opponent_bid)
                checks.append(
                    DeviationCheck(
                        rnd.round_index, agent, bid, dev, eq, lex_compare(dev, eq)
                    )
                )
        budgets[rnd.winner - 1] -= rnd.price
    worst = max((c.gain_sign for c in checks), default=-1)
    return DeviationReport((b1, b2, k), tuple(checks), worst)


def audit_many(instances: Iterable[tuple[Fraction, Fraction, int]]) -> list[DeviationReport]:
    return [one_shot_deviation_check(b1, b2, k) for b1, b2, k in instances]
