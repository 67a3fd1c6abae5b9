"""Backward induction on a discretized version of the auction.

Bids are restricted to multiples of ``delta`` (optionally bumped).  For
each subgame the solver computes both agents' *discrete critical bids*,
the largest grid amount at which the agent still weakly prefers winning
the current item to letting the opponent have it at that amount.  The
agent with the higher critical bid wins, bidding the other's critical bid
with a bump; equal critical bids go to a fair coin.  This mirrors the
continuous construction, so agreement with it is evidence that the
continuous engine resolves the same comparisons.

Money is held in integer units of ``delta`` and utilities are scaled by
``2**k`` so that coin-flip averages stay integral; everything is converted
back to exact rationals on the way out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..canonical import TraceKind, _budget, _items, canonical_trace
from ..core import BidValue, LexUtility, RatLike, parse_rat

DEFAULT_MAX_ITEMS = 3
PRICE_GAP_FACTOR = 2


@dataclass(frozen=True)
class GridState:
    bids: tuple[BidValue, BidValue]
    values: tuple[LexUtility, LexUtility]


@dataclass(frozen=True)
class GridRound:
    winner: int  # 0 when a coin decides; the trace then follows agent 1
    price: Fraction
    bids: tuple[BidValue, BidValue]


@dataclass
class GridGameSolution:
    delta: Fraction
    items: int
    budgets: tuple[Fraction, Fraction]
    states: dict[tuple[int, Fraction, Fraction], GridState]
    root_trace: list[GridRound]

    @property
    def root_values(self) -> tuple[LexUtility, LexUtility]:
        b1, b2 = self.budgets
        return self.states[(self.items, b1, b2)].values


class _Solver:
    """Memoized discrete subgame values in integer units."""

    def __init__(self, k: int):
        self.scale = 1 << k
        self.memo: dict[tuple[int, int, int], tuple] = {}

    def value(self, m: int, a: int, b: int) -> tuple[int, int]:
        """Scaled ``(items, money)`` of the agent holding ``a`` units against ``b``."""
        if m == 0:
            return (0, a * self.scale)
        return self.state(m, a, b)[2]

    def critical(self, m: int, a: int, b: int) -> int:
        """Largest grid amount at which winning is weakly preferred."""
        one = self.scale
        for q in range(a, -1, -1):
            w_items, w_money = self.value(m - 1, a - q, b)
            win = (w_items + one, w_money)
            lose = self.value(m - 1, a, b - min(q, b))
            if win >= lose:
                return q
        raise AssertionError("winning at price 0 is always preferred")

    def state(self, m: int, a: int, b: int):
        key = (m, a, b)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        c_a = self.critical(m, a, b)
        c_b = self.critical(m, b, a)
        one = self.scale

        def won(own, opp, price):
            items, money = self.value(m - 1, own - price, opp)
            return (items + one, money)

        if c_a > c_b:
            price = c_b
            mine = won(a, b, price)
            bids = ((price, True), (price, False))
            winner = 1
        elif c_b > c_a:
            price = c_a
            mine = self.value(m - 1, a, b - price)
            bids = ((price, False), (price, True))
            winner = 2
        else:
            price = c_a
            w = won(a, b, price)
            l = self.value(m - 1, a, b - price)
            mine = ((w[0] + l[0]) // 2, (w[1] + l[1]) // 2)
            assert (w[0] + l[0]) % 2 == 0 and (w[1] + l[1]) % 2 == 0
            bids = ((price, False), (price, False))
            winner = 0
        out = (winner, bids, mine, price)
        self.memo[key] = out
        return out


def _to_lex(v: tuple[int, int], scale: int, delta: Fraction) -> LexUtility:
    return LexUtility(Fraction(v[0], scale), Fraction(v[1], scale) * delta)


def _units(x: Fraction, delta: Fraction, name: str) -> int:
    q = x / delta
    if q.denominator != 1:
        raise ValueError(f"{name} is not a multiple of delta")
    return q.numerator


def grid_backward_induction(
    b1: RatLike,
    b2: RatLike,
    k: int,
    delta: RatLike,
    max_items: int = DEFAULT_MAX_ITEMS,
) -> GridGameSolution:
    """Solve the discretized game from the root.

    Only the subgames reachable from the root's critical-bid searches are
    solved, which are exactly the ones the root value depends on.
    """
    b1, b2, k = _budget(b1, "B1"), _budget(b2, "B2"), _items(k)
    delta = parse_rat(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if k > max_items:
        raise ValueError(f"grid solver is bounded to k <= {max_items}, got {k}")
    n1, n2 = _units(b1, delta, "B1"), _units(b2, delta, "B2")
    solver = _Solver(k)
    solver.state(k, n1, n2)
    solver.state(k, n2, n1)
    root = _root_trace(solver, k, n1, n2, delta)
    states = {}
    for (m, a, b), (_, bids, mine, _) in solver.memo.items():
        other = solver.memo.get((m, b, a))
        if other is None:
            continue
        states[(m, a * delta, b * delta)] = GridState(
            tuple(BidValue(q * delta, bump) for q, bump in bids),
            (_to_lex(mine, solver.scale, delta), _to_lex(other[2], solver.scale, delta)),
        )
    return GridGameSolution(delta, k, (b1, b2), states, root)


def _root_trace(solver: _Solver, k: int, a: int, b: int, delta: Fraction):
    rounds = []
    for m in range(k, 0, -1):
        solver.state(m, b, a)
        winner, bids, _, price = solver.state(m, a, b)
        rounds.append(
            GridRound(winner, price * delta, tuple(BidValue(q * delta, f) for q, f in bids))
        )
        if winner == 2:
            b -= price
        else:
            a -= price
    return rounds


def check_consistency(sol: GridGameSolution) -> list[str]:
    """States whose stored value disagrees with its bids and successors."""
    problems = []
    for (m, a, b), st in sol.states.items():
        if m == 0:
            continue
        bid_a, bid_b = st.bids
        for q in (bid_a.amount, bid_b.amount):
            if (q / sol.delta).denominator != 1:
                problems.append(f"{(m, a, b)}: bid {q} off grid")
        if bid_a.amount > a or bid_b.amount > b:
            problems.append(f"{(m, a, b)}: bid above budget")

        def succ(key, agent):
            if key[0] == 0:
                return LexUtility(0, key[1])
            st2 = sol.states.get(key)
            return None if st2 is None else st2.values[agent]

        price = min(bid_a.amount, bid_b.amount)
        order = (bid_a.amount, bid_a.bump) > (bid_b.amount, bid_b.bump)
        tie = (bid_a.amount, bid_a.bump) == (bid_b.amount, bid_b.bump)
        win_a = succ((m - 1, a - price, b), 0)
        lose_a = succ((m - 1, a, b - price), 0)
        if win_a is None or lose_a is None:
            continue
        win_a = LexUtility(1, 0) + win_a
        if tie:
            expect = (win_a + lose_a).scale(Fraction(1, 2))
        elif order:
            expect = win_a
        else:
            expect = lose_a
        if expect != st.values[0]:
            problems.append(f"{(m, a, b)}: value {st.values[0]} != {expect}")
    return problems


@dataclass(frozen=True)
class GridComparison:
    winner_match: bool
    max_price_gap: Optional[Fraction]
    utility_gap: tuple[Fraction, Fraction]
    tolerance: Fraction
    canonical_winners: list[int]
    grid_winners: list[int]

    @property
    def passed(self) -> bool:
        return (
            self.winner_match
            and self.max_price_gap is not None
            and self.max_price_gap <= self.tolerance
        )


def compare_canonical_vs_grid(
    b1: RatLike, b2: RatLike, k: int, delta: RatLike
) -> GridComparison:
    """Compare the canonical trace with the grid solution's root path.

    ``utility_gap`` holds each agent's absolute money difference; it is
    only meaningful when the item counts agree, which a winner match
    implies for deterministic traces.
    """
    b1, b2, k = _budget(b1, "B1"), _budget(b2, "B2"), _items(k)
    delta = parse_rat(delta)
    sol = grid_backward_induction(b1, b2, k, delta)
    trace = canonical_trace(b1, b2, k)
    grid_winners = [r.winner for r in sol.root_trace]
    canon_winners = trace.winners
    deterministic = trace.kind == TraceKind.DETERMINISTIC
    match = deterministic and grid_winners == canon_winners
    gap = None
    if match:
        gap = max(abs(g.price - c) for g, c in zip(sol.root_trace, trace.prices))
    v1, v2 = sol.root_values
    ugap = (
        abs(v1.money - trace.expected_utility_1.money),
        abs(v2.money - trace.expected_utility_2.money),
    )
    return GridComparison(
        match, gap, ugap, PRICE_GAP_FACTOR * delta, canon_winners, grid_winners
    )
