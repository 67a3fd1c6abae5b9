"""Two-bidder adaptive clinching auction with budget-dominated values.

When item values dwarf the budgets the clinching auction reduces to a
simple rule: with ``m`` items left, the agent holding more money takes
one item at ``min(B1, B2) / m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .canonical import _budget, _items, item_split
from .core import RatLike

TIE_WINNER = 2  # exact budget ties go to agent 2


@dataclass(frozen=True)
class ClinchingTrace:
    rounds: tuple[tuple[int, Fraction], ...]
    final_budgets: tuple[Fraction, Fraction]
    items_won: tuple[int, int]

    @property
    def winners(self) -> list[int]:
        return [w for w, _ in self.rounds]

    @property
    def prices(self) -> list[Fraction]:
        return [p for _, p in self.rounds]


def clinching_trace(b1: RatLike, b2: RatLike, k: int) -> ClinchingTrace:
    """Run the ``k`` clinching rounds for budgets ``(b1, b2)``."""
    budgets = [_budget(b1, "B1"), _budget(b2, "B2")]
    k = _items(k)
    rounds = []
    won = [0, 0]
    for done in range(k):
        price = min(budgets) / (k - done)
        if budgets[0] > budgets[1]:
            winner = 1
        elif budgets[1] > budgets[0]:
            winner = 2
        else:
            winner = TIE_WINNER
        budgets[winner - 1] -= price
        won[winner - 1] += 1
        rounds.append((winner, price))
    return ClinchingTrace(tuple(rounds), (budgets[0], budgets[1]), (won[0], won[1]))


def clinching_items(b1: RatLike, b2: RatLike, k: int) -> tuple[int, int]:
    return clinching_trace(b1, b2, k).items_won


def clinch_threshold(k: int) -> Fraction:
    """Harmonic number ``H_k``: agent 1 clinches everything iff ``B1 > H_k * B2``."""
    k = _items(k)
    return sum((Fraction(1, j) for j in range(1, k + 1)), Fraction(0))


def raw_approx_item_fraction(p: float) -> float:
    """``1 - exp((2p-1)/(p-1))/2``, the richer agent's large-k clinching share.

    Only meaningful for ``p >= 1/2``; below that it drops under zero.
    """
    return 1 - math.exp((2 * p - 1) / (p - 1)) / 2


def approx_item_fraction(p: float) -> float:
    """Smooth large-k approximation of agent 1's clinching share, ``p`` in (0, 1).

    The richer-agent formula is used for ``p >= 1/2`` and mirrored as
    ``1 - f(1 - p)`` below, so the two agents' shares sum to one.
    Informational only: it is a float and is never used in an exact check.
    """
    if not 0 < p < 1:
        raise ValueError(f"wealth fraction must lie in (0, 1), got {p}")
    if p >= 0.5:
        return raw_approx_item_fraction(p)
    return 1 - raw_approx_item_fraction(1 - p)


@dataclass(frozen=True)
class CurvePoint:
    p: Fraction
    item_fraction: Fraction
    approx: float
    sequential_fraction: Fraction


def curve_points(k: int, samples: int) -> list[Fraction]:
    """``samples`` equally spaced wealth fractions strictly inside (0, 1)."""
    k = _items(k)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 2:
        raise ValueError(f"samples must be an integer >= 2, got {samples!r}")
    return [Fraction(j, samples + 1) for j in range(1, samples + 1)]


def fraction_curve(k: int, samples: int) -> list[CurvePoint]:
    """Agent 1's item share when it holds fraction ``p`` of total wealth.

    Budgets are ``B1 = p`` and ``B2 = 1 - p``.  Each point carries the
    exact clinching share, the float approximation, and the sequential
    auction's share from the item split.
    """
    points = []
    for p in curve_points(k, samples):
        won = clinching_items(p, 1 - p, k)[0]
        seq = item_split(p, 1 - p, k).k1
        points.append(
            CurvePoint(p, Fraction(won, k), approx_item_fraction(float(p)), Fraction(seq, k))
        )
    return points
