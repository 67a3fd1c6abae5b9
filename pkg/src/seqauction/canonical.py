"""Canonical outcome of the two-bidder sequential first-price auction.

Every round both agents compute a *critical price*: the highest price at
which winning the current item still beats letting the opponent win it at
that price.  The agent with the strictly higher critical price wins,
paying the other's critical price (the loser bids ``p``, the winner
``p+``).  Equal critical prices start a coin-flip tie.

All values are exact.  The heavy lifting happens in
:mod:`seqauction.piecewise`, which tabulates the utility function level by
level; this module turns those tables into traces, classifications and
utilities, and carries the independent coin-process oracles used to check
the tie regimes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from . import piecewise as pw
from .coinflip import phi
from .core import AGENTS, BidValue, LexUtility, RatLike, parse_rat, render_rat

__all__ = [
    "AllocationCase",
    "CriticalKind",
    "CriticalPriceResult",
    "ItemSplit",
    "OutcomeTrace",
    "Preference",
    "RoundRecord",
    "TieDescriptor",
    "TieTypeI",
    "TieTypeIIA",
    "TieTypeIIB",
    "TraceKind",
    "TwoPhase",
    "canonical_trace",
    "classify",
    "critical_price",
    "item_split",
    "losing_utility",
    "tie_expected_utility",
    "tie_process_utilities",
    "type_one_process_utility",
    "type_two_a_orderings",
    "utility",
    "winning_utility",
]


# ---------------------------------------------------------------------------
# validation helpers


def _budget(value: RatLike, name: str) -> Fraction:
    b = parse_rat(value)
    if b <= 0:
        raise ValueError(f"{name} must be positive, got {render_rat(b)}")
    return b


def _nonneg_budget(value: RatLike, name: str) -> Fraction:
    b = parse_rat(value)
    if b < 0:
        raise ValueError(f"{name} must be nonnegative, got {render_rat(b)}")
    return b


def _items(k: int, minimum: int = 1) -> int:
    if isinstance(k, bool) or not isinstance(k, int):
        raise TypeError(f"item count must be an integer, got {k!r}")
    if k < minimum:
        raise ValueError(f"item count must be at least {minimum}, got {k}")
    return k


def _agent(agent: int) -> int:
    if agent not in AGENTS:
        raise ValueError(f"agent must be 1 or 2, got {agent!r}")
    return agent


def _const(v: Fraction) -> pw.Lin:
    return pw.Lin(v, Fraction(0))


def _lex(u: pw.SymUtil) -> LexUtility:
    return LexUtility(u.items, u.money.c0)


# ---------------------------------------------------------------------------
# item split (how many items each agent ends up with)


@dataclass(frozen=True)
class ItemSplit:
    """Item counts ``k1 + k2 = k`` fixed by ``k1/(k2+1) <= B1/B2 < (k1+1)/k2``."""

    k1: int
    k2: int
    boundary: bool


def item_split(b1: RatLike, b2: RatLike, k: int) -> ItemSplit:
    """Return the unique split of ``k`` items for the budget ratio ``b1/b2``.

    ``boundary`` is set when the ratio sits exactly on ``k1/(k2+1)``, where
    the counts are only realized in expectation.
    """
    b1, b2, k = _budget(b1, "B1"), _budget(b2, "B2"), _items(k)
    ratio = b1 / b2
    for k1 in range(k, -1, -1):
        k2 = k - k1
        low = Fraction(k1, k2 + 1)
        if ratio >= low:
            return ItemSplit(k1, k2, ratio == low)
    raise AssertionError("ratio below every split")  # k1 = 0 always matches


# ---------------------------------------------------------------------------
# allocation cases


@dataclass(frozen=True)
class TieTypeI:
    """Ratio exactly ``k1/(k2+1)``: both bid ``p_star`` until someone is broke."""

    k1: int
    k2: int
    p_star: Fraction
    tag = "TieTypeI"


@dataclass(frozen=True)
class TwoPhase:
    """``first_winner`` takes ``k_first`` items, then the other takes the rest."""

    first_winner: int
    k_first: int
    k_second: int
    tag = "TwoPhase"


@dataclass(frozen=True)
class TieTypeIIA:
    """Ratio exactly ``(k1+1)/(k2+1)``: both bid ``p_star`` until one holds only ``p_star``."""

    k1: int
    k2: int
    p_star: Fraction
    tag = "TieTypeIIA"


@dataclass(frozen=True)
class TieTypeIIB:
    """Equal critical prices just below a ``(k_lead+1)/(k_other+1)`` ratio."""

    leader: int
    k_lead: int
    p_star: Fraction
    tag = "TieTypeIIB"


AllocationCase = Union[TieTypeI, TwoPhase, TieTypeIIA, TieTypeIIB]
TIE_CASES = (TieTypeI, TieTypeIIA, TieTypeIIB)


def classify(b1: RatLike, b2: RatLike, k: int) -> AllocationCase:
    """Classify a budget profile into its allocation regime.

    Exact-ratio ties are read off the ratio; the near-ratio type II-B tie
    is detected by the engine finding equal first-round critical prices.
    """
    b1, b2, k = _budget(b1, "B1"), _budget(b2, "B2"), _items(k)
    split = item_split(b1, b2, k)
    k1, k2 = split.k1, split.k2
    ratio = b1 / b2
    if split.boundary:
        return TieTypeI(k1, k2, b1 / k1)
    if k1 >= 1 and k2 >= 1 and ratio == Fraction(k1 + 1, k2 + 1):
        return TieTypeIIA(k1, k2, b1 / (k1 + 1))
    agent_one_leads = ratio < Fraction(k1 + 1, k2 + 1)
    rnd = _first_round(b1, b2, k)
    if rnd.winner == 0:
        if agent_one_leads:
            return TieTypeIIB(1, k1, rnd.price.c0)
        return TieTypeIIB(2, k2, rnd.price.c0)
    if agent_one_leads:
        first, k_first, k_second = 1, k1, k2
    else:
        first, k_first, k_second = 2, k2, k1
    if k_first == 0:
        first, k_first, k_second = 3 - first, k_second, 0
    return TwoPhase(first, k_first, k_second)


# ---------------------------------------------------------------------------
# utilities


@lru_cache(maxsize=65536)
def _first_round(b1: Fraction, b2: Fraction, k: int) -> pw.SymRound:
    # cached rounds are never mutated by callers
    return pw.canonical_round(pw.CONCRETE, k, pw.table(k - 1), _const(b1), _const(b2))


def _value(b_self: Fraction, b_other: Fraction, k: int) -> LexUtility:
    """``U^(k)`` for nonnegative budgets, including the degenerate values."""
    if k == 0:
        return LexUtility(0, b_self)
    if b_self == 0 or b_other == 0:
        if b_self == 0 and b_other == 0:
            return LexUtility(Fraction(k, 2), 0)
        if b_other == 0:
            return LexUtility(k, b_self)
        return LexUtility(0, 0)
    return _lex(_first_round(b_self, b_other, k).u1)


def utility(agent: int, b_self: RatLike, b_other: RatLike, k: int) -> LexUtility:
    """Expected utility of ``agent`` in the canonical outcome with ``k`` items.

    The outcome is symmetric in the agents' labels, so only the budgets
    matter; ``agent`` is validated and kept for readable call sites.
    """
    _agent(agent)
    k = _items(k, 0)
    b_self = _budget(b_self, "B_self")
    b_other = _budget(b_other, "B_other")
    return _value(b_self, b_other, k)


def winning_utility(
    agent: int, b_self: RatLike, b_other: RatLike, k: int, p: RatLike
) -> LexUtility:
    """Utility of winning the first of ``k`` items at price ``p``."""
    _agent(agent)
    k = _items(k)
    b_self, b_other = _budget(b_self, "B_self"), _budget(b_other, "B_other")
    p = _nonneg_budget(p, "price")
    if p > b_self:
        raise ValueError(
            f"price {render_rat(p)} exceeds own budget {render_rat(b_self)}"
        )
    return LexUtility(1, 0) + _value(b_self - p, b_other, k - 1)


def losing_utility(
    agent: int, b_self: RatLike, b_other: RatLike, k: int, p: RatLike
) -> LexUtility:
    """Utility of letting the opponent take the first item at price ``p``."""
    _agent(agent)
    k = _items(k)
    b_self, b_other = _budget(b_self, "B_self"), _budget(b_other, "B_other")
    p = _nonneg_budget(p, "price")
    if p > b_other:
        raise ValueError(
            f"price {render_rat(p)} exceeds opponent budget {render_rat(b_other)}"
        )
    return _value(b_self, b_other - p, k - 1)


# ---------------------------------------------------------------------------
# critical prices


class CriticalKind(str, Enum):
    INDIFFERENCE = "Indifference"
    WIN_DISCONTINUITY = "WinDiscontinuity"
    NONEXISTENT = "Nonexistent"


class Preference(str, Enum):
    STRICT_WIN = "StrictWin"
    INDIFFERENT = "Indifferent"


@dataclass(frozen=True)
class CriticalPriceResult:
    """Crossing point of the winning and losing utilities in the price."""

    price: Fraction
    kind: CriticalKind
    preference_at_price: Preference


def _public_critical(c: pw.SymCritical) -> CriticalPriceResult:
    if c.kind == pw.LOSE_DISCONTINUITY or c.preference < 0:
        # would contradict the weak preference for winning at the crossing
        raise RuntimeError("critical price where losing is strictly preferred")
    pref = Preference.INDIFFERENT if c.preference == 0 else Preference.STRICT_WIN
    return CriticalPriceResult(c.price.c0, CriticalKind(c.kind), pref)


def critical_price(
    agent: int, b_self: RatLike, b_other: RatLike, k: int
) -> CriticalPriceResult:
    """Supremum of the prices at which winning beats losing.

    ``Nonexistent`` means winning is preferred all the way up to the own
    budget; the reported price is then the budget itself.
    """
    _agent(agent)
    k = _items(k)
    b_self, b_other = _budget(b_self, "B_self"), _budget(b_other, "B_other")
    c = pw.critical_price(pw.CONCRETE, pw.table(k - 1), _const(b_self), _const(b_other))
    return _public_critical(c)


# ---------------------------------------------------------------------------
# traces


class TraceKind(str, Enum):
    DETERMINISTIC = "Deterministic"
    TIE_I = "TieI"
    TIE_IIA = "TieIIA"
    TIE_IIB = "TieIIB"


_TRACE_KIND = {
    TieTypeI: TraceKind.TIE_I,
    TieTypeIIA: TraceKind.TIE_IIA,
    TieTypeIIB: TraceKind.TIE_IIB,
}


@dataclass(frozen=True)
class RoundRecord:
    """One deterministic round: bids are ``(agent 1's, agent 2's)``."""

    round_index: int
    winner: int
    price: Fraction
    bids: tuple[BidValue, BidValue]

    def to_json(self) -> dict:
        return {
            "round": self.round_index,
            "winner": self.winner,
            "price": render_rat(self.price),
            "bids": [b.to_json() for b in self.bids],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RoundRecord":
        bids = tuple(BidValue.from_json(b) for b in obj["bids"])
        return cls(int(obj["round"]), int(obj["winner"]), parse_rat(obj["price"]), bids)


_STOPPING_RULES = {
    TraceKind.TIE_I: (
        "both bid p_star each round, a fair coin picks the winner, until one "
        "agent's budget is exhausted",
        "the other agent wins every remaining item at price 0",
    ),
    TraceKind.TIE_IIA: (
        "both bid p_star each round, a fair coin picks the winner, until one "
        "agent's budget equals p_star",
        "the other agent wins every remaining item bidding p_star+",
    ),
    TraceKind.TIE_IIB: (
        "both bid p_star each round, a fair coin picks the winner, until the "
        "leader holds k_lead items or the other agent holds all but one of its "
        "items",
        "the leader completes k_lead items bidding p_star+, then the other "
        "agent wins the rest at the leader's remaining budget p_star",
    ),
}


@dataclass(frozen=True)
class TieDescriptor:
    """Repeated equal-bid coin process that replaces the deterministic rounds."""

    start_round: int
    case: AllocationCase
    p_star: Fraction
    stopping_rule: str
    residual: str

    def to_json(self) -> dict:
        return {
            "start_round": self.start_round,
            "case": self.case.tag,
            "p_star": render_rat(self.p_star),
            "stopping_rule": self.stopping_rule,
            "residual": self.residual,
        }

    @classmethod
    def from_json(cls, obj: dict, case: AllocationCase) -> "TieDescriptor":
        if case.tag != obj["case"]:
            raise ValueError(f"tie case {obj['case']!r} does not match the budgets")
        return cls(
            int(obj["start_round"]),
            case,
            parse_rat(obj["p_star"]),
            obj["stopping_rule"],
            obj["residual"],
        )


@dataclass(frozen=True)
class OutcomeTrace:
    """Canonical outcome for ``(b1, b2)`` with ``items`` items."""

    items: int
    b1: Fraction
    b2: Fraction
    kind: TraceKind
    case: AllocationCase
    rounds: tuple[RoundRecord, ...]
    expected_utility_1: LexUtility
    expected_utility_2: LexUtility
    final_budgets: Optional[tuple[Fraction, Fraction]] = None
    tie: Optional[TieDescriptor] = None

    @property
    def winners(self) -> list[int]:
        return [r.winner for r in self.rounds]

    @property
    def prices(self) -> list[Fraction]:
        return [r.price for r in self.rounds]

    def to_json(self) -> dict:
        obj = {
            "items": self.items,
            "b1": render_rat(self.b1),
            "b2": render_rat(self.b2),
            "case": self.case.tag,
            "rounds": [r.to_json() for r in self.rounds],
            "utilities": {
                "1": self.expected_utility_1.to_json(),
                "2": self.expected_utility_2.to_json(),
            },
            "final_budgets": (
                None
                if self.final_budgets is None
                else [render_rat(b) for b in self.final_budgets]
            ),
        }
        if self.tie is not None:
            obj["tie"] = self.tie.to_json()
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "OutcomeTrace":
        b1, b2, k = parse_rat(obj["b1"]), parse_rat(obj["b2"]), int(obj["items"])
        case = classify(b1, b2, k)
        if case.tag != obj["case"]:
            raise ValueError(f"case {obj['case']!r} does not match the budgets")
        rounds = tuple(RoundRecord.from_json(r) for r in obj["rounds"])
        fb = obj.get("final_budgets")
        tie = obj.get("tie")
        if tie is not None:
            # replay the prefix to recover the subgame the tie belongs to
            x, y = b1, b2
            for r in rounds:
                if r.winner == 1:
                    x -= r.price
                else:
                    y -= r.price
            sub_case = classify(x, y, k - len(rounds))
            tie = TieDescriptor.from_json(tie, sub_case)
        return cls(
            items=k,
            b1=b1,
            b2=b2,
            kind=_TRACE_KIND[type(tie.case)] if tie else TraceKind.DETERMINISTIC,
            case=case,
            rounds=rounds,
            expected_utility_1=LexUtility.from_json(obj["utilities"]["1"]),
            expected_utility_2=LexUtility.from_json(obj["utilities"]["2"]),
            final_budgets=None if fb is None else (parse_rat(fb[0]), parse_rat(fb[1])),
            tie=tie,
        )


def canonical_trace(b1: RatLike, b2: RatLike, k: int) -> OutcomeTrace:
    """Unroll the canonical outcome round by round.

    Deterministic rounds are listed with both bids.  If a round has equal
    critical prices, the trace stops there with a tie descriptor and the
    exact expected utilities of the coin process.
    """
    b1, b2, k = _budget(b1, "B1"), _budget(b2, "B2"), _items(k)
    case = classify(b1, b2, k)
    rounds: list[RoundRecord] = []
    x, y = b1, b2
    won = [0, 0]
    for idx in range(1, k + 1):
        left = k - idx + 1
        if x > 0 and y > 0:
            rnd = _first_round(x, y, left)
        else:
            rnd = pw.canonical_round(
                pw.CONCRETE, left, pw.table(left - 1), _const(x), _const(y)
            )
        if rnd.winner == 0:
            # the tie may open after a deterministic prefix; its regime is
            # that of the remaining subgame
            sub_case = case if idx == 1 else classify(x, y, left)
            kind = _TRACE_KIND.get(type(sub_case))
            if kind is None:
                raise RuntimeError(
                    f"unclassified tie at round {idx} for budgets "
                    f"({render_rat(b1)}, {render_rat(b2)}), k={k}"
                )
            stop, residual = _STOPPING_RULES[kind]
            return OutcomeTrace(
                items=k,
                b1=b1,
                b2=b2,
                kind=kind,
                case=case,
                rounds=tuple(rounds),
                expected_utility_1=LexUtility(won[0] + rnd.u1.items, rnd.u1.money.c0),
                expected_utility_2=LexUtility(won[1] + rnd.u2.items, rnd.u2.money.c0),
                tie=TieDescriptor(idx, sub_case, rnd.price.c0, stop, residual),
            )
        p = rnd.price.c0
        lose, win = BidValue(p), BidValue(p, True)
        bids = (win, lose) if rnd.winner == 1 else (lose, win)
        rounds.append(RoundRecord(idx, rnd.winner, p, bids))
        won[rnd.winner - 1] += 1
        if rnd.winner == 1:
            x -= p
        else:
            y -= p
    return OutcomeTrace(
        items=k,
        b1=b1,
        b2=b2,
        kind=TraceKind.DETERMINISTIC,
        case=case,
        rounds=tuple(rounds),
        expected_utility_1=LexUtility(won[0], x),
        expected_utility_2=LexUtility(won[1], y),
        final_budgets=(x, y),
    )


# ---------------------------------------------------------------------------
# tie regimes: closed form and explicit coin processes


def _check_tie_case(b1: Fraction, b2: Fraction, k: int, case: AllocationCase) -> None:
    if not isinstance(case, TIE_CASES):
        raise ValueError(f"{case!r} is not a tie case")
    actual = classify(b1, b2, k)
    if actual != case:
        raise ValueError(f"case {case!r} does not match budgets (found {actual!r})")


def _split_roles(agent: int, b_self: Fraction, b_other: Fraction):
    return (b_self, b_other) if agent == 1 else (b_other, b_self)


def _type_one_closed_form(agent: int, b1: Fraction, b2: Fraction, case: TieTypeI):
    # in the agent's own terms the ratio is k_i / (k_other + 1)
    if agent == 1:
        k_i, k_o, b_i, b_o = case.k1, case.k2, b1, b2
    else:
        k_i, k_o, b_i, b_o = case.k2 + 1, case.k1 - 1, b2, b1
    items = k_i - 1 + phi(k_o, k_i - 1)
    money = phi(k_i - 1, k_o) * b_i - phi(k_i - 2, k_o + 1) * b_o
    return LexUtility(items, money)


def tie_expected_utility(
    agent: int, b_self: RatLike, b_other: RatLike, k: int, case: AllocationCase
) -> LexUtility:
    """Expected utility of ``agent`` under a tie regime.

    Type I uses the binomial closed form; types II-A and II-B enumerate
    the bounded coin process directly.
    """
    _agent(agent)
    k = _items(k)
    b_self, b_other = _budget(b_self, "B_self"), _budget(b_other, "B_other")
    b1, b2 = _split_roles(agent, b_self, b_other)
    _check_tie_case(b1, b2, k, case)
    if isinstance(case, TieTypeI):
        return _type_one_closed_form(agent, b1, b2, case)
    return tie_process_utilities(b1, b2, k, case)[agent - 1]


def _expect(leaf_fn, start, step_fn):
    """Expected leaf value of a fair-coin process over small integer states."""

    def go(state, weight):
        leaf = leaf_fn(state)
        if leaf is not None:
            yield weight, leaf
            return
        for winner in (0, 1):
            yield from go(step_fn(state, winner), weight / 2)

    total = [LexUtility(0, 0), LexUtility(0, 0)]
    mass = Fraction(0)
    for weight, (u1, u2) in go(start, Fraction(1)):
        total[0] = total[0] + u1.scale(weight)
        total[1] = total[1] + u2.scale(weight)
        mass += weight
    assert mass == 1
    return total[0], total[1]


def type_one_process_utility(b1: RatLike, b2: RatLike, k: int):
    """Expected utilities at a ``k1/(k2+1)`` ratio by playing the coin race.

    Both agents bid ``p_star`` until one has spent everything; the other
    then takes the remaining items for nothing.
    """
    b1, b2, k = _budget(b1, "B1"), _budget(b2, "B2"), _items(k)
    case = classify(b1, b2, k)
    if not isinstance(case, TieTypeI):
        raise ValueError("budgets are not at a type I ratio")
    p = case.p_star
    budgets = (b1, b2)

    def step(state, w):
        wins = list(state)
        wins[w] += 1
        return tuple(wins)

    def leaf(state):
        spent = [state[i] * p for i in range(2)]
        rest = k - state[0] - state[1]
        for i in range(2):
            if spent[i] == budgets[i]:
                j = 1 - i
                final = [None, None]
                final[i] = LexUtility(state[i], 0)
                final[j] = LexUtility(state[j] + rest, budgets[j] - spent[j])
                return tuple(final)
        if rest == 0:
            raise AssertionError("items ran out before either budget")
        return None

    return _expect(leaf, (0, 0), step)


def tie_process_utilities(b1: RatLike, b2: RatLike, k: int, case: AllocationCase):
    """Expected utilities of both agents for a type II tie by enumeration."""
    b1, b2, k = _budget(b1, "B1"), _budget(b2, "B2"), _items(k)
    if isinstance(case, TieTypeIIA):
        return _type_two_a_process(b1, b2, k, case)
    if isinstance(case, TieTypeIIB):
        return _type_two_b_process(b1, b2, k, case)
    if isinstance(case, TieTypeI):
        return type_one_process_utility(b1, b2, k)
    raise ValueError(f"{case!r} is not a tie case")


def _type_two_a_process(b1, b2, k, case: TieTypeIIA):
    p = case.p_star
    budgets = (b1, b2)

    def step(state, w):
        wins = list(state)
        wins[w] += 1
        return tuple(wins)

    def leaf(state):
        rest = k - state[0] - state[1]
        left = [budgets[i] - state[i] * p for i in range(2)]
        for i in range(2):
            if left[i] == p:
                j = 1 - i
                final = [None, None]
                final[i] = LexUtility(state[i], left[i])
                final[j] = LexUtility(state[j] + rest, left[j] - rest * p)
                return tuple(final)
        if rest == 0:
            raise AssertionError("items ran out before either budget reached p_star")
        return None

    return _expect(leaf, (0, 0), step)


def _type_two_b_process(b1, b2, k, case: TieTypeIIB):
    lead = case.leader - 1
    other = 1 - lead
    p = case.p_star
    k_lead = case.k_lead
    k_other = k - k_lead
    budgets = (b1, b2)

    def step(state, w):
        wins = list(state)
        wins[w] += 1
        return tuple(wins)

    def leaf(state):
        if state[lead] < k_lead and state[other] < k_other - 1:
            return None
        # the leader completes its items bidding p_star+ (paying p_star),
        # then the other agent buys the rest at the leader's remaining budget
        lead_left = budgets[lead] - k_lead * p
        rest = k - k_lead - state[other]
        final = [None, None]
        final[lead] = LexUtility(k_lead, lead_left)
        final[other] = LexUtility(
            k - k_lead, budgets[other] - state[other] * p - rest * lead_left
        )
        return tuple(final)

    return _expect(leaf, (0, 0), step)


def type_two_a_orderings(b1: RatLike, b2: RatLike, k: int):
    """Utilities when the type II-A items go agent 1 first, then agent 2 first.

    Every item costs ``p_star`` in either order, so both orders must give
    the same pair of utilities.
    """
    b1, b2, k = _budget(b1, "B1"), _budget(b2, "B2"), _items(k)
    case = classify(b1, b2, k)
    if not isinstance(case, TieTypeIIA):
        raise ValueError("budgets are not at a type II-A ratio")
    p = case.p_star

    def run(order):
        budgets = [b1, b2]
        wins = [0, 0]
        for agent in order:
            budgets[agent - 1] -= p
            wins[agent - 1] += 1
        return LexUtility(wins[0], budgets[0]), LexUtility(wins[1], budgets[1])

    first = run([1] * case.k1 + [2] * case.k2)
    second = run([2] * case.k2 + [1] * case.k1)
    return first, second
