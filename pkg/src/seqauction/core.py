"""Exact numeric foundation: rationals, bump bids and lexicographic utilities.

Item values never appear as numbers.  Bidders are assumed to value an item
far above any budget, so a utility is the pair ``(items, money)`` compared
lexicographically; this is the large-value limit of ``items * v + money``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rat = Fraction
RatLike = Union[Fraction, int, str]

AGENTS = (1, 2)

_RAT_RE = re.compile(r"\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*\Z")


def parse_rat(text: RatLike) -> Fraction:
    """Parse ``"p/q"`` or an integer into a Fraction.

    Decimal strings are rejected on purpose: ``"0.1"`` is not exactly
    representable in the inputs we promise to honour.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise TypeError(f"cannot parse {text!r} as a rational")
    match = _RAT_RE.match(text)
    if match is None:
        raise ValueError(f"not a rational of the form p/q: {text!r}")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def render_rat(x: Fraction) -> str:
    """Render in lowest terms, omitting a unit denominator."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def other(agent: int) -> int:
    if agent not in AGENTS:
        raise ValueError(f"agent must be 1 or 2, got {agent!r}")
    return 3 - agent


def sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True, order=True)
class BidValue:
    """A bid of ``amount``, or ``amount+`` when ``bump`` is set.

    ``amount+`` beats ``amount`` but its winner is charged ``amount``.
    Field order makes the dataclass ordering the bid ordering.
    """

    amount: Fraction
    bump: bool = False

    def __post_init__(self):
        object.__setattr__(self, "amount", Fraction(self.amount))
        if self.amount < 0:
            raise ValueError("bid amount must be nonnegative")

    @property
    def payment(self) -> Fraction:
        return self.amount

    def to_json(self) -> dict:
        return {"amount": render_rat(self.amount), "plus": self.bump}

    @classmethod
    def from_json(cls, obj: dict) -> "BidValue":
        return cls(parse_rat(obj["amount"]), bool(obj["plus"]))

    def __str__(self) -> str:
        return render_rat(self.amount) + ("+" if self.bump else "")


def bid_compare(a: BidValue, b: BidValue) -> int:
    """Return -1, 0 or 1 as ``a`` is below, equal to or above ``b``."""
    return sign((a.amount, a.bump) > (b.amount, b.bump)) - sign(
        (a.amount, a.bump) < (b.amount, b.bump)
    )


@dataclass(frozen=True, order=True)
class LexUtility:
    """Expected item count and expected residual money, ordered lexicographically."""

    items: Fraction
    money: Fraction

    def __post_init__(self):
        object.__setattr__(self, "items", Fraction(self.items))
        object.__setattr__(self, "money", Fraction(self.money))

    def __add__(self, o: "LexUtility") -> "LexUtility":
        return LexUtility(self.items + o.items, self.money + o.money)

    def __sub__(self, o: "LexUtility") -> "LexUtility":
        return LexUtility(self.items - o.items, self.money - o.money)

    def scale(self, w: Fraction) -> "LexUtility":
        return LexUtility(self.items * w, self.money * w)

    def to_json(self) -> dict:
        return {"items": render_rat(self.items), "money": render_rat(self.money)}

    @classmethod
    def from_json(cls, obj: dict) -> "LexUtility":
        return cls(parse_rat(obj["items"]), parse_rat(obj["money"]))

    def __str__(self) -> str:
        return f"({render_rat(self.items)}, {render_rat(self.money)})"


def lex_compare(a: LexUtility, b: LexUtility) -> int:
    """Return -1, 0 or 1 comparing items first, then money."""
    if a.items != b.items:
        return sign(a.items - b.items)
    return sign(a.money - b.money)


def average(a: LexUtility, b: LexUtility) -> LexUtility:
    """Expected utility of a fair coin between two outcomes."""
    half = Fraction(1, 2)
    return LexUtility((a.items + b.items) * half, (a.money + b.money) * half)
