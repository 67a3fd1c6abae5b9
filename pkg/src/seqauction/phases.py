"""Phase tables: where the outcome changes shape as ``B1/B2`` moves.

A *phase* is a maximal open interval of ratios ``r = B1/B2`` on which the
winner sequence is fixed and every round's price is one linear form
``a*B1 + c*B2``.  The tables cover ``r`` in ``(0, 1]``: they list the
phase boundaries and, per phase, the winners and price forms recovered
from the engine at interior sample points (cross-checked at a third).

For the sequential auction the candidate boundaries are the breakpoints
of the value table; for clinching they are the ratios at which a budget
comparison flips along some winner path.  A candidate is kept only if the
outcome really differs on its two sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import piecewise as pw
from .canonical import TraceKind, _items, canonical_trace
from .clinching import clinching_trace
from .core import render_rat

ENGINES = ("sequential", "clinching")
TABLE_ITEMS = (2, 3)
ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class LinearPrice:
    """Price ``b1_coef * B1 + b2_coef * B2``."""

    b1_coef: Fraction
    b2_coef: Fraction

    def at(self, b1: Fraction, b2: Fraction) -> Fraction:
        return self.b1_coef * b1 + self.b2_coef * b2

    def __str__(self) -> str:
        terms = []
        for coef, name in ((self.b1_coef, "B1"), (self.b2_coef, "B2")):
            if coef == 0:
                continue
            mag = abs(coef)
            body = name if mag == 1 else f"{render_rat(mag)}*{name}"
            terms.append(("-" if coef < 0 else "+", body))
        if not terms:
            return "0"
        sign0, body0 = terms[0]
        out = ("-" if sign0 == "-" else "") + body0
        for s, body in terms[1:]:
            out += f" {s} {body}"
        return out


@dataclass(frozen=True)
class PhaseRow:
    """One phase ``(low, high)``; ``tie`` names a coin regime if one applies."""

    low: Fraction
    high: Fraction
    sample: Fraction
    winners: tuple[int, ...]
    prices: tuple[LinearPrice, ...]
    tie: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "low": render_rat(self.low),
            "high": render_rat(self.high),
            "sample": render_rat(self.sample),
            "winners": list(self.winners),
            "prices": [str(p) for p in self.prices],
            "tie": self.tie,
        }


def _outcome(engine: str, r: Fraction, k: int):
    """``(winners, prices, tie)`` at ``B1 = r, B2 = 1``."""
    if engine == "sequential":
        tr = canonical_trace(r, ONE, k)
        if tr.kind == TraceKind.DETERMINISTIC:
            return tuple(tr.winners), tuple(tr.prices), None
        # a tie phase is summarized by its deterministic prefix and p_star
        return tuple(tr.winners), tuple(tr.prices) + (tr.tie.p_star,), tr.kind.value
    tr = clinching_trace(r, ONE, k)
    return tuple(tr.winners), tuple(tr.prices), None


def _clinching_flips(r: Fraction, k: int) -> list[Fraction]:
    """Ratios where a budget comparison flips along the path taken at ``r``.

    Budgets are carried as linear forms ``(u, v)`` meaning ``u*r + v`` with
    ``B2 = 1``, following the winners chosen at ``r`` itself.
    """
    forms = [(ONE, ZERO), (ZERO, ONE)]
    flips = []
    for done, winner in enumerate(clinching_trace(r, ONE, k).winners):
        (u1, v1), (u2, v2) = forms
        if u1 != u2:
            flips.append((v2 - v1) / (u1 - u2))
        low = forms[0] if u1 * r + v1 <= u2 * r + v2 else forms[1]
        m = k - done
        u, v = forms[winner - 1]
        forms[winner - 1] = (u - low[0] / m, v - low[1] / m)
    return flips


def _candidates(engine: str, k: int) -> list[Fraction]:
    if engine == "sequential":
        return [b for b in pw.table(k).bps if 0 < b < 1]
    seen: set[Fraction] = set()
    frontier = [Fraction(j, 4 * k * k) for j in range(1, 4 * k * k + 1)]
    while frontier:
        nxt = []
        for r in frontier:
            for f in _clinching_flips(r, k):
                if 0 < f < 1 and f not in seen:
                    seen.add(f)
                    nxt.append(f)
        # probe just either side of each new flip so every path is visited
        frontier = []
        for f in nxt:
            for g in (f * Fraction(999, 1000), f * Fraction(1001, 1000)):
                if 0 < g <= 1:
                    frontier.append(g)
        frontier = [g for g in frontier if g not in seen]
        if len(seen) > 64 * k:
            break
    return sorted(seen)


def _fit(engine: str, k: int, lo: Fraction, hi: Fraction) -> PhaseRow:
    """Recover the linear price forms on ``(lo, hi)`` from three samples."""
    s = pw._simplest_between(lo, hi)
    s2 = pw._simplest_between(lo, s)
    s3 = pw._simplest_between(s, hi)
    w, p, tie = _outcome(engine, s, k)
    w2, p2, _ = _outcome(engine, s2, k)
    w3, p3, _ = _outcome(engine, s3, k)
    if not (w == w2 == w3):
        raise AssertionError(f"winners vary inside phase ({lo}, {hi})")
    forms = []
    for a, b, c in zip(p, p2, p3):
        # price = b1_coef * r + b2_coef with B2 = 1
        slope = (a - b) / (s - s2)
        form = LinearPrice(slope, a - slope * s)
        if form.at(s3, ONE) != c:
            raise AssertionError(f"price not linear inside phase ({lo}, {hi})")
        forms.append(form)
    return PhaseRow(lo, hi, s, w, tuple(forms), tie)


def phase_table(k: int, engine: str = "sequential") -> list[PhaseRow]:
    """Phases of the ``k``-item outcome for ``B1/B2`` in ``(0, 1]``."""
    k = _items(k)
    if k not in TABLE_ITEMS:
        raise ValueError(f"phase tables are generated for k in {TABLE_ITEMS}, got {k}")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    cuts = [ZERO] + _candidates(engine, k) + [ONE]
    rows = [_fit(engine, k, lo, hi) for lo, hi in zip(cuts, cuts[1:])]
    merged = [rows[0]]
    for row in rows[1:]:
        prev = merged[-1]
        if (prev.winners, prev.prices, prev.tie) == (row.winners, row.prices, row.tie):
            merged[-1] = PhaseRow(
                prev.low, row.high, prev.sample, prev.winners, prev.prices, prev.tie
            )
        else:
            merged.append(row)
    return merged


def boundaries(rows: list[PhaseRow]) -> list[Fraction]:
    return [r.high for r in rows[:-1]]
