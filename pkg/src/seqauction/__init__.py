"""Exact equilibrium outcomes of two-bidder sequential first-price auctions.

Budgets are exact rationals, item values are taken to dominate money
(utilities compare lexicographically as ``(items, money)``), and every
price, trace and expected utility is computed exactly.
"""

from __future__ import annotations

from .canonical import (
    AllocationCase,
    CriticalKind,
    CriticalPriceResult,
    ItemSplit,
    OutcomeTrace,
    Preference,
    RoundRecord,
    TieDescriptor,
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
from .clinching import clinch_threshold, clinching_items, clinching_trace, fraction_curve
from .coinflip import phi, phi_enumerated
from .core import BidValue, LexUtility, Rat, bid_compare, lex_compare, parse_rat, render_rat

__version__ = "0.1.0"

__all__ = [
    "AllocationCase",
    "BidValue",
    "CriticalKind",
    "CriticalPriceResult",
    "ItemSplit",
    "LexUtility",
    "OutcomeTrace",
    "Preference",
    "Rat",
    "RoundRecord",
    "TieDescriptor",
    "TieTypeI",
    "TieTypeIIA",
    "TieTypeIIB",
    "TraceKind",
    "TwoPhase",
    "bid_compare",
    "canonical_trace",
    "classify",
    "clinch_threshold",
    "clinching_items",
    "clinching_trace",
    "critical_price",
    "fraction_curve",
    "item_split",
    "lex_compare",
    "losing_utility",
    "parse_rat",
    "phi",
    "phi_enumerated",
    "render_rat",
    "tie_expected_utility",
    "utility",
    "winning_utility",
]
