"""Batch identity checks for the coin-flip algebra and the tie regimes.

Each suite returns a flat list of :class:`Check` records so callers can
report the first failure, count passes, or assert on everything at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..canonical import (
    TieTypeI,
    TieTypeIIA,
    TieTypeIIB,
    _items,
    canonical_trace,
    classify,
    tie_expected_utility,
    tie_process_utilities,
    type_one_process_utility,
    type_two_a_orderings,
)
from ..coinflip import ENUMERATION_BOUND, complement_gap, phi, phi_enumerated, step_identity_gap
from ..core import render_rat

# second budgets used to place each tie ratio at more than one scale
TIE_SCALES = (Fraction(1), Fraction(3, 7))
TIE_IIB_STEPS = 60


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


def first_failure(checks: list[Check]) -> Check | None:
    return next((c for c in checks if not c.passed), None)


def phi_suite(max_index: int = 12) -> list[Check]:
    """Closed form vs enumeration for ``m + n <= max_index``; identities for ``m, n <= max_index``."""
    if max_index < 0 or max_index > ENUMERATION_BOUND:
        raise ValueError(f"max must lie in [0, {ENUMERATION_BOUND}], got {max_index}")
    checks = []
    for total in range(max_index + 1):
        for m in range(total + 1):
            n = total - m
            closed, brute = phi(m, n), phi_enumerated(m, n)
            checks.append(Check(f"phi({m},{n}) closed=enumerated", closed == brute,
                                f"{closed} vs {brute}"))
    for m in range(max_index + 1):
        for n in range(max_index + 1):
            if m >= 1:
                gap = step_identity_gap(m, n)
                checks.append(Check(f"step identity ({m},{n})", gap == 0, f"gap {gap}"))
            gap = complement_gap(m, n)
            checks.append(Check(f"complement ({m},{n})", gap == 0, f"gap {gap}"))
    return checks


def type_one_instances(max_items: int) -> list[tuple[Fraction, Fraction, int]]:
    """Every ``k1/(k2+1)`` ratio for ``k <= max_items`` at each scale in ``TIE_SCALES``."""
    out = []
    for k in range(1, _items(max_items) + 1):
        for k1 in range(1, k + 1):
            for b2 in TIE_SCALES:
                out.append((Fraction(k1, k - k1 + 1) * b2, b2, k))
    return out


def type_two_a_instances(max_items: int) -> list[tuple[Fraction, Fraction, int]]:
    out = []
    for k in range(2, _items(max_items) + 1):
        for k1 in range(1, k):
            for b2 in TIE_SCALES:
                out.append((Fraction(k1 + 1, k - k1 + 1) * b2, b2, k))
    return out


def type_two_b_instances(max_items: int) -> list[tuple[Fraction, Fraction, int]]:
    """Profiles ``(j/TIE_IIB_STEPS, 1)`` in ``(0, 2)`` that classify as type II-B."""
    out = []
    for k in range(2, _items(max_items) + 1):
        for j in range(1, 2 * TIE_IIB_STEPS):
            r = Fraction(j, TIE_IIB_STEPS)
            if isinstance(classify(r, 1, k), TieTypeIIB):
                out.append((r, Fraction(1), k))
    return out


def _label(b1: Fraction, b2: Fraction, k: int) -> str:
    return f"({render_rat(b1)}, {render_rat(b2)}, k={k})"


def type_one_checks(max_items: int) -> list[Check]:
    """Binomial closed form against the explicit coin race, for both agents."""
    checks = []
    for b1, b2, k in type_one_instances(max_items):
        case = classify(b1, b2, k)
        assert isinstance(case, TieTypeI)
        process = type_one_process_utility(b1, b2, k)
        closed = (
            tie_expected_utility(1, b1, b2, k, case),
            tie_expected_utility(2, b2, b1, k, case),
        )
        checks.append(Check(f"type I closed form {_label(b1, b2, k)}", closed == process,
                            f"{closed} vs {process}"))
    return checks


def type_two_a_checks(max_items: int) -> list[Check]:
    """Both residual orderings give the same utilities, equal to the coin process."""
    checks = []
    for b1, b2, k in type_two_a_instances(max_items):
        case = classify(b1, b2, k)
        assert isinstance(case, TieTypeIIA)
        first, second = type_two_a_orderings(b1, b2, k)
        checks.append(Check(f"type II-A orderings {_label(b1, b2, k)}", first == second,
                            f"{first} vs {second}"))
        process = tie_process_utilities(b1, b2, k, case)
        checks.append(Check(f"type II-A process {_label(b1, b2, k)}", process == first,
                            f"{process} vs {first}"))
    return checks


def engine_tie_checks(max_items: int) -> list[Check]:
    """Trace utilities at every tie instance equal the coin-process utilities."""
    checks = []
    instances = (
        type_one_instances(max_items)
        + type_two_a_instances(max_items)
        + type_two_b_instances(max_items)
    )
    for b1, b2, k in instances:
        case = classify(b1, b2, k)
        tr = canonical_trace(b1, b2, k)
        got = (tr.expected_utility_1, tr.expected_utility_2)
        want = tie_process_utilities(b1, b2, k, case)
        ok = tr.tie is not None and tr.tie.start_round == 1 and got == want
        checks.append(Check(f"engine {case.tag} {_label(b1, b2, k)}", ok, f"{got} vs {want}"))
    return checks


def tie_suite(max_items: int = 6) -> list[Check]:
    return type_one_checks(max_items) + type_two_a_checks(max_items) + engine_tie_checks(max_items)


__all__ = [
    "Check",
    "engine_tie_checks",
    "first_failure",
    "phi_suite",
    "tie_suite",
    "type_one_checks",
    "type_one_instances",
    "type_two_a_checks",
    "type_two_a_instances",
    "type_two_b_instances",
]
