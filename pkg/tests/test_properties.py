"""Hypothesis-driven structural properties on small instances.

The seeded thousand-instance battery over k <= 8 lives in the acceptance
module; these tests explore the same statements with shrinking.
"""

from __future__ import annotations

import random
from fractions import Fraction as F

from hypothesis import given
from hypothesis import strategies as st

import property_checks as pc
from seqauction import canonical_trace, utility
from seqauction import piecewise as pw
from strategies import budgets, scales

ks = st.integers(1, 5)


@given(budgets(), budgets(), ks)
def test_trace_structure(b1, b2, k):
    pc.check_price_monotone(b1, b2, k)
    pc.check_two_phase(b1, b2, k)
    pc.check_item_counts(b1, b2, k)
    pc.check_second_phase_prices(b1, b2, k)
    pc.check_default_price_bound(b1, b2, k)
    pc.check_budgets_respected(b1, b2, k)


@given(budgets(), budgets(), ks, scales())
def test_scaling_covariance(b1, b2, k, lam):
    pc.check_scaling(b1, b2, k, lam)


@given(budgets(), budgets(), ks)
def test_win_lose_and_critical_price(b1, b2, k):
    pc.check_win_lose_monotone(b1, b2, k)
    pc.check_critical_price_sides(b1, b2, k)
    pc.check_weak_preference_at_price(b1, b2, k)


@given(budgets(), budgets(), ks, st.integers(2, 1000))
def test_utility_monotone(b1, b2, k, d):
    pc.check_utility_monotone(b1, b2, k, F(1, d))


@given(budgets(), budgets(), ks)
def test_value_is_constant_sum_in_items(b1, b2, k):
    u1, u2 = utility(1, b1, b2, k), utility(2, b2, b1, k)
    assert u1.items + u2.items == k
    tr = canonical_trace(b1, b2, k)
    assert (tr.expected_utility_1, tr.expected_utility_2) == (u1, u2)


def test_continuity_limits_small_k():
    for k in range(1, 6):
        for label, got, want in pc.continuity_limits(k):
            assert tuple(got) == tuple(want), label


def test_table_items_are_monotone_in_ratio():
    for k in range(1, 6):
        t = pw.table(k)
        items = [p.items for p in t.pieces]
        assert items == sorted(items)


def test_check_all_smoke():
    rng = random.Random(0)
    pc.check_all(F(3, 4), F(1), 2, rng)
