"""Seeded random budget profiles for audits, sweeps and tests.

Budgets are exact fractions with denominators at most ``MAX_DENOMINATOR``.
By default only profiles whose canonical trace is deterministic are kept,
so the coin-flip regimes (which live on exact ratios or thin intervals) do
not swamp a batch meant to exercise the generic case.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator

from . import piecewise as pw
from .canonical import TraceKind, _items, canonical_trace

MAX_DENOMINATOR = 1000
MAX_BUDGET = 2
_PATIENCE = 10_000


def random_budget(rng: random.Random, denominator_cap: int = MAX_DENOMINATOR) -> Fraction:
    """A budget in ``(0, MAX_BUDGET]`` with denominator at most ``denominator_cap``."""
    d = rng.randint(1, denominator_cap)
    return Fraction(rng.randint(1, MAX_BUDGET * d), d)


def _draws(rng: random.Random) -> Iterator[tuple[Fraction, Fraction]]:
    for _ in range(_PATIENCE):
        yield random_budget(rng), random_budget(rng)
    raise RuntimeError(f"no acceptable instance in {_PATIENCE} draws")


def random_instances(
    k: int, count: int, seed: int, include_ties: bool = False
) -> list[tuple[Fraction, Fraction, int]]:
    """``count`` reproducible ``(b1, b2, k)`` triples.

    Without ``include_ties`` a draw is kept only if its canonical trace is
    deterministic.
    """
    k = _items(k)
    rng = random.Random(seed)
    out: list[tuple[Fraction, Fraction, int]] = []
    draws = _draws(rng)
    while len(out) < count:
        b1, b2 = next(draws)
        if include_ties or canonical_trace(b1, b2, k).kind == TraceKind.DETERMINISTIC:
            out.append((b1, b2, k))
    return out


def boundary_distance(ratio: Fraction, k: int) -> Fraction:
    """Distance from ``ratio`` to the nearest breakpoint of the ``k``-item value.

    Every tie boundary is such a breakpoint, so this bounds the distance
    to every tie regime from below.
    """
    return min(abs(ratio - b) for b in pw.table(k).bps)


def grid_instances(
    k: int, count: int, seed: int, delta: Fraction, margin: int = 4
) -> list[tuple[Fraction, Fraction, int]]:
    """Deterministic instances on the ``delta`` grid, away from boundaries.

    Both budgets are multiples of ``delta`` and the ratio keeps a distance
    greater than ``margin * delta`` from every value breakpoint.
    """
    k = _items(k)
    rng = random.Random(seed)
    units = int(MAX_BUDGET / delta)
    out: list[tuple[Fraction, Fraction, int]] = []
    for _ in range(_PATIENCE):
        if len(out) == count:
            return out
        b1 = rng.randint(1, units) * delta
        b2 = rng.randint(1, units) * delta
        if boundary_distance(b1 / b2, k) <= margin * delta:
            continue
        if canonical_trace(b1, b2, k).kind != TraceKind.DETERMINISTIC:
            continue
        if (b1, b2, k) not in out:
            out.append((b1, b2, k))
    raise RuntimeError(f"only {len(out)} grid instances found in {_PATIENCE} draws")
