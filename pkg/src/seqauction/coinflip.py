"""Fair-coin head-count probabilities used by the tie-breaking utilities.

``phi(m, n)`` is the probability of at least ``n + 1`` heads in
``m + n + 1`` tosses of a fair coin.  It is also the probability that
``n + 1`` heads arrive before ``m + 1`` tails, which is how it enters the
race between two agents bidding the same price.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb

ENUMERATION_BOUND = 24


def _check(m: int, n: int) -> None:
    if m < -1 or n < 0:
        raise ValueError(f"phi needs m >= -1 and n >= 0, got m={m}, n={n}")


@lru_cache(maxsize=None)
def phi(m: int, n: int) -> Fraction:
    """Closed-form sum ``sum_{j=0..m} C(n+j, n) / 2^(n+j+1)``.

    ``m = -1`` gives 0: with only ``n`` tosses, ``n + 1`` heads are
    impossible.
    """
    _check(m, n)
    return sum(
        (Fraction(comb(n + j, n), 2 ** (n + j + 1)) for j in range(m + 1)),
        Fraction(0),
    )


def phi_enumerated(m: int, n: int) -> Fraction:
    """Count head/tail sequences of length ``m + n + 1`` with ``> n`` heads.

    Brute force over all ``2^(m+n+1)`` sequences, kept deliberately naive
    so it shares nothing with :func:`phi`.
    """
    _check(m, n)
    if m + n > ENUMERATION_BOUND:
        raise ValueError(
            f"enumeration limited to m + n <= {ENUMERATION_BOUND}, got {m + n}"
        )
    tosses = m + n + 1
    hits = sum(1 for seq in product((0, 1), repeat=tosses) if sum(seq) >= n + 1)
    return Fraction(hits, 2**tosses)


def step_identity_gap(m: int, n: int) -> Fraction:
    """``phi(m, n) - phi(m-1, n+1)`` minus its binomial closed form.

    Zero for every ``m >= 1, n >= 0`` when the identity holds.
    """
    if m < 1 or n < 0:
        raise ValueError("identity is stated for m >= 1, n >= 0")
    lhs = phi(m, n) - phi(m - 1, n + 1)
    rhs = Fraction(comb(n + m + 1, n + 1), 2 ** (m + n + 1))
    return lhs - rhs


def complement_gap(m: int, n: int) -> Fraction:
    """``phi(m, n) + phi(n, m) - 1``; zero since one side must reach its count."""
    return phi(m, n) + phi(n, m) - 1
