"""Exact piecewise-linear utility tables and the critical-price solver.

Canonical utilities are homogeneous of degree one in the two budgets, so
``U(x, y)`` is determined by the ratio ``x / y``: on each open ratio
interval the item count is constant and the money is ``a*x + c*y``.  A
:class:`Table` stores one k-level of that function for the agent whose
own budget is ``x``; both agents share it because the canonical outcome is
symmetric in their labels.

Every quantity flowing through the solver is a :class:`Lin`, an affine form
``c0 + c1*r`` in one free parameter ``r``.  Concrete instances use constant
forms.  Table construction evaluates the recursion at a rational ``r0``
while a :class:`Cell` records every comparison outcome as a linear
constraint on ``r``; the resulting interval is where the whole evaluation
path, and hence the affine formula, stays unchanged.  Sweeping ``r`` across
cells yields the exact piece structure of the next level.
"""

from __future__ import annotations

import threading
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


class Lin:
    """Affine form ``c0 + c1*r`` with rational coefficients."""

    __slots__ = ("c0", "c1")

    def __init__(self, c0=ZERO, c1=ZERO):
        # callers pass Fractions or ints; conversion happens in ``const``
        self.c0 = c0
        self.c1 = c1

    def __add__(self, o):
        if isinstance(o, Lin):
            return Lin(self.c0 + o.c0, self.c1 + o.c1)
        return Lin(self.c0 + o, self.c1)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Lin):
            return Lin(self.c0 - o.c0, self.c1 - o.c1)
        return Lin(self.c0 - o, self.c1)

    def __rsub__(self, o):
        return Lin(o - self.c0, -self.c1)

    def __neg__(self):
        return Lin(-self.c0, -self.c1)

    def __mul__(self, w):
        return Lin(self.c0 * w, self.c1 * w)

    __rmul__ = __mul__

    def __truediv__(self, w):
        return Lin(self.c0 / w, self.c1 / w)

    def at(self, r) -> Fraction:
        return self.c0 + self.c1 * r

    @property
    def is_const(self) -> bool:
        return self.c1 == 0

    def __repr__(self):
        return f"Lin({self.c0}, {self.c1})"


def const(v) -> Lin:
    return Lin(Fraction(v), ZERO)


class Cell:
    """Comparison oracle at ``r = r0`` that records the region of validity.

    ``lo``/``hi`` bound an open interval (``None`` is unbounded) unless
    ``point`` is set, in which case the path is only valid at ``r0``.
    """

    __slots__ = ("r0", "lo", "hi", "point")

    def __init__(self, r0: Optional[Fraction]):
        self.r0 = r0
        self.lo: Optional[Fraction] = None
        self.hi: Optional[Fraction] = None
        self.point = False

    def sign(self, v: Lin) -> int:
        if v.c1 == 0:
            return (v.c0 > 0) - (v.c0 < 0)
        if self.r0 is None:
            raise ValueError("non-constant form in a concrete evaluation")
        val = v.c0 + v.c1 * self.r0
        if val == 0:
            self.point = True
            return 0
        root = -v.c0 / v.c1
        # v > 0 holds on the side of root that contains r0
        if root < self.r0:
            if self.lo is None or root > self.lo:
                self.lo = root
        else:
            if self.hi is None or root < self.hi:
                self.hi = root
        return 1 if val > 0 else -1

    def cmp(self, a: Lin, b: Lin) -> int:
        return self.sign(a - b)

    def scratch(self) -> "Cell":
        """A cell at the same sample whose constraints are thrown away."""
        return self if self.r0 is None else Cell(self.r0)


CONCRETE = Cell(None)


@dataclass(frozen=True)
class Piece:
    """Utility ``(items, a*x + c*y)`` for own budget ``x``, other ``y``."""

    items: Fraction
    a: Fraction
    c: Fraction

    def money(self, x, y):
        return x * self.a + y * self.c


@dataclass
class SymUtil:
    items: Fraction
    money: Lin

    def plus_item(self) -> "SymUtil":
        return SymUtil(self.items + 1, self.money)


def sym_cmp(cell: Cell, u: SymUtil, v: SymUtil) -> int:
    if u.items != v.items:
        return 1 if u.items > v.items else -1
    return cell.cmp(u.money, v.money)


def sym_avg(u: SymUtil, v: SymUtil) -> SymUtil:
    return SymUtil((u.items + v.items) * HALF, (u.money + v.money) * HALF)


class Table:
    """Utility of the agent holding budget ``x`` against ``y`` with ``k`` items.

    ``bps`` are the sorted ratio breakpoints, ``points[j]`` the exact value
    at ``bps[j]`` and ``pieces[j]`` the formula on ``(bps[j-1], bps[j])``,
    with ``pieces[0]`` and ``pieces[-1]`` reaching to 0 and infinity.
    """

    def __init__(self, k: int, bps, points, pieces):
        assert len(points) == len(bps) and len(pieces) == len(bps) + 1
        self.k = k
        self.bps = list(bps)
        self.points = list(points)
        self.pieces = list(pieces)

    def __len__(self):
        return len(self.bps)

    def locate(self, cell: Cell, x: Lin, y: Lin) -> tuple[int, bool]:
        """Index of the first breakpoint ``b`` with ``b*y >= x``, and equality.

        The search runs on the sampled ratio; only the two neighbouring
        breakpoints are recorded because they imply every other comparison.
        """
        bps = self.bps
        if not bps:
            return 0, False
        if cell.r0 is None:
            rho = x.c0 / y.c0
        else:
            rho = x.at(cell.r0) / y.at(cell.r0)
        j = bisect_left(bps, rho)
        if j < len(bps):
            s = cell.sign(x - y * bps[j])
            assert s <= 0
            if s == 0:
                return j, True
        if j > 0:
            s = cell.sign(x - y * bps[j - 1])
            assert s > 0
        return j, False

    def piece_below(self, cell: Cell, x: Lin, y: Lin) -> Piece:
        """Formula just below the ratio ``x/y`` (both positive)."""
        if self.k == 0:
            return self.pieces[0]
        return self.pieces[self.locate(cell, x, y)[0]]

    def piece_above(self, cell: Cell, x: Lin, y: Lin) -> Piece:
        """Formula just above the ratio ``x/y`` (both positive)."""
        if self.k == 0:
            return self.pieces[0]
        j, eq = self.locate(cell, x, y)
        return self.pieces[j + 1 if eq else j]

    def piece_at(self, cell: Cell, x: Lin, y: Lin) -> Piece:
        """Formula that gives the value at ``(x, y)``; both must be positive."""
        if self.k == 0:
            return self.pieces[0]
        j, eq = self.locate(cell, x, y)
        return self.points[j] if eq else self.pieces[j]

    def lookup(self, cell: Cell, x: Lin, y: Lin) -> SymUtil:
        sx, sy = cell.sign(x), cell.sign(y)
        if sx < 0 or sy < 0:
            raise ValueError("negative budget in utility lookup")
        if sy == 0:
            if sx == 0:
                return SymUtil(Fraction(self.k, 2), const(ZERO))
            return SymUtil(Fraction(self.k), x)
        if sx == 0:
            return SymUtil(ZERO, const(ZERO))
        pc = self.piece_at(cell, x, y)
        return SymUtil(pc.items, pc.money(x, y))

    def evaluate(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        u = self.lookup(CONCRETE, const(x), const(y))
        return u.items, u.money.c0

    def evaluate_own_below(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        """Limit of the value as the own budget rises to ``x`` (both positive)."""
        if x <= 0 or y <= 0:
            raise ValueError("one-sided limits need positive budgets")
        pc = self.piece_below(CONCRETE, const(x), const(y))
        return pc.items, pc.money(x, y)

    def evaluate_other_below(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        """Limit of the value as the opponent's budget rises to ``y`` (both positive)."""
        if x <= 0 or y <= 0:
            raise ValueError("one-sided limits need positive budgets")
        pc = self.piece_above(CONCRETE, const(x), const(y))
        return pc.items, pc.money(x, y)


def zero_table() -> Table:
    return Table(0, [], [], [Piece(ZERO, ONE, ZERO)])


def one_table() -> Table:
    # lower budget loses at its own bid; equal budgets split by a coin
    return Table(
        1,
        [ONE],
        [Piece(HALF, ZERO, HALF)],
        [Piece(ZERO, ONE, ZERO), Piece(ONE, ONE, -ONE)],
    )


# --------------------------------------------------------------------------
# critical prices

INDIFFERENCE = "Indifference"
WIN_DISCONTINUITY = "WinDiscontinuity"
NONEXISTENT = "Nonexistent"
LOSE_DISCONTINUITY = "LoseDiscontinuity"


@dataclass
class SymCritical:
    price: Lin
    kind: str
    preference: int  # sign of W - L at the price


def win_util(cell: Cell, sub: Table, x: Lin, y: Lin, p: Lin) -> SymUtil:
    return sub.lookup(cell, x - p, y).plus_item()


def lose_util(cell: Cell, sub: Table, x: Lin, y: Lin, p: Lin) -> SymUtil:
    # beyond the opponent's budget the loss branch is held at "opponent broke"
    rest = y - p
    if cell.sign(rest) <= 0:
        return SymUtil(Fraction(sub.k), x)
    return sub.lookup(cell, x, rest)


def _win_piece(cell, sub, x, y, p) -> Piece:
    return sub.piece_at(cell, x - p, y)


def _lose_piece(cell, sub, x, y, p) -> Piece:
    if cell.sign(y - p) <= 0:
        return Piece(Fraction(sub.k), ONE, ZERO)
    return sub.piece_at(cell, x, y - p)


def prefers_win_above(cell: Cell, sub: Table, x: Lin, y: Lin, p: Lin) -> bool:
    """Whether winning beats losing on ``(p, p + eps)`` for small ``eps``.

    Because the win/lose gap is nonincreasing in the price, this holds
    exactly when the agent's critical price lies strictly above ``p``.
    """
    if cell.cmp(p, x) >= 0:
        return False
    wp = sub.piece_below(cell, x - p, y)
    if cell.sign(y - p) > 0:
        lp = sub.piece_above(cell, x, y - p)
    else:
        lp = Piece(Fraction(sub.k), ONE, ZERO)
    d_items = 1 + wp.items - lp.items
    if d_items != 0:
        return d_items > 0
    s = cell.sign(wp.money(x - p, y) - lp.money(x, y - p))
    if s != 0:
        return s > 0
    # equal at p: the side with the slower money decline is ahead
    return lp.c > wp.a


def critical_price(cell: Cell, sub: Table, x: Lin, y: Lin) -> SymCritical:
    """Critical price of the agent with budget ``x`` facing ``y``.

    ``sub`` is the table one level down.  Both budgets must be positive.
    """

    def D(p):
        return sym_cmp(cell, win_util(cell, sub, x, y, p), lose_util(cell, sub, x, y, p))

    d_top = D(x)
    if d_top > 0:
        return SymCritical(x, NONEXISTENT, d_top)

    bps = sub.bps
    n = len(bps)
    if n:
        pos, eq = sub.locate(cell, x, y)
    else:
        pos, eq = 0, False

    # W breakpoints, increasing in p: ratio (x-p)/y walks down the table
    zero = const(ZERO)
    n_w = pos + 2

    def w_cand(i):
        if i == 0:
            return zero
        if i == n_w - 1:
            return x
        return x - y * bps[pos - i]

    # L breakpoints, increasing in p: ratio x/(y-p) walks up the table,
    # then the opponent's whole budget when it is below ours
    start = pos + 1 if eq else pos
    tail = [y] if cell.sign(y - x) < 0 else []
    n_raw = n - start + len(tail)

    def l_raw(i):
        return y - x / bps[start + i] if start + i < n else tail[0]

    # keep candidates strictly below x; the order is fixed, so only the
    # neighbours of the cut constrain the cell
    probe = cell.scratch()
    lo, hi = 0, n_raw
    while lo < hi:
        mid = (lo + hi) // 2
        if probe.cmp(l_raw(mid), x) < 0:
            lo = mid + 1
        else:
            hi = mid
    if lo > 0:
        cell.cmp(l_raw(lo - 1), x)
    if lo < n_raw:
        cell.cmp(l_raw(lo), x)
    n_l = lo + 2

    def l_cand(i):
        if i == 0:
            return zero
        if i == n_l - 1:
            return x
        return l_raw(i - 1)

    # Probe signs are implied by the bracket re-checked below (W - L is
    # monotone in p), so they are evaluated without narrowing the cell.
    def D_probe(p):
        return sym_cmp(
            probe, win_util(probe, sub, x, y, p), lose_util(probe, sub, x, y, p)
        )

    def last_positive(seq, size):
        lo, hi = 0, size - 1  # D(seq(lo)) > 0 >= D(seq(hi))
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if D_probe(seq(mid)) > 0:
                lo = mid
            else:
                hi = mid
        return lo

    a = last_positive(w_cand, n_w)
    b = last_positive(l_cand, n_l)
    wa, la = w_cand(a), l_cand(b)
    wb, lb = w_cand(a + 1), l_cand(b + 1)
    left = wa if cell.cmp(wa, la) >= 0 else la
    right = wb if cell.cmp(wb, lb) <= 0 else lb
    d_left, d_right = D(left), D(right)
    if d_left <= 0 or d_right > 0:
        raise AssertionError("crossing bracket lost its signs")

    mid = (left + right) * HALF
    wp = _win_piece(cell, sub, x, y, mid)
    lp = _lose_piece(cell, sub, x, y, mid)
    d_items = 1 + wp.items - lp.items

    def at_point(p, d):
        if d == 0:
            return SymCritical(p, INDIFFERENCE, 0)
        return SymCritical(p, WIN_DISCONTINUITY if d > 0 else LOSE_DISCONTINUITY, d)

    if d_items < 0:
        return at_point(left, d_left)
    if d_items > 0:
        return at_point(right, d_right)
    # money gap on the open interval: base + slope * p
    base = wp.money(x, y) - lp.money(x, y)
    slope = lp.c - wp.a
    gap_left = base + left * slope
    gap_right = base + right * slope
    if cell.sign(gap_left) <= 0:
        return at_point(left, d_left)
    if cell.sign(gap_right) >= 0:
        return at_point(right, d_right)
    q = -base / slope
    return SymCritical(q, INDIFFERENCE, 0)


# --------------------------------------------------------------------------
# one round of the canonical outcome


@dataclass
class SymRound:
    crit1: Optional[SymCritical]
    crit2: Optional[SymCritical]
    winner: int  # 0 for a tie
    price: Lin
    u1: SymUtil
    u2: SymUtil


def canonical_round(cell: Cell, k: int, sub: Table, x: Lin, y: Lin) -> SymRound:
    """First round of the k-item canonical outcome for budgets ``(x, y)``.

    ``x`` is agent 1's budget; ``sub`` is the ``k-1`` table.
    """
    sx, sy = cell.sign(x), cell.sign(y)
    if sx < 0 or sy < 0:
        raise ValueError("negative budget")
    zero = const(ZERO)
    if sx == 0 or sy == 0 or k == 1:
        s = cell.cmp(x, y)
        if s == 0:
            w1 = win_util(cell, sub, x, y, x)
            l1 = lose_util(cell, sub, x, y, y)
            w2 = win_util(cell, sub, y, x, y)
            l2 = lose_util(cell, sub, y, x, x)
            return SymRound(None, None, 0, x, sym_avg(w1, l1), sym_avg(w2, l2))
        if sx == 0 or sy == 0:
            # the broke agent bids 0 and loses every remaining item
            price = zero
        else:
            price = y if s > 0 else x
        if s > 0:
            return SymRound(
                None, None, 1, price,
                win_util(cell, sub, x, y, price), lose_util(cell, sub, y, x, price),
            )
        return SymRound(
            None, None, 2, price,
            lose_util(cell, sub, x, y, price), win_util(cell, sub, y, x, price),
        )
    # Decide the order of the critical prices on a throwaway cell, then
    # certify it on the real one with the one-sided test, so only the
    # price setter's path narrows the cell.
    probe = cell.scratch()
    s = probe.cmp(
        critical_price(probe, sub, x, y).price, critical_price(probe, sub, y, x).price
    )
    c1 = c2 = None
    if s > 0:
        c2 = critical_price(cell, sub, y, x)
        if not prefers_win_above(cell, sub, x, y, c2.price):
            raise AssertionError("critical price order not certified")
    elif s < 0:
        c1 = critical_price(cell, sub, x, y)
        if not prefers_win_above(cell, sub, y, x, c1.price):
            raise AssertionError("critical price order not certified")
    else:
        c1 = critical_price(cell, sub, x, y)
        c2 = critical_price(cell, sub, y, x)
        s = cell.cmp(c1.price, c2.price)
    if s > 0:
        p = c2.price
        return SymRound(
            c1, c2, 1, p, win_util(cell, sub, x, y, p), lose_util(cell, sub, y, x, p)
        )
    if s < 0:
        p = c1.price
        return SymRound(
            c1, c2, 2, p, lose_util(cell, sub, x, y, p), win_util(cell, sub, y, x, p)
        )
    p = c1.price
    u1 = sym_avg(win_util(cell, sub, x, y, p), lose_util(cell, sub, x, y, p))
    u2 = sym_avg(win_util(cell, sub, y, x, p), lose_util(cell, sub, y, x, p))
    return SymRound(c1, c2, 0, p, u1, u2)


# --------------------------------------------------------------------------
# table construction


def _simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """Fraction with the smallest denominator strictly inside ``(a, b)``."""
    assert 0 <= a < b
    fl = a.numerator // a.denominator
    if fl + 1 < b:
        return Fraction(fl + 1)
    if a == fl:
        # inside (fl, b) with b <= fl + 1 the simplest point is fl + 1/m
        return fl + Fraction(1, (1 / (b - fl)).__floor__() + 1)
    # reciprocal map preserves simplicity inside the unit interval
    return fl + 1 / _simplest_between(1 / (b - fl), 1 / (a - fl))


def _eval_cell(k: int, sub: Table, r0: Fraction):
    cell = Cell(r0)
    rnd = canonical_round(cell, k, sub, Lin(ZERO, ONE), const(ONE))
    u = rnd.u1
    # money is a*x + c*y with x = r, y = 1
    piece = Piece(u.items, u.money.c1, u.money.c0)
    return cell, piece


def build_table(k: int, sub: Table) -> Table:
    """Sweep the ratio axis and assemble the exact ``k``-level table."""
    lo_r = Fraction(1, 2 * k)
    hi_r = Fraction(2 * k)
    points: dict[Fraction, Piece] = {}
    spans: list[tuple[Fraction, Fraction, Piece]] = []

    def point(r):
        if r not in points:
            _, pc = _eval_cell(k, sub, r)
            points[r] = Piece(pc.items, ZERO, pc.money(r, ONE))

    def span(r):
        cell, pc = _eval_cell(k, sub, r)
        return cell, pc

    end_pieces = []
    for r in (lo_r, hi_r):
        cell, pc = span(r)
        if cell.point or (r == lo_r and cell.lo is not None and cell.lo > 0):
            raise RuntimeError(f"lower end sample {r} does not reach zero")
        if r == hi_r and cell.hi is not None:
            raise RuntimeError(f"upper end sample {r} does not reach infinity")
        end_pieces.append((cell, pc))
    (c_lo, p_lo), (c_hi, p_hi) = end_pieces
    left_edge = c_lo.hi
    right_edge = c_hi.lo
    point(left_edge)
    point(right_edge)

    stack = [(left_edge, right_edge)] if left_edge < right_edge else []
    while stack:
        a, b = stack.pop()
        m = _simplest_between(a, b)
        cell, pc = span(m)
        if cell.point:
            points[m] = Piece(pc.items, ZERO, pc.money(m, ONE))
            stack.append((a, m))
            stack.append((m, b))
            continue
        lo = a if cell.lo is None or cell.lo < a else cell.lo
        hi = b if cell.hi is None or cell.hi > b else cell.hi
        spans.append((lo, hi, pc))
        if lo > a:
            point(lo)
            stack.append((a, lo))
        if hi < b:
            point(hi)
            stack.append((hi, b))

    spans.sort(key=lambda s: s[0])
    bps: list[Fraction] = []
    pts: list[Piece] = []
    pieces: list[Piece] = [p_lo]
    prev_hi = left_edge
    for lo, hi, pc in spans:
        assert lo == prev_hi, (lo, prev_hi)
        bps.append(lo)
        pts.append(points[lo])
        pieces.append(pc)
        prev_hi = hi
    assert prev_hi == right_edge
    bps.append(right_edge)
    pts.append(points[right_edge])
    pieces.append(p_hi)
    return _merge(Table(k, bps, pts, pieces))


def _merge(t: Table) -> Table:
    """Drop breakpoints where the function is the same formula on both sides."""
    bps, pts, pieces = [], [], [t.pieces[0]]
    for b, pt, right in zip(t.bps, t.points, t.pieces[1:]):
        left = pieces[-1]
        if left == right and pt.items == left.items and pt.money(b, ONE) == left.money(b, ONE):
            continue
        bps.append(b)
        pts.append(pt)
        pieces.append(right)
    return Table(t.k, bps, pts, pieces)


_TABLES: list[Table] = [zero_table(), one_table()]
_LOCK = threading.Lock()


def table(k: int) -> Table:
    """The ``k``-level table, built and cached on first use."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k < len(_TABLES):
        return _TABLES[k]
    with _LOCK:
        while len(_TABLES) <= k:
            nxt = len(_TABLES)
            _TABLES.append(build_table(nxt, _TABLES[nxt - 1]))
        return _TABLES[k]
