"""Row-level machinery on ordered Jordan blocks of a single rho.

Blocks are stored in doubled coordinates (A2 = 2A, B2 = 2B >= 0, zeta)
so that every comparison is integer-exact.  A ``Row`` couples a block
with its (l, eta) datum.  Orders are tuples, lowest block first.

The adjacent-exchange transform follows the three-case definition: the
nested same-sign case carries explicit formulas (here ``_s_minus``),
its mirror is inverted by exhaustive preimage search over the finitely
many valid (l, eta) pairs, and the opposite-sign case is a pure sign
twist.  A transform that lands outside the l-bounds certifies that the
datum indexes the zero member: transport to an adjacent admissible
order always succeeds for data of nonzero members.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, NamedTuple, Optional

from .errors import CapacityExceeded


class Blk(NamedTuple):
    A2: int
    B2: int
    z: int


class Row(NamedTuple):
    blk: Blk
    l: int
    eta: int


def width(blk: Blk) -> int:
    """A - B, always a nonnegative integer."""
    return (blk.A2 - blk.B2) // 2


def d_of(blk: Blk) -> int:
    """min(a, b) = A - B + 1."""
    return width(blk) + 1


def l_max(blk: Blk) -> int:
    return d_of(blk) // 2


def a_of(blk: Blk) -> int:
    return (blk.A2 + blk.z * blk.B2) // 2 + 1


def b_of(blk: Blk) -> int:
    return (blk.A2 - blk.z * blk.B2) // 2 + 1


def sgn(n: int) -> int:
    """(-1) ** n."""
    return -1 if n % 2 else 1


def dominates(x: Blk, y: Blk) -> bool:
    """x strictly exceeds y in both coordinates at equal sign."""
    return x.z == y.z and x.A2 > y.A2 and x.B2 > y.B2


def nested(x: Blk, y: Blk) -> bool:
    """Interval [B_x, A_x] contained in [B_y, A_y]."""
    return y.B2 <= x.B2 and x.A2 <= y.A2


def same_interval(x: Blk, y: Blk) -> bool:
    return x.A2 == y.A2 and x.B2 == y.B2


def order_admissible(blocks: tuple[Blk, ...]) -> bool:
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            if dominates(blocks[i], blocks[j]):
                return False
    return True


def shift(blk: Blk, t: int) -> Blk:
    return Blk(blk.A2 + 2 * t, blk.B2 + 2 * t, blk.z)


def row_valid(row: Row) -> bool:
    return 0 <= row.l <= l_max(row.blk) and row.eta in (-1, 1)


# ---------------------------------------------------------------------------
# adjacent exchange
# ---------------------------------------------------------------------------

def _s_minus(inner: Row, outer: Row) -> Optional[tuple[int, int, int, int]]:
    """Nested same-sign exchange, inner block below the outer one.

    Returns the transported values (l_inner', eta_inner', l_outer',
    eta_outer') or None when the result leaves the l-range.
    """
    u = width(inner.blk)
    v = width(outer.blk)
    if outer.eta != sgn(u) * inner.eta:
        l_out = outer.l - 1 - (u - 2 * inner.l)
        eta_in = sgn(v) * inner.eta
        eta_out = sgn(v) * eta_in
    elif 2 * (outer.l - inner.l) < v - 2 * u + 2 * inner.l:
        l_out = outer.l + 1 + (u - 2 * inner.l)
        eta_in = sgn(v) * inner.eta
        eta_out = sgn(v + 1) * eta_in
    else:
        l_out = 2 * inner.l - outer.l + v - u
        eta_in = sgn(v) * inner.eta
        eta_out = sgn(v) * eta_in
    if not 0 <= l_out <= l_max(outer.blk):
        return None
    return (inner.l, eta_in, l_out, eta_out)


def _s_plus(outer: Row, inner: Row) -> Optional[tuple[Row, Row]]:
    """Inverse of the nested exchange: outer currently sits below inner.

    Searches the finitely many valid preimages; the lexicographically
    smallest match is used when several exist.
    """
    matches = []
    for l_in in range(l_max(inner.blk) + 1):
        for eta_in in (1, -1):
            for l_out in range(l_max(outer.blk) + 1):
                for eta_out in (1, -1):
                    cand_inner = Row(inner.blk, l_in, eta_in)
                    cand_outer = Row(outer.blk, l_out, eta_out)
                    out = _s_minus(cand_inner, cand_outer)
                    if out is None:
                        continue
                    li, ei, lo, eo = out
                    if (lo, eo) == (outer.l, outer.eta) and (li, ei) == (inner.l, inner.eta):
                        matches.append((cand_inner, cand_outer))
    if not matches:
        return None
    matches.sort(key=lambda pair: (pair[0].l, pair[0].eta, pair[1].l, pair[1].eta))
    return matches[0]


def exchange(rows: tuple[Row, ...], k: int) -> tuple[str, Optional[tuple[Row, ...]]]:
    """Swap rows k and k+1, transporting (l, eta).

    Returns ('noop', rows) when the swapped order is inadmissible (the
    exchange is the identity by definition), ('dead', None) when the
    transport is impossible (the datum indexes the zero member), or
    ('ok', new_rows).
    """
    x, y = rows[k], rows[k + 1]
    if dominates(y.blk, x.blk):
        return ("noop", rows)
    if x.blk.z != y.blk.z:
        new_x = Row(x.blk, x.l, sgn(d_of(y.blk)) * x.eta)
        new_y = Row(y.blk, y.l, sgn(d_of(x.blk)) * y.eta)
        out = rows[:k] + (new_y, new_x) + rows[k + 2:]
        return ("ok", out)
    if nested(x.blk, y.blk):
        vals = _s_minus(x, y)
        if vals is None:
            return ("dead", None)
        l_in, eta_in, l_out, eta_out = vals
        out = rows[:k] + (Row(y.blk, l_out, eta_out), Row(x.blk, l_in, eta_in)) + rows[k + 2:]
        return ("ok", out)
    if nested(y.blk, x.blk):
        pre = _s_plus(x, y)
        if pre is None:
            return ("dead", None)
        new_inner, new_outer = pre
        out = rows[:k] + (new_inner, new_outer) + rows[k + 2:]
        return ("ok", out)
    raise AssertionError(
        f"equal-sign non-nested adjacent blocks in an admissible order: {x.blk}, {y.blk}")


def move_row(rows: tuple[Row, ...], src: int, dst: int) -> tuple[str, Optional[tuple[Row, ...]]]:
    """Bubble the row at ``src`` to position ``dst`` by adjacent exchanges."""
    cur = src
    while cur != dst:
        k = cur - 1 if dst < cur else cur
        status, rows = exchange(rows, k)
        if status == "dead":
            return ("dead", None)
        if status == "noop":
            return ("noop", rows)
        cur += -1 if dst < cur else 1
    return ("ok", rows)


# ---------------------------------------------------------------------------
# far away / separated / partition
# ---------------------------------------------------------------------------

def far_bound_x2(J: tuple[Blk, ...], jord: tuple[Blk, ...], r: int) -> int:
    """Doubled value of 2^{r|J|} (sum_J (A' + |J|) + sum_jord (A' - B' + 1))."""
    s1 = sum(b.A2 + 2 * len(J) for b in J)
    s2 = sum(b.A2 - b.B2 + 2 for b in jord)
    return (2 ** (r * len(J))) * (s1 + s2)


def is_far(blk: Blk, J: tuple[Blk, ...], jord: tuple[Blk, ...], r: int) -> bool:
    return blk.B2 > far_bound_x2(J, jord, r)


def min_far_shift(moved: tuple[Blk, ...], J: tuple[Blk, ...],
                  jord: tuple[Blk, ...], r: int) -> int:
    """Least integer T >= 0 with every moved block far of level r over J.

    The jord sum only involves widths, so it is shift-invariant and the
    pre-shift multiset can be passed.
    """
    bound = far_bound_x2(J, jord, r)
    t = 0
    for blk in moved:
        need = (bound - blk.B2) // 2 + 1
        t = max(t, need)
    return max(t, 0)


def minimal_dominating(order: tuple[Blk, ...]) -> tuple[Blk, ...]:
    """Pointwise-least dominating set with disjoint intervals.

    Processes the order bottom-up, giving each block the least
    nonnegative integer shift that clears the previous top.
    """
    out: list[Blk] = []
    prev_top: Optional[int] = None
    for blk in order:
        if prev_top is None:
            t = 0
        else:
            t = max(0, (prev_top - blk.B2) // 2 + 1)
        shifted = shift(blk, t)
        out.append(shifted)
        prev_top = shifted.A2
    return tuple(out)


_ORDER_CAP = 100_000


@lru_cache(maxsize=250_000)
def admissible_orders(blocks: tuple[Blk, ...]) -> tuple[tuple[Blk, ...], ...]:
    """All distinct admissible total orders of a block multiset."""
    results: list[tuple[Blk, ...]] = []

    def rec(remaining: tuple[Blk, ...], prefix: tuple[Blk, ...]):
        if len(results) > _ORDER_CAP:
            raise CapacityExceeded("too many admissible orders to enumerate")
        if not remaining:
            results.append(prefix)
            return
        seen = set()
        for idx, blk in enumerate(remaining):
            if blk in seen:
                continue
            seen.add(blk)
            rest = remaining[:idx] + remaining[idx + 1:]
            # placing blk now is fine unless it dominates something still unplaced
            if any(dominates(blk, other) for other in rest):
                continue
            rec(rest, prefix + (blk,))

    rec(tuple(sorted(blocks)), ())
    return tuple(results)


@lru_cache(maxsize=500_000)
def is_separated(J: tuple[Blk, ...], Jc: tuple[Blk, ...]) -> bool:
    """Separation of J from its complement, with dominating-set margins."""
    if len(J) > 8:
        raise CapacityExceeded("separation check capped at |J| = 8")
    for j in J:
        for c in Jc:
            if not (j.B2 > c.A2 or c.B2 > j.A2):
                return False
    # (b) every admissible order of J admits a dominating witness; the
    # minimal dominating set is pointwise least, so it is the witness.
    for sigma in admissible_orders(tuple(sorted(J))):
        dom = minimal_dominating(sigma)
        for orig, moved in zip(sigma, dom):
            for c in Jc:
                if c.B2 > orig.A2 and not c.B2 > moved.A2:
                    return False
    # (c) some admissible order of the complement works.
    if not Jc:
        return True
    for sigma in admissible_orders(tuple(sorted(Jc))):
        dom = minimal_dominating(sigma)
        ok = True
        for orig, moved in zip(sigma, dom):
            for j in J:
                if j.B2 > orig.A2 and not j.B2 > moved.A2:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


@lru_cache(maxsize=500_000)
def greedy_partition(blocks: tuple[Blk, ...], start: int = 0):
    """Greedy top-down division of blocks[start:] into separated parts.

    Pairs of adjacent equal-sign blocks are tried before singletons.
    Returns a tuple of ('pair', lo, hi) / ('single', i) entries or None.
    Separation is always measured against the full multiset.
    """
    parts = []
    k = len(blocks) - 1
    while k >= start:
        placed = False
        if k - 1 >= start and blocks[k].z == blocks[k - 1].z:
            J = tuple(sorted((blocks[k - 1], blocks[k])))
            Jc = tuple(sorted(blocks[:k - 1] + blocks[k + 1:]))
            if is_separated(J, Jc):
                parts.append(("pair", k - 1, k))
                k -= 2
                placed = True
        if not placed:
            J = (blocks[k],)
            Jc = tuple(sorted(blocks[:k] + blocks[k + 1:]))
            if is_separated(J, Jc):
                parts.append(("single", k))
                k -= 1
                placed = True
        if not placed:
            return None
    return tuple(parts)


def pair_passes(upper: Row, lower: Row) -> bool:
    """The two-block nonvanishing inequalities for one separated pair.

    In the matching-sign branch both inequalities are weak; the
    opposite-sign branch is strict (weakening it would let row exchange
    of repeated blocks transport valid data out of range).
    """
    u_lo = width(lower.blk)
    if upper.eta == sgn(u_lo) * lower.eta:
        return (upper.blk.A2 - 2 * upper.l >= lower.blk.A2 - 2 * lower.l
                and upper.blk.B2 + 2 * upper.l >= lower.blk.B2 + 2 * lower.l)
    return upper.blk.B2 + 2 * upper.l > lower.blk.A2 - 2 * lower.l


def iter_valid_rows(blk: Blk) -> Iterator[Row]:
    for l in range(l_max(blk) + 1):
        for eta in (1, -1):
            yield Row(blk, l, eta)
