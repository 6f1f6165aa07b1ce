"""Exact zero/nonzero decision for Moeglin data.

The driver factors over the supercuspidal support: blocks of distinct
rho never interact.  Per rho it keeps an ordered row list and reduces:
far-away, separated suffixes are left alone; the remaining prefix is
attacked with pulls (nested or equal pairs shifted out), expansion, and
sign changes, until a greedy partition into separated singletons and
same-sign pairs decides the verdict by closed-form inequalities.

Every reduction is a verdict equivalence, so the chosen shift sizes are
free within their windows; the driver takes the least shift that makes
the moved blocks far of level 2 from what stays behind.  An adjacent
exchange whose transported datum leaves the l-range certifies a zero
member and short-circuits the branch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .errors import (CapacityExceeded, DepthBudgetExceeded, InvalidExchange,
                     PreconditionViolated, TExceedsTn, ValidationError)
from .halfint import HalfInt
from .moeglin import MoeglinDatum, OrderedGPParameter, _from_blk, _to_blk
from .params import (ArthurParameter, GroupContext, GroupKind, JordanBlock,
                     Summand, even_orthogonal, symplectic)
from . import rows as R


class Outcome(enum.Enum):
    ZERO = "Zero"
    NONZERO = "Nonzero"


@dataclass(frozen=True)
class TraceEvent:
    step: str
    rho: str
    blocks: tuple
    detail: str


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    trace: tuple[TraceEvent, ...] = ()

    @property
    def nonzero(self) -> bool:
        return self.outcome is Outcome.NONZERO


DEFAULT_BUDGET = 10_000

_VERDICT_MEMO: dict = {}


def clear_caches() -> None:
    _VERDICT_MEMO.clear()
    R.admissible_orders.cache_clear()
    R.is_separated.cache_clear()
    R.greedy_partition.cache_clear()


class _Ctx:
    __slots__ = ("rho", "budget", "trace", "slack", "memo")

    def __init__(self, rho: str, budget: int, trace: Optional[list], slack: int):
        self.rho = rho
        self.budget = budget
        self.trace = trace
        self.slack = slack
        self.memo = trace is None

    def note(self, step: str, rows: tuple[R.Row, ...], detail: str):
        self.budget -= 1
        if self.budget < 0:
            raise DepthBudgetExceeded(
                f"driver exceeded its event budget on rho = {self.rho}")
        if self.trace is not None:
            snapshot = tuple((r.blk.A2, r.blk.B2, r.blk.z, r.l, r.eta) for r in rows)
            self.trace.append(TraceEvent(step, self.rho, snapshot, detail))


# ---------------------------------------------------------------------------
# public predicates
# ---------------------------------------------------------------------------

def far_away(block: JordanBlock, J, r: int, jord_rho) -> bool:
    """Far away of level r from J, with the width sum over jord_rho."""
    return R.is_far(_to_blk(block),
                    tuple(_to_blk(b) for b in J),
                    tuple(_to_blk(b) for b in jord_rho), r)


def is_separated(J, Jc) -> bool:
    rhos = {b.rho for b in J} | {b.rho for b in Jc}
    if len(rhos) > 1:
        raise PreconditionViolated("separation compares blocks of a single rho")
    return R.is_separated(tuple(sorted(_to_blk(b) for b in J)),
                          tuple(sorted(_to_blk(b) for b in Jc)))


def is_generalized_basic(base: OrderedGPParameter):
    """Greedy pairing per rho, or None when some rho has no partition."""
    pairing = {}
    for rho in base.rho_names():
        blocks = tuple(_to_blk(b) for b in base.blocks(rho))
        parts = R.greedy_partition(blocks, 0)
        if parts is None:
            return None
        pairing[rho] = parts
    return pairing


def basic_nonvanishing(datum: MoeglinDatum, pairing) -> Verdict:
    """Closed-form verdict for a datum in the generalized basic case."""
    trace: list[TraceEvent] = []
    ok = True
    for rho, parts in sorted(pairing.items()):
        rws = datum.rows(rho)
        for part in parts:
            if part[0] != "pair":
                continue
            lo, hi = part[1], part[2]
            passed = R.pair_passes(rws[hi], rws[lo])
            trace.append(TraceEvent(
                "BasicCheck", rho,
                ((rws[lo].blk, rws[lo].l, rws[lo].eta),
                 (rws[hi].blk, rws[hi].l, rws[hi].eta)),
                f"pair ({lo},{hi}) -> {'pass' if passed else 'fail'}"))
            ok = ok and passed
    return Verdict(Outcome.NONZERO if ok else Outcome.ZERO, tuple(trace))


# ---------------------------------------------------------------------------
# driver internals
# ---------------------------------------------------------------------------

def _active_len(rows: tuple[R.Row, ...]) -> int:
    """Least prefix length whose complement is a far, good-shape suffix."""
    blocks = tuple(r.blk for r in rows)
    for k in range(1, len(rows)):
        prefix = blocks[:k]
        if all(R.is_far(b, prefix, blocks, 2) for b in blocks[k:]) \
                and R.greedy_partition(blocks, k) is not None:
            return k
    return len(rows)


def _verdict(rows: tuple[R.Row, ...], ctx: _Ctx) -> bool:
    if not rows:
        return True
    if ctx.memo:
        key = (rows, ctx.slack)
        hit = _VERDICT_MEMO.get(key)
        if hit is not None:
            return hit
    out = _verdict_inner(rows, ctx)
    if ctx.memo:
        _VERDICT_MEMO[(rows, ctx.slack)] = out
    return out


def _verdict_inner(rows: tuple[R.Row, ...], ctx: _Ctx) -> bool:
    blocks = tuple(r.blk for r in rows)
    parts = R.greedy_partition(blocks, 0)
    if parts is not None:
        ok = True
        for part in parts:
            if part[0] == "pair" and not R.pair_passes(rows[part[2]], rows[part[1]]):
                ok = False
        ctx.note("BasicCheck", rows, f"parts={parts} -> {'NZ' if ok else 'Z'}")
        return ok

    n = _active_len(rows)
    idx = max(range(n), key=lambda i: (rows[i].blk.A2, i))
    X = rows[idx]
    nested_strict = [
        i for i in range(n)
        if i != idx and rows[i].blk.z == X.blk.z
        and R.nested(rows[i].blk, X.blk)
        and not R.same_interval(rows[i].blk, X.blk)]
    if nested_strict:
        partner = max(nested_strict, key=lambda i: (rows[i].blk.A2, i))
        return _pull_step(rows, n, idx, partner, ctx, equal=False)
    equal_partners = [
        i for i in range(n)
        if i != idx and rows[i].blk.z == X.blk.z
        and R.same_interval(rows[i].blk, X.blk)]
    if equal_partners:
        return _pull_step(rows, n, idx, equal_partners[-1], ctx, equal=True)
    return _expand_step(rows, n, idx, ctx)


def _rearrange(rows, n, idx, partner, ctx):
    """Bring the chosen block to position n-1 and its partner to n-2."""
    status, rows = R.move_row(rows, idx, n - 1)
    if status == "dead":
        ctx.note("RowExchange", (), "transport impossible -> Zero")
        return None
    assert status == "ok"
    if partner > idx:
        partner -= 1
    status, rows = R.move_row(rows, partner, n - 2)
    if status == "dead":
        ctx.note("RowExchange", (), "transport impossible -> Zero")
        return None
    assert status == "ok"
    return rows


def _require(cond: bool, what: str):
    if not cond:
        raise DepthBudgetExceeded(f"shift window violated during {what}")


def _pull_step(rows, n, idx, partner, ctx, *, equal: bool) -> bool:
    arranged = _rearrange(rows, n, idx, partner, ctx)
    if arranged is None:
        return False
    X, P = arranged[n - 1], arranged[n - 2]
    rest, suffix = arranged[:n - 2], arranged[n:]
    all_blocks = tuple(r.blk for r in arranged)
    rest_blocks = tuple(r.blk for r in rest)
    label = "PullEqual" if equal else "PullUnequal"

    # clause 1: move the pair out together, keeping its shape
    t1 = R.min_far_shift((P.blk, X.blk), rest_blocks, all_blocks, 2) + ctx.slack
    p1 = R.Row(R.shift(P.blk, t1), P.l, P.eta)
    x1 = R.Row(R.shift(X.blk, t1), X.l, X.eta)
    jord1 = tuple(r.blk for r in rest) + (p1.blk, x1.blk) + tuple(r.blk for r in suffix)
    for s in suffix:
        _require(R.is_far(s.blk, (x1.blk,), jord1, 1), "pull clause 1")
    desc1 = rest + (p1, x1) + suffix
    ctx.note(f"{label}1", (P, X), f"T={t1}")
    if not _verdict(desc1, ctx):
        return False

    # clause 2: move only the top block out
    lower_blocks = tuple(r.blk for r in arranged[:n - 1])
    t2 = R.min_far_shift((X.blk,), lower_blocks, all_blocks, 2) + ctx.slack
    x2 = R.Row(R.shift(X.blk, t2), X.l, X.eta)
    for s in suffix:
        _require(s.blk.B2 > x2.blk.A2, "pull clause 2")
    desc2 = arranged[:n - 1] + (x2,) + suffix
    ctx.note(f"{label}2", (P, X), f"T={t2}")
    if not _verdict(desc2, ctx):
        return False

    if equal:
        return True

    # clause 3: swap the pair (transporting the datum) and move the inner
    # block out on its own
    status, swapped = R.exchange(arranged, n - 2)
    if status == "dead":
        ctx.note("RowExchange", (P, X), "clause 3 transport impossible -> Zero")
        return False
    assert status == "ok"
    Xs, Ps = swapped[n - 2], swapped[n - 1]
    keep_blocks = tuple(r.blk for r in swapped[:n - 1])
    t3 = R.min_far_shift((Ps.blk,), keep_blocks, all_blocks, 2) + ctx.slack
    p3 = R.Row(R.shift(Ps.blk, t3), Ps.l, Ps.eta)
    for s in suffix:
        _require(s.blk.B2 > p3.blk.A2, "pull clause 3")
    desc3 = swapped[:n - 1] + (p3,) + suffix
    ctx.note("PullUnequal3", (Ps, Xs), f"T={t3}")
    return _verdict(desc3, ctx)


def _change_sign_row(row: R.Row) -> R.Row:
    blk = row.blk
    if blk.B2 == 0:
        return R.Row(R.Blk(blk.A2, 0, -blk.z), row.l, row.eta)
    assert blk.B2 == 1
    l, eta = row.l, row.eta
    if 4 * l == blk.A2 + 1:
        eta = -1
    if eta == 1:
        return R.Row(R.Blk(blk.A2 + 2, 1, -blk.z), l + 1, -1)
    return R.Row(R.Blk(blk.A2 + 2, 1, -blk.z), l, 1)


def _expand_step(rows, n, idx, ctx) -> bool:
    status, arranged = R.move_row(rows, idx, n - 1)
    if status == "dead":
        ctx.note("RowExchange", (), "transport impossible -> Zero")
        return False
    assert status == "ok"
    X = arranged[n - 1]
    lower = arranged[:n - 1]
    z_eq = [r for r in lower if r.blk.z == X.blk.z]
    assert all(r.blk.B2 < X.blk.B2 for r in z_eq)
    if z_eq:
        t = (X.blk.B2 - max(r.blk.B2 for r in z_eq)) // 2
    else:
        t = X.blk.B2 // 2
    if t >= 1:
        new_x = R.Row(R.Blk(X.blk.A2 + 2 * t, X.blk.B2 - 2 * t, X.blk.z),
                      X.l + t, X.eta)
        assert R.row_valid(new_x)
        ctx.note("Expand", (X,), f"t={t}")
        return _verdict(arranged[:n - 1] + (new_x,) + arranged[n:], ctx)

    # B is already 0 or 1/2: walk the block to the front and flip its sign
    assert all(r.blk.z != X.blk.z for r in lower)
    status, fronted = R.move_row(arranged, n - 1, 0)
    assert status == "ok", "opposite-sign exchanges are always valid"
    flipped = _change_sign_row(fronted[0])
    assert R.row_valid(flipped)
    ctx.note("ChangeSign", (fronted[0],), f"-> {flipped.blk}")
    return _verdict((flipped,) + fronted[1:], ctx)


# ---------------------------------------------------------------------------
# top level
# ---------------------------------------------------------------------------

def nonvanishing(datum: MoeglinDatum, *, explain: bool = False,
                 shift_slack: int = 0, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Zero-or-nonzero verdict with a replayable trace.

    The verdict is the conjunction over the rho components; each runs
    with its own event budget.
    """
    trace: list[TraceEvent] = []
    nonzero = True
    for rho in datum.base.rho_names():
        ctx = _Ctx(rho, budget, trace if explain else None, shift_slack)
        if not _verdict(datum.rows(rho), ctx):
            nonzero = False
            if not explain:
                break
    return Verdict(Outcome.NONZERO if nonzero else Outcome.ZERO, tuple(trace))


def replay(datum: MoeglinDatum, verdict: Verdict, **kwargs) -> bool:
    """Re-run the driver and compare outcome and trace (determinism hook)."""
    again = nonvanishing(datum, explain=bool(verdict.trace), **kwargs)
    return again.outcome == verdict.outcome and again.trace == verdict.trace


# ---------------------------------------------------------------------------
# the reduction moves as standalone operations
# ---------------------------------------------------------------------------

def _group_for(param: ArthurParameter, summands) -> GroupContext:
    dim = sum(param.label(s.rho).dim * s.a * s.b for s in summands)
    if param.group.kind is GroupKind.SYMPLECTIC and dim % 2 == 1:
        return symplectic(dim)
    eps = param.group.sign_target
    return even_orthogonal(dim, eps)


def _datum_from_rows(datum: MoeglinDatum, rho: str,
                     new_rows: tuple[R.Row, ...]) -> MoeglinDatum:
    """Rebuild a full datum after replacing one rho's rows.

    The reductions change block sizes, so the ambient parameter (and its
    group) is recomputed; the sign product is invariant under every move.
    """
    keep = [s for s in datum.base.param.summands if s.rho != rho]
    blocks = tuple(_from_blk(rho, r.blk) for r in new_rows)
    new_summands = tuple(keep) + tuple(b.summand() for b in blocks)
    group = _group_for(datum.base.param, new_summands)
    param = ArthurParameter(group, new_summands, datum.base.param.labels)
    order = tuple((name, blocks if name == rho else blks)
                  for name, blks in datum.base.order)
    base = OrderedGPParameter(param, order)
    l = tuple((name, tuple(r.l for r in new_rows) if name == rho else vals)
              for name, vals in datum.l)
    eta = tuple((name, tuple(r.eta for r in new_rows) if name == rho else vals)
                for name, vals in datum.eta)
    return MoeglinDatum(base, l, eta)


def _pull_common(datum: MoeglinDatum, rho: str, n: int, *, equal: bool):
    rws = datum.rows(rho)
    if not 1 <= n < len(rws) + 0 or n < 1:
        raise PreconditionViolated("need blocks n and n-1")
    if n >= len(rws):
        raise PreconditionViolated("index n out of range")
    X, P = rws[n], rws[n - 1]
    if X.blk.z != P.blk.z:
        raise PreconditionViolated("the pair must share its sign")
    if equal:
        if not R.same_interval(P.blk, X.blk):
            raise PreconditionViolated("blocks must carry equal intervals")
    else:
        if not (R.nested(P.blk, X.blk) and not R.same_interval(P.blk, X.blk)):
            raise PreconditionViolated("block n-1 must nest strictly inside block n")
    blocks = tuple(r.blk for r in rws)
    prefix = blocks[:n + 1]
    for s in rws[n + 1:]:
        if not R.is_far(s.blk, prefix, blocks, 1):
            raise PreconditionViolated("blocks above the pair must be far away")
    return rws


def pull_unequal(datum: MoeglinDatum, rho: str, n: int):
    """The three pulled descendants of a strictly nested pair at (n-1, n)."""
    rws = _pull_common(datum, rho, n, equal=False)
    X, P = rws[n], rws[n - 1]
    rest = rws[:n - 1]
    suffix = rws[n + 1:]
    all_blocks = tuple(r.blk for r in rws)
    rest_blocks = tuple(r.blk for r in rest)

    t1 = R.min_far_shift((P.blk, X.blk), rest_blocks, all_blocks, 2)
    d1 = rest + (R.Row(R.shift(P.blk, t1), P.l, P.eta),
                 R.Row(R.shift(X.blk, t1), X.l, X.eta)) + suffix
    t2 = R.min_far_shift((X.blk,), tuple(r.blk for r in rws[:n]), all_blocks, 2)
    d2 = rws[:n] + (R.Row(R.shift(X.blk, t2), X.l, X.eta),) + suffix
    status, swapped = R.exchange(rws, n - 1)
    if status == "dead":
        raise InvalidExchange("clause 3 transport is impossible (zero member)")
    assert status == "ok"
    Ps = swapped[n]
    t3 = R.min_far_shift((Ps.blk,), tuple(r.blk for r in swapped[:n]), all_blocks, 2)
    d3 = swapped[:n] + (R.Row(R.shift(Ps.blk, t3), Ps.l, Ps.eta),) + suffix
    return (_datum_from_rows(datum, rho, d1),
            _datum_from_rows(datum, rho, d2),
            _datum_from_rows(datum, rho, d3))


def pull_equal(datum: MoeglinDatum, rho: str, n: int):
    """The two pulled descendants of an equal pair at (n-1, n)."""
    rws = _pull_common(datum, rho, n, equal=True)
    X, P = rws[n], rws[n - 1]
    rest = rws[:n - 1]
    suffix = rws[n + 1:]
    all_blocks = tuple(r.blk for r in rws)
    t1 = R.min_far_shift((P.blk, X.blk), tuple(r.blk for r in rest), all_blocks, 2)
    d1 = rest + (R.Row(R.shift(P.blk, t1), P.l, P.eta),
                 R.Row(R.shift(X.blk, t1), X.l, X.eta)) + suffix
    t2 = R.min_far_shift((X.blk,), tuple(r.blk for r in rws[:n]), all_blocks, 2)
    d2 = rws[:n] + (R.Row(R.shift(X.blk, t2), X.l, X.eta),) + suffix
    return (_datum_from_rows(datum, rho, d1), _datum_from_rows(datum, rho, d2))


def expand_t_max(datum: MoeglinDatum, rho: str, n: int) -> int:
    """The largest admissible expansion amount for block n."""
    rws = datum.rows(rho)
    X = rws[n]
    z_eq = [r for i, r in enumerate(rws[:n]) if r.blk.z == X.blk.z]
    candidates = [r.blk.B2 for r in z_eq if r.blk.B2 <= X.blk.B2]
    if candidates:
        return (X.blk.B2 - max(candidates)) // 2
    return X.blk.B2 // 2


def expand(datum: MoeglinDatum, rho: str, n: int, t: int) -> MoeglinDatum:
    """Replace block n by (A+t, B-t) with l increased by t (verdict-equivalent)."""
    rws = datum.rows(rho)
    if not 0 <= n < len(rws):
        raise PreconditionViolated("no such block")
    X = rws[n]
    for i, r in enumerate(rws[:n]):
        if r.blk.A2 > X.blk.A2:
            raise PreconditionViolated("lower blocks must not exceed the expanded A")
        if r.blk.z == X.blk.z and R.nested(r.blk, X.blk):
            raise PreconditionViolated("no nested same-sign block may sit below")
    blocks = tuple(r.blk for r in rws)
    for s in rws[n + 1:]:
        if not R.is_far(s.blk, blocks[:n + 1], blocks, 2):
            raise PreconditionViolated("blocks above must be far away of level 2")
    t_n = expand_t_max(datum, rho, n)
    if not 1 <= t <= t_n:
        raise TExceedsTn(f"t must lie in 1..{t_n}")
    new_x = R.Row(R.Blk(X.blk.A2 + 2 * t, X.blk.B2 - 2 * t, X.blk.z), X.l + t, X.eta)
    return _datum_from_rows(datum, rho, rws[:n] + (new_x,) + rws[n + 1:])


def change_sign(datum: MoeglinDatum, rho: str) -> MoeglinDatum:
    """Flip the sign of the first block (B = 0 or 1/2); verdict-equivalent."""
    rws = datum.rows(rho)
    if not rws:
        raise PreconditionViolated("empty rho component")
    X = rws[0]
    if X.blk.B2 not in (0, 1):
        raise PreconditionViolated("change sign needs B = 0 or 1/2 up front")
    blocks = tuple(r.blk for r in rws)
    for i, r in enumerate(rws[1:], start=1):
        if R.is_far(r.blk, blocks[:i], blocks, 1):
            break
        if r.blk.A2 > X.blk.A2 or r.blk.z == X.blk.z:
            raise PreconditionViolated(
                "middle blocks must have opposite sign and A at most A_1")
    return _datum_from_rows(datum, rho, (_change_sign_row(X),) + rws[1:])
