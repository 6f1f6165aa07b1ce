"""Lift bookkeeping: build psi_alpha, walk the chain downward, compute d.

The lift of a symplectic-side datum twists every rho by the quadratic
character swap (chi_V <-> chi_W), adds the block chi_W (x) S_1 (x)
S_alpha on top with l = 0 and the sign solved from the tower, and then
descends two at a time.  Only two things can happen on the way down: a
tie (an existing block shares the added block's new B, forcing a row
exchange below it) or the stage verdict flips to zero.  An impossible
exchange certifies the zero verdict at that stage.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import (AlphaTooSmall, InvalidExchange, PairMismatch,
                     PreconditionViolated, StartNotNonzero, ValidationError)
from .moeglin import MoeglinDatum, OrderedGPParameter, _to_blk
from .nonvanishing import Outcome, Verdict, _datum_from_rows, nonvanishing
from .operators import OperatorDescriptor, SBlk, enumerate_raising
from .params import (ArthurParameter, GroupKind, JordanBlock,
                     SupercuspidalLabel, Summand, even_orthogonal)
from . import rows as R

ADDED_RHO = "chi_W"


def _twist_name(name: str) -> str:
    if name == "chi_V":
        return "chi_W"
    if name == "chi_W":
        return "chi_V"
    return name[3:] if name.startswith("tw*") else "tw*" + name


def _twist_label(lab: SupercuspidalLabel) -> SupercuspidalLabel:
    return SupercuspidalLabel(
        _twist_name(lab.name), lab.dim, lab.duality,
        None if lab.dual_name is None else _twist_name(lab.dual_name))


def build_psi_alpha(param: ArthurParameter, alpha: int,
                    epsilon: int = 1) -> ArthurParameter:
    """(chi_W chi_V^{-1} tensor psi) plus chi_W (x) S_1 (x) S_alpha."""
    if alpha < 1 or alpha % 2 == 0:
        raise PreconditionViolated("alpha must be a positive odd integer")
    if param.group.kind is not GroupKind.SYMPLECTIC:
        raise PreconditionViolated("lifting starts from a symplectic-side parameter")
    labels = tuple({_twist_label(lab) for lab in param.labels}
                   | {lab for lab in param.labels if lab.name in ("chi_V", "chi_W")})
    summands = [Summand(_twist_name(s.rho), s.x, s.a, s.b) for s in param.summands]
    summands.append(Summand(ADDED_RHO, Fraction(0), 1, alpha))
    group = even_orthogonal(param.group.dual_dim + alpha, epsilon)
    return ArthurParameter(group, tuple(summands), tuple(labels))


def stabilization_alpha(param: ArthurParameter) -> int:
    """Least odd alpha whose added block is far of level 2 from its rho-part."""
    companions = tuple(_to_blk(JordanBlock.from_ab(ADDED_RHO, s.a, s.b))
                       for s in param.summands if _twist_name(s.rho) == ADDED_RHO)
    added_width = R.Blk(0, 0, 1)  # only its width (= 1) enters the bound
    bound = R.far_bound_x2(companions, companions + (added_width,), 2)
    alpha = bound + 2
    if alpha % 2 == 0:
        alpha += 1
    return max(alpha, 3)


def interaction_alpha(param: ArthurParameter) -> int:
    """Conservative stage below which the added block can interact.

    Above it there are no ties and the added block stays a separated
    singleton, so the verdict is pinned by the endpoint checks.
    """
    companions = [_to_blk(JordanBlock.from_ab(ADDED_RHO, s.a, s.b))
                  for s in param.summands if _twist_name(s.rho) == ADDED_RHO]
    if not companions:
        return 3
    max_tie = max(b.B2 for b in companions) + 1
    stack = max(b.A2 for b in companions) + sum(b.A2 - b.B2 + 2 for b in companions)
    alpha = max(max_tie + 2, stack + 2 * len(companions) + 7, 3)
    if alpha % 2 == 0:
        alpha += 1
    return alpha


@dataclass(frozen=True)
class LiftedDatum:
    datum: MoeglinDatum
    alpha: int
    tower_epsilon: int
    added_pos: int

    def added_row(self) -> R.Row:
        return self.datum.rows(ADDED_RHO)[self.added_pos]


def _lift_at(datum: MoeglinDatum, alpha: int, tower_epsilon: int) -> LiftedDatum:
    """The recipe datum at a stage with no ties at or above it."""
    from .moeglin import sign_product
    sp_param = datum.base.param
    lifted_param = build_psi_alpha(sp_param, alpha, tower_epsilon)
    eta_added = tower_epsilon * sign_product(datum)
    added_block = JordanBlock.from_ab(ADDED_RHO, 1, alpha)

    order: dict[str, tuple[JordanBlock, ...]] = {}
    ls: dict[str, tuple[int, ...]] = {}
    etas: dict[str, tuple[int, ...]] = {}
    for rho in datum.base.rho_names():
        tw = _twist_name(rho)
        blocks = tuple(JordanBlock(tw, b.A, b.B, b.zeta)
                       for b in datum.base.blocks(rho))
        order[tw] = blocks
        ls[tw] = dict(datum.l)[rho]
        etas[tw] = dict(datum.eta)[rho]
    order.setdefault(ADDED_RHO, ())
    ls.setdefault(ADDED_RHO, ())
    etas.setdefault(ADDED_RHO, ())
    order[ADDED_RHO] = order[ADDED_RHO] + (added_block,)
    ls[ADDED_RHO] = ls[ADDED_RHO] + (0,)
    etas[ADDED_RHO] = etas[ADDED_RHO] + (eta_added,)

    base = OrderedGPParameter(
        lifted_param, tuple(sorted(order.items())))
    lifted = MoeglinDatum(base,
                          tuple(sorted(ls.items())),
                          tuple(sorted(etas.items())))
    return LiftedDatum(lifted, alpha, tower_epsilon,
                       len(order[ADDED_RHO]) - 1)


def initial_lift(datum: MoeglinDatum, alpha: int, tower_epsilon: int) -> LiftedDatum:
    """Lift at a stage above the stabilization bound."""
    bound = stabilization_alpha(datum.base.param)
    if alpha < bound or alpha % 2 == 0:
        raise AlphaTooSmall(f"alpha must be an odd integer >= {bound}")
    if tower_epsilon not in (-1, 1):
        raise ValidationError("tower epsilon must be +1 or -1")
    return _lift_at(datum, alpha, tower_epsilon)


def shift_down(ld: LiftedDatum) -> LiftedDatum:
    """Replace the added block S_1 (x) S_alpha by S_1 (x) S_{alpha-2}.

    When an existing block of the same rho shares the new B, the added
    block is exchanged below all such blocks; the exchange transforms
    (l, eta) and may be impossible, which raises InvalidExchange (the
    new stage's member is zero).
    """
    if ld.alpha < 3:
        raise PreconditionViolated("cannot shift below alpha = 1")
    new_alpha = ld.alpha - 2
    rws = ld.datum.rows(ADDED_RHO)
    pos = ld.added_pos
    added = rws[pos]
    new_b2 = new_alpha - 1
    z = -1 if new_alpha > 1 else 1
    new_added = R.Row(R.Blk(new_b2, new_b2, z), added.l, added.eta)
    rws = rws[:pos] + (new_added,) + rws[pos + 1:]
    ties = [q for q in range(pos) if rws[q].blk.B2 == new_b2]
    if ties:
        dest = min(ties)
        status, rws = R.move_row(rws, pos, dest)
        if status == "dead":
            raise InvalidExchange(
                f"the added block cannot pass its ties at alpha = {new_alpha}")
        assert status == "ok"
        pos = dest
    datum = _datum_from_rows(ld.datum, ADDED_RHO, rws)
    return LiftedDatum(datum, new_alpha, ld.tower_epsilon, pos)


# ---------------------------------------------------------------------------
# d and the chain report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainReport:
    d: int
    alpha_start: int
    plateau_top: Optional[int]   # verdicts Nonzero for scan_top < alpha <= plateau_top
    scan_top: int
    verdicts: tuple[tuple[int, str], ...]  # (alpha, "Zero"/"Nonzero"), descending
    anomalies: tuple[int, ...]   # alphas where Nonzero sits below a Zero

    def verdict_at(self, alpha: int) -> str:
        if alpha > self.scan_top:
            return "Nonzero"
        for a, v in self.verdicts:
            if a == alpha:
                return v
        raise KeyError(alpha)


def compute_d(datum: MoeglinDatum, tower_epsilon: int, *,
              budget: int = 10_000) -> ChainReport:
    """Walk the chain downward and return the threshold d.

    Stages above the interaction point carry no ties and a separated
    added block; their verdicts are pinned by explicit checks at the
    stabilization stage, the midpoint, and the entry stage.
    """
    if not nonvanishing(datum, budget=budget).nonzero:
        raise PreconditionViolated("compute_d needs a datum with a nonzero member")
    top = stabilization_alpha(datum.base.param)
    enter = min(interaction_alpha(datum.base.param), top)

    for probe in sorted({top, _odd_mid(enter, top), enter}, reverse=True):
        ld = _lift_at(datum, probe, tower_epsilon)
        if not nonvanishing(ld.datum, budget=budget).nonzero:
            raise StartNotNonzero(
                f"stage alpha = {probe} is zero above the interaction point")

    verdicts: list[tuple[int, str]] = [(enter, "Nonzero")]
    ld = _lift_at(datum, enter, tower_epsilon)
    dead = False
    for alpha in range(enter - 2, 0, -2):
        if not dead:
            try:
                ld = shift_down(ld)
            except InvalidExchange:
                dead = True
        if dead:
            verdicts.append((alpha, "Zero"))
            continue
        v = nonvanishing(ld.datum, budget=budget)
        verdicts.append((alpha, v.outcome.value))

    zeros = [a for a, v in verdicts if v == "Zero"]
    d = max(zeros) + 2 if zeros else 1
    anomalies = tuple(
        a for a, v in verdicts
        if v == "Nonzero" and any(az > a for az in zeros))
    return ChainReport(d=d, alpha_start=top,
                       plateau_top=top if enter < top else None,
                       scan_top=enter, verdicts=tuple(verdicts),
                       anomalies=anomalies)


def _odd_mid(lo: int, hi: int) -> int:
    mid = (lo + hi) // 2
    if mid % 2 == 0:
        mid += 1
    return min(max(mid, lo), hi)


# ---------------------------------------------------------------------------
# obstructions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ObstructionHit:
    rule: str
    descriptor: OperatorDescriptor
    blocks: tuple[SBlk, ...]
    zero_alpha: int
    d_lower_bound: int


def obstruction_scan(param: ArthurParameter) -> list[ObstructionHit]:
    """Predicted zero stages from raising-operator configurations.

    Only chi_V blocks meet the added block after twisting, so only they
    can obstruct.  For a plain exchange the lower affected block must
    carry sign -1 and the zero lands at twice the upper A plus one; for
    the merging and splitting flavours the merged (resp. split) block
    carries the condition and the stage.
    """
    hits: set[ObstructionHit] = set()
    for edge in enumerate_raising(param):
        if edge.rho != "chi_V":
            continue
        desc = edge.descriptor
        if desc.kind == "ui_inv" and not desc.type3prime:
            lower, upper = edge.target_blocks
            if lower.sB2 < 0:
                alpha = upper.A2 + 1
                hits.add(ObstructionHit("dual-ui-dual", desc,
                                        edge.target_blocks, alpha, alpha + 2))
        elif desc.kind == "ui_inv" and desc.type3prime:
            src = edge.source_blocks[0]
            if src.sB2 < 0:
                alpha = src.A2 + 1
                hits.add(ObstructionHit("ui-inverse-3prime", desc,
                                        edge.source_blocks, alpha, alpha + 2))
        elif desc.kind == "dual_ui_dual" and desc.type3prime:
            merged = edge.target_blocks[0]
            if merged.sB2 < 0:
                alpha = merged.A2 + 1
                hits.add(ObstructionHit("dual-ui-dual-3prime", desc,
                                        edge.target_blocks, alpha, alpha + 2))
    return sorted(hits, key=lambda h: (-h.zero_alpha, h.rule, str(h.blocks)))


# ---------------------------------------------------------------------------
# monotonicity verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonotonicityRecord:
    d_source: int
    d_target: int
    violations: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.violations and self.d_target <= self.d_source


def _row_bag(datum: MoeglinDatum):
    bag: dict = {}
    for rho in datum.base.rho_names():
        for row in datum.rows(rho):
            key = (rho, row.blk, row.l, row.eta)
            bag[key] = bag.get(key, 0) + 1
    return bag


def _block_bag(datum: MoeglinDatum):
    bag: dict = {}
    for rho in datum.base.rho_names():
        for row in datum.rows(rho):
            key = (rho, row.blk)
            bag[key] = bag.get(key, 0) + 1
    return bag


def check_offblock_agreement(d1: MoeglinDatum, d2: MoeglinDatum) -> None:
    """The two data must agree on the blocks their parameters share."""
    rows1, rows2 = _row_bag(d1), _row_bag(d2)
    blocks1, blocks2 = _block_bag(d1), _block_bag(d2)
    diff_blocks1 = {k: v - blocks2.get(k, 0) for k, v in blocks1.items()
                    if v - blocks2.get(k, 0) > 0}
    diff_blocks2 = {k: v - blocks1.get(k, 0) for k, v in blocks2.items()
                    if v - blocks1.get(k, 0) > 0}
    res1: dict = {}
    for k, v in rows1.items():
        extra = v - rows2.get(k, 0)
        if extra > 0:
            blk_key = (k[0], k[1])
            res1[blk_key] = res1.get(blk_key, 0) + extra
    res2: dict = {}
    for k, v in rows2.items():
        extra = v - rows1.get(k, 0)
        if extra > 0:
            blk_key = (k[0], k[1])
            res2[blk_key] = res2.get(blk_key, 0) + extra
    if res1 != diff_blocks1 or res2 != diff_blocks2:
        raise PairMismatch("data disagree on blocks shared by both parameters")


def verify_monotonicity(pairs, tower_epsilon: int) -> list[MonotonicityRecord]:
    """Check the downward-chain implication along matched datum pairs.

    For each (source datum, raised datum): wherever the source stage is
    nonzero the raised stage must be too occurring, and the raised d may
    not exceed the source d.  Counterexamples are returned, never
    swallowed.
    """
    out = []
    for d_src, d_tgt in pairs:
        check_offblock_agreement(d_src, d_tgt)
        if not nonvanishing(d_src).nonzero or not nonvanishing(d_tgt).nonzero:
            raise PreconditionViolated("both data of a pair must be nonzero")
        r_src = compute_d(d_src, tower_epsilon)
        r_tgt = compute_d(d_tgt, tower_epsilon)
        violations = []
        for alpha in range(1, r_tgt.scan_top + 1, 2):
            if (r_src.verdict_at(alpha) == "Nonzero"
                    and r_tgt.verdict_at(alpha) == "Zero"):
                violations.append(alpha)
        out.append(MonotonicityRecord(r_src.d, r_tgt.d, tuple(violations)))
    return out


# ---------------------------------------------------------------------------
# conservation arithmetic
# ---------------------------------------------------------------------------

def conservation(m_known: int, n: int, which: str = "down") -> int:
    """The partner first occurrence: m^+ + m^- = 2n + 4."""
    if m_known % 2 or n % 2:
        raise ValidationError("first occurrences and n are even integers")
    if which not in ("up", "down"):
        raise ValidationError("which must be 'up' or 'down'")
    return 2 * n + 4 - m_known


def m_alpha(m: int, n: int) -> int:
    """First occurrence in alpha-indexing: m - n - 1."""
    return m - n - 1
