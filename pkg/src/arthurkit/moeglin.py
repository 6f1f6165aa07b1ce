"""Ordered good-parity parameters and their (l, eta) data.

A datum fixes, for each rho, an admissible order on the Jordan blocks
together with integers 0 <= l_i <= d_i/2 and signs eta_i subject to the
global sign condition.  Each valid datum indexes one (possibly zero)
packet member.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import InvalidExchange, PreconditionViolated, ValidationError
from .halfint import HalfInt, neg_one_pow
from .params import ArthurParameter, JordanBlock, is_good_parity
from . import rows as R


def _block_key(block: JordanBlock):
    """Canonical admissible sort key: (A+B, A-B), plus sign +1 first."""
    return (block.A.twice + block.B.twice,
            block.A.twice - block.B.twice,
            0 if block.zeta == 1 else 1)


def _to_blk(block: JordanBlock) -> R.Blk:
    return R.Blk(block.A.twice, block.B.twice, block.zeta)


def _from_blk(rho: str, blk: R.Blk) -> JordanBlock:
    zeta = 1 if blk.B2 == 0 else blk.z
    return JordanBlock(rho, HalfInt(blk.A2), HalfInt(blk.B2), zeta)


@dataclass(frozen=True)
class OrderedGPParameter:
    """A good-parity parameter plus one admissible order per rho."""

    param: ArthurParameter
    order: tuple[tuple[str, tuple[JordanBlock, ...]], ...]

    def __post_init__(self):
        if not is_good_parity(self.param):
            raise ValidationError("ordered parameters require good parity")
        declared = {rho: blocks for rho, blocks in self.order}
        actual: dict[str, list[JordanBlock]] = {}
        for s in self.param.summands:
            actual.setdefault(s.rho, []).append(
                JordanBlock.from_ab(s.rho, s.a, s.b))
        if set(declared) != set(actual):
            raise ValidationError("order must cover exactly the parameter's rhos")
        for rho, blocks in declared.items():
            if sorted(blocks, key=_block_key) != sorted(actual[rho], key=_block_key):
                raise ValidationError(f"order for {rho} does not match the blocks")
            if not R.order_admissible(tuple(_to_blk(b) for b in blocks)):
                raise ValidationError(f"order for {rho} is not admissible")
        object.__setattr__(self, "order", tuple(sorted(self.order)))

    @staticmethod
    def canonical(param: ArthurParameter) -> "OrderedGPParameter":
        groups: dict[str, list[JordanBlock]] = {}
        for s in param.summands:
            groups.setdefault(s.rho, []).append(JordanBlock.from_ab(s.rho, s.a, s.b))
        order = tuple(
            (rho, tuple(sorted(blocks, key=_block_key)))
            for rho, blocks in sorted(groups.items()))
        return OrderedGPParameter(param, order)

    def blocks(self, rho: str) -> tuple[JordanBlock, ...]:
        for name, blocks in self.order:
            if name == rho:
                return blocks
        return ()

    def rho_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.order)

    def with_blocks(self, rho: str, blocks: tuple[JordanBlock, ...]) -> "OrderedGPParameter":
        order = tuple((name, blocks if name == rho else blks)
                      for name, blks in self.order)
        return OrderedGPParameter(self.param, order)


@dataclass(frozen=True)
class MoeglinDatum:
    """(order, l, eta) on a good-parity parameter."""

    base: OrderedGPParameter
    l: tuple[tuple[str, tuple[int, ...]], ...]
    eta: tuple[tuple[str, tuple[int, ...]], ...]

    def __post_init__(self):
        object.__setattr__(self, "l", tuple(sorted(self.l)))
        object.__setattr__(self, "eta", tuple(sorted(self.eta)))
        ls = dict(self.l)
        etas = dict(self.eta)
        for rho in self.base.rho_names():
            blocks = self.base.blocks(rho)
            if len(ls.get(rho, ())) != len(blocks) or len(etas.get(rho, ())) != len(blocks):
                raise ValidationError(f"l/eta for {rho} must align with the order")
            for block, l_i, eta_i in zip(blocks, ls[rho], etas[rho]):
                if not 0 <= l_i <= block.d // 2:
                    raise ValidationError(
                        f"l = {l_i} outside 0..{block.d // 2} on {block}")
                if eta_i not in (-1, 1):
                    raise ValidationError("eta must be +1 or -1")
        if sign_product(self) != self.base.param.group.sign_target:
            raise ValidationError("sign condition fails for this datum")

    def rows(self, rho: str) -> tuple[R.Row, ...]:
        ls = dict(self.l)[rho]
        etas = dict(self.eta)[rho]
        return tuple(R.Row(_to_blk(b), l_i, eta_i)
                     for b, l_i, eta_i in zip(self.base.blocks(rho), ls, etas))

    def with_rows(self, rho: str, new_rows: tuple[R.Row, ...]) -> "MoeglinDatum":
        blocks = tuple(_from_blk(rho, row.blk) for row in new_rows)
        base = self.base.with_blocks(rho, blocks)
        l = tuple((name, tuple(r.l for r in new_rows) if name == rho else vals)
                  for name, vals in self.l)
        eta = tuple((name, tuple(r.eta for r in new_rows) if name == rho else vals)
                    for name, vals in self.eta)
        return MoeglinDatum(base, l, eta)

    def describe(self) -> str:
        bits = []
        for rho in self.base.rho_names():
            for row in self.rows(rho):
                blk = _from_blk(rho, row.blk)
                bits.append(f"{blk}:l={row.l},eta={'+' if row.eta > 0 else '-'}")
        return "; ".join(bits)


def sign_product(datum: MoeglinDatum) -> int:
    """The left-hand side of the sign condition."""
    total = 1
    for rho in datum.base.rho_names():
        for row in datum.rows(rho):
            d = R.d_of(row.blk)
            total *= neg_one_pow(d // 2 + row.l) * (row.eta ** d)
    return total


def enumerate_data(base: OrderedGPParameter) -> list[MoeglinDatum]:
    """All (l, eta) assignments meeting bounds and the sign condition."""
    rho_names = base.rho_names()
    per_block: list[list[tuple[int, int]]] = []
    layout: list[tuple[str, int]] = []
    for rho in rho_names:
        for idx, block in enumerate(base.blocks(rho)):
            choices = [(l, eta) for l in range(block.d // 2 + 1) for eta in (1, -1)]
            per_block.append(choices)
            layout.append((rho, idx))
    out: list[MoeglinDatum] = []
    target = base.param.group.sign_target
    for combo in itertools.product(*per_block):
        ls: dict[str, list[int]] = {rho: [] for rho in rho_names}
        etas: dict[str, list[int]] = {rho: [] for rho in rho_names}
        for (rho, _), (l, eta) in zip(layout, combo):
            ls[rho].append(l)
            etas[rho].append(eta)
        sign = 1
        for rho in rho_names:
            for block, l_i, eta_i in zip(base.blocks(rho), ls[rho], etas[rho]):
                sign *= neg_one_pow(block.d // 2 + l_i) * (eta_i ** block.d)
        if sign != target:
            continue
        out.append(MoeglinDatum(
            base,
            tuple((rho, tuple(ls[rho])) for rho in rho_names),
            tuple((rho, tuple(etas[rho])) for rho in rho_names)))
    return out


def row_exchange(datum: MoeglinDatum, rho: str, k: int) -> MoeglinDatum:
    """Swap blocks k and k+1 of rho, transporting (l, eta).

    Returns the input unchanged when the swapped order is inadmissible;
    raises InvalidExchange when the transported values leave their range
    (which certifies the datum indexes the zero member).
    """
    rws = datum.rows(rho)
    if not 0 <= k < len(rws) - 1:
        raise PreconditionViolated(f"no adjacent pair at position {k}")
    status, new_rows = R.exchange(rws, k)
    if status == "noop":
        return datum
    if status == "dead":
        raise InvalidExchange(
            f"exchange at {rho}[{k}] has no valid transported datum")
    return datum.with_rows(rho, new_rows)


def try_normalize(datum: MoeglinDatum, target: OrderedGPParameter) -> Optional[MoeglinDatum]:
    """Transport a datum to a target order; None when impossible (zero member)."""
    if target.param != datum.base.param:
        raise PreconditionViolated("target order is for a different parameter")
    current = datum
    for rho in datum.base.rho_names():
        goal = tuple(_to_blk(b) for b in target.blocks(rho))
        rws = current.rows(rho)
        for i in range(len(goal)):
            j = next(idx for idx in range(i, len(rws)) if rws[idx].blk == goal[i])
            status, rws = R.move_row(rws, j, i)
            if status == "dead":
                return None
            if status == "noop":
                raise PreconditionViolated(
                    f"target order for {rho} is unreachable; is it admissible?")
        current = current.with_rows(rho, rws)
    return current


def normalize_order(datum: MoeglinDatum, target: OrderedGPParameter) -> MoeglinDatum:
    """Like try_normalize but raising InvalidExchange on impossible transport."""
    out = try_normalize(datum, target)
    if out is None:
        raise InvalidExchange("datum cannot be transported to the target order")
    return out


def admissible_orderings(param: ArthurParameter) -> list[OrderedGPParameter]:
    """Every admissible order of a good-parity parameter, one per rho-combination."""
    canon = OrderedGPParameter.canonical(param)
    per_rho: list[list[tuple[str, tuple[JordanBlock, ...]]]] = []
    for rho in canon.rho_names():
        blks = tuple(_to_blk(b) for b in canon.blocks(rho))
        orders = R.admissible_orders(tuple(sorted(blks)))
        per_rho.append([(rho, tuple(_from_blk(rho, b) for b in order))
                        for order in orders])
    out = []
    for combo in itertools.product(*per_rho):
        out.append(OrderedGPParameter(param, tuple(combo)))
    return out
