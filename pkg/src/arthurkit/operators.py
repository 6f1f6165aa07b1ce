"""Raising operators on parameters, their closure graphs, and extrema.

Operators act on the good-parity part, per rho, in signed coordinates
(A, zeta*B); the signed bottom may be negative.  Indices in descriptors
refer to the canonical (A, signed B)-sorted list of that rho's blocks.
Applying a non-applicable operator is the identity.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

from .errors import ClosureBudgetExceeded, NotUnique, ValidationError
from .params import (ArthurParameter, Decomposition, Summand, decompose,
                     dual as dual_param)


class SBlk(NamedTuple):
    """A good-parity block in doubled signed coordinates."""
    A2: int
    sB2: int


def _sblk_of_summand(s: Summand) -> SBlk:
    return SBlk(s.a + s.b - 2, s.a - s.b)


def _summand_of_sblk(rho: str, blk: SBlk) -> Summand:
    from fractions import Fraction
    a = (blk.A2 + blk.sB2) // 2 + 1
    b = (blk.A2 - blk.sB2) // 2 + 1
    return Summand(rho, Fraction(0), a, b)


def _sblk_valid(blk: SBlk) -> bool:
    return blk.A2 >= abs(blk.sB2) and (blk.A2 - blk.sB2) % 2 == 0


def _sblk_dual(blk: SBlk) -> SBlk:
    return SBlk(blk.A2, -blk.sB2)


def gp_signed_blocks(param: ArthurParameter) -> dict[str, tuple[SBlk, ...]]:
    """Good-parity blocks per rho in the canonical (A, signed B) order."""
    dec = decompose(param)
    groups: dict[str, list[SBlk]] = {}
    for s in dec.gp:
        groups.setdefault(s.rho, []).append(_sblk_of_summand(s))
    return {rho: tuple(sorted(blks)) for rho, blks in groups.items()}


def _rebuild(param: ArthurParameter, rho: str,
             new_blocks: tuple[SBlk, ...]) -> ArthurParameter:
    dec = decompose(param)
    others = [s for s in dec.gp if s.rho != rho]
    gp = others + [_summand_of_sblk(rho, b) for b in new_blocks]
    full = (list(dec.nu_pos) + list(dec.np) + gp
            + [Summand(param.label(s.rho).partner_name(), -s.x, s.a, s.b)
               for s in dec.nu_pos]
            + [Summand(param.label(s.rho).partner_name(), -s.x, s.a, s.b)
               for s in dec.np])
    out = param.with_summands(full)
    if out.dimension() != param.dimension():
        raise AssertionError("an operator changed the dimension equation")
    return out


# ---------------------------------------------------------------------------
# the basic operators
# ---------------------------------------------------------------------------

def _ui_conditions(blocks: tuple[SBlk, ...], i: int, j: int) -> Optional[bool]:
    """None if not applicable; else the type-3' flag."""
    bi, bj = blocks[i], blocks[j]
    if not (bj.A2 >= bi.A2 + 2 >= bj.sB2 > bi.sB2):
        return None
    for r, br in enumerate(blocks):
        if r in (i, j):
            continue
        if bi.sB2 < br.sB2 < bj.sB2 and not (br.A2 <= bi.A2 or br.A2 >= bj.A2):
            return None
    return bi.A2 + 2 == bj.sB2


def _ui_image(blocks: tuple[SBlk, ...], i: int, j: int) -> Optional[tuple[SBlk, ...]]:
    t3 = _ui_conditions(blocks, i, j)
    if t3 is None:
        return None
    bi, bj = blocks[i], blocks[j]
    new = [b for r, b in enumerate(blocks) if r not in (i, j)]
    new.append(SBlk(bj.A2, bi.sB2))
    if not t3:
        new.append(SBlk(bi.A2, bj.sB2))
    return tuple(sorted(new))


def ui_applicable(param: ArthurParameter, rho: str, i: int, j: int) -> bool:
    blocks = gp_signed_blocks(param).get(rho, ())
    if not (0 <= i < len(blocks) and 0 <= j < len(blocks)) or i == j:
        return False
    return _ui_conditions(blocks, i, j) is not None


def apply_ui(param: ArthurParameter, rho: str, i: int, j: int) -> ArthurParameter:
    blocks = gp_signed_blocks(param).get(rho, ())
    if not (0 <= i < len(blocks) and 0 <= j < len(blocks)) or i == j:
        return param
    image = _ui_image(blocks, i, j)
    if image is None:
        return param
    return _rebuild(param, rho, image)


def apply_dual_minus(param: ArthurParameter, rho: str, k: int) -> ArthurParameter:
    blocks = gp_signed_blocks(param).get(rho, ())
    if not 0 <= k < len(blocks) or blocks[k].sB2 != -1:
        return param
    new = blocks[:k] + (SBlk(blocks[k].A2, 1),) + blocks[k + 1:]
    return _rebuild(param, rho, tuple(sorted(new)))


def apply_dual_minus_inverse(param: ArthurParameter, rho: str, k: int) -> ArthurParameter:
    blocks = gp_signed_blocks(param).get(rho, ())
    if not 0 <= k < len(blocks) or blocks[k].sB2 != 1:
        return param
    new = blocks[:k] + (SBlk(blocks[k].A2, -1),) + blocks[k + 1:]
    return _rebuild(param, rho, tuple(sorted(new)))


def _ui_inverse_candidates(blocks: tuple[SBlk, ...], rho: str):
    """All (target_blocks, i, j, type3, split_a2) with ui_{i,j}(target) = blocks."""
    out = []
    seen = set()
    # splits: one block comes apart (the inner ui was of type 3')
    for m_idx, M in enumerate(blocks):
        rest = blocks[:m_idx] + blocks[m_idx + 1:]
        for a2 in range(abs(M.sB2), M.A2 - 1, 2):
            U = SBlk(a2, M.sB2)
            V = SBlk(M.A2, a2 + 2)
            if not (_sblk_valid(U) and _sblk_valid(V)):
                continue
            target = tuple(sorted(rest + (U, V)))
            i, j = target.index(U), target.index(V)
            if i == j:
                j = target.index(V, i + 1)
            t3 = _ui_conditions(target, i, j)
            if t3 is not True:
                continue
            if _ui_image(target, i, j) != blocks:
                continue
            key = (target, i, j)
            if key in seen:
                continue
            seen.add(key)
            out.append((target, i, j, True, a2))
    # plain un-swaps: two blocks trade their A coordinates back
    for p in range(len(blocks)):
        for q in range(len(blocks)):
            if p == q:
                continue
            P, Q = blocks[p], blocks[q]
            U = SBlk(Q.A2, P.sB2)
            V = SBlk(P.A2, Q.sB2)
            if not (_sblk_valid(U) and _sblk_valid(V)):
                continue
            rest = tuple(b for r, b in enumerate(blocks) if r not in (p, q))
            target = tuple(sorted(rest + (U, V)))
            i = target.index(U)
            j = target.index(V) if V != U else target.index(V, i + 1)
            t3 = _ui_conditions(target, i, j)
            if t3 is not False:
                continue
            if _ui_image(target, i, j) != blocks:
                continue
            key = (target, i, j)
            if key in seen:
                continue
            seen.add(key)
            out.append((target, i, j, False, None))
    return out


def apply_ui_inverse(param: ArthurParameter, rho: str, i: int, j: int,
                     split_a2: Optional[int] = None) -> ArthurParameter:
    """The inverse of ui_{i,j}; (i, j) index the blocks of the result."""
    blocks = gp_signed_blocks(param).get(rho, ())
    for target, ti, tj, t3, a2 in _ui_inverse_candidates(blocks, rho):
        if (ti, tj) != (i, j):
            continue
        if split_a2 is not None and a2 != split_a2:
            continue
        return _rebuild(param, rho, target)
    return param


# ---------------------------------------------------------------------------
# descriptors and edge enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorDescriptor:
    kind: str  # dual | ui | ui_inv | dual_ui_dual | dual_minus | dual_minus_inv
    rho: Optional[str] = None
    i: Optional[int] = None
    j: Optional[int] = None
    type3prime: bool = False
    split_a2: Optional[int] = None

    def label(self) -> str:
        if self.kind in ("ui_inv",):
            return "ui^{-1}"
        if self.kind == "dual_ui_dual":
            return "D"
        if self.kind == "dual_minus":
            return "dual_k^-"
        if self.kind == "dual_minus_inv":
            return "dual_k^+"
        return self.kind


@dataclass(frozen=True)
class RaisingEdge:
    descriptor: OperatorDescriptor
    rho: str
    target: ArthurParameter
    source_blocks: tuple[SBlk, ...]
    target_blocks: tuple[SBlk, ...]


def apply_descriptor(param: ArthurParameter, desc: OperatorDescriptor) -> ArthurParameter:
    if desc.kind == "dual":
        return dual_param(param)
    if desc.kind == "ui":
        return apply_ui(param, desc.rho, desc.i, desc.j)
    if desc.kind == "ui_inv":
        return apply_ui_inverse(param, desc.rho, desc.i, desc.j, desc.split_a2)
    if desc.kind == "dual_ui_dual":
        return dual_param(apply_ui(dual_param(param), desc.rho, desc.i, desc.j))
    if desc.kind == "dual_minus":
        return apply_dual_minus(param, desc.rho, desc.i)
    if desc.kind == "dual_minus_inv":
        return apply_dual_minus_inverse(param, desc.rho, desc.i)
    raise ValidationError(f"unknown operator kind {desc.kind!r}")


def enumerate_raising(param: ArthurParameter) -> list[RaisingEdge]:
    """All raising-operator applications, possibly several per target."""
    edges: list[RaisingEdge] = []
    for rho, blocks in sorted(gp_signed_blocks(param).items()):
        # ui^{-1}, both flavours
        for target, i, j, t3, a2 in _ui_inverse_candidates(blocks, rho):
            desc = OperatorDescriptor("ui_inv", rho, i, j, t3, a2)
            affected_target = (target[i], target[j])
            if t3:
                split_src = SBlk(target[j].A2, target[i].sB2)
                src = (split_src,)
            else:
                src = (SBlk(target[j].A2, target[i].sB2),
                       SBlk(target[i].A2, target[j].sB2))
            edges.append(RaisingEdge(desc, rho, _rebuild(param, rho, target),
                                     src, affected_target))
        # dual . ui . dual
        dual_blocks = tuple(sorted(_sblk_dual(b) for b in blocks))
        for i in range(len(dual_blocks)):
            for j in range(len(dual_blocks)):
                if i == j:
                    continue
                t3 = _ui_conditions(dual_blocks, i, j)
                if t3 is None:
                    continue
                image = _ui_image(dual_blocks, i, j)
                target_blocks = tuple(sorted(_sblk_dual(b) for b in image))
                desc = OperatorDescriptor("dual_ui_dual", rho, i, j, t3)
                src = tuple(sorted((_sblk_dual(dual_blocks[i]),
                                    _sblk_dual(dual_blocks[j]))))
                merged = _sblk_dual(SBlk(dual_blocks[j].A2, dual_blocks[i].sB2))
                if t3:
                    affected_target = (merged,)
                else:
                    affected_target = tuple(sorted(
                        (merged, _sblk_dual(SBlk(dual_blocks[i].A2, dual_blocks[j].sB2)))))
                edges.append(RaisingEdge(desc, rho, _rebuild(param, rho, target_blocks),
                                         src, affected_target))
        # dual_k^-
        for k, blk in enumerate(blocks):
            if blk.sB2 == -1:
                desc = OperatorDescriptor("dual_minus", rho, k)
                edges.append(RaisingEdge(
                    desc, rho, apply_dual_minus(param, rho, k),
                    (blk,), (SBlk(blk.A2, 1),)))
    return edges


_KIND_PRIORITY = {"ui_inv": 0, "dual_ui_dual": 1, "dual_minus": 2}


def raising_neighbors(param: ArthurParameter) -> list[tuple[OperatorDescriptor, ArthurParameter]]:
    """Applicable raising operators with distinct targets, deterministic order."""
    best: dict[ArthurParameter, RaisingEdge] = {}
    for edge in enumerate_raising(param):
        cur = best.get(edge.target)
        if cur is None or _KIND_PRIORITY[edge.descriptor.kind] < _KIND_PRIORITY[cur.descriptor.kind]:
            best[edge.target] = edge
    out = [(e.descriptor, t) for t, e in best.items()]
    out.sort(key=lambda pair: (str(pair[1]), pair[0].kind, pair[0].i or 0, pair[0].j or 0))
    return out


def lowering_neighbors(param: ArthurParameter) -> list[ArthurParameter]:
    """Targets of the inverse operators (for closure discovery)."""
    out = set()
    for rho, blocks in sorted(gp_signed_blocks(param).items()):
        for i in range(len(blocks)):
            for j in range(len(blocks)):
                if i != j and _ui_conditions(blocks, i, j) is not None:
                    out.add(_rebuild(param, rho, _ui_image(blocks, i, j)))
        dual_blocks = tuple(sorted(_sblk_dual(b) for b in blocks))
        for target, i, j, t3, a2 in _ui_inverse_candidates(dual_blocks, rho):
            out.add(_rebuild(param, rho, tuple(sorted(_sblk_dual(b) for b in target))))
        for k, blk in enumerate(blocks):
            if blk.sB2 == 1:
                out.add(apply_dual_minus_inverse(param, rho, k))
    return sorted(out, key=str)


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PsiGraph:
    nodes: tuple[ArthurParameter, ...]
    edges: tuple[tuple[ArthurParameter, OperatorDescriptor, ArthurParameter], ...]

    def __post_init__(self):
        self._check_dag()

    def _check_dag(self):
        adj: dict[ArthurParameter, list[ArthurParameter]] = {n: [] for n in self.nodes}
        indeg = {n: 0 for n in self.nodes}
        for src, _, dst in self.edges:
            adj[src].append(dst)
            indeg[dst] += 1
        queue = deque(n for n, k in indeg.items() if k == 0)
        seen = 0
        while queue:
            node = queue.popleft()
            seen += 1
            for nxt in adj[node]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    queue.append(nxt)
        if seen != len(self.nodes):
            raise ValidationError("raising edges contain a cycle")


def closure_graph(seeds, node_filter=None, node_cap: int = 500) -> PsiGraph:
    """BFS closure under raising operators and their inverses."""
    allowed = None if node_filter is None else set(node_filter)
    nodes: set[ArthurParameter] = set()
    queue = deque()
    for seed in seeds:
        if allowed is not None and seed not in allowed:
            continue
        if seed not in nodes:
            nodes.add(seed)
            queue.append(seed)
    edges = set()
    while queue:
        node = queue.popleft()
        neighbors = [t for _, t in raising_neighbors(node)]
        neighbors += lowering_neighbors(node)
        for nxt in neighbors:
            if allowed is not None and nxt not in allowed:
                continue
            if nxt not in nodes:
                if len(nodes) >= node_cap:
                    raise ClosureBudgetExceeded(
                        f"operator closure exceeded {node_cap} nodes")
                nodes.add(nxt)
                queue.append(nxt)
    for node in nodes:
        for desc, target in raising_neighbors(node):
            if target in nodes:
                edges.add((node, desc, target))
    node_list = tuple(sorted(nodes, key=str))
    edge_list = tuple(sorted(edges, key=lambda e: (str(e[0]), str(e[2]), e[1].kind)))
    return PsiGraph(node_list, edge_list)


def psi_extrema(graph: PsiGraph) -> tuple[ArthurParameter, ArthurParameter]:
    """The unique sink (maximum) and unique source (minimum)."""
    if not graph.nodes:
        raise ValidationError("empty graph has no extrema")
    outdeg = {n: 0 for n in graph.nodes}
    indeg = {n: 0 for n in graph.nodes}
    for src, _, dst in graph.edges:
        outdeg[src] += 1
        indeg[dst] += 1
    sinks = [n for n in graph.nodes if outdeg[n] == 0]
    sources = [n for n in graph.nodes if indeg[n] == 0]
    if len(sinks) != 1 or len(sources) != 1:
        raise NotUnique(
            f"expected one source and one sink, found {len(sources)}/{len(sinks)}")
    return sinks[0], sources[0]
