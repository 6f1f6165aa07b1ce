"""Local Arthur parameters as exact combinatorial objects.

A parameter is a multiset of summands rho|.|^x (x) S_a (x) S_b together
with a group context (symplectic, or even orthogonal with a tower sign).
Everything is immutable; all arithmetic is exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .halfint import HalfInt
from .errors import UnpairedSummand, ValidationError


class Duality(enum.Enum):
    ORTHOGONAL = "orthogonal"
    SYMPLECTIC = "symplectic"
    NOT_SELF_DUAL = "not_self_dual"


@dataclass(frozen=True)
class SupercuspidalLabel:
    """Abstract supercuspidal rho: a name, a dimension, a self-duality type.

    ``dual_name`` points at the label of rho^vee; self-dual labels leave it
    None (they are their own partner).
    """

    name: str
    dim: int = 1
    duality: Duality = Duality.ORTHOGONAL
    dual_name: Optional[str] = None

    def __post_init__(self):
        if not self.name:
            raise ValidationError("label name must be nonempty")
        if self.dim < 1:
            raise ValidationError(f"label {self.name}: dim must be positive")
        if self.duality is Duality.NOT_SELF_DUAL and self.dual_name is None:
            raise ValidationError(
                f"label {self.name}: a non-self-dual label needs dual_name")

    @property
    def self_dual(self) -> bool:
        return self.duality is not Duality.NOT_SELF_DUAL

    def partner_name(self) -> str:
        return self.name if self.dual_name is None else self.dual_name


CHI_V = SupercuspidalLabel("chi_V", 1, Duality.ORTHOGONAL)
CHI_W = SupercuspidalLabel("chi_W", 1, Duality.ORTHOGONAL)


@dataclass(frozen=True, order=True)
class Summand:
    """One term rho|.|^x (x) S_a (x) S_b."""

    rho: str
    x: Fraction
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ValidationError(f"summand {self}: a, b must be positive")
        if abs(self.x) >= Fraction(1, 2):
            raise ValidationError(f"summand {self}: |x| must be < 1/2")

    def swapped(self) -> "Summand":
        return Summand(self.rho, self.x, self.b, self.a)

    def __str__(self) -> str:
        shift = "" if self.x == 0 else f"|.|^{self.x}"
        return f"{self.rho}{shift}(x)S_{self.a}(x)S_{self.b}"


@dataclass(frozen=True)
class JordanBlock:
    """A summand in (rho, A, B, zeta) coordinates.

    A = (a+b)/2 - 1, B = |a-b|/2, zeta = sign(a-b), with zeta = +1 when
    a = b.  The signed coordinate zeta*B recovers (a-b)/2.
    """

    rho: str
    A: HalfInt
    B: HalfInt
    zeta: int

    def __post_init__(self):
        if self.zeta not in (-1, 1):
            raise ValidationError("zeta must be +1 or -1")
        if self.B.twice < 0 or self.A < self.B:
            raise ValidationError(f"need A >= B >= 0, got A={self.A}, B={self.B}")
        if self.B.twice == 0 and self.zeta != 1:
            raise ValidationError("blocks with B = 0 carry zeta = +1 by convention")
        # a and b must come out as positive integers
        if (self.A.twice + self.B.twice) % 2 != 0:
            raise ValidationError("A and B must lie in the same coset of Z")

    @staticmethod
    def from_ab(rho: str, a: int, b: int) -> "JordanBlock":
        A = HalfInt(a + b - 2)
        B = HalfInt(abs(a - b))
        zeta = 1 if a >= b else -1
        return JordanBlock(rho, A, B, zeta)

    @property
    def a(self) -> int:
        return (self.A.twice + self.zeta * self.B.twice) // 2 + 1

    @property
    def b(self) -> int:
        return (self.A.twice - self.zeta * self.B.twice) // 2 + 1

    @property
    def d(self) -> int:
        """min(a, b) = A - B + 1."""
        return (self.A.twice - self.B.twice) // 2 + 1

    @property
    def signed_b(self) -> HalfInt:
        return HalfInt(self.zeta * self.B.twice)

    def summand(self) -> Summand:
        return Summand(self.rho, Fraction(0), self.a, self.b)

    def __str__(self) -> str:
        return f"({self.rho},{self.A},{self.B},{'+' if self.zeta > 0 else '-'})"


class GroupKind(enum.Enum):
    SYMPLECTIC = "Sp"
    EVEN_ORTHOGONAL = "O"


@dataclass(frozen=True)
class GroupContext:
    """Which classical group the parameter lands in, dual side.

    Symplectic Sp(n): dual_dim = n+1 (odd); sign target +1.
    Even orthogonal O(V_m): dual_dim = m (even); sign target = epsilon.
    """

    kind: GroupKind
    dual_dim: int
    epsilon: Optional[int] = None

    def __post_init__(self):
        if self.kind is GroupKind.SYMPLECTIC:
            if self.dual_dim % 2 != 1 or self.dual_dim < 1:
                raise ValidationError("symplectic dual_dim must be odd and positive")
            if self.epsilon is not None:
                raise ValidationError("symplectic context carries no epsilon")
        else:
            if self.dual_dim % 2 != 0 or self.dual_dim < 0:
                raise ValidationError("orthogonal dual_dim must be even and >= 0")
            if self.epsilon not in (-1, 1):
                raise ValidationError("orthogonal context needs epsilon = +1 or -1")

    @property
    def sign_target(self) -> int:
        return 1 if self.kind is GroupKind.SYMPLECTIC else self.epsilon


def symplectic(dual_dim: int) -> GroupContext:
    return GroupContext(GroupKind.SYMPLECTIC, dual_dim)


def even_orthogonal(dual_dim: int, epsilon: int) -> GroupContext:
    return GroupContext(GroupKind.EVEN_ORTHOGONAL, dual_dim, epsilon)


@dataclass(frozen=True)
class ArthurParameter:
    """A group context plus a multiset of summands (kept sorted)."""

    group: GroupContext
    summands: tuple[Summand, ...]
    labels: tuple[SupercuspidalLabel, ...] = (CHI_V, CHI_W)

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(sorted(self.summands)))
        names = [lab.name for lab in self.labels]
        if len(set(names)) != len(names):
            raise ValidationError("label names must be unique")
        object.__setattr__(
            self, "labels", tuple(sorted(self.labels, key=lambda l: l.name)))

    def label(self, name: str) -> SupercuspidalLabel:
        for lab in self.labels:
            if lab.name == name:
                return lab
        raise ValidationError(f"unknown supercuspidal label {name!r}")

    def dimension(self) -> int:
        return sum(self.label(s.rho).dim * s.a * s.b for s in self.summands)

    def validate(self) -> None:
        """Check the dimension equation and the self-duality pairing."""
        dim = self.dimension()
        if dim != self.group.dual_dim:
            raise ValidationError(
                f"sum of d*a*b is {dim}, expected dual_dim {self.group.dual_dim}")
        _pair_off_non_self_dual(self)

    def rho_names(self) -> tuple[str, ...]:
        return tuple(sorted({s.rho for s in self.summands}))

    def with_summands(self, summands: Iterable[Summand]) -> "ArthurParameter":
        return ArthurParameter(self.group, tuple(summands), self.labels)

    def __str__(self) -> str:
        body = " + ".join(str(s) for s in self.summands) or "0"
        return f"[{self.group.kind.value}{self.group.dual_dim}] {body}"


def _sign_of_parity(k: int) -> int:
    """Orthogonal/symplectic type of S_k as +1/-1: odd k is orthogonal."""
    return 1 if k % 2 == 1 else -1


def summand_type(rho: SupercuspidalLabel, a: int, b: int) -> Duality:
    """Self-duality type of rho (x) S_a (x) S_b.

    Computed as a +-1 product with orthogonal = +1, symplectic = -1.
    """
    if not rho.self_dual:
        return Duality.NOT_SELF_DUAL
    rho_sign = 1 if rho.duality is Duality.ORTHOGONAL else -1
    product = rho_sign * _sign_of_parity(a) * _sign_of_parity(b)
    return Duality.ORTHOGONAL if product == 1 else Duality.SYMPLECTIC


def is_good_parity(param: ArthurParameter) -> bool:
    """True iff every summand has x = 0 and is self-dual of orthogonal type.

    The dual groups SO_{n+1} and O_m are both orthogonal, so a summand is of
    good parity exactly when its type is orthogonal; this is the rule every
    worked instance satisfies.
    """
    for s in param.summands:
        if s.x != 0:
            return False
        if summand_type(param.label(s.rho), s.a, s.b) is not Duality.ORTHOGONAL:
            return False
    return True


def _dual_summand(param: ArthurParameter, s: Summand) -> Summand:
    return Summand(param.label(s.rho).partner_name(), -s.x, s.a, s.b)


def _pair_off_non_self_dual(param: ArthurParameter) -> list[tuple[Summand, Summand]]:
    """Match every summand that needs a dual partner; error if impossible."""
    bag: dict[Summand, int] = {}
    for s in param.summands:
        key = s
        bag[key] = bag.get(key, 0) + 1
    pairs = []
    for s in sorted(bag):
        while bag.get(s, 0) > 0:
            needs_partner = (s.x != 0
                             or not param.label(s.rho).self_dual)
            if not needs_partner:
                bag[s] = 0
                continue
            partner = _dual_summand(param, s)
            if partner == s:
                bag[s] = 0
                continue
            if bag.get(partner, 0) < 1:
                raise UnpairedSummand(
                    f"summand {s} has no dual partner {partner}")
            bag[s] -= 1
            bag[partner] -= 1
            pairs.append((s, partner))
    return pairs


@dataclass(frozen=True)
class Decomposition:
    nu_pos: tuple[Summand, ...]
    np: tuple[Summand, ...]
    gp: tuple[Summand, ...]


def decompose(param: ArthurParameter) -> Decomposition:
    """Split into positive-shift, non-good-parity-paired, and good-parity parts.

    The np part takes the lexicographically smaller member of each dual
    pair, so the choice is canonical.
    """
    _pair_off_non_self_dual(param)
    nu_pos, gp = [], []
    zero_rest: list[Summand] = []
    for s in param.summands:
        if s.x > 0:
            nu_pos.append(s)
        elif s.x < 0:
            continue  # the dual partner of a nu_pos summand
        else:
            lab = param.label(s.rho)
            if lab.self_dual and summand_type(lab, s.a, s.b) is Duality.ORTHOGONAL:
                gp.append(s)
            else:
                zero_rest.append(s)
    np_part: list[Summand] = []
    bag: dict[Summand, int] = {}
    for s in zero_rest:
        bag[s] = bag.get(s, 0) + 1
    for s in sorted(bag):
        while bag.get(s, 0) > 0:
            partner = _dual_summand(param, s)
            if partner == s:
                # self-dual of the wrong type: pairs with itself only if the
                # multiplicity is even
                if bag[s] % 2 != 0:
                    raise UnpairedSummand(
                        f"summand {s} of non-orthogonal type has odd multiplicity")
                np_part.extend([s] * (bag[s] // 2))
                bag[s] = 0
            else:
                if bag.get(partner, 0) < bag[s]:
                    raise UnpairedSummand(
                        f"summand {s} has no dual partner {partner}")
                np_part.extend([min(s, partner)] * bag[s])
                bag[partner] -= bag[s]
                bag[s] = 0
    return Decomposition(tuple(nu_pos), tuple(sorted(np_part)), tuple(gp))


def reassemble(param: ArthurParameter, dec: Decomposition) -> ArthurParameter:
    """Rebuild the full parameter from its decomposition (for round-trips)."""
    pieces = list(dec.nu_pos) + list(dec.np) + list(dec.gp)
    for s in dec.nu_pos:
        pieces.append(_dual_summand(param, s))
    for s in dec.np:
        partner = _dual_summand(param, s)
        pieces.append(partner)
    return param.with_summands(pieces)


def dual(param: ArthurParameter) -> ArthurParameter:
    """Swap the two SL2 factors: every summand's a and b trade places."""
    return param.with_summands(s.swapped() for s in param.summands)


def multisegment_matrix(s: Summand) -> list[list[Fraction]]:
    """Exponent matrix of the multisegment attached to one summand.

    ``a`` rows by ``b`` columns; entry (r, c) = (a-b)/2 + x - r + c with
    0-based r, c.  The orientation is pinned by the four corner values
    (a-b)/2+x, (a+b)/2-1+x, (-a-b)/2+1+x and (b-a)/2+x.
    """
    top_left = Fraction(s.a - s.b, 2) + s.x
    return [[top_left - r + c for c in range(s.b)] for r in range(s.a)]
