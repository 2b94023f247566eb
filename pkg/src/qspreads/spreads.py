"""Spreads of V(n, q) and partial parallelisms.

A k-spread is a set of N = (q^n - 1)/(q^k - 1) k-dimensional subspaces
covering every nonzero vector exactly once; a partial k-parallelism is a
set of spreads that are pairwise disjoint as subspace sets.  The standard
spread comes from viewing V(n, q) as the field F_{q^n}: its members are
V_i = omega**i * F_{q^k}, so membership of a nonzero field element is just
its power index mod N.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import CertificationError
from .field import FieldTower
from .linalg import Matrix, Subspace, apply_subspace, intersection_dim

_COVER_COUNT_CAP = 1 << 12  # above this many vectors, certify pairwise instead


def spread_size(n: int, k: int, q: int) -> int:
    if n % k != 0:
        raise ValueError(f"k = {k} does not divide n = {n}")
    return (q**n - 1) // (q**k - 1)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a certification pass; ``reason`` names the first failure."""

    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


class Spread:
    """An immutable certified k-spread; members are kept sorted by key."""

    __slots__ = ("members", "n", "k", "q", "key_set")

    def __init__(self, members, *, certified: bool = False):
        members = sorted(members, key=lambda s: s.key)
        if not members:
            raise ValueError("a spread needs at least one member")
        self.members = tuple(members)
        self.n = members[0].n
        self.k = members[0].dim
        self.q = members[0].field.q
        self.key_set = frozenset(s.key for s in members)
        if not certified:
            res = certify_spread(self.members)
            if not res:
                raise CertificationError(f"not a spread: {res.reason}")

    @property
    def size(self) -> int:
        return len(self.members)

    def __eq__(self, other):
        return (isinstance(other, Spread) and self.n == other.n
                and self.q == other.q and self.key_set == other.key_set)

    def __hash__(self):
        return hash((self.n, self.q, self.key_set))

    def __repr__(self):
        return f"Spread(n={self.n}, k={self.k}, q={self.q}, size={self.size})"


def desarguesian_spread(tower: FieldTower) -> Spread:
    """The standard spread {omega**i * F_{q^k} : 0 <= i < N}.

    Member i has basis rows coords(omega**i * theta**j), j < k, with theta
    the subfield generator omega**N.
    """
    field = tower.scalar_field
    theta = tower.subfield_basis_qk()
    members = []
    for i in range(tower.N):
        wi = i % tower.m if tower.m else 0
        rows = [tower.coords_over_q(tower.mul(wi, t)) for t in theta]
        members.append(Subspace.from_rows(field, rows))
    spread = Spread(members)
    return spread


def certify_spread(members, *, expected_k: int | None = None) -> CheckResult:
    """Accept iff the members form a k-spread of their ambient space.

    Size must equal N = (q^n-1)/(q^k-1) and all pairwise intersections must
    be trivial.  At small sizes the equivalent exact-cover count is used
    instead of the quadratic pairwise sweep.
    """
    members = list(members)
    if not members:
        return CheckResult(False, "empty member list")
    n, q = members[0].n, members[0].field.q
    k = members[0].dim
    for idx, s in enumerate(members):
        if s.n != n or s.field.q != q:
            raise ValueError(f"member {idx} has mixed ambient (n, q)")
        if s.dim != k:
            return CheckResult(False, f"member {idx} has dimension {s.dim} != {k}")
    if expected_k is not None and k != expected_k:
        return CheckResult(False, f"members have dimension {k}, expected {expected_k}")
    if n % k != 0:
        return CheckResult(False, f"k = {k} does not divide n = {n}")
    want = spread_size(n, k, q)
    if len(members) != want:
        return CheckResult(
            False, f"size {len(members)} != (q^n-1)/(q^k-1) = {want}")
    if len(set(s.key for s in members)) != len(members):
        return CheckResult(False, "duplicate members")
    if q**n <= _COVER_COUNT_CAP:
        seen = set()
        for idx, s in enumerate(members):
            for v in s.vectors():
                if any(v):
                    if v in seen:
                        culprit = _first_overlapping_pair(members)
                        return CheckResult(
                            False,
                            f"members {culprit[0]} and {culprit[1]} share a "
                            f"nonzero vector")
                    seen.add(v)
        if len(seen) != q**n - 1:
            return CheckResult(False, "nonzero vectors not fully covered")
    else:
        pair = _first_overlapping_pair(members)
        if pair is not None:
            return CheckResult(
                False, f"members {pair[0]} and {pair[1]} intersect "
                f"nontrivially")
    return CheckResult(True)


def _first_overlapping_pair(members):
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            if intersection_dim(members[i], members[j]) > 0:
                return (i, j)
    return None


def spread_image(m: Matrix, s: Spread) -> Spread:
    """The spread {M(U) : U in s}; invertible maps send spreads to spreads,
    and the result is certified to enforce exactly that."""
    members = [apply_subspace(m, u) for u in s.members]
    return Spread(members)


def spreads_disjoint(s1: Spread, s2: Spread) -> bool:
    """True iff the two spreads share no subspace."""
    if s1.n != s2.n or s1.q != s2.q:
        raise ValueError("spreads live in different ambient spaces")
    return s1.key_set.isdisjoint(s2.key_set)


@dataclass
class PartialParallelism:
    """A certified list of pairwise disjoint spreads plus provenance."""

    spreads: tuple[Spread, ...]
    tower_descriptor: dict
    meta: dict = dc_field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.spreads)

    def __len__(self):
        return len(self.spreads)


def certify_parallelism(spreads) -> CheckResult:
    """Re-validate every spread and the pairwise disjointness of the family."""
    spreads = list(spreads)
    for idx, s in enumerate(spreads):
        res = certify_spread(s.members)
        if not res:
            return CheckResult(False, f"spread {idx}: {res.reason}")
    for i in range(len(spreads)):
        for j in range(i + 1, len(spreads)):
            shared = spreads[i].key_set & spreads[j].key_set
            if shared:
                key = sorted(shared)[0]
                return CheckResult(
                    False,
                    f"spreads {i} and {j} share subspace key {key.hex()}")
    return CheckResult(True)
