"""Finite magnetic (anti-unitary) groups given extensionally by a Cayley table.

A magnetic group of order n is stored as an n x n multiplication table of
element ids together with one anti-unitary flag bit per element.  When any
flag is set, the unitary elements must form a halving subgroup H and the
group splits as G = H + T0*H for a distinguished anti-unitary element T0.
Everything downstream (characters, class operators, coset sums) is a plain
sum over element ids, so groups are kept small and fully tabulated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    ElementNotInSubgroup,
    FlagInconsistent,
    NoHalvingSubgroup,
    NoT0,
    NotAGroup,
    NotASubgroupEmbedding,
)

#: Default absolute tolerance for cocycle validation.  Factor systems are
#: exact-phase tables, so violations are either ~0 or O(1).
COCYCLE_TOL = 1e-10


@dataclass
class MagneticGroup:
    """Validated finite group with anti-unitary structure.

    Attributes
    ----------
    cayley : ``(n, n)`` int ndarray
        ``cayley[a, b]`` is the id of the product ``a * b``.
    antiunitary : ``(n,)`` int ndarray
        Flag ``s(g)``: 1 for anti-unitary elements, 0 otherwise.
    labels : tuple of str
        Human-readable element names.
    t0 : int or None
        Id of the distinguished anti-unitary element (minimal order, then
        lowest id).  ``None`` for purely unitary groups.
    h_elements : ``(|H|,)`` int ndarray
        Ids of the unitary elements, ascending.
    subgroup_chain : tuple of tuple of int
        Ascending chain of subgroups of H used to resolve degenerate labels
        during reduction.  Defaults to ``({identity}, H)``.
    """

    cayley: np.ndarray
    antiunitary: np.ndarray
    labels: tuple
    identity: int
    t0: Optional[int]
    inverse: np.ndarray
    element_order: np.ndarray
    h_elements: np.ndarray
    subgroup_chain: tuple
    h_classes: tuple = field(default=())

    @property
    def order(self) -> int:
        return self.cayley.shape[0]

    @property
    def is_magnetic(self) -> bool:
        return self.t0 is not None

    @property
    def halving_order(self) -> int:
        return len(self.h_elements)

    def mul(self, a: int, b: int) -> int:
        return int(self.cayley[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def s(self, g: int) -> int:
        return int(self.antiunitary[g])

    @property
    def sigma(self) -> Optional[int]:
        """t0 squared; lies in H.  None for purely unitary groups."""
        if self.t0 is None:
            return None
        return self.mul(self.t0, self.t0)

    @property
    def coset_elements(self) -> np.ndarray:
        """Ids of the anti-unitary elements, ascending."""
        return np.nonzero(self.antiunitary == 1)[0]

    def conjugate_by_t0(self, h: int) -> int:
        """Return the id of ``t0^-1 * h * t0`` for a unitary element h."""
        if self.t0 is None:
            raise NoT0("group has no anti-unitary elements")
        if self.s(h) != 0:
            raise ElementNotInSubgroup(f"element {h} is not in the unitary subgroup")
        t0i = self.inv(self.t0)
        return self.mul(self.mul(t0i, h), self.t0)

    def label(self, g: int) -> str:
        return self.labels[g]


def _element_orders(cayley: np.ndarray, identity: int) -> np.ndarray:
    n = cayley.shape[0]
    orders = np.zeros(n, dtype=int)
    for g in range(n):
        k, acc = 1, g
        while acc != identity:
            acc = cayley[acc, g]
            k += 1
            if k > n:
                raise NotAGroup(f"element {g} generates no identity within |G| steps")
        orders[g] = k
    return orders


def build_group(cayley, flags, labels=None, subgroup_chain=None) -> MagneticGroup:
    """Validate a Cayley table plus anti-unitary flags into a MagneticGroup.

    Parameters
    ----------
    cayley : ``(n, n)`` array_like of int
        Multiplication table, ``cayley[a][b] = id(a * b)``.
    flags : length-n array_like of {0, 1}
        Anti-unitary flag per element.
    labels : sequence of str, optional
        Element names; defaults to ``g0 .. g{n-1}``.
    subgroup_chain : sequence of sequences of int, optional
        Ascending chain of subgroups of H.  Defaults to ``[{identity}, H]``.

    Raises
    ------
    NotAGroup, FlagInconsistent, NoHalvingSubgroup
    """
    table = np.asarray(cayley, dtype=int)
    s = np.asarray(flags, dtype=int)
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise NotAGroup("Cayley table must be a nonempty square matrix")
    n = table.shape[0]
    if s.shape != (n,):
        raise DimensionMismatch("flag vector length does not match group order")
    if table.min() < 0 or table.max() >= n:
        raise NotAGroup("Cayley table entries out of range")
    if not np.isin(s, (0, 1)).all():
        raise FlagInconsistent("flags must be 0 or 1")

    # Each row and column must be a permutation (cancellativity).
    ids = np.arange(n)
    for a in range(n):
        if not np.array_equal(np.sort(table[a]), ids) or not np.array_equal(np.sort(table[:, a]), ids):
            raise NotAGroup(f"row/column {a} is not a permutation of the element ids")

    # Associativity by full triple scan; n <= ~100 keeps this cheap.
    left = table[table, :]            # left[a, b, c]  = (a b) c
    right = table[:, table]           # right[a, b, c] = a (b c)
    if not np.array_equal(left, right):
        bad = np.argwhere(left != right)[0]
        raise NotAGroup(f"associativity fails at triple {tuple(int(x) for x in bad)}")

    # Unique two-sided identity.
    id_candidates = [e for e in range(n)
                     if np.array_equal(table[e], ids) and np.array_equal(table[:, e], ids)]
    if len(id_candidates) != 1:
        raise NotAGroup(f"expected exactly one identity, found {len(id_candidates)}")
    identity = id_candidates[0]

    # Unique inverses.
    inverse = np.zeros(n, dtype=int)
    for a in range(n):
        invs = np.nonzero(table[a] == identity)[0]
        if len(invs) != 1 or table[invs[0], a] != identity:
            raise NotAGroup(f"element {a} lacks a unique two-sided inverse")
        inverse[a] = invs[0]

    # Flags must be a homomorphism onto Z2.
    if not np.array_equal(s[table], s[:, None] ^ s[None, :]):
        raise FlagInconsistent("s(g1 g2) != s(g1) xor s(g2) for some pair")

    h_elements = np.nonzero(s == 0)[0]
    anti = np.nonzero(s == 1)[0]
    if len(anti) > 0 and 2 * len(h_elements) != n:
        raise NoHalvingSubgroup(
            f"unitary part has {len(h_elements)} of {n} elements, expected {n // 2}")

    orders = _element_orders(table, identity)

    t0 = None
    if len(anti) > 0:
        # Minimal element order first, lowest id as the tie-break.
        t0 = int(min(anti, key=lambda g: (orders[g], g)))

    if labels is None:
        labels = tuple(f"g{k}" for k in range(n))
    else:
        labels = tuple(str(x) for x in labels)
        if len(labels) != n:
            raise DimensionMismatch("label count does not match group order")
        if len(set(labels)) != n:
            raise DimensionMismatch("element labels must be unique")

    if subgroup_chain is None:
        chain = ((identity,), tuple(int(h) for h in h_elements))
    else:
        chain = tuple(tuple(sorted(int(x) for x in sub)) for sub in subgroup_chain)

    h_set = set(int(h) for h in h_elements)
    prev = None
    for sub in chain:
        sub_set = set(sub)
        if not sub_set <= h_set:
            raise ElementNotInSubgroup("subgroup chain member leaves the unitary part")
        for a in sub:
            for b in sub:
                if int(table[a, b]) not in sub_set:
                    raise NotAGroup(f"chain member {sub} is not closed under multiplication")
        if prev is not None and not prev <= sub_set:
            raise NotAGroup("subgroup chain is not ascending")
        prev = sub_set

    group = MagneticGroup(
        cayley=table,
        antiunitary=s,
        labels=labels,
        identity=identity,
        t0=t0,
        inverse=inverse,
        element_order=orders,
        h_elements=h_elements,
        subgroup_chain=chain,
    )
    group.h_classes = conjugacy_classes(group, h_elements)
    return group


def conjugacy_classes(group: MagneticGroup, members) -> tuple:
    """Conjugacy classes of the subgroup ``members``, ordered by lowest id."""
    member_set = set(int(x) for x in members)
    for a in member_set:
        for b in member_set:
            if group.mul(a, b) not in member_set:
                raise NotAGroup("conjugacy classes requested for a non-closed subset")
    classes = []
    seen = set()
    for h in sorted(member_set):
        if h in seen:
            continue
        cls = sorted({group.mul(group.mul(a, h), group.inv(a)) for a in member_set})
        classes.append(tuple(cls))
        seen.update(cls)
    return tuple(classes)


def conjugate_by_t0(group: MagneticGroup, h: int) -> int:
    """Id of ``t0^-1 h t0``; a bijection of H preserving its class structure."""
    return group.conjugate_by_t0(h)


@dataclass
class FactorSystem:
    """U(1)-valued 2-cocycle ``omega(g1, g2)`` on G x G.

    The table must obey the twisted cocycle equation
    ``omega^[s(g1)](g2, g3) omega^-1(g1 g2, g3) omega(g1, g2 g3) omega^-1(g1, g2) = 1``
    where the exponent ``[s]`` means complex conjugation when s = 1.
    """

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise DimensionMismatch("factor system must be a square table")

    @classmethod
    def trivial(cls, n: int) -> "FactorSystem":
        return cls(np.ones((n, n), dtype=complex))

    @property
    def order(self) -> int:
        return self.values.shape[0]

    def __call__(self, a: int, b: int) -> complex:
        return complex(self.values[a, b])


@dataclass
class CocycleReport:
    max_modulus_error: float
    max_violation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_modulus_error <= self.tol and self.max_violation <= self.tol


def validate_cocycle(group: MagneticGroup, omega: FactorSystem,
                     tol: float = COCYCLE_TOL) -> CocycleReport:
    """Check unit modulus and the twisted cocycle equation over all triples.

    Returns the maximum absolute violation; the check is gauge-covariant, so
    rephasing a valid factor system keeps the violation at zero.
    """
    n = group.order
    w = omega.values
    if w.shape != (n, n):
        raise DimensionMismatch("factor system size does not match group order")
    modulus_err = float(np.abs(np.abs(w) - 1.0).max())

    table = group.cayley
    s = group.antiunitary
    # lhs[a,b,c] = w^[s(a)](b,c) * conj(w(ab,c)) * w(a,bc) * conj(w(a,b))
    w_bc = np.broadcast_to(w[None, :, :], (n, n, n))
    w_bc = np.where(s[:, None, None] == 1, np.conj(w_bc), w_bc)
    w_ab_c = w[table, :]                 # [a,b,c] -> w(ab, c)
    w_a_bc = w[:, table]                 # [a,b,c] -> w(a, bc)
    w_ab = np.broadcast_to(w[:, :, None], (n, n, n))
    lhs = w_bc * np.conj(w_ab_c) * w_a_bc * np.conj(w_ab)
    violation = float(np.abs(lhs - 1.0).max())
    return CocycleReport(max_modulus_error=modulus_err, max_violation=violation, tol=tol)


def restricted_group(group: MagneticGroup, element_ids,
                     labels=None) -> tuple[MagneticGroup, np.ndarray]:
    """Build the subgroup spanned by ``element_ids`` as its own MagneticGroup.

    Returns the new group plus the embedding array mapping new ids to ids in
    the parent.  Raises NotASubgroupEmbedding when the subset is not closed.
    """
    emb = np.asarray(sorted(set(int(x) for x in element_ids)), dtype=int)
    if emb.size == 0 or emb.min() < 0 or emb.max() >= group.order:
        raise NotASubgroupEmbedding("element ids out of range")
    pos = {int(g): k for k, g in enumerate(emb)}
    m = len(emb)
    table = np.zeros((m, m), dtype=int)
    for a in range(m):
        for b in range(m):
            prod = group.mul(int(emb[a]), int(emb[b]))
            if prod not in pos:
                raise NotASubgroupEmbedding(
                    f"subset not closed: {group.label(int(emb[a]))} * "
                    f"{group.label(int(emb[b]))} falls outside")
            table[a, b] = pos[prod]
    flags = group.antiunitary[emb]
    if labels is None:
        labels = [group.label(int(g)) for g in emb]
    sub = build_group(table, flags, labels=labels)
    return sub, emb


def verify_embedding(group: MagneticGroup, sub: MagneticGroup, embedding) -> np.ndarray:
    """Check that ``embedding`` maps ``sub`` into ``group`` as a magnetic subgroup."""
    emb = np.asarray(embedding, dtype=int)
    if emb.shape != (sub.order,):
        raise NotASubgroupEmbedding("embedding length must equal subgroup order")
    if emb.min() < 0 or emb.max() >= group.order or len(set(emb.tolist())) != sub.order:
        raise NotASubgroupEmbedding("embedding must be injective into the parent ids")
    for a in range(sub.order):
        if group.s(int(emb[a])) != sub.s(a):
            raise NotASubgroupEmbedding(f"flag mismatch at subgroup element {a}")
        for b in range(sub.order):
            if group.mul(int(emb[a]), int(emb[b])) != int(emb[sub.mul(a, b)]):
                raise NotASubgroupEmbedding(f"product mismatch at pair ({a}, {b})")
    return emb
