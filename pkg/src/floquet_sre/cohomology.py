"""Finite-Abelian-group machinery for symmetry-resolved probabilities.

Implements characters, two-cocycles, fixed-point defect partition
functions Z_g, the induced degeneracy structure of the symmetry-resolved
probabilities S_1(Q), and the driven cycling of degenerate charge
families.

For a group G = Z_{e_1} x ... x Z_{e_l} with a cocycle class labeled by
integers p_{ij} (0 <= p_ij < gcd(e_i, e_j)), the fixed-point overlaps

    Z_g = (1/|G|^3) [sum_s beta(sg)/(w(g,s) beta(s))]
                    [sum_s w(s,g) beta(s)/beta(sg)] f(g),
    f(g) = sum_s w(g,s)/w(s,g),

are real, satisfy Z_{g^-1} = conj(Z_g), and vanish outside a subgroup
H <= G.  Charges with identical characters on H form degenerate families
of S_1(Q); a drive pumping charge c permutes the family labels by
q' -> q' + c mod d.  G = Z_N x Z_N with the diagonal class label m (and
d = gcd(N, m)) is the first-class case; general products are supported by
the cocycle formula but the closed-form signatures are asserted only for
Z_N x Z_N.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

Element = tuple[int, ...]


class ConsistencyError(RuntimeError):
    """An exact structural identity failed beyond numerical tolerance."""


class GaugeInvarianceError(RuntimeError):
    """Signature changed under a coboundary; carries the offender."""

    def __init__(self, message: str, coboundary=None):
        super().__init__(message)
        self.coboundary = coboundary


@dataclass(frozen=True)
class AbelianGroup:
    """Direct product of cyclic groups, elements are integer tuples."""

    orders: tuple[int, ...]

    def __post_init__(self):
        if not self.orders or any(int(e) < 1 for e in self.orders):
            raise ValueError("cyclic factor orders must be positive integers")
        object.__setattr__(self, "orders", tuple(int(e) for e in self.orders))

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def identity(self) -> Element:
        return (0,) * len(self.orders)

    def elements(self) -> Iterable[Element]:
        return itertools.product(*(range(e) for e in self.orders))

    def as_element(self, g) -> Element:
        if isinstance(g, int):
            g = (g,)
        g = tuple(int(x) for x in g)
        if len(g) != len(self.orders):
            raise ValueError(f"element {g} has wrong rank for orders {self.orders}")
        if any(not 0 <= x < e for x, e in zip(g, self.orders)):
            raise ValueError(f"element {g} out of range for orders {self.orders}")
        return g

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % e for x, y, e in zip(a, b, self.orders))

    def inverse(self, a: Element) -> Element:
        return tuple((-x) % e for x, e in zip(a, self.orders))


@dataclass(frozen=True)
class SPTClass:
    """Cocycle class label p_{ij} (i < j) over a fixed group.

    For G = Z_N x Z_N the class reduces to the single integer m = p_01
    with d = gcd(N, m).
    """

    group: AbelianGroup
    p: tuple[tuple[tuple[int, int], int], ...]

    @classmethod
    def from_label(cls, group: AbelianGroup, m: int) -> "SPTClass":
        """Diagonal label for a two-factor group: p_{01} = m."""
        if len(group.orders) != 2:
            raise ValueError("from_label needs a two-factor group")
        d01 = math.gcd(*group.orders)
        return cls(group, (((0, 1), m % d01),))

    def __post_init__(self):
        orders = self.group.orders
        norm = []
        for (i, j), val in dict(self.p).items():
            if not 0 <= i < j < len(orders):
                raise ValueError(f"invalid factor pair ({i}, {j})")
            dij = math.gcd(orders[i], orders[j])
            if not 0 <= val < dij:
                raise ValueError(f"p_{{{i}{j}}} = {val} outside 0..{dij - 1}")
            if val:
                norm.append(((i, j), val))
        object.__setattr__(self, "p", tuple(sorted(norm)))

    def p_entry(self, i: int, j: int) -> int:
        return dict(self.p).get((i, j), 0)

    @property
    def m(self) -> int:
        if len(self.group.orders) != 2:
            raise ValueError("m is defined for two-factor groups only")
        return self.p_entry(0, 1)

    @property
    def d(self) -> int:
        """gcd(N, m) for Z_N x Z_N; controls the family coarsening."""
        n1, n2 = self.group.orders
        if n1 != n2:
            raise ValueError("d is defined for Z_N x Z_N only")
        return math.gcd(n1, self.m)


@dataclass
class DefectTable:
    """Z_g for every g, plus the support subgroup H = {g : Z_g != 0}."""

    group: AbelianGroup
    z: dict[Element, float]
    h_subgroup: frozenset


@dataclass
class SymResolvedSpectrum:
    """Map from charge label Q to S_n(Q)."""

    entries: dict
    moment_order: int

    def __post_init__(self):
        if self.moment_order == 1:
            vals = np.array(list(self.entries.values()), dtype=float)
            if abs(vals.sum() - 1.0) > 1e-8:
                raise ConsistencyError(f"S_1 values sum to {vals.sum()}, not 1")
            if vals.min() < -1e-8 or vals.max() > 1.0 + 1e-8:
                raise ConsistencyError("S_1 values outside [0, 1]")


@dataclass
class FamilyPartition:
    """Partition of the charge labels into degenerate families.

    ``families`` maps a representative label q' to the set of charges it
    contains; for Z_N x Z_N the label is the charge tuple mod d.
    """

    group: AbelianGroup
    families: dict[Element, frozenset]
    d: int | None = None


def character(group: AbelianGroup, q, g) -> complex:
    """chi_Q(g) = exp(2 pi i sum_i q_i g_i / e_i); multiplicative in both slots."""
    q = group.as_element(q)
    g = group.as_element(g)
    phase = sum(qi * gi / e for qi, gi, e in zip(q, g, group.orders))
    return complex(np.exp(2j * np.pi * phase))


def cocycle(group: AbelianGroup, spt: SPTClass, a, b) -> complex:
    """w(a, b) = exp(2 pi i sum_{i<j} p_ij a_i b_j / gcd(e_i, e_j)).

    Bilinear in both arguments, hence a two-cocycle:
    w(a,b) w(ab,c) = w(a,bc) w(b,c).
    """
    a = group.as_element(a)
    b = group.as_element(b)
    phase = 0.0
    for (i, j), pij in spt.p:
        phase += pij * a[i] * b[j] / math.gcd(group.orders[i], group.orders[j])
    return complex(np.exp(2j * np.pi * phase))


def _cocycle_table(group: AbelianGroup, spt: SPTClass):
    els = list(group.elements())
    index = {g: k for k, g in enumerate(els)}
    n = len(els)
    w = np.empty((n, n), dtype=complex)
    for ka, a in enumerate(els):
        for kb, b in enumerate(els):
            w[ka, kb] = cocycle(group, spt, a, b)
    return els, w, index


def defect_table(group: AbelianGroup, spt: SPTClass,
                 coboundary: Mapping[Element, complex] | None = None) -> DefectTable:
    """Evaluate the defect partition function Z_g for every g.

    ``coboundary`` is an arbitrary unit-modulus function beta on G
    (default beta = 1); it is pure gauge and cannot move the support H.
    Realness and the conjugation pairing Z_{g^-1} = conj(Z_g) are checked
    and a ConsistencyError raised if violated.  H is extracted by
    thresholding |Z_g| and its closure under the group law is asserted
    rather than assumed.
    """
    els, w, index = _cocycle_table(group, spt)
    n = len(els)
    if coboundary is None:
        beta = np.ones(n, dtype=complex)
    else:
        beta = np.array([coboundary[g] for g in els], dtype=complex)
        if np.max(np.abs(np.abs(beta) - 1.0)) > 1e-10:
            raise ValueError("coboundary values must lie on the unit circle")
    # shift[kg, ks] = index of s + g
    shift = np.empty((n, n), dtype=int)
    for kg, g in enumerate(els):
        for ks, s in enumerate(els):
            shift[kg, ks] = index[group.add(s, g)]

    zvals = {}
    size3 = float(group.size) ** 3
    for kg, g in enumerate(els):
        b_sg = beta[shift[kg]]
        s1 = np.sum(b_sg / (w[kg, :] * beta))
        s2 = np.sum(w[:, kg] * beta / b_sg)
        f = np.sum(w[kg, :] / w[:, kg])
        zvals[g] = complex(s1 * s2 * f) / size3

    zmax = max(abs(v) for v in zvals.values())
    for g, v in zvals.items():
        if abs(v.imag) > 1e-8 * max(1.0, zmax):
            raise ConsistencyError(f"Z_{g} = {v} is not real")
        vc = zvals[group.inverse(g)]
        if abs(vc.conjugate() - v) > 1e-8 * max(1.0, zmax):
            raise ConsistencyError(f"Z_{{g^-1}} != conj(Z_g) at g = {g}")

    h = frozenset(g for g, v in zvals.items() if abs(v) > 1e-9 * zmax)
    for a in h:
        for b in h:
            if group.add(a, b) not in h:
                raise ConsistencyError(
                    f"support of Z is not closed: {a} + {b} leaves H")
    return DefectTable(group, {g: v.real for g, v in zvals.items()}, h)


def sym_resolved_from_defects(table: DefectTable) -> SymResolvedSpectrum:
    """S_1(Q) = (1/|G|) sum_{g in H} chi_Q(g) Z_g over all charges."""
    group = table.group
    entries = {}
    for q in group.elements():
        val = sum(character(group, q, g) * table.z[g] for g in table.h_subgroup)
        val = complex(val) / group.size
        if abs(val.imag) > 1e-10:
            raise ConsistencyError(f"S_1({q}) has imaginary part {val.imag:.2e}")
        entries[q] = val.real
    return SymResolvedSpectrum(entries=entries, moment_order=1)


def signature(spectrum) -> tuple[int, ...]:
    """Multiset of degeneracy counts of the S_1 values, sorted ascending.

    Values are grouped at relative tolerance 1e-9 (with a tiny absolute
    floor so that exact zeros coalesce).
    """
    if isinstance(spectrum, SymResolvedSpectrum):
        values = list(spectrum.entries.values())
    else:
        values = list(spectrum)
    vals = np.sort(np.asarray(values, dtype=float))
    counts = []
    run = 1
    for prev, cur in zip(vals[:-1], vals[1:]):
        if abs(cur - prev) <= max(1e-9 * max(abs(cur), abs(prev)), 1e-13):
            run += 1
        else:
            counts.append(run)
            run = 1
    counts.append(run)
    return tuple(sorted(counts))


def closed_form_signature(group: AbelianGroup, m: int) -> tuple[int, ...]:
    """Predicted signature for Z_N x Z_N with class label m.

    With d = gcd(N, m) and the conjugation doubling between families
    q' != -q':

        d odd :  2(N/d)^2 repeated (d^2-1)/2 times, plus one (N/d)^2
        d even:  2(N/d)^2 repeated (d^2-4)/2 times, plus four (N/d)^2
    """
    n1, n2 = group.orders
    if n1 != n2:
        raise ValueError("closed form is asserted for Z_N x Z_N only")
    n = n1
    d = math.gcd(n, m % n) if m % n else n
    base = (n // d) ** 2
    if d % 2 == 1:
        sig = [2 * base] * ((d * d - 1) // 2) + [base]
    else:
        sig = [2 * base] * ((d * d - 4) // 2) + [base] * 4
    return tuple(sorted(sig))


def families(group: AbelianGroup, spt: SPTClass,
             table: DefectTable | None = None) -> FamilyPartition:
    """Group charges into families with identical characters on H.

    Two charges are in the same family iff their characters agree on every
    element of H; each family then carries |G|/|H| charges.  For
    Z_N x Z_N the families are labeled by the charge tuple mod d whenever
    H has the expected form (multiples of N/d in both indices); otherwise
    the lexicographically smallest member is used as the label.
    """
    if table is None:
        table = defect_table(group, spt)
    h = sorted(table.h_subgroup)
    lcm = math.lcm(*group.orders)

    def fingerprint(q):
        # exact integer character fingerprint on H
        return tuple(sum(qi * gi * (lcm // e) for qi, gi, e in zip(q, g, group.orders)) % lcm
                     for g in h)

    groups: dict[tuple, list] = {}
    for q in group.elements():
        groups.setdefault(fingerprint(q), []).append(q)

    expected = group.size // len(h)
    for members in groups.values():
        if len(members) != expected:
            raise ConsistencyError("family sizes differ from |G|/|H|")

    d = None
    orders = group.orders
    if len(orders) == 2 and orders[0] == orders[1]:
        d_cand = spt.d  # gcd(N, m), with gcd(N, 0) = N
        n = orders[0]
        expected_h = set(itertools.product(range(0, n, n // d_cand), repeat=2))
        if set(table.h_subgroup) == expected_h:
            d = d_cand

    fams = {}
    for members in groups.values():
        if d:
            label = tuple(x % d for x in members[0])
        else:
            label = min(members)
        fams[label] = frozenset(members)
    return FamilyPartition(group, fams, d)


def cycle_families(partition: FamilyPartition, c) -> dict[Element, Element]:
    """Permutation of family labels induced by a drive pumping charge c.

    q' -> q' + c (mod d) on the mod-d labels; charges equal mod d act
    identically, so the pumped charge is recognized only modulo d.
    """
    if partition.d is None:
        raise ValueError("cycling needs mod-d family labels (Z_N x Z_N case)")
    c = partition.group.as_element(c)
    d = partition.d
    perm = {}
    for label in partition.families:
        perm[label] = tuple((x + ci) % d for x, ci in zip(label, c))
    return perm


def fspt_count(group: AbelianGroup) -> tuple[int, int]:
    """(|H^2[G, U(1)]|, number of driven phases) for a finite Abelian G.

    The static classes number prod_{i<j} gcd(e_i, e_j); the drive adds a
    pumped charge in G, multiplying the count by |G|.
    """
    h2 = 1
    for i, j in itertools.combinations(range(len(group.orders)), 2):
        h2 *= math.gcd(group.orders[i], group.orders[j])
    return h2, h2 * group.size


def random_coboundary(group: AbelianGroup, rng: np.random.Generator) -> dict[Element, complex]:
    """Unit-modulus function on G with beta(identity) = 1."""
    beta = {g: complex(np.exp(2j * np.pi * rng.uniform())) for g in group.elements()}
    beta[group.identity] = 1.0 + 0.0j
    return beta


def gauge_invariance_check(group: AbelianGroup, spt: SPTClass,
                           trials: int, seed: int = 0) -> bool:
    """Signature stability under random coboundaries.

    Recomputes the signature with ``trials`` random unit-modulus
    coboundaries and requires all of them to agree.  (The special gauge
    beta = 1 can collide distinct family values at exact zeros, so the
    generic sampled gauges are the meaningful comparison set.)
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    reference = None
    for _ in range(trials):
        beta = random_coboundary(group, rng)
        sig = signature(sym_resolved_from_defects(defect_table(group, spt, beta)))
        if reference is None:
            reference = sig
        elif sig != reference:
            raise GaugeInvarianceError(
                f"signature changed from {reference} to {sig}", coboundary=beta)
    return True
