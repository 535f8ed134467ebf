"""Exact construction of prime-modulus point sets in [0,1)^d.

Five families are provided, all stored as exact rationals (integer
numerator vectors over one modulus per point):

* ``pset``        x_j = ({j/p}, {j^2/p}, ..., {j^d/p}) for j in Z_p.
* ``param-pset``  coordinate i of x_j is
                  (sum_{h<i} eps_h a_h j^h + a_i j^i) mod p over p,
                  reducing to ``pset`` at a = (1,...,1), eps = (0,...,0).
* ``pq``          union of two constituent sets whose prime moduli sum
                  to an even number; duplicates removed exactly, keeping
                  the copy from the first constituent.
* ``qsquare``     the param-pset polynomial evaluated mod p^2 with
                  j = 0..p^2-1 and denominator p^2.
* ``rsquare``     the indexed family over pairs (j, k), coordinate i
                  equal to ((sum_{h<i} eps_h a_h j^{h-1} + a_i j^{i-1}) k)
                  mod p over p.  Repeated coordinates are retained so the
                  family always has p^2 entries; set operations use the
                  deduplicated view.

Cross-modulus point equality is decided by exact cross-multiplication,
never floating point.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np

from .errors import DegenerateParamsError, DimensionMismatchError, SameEpsilonError
from .numtheory import is_prime

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PSetParams:
    """Parameter bundle (d, p, a, eps) selecting one generalized set.

    a has d entries in Z_p; eps has d-1 entries in {0,1}.  The exponential
    sum bound is certified only when every a_i is a unit mod p (see
    ``weil_certified``); zero entries are accepted because the equality
    and intersection predicates are defined for them.
    """

    d: int
    p: int
    a: tuple[int, ...]
    eps: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        object.__setattr__(self, "eps", tuple(int(x) for x in self.eps))
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if len(self.a) != self.d:
            raise ValueError(f"a must have {self.d} entries, got {len(self.a)}")
        if len(self.eps) != self.d - 1:
            raise ValueError(
                f"eps must have {self.d - 1} entries, got {len(self.eps)}"
            )
        if not all(0 <= x < self.p for x in self.a):
            raise ValueError(f"entries of a must lie in [0, {self.p - 1}]")
        if not all(x in (0, 1) for x in self.eps):
            raise ValueError("entries of eps must be bits")

    @property
    def weil_certified(self) -> bool:
        """True when every a_i is a unit, so the sum bounds apply."""
        return all(1 <= x <= self.p - 1 for x in self.a)


def classical_params(d: int, p: int) -> PSetParams:
    """Parameters selecting the classical set: a = ones, eps = zeros."""
    return PSetParams(d, p, (1,) * d, (0,) * (d - 1))


@dataclass(frozen=True, eq=False)
class RationalPoint:
    """A point of [0,1)^d held as d integer numerators over one modulus."""

    numerators: tuple[int, ...]
    denominator: int
    key: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be positive")
        if not all(0 <= n < self.denominator for n in self.numerators):
            raise ValueError("numerators must lie in [0, denominator)")
        # Reduced form; hashing through it keeps hash consistent with the
        # cross-multiplied equality below.
        den = self.denominator
        object.__setattr__(
            self,
            "key",
            tuple((n // (g := gcd(n, den)), den // g) for n in self.numerators),
        )

    @property
    def dim(self) -> int:
        return len(self.numerators)

    def __eq__(self, other):
        if not isinstance(other, RationalPoint):
            return NotImplemented
        if len(self.numerators) != len(other.numerators):
            return False
        da, db = self.denominator, other.denominator
        return all(
            na * db == nb * da
            for na, nb in zip(self.numerators, other.numerators)
        )

    def __hash__(self):
        return hash(self.key)

    def as_floats(self) -> tuple[float, ...]:
        return tuple(n / self.denominator for n in self.numerators)


@dataclass(frozen=True)
class Provenance:
    """Which construction produced a point set, and with what parameters."""

    family: str
    d: int
    p: int | None = None
    q: int | None = None
    a: tuple[int, ...] | None = None
    eps: tuple[int, ...] | None = None
    b: tuple[int, ...] | None = None
    eps2: tuple[int, ...] | None = None
    weil_certified: bool | None = None
    cardinality_certified: bool | None = None

    def describe(self) -> str:
        bits = [f"d={self.d}"]
        if self.p is not None:
            bits.append(f"p={self.p}")
        if self.q is not None:
            bits.append(f"q={self.q}")
        if self.a is not None:
            bits.append(f"a={list(self.a)}")
        if self.eps is not None:
            bits.append(f"eps={list(self.eps)}")
        if self.b is not None:
            bits.append(f"b={list(self.b)}")
        if self.eps2 is not None:
            bits.append(f"eps2={list(self.eps2)}")
        return f"{self.family}({', '.join(bits)})"


@dataclass(frozen=True)
class PointSet:
    """Ordered collection of exact rational points plus provenance.

    ``points`` is the construction-order sequence.  Every family except
    ``rsquare`` stores it deduplicated; ``rsquare`` keeps the full indexed
    family (its exponential sums run over all p^2 entries) and exposes
    ``distinct`` for set semantics.
    """

    points: tuple[RationalPoint, ...]
    provenance: Provenance

    @property
    def d(self) -> int:
        return self.provenance.d

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def distinct(self) -> tuple[RationalPoint, ...]:
        """First-occurrence deduplicated view."""
        seen: set = set()
        out = []
        for pt in self.points:
            if pt.key not in seen:
                seen.add(pt.key)
                out.append(pt)
        return tuple(out)

    @cached_property
    def key_set(self) -> frozenset:
        return frozenset(pt.key for pt in self.points)

    @property
    def cardinality(self) -> int:
        """Number of distinct points."""
        return len(self.distinct)

    def numerator_matrix(self) -> np.ndarray:
        """(n_entries, d) int64 array of numerators in stored order."""
        return np.array([pt.numerators for pt in self.points], dtype=np.int64)

    def denominators(self) -> np.ndarray:
        return np.array([pt.denominator for pt in self.points], dtype=np.int64)


def _coordinate_numerators(params: PSetParams, j: int, modulus: int) -> tuple:
    """Numerators of the point indexed j: prefix sums of eps_h a_h j^h."""
    nums = []
    prefix = 0
    jp = 1
    for i in range(1, params.d + 1):
        jp = jp * j % modulus
        term = params.a[i - 1] * jp % modulus
        nums.append((prefix + term) % modulus)
        if i < params.d and params.eps[i - 1]:
            prefix = (prefix + term) % modulus
    return tuple(nums)


def _dedup(points) -> tuple:
    seen: set = set()
    out = []
    for pt in points:
        if pt.key not in seen:
            seen.add(pt.key)
            out.append(pt)
    return tuple(out)


def parameterized_pset(params: PSetParams) -> PointSet:
    """The p points indexed by j in Z_p for the given parameters."""
    p = params.p
    pts = _dedup(
        RationalPoint(_coordinate_numerators(params, j, p), p) for j in range(p)
    )
    prov = Provenance(
        family="param-pset",
        d=params.d,
        p=p,
        a=params.a,
        eps=params.eps,
        weil_certified=params.weil_certified,
    )
    return PointSet(pts, prov)


def classical_pset(d: int, p: int) -> PointSet:
    """x_j = ({j/p}, ..., {j^d/p}) for j in Z_p."""
    params = classical_params(d, p)
    pts = tuple(
        RationalPoint(_coordinate_numerators(params, j, p), p) for j in range(p)
    )
    prov = Provenance(
        family="pset", d=d, p=p, a=params.a, eps=params.eps, weil_certified=True
    )
    return PointSet(pts, prov)


def qsquare_set(params: PSetParams) -> PointSet:
    """p^2 points indexed by j in Z_{p^2}, denominators p^2."""
    m = params.p * params.p
    pts = _dedup(
        RationalPoint(_coordinate_numerators(params, j, m), m) for j in range(m)
    )
    prov = Provenance(
        family="qsquare",
        d=params.d,
        p=params.p,
        a=params.a,
        eps=params.eps,
        weil_certified=params.weil_certified,
    )
    return PointSet(pts, prov)


def rsquare_set(params: PSetParams) -> PointSet:
    """Indexed family over (j, k) pairs, j outer, k inner; p^2 entries.

    Coordinate values can repeat across entries; the full family is kept.
    """
    p = params.p
    pts = []
    for j in range(p):
        base = []
        prefix = 0
        jp = 1  # j^(i-1)
        for i in range(1, params.d + 1):
            term = params.a[i - 1] * jp % p
            base.append((prefix + term) % p)
            if i < params.d and params.eps[i - 1]:
                prefix = (prefix + term) % p
            jp = jp * j % p
        for k in range(p):
            pts.append(RationalPoint(tuple(bi * k % p for bi in base), p))
    prov = Provenance(
        family="rsquare",
        d=params.d,
        p=p,
        a=params.a,
        eps=params.eps,
        weil_certified=params.weil_certified,
    )
    return PointSet(tuple(pts), prov)


@dataclass(frozen=True)
class EquivalenceWitness:
    """Certificate that two parameterized sets coincide as sets.

    ``c`` is the scaling residue with b_j c^j = a_j mod p at every index
    the characterization constrains; it is None when equality was
    established by exhaustive point comparison only (the a_1 = 0 fallback).
    """

    c: int | None
    exhaustive: bool = False


def _witness_scan(a, b, p, indices) -> int | None:
    """Smallest c in Z_p^* with b_j c^j = a_j mod p at the given indices."""
    idx = sorted(indices)
    for c in range(1, p):
        cj = 1
        ok = True
        prev = 0
        for j in idx:
            cj = cj * pow(c, j - prev, p) % p
            prev = j
            if b[j - 1] * cj % p != a[j - 1] % p:
                ok = False
                break
        if ok:
            return c
    return None


def find_equivalence_witness(
    paramsA: PSetParams, paramsB: PSetParams
) -> EquivalenceWitness | None:
    """Decide whether two parameter bundles generate the same point set.

    Returns the smallest witness (None result means not equivalent).  For
    equal bit vectors this is the scaling characterization; for different
    bit vectors equality additionally forces a_j = b_j = 0 at every
    mismatched index.  When a_1 = 0 with mismatched bits the
    characterization is not available and the comparison falls back to
    exhaustive set equality.
    """
    if (paramsA.d, paramsA.p) != (paramsB.d, paramsB.p):
        raise DimensionMismatchError("parameter bundles must share d and p")
    a, b, p, d = paramsA.a, paramsB.a, paramsA.p, paramsA.d
    if paramsA.eps == paramsB.eps:
        c = _witness_scan(a, b, p, range(1, d + 1))
        return None if c is None else EquivalenceWitness(c)

    mismatched = [
        j for j in range(1, d) if paramsA.eps[j - 1] != paramsB.eps[j - 1]
    ]
    if a[0] % p != 0:
        if any(a[j - 1] % p or b[j - 1] % p for j in mismatched):
            return None
        constrained = [j for j in range(1, d + 1) if j not in mismatched]
        c = _witness_scan(a, b, p, constrained)
        return None if c is None else EquivalenceWitness(c)

    # a_1 = 0: the characterization is stated only for a_1 != 0, so decide
    # by exhaustive comparison and report a scaling residue when one exists.
    log.info(
        "equivalence fallback to exhaustive comparison (a_1 = 0, eps differ): %s vs %s",
        paramsA,
        paramsB,
    )
    setA = parameterized_pset(paramsA)
    setB = parameterized_pset(paramsB)
    if setA.key_set != setB.key_set:
        return None
    if not any(a[j - 1] % p or b[j - 1] % p for j in mismatched):
        constrained = [j for j in range(1, d + 1) if j not in mismatched]
        c = _witness_scan(a, b, p, constrained)
        if c is not None:
            return EquivalenceWitness(c, exhaustive=True)
    return EquivalenceWitness(None, exhaustive=True)


def default_pq_partner(paramsA: PSetParams) -> PSetParams:
    """Deterministic partner choice for the equal-modulus union.

    Tries b = (g, 1, ..., 1) for ascending g and returns the first
    non-equivalent bundle; if no g works (this happens at p = 3, d = 2),
    scans [1, p-1]^d lexicographically.
    """
    p, d = paramsA.p, paramsA.d
    for g in range(1, p):
        cand = PSetParams(d, p, (g,) + (1,) * (d - 1), paramsA.eps)
        if find_equivalence_witness(paramsA, cand) is None:
            return cand
    idx = [1] * d
    while True:
        cand = PSetParams(d, p, tuple(idx), paramsA.eps)
        if find_equivalence_witness(paramsA, cand) is None:
            return cand
        pos = d - 1
        while pos >= 0 and idx[pos] == p - 1:
            idx[pos] = 1
            pos -= 1
        if pos < 0:
            raise DegenerateParamsError(
                f"no non-equivalent partner exists for {paramsA}"
            )
        idx[pos] += 1


def pq_set(
    d: int,
    p: int,
    q: int,
    paramsA: PSetParams | None = None,
    paramsB: PSetParams | None = None,
) -> PointSet:
    """Union of two constituent sets with primes p + q even.

    Distinct primes use the classical sets; equal primes use two
    parameterized sets (defaults chosen by ``default_pq_partner`` when
    omitted).  Raises DegenerateParamsError when the two parameterized
    sets coincide.
    """
    if not is_prime(p) or not is_prime(q):
        raise ValueError(f"p and q must be prime, got {p}, {q}")
    if p != q:
        if paramsA is not None or paramsB is not None:
            raise ValueError("parameter bundles are only used when p == q")
        A = classical_pset(d, p)
        B = classical_pset(d, q)
        provA = provB = None
        certified_inputs = True
    else:
        if paramsA is None and paramsB is None:
            paramsA = classical_params(d, p)
            paramsB = default_pq_partner(paramsA)
        if paramsA is None or paramsB is None:
            raise ValueError("provide both parameter bundles or neither")
        if (paramsA.d, paramsA.p) != (d, p) or (paramsB.d, paramsB.p) != (d, p):
            raise DimensionMismatchError("parameter bundles must match d and p")
        w = find_equivalence_witness(paramsA, paramsB)
        if w is not None:
            raise DegenerateParamsError(
                f"the two parameter vectors generate the same set (witness c={w.c})",
                witness=w,
            )
        A = parameterized_pset(paramsA)
        B = parameterized_pset(paramsB)
        provA, provB = paramsA, paramsB
        certified_inputs = paramsA.weil_certified and paramsB.weil_certified

    pts = list(A.points)
    seen = set(A.key_set)
    for pt in B.points:
        if pt.key not in seen:
            seen.add(pt.key)
            pts.append(pt)
    prov = Provenance(
        family="pq",
        d=d,
        p=p,
        q=q,
        a=provA.a if provA else None,
        eps=provA.eps if provA else None,
        b=provB.a if provB else None,
        eps2=provB.eps if provB else None,
        weil_certified=certified_inputs,
        cardinality_certified=len(pts) == p + q - 1,
    )
    return PointSet(tuple(pts), prov)


def intersect(setA: PointSet, setB: PointSet) -> PointSet:
    """Exact intersection, ordered by first occurrence in setA."""
    if setA.d != setB.d:
        raise DimensionMismatchError(
            f"dimension mismatch: {setA.d} vs {setB.d}"
        )
    keysB = setB.key_set
    pts = tuple(pt for pt in setA.distinct if pt.key in keysB)
    return PointSet(pts, Provenance(family="intersection", d=setA.d))


@dataclass(frozen=True)
class IntersectionProfile:
    """Structural profile of two bundles with different bit vectors.

    ``active_mismatches`` lists indices (1-based) where the bit vectors
    differ and the coefficient pair is not both zero; ``first_active`` is
    its minimum.  ``first_nonzero`` is the least index at which the
    coefficient pair is not both zero; when any active mismatch exists the
    intersection has at most ``first_nonzero + 1`` points.
    ``scaling_congruence`` records whether
    a_{first_active+1} * b_1^{first_active+1} =
    a_1^{first_active+1} * b_{first_active+1} mod p, a sufficient
    condition for the intersection to be the origin alone when a_1 != 0.
    """

    active_mismatches: tuple[int, ...]
    first_active: int | None
    first_nonzero: int | None
    intersection_cap: int | None
    scaling_congruence: bool | None
    equivalent_sets: bool
    certified_trivial: bool

    def to_json(self) -> dict:
        return {
            "active_mismatches": list(self.active_mismatches),
            "first_active": self.first_active,
            "first_nonzero": self.first_nonzero,
            "intersection_cap": self.intersection_cap,
            "scaling_congruence": self.scaling_congruence,
            "equivalent_sets": self.equivalent_sets,
            "certified_trivial": self.certified_trivial,
        }


def intersection_profile(
    paramsA: PSetParams, paramsB: PSetParams
) -> IntersectionProfile:
    """Evaluate the intersection predicates for eps' != eps''."""
    if (paramsA.d, paramsA.p) != (paramsB.d, paramsB.p):
        raise DimensionMismatchError("parameter bundles must share d and p")
    if paramsA.eps == paramsB.eps:
        raise SameEpsilonError("bit vectors are equal; profile not defined")
    a, b, p, d = paramsA.a, paramsB.a, paramsA.p, paramsA.d

    active = tuple(
        j
        for j in range(1, d)
        if paramsA.eps[j - 1] != paramsB.eps[j - 1]
        and (a[j - 1] % p or b[j - 1] % p)
    )
    first_active = min(active) if active else None
    nonzero = [j for j in range(1, d + 1) if a[j - 1] % p or b[j - 1] % p]
    first_nonzero = min(nonzero) if nonzero else None
    cap = first_nonzero + 1 if active else None

    congruence = None
    if active and a[0] % p != 0:
        e = first_active + 1
        congruence = (
            a[e - 1] * pow(b[0], e, p) % p == pow(a[0], e, p) * b[e - 1] % p
        )

    equivalent = find_equivalence_witness(paramsA, paramsB) is not None
    certified = not equivalent and (not active or bool(congruence))
    return IntersectionProfile(
        active_mismatches=active,
        first_active=first_active,
        first_nonzero=first_nonzero,
        intersection_cap=cap,
        scaling_congruence=congruence,
        equivalent_sets=equivalent,
        certified_trivial=certified,
    )


def pointset_to_json(ps: PointSet) -> dict:
    """JSON document with numerators only; exact round-trip guaranteed."""
    prov = ps.provenance
    doc: dict = {"construction": prov.family, "d": prov.d, "p": prov.p}
    if prov.q is not None:
        doc["q"] = prov.q
    if prov.a is not None:
        doc["a"] = list(prov.a)
    if prov.eps is not None:
        doc["eps"] = list(prov.eps)
    if prov.b is not None:
        doc["b"] = list(prov.b)
    if prov.eps2 is not None:
        doc["eps2"] = list(prov.eps2)
    dens = {pt.denominator for pt in ps.points}
    if len(dens) == 1:
        doc["denominator"] = dens.pop()
    else:
        doc["denominators"] = [pt.denominator for pt in ps.points]
    doc["points"] = [list(pt.numerators) for pt in ps.points]
    return doc


def pointset_from_json(doc: dict) -> PointSet:
    """Rebuild a PointSet from its JSON document."""
    if "denominator" in doc:
        dens = [doc["denominator"]] * len(doc["points"])
    else:
        dens = doc["denominators"]
    pts = tuple(
        RationalPoint(tuple(nums), den) for nums, den in zip(doc["points"], dens)
    )
    a = tuple(doc["a"]) if "a" in doc else None
    eps = tuple(doc["eps"]) if "eps" in doc else None
    b = tuple(doc["b"]) if "b" in doc else None
    eps2 = tuple(doc["eps2"]) if "eps2" in doc else None
    p, q = doc["p"], doc.get("q")
    certified = None
    if a is not None and p is not None:
        certified = all(1 <= x <= p - 1 for x in a)
        if b is not None:
            certified = certified and all(1 <= x <= p - 1 for x in b)
    card = None
    if doc["construction"] == "pq":
        if a is None:
            certified = True  # classical constituents
        card = len({pt.key for pt in pts}) == p + q - 1
    prov = Provenance(
        family=doc["construction"],
        d=doc["d"],
        p=p,
        q=q,
        a=a,
        eps=eps,
        b=b,
        eps2=eps2,
        weil_certified=certified,
        cardinality_certified=card,
    )
    return PointSet(pts, prov)
