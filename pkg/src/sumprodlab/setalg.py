"""Sum sets, product sets, representation functions and energies.

Universes are the integers (with rationals appearing as ratio sets), a prime
field F_p, or the ring Z/qZ. Representation functions are accumulated in a
single pass over A x B; every energy is a moment of such a map. The
``*_oracle`` functions count tuples directly and share no code with the
map-based routes.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import (
    EmptyInput,
    NonUnit,
    ParamOutOfRange,
    UniverseMismatch,
    ZeroDenominator,
    ZeroElement,
)
from .report import ReportDocument
from .ring import inverse_table, is_prime


@dataclass(frozen=True)
class Universe:
    kind: str  # "Z", "Q", "Fp", "Zq"
    modulus: int | None = None

    def __post_init__(self):
        if self.kind in ("Z", "Q"):
            if self.modulus is not None:
                raise ValueError("Z/Q universes carry no modulus")
        elif self.kind == "Fp":
            if self.modulus is None or not is_prime(self.modulus):
                raise ValueError(f"F_p needs a prime, got {self.modulus}")
        elif self.kind == "Zq":
            if self.modulus is None or self.modulus < 2:
                raise ValueError("Z_q needs q >= 2")
        else:
            raise ValueError(f"unknown universe kind {self.kind!r}")

    @property
    def modular(self) -> bool:
        return self.kind in ("Fp", "Zq")

    @property
    def size(self) -> int | None:
        return self.modulus if self.modular else None

    def reduce(self, x):
        if self.modular:
            return int(x) % self.modulus
        if self.kind == "Z":
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise UniverseMismatch(f"{x} is not an integer")
                return x.numerator
            return int(x)
        x = Fraction(x)
        return x.numerator if x.denominator == 1 else x

    def is_unit(self, x) -> bool:
        if self.kind == "Fp":
            return x % self.modulus != 0
        if self.kind == "Zq":
            return math.gcd(x, self.modulus) == 1
        return x != 0

    def tag(self) -> str:
        if self.kind in ("Z", "Q"):
            return self.kind
        return f"{self.kind}:{self.modulus}"

    def __str__(self):
        return self.tag()


INTEGERS = Universe("Z")
RATIONALS = Universe("Q")


def prime_field(p: int) -> Universe:
    return Universe("Fp", p)


def residue_ring(q: int) -> Universe:
    return Universe("Zq", q)


def join_universes(u: Universe, v: Universe) -> Universe:
    if u == v:
        return u
    if {u.kind, v.kind} == {"Z", "Q"}:
        return RATIONALS
    raise UniverseMismatch(f"{u} vs {v}")


class FiniteSet:
    """Sorted, duplicate-free finite set over a universe."""

    __slots__ = ("elements", "universe", "_members")

    def __init__(self, elements: Iterable, universe: Universe = INTEGERS):
        elems = sorted({universe.reduce(e) for e in elements})
        object.__setattr__(self, "elements", tuple(elems))
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "_members", frozenset(elems))

    def __setattr__(self, name, value):
        raise AttributeError("FiniteSet is immutable")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self._members

    def __eq__(self, other):
        if isinstance(other, FiniteSet):
            return self.universe == other.universe and self.elements == other.elements
        return NotImplemented

    def __hash__(self):
        return hash((self.universe, self.elements))

    def __repr__(self):
        body = ", ".join(str(e) for e in self.elements[:12])
        more = ", ..." if len(self) > 12 else ""
        return f"FiniteSet({{{body}{more}}}, {self.universe})"

    def array(self) -> np.ndarray:
        if self.universe.kind == "Q":
            raise TypeError("rational sets have no integer array form")
        return np.array(self.elements, dtype=np.int64)

    def without_zero(self) -> "FiniteSet":
        return FiniteSet((e for e in self.elements if e != 0), self.universe)

    def intersection(self, other: "FiniteSet") -> "FiniteSet":
        join_universes(self.universe, other.universe)
        return FiniteSet(self._members & other._members, self.universe)


class Op(enum.Enum):
    SUM = "sum"
    DIFFERENCE = "difference"
    PRODUCT = "product"
    RATIO = "ratio"


@dataclass(frozen=True)
class Dilate:
    """The map a -> x*a used by ``combine(A, None, Dilate(x))``."""

    x: object


def _as_op(op) -> Op | Dilate:
    if isinstance(op, (Op, Dilate)):
        return op
    return Op(str(op).lower())


@dataclass(frozen=True)
class RepCounts:
    """Exact representation function z -> r(z) (only positive counts kept)."""

    counts: dict
    op: str
    universe: Universe
    dropped: int = 0  # pairs skipped for non-unit denominators (Z_q only)

    def __getitem__(self, z):
        return self.counts.get(z, 0)

    def __len__(self):
        return len(self.counts)

    def total(self) -> int:
        return sum(self.counts.values())

    def max_count(self) -> int:
        return max(self.counts.values()) if self.counts else 0

    def moment(self, n: int) -> int:
        return sum(v**n for v in self.counts.values())

    def support(self) -> FiniteSet:
        return FiniteSet(self.counts.keys(), self.universe)


def _check_ratio_denominators(B: FiniteSet):
    if 0 in B:
        raise ZeroDenominator("ratio with 0 in the denominator set")


def rep_counts(A: FiniteSet, B: FiniteSet, op) -> RepCounts:
    """Exact multiplicities r(z) = |{(a, b) : a o b = z}|."""
    op = _as_op(op)
    if isinstance(op, Dilate):
        raise TypeError("dilation has no representation function")
    u = join_universes(A.universe, B.universe)
    if op is Op.RATIO:
        _check_ratio_denominators(B)
    if u.modular:
        return _rep_counts_modular(A, B, op, u)
    a, b = A.elements, B.elements
    if op is Op.SUM:
        c = Counter(x + y for x in a for y in b)
    elif op is Op.DIFFERENCE:
        c = Counter(x - y for x in a for y in b)
    elif op is Op.PRODUCT:
        c = Counter(x * y for x in a for y in b)
    else:
        c = Counter(Fraction(x) / y for x in a for y in b)
        u = RATIONALS
        c = Counter({(k.numerator if k.denominator == 1 else k): v for k, v in c.items()})
    if op is not Op.RATIO and u.kind == "Q":
        c = Counter({(k.numerator if isinstance(k, Fraction) and k.denominator == 1 else k): v for k, v in c.items()})
    return RepCounts(dict(c), op.value, u)


def _rep_counts_modular(A, B, op, u):
    m = u.modulus
    a, b = A.array(), B.array()
    dropped = 0
    if op is Op.SUM:
        vals = (a[:, None] + b[None, :]) % m
    elif op is Op.DIFFERENCE:
        vals = (a[:, None] - b[None, :]) % m
    elif op is Op.PRODUCT:
        vals = (a[:, None] * b[None, :]) % m
    else:
        inv = inverse_table(m)
        unit = np.array([u.is_unit(int(x)) for x in b], dtype=bool)
        dropped = int((~unit).sum()) * len(a)
        vals = (a[:, None] * inv[b[unit]][None, :]) % m
    hist = np.bincount(vals.ravel(), minlength=m)
    nz = np.flatnonzero(hist)
    return RepCounts({int(z): int(hist[z]) for z in nz}, op.value, u, dropped)


def combine(A: FiniteSet, B: FiniteSet | None, op) -> FiniteSet:
    """The set {a o b : a in A, b in B}, or xA for ``Dilate(x)``."""
    op = _as_op(op)
    if isinstance(op, Dilate):
        u = A.universe
        if u.kind == "Z" and isinstance(op.x, Fraction) and op.x.denominator != 1:
            u = RATIONALS
        return FiniteSet((op.x * a for a in A), u)
    r = rep_counts(A, B, op)
    return FiniteSet(r.counts.keys(), r.universe)


def sumset(A, B=None):
    return combine(A, A if B is None else B, Op.SUM)


def productset(A, B=None):
    return combine(A, A if B is None else B, Op.PRODUCT)


def energy(A: FiniteSet, B: FiniteSet, op, n: int = 2) -> int:
    """n-th order additive (op=SUM) or multiplicative (op=PRODUCT) energy.

    Additive energy is the n-th moment of r_{A-B}; multiplicative energy the
    n-th moment of r_{A/B}, which requires every element of A and B to be a
    unit (in particular 0 is rejected).
    """
    op = _as_op(op)
    if n < 2:
        raise ParamOutOfRange("energy order n must be >= 2")
    if op is Op.SUM:
        return rep_counts(A, B, Op.DIFFERENCE).moment(n)
    if op is Op.PRODUCT:
        u = join_universes(A.universe, B.universe)
        for S in (A, B):
            if 0 in S:
                raise ZeroElement("the ratio route to E^x needs 0 outside both sets")
            if u.kind == "Zq" and not all(u.is_unit(x) for x in S):
                raise NonUnit("multiplicative energy over Z_q needs unit elements")
        return rep_counts(A, B, Op.RATIO).moment(n)
    raise ValueError(f"energy is defined for SUM or PRODUCT, not {op}")


def multiplicative_energy(A: FiniteSet, B: FiniteSet | None = None) -> int:
    """E^x(A, B) allowing 0 (integers or a prime field).

    Quadruples with a1*b1 = a2*b2 = 0 number z**2, z being the count of pairs
    with product 0; the rest go through the ratio route on A*, B*.
    """
    B = A if B is None else B
    u = join_universes(A.universe, B.universe)
    if u.kind == "Zq":
        raise UniverseMismatch("zero divisors make this split invalid over Z_q")
    As, Bs = A.without_zero(), B.without_zero()
    z = len(A) * len(B) - len(As) * len(Bs)
    core = energy(As, Bs, Op.PRODUCT, 2) if len(As) and len(Bs) else 0
    return core + z * z


def energy_oracle(A: FiniteSet, B: FiniteSet, op) -> int:
    """Brute-force count of (a1, a2, b1, b2) with a1 o b1 = a2 o b2."""
    op = _as_op(op)
    u = join_universes(A.universe, B.universe)
    m = u.modulus if u.modular else None
    if op is Op.SUM:
        f = (lambda a, b: (a + b) % m) if m else (lambda a, b: a + b)
    elif op is Op.PRODUCT:
        f = (lambda a, b: (a * b) % m) if m else (lambda a, b: a * b)
    else:
        raise ValueError("oracle covers SUM and PRODUCT")
    count = 0
    for a1, a2, b1, b2 in itertools.product(A, A, B, B):
        if f(a1, b1) == f(a2, b2):
            count += 1
    return count


# ---------------------------------------------------------------- variant slopes


def _prime_field_of(*sets) -> int:
    u = sets[0].universe
    for s in sets[1:]:
        u = join_universes(u, s.universe)
    if u.kind != "Fp":
        raise UniverseMismatch("variant-slope counts live over a prime field")
    return u.modulus


def _sum_histogram(A1: FiniteSet, A2: FiniteSet, p: int) -> np.ndarray:
    s = (A1.array()[:, None] + A2.array()[None, :]) % p
    return np.bincount(s.ravel(), minlength=p)


def variant_slope_counts(Z: FiniteSet, A1: FiniteSet, A2: FiniteSet) -> RepCounts:
    """r_Q(z) = |{(a1, a1', a2, a2') : z = (a1 + a2)/(a1' + a2')}| for z in Z.

    Tuples whose denominator a1' + a2' vanishes contribute to no z.
    """
    if len(Z) == 0:
        return RepCounts({}, "variant_slope", Z.universe)
    p = _prime_field_of(Z, A1, A2)
    hist = _sum_histogram(A1, A2, p)
    den = np.flatnonzero(hist)
    den = den[den != 0]
    w = hist[den]
    out = {}
    for z in Z:
        v = int(np.dot(w, hist[(z * den) % p]))
        if v:
            out[int(z)] = v
    return RepCounts(out, "variant_slope", Z.universe)


def variant_slope_full(A1: FiniteSet, A2: FiniteSet) -> np.ndarray:
    """r_Q(z) for every z in F_p as a length-p array."""
    p = _prime_field_of(A1, A2)
    hist = _sum_histogram(A1, A2, p)
    den = np.flatnonzero(hist)
    den = den[den != 0]
    num = np.flatnonzero(hist)
    inv = inverse_table(p)
    z = (num[:, None] * inv[den][None, :]) % p
    wts = hist[num][:, None] * hist[den][None, :]
    return np.bincount(z.ravel(), weights=wts.ravel().astype(np.float64), minlength=p).round().astype(np.int64)


def restricted_energy(Z: FiniteSet, A1: FiniteSet, A2: FiniteSet) -> int:
    """R(Z, A1, A2) = sum over z in Z of r_Q(z)^2."""
    return variant_slope_counts(Z, A1, A2).moment(2)


def restricted_energy_full(A1: FiniteSet, A2: FiniteSet) -> int:
    """R(F_p, A1, A2)."""
    r = variant_slope_full(A1, A2)
    return int(np.dot(r, r))


def restricted_energy_oracle(Z: FiniteSet, A1: FiniteSet, A2: FiniteSet) -> int:
    """Count solutions of z = (a11+a21)/(a12+a22) = (a13+a23)/(a14+a24), z in Z."""
    if len(Z) == 0:
        return 0
    p = _prime_field_of(Z, A1, A2)
    count = 0
    for a11, a21, a12, a22, a13, a23, a14, a24 in itertools.product(A1, A2, A1, A2, A1, A2, A1, A2):
        d1 = (a12 + a22) % p
        d2 = (a14 + a24) % p
        if d1 == 0 or d2 == 0:
            continue
        n1 = (a11 + a21) % p
        if (n1 * d2 - (a13 + a23) * d1) % p:
            continue
        if n1 * pow(d1, -1, p) % p in Z:
            count += 1
    return count


# ---------------------------------------------------------------- dyadic classes


@dataclass(frozen=True)
class DyadicClass:
    index: int  # i0: members have 2**(i0-1) <= r < 2**i0
    members: FiniteSet
    mass: int
    total_mass: int
    n_classes: int
    weight: str = "square"

    @property
    def size(self) -> int:
        return len(self.members)

    def pigeonhole_holds(self) -> bool:
        return self.mass * self.n_classes >= self.total_mass


def dyadic_popular(r: RepCounts, weight: str = "square") -> DyadicClass:
    """The dyadic level set of r carrying the most weight (ties -> smaller i0)."""
    if not r.counts:
        raise EmptyInput("empty representation function")
    if weight == "square":
        w = lambda v: v * v  # noqa: E731
    elif weight == "linear":
        w = lambda v: v  # noqa: E731
    else:
        raise ValueError(f"unknown weight {weight!r}")
    classes: dict[int, list] = {}
    for z, v in r.counts.items():
        classes.setdefault(v.bit_length(), []).append(z)
    mass = {i: sum(w(r.counts[z]) for z in zs) for i, zs in classes.items()}
    best = min(mass, key=lambda i: (-mass[i], i))
    return DyadicClass(
        index=best,
        members=FiniteSet(classes[best], r.universe),
        mass=mass[best],
        total_mass=sum(mass.values()),
        n_classes=r.max_count().bit_length(),
        weight=weight,
    )


# ---------------------------------------------------------------- families


def generate_family(kind: str, n: int, universe: Universe = INTEGERS, seed: int | None = None, **params) -> FiniteSet:
    """Arithmetic progression, geometric progression or random subset of size n.

    params: ``start``/``step`` (ap), ``base``/``scale`` (gp),
    ``low``/``high``/``nonzero`` (random).
    """
    kind = kind.lower()
    if n < 1:
        raise ParamOutOfRange("family size must be >= 1")
    m = universe.modulus if universe.modular else None
    if kind == "ap":
        start, step = params.get("start", 1), params.get("step", 1)
        elems = [start + i * step for i in range(n)]
    elif kind == "gp":
        base, scale = params.get("base", 2), params.get("scale", 1)
        if m is None and base < 2:
            raise ParamOutOfRange("an integer GP needs ratio >= 2")
        if m is not None:
            elems = [scale * pow(base, i, m) % m for i in range(1, n + 1)]
        else:
            elems = [scale * base**i for i in range(1, n + 1)]
    elif kind in ("random", "randomsubset"):
        rng = np.random.default_rng(seed)
        if m is not None:
            low, high = params.get("low", 0), params.get("high", m)
        else:
            low, high = params.get("low", 1), params.get("high", max(4 * n, 16))
        pool = np.arange(low, high, dtype=np.int64)
        if params.get("nonzero", False):
            pool = pool[pool % m != 0] if m else pool[pool != 0]
        if len(pool) < n:
            raise ParamOutOfRange(f"universe slice of size {len(pool)} < n={n}")
        elems = sorted(int(x) for x in rng.choice(pool, size=n, replace=False))
    else:
        raise ParamOutOfRange(f"unknown family {kind!r}")
    out = FiniteSet(elems, universe)
    if len(out) != n:
        raise ParamOutOfRange(f"{kind} family collapses to {len(out)} < {n} distinct elements")
    return out


# ---------------------------------------------------------------- reports


def sum_product_report(A: FiniteSet, p: int | None = None) -> ReportDocument:
    """Sizes, energies and the exact/asymptotic sum-product inequalities for A."""
    if len(A) < 2:
        raise ParamOutOfRange("sum_product_report needs |A| >= 2")
    u = A.universe
    if p is None and u.kind == "Fp":
        p = u.modulus
    n = len(A)
    rep = ReportDocument("sumprod", config={"universe": u.tag(), "size": n})
    plus = rep_counts(A, A, Op.SUM)
    ss = rep.add("|A+A|", len(plus))
    ps = rep.add("|A.A|", len(combine(A, A, Op.PRODUCT)))
    dd = rep.add("|A-A|", len(rep_counts(A, A, Op.DIFFERENCE)))
    rep.add("|A|", n)
    e2 = rep.add("E+(A)", energy(A, A, Op.SUM, 2))
    e3 = rep.add("E3+(A)", energy(A, A, Op.SUM, 3))
    s3 = rep.add("sum r_{A+A}^3", plus.moment(3))
    if u.kind == "Zq" and not all(u.is_unit(a) for a in A):
        em = None
        rep.note("E^x skipped: non-unit elements in Z_q")
    else:
        em = rep.add("Ex(A)", multiplicative_energy(A))
    rep.check("|A|^4 <= |A+A| E+(A)", n**4, ss * e2)
    rep.check("|A|^4 <= |A-A| E+(A)", n**4, dd * e2)
    if em is not None:
        rep.check("|A|^4 <= |A.A| Ex(A)", n**4, ps * em)
    rep.check("|A|^6 <= |A+A|^2 sum r_{A+A}^3", n**6, ss * ss * s3)
    rep.check("|A|^6 <= |A-A|^2 E3+(A)", n**6, dd * dd * e3)
    rep.check("max(|A+A|,|A.A|) <= |A|^2", max(ss, ps), n * n)
    rep.ratio("|A+A|^8 |A.A|^3 / |A|^12", ss**8 * ps**3 / n**12)
    rep.ratio("|A+A|^2 |A.A|^3 / |A|^6", ss**2 * ps**3 / n**6)
    rep.ratio("|A+A|^3 |A.A|^2 / |A|^6", ss**3 * ps**2 / n**6)
    rep.ratio("E3+(A)^(4/3) |A|^-4 / |A.A|", e3 ** (4 / 3) / n**4 / ps)
    rep.ratio("log max(|A+A|,|A.A|) / log |A|", math.log(max(ss, ps)) / math.log(n))
    if p is not None:
        rep.add("p", p)
        rep.add("|A| <= p^(2/5)", n <= p ** 0.4)
        rep.add("|A| <= p^(1/2)", n <= p ** 0.5)
        rep.add("|A| <= p^(2/3)", n <= p ** (2 / 3))
    return rep
