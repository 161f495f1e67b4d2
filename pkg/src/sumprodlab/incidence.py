"""Point-line and point-plane incidences, rich lines, collinear triples.

Also builds the point/line configurations behind the classical sum-product
arguments: the grid (A+A) x (A.A) with lines y = a(x - b), Solymosi's slope
fan with vector sums, the point-plane configuration whose incidences bound
E+(A), and the sharp Szemeredi-Trotter grid.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (
    EmptyInput,
    NonPositiveElement,
    ParamOutOfRange,
    ResourceLimit,
    UniverseMismatch,
    ZeroElement,
)
from .report import ReportDocument
from .ring import inverse_table
from .setalg import (
    INTEGERS,
    RATIONALS,
    FiniteSet,
    Op,
    Universe,
    combine,
    dyadic_popular,
    energy,
    join_universes,
    rep_counts,
)


def _canon(u: Universe, x):
    if u.modular:
        return int(x) % u.modulus
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


class PointSet:
    """Duplicate-free points (pairs or triples) over a universe."""

    __slots__ = ("points", "universe", "dim")

    def __init__(self, points: Iterable[Sequence], universe: Universe = INTEGERS, dim: int | None = None):
        pts = {tuple(_canon(universe, c) for c in pt) for pt in points}
        dims = {len(pt) for pt in pts}
        if len(dims) > 1:
            raise ValueError("mixed point dimensions")
        d = dims.pop() if dims else (dim or 2)
        if dim is not None and d != dim:
            raise ValueError(f"expected {dim}-dimensional points")
        object.__setattr__(self, "points", tuple(sorted(pts)))  # int and Fraction compare natively
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "dim", d)

    def __setattr__(self, name, value):
        raise AttributeError("PointSet is immutable")

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, pt):
        return tuple(pt) in set(self.points)

    def __eq__(self, other):
        return isinstance(other, PointSet) and (self.points, self.universe) == (other.points, other.universe)

    def __hash__(self):
        return hash((self.points, self.universe))

    def __repr__(self):
        return f"PointSet({len(self)} points in {self.universe}^{self.dim})"

    @classmethod
    def grid(cls, X: FiniteSet, Y: FiniteSet) -> "PointSet":
        u = join_universes(X.universe, Y.universe)
        return cls(itertools.product(X, Y), u)

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.int64).reshape(-1, self.dim)


@dataclass(frozen=True)
class Line:
    """y = m x + b (kind "slope") or x = b (kind "vertical")."""

    kind: str
    m: object
    b: object
    universe: Universe = INTEGERS

    @classmethod
    def slope(cls, m, b, universe: Universe = INTEGERS) -> "Line":
        u = universe
        if not u.modular and (isinstance(m, Fraction) or isinstance(b, Fraction)):
            if Fraction(m).denominator != 1 or Fraction(b).denominator != 1:
                u = RATIONALS
        return cls("slope", _canon(u, m), _canon(u, b), u)

    @classmethod
    def vertical(cls, c, universe: Universe = INTEGERS) -> "Line":
        return cls("vertical", None, _canon(universe, c), universe)

    @classmethod
    def through(cls, p1, p2, universe: Universe = INTEGERS) -> "Line":
        """The unique line through two distinct points (fields and Z/Q only)."""
        (x1, y1), (x2, y2) = p1, p2
        u = universe
        if u.kind == "Zq":
            raise UniverseMismatch("lines through two points need a field")
        if u.modular:
            p = u.modulus
            dx, dy = (x2 - x1) % p, (y2 - y1) % p
            if dx == 0 and dy == 0:
                raise ValueError("points coincide")
            if dx == 0:
                return cls.vertical(x1, u)
            m = dy * pow(dx, -1, p) % p
            return cls.slope(m, y1 - m * x1, u)
        if (x1, y1) == (x2, y2):
            raise ValueError("points coincide")
        if x1 == x2:
            return cls.vertical(x1, u)
        m = Fraction(y2 - y1) / (x2 - x1)
        return cls.slope(m, y1 - m * x1, u)

    def at(self, x):
        return _canon(self.universe, self.m * x + self.b)

    def contains(self, pt) -> bool:
        x, y = pt
        if self.kind == "vertical":
            return _canon(self.universe, x) == self.b
        return _canon(self.universe, y) == self.at(x)

    def __str__(self):
        if self.kind == "vertical":
            return f"x = {self.b}"
        return f"y = {self.m}x + {self.b}"


def _line_universe_ok(P: PointSet, L: Sequence[Line]):
    for l in L:
        try:
            join_universes(P.universe, l.universe)
        except UniverseMismatch:
            raise UniverseMismatch(f"line over {l.universe} vs points over {P.universe}") from None


def incidences(P: PointSet, L: Sequence[Line]) -> int:
    """|{(p, l) : p in l}|, lines counted with multiplicity."""
    _line_universe_ok(P, L)
    if not len(P) or not L:
        return 0
    cols: dict = defaultdict(set)
    for x, y in P:
        cols[x].add(y)
    xs = list(cols)
    total = 0
    for l in L:
        if l.kind == "vertical":
            total += len(cols.get(l.b, ()))
        else:
            total += sum(1 for x in xs if l.at(x) in cols[x])
    return total


def incidences_oracle(P: PointSet, L: Sequence[Line]) -> int:
    _line_universe_ok(P, L)
    return sum(1 for l in L for pt in P if l.contains(pt))


def rich_lines(P: PointSet, k: int) -> list[tuple[Line, int]]:
    """Lines spanned by P carrying at least k of its points, with exact counts."""
    if k < 2:
        raise ParamOutOfRange("k must be >= 2")
    on: dict[Line, set] = defaultdict(set)
    pts = P.points
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            l = Line.through(pts[i], pts[j], P.universe)
            on[l].update((i, j))
    out = [(l, len(s)) for l, s in on.items() if len(s) >= k]
    out.sort(key=lambda t: (-t[1], t[0].kind, Fraction(t[0].m or 0), Fraction(t[0].b)))
    return out


# ---------------------------------------------------------------- Elekes


@dataclass(frozen=True)
class ElekesConfig:
    points: PointSet
    lines: tuple  # raw family, |A|^2 entries
    distinct_lines: int
    incidences: int
    min_richness: int

    def report(self, A: FiniteSet) -> ReportDocument:
        n = len(A)
        rep = ReportDocument("elekes", config={"universe": A.universe.tag(), "size": n})
        rep.add("|P|", len(self.points))
        rep.add("|L| raw", len(self.lines))
        rep.add("|L| distinct", self.distinct_lines)
        rep.add("I(P,L)", self.incidences)
        rep.add("min points per line", self.min_richness)
        rep.check("every line carries >= |A| points", self.min_richness, n, ">=")
        rep.check("|A| |L| <= I(P,L)", n * len(self.lines), self.incidences)
        return rep


def elekes_config(A: FiniteSet) -> ElekesConfig:
    """P = (A+A) x (A.A) and the |A|^2 lines y = a1 (x - a2)."""
    if len(A) < 2:
        raise ParamOutOfRange("elekes_config needs |A| >= 2")
    u = A.universe
    if u.kind == "Q":
        raise UniverseMismatch("use integer or F_p sets")
    P = PointSet.grid(combine(A, A, Op.SUM), combine(A, A, Op.PRODUCT))
    lines = tuple(Line.slope(a1, -a1 * a2, u) for a1 in A for a2 in A)
    cols: dict = defaultdict(set)
    for x, y in P:
        cols[x].add(y)
    xs = list(cols)
    per_line = [sum(1 for x in xs if l.at(x) in cols[x]) for l in lines]
    return ElekesConfig(P, lines, len(set(lines)), sum(per_line), min(per_line))


# ---------------------------------------------------------------- Solymosi


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def solymosi_stats(A: FiniteSet) -> ReportDocument:
    """Slope fan, dyadic class and vector-sum sets for a set of positive numbers."""
    if len(A) < 2:
        raise ParamOutOfRange("solymosi_stats needs |A| >= 2")
    if A.universe.modular:
        raise UniverseMismatch("the slope ordering needs positive rationals")
    if any(Fraction(a) <= 0 for a in A):
        raise NonPositiveElement("all elements must be positive")
    elems = [Fraction(a) for a in A]
    n_a = len(elems)
    r = rep_counts(A, A, Op.RATIO)
    E = r.moment(2)
    cls = dyadic_popular(r, "square")
    i0 = cls.index
    D = sorted(Fraction(s) for s in cls.members)
    n = len(D)
    amin = elems[0]
    members = set(elems)

    def on_slope(s):  # points (x, y) of A x A with y = s x
        return [(x, s * x) for x in elems if s * x in members]

    # l_1..l_n are the slope lines, l_{n+1} the vertical line x = min A
    fan = [on_slope(s) for s in D] + [[(amin, y) for y in elems]]
    sets = [{(p[0] + q[0], p[1] + q[1]) for p in fan[i] for q in fan[i + 1]} for i in range(n)]
    sizes = [len(Pi) for Pi in sets]
    P = sum(sizes)
    sector = set().union(*sets[:-1])
    sector_total = sum(sizes[:-1])
    union = sector | sets[-1]
    ss = len(combine(A, A, Op.SUM))
    L = _ceil_log2(n_a)
    K = cls.n_classes
    sums = {a + b for a in elems for b in elems}

    rep = ReportDocument("solymosi", config={"universe": A.universe.tag(), "size": n_a})
    rep.add("Ex(A)", E)
    rep.add("ceil(log2 |A|)", L)
    rep.add("dyadic classes", K)
    rep.add("i0", i0)
    rep.add("n", n)
    rep.add("slopes", [str(s) for s in D])
    rep.add("class mass", cls.mass)
    rep.add("|P_i|", sizes)
    rep.add("|P|", P)
    rep.add("|union P_i|", len(union))
    rep.add("|A+A|", ss)
    # the literal chain
    rep.check("Ex(A)/ceil(log2|A|) <= n 2^i0", Fraction(E, L), n * 2**i0)
    rep.check("n 2^i0 <= |A+A|^2", n * 2**i0, ss * ss)
    # the exact chain that the construction supports
    rep.check("Ex(A)/classes <= class mass", Fraction(E, K), cls.mass)
    rep.check("class mass <= n (2^i0 - 1)^2", cls.mass, n * (2**i0 - 1) ** 2)
    rep.check("sectors P_1..P_{n-1} pairwise disjoint", len(sector), sector_total, "==")
    rep.check("(n-1) 4^(i0-1) <= sum of sector sizes", (n - 1) * 4 ** (i0 - 1), sector_total)
    rep.check("sum of sector sizes <= |A+A|^2", sector_total, ss * ss)
    rep.check("every P_i inside (A+A)^2", all(x in sums and y in sums for x, y in union), True, "==")
    rep.check("all n sets P_i pairwise disjoint", len(union), P, "==", asserted=False)
    rep.check("|P| >= n 2^i0", P, n * 2**i0, ">=", asserted=False)
    rep.check("|P| <= |A+A|^2", P, ss * ss, asserted=False)
    return rep


# ---------------------------------------------------------------- collinear triples


def _t_universe(*sets) -> Universe:
    u = sets[0].universe
    for s in sets[1:]:
        u = join_universes(u, s.universe)
    if u.kind not in ("Fp", "Z"):
        raise UniverseMismatch("collinear_T works over F_p or Z")
    return u


def _direction_z(dx, dy):
    g = math.gcd(dx, dy)
    dx, dy = dx // g, dy // g
    if dx < 0 or (dx == 0 and dy < 0):
        dx, dy = -dx, -dy
    return dx, dy


def _t_integers(A1, A2, A3):
    U2 = list(itertools.product(A2, A2))
    U3 = list(itertools.product(A3, A3))
    total = generic = 0
    for u in itertools.product(A1, A1):
        c2, c3 = Counter(), Counter()
        z2 = z3 = 0
        for v in U2:
            if v == u:
                z2 = 1
            else:
                c2[_direction_z(v[0] - u[0], v[1] - u[1])] += 1
        for v in U3:
            if v == u:
                z3 = 1
            else:
                c3[_direction_z(v[0] - u[0], v[1] - u[1])] += 1
        s = sum(c * c3[d] for d, c in c2.items())
        total += s + z2 * len(U3) + z3 * len(U2) - z2 * z3
        generic += s
    i23 = len(A2.intersection(A3))
    i123 = len(A1.intersection(A2).intersection(A3))
    return total, generic - (len(A1) ** 2 * i23 * i23 - i123 * i123)


def collinear_T(A1: FiniteSet, A2: FiniteSet, A3: FiniteSet, distinct_only: bool = False) -> int:
    """T (determinant identity) or T-distinct (pairwise distinct collinear points).

    Counts by hashing the direction from each u1 in A1^2 to the points of
    A2^2 and A3^2, so the work is O(|A1|^2 (|A2|^2 + |A3|^2)).
    """
    u = _t_universe(A1, A2, A3)
    if not (len(A1) and len(A2) and len(A3)):
        return 0
    if u.kind == "Fp":
        t, d = kernels.t_counts(A1.array(), A2.array(), A3.array(), u.modulus)
    else:
        t, d = _t_integers(A1, A2, A3)
    return d if distinct_only else t


def collinear_T_oracle(A1: FiniteSet, A2: FiniteSet, A3: FiniteSet, distinct_only: bool = False) -> int:
    """Six nested loops over (a1, a2, b1, b2, c1, c2)."""
    u = _t_universe(A1, A2, A3)
    m = u.modulus
    count = 0
    for a1, a2, b1, b2, c1, c2 in itertools.product(A1, A1, A2, A2, A3, A3):
        det = (b1 - a1) * (c2 - a2) - (c1 - a1) * (b2 - a2)
        if (det % m if m else det) != 0:
            continue
        if distinct_only and ((a1, a2) == (b1, b2) or (a1, a2) == (c1, c2) or (b1, b2) == (c1, c2)):
            continue
        count += 1
    return count


def degenerate_count(A1: FiniteSet, A2: FiniteSet, A3: FiniteSet) -> int:
    """Tuples whose three points are not pairwise distinct (always collinear)."""
    n1, n2, n3 = len(A1), len(A2), len(A3)
    i12 = len(A1.intersection(A2))
    i13 = len(A1.intersection(A3))
    i23 = len(A2.intersection(A3))
    i123 = len(A1.intersection(A2).intersection(A3))
    return i12**2 * n3**2 + i13**2 * n2**2 + i23**2 * n1**2 - 2 * i123**2


def first_coordinate_cases(A1: FiniteSet, A2: FiniteSet, A3: FiniteSet) -> dict:
    """Solutions of the determinant identity with a1=b1, a1=c1, b1=c1 respectively."""
    n1, n2, n3 = len(A1), len(A2), len(A3)
    i12 = len(A1.intersection(A2))
    i13 = len(A1.intersection(A3))
    i23 = len(A2.intersection(A3))
    i123 = len(A1.intersection(A2).intersection(A3))
    base = i123 * n1 * n2 * n3
    return {
        "a1=b1": base + i12**2 * n3**2 - i123 * i12 * n3,
        "a1=c1": base + i13**2 * n2**2 - i123 * i13 * n2,
        "b1=c1": base + i23**2 * n1**2 - i123 * i23 * n1,
        "bounds": {
            "a1=b1": base + i12**2 * n3**2,
            "a1=c1": base + i13**2 * n2**2,
            "b1=c1": base + i23**2 * n1**2,
        },
    }


def collinear_report(A1: FiniteSet, A2: FiniteSet, A3: FiniteSet) -> ReportDocument:
    rep = ReportDocument("collinear", config={"sizes": [len(A1), len(A2), len(A3)], "universe": A1.universe.tag()})
    T = rep.add("T", collinear_T(A1, A2, A3))
    To = rep.add("T distinct", collinear_T(A1, A2, A3, True))
    deg = rep.add("T - T distinct", T - To)
    rep.check("T - T distinct = degenerate count", deg, degenerate_count(A1, A2, A3), "==")
    cases = first_coordinate_cases(A1, A2, A3)
    bounds = cases.pop("bounds")
    rep.add("first-coordinate cases", cases)
    for name, v in cases.items():
        rep.check(f"case {name} within its bound", v, bounds[name], asserted=False)
    rep.check("T - T distinct <= |A1|^2 |A3|^2", deg, len(A1) ** 2 * len(A3) ** 2, asserted=False)
    return rep


# ---------------------------------------------------------------- planes


@dataclass(frozen=True)
class Plane:
    """alpha x + beta y + gamma z = delta over F_p, first nonzero coefficient 1."""

    alpha: int
    beta: int
    gamma: int
    delta: int
    p: int

    @classmethod
    def make(cls, alpha, beta, gamma, delta, p: int) -> "Plane":
        c = [int(alpha) % p, int(beta) % p, int(gamma) % p, int(delta) % p]
        lead = next((v for v in c[:3] if v), 0)
        if not lead:
            raise ValueError("a plane needs a nonzero normal")
        s = pow(lead, -1, p)
        return cls(*(v * s % p for v in c), p)

    @property
    def normal(self):
        return (self.alpha, self.beta, self.gamma)

    def contains(self, pt) -> bool:
        x, y, z = pt
        return (self.alpha * x + self.beta * y + self.gamma * z - self.delta) % self.p == 0


def _plane_field(P3: PointSet | None, planes: Sequence[Plane]) -> int:
    ps = {pl.p for pl in planes}
    if P3 is not None:
        if P3.universe.kind != "Fp":
            raise UniverseMismatch("point-plane incidences live over F_p")
        ps.add(P3.universe.modulus)
    if len(ps) > 1:
        raise UniverseMismatch(f"mixed fields {sorted(ps)}")
    return ps.pop() if ps else 0


def point_plane_incidences(P3: PointSet, planes: Sequence[Plane], chunk: int = 1 << 22) -> int:
    p = _plane_field(P3, planes)
    if not len(P3) or not planes:
        return 0
    pts = P3.array()
    coef = np.array([(pl.alpha, pl.beta, pl.gamma, pl.delta) for pl in planes], dtype=np.int64)
    step = max(1, chunk // len(planes))
    total = 0
    for s in range(0, len(pts), step):
        v = pts[s : s + step] @ coef[:, :3].T - coef[:, 3]
        total += int(np.count_nonzero(v % p == 0))
    return total


def point_plane_oracle(P3: PointSet, planes: Sequence[Plane]) -> int:
    _plane_field(P3, planes)
    return sum(1 for pl in planes for pt in P3 if pl.contains(pt))


def max_collinear_planes(planes: Sequence[Plane]) -> int:
    """Largest number of (distinct) planes sharing a common line."""
    uniq = sorted(set(planes), key=lambda pl: (pl.alpha, pl.beta, pl.gamma, pl.delta))
    if not uniq:
        return 0
    p = _plane_field(None, uniq)
    if len(uniq) == 1:
        return 1
    coef = np.array([(pl.alpha, pl.beta, pl.gamma, pl.delta) for pl in uniq], dtype=np.int64)
    inv = inverse_table(p)
    i, j = np.triu_indices(len(uniq), 1)
    step = 1 << 20
    keys = np.concatenate([_line_keys(coef[i[s : s + step]], coef[j[s : s + step]], p, inv) for s in range(0, len(i), step)])
    keys = keys[keys >= 0]
    if not keys.size:
        return 1
    _, pairs = np.unique(keys, return_counts=True)
    c = int(pairs.max())
    # c = m(m-1)/2 pairs of planes share the line
    return int((1 + math.isqrt(1 + 8 * c)) // 2)


def _line_keys(c1: np.ndarray, c2: np.ndarray, p: int, inv: np.ndarray) -> np.ndarray:
    """Canonical id of the intersection line of each plane pair, -1 if parallel."""
    n1, n2 = c1[:, :3], c2[:, :3]
    d = np.cross(n1, n2) % p
    nz = d != 0
    ok = nz.any(axis=1)
    piv = np.argmax(nz, axis=1)
    rows = np.arange(len(d))
    dn = d * inv[d[rows, piv]][:, None] % p
    # point with coordinate piv = 0, solved by Cramer's rule on the cyclic pair (j, k)
    j = (piv + 1) % 3
    k = (piv + 2) % 3
    det = d[rows, piv]
    dinv = inv[det]
    e1, e2 = c1[:, 3], c2[:, 3]
    xj = (e1 * n2[rows, k] - e2 * n1[rows, k]) % p * dinv % p
    xk = (n1[rows, j] * e2 - n2[rows, j] * e1) % p * dinv % p
    pt = np.zeros_like(dn)
    pt[rows, j] = xj
    pt[rows, k] = xk
    key = np.zeros(len(d), dtype=np.int64)
    for col in (dn[:, 0], dn[:, 1], dn[:, 2], pt[:, 0], pt[:, 1], pt[:, 2]):
        key = key * p + col
    return np.where(ok, key, -1)


def energy_plane_config(A: FiniteSet):
    """Points (A.A) x A x A^-1 and planes a x + y = b z + c bounding E+(A)."""
    u = A.universe
    if u.kind != "Fp":
        raise UniverseMismatch("the plane construction lives over F_p")
    if 0 in A:
        raise ZeroElement("A^-1 needs 0 outside A")
    p = u.modulus
    n = len(A)
    if n == 0:
        raise EmptyInput("empty set")
    AA = combine(A, A, Op.PRODUCT)
    Ainv = FiniteSet((pow(a, -1, p) for a in A), u)
    P3 = PointSet(itertools.product(AA, A, Ainv), u, dim=3)
    planes = [Plane.make(a, 1, -b, c, p) for a in Ainv for b in AA for c in A]
    N2 = point_plane_incidences(P3, planes)
    sums = Counter((a1 * a2 * pow(a2, -1, p) + a5) % p for a1 in A for a2 in A for a5 in A)
    N1 = sum(v * v for v in sums.values())
    Ep = energy(A, A, Op.SUM, 2)
    k = max_collinear_planes(planes)

    rep = ReportDocument("energy_planes", config={"p": p, "size": n})
    rep.add("|A.A|", len(AA))
    rep.add("|P|", len(P3))
    rep.add("|Pi|", len(set(planes)))
    rep.add("N1", N1)
    rep.add("N2", N2)
    rep.add("E+(A)", Ep)
    rep.add("k", k)
    rep.check("|P| = |Pi| = |A.A| |A|^2", len(P3) == len(set(planes)) == len(AA) * n * n, True, "==")
    rep.check("N1 = |A|^2 E+(A)", N1, n * n * Ep, "==")
    rep.check("E+(A) |A|^2 <= N2", Ep * n * n, N2)
    rep.check("k <= max(|A|, |A.A|)", k, max(n, len(AA)))
    rep.check("k <= |A|", k, n, asserted=False)
    return P3, planes, rep


# ---------------------------------------------------------------- Szemeredi-Trotter grid


def st_experiment(n: int, budget_tuples: int | None = 10**8) -> ReportDocument:
    """Points [1..n] x [1..2n^2], lines y = m x + b with m in [1..n], b in [1..n^2]."""
    if n < 2:
        raise ParamOutOfRange("grid size n must be >= 2")
    work = n**3 * n  # lines times distinct x values
    if budget_tuples is not None and work > budget_tuples:
        raise ResourceLimit(f"n={n} needs {work} line-column tests > budget {budget_tuples}")
    P = PointSet(((x, y) for x in range(1, n + 1) for y in range(1, 2 * n * n + 1)))
    L = [Line.slope(m, b) for m in range(1, n + 1) for b in range(1, n * n + 1)]
    I = incidences(P, L)
    denom = len(P) ** (2 / 3) * len(L) ** (2 / 3) + len(P) + len(L)
    rep = ReportDocument("szemeredi_trotter", config={"n": n})
    rep.add("|P|", len(P))
    rep.add("|L|", len(L))
    rep.add("I(P,L)", I)
    rep.ratio("I / (|P|^(2/3)|L|^(2/3) + |P| + |L|)", I / denom)
    return rep
