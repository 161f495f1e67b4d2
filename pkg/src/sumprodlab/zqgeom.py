"""Geometry of Z_q^2 for q = p^3 with p = 3 mod 4.

Points are integer pairs reduced mod q. Whole-plane work encodes a point v
as the index v1*q + v2 and a pair of points (v, w) as v_index*q^2 + w_index.

Reflection maps are stored as rows (a, b, t1, t2) of the affine map
v -> [[a, b], [b, -a]] v + t. Rotations use the matrix [[a, -b], [b, a]].
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import (
    BadModulus,
    DegenerateBisector,
    IsotropicLine,
    NonUnit,
    NonUnitRadius,
    NormMismatch,
    NotOnUnitCircle,
    ParamOutOfRange,
    PreconditionUnmet,
    ResourceLimit,
)
from .report import ReportDocument
from .ring import Modulus, inverse_table


class NonUnitDistance(NonUnitRadius):
    pass


class Vec2(NamedTuple):
    x1: int
    x2: int


class LineClass(enum.Enum):
    NON_ISOTROPIC = "NonIsotropic"
    ISOTROPIC = "Isotropic"


@dataclass(frozen=True)
class ZqLine:
    """a x + b y = c, normalised so the first unit coefficient is 1."""

    a: int
    b: int
    c: int
    q: int
    p: int

    def contains(self, v) -> bool:
        return (self.a * v[0] + self.b * v[1] - self.c) % self.q == 0

    def points(self) -> np.ndarray:
        """All q points of the line as an (q, 2) array."""
        q, t = self.q, np.arange(self.q, dtype=np.int64)
        if self.a == 1:  # x = c - b y
            return np.stack([(self.c - self.b * t) % q, t], 1)
        return np.stack([t, (self.c - self.a * t) % q], 1)

    @property
    def key(self) -> int:
        lead_b = 0 if self.a == 1 else 1
        other = self.b if self.a == 1 else self.a
        return ((lead_b * self.q) + other) * self.q + self.c

    def __str__(self):
        return f"{self.a}x + {self.b}y = {self.c} (mod {self.q})"


@dataclass(frozen=True)
class IsometryMap:
    """v -> M v + t over Z_q with M = (m11, m12, m21, m22)."""

    m: tuple
    t: tuple
    q: int
    kind: str

    def apply(self, v) -> Vec2:
        m11, m12, m21, m22 = self.m
        q = self.q
        return Vec2((m11 * v[0] + m12 * v[1] + self.t[0]) % q, (m21 * v[0] + m22 * v[1] + self.t[1]) % q)

    def apply_many(self, V: np.ndarray) -> np.ndarray:
        V = np.asarray(V, dtype=np.int64)
        m11, m12, m21, m22 = self.m
        return np.stack(
            [(m11 * V[:, 0] + m12 * V[:, 1] + self.t[0]) % self.q, (m21 * V[:, 0] + m22 * V[:, 1] + self.t[1]) % self.q], 1
        )

    def compose(self, other: "IsometryMap") -> "IsometryMap":
        """self o other (other is applied first)."""
        if other.q != self.q:
            raise BadModulus("maps over different moduli")
        a11, a12, a21, a22 = self.m
        b11, b12, b21, b22 = other.m
        q = self.q
        m = ((a11 * b11 + a12 * b21) % q, (a11 * b12 + a12 * b22) % q, (a21 * b11 + a22 * b21) % q, (a21 * b12 + a22 * b22) % q)
        t = self.apply(other.t)
        return IsometryMap(m, tuple(t), q, _kind(m, t, q))

    def is_identity(self) -> bool:
        return self.m == (1, 0, 0, 1) and self.t == (0, 0)

    def row(self) -> tuple:
        """(a, b, t1, t2) for a reflection."""
        if self.kind != "reflection":
            raise ValueError("only reflections have the compact row form")
        return (self.m[0], self.m[1], self.t[0], self.t[1])

    def __eq__(self, other):
        return isinstance(other, IsometryMap) and (self.m, self.t, self.q) == (other.m, other.t, other.q)

    def __hash__(self):
        return hash((self.m, self.t, self.q))


def _kind(m, t, q) -> str:
    m11, m12, m21, m22 = m
    if m == (1, 0, 0, 1):
        return "translation" if tuple(t) != (0, 0) else "rotation"
    if m11 == m22 and (m12 + m21) % q == 0:
        return "rotation"
    if m12 == m21 and (m11 + m22) % q == 0:
        return "reflection"
    raise ValueError(f"matrix {m} is neither a rotation nor a reflection shape")


class _NoRotation:
    def __repr__(self):
        return "NoRotation"

    def __bool__(self):
        return False


NO_ROTATION = _NoRotation()


@dataclass
class ReflectionCensus:
    """Reflection maps as rows (a, b, t1, t2), deduplicated, lexicographically sorted."""

    table: np.ndarray
    q: int
    kind: str
    counts: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.table)

    def __getitem__(self, i) -> IsometryMap:
        a, b, t1, t2 = (int(v) for v in self.table[i])
        return IsometryMap((a, b, b, (-a) % self.q), (t1, t2), self.q, "reflection")

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def keys(self) -> np.ndarray:
        q = self.q
        a, b, t1, t2 = self.table.T
        return ((a * q + b) * q + t1) * q + t2


@dataclass
class NHistogram:
    p: int
    x: tuple
    counts: dict  # n -> number of y with N(x, y) = n, n > 0
    census_size: int
    zero_all: int  # y over all of (Z_q^2)^2
    zero_same_norm: int  # y with |y1 - y2| = |x1 - x2|
    skipped_degenerate: int = 0

    @property
    def mass(self) -> int:
        return sum(n * c for n, c in self.counts.items())

    @property
    def support(self) -> int:
        return sum(self.counts.values())

    def to_dict(self):
        return {
            "p": self.p,
            "x": [list(self.x[0]), list(self.x[1])],
            "A": {str(n): c for n, c in sorted(self.counts.items())},
            "A0_all_pairs": self.zero_all,
            "A0_same_norm": self.zero_same_norm,
            "census_size": self.census_size,
            "skipped_degenerate": self.skipped_degenerate,
        }


def conjecture_table(p: int) -> dict:
    """Predicted (n, A_x(n)) rows; keys may collide for small p, so a list of pairs."""
    return [
        (p**3 - 3 * p**2, p**9 - p**8),
        (p**3 - p**2, p**8),
        (p**3, p**8 - 2 * p**7 + p**6),
        (p**4 - p**3, p**6 - p**5),
        (p**4, p**5 - 2 * p**4 + p**3),
        (p**5 - p**4, p**3 - p**2),
        (p**5, p**2 - 2 * p + 1),
        (p**6 - p**5, 1),
    ]


class ZqPlane:
    """The plane Z_q^2, q = p^k (k = 3 unless stated), p = 3 mod 4."""

    def __init__(self, p: int, k: int = 3):
        self.modulus = Modulus(p, k).require_3_mod_4()
        self.p = p
        self.k = k
        self.q = self.modulus.q
        self._inv = None

    def __repr__(self):
        return f"ZqPlane(p={self.p}, q={self.q})"

    # -------------------------------------------------------- basics

    @property
    def inv(self) -> np.ndarray:
        if self._inv is None:
            self._inv = inverse_table(self.q)
        return self._inv

    def vec(self, x1, x2) -> Vec2:
        return Vec2(int(x1) % self.q, int(x2) % self.q)

    def is_unit(self, x) -> bool:
        return int(x) % self.p != 0

    def inverse(self, x) -> int:
        if not self.is_unit(x):
            raise NonUnit(f"{x} is not a unit mod {self.q}")
        return int(self.inv[int(x) % self.q])

    def norm(self, v) -> int:
        return (v[0] * v[0] + v[1] * v[1]) % self.q

    def sub(self, v, w) -> Vec2:
        return Vec2((v[0] - w[0]) % self.q, (v[1] - w[1]) % self.q)

    def all_points(self) -> np.ndarray:
        r = np.arange(self.q * self.q, dtype=np.int64)
        return np.stack([r // self.q, r % self.q], 1)

    def norm_table(self) -> np.ndarray:
        """norm of every point, indexed by v1*q + v2."""
        P = self.all_points()
        return (P[:, 0] ** 2 + P[:, 1] ** 2) % self.q

    # -------------------------------------------------------- circles

    def circle(self, u, rho) -> np.ndarray:
        """Points v with |v - u| = rho, as an (n, 2) array in index order."""
        P = self.all_points()
        d = P - np.asarray(u, dtype=np.int64)
        return P[(d[:, 0] ** 2 + d[:, 1] ** 2) % self.q == int(rho) % self.q]

    def circle_size(self, rho) -> int:
        """Closed form for |C_rho(u)| when k = 3."""
        if self.k != 3:
            raise BadModulus("the circle-size closed form needs k = 3")
        p, rho = self.p, int(rho) % self.q
        if rho == 0:
            return p**2
        if rho % p:
            return p**3 + p**2
        if rho % (p * p):
            return 0
        return p**3 + p**2

    def distance_pair_count(self, rho) -> int:
        """D_{q,rho} = |{(u1, u2) : |u1 - u2| = rho}| from the closed form."""
        p, rho = self.p, int(rho) % self.q
        if self.k != 3:
            raise BadModulus("the closed form needs k = 3")
        if rho == 0:
            return p**8
        if rho % p:
            return p**9 + p**8
        if rho % (p * p):
            return 0
        return p**9 + p**8

    def distance_pair_oracle(self, rho=None, budget_points: int = 10**7):
        """Count ordered pairs directly, one circle scan per centre u.

        With rho=None returns the whole histogram rho -> D_{q,rho}.
        """
        P = self.all_points()
        q = self.q
        if len(P) ** 2 > budget_points * 100:
            raise ResourceLimit(f"q^4 = {len(P) ** 2} pairs exceed the scan budget")
        hist = np.zeros(q, dtype=np.int64)
        for u in P:
            d = P - u
            hist += np.bincount((d[:, 0] ** 2 + d[:, 1] ** 2) % q, minlength=q)
        return hist if rho is None else int(hist[int(rho) % q])

    # -------------------------------------------------------- lines

    def line(self, a, b, c) -> ZqLine:
        q = self.q
        a, b, c = int(a) % q, int(b) % q, int(c) % q
        if self.is_unit(a):
            s = self.inverse(a)
        elif self.is_unit(b):
            s = self.inverse(b)
        else:
            raise DegenerateBisector(f"({a}, {b}) has no unit coefficient; not a line of q points")
        return ZqLine(a * s % q, b * s % q, c * s % q, q, self.p)

    def classify_line(self, l: ZqLine) -> LineClass:
        units = self.is_unit(l.a) and self.is_unit(l.b) and self.is_unit(l.a * l.a + l.b * l.b)
        return LineClass.NON_ISOTROPIC if units else LineClass.ISOTROPIC

    def is_nonisotropic(self, l: ZqLine) -> bool:
        return self.classify_line(l) is LineClass.NON_ISOTROPIC

    def bisector(self, x, y) -> ZqLine:
        """B(x, y) = {z : |z - x| = |z - y|}, i.e. 2(y - x).z = |y| - |x|."""
        x, y = self.vec(*x), self.vec(*y)
        if x == y:
            raise PreconditionUnmet("the bisector of a point with itself is the whole plane")
        return self.line(2 * (y[0] - x[0]), 2 * (y[1] - x[1]), self.norm(y) - self.norm(x))

    def bisector_set(self, x, y) -> np.ndarray:
        """Oracle: the literal solution set of |z - x| = |z - y|."""
        P = self.all_points()
        dx = P - np.asarray(x)
        dy = P - np.asarray(y)
        return P[(dx[:, 0] ** 2 + dx[:, 1] ** 2 - dy[:, 0] ** 2 - dy[:, 1] ** 2) % self.q == 0]

    def nonisotropic_lines_through(self, u) -> list:
        """Lines u + t(1, s) for unit slopes s that are non-isotropic, deduplicated."""
        u = self.vec(*u)
        out = set()
        for s in range(self.q):
            if not self.is_unit(s):
                continue
            l = self.line(s, -1, s * u[0] - u[1])
            if self.is_nonisotropic(l):
                out.add(l)
        return sorted(out, key=lambda l: l.key)

    def all_lines(self) -> list:
        """Every normalised line: (1, b, c) and (a, 1, c) with a a non-unit."""
        q, out = self.q, []
        for b in range(q):
            for c in range(q):
                out.append(ZqLine(1, b, c, q, self.p))
        for a in range(0, q, self.p):
            for c in range(q):
                out.append(ZqLine(a, 1, c, q, self.p))
        return out

    def nonisotropic_lines(self) -> list:
        return [l for l in self.all_lines() if self.is_nonisotropic(l)]

    def lines_through_oracle(self, u) -> int:
        """Scan every normalised line for membership and type."""
        return sum(1 for l in self.all_lines() if l.contains(u) and self.is_nonisotropic(l))

    # -------------------------------------------------------- isometries

    def unit_circle(self) -> list:
        q = self.q
        return [(a, b) for a in range(q) for b in range(q) if (a * a + b * b) % q == 1]

    def make_rotation(self, a, b, u=(0, 0)) -> IsometryMap:
        q = self.q
        a, b = int(a) % q, int(b) % q
        if (a * a + b * b) % q != 1:
            raise NotOnUnitCircle(f"a^2 + b^2 = {(a*a+b*b) % q} != 1")
        m = (a, (-b) % q, b, a)
        return self._about(m, u, "rotation")

    def make_reflection(self, a, b, u=(0, 0)) -> IsometryMap:
        q = self.q
        a, b = int(a) % q, int(b) % q
        if (a * a + b * b) % q != 1:
            raise NotOnUnitCircle(f"a^2 + b^2 = {(a*a+b*b) % q} != 1")
        m = (a, b, b, (-a) % q)
        return self._about(m, u, "reflection")

    def make_translation(self, t) -> IsometryMap:
        t = self.vec(*t)
        return IsometryMap((1, 0, 0, 1), tuple(t), self.q, "translation" if t != (0, 0) else "rotation")

    def _about(self, m, u, kind) -> IsometryMap:
        # v -> M(v - u) + u = M v + (u - M u)
        u = self.vec(*u)
        q = self.q
        mu = ((m[0] * u[0] + m[1] * u[1]) % q, (m[2] * u[0] + m[3] * u[1]) % q)
        return IsometryMap(m, ((u[0] - mu[0]) % q, (u[1] - mu[1]) % q), q, kind)

    def reflection_fixing_line(self, l: ZqLine) -> IsometryMap:
        """The reflection about u1 built from a direction d of the line."""
        if not self.is_nonisotropic(l):
            raise IsotropicLine(str(l))
        q = self.q
        pts = l.points()
        u1, u2 = pts[0], pts[1]
        d1, d2 = int(u1[0] - u2[0]) % q, int(u1[1] - u2[1]) % q
        s = self.inverse(d1 * d1 + d2 * d2)
        a = (d1 * d1 - d2 * d2) * s % q
        b = 2 * d1 * d2 * s % q
        return self.make_reflection(a, b, u1)

    def reflection_about_normal(self, l: ZqLine) -> IsometryMap:
        """Second construction: v -> v - 2 (n.v - c) n / |n| with n = (a, b)."""
        if not self.is_nonisotropic(l):
            raise IsotropicLine(str(l))
        q = self.q
        a, b, c = l.a, l.b, l.c
        s = self.inverse(a * a + b * b)
        m = ((1 - 2 * a * a * s) % q, (-2 * a * b * s) % q, (-2 * a * b * s) % q, (1 - 2 * b * b * s) % q)
        t = (2 * c * a * s % q, 2 * c * b * s % q)
        return IsometryMap(m, t, q, _kind(m, t, q))

    def fixed_points(self, m: IsometryMap) -> np.ndarray:
        P = self.all_points()
        return P[(m.apply_many(P) == P).all(1)]

    def unique_rotation(self, u, x, y) -> IsometryMap:
        """The rotation about u taking x to y."""
        u, x, y = self.vec(*u), self.vec(*x), self.vec(*y)
        v, w = self.sub(x, u), self.sub(y, u)
        n = self.norm(v)
        if not self.is_unit(n):
            raise NonUnitRadius(f"|x - u| = {n} is not a unit")
        if self.norm(w) != n:
            raise NormMismatch(f"|x - u| = {n} but |y - u| = {self.norm(w)}")
        a, b = self._rotation_taking(v, w)
        return self.make_rotation(a, b, u)

    def _rotation_taking(self, v, w):
        # [[a, -b], [b, a]] v = w  <=>  [[v1, -v2], [v2, v1]] (a, b) = w
        q = self.q
        s = self.inverse(self.norm(v))
        a = (v[0] * w[0] + v[1] * w[1]) * s % q
        b = (v[0] * w[1] - v[1] * w[0]) * s % q
        return a, b

    def segment_rotation(self, x, y, z, w):
        """The rotation taking x to z and y to w, or NO_ROTATION when x - y = z - w."""
        x, y, z, w = (self.vec(*v) for v in (x, y, z, w))
        if (x, y) == (z, w):
            raise PreconditionUnmet("(x, y) = (z, w)")
        n = self.norm(self.sub(x, y))
        if self.norm(self.sub(z, w)) != n:
            raise NormMismatch("|x - y| != |z - w|")
        if not self.is_unit(n):
            raise NonUnitDistance(f"|x - y| = {n} is not a unit")
        if self.sub(x, y) == self.sub(z, w):
            return NO_ROTATION
        a, b = self._rotation_taking(self.sub(y, x), self.sub(w, z))
        q = self.q
        rx = ((a * x[0] - b * x[1]) % q, (b * x[0] + a * x[1]) % q)
        t = ((z[0] - rx[0]) % q, (z[1] - rx[1]) % q)
        return IsometryMap((a, (-b) % q, b, a), t, q, "rotation")

    def rotation_maps(self) -> np.ndarray:
        """All maps v -> R v + t with R a rotation matrix, rows (a, b, t1, t2)."""
        q = self.q
        R = np.array(self.unit_circle(), dtype=np.int64)
        t = self.all_points()
        return np.concatenate([np.repeat(R, len(t), 0), np.tile(t, (len(R), 1))], 1)

    def rotation_search(self, x_pts, y_pts, maps: np.ndarray | None = None) -> np.ndarray:
        """Rows of ``maps`` (rotation form) sending every x_pts[i] to y_pts[i]."""
        maps = self.rotation_maps() if maps is None else maps
        q = self.q
        a, b, t1, t2 = maps.T
        ok = np.ones(len(maps), dtype=bool)
        for x, y in zip(x_pts, y_pts):
            ok &= ((a * x[0] - b * x[1] + t1) % q == y[0]) & ((b * x[0] + a * x[1] + t2) % q == y[1])
        return maps[ok]

    def bisector_equal_distance_check(self, x, y, z, w) -> bool:
        """|x - y| = |z - w| given B(x, z) = B(y, w) non-isotropic."""
        x, y, z, w = (self.vec(*v) for v in (x, y, z, w))
        if x == z and y == w:
            return self.norm(self.sub(x, y)) == self.norm(self.sub(z, w))
        try:
            l1, l2 = self.bisector(x, z), self.bisector(y, w)
        except (DegenerateBisector, PreconditionUnmet) as e:
            raise PreconditionUnmet(f"bisector undefined: {e}") from None
        if l1 != l2 or not self.is_nonisotropic(l1):
            raise PreconditionUnmet("bisectors differ or are isotropic")
        return self.norm(self.sub(x, y)) == self.norm(self.sub(z, w))

    # -------------------------------------------------------- vectorised bisectors

    def bisector_keys(self, X: np.ndarray, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Normalised line keys of B(X[i], Y[i]); -1 where no coefficient is a unit.

        Returns (keys, nonisotropic_mask).
        """
        q, p, inv = self.q, self.p, self.inv
        X = np.asarray(X, dtype=np.int64)
        Y = np.asarray(Y, dtype=np.int64)
        a = 2 * (Y[:, 0] - X[:, 0]) % q
        b = 2 * (Y[:, 1] - X[:, 1]) % q
        c = ((Y * Y).sum(1) - (X * X).sum(1)) % q
        ua, ub = a % p != 0, b % p != 0
        s = np.where(ua, inv[a], inv[b])
        an, bn, cn = a * s % q, b * s % q, c * s % q
        lead_b = ~ua
        other = np.where(ua, bn, an)
        keys = ((lead_b * q) + other) * q + cn
        keys = np.where(ua | ub, keys, -1)
        noniso = ua & ub & ((an * an + bn * bn) % p != 0)
        return keys, noniso

    def line_from_key(self, key: int) -> ZqLine:
        q = self.q
        c = key % q
        other = (key // q) % q
        if key // (q * q):
            return ZqLine(other, 1, c, q, self.p)
        return ZqLine(1, other, c, q, self.p)

    # -------------------------------------------------------- reflection census

    def reflection_census(self, kind: str = "nonisotropic", budget: int = 5 * 10**6) -> ReflectionCensus:
        """Reflection maps v -> S(v - u) + u deduplicated as affine maps.

        kind="all" keeps every map; kind="nonisotropic" keeps those whose fixed
        set is a non-isotropic line (the involutions of the glossary).
        """
        if kind not in ("all", "nonisotropic"):
            raise ParamOutOfRange(f"unknown census kind {kind!r}")
        q = self.q
        S = np.array(self.unit_circle(), dtype=np.int64)
        U = self.all_points()
        if len(S) * len(U) > budget:
            raise ResourceLimit(f"{len(S) * len(U)} (matrix, centre) presentations exceed budget {budget}")
        a = np.repeat(S[:, 0], len(U))
        b = np.repeat(S[:, 1], len(U))
        u1 = np.tile(U[:, 0], len(S))
        u2 = np.tile(U[:, 1], len(S))
        t1 = (u1 - a * u1 - b * u2) % q
        t2 = (u2 - b * u1 + a * u2) % q
        rows = np.unique(np.stack([a, b, t1, t2], 1), axis=0)
        counts = {"matrix_center_presentations": len(a), "maps": len(rows)}
        if kind == "nonisotropic":
            keep = np.array([self._fixes_nonisotropic_line(r) for r in rows], dtype=bool)
            rows = rows[keep]
        counts["nonisotropic"] = int(len(rows)) if kind == "nonisotropic" else None
        return ReflectionCensus(rows, q, kind, counts)

    def census_from_lines(self) -> ReflectionCensus:
        """Second route: one reflection per non-isotropic line."""
        rows = [self.reflection_fixing_line(l).row() for l in self.nonisotropic_lines()]
        rows = np.unique(np.array(rows, dtype=np.int64), axis=0)
        return ReflectionCensus(rows, self.q, "nonisotropic", {"lines": len(rows)})

    def _fixes_nonisotropic_line(self, row) -> bool:
        a, b, t1, t2 = (int(v) for v in row)
        m = IsometryMap((a, b, b, (-a) % self.q), (t1, t2), self.q, "reflection")
        F = self.fixed_points(m)
        if len(F) != self.q:
            return False
        d = (F[1:] - F[0]) % self.q
        gen = d[(d % self.p != 0).any(1)]
        if not len(gen):
            return False
        d1, d2 = (int(v) for v in gen[0])
        l = self.line(-d2, d1, -d2 * int(F[0][0]) + d1 * int(F[0][1]))
        return self.is_nonisotropic(l) and all(l.contains(f) for f in F)

    # -------------------------------------------------------- N(x, y)

    def _pair(self, x):
        (a, b), (c, d) = x
        return (self.vec(a, b), self.vec(c, d))

    def N_count(self, x, y, census: ReflectionCensus) -> int:
        """Ordered reflection pairs (S1, S2) with S2(S1(x_i)) = y_i, by scanning all pairs."""
        x, y = self._pair(x), self._pair(y)
        q = self.q
        a, b, t1, t2 = (census.table[:, i] for i in range(4))

        def app(v1, v2, a, b, t1, t2):
            return (a * v1 + b * v2 + t1) % q, (b * v1 - a * v2 + t2) % q

        ok = None
        for (v1, v2), (w1, w2) in zip(x, y):
            z1, z2 = app(v1, v2, a, b, t1, t2)
            y1, y2 = app(z1[:, None], z2[:, None], a[None, :], b[None, :], t1[None, :], t2[None, :])
            hit = (y1 == w1) & (y2 == w2)
            ok = hit if ok is None else ok & hit
        return int(ok.sum())

    def N_count_solve(self, x, y, census: ReflectionCensus) -> int:
        """Same count: for each S1, solve for the reflection sending S1(x) to y."""
        x, y = self._pair(x), self._pair(y)
        q = self.q
        A, B, T1, T2 = (census.table[:, i] for i in range(4))
        z1 = ((A * x[0][0] + B * x[0][1] + T1) % q, (B * x[0][0] - A * x[0][1] + T2) % q)
        z2 = ((A * x[1][0] + B * x[1][1] + T1) % q, (B * x[1][0] - A * x[1][1] + T2) % q)
        e1 = (y[0][0] - y[1][0]) % q
        e2 = (y[0][1] - y[1][1]) % q
        d1 = (z1[0] - z2[0]) % q
        d2 = (z1[1] - z2[1]) % q
        nd = (d1 * d1 + d2 * d2) % q
        if not self.is_unit(int(nd[0])):
            return self.N_count(x, y, census)
        s = self.inv[nd]
        a = (d1 * e1 - d2 * e2) * s % q
        b = (d2 * e1 + d1 * e2) * s % q
        t1 = (y[0][0] - (a * z1[0] + b * z1[1])) % q
        t2 = (y[0][1] - (b * z1[0] - a * z1[1])) % q
        keys = ((a * q + b) * q + t1) * q + t2
        # the solved matrix must also carry the difference vector exactly
        exact = ((a * d1 + b * d2) % q == e1) & ((b * d1 - a * d2) % q == e2)
        return int(np.count_nonzero(exact & np.isin(keys, census.keys())))

    def N_distribution(self, x, census: ReflectionCensus, budget_pairs: int | None = 10**9) -> NHistogram:
        """Histogram n -> #{y : N(x, y) = n} by pushing every composition forward."""
        x = self._pair(x)
        q = self.q
        d = self.norm(self.sub(x[0], x[1]))
        if not self.is_unit(d):
            raise PreconditionUnmet(f"|x1 - x2| = {d} is not a unit")
        pairs = len(census) ** 2
        if budget_pairs is not None and pairs > budget_pairs:
            raise ResourceLimit(f"{pairs} reflection pairs exceed budget {budget_pairs}")
        if q**4 > 2**31:
            raise ResourceLimit(f"q^4 = {q**4} histogram cells is too large")
        hist = kernels.reflection_pushforward(census.table, x, q)
        values = hist[hist > 0]
        counts = dict(sorted(Counter(values.tolist()).items()))
        same_norm = self.distance_pair_count(d) if self.k == 3 else int(np.count_nonzero(self.norm_table() == d)) * q * q
        support = int(values.size)
        return NHistogram(
            p=self.p,
            x=(tuple(x[0]), tuple(x[1])),
            counts={int(k): int(v) for k, v in counts.items()},
            census_size=len(census),
            zero_all=q**4 - support,
            zero_same_norm=same_norm - support,
        )

    # -------------------------------------------------------- bisector families

    def _pairs(self, P):
        P = np.asarray([tuple(v) for v in P], dtype=np.int64).reshape(-1, 2) % self.q
        P = np.unique(P, axis=0)
        n = len(P)
        i, j = np.nonzero(~np.eye(n, dtype=bool))
        return P, i, j

    def _tilde(self, P) -> np.ndarray:
        d = (P[:, None, :] - P[None, :, :]) % self.p
        return (d != 0).all(2)

    def bisector_family(self, P):
        """(lines, w, skipped): bisectors of ordered pairs with unit coordinate differences."""
        P, i, j = self._pairs(P)
        if not len(i):
            return [], {}, 0
        tilde = self._tilde(P)[i, j]
        keys, _ = self.bisector_keys(P[i[tilde]], P[j[tilde]])
        w = Counter(keys.tolist())
        lines = [self.line_from_key(k) for k in sorted(w)]
        return lines, {self.line_from_key(k): v for k, v in sorted(w.items())}, int((~tilde).sum())

    def quadruple_stats(self, P, budget_pairs: int | None = 10**7) -> ReportDocument:
        """|P~|, |Pi'_d|, |Q'_d|, |Q'| and the Cauchy-Schwarz step for a point set."""
        P, i, j = self._pairs(P)
        n = len(P)
        if budget_pairs is not None and n * n > budget_pairs:
            raise ResourceLimit(f"|P| = {n} exceeds the pair budget")
        q = self.q
        rep = ReportDocument("quadruples", config={"p": self.p, "size": n})
        T = self._tilde(P) if n else np.zeros((0, 0), bool)
        np.fill_diagonal(T, False)
        nt = rep.add("|P~|", int(T.sum()))
        diffs = (P[:, None, :] - P[None, :, :]) % q if n else np.zeros((0, 0, 2), np.int64)
        norms = (diffs[..., 0] ** 2 + diffs[..., 1] ** 2) % q
        pi_d = Counter(norms[T].tolist())
        rep.add("|Pi'_d|", {int(k): int(v) for k, v in sorted(pi_d.items())})

        lines, w, skipped = self.bisector_family(P)
        rep.add("|B(P)|", len(lines))
        rep.add("skipped pairs", skipped)
        sw = sum(w.values())
        sw2 = rep.add("sum w^2", sum(v * v for v in w.values()))
        rep.check("sum w = |P~|", sw, nt, "==")

        Qp = 0
        Qd: Counter = Counter()
        if len(i):
            keys, noniso = self.bisector_keys(P[i], P[j])
            sel = noniso & (keys >= 0)
            ki, xi, zi = keys[sel], i[sel], j[sel]
            order = np.argsort(ki, kind="stable")
            ki, xi, zi = ki[order], xi[order], zi[order]
            bounds = np.flatnonzero(np.diff(ki)) + 1
            for X, Z in zip(np.split(xi, bounds), np.split(zi, bounds)):
                # (x, y) and (z, w) range over this bisector class: y from X, w from Z
                ok = T[X[:, None], X[None, :]] & T[Z[:, None], Z[None, :]]
                Qp += int(ok.sum())
                nx = norms[X[:, None], X[None, :]]
                nz = norms[Z[:, None], Z[None, :]]
                same = ok & (nx == nz)
                for d, c in Counter(nx[same].tolist()).items():
                    Qd[int(d)] += c
        rep.add("|Q'|", Qp)
        rep.add("|Q'_d|", dict(sorted(Qd.items())))
        rep.check("|Q'| = sum_d |Q'_d|", Qp, sum(Qd.values()), "==")
        rep.check("|P~|^2 <= |B(P)| sum w^2", nt * nt, len(lines) * sw2)
        rep.check("sum w^2 = |Q'|", sw2, Qp, "==", asserted=False)
        return rep

    # -------------------------------------------------------- exhaustive property searches

    def lemma_equal_bisector_search(self) -> tuple[int, int, int]:
        """Check |x - y| = |z - w| whenever B(x, z) = B(y, w) is non-isotropic.

        Returns (lines, quadruples checked, counterexamples) over the whole plane.
        """
        q = self.q
        P = self.all_points()
        n = len(P)
        idx = np.arange(n)
        lines = quads = bad = 0
        groups: dict = {}
        for s in range(0, n, 64):
            xi = np.repeat(idx[s : s + 64], n)
            zi = np.tile(idx, min(64, n - s))
            m = xi != zi
            xi, zi = xi[m], zi[m]
            keys, noniso = self.bisector_keys(P[xi], P[zi])
            keep = noniso & (keys >= 0)
            for k, x, z in zip(keys[keep].tolist(), xi[keep].tolist(), zi[keep].tolist()):
                groups.setdefault(k, []).append((x, z))
        for k, pairs in groups.items():
            arr = np.array(pairs, dtype=np.int64)
            X, Z = P[arr[:, 0]], P[arr[:, 1]]
            dxy = (X[:, None, :] - X[None, :, :]) % q
            dzw = (Z[:, None, :] - Z[None, :, :]) % q
            nxy = (dxy[..., 0] ** 2 + dxy[..., 1] ** 2) % q
            nzw = (dzw[..., 0] ** 2 + dzw[..., 1] ** 2) % q
            lines += 1
            quads += nxy.size
            bad += int(np.count_nonzero(nxy != nzw))
        return lines, quads, bad
