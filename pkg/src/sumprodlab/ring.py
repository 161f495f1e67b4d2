"""Arithmetic in Z/p^kZ and the square-root counting function Q(d)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BadModulus, ModulusMismatch, NonUnit

# Products of two canonical residues must fit in int64 before reduction.
MAX_MODULUS = 2**31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Modulus:
    """The ring Z/qZ with q = p**k, p an odd prime."""

    p: int
    k: int = 1

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise BadModulus(f"p={self.p} is not an odd prime")
        if self.k < 1:
            raise BadModulus(f"exponent k={self.k} must be >= 1")
        if self.p**self.k > MAX_MODULUS:
            raise BadModulus(f"q={self.p}^{self.k} exceeds 2^31")

    @cached_property
    def q(self) -> int:
        return self.p**self.k

    def require_3_mod_4(self):
        if self.p % 4 != 3:
            raise BadModulus(f"p={self.p} is not 3 mod 4")
        return self

    def __call__(self, value: int) -> "RingElem":
        return RingElem(value, self)

    def units(self) -> np.ndarray:
        r = np.arange(self.q, dtype=np.int64)
        return r[r % self.p != 0]

    def __repr__(self):
        return f"Modulus(p={self.p}, k={self.k})"


class RingElem:
    """An element of Z/qZ held by its canonical representative in [0, q)."""

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: Modulus):
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "value", int(value) % modulus.q)

    def __setattr__(self, name, value):
        raise AttributeError("RingElem is immutable")

    def _coerce(self, other) -> int:
        if isinstance(other, RingElem):
            if other.modulus != self.modulus:
                raise ModulusMismatch(f"{self.modulus} vs {other.modulus}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other)
        return NotImplemented

    def _new(self, v):
        return RingElem(v, self.modulus)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def __pow__(self, e: int):
        if e < 0:
            return inverse(self) ** (-e)
        return self._new(pow(self.value, e, self.modulus.q))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * inverse(self._new(o))

    def __eq__(self, other):
        if isinstance(other, RingElem):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.modulus.q
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus.q))

    def __int__(self):
        return self.value

    __index__ = __int__

    def __repr__(self):
        return f"{self.value} (mod {self.modulus.q})"


def is_unit(x: RingElem) -> bool:
    return x.value % x.modulus.p != 0


def _ext_gcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        t, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - t * x1
        y0, y1 = y1, y0 - t * y1
    return a, x0, y0


def inverse(x: RingElem) -> RingElem:
    g, s, _ = _ext_gcd(x.value, x.modulus.q)
    if g != 1:
        raise NonUnit(f"{x.value} is not invertible mod {x.modulus.q}")
    return RingElem(s, x.modulus)


def inv_mod(a: int, m: int) -> int:
    """Inverse of the integer a modulo m (raises NonUnit)."""
    g, s, _ = _ext_gcd(a % m, m)
    if g != 1:
        raise NonUnit(f"{a} is not invertible mod {m}")
    return s % m


def inverse_table(m: int) -> np.ndarray:
    """Array inv with inv[a] = a^-1 mod m for units, 0 elsewhere."""
    inv = np.zeros(m, dtype=np.int64)
    for a in range(1, m):
        g, s, _ = _ext_gcd(a, m)
        if g == 1:
            inv[a] = s % m
    return inv


def legendre(d: int, p: int) -> int:
    """Legendre symbol (d|p) by Euler's criterion."""
    r = pow(d % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def sqrt_count(d: RingElem) -> int:
    """Number of x in Z/p^3Z with x^2 = d, from the six-case closed form."""
    m = d.modulus
    if m.k != 3:
        raise BadModulus("the closed form for Q(d) needs k = 3")
    p, v = m.p, d.value
    if v == 0:
        return p
    if v % p:
        return 2 if legendre(v, p) == 1 else 0
    if v % (p * p):
        return 0
    return 2 * p if legendre(v // (p * p), p) == 1 else 0


def sqrt_count_oracle(d: RingElem) -> int:
    """Exhaustive count of square roots of d in [0, q)."""
    q = d.modulus.q
    return sum(1 for x in range(q) if (x * x - d.value) % q == 0)


def sqrt_count_table(m: Modulus) -> np.ndarray:
    """Q(d) for every d in [0, q) by a single scan of all squares."""
    x = np.arange(m.q, dtype=np.int64)
    return np.bincount(x * x % m.q, minlength=m.q)
