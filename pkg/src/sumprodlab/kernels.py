"""Hot loops, each with a numba kernel and a numpy fallback.

The public wrappers at the bottom pick the backend from ``_accel.USE_NUMBA``.
Both paths must return identical integers; ``tests/test_kernels.py`` and
``benchmarks/bench_kernels.py`` run them side by side.
"""

from __future__ import annotations

import numpy as np

from . import _accel
from ._accel import njit, prange

# --------------------------------------------------------------- collinear triples


@njit
def _inv_table_nb(p):
    inv = np.zeros(p, np.int64)
    for a in range(1, p):
        for b in range(1, p):
            if a * b % p == 1:
                inv[a] = b
                break
    return inv


@njit
def _t_fast_nb(a1, a2, a3, inv, p):
    n2 = a2.size * a2.size
    n3 = a3.size * a3.size
    c2 = np.zeros(p + 1, np.int64)
    c3 = np.zeros(p + 1, np.int64)
    total = 0
    generic = 0
    for x in a1:
        for y in a1:
            c2[:] = 0
            c3[:] = 0
            z2 = 0
            z3 = 0
            for bx in a2:
                dx = (bx - x) % p
                for by in a2:
                    dy = (by - y) % p
                    if dx == 0 and dy == 0:
                        z2 = 1
                    elif dx == 0:
                        c2[p] += 1
                    else:
                        c2[dy * inv[dx] % p] += 1
            for cx in a3:
                dx = (cx - x) % p
                for cy in a3:
                    dy = (cy - y) % p
                    if dx == 0 and dy == 0:
                        z3 = 1
                    elif dx == 0:
                        c3[p] += 1
                    else:
                        c3[dy * inv[dx] % p] += 1
            s = 0
            for d in range(p + 1):
                s += c2[d] * c3[d]
            total += s + z2 * n3 + z3 * n2 - z2 * z3
            generic += s
    # remove u2 == u3 (both != u1) from the generic count
    common = 0
    for b in a2:
        for c in a3:
            if b == c:
                common += 1
    c1 = 0
    for a in a1:
        for b in a2:
            if a == b:
                for c in a3:
                    if c == a:
                        c1 += 1
    distinct = generic - (a1.size * a1.size * common * common - c1 * c1)
    return total, distinct


@njit
def _t_oracle_nb(a1, a2, a3, p):
    total = 0
    distinct = 0
    for x1 in a1:
        for x2 in a1:
            for y1 in a2:
                for y2 in a2:
                    for z1 in a3:
                        for z2 in a3:
                            if ((y1 - x1) * (z2 - x2) - (z1 - x1) * (y2 - x2)) % p == 0:
                                total += 1
                                if (x1 != y1 or x2 != y2) and (x1 != z1 or x2 != z2) and (y1 != z1 or y2 != z2):
                                    distinct += 1
    return total, distinct


@njit
def _unpack(mask, p, out):
    n = 0
    for i in range(p):
        if (mask >> i) & 1:
            out[n] = i
            n += 1
    return n


@njit(parallel=True)
def _t_batch_nb(m1, m2, m3, p, oracle):
    n = m1.size
    res = np.zeros((n, 2), np.int64)
    inv = _inv_table_nb(p)
    for i in prange(n):
        b1 = np.empty(p, np.int64)
        b2 = np.empty(p, np.int64)
        b3 = np.empty(p, np.int64)
        k1 = _unpack(m1[i], p, b1)
        k2 = _unpack(m2[i], p, b2)
        k3 = _unpack(m3[i], p, b3)
        if oracle:
            t, d = _t_oracle_nb(b1[:k1], b2[:k2], b3[:k3], p)
        else:
            t, d = _t_fast_nb(b1[:k1], b2[:k2], b3[:k3], inv, p)
        res[i, 0] = t
        res[i, 1] = d
    return res


def _t_fast_np(a1, a2, a3, p):
    inv = np.array([0] + [pow(a, -1, p) for a in range(1, p)], dtype=np.int64)

    def points(a):
        return np.stack(np.meshgrid(a, a, indexing="ij"), -1).reshape(-1, 2)

    u1, u2, u3 = points(a1), points(a2), points(a3)

    def classes(u):
        d = (u[None, :, :] - u1[:, None, :]) % p
        dx, dy = d[..., 0], d[..., 1]
        cls = np.where(dx == 0, p, dy * inv[dx] % p)
        zero = (dx == 0) & (dy == 0)
        cls = np.where(zero, p + 1, cls)
        cnt = np.zeros((len(u1), p + 2), np.int64)
        np.add.at(cnt, (np.repeat(np.arange(len(u1)), u.shape[0]), cls.ravel()), 1)
        return cnt[:, : p + 1], cnt[:, p + 1]

    c2, z2 = classes(u2)
    c3, z3 = classes(u3)
    s = (c2 * c3).sum(1)
    total = int((s + z2 * len(u3) + z3 * len(u2) - z2 * z3).sum())
    i23 = len(np.intersect1d(a2, a3))
    i123 = len(np.intersect1d(np.intersect1d(a1, a2), a3))
    distinct = int(s.sum()) - (len(u1) * i23 * i23 - i123 * i123)
    return total, distinct


def _t_oracle_np(a1, a2, a3, p):
    x1, x2, y1, y2, z1, z2 = np.ix_(a1, a1, a2, a2, a3, a3)
    det = ((y1 - x1) * (z2 - x2) - (z1 - x1) * (y2 - x2)) % p == 0
    ne = lambda a, b, c, d: (a != c) | (b != d)  # noqa: E731
    dist = ne(x1, x2, y1, y2) & ne(x1, x2, z1, z2) & ne(y1, y2, z1, z2)
    return int(det.sum()), int((det & dist).sum())


def _bits(mask, p):
    return np.array([i for i in range(p) if (mask >> i) & 1], dtype=np.int64)


def t_counts(a1, a2, a3, p: int, oracle: bool = False):
    """(T, T-distinct) for element arrays over F_p."""
    a1, a2, a3 = (np.asarray(a, dtype=np.int64) % p for a in (a1, a2, a3))
    if _accel.USE_NUMBA:
        if oracle:
            return tuple(int(v) for v in _t_oracle_nb(a1, a2, a3, p))
        return tuple(int(v) for v in _t_fast_nb(a1, a2, a3, _inv_table_nb(p), p))
    return (_t_oracle_np if oracle else _t_fast_np)(a1, a2, a3, p)


def t_counts_batch(m1, m2, m3, p: int, oracle: bool = False) -> np.ndarray:
    """(T, T-distinct) rows for triples of subsets encoded as bitmasks of [0, p)."""
    m1, m2, m3 = (np.asarray(m, dtype=np.int64) for m in (m1, m2, m3))
    if _accel.USE_NUMBA:
        return _t_batch_nb(m1, m2, m3, p, oracle)
    f = _t_oracle_np if oracle else _t_fast_np
    out = np.zeros((m1.size, 2), np.int64)
    for i in range(m1.size):
        out[i] = f(_bits(m1[i], p), _bits(m2[i], p), _bits(m3[i], p), p)
    return out


# --------------------------------------------------------------- reflection compositions


@njit
def _pushforward_nb(ra, rb, rt1, rt2, x11, x12, x21, x22, q):
    # maps are v -> (a v1 + b v2 + t1, b v1 - a v2 + t2); y = S2(S1(x))
    n = ra.size
    q2 = q * q
    hist = np.zeros(q2 * q2, np.int64)
    for i in range(n):
        a, b, t1, t2 = ra[i], rb[i], rt1[i], rt2[i]
        u1 = (a * x11 + b * x12 + t1) % q
        u2 = (b * x11 - a * x12 + t2) % q
        w1 = (a * x21 + b * x22 + t1) % q
        w2 = (b * x21 - a * x22 + t2) % q
        for j in range(n):
            c, d, s1, s2 = ra[j], rb[j], rt1[j], rt2[j]
            y1 = ((c * u1 + d * u2 + s1) % q) * q + (d * u1 - c * u2 + s2) % q
            y2 = ((c * w1 + d * w2 + s1) % q) * q + (d * w1 - c * w2 + s2) % q
            hist[y1 * q2 + y2] += 1
    return hist


def _pushforward_np(ra, rb, rt1, rt2, x11, x12, x21, x22, q):
    q2 = q * q

    def apply(a, b, t1, t2, v1, v2):
        return (a * v1 + b * v2 + t1) % q, (b * v1 - a * v2 + t2) % q

    u1, u2 = apply(ra, rb, rt1, rt2, x11, x12)
    w1, w2 = apply(ra, rb, rt1, rt2, x21, x22)
    c, d, s1, s2 = (v[None, :] for v in (ra, rb, rt1, rt2))
    y11, y12 = apply(c, d, s1, s2, u1[:, None], u2[:, None])
    y21, y22 = apply(c, d, s1, s2, w1[:, None], w2[:, None])
    key = (y11 * q + y12) * q2 + (y21 * q + y22)
    return np.bincount(key.ravel(), minlength=q2 * q2)


def reflection_pushforward(refl: np.ndarray, x, q: int) -> np.ndarray:
    """hist[y] = #{(S1, S2) : S2(S1(x_i)) = y_i} over y encoded as (y1*q^2 + y2)."""
    ra, rb, rt1, rt2 = (np.ascontiguousarray(refl[:, i], dtype=np.int64) for i in range(4))
    (x11, x12), (x21, x22) = x
    args = (ra, rb, rt1, rt2, int(x11), int(x12), int(x21), int(x22), q)
    if _accel.USE_NUMBA:
        return _pushforward_nb(*args)
    return _pushforward_np(*args)


# --------------------------------------------------------------- A^2 row statistics


@njit(parallel=True)
def _a2_rows_nb(nbr, rows, c_j, c_i):
    n = nbr.shape[0]
    out = np.zeros((rows.size, 4), np.int64)  # abs row sum of E, diag of A^2, max offdiag, support size
    for r in prange(rows.size):
        x = rows[r]
        cnt = np.zeros(n, np.int64)
        for z in nbr[x]:
            for y in nbr[z]:
                cnt[y] += 1
        s = 0
        mx = 0
        nz = 0
        for y in range(n):
            v = cnt[y]
            if v:
                nz += 1
            e = v - c_j - (c_i if y == x else 0)
            s += e if e >= 0 else -e
            if y != x and v > mx:
                mx = v
        out[r, 0] = s
        out[r, 1] = cnt[x]
        out[r, 2] = mx
        out[r, 3] = nz
    return out


def _a2_rows_np(nbr, rows, c_j, c_i):
    n = nbr.shape[0]
    out = np.zeros((rows.size, 4), np.int64)
    for r, x in enumerate(rows):
        cnt = np.bincount(nbr[nbr[x]].ravel(), minlength=n)
        e = cnt - c_j
        e[x] -= c_i
        off = cnt.copy()
        off[x] = 0
        out[r] = (np.abs(e).sum(), cnt[x], off.max(), np.count_nonzero(cnt))
    return out


def a2_row_stats(nbr: np.ndarray, rows, c_j: int, c_i: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    if _accel.USE_NUMBA:
        return _a2_rows_nb(nbr, rows, c_j, c_i)
    return _a2_rows_np(nbr, rows, c_j, c_i)


@njit
def _a2_entries_nb(nbr, xs, ys):
    out = np.zeros(xs.size, np.int64)
    for i in range(xs.size):
        y = ys[i]
        c = 0
        for z in nbr[xs[i]]:
            for w in nbr[z]:
                if w == y:
                    c += 1
        out[i] = c
    return out


def a2_entries(nbr: np.ndarray, xs, ys) -> np.ndarray:
    """(A^2)_{xy} for paired index arrays."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    if _accel.USE_NUMBA:
        return _a2_entries_nb(nbr, xs, ys)
    return (nbr[nbr[xs]] == ys[:, None, None]).sum(axis=(1, 2))


# --------------------------------------------------------------- adjacency mat-vec


@njit(parallel=True)
def _gather_sum_nb(nbr, v):
    n, k = nbr.shape
    out = np.empty(n, np.float64)
    for i in prange(n):
        s = 0.0
        for j in range(k):
            s += v[nbr[i, j]]
        out[i] = s
    return out


def gather_sum(nbr: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Adjacency mat-vec for a graph stored as a dense neighbour table."""
    v = np.ascontiguousarray(v, dtype=np.float64)
    if _accel.USE_NUMBA:
        return _gather_sum_nb(nbr, v)
    return v[nbr].sum(axis=1)
