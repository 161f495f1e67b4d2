"""Graphs on pairs of points, A^2 statistics, eigenvalue estimates, mixing checks."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    AsymmetricConnectionSet,
    NonConvergence,
    NonSquare,
    PreconditionUnmet,
    ResourceLimit,
)
from .report import ReportDocument
from .zqgeom import ReflectionCensus, ZqPlane


@dataclass
class SparseGraph:
    """Undirected graph in CSR form with sorted neighbour lists.

    ``payload`` optionally labels vertices (pair keys for the bisector graph).
    """

    indptr: np.ndarray
    indices: np.ndarray
    payload: np.ndarray | None = None
    degree: int | None = None

    def __post_init__(self):
        if self.degree is not None and not np.all(np.diff(self.indptr) == self.degree):
            raise PreconditionUnmet(f"graph is not {self.degree}-regular")
        if self.self_loops():
            raise PreconditionUnmet(f"{self.self_loops()} self-loops")

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_endpoints(self) -> int:
        return int(self.indices.size)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def table(self) -> np.ndarray:
        """Neighbour table (n, degree); regular graphs only."""
        if self.degree is None:
            raise PreconditionUnmet("neighbour table needs a regular graph")
        return self.indices.reshape(self.n, self.degree)

    def self_loops(self) -> int:
        rows = np.repeat(np.arange(self.n), self.degrees())
        return int(np.count_nonzero(self.indices == rows))

    def multi_edges(self) -> int:
        rows = np.repeat(np.arange(self.n), self.degrees())
        key = rows.astype(np.int64) * self.n + self.indices
        return int(key.size - np.unique(key).size)

    def is_symmetric(self) -> bool:
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        fwd = np.sort(rows * self.n + self.indices)
        bwd = np.sort(self.indices.astype(np.int64) * self.n + rows)
        return bool(np.array_equal(fwd, bwd))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if self.degree is not None:
            return kernels.gather_sum(self.table(), v)
        rows = np.repeat(np.arange(self.n), self.degrees())
        return np.bincount(rows, weights=np.asarray(v, dtype=np.float64)[self.indices], minlength=self.n)

    def dense(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=np.int64)
        rows = np.repeat(np.arange(self.n), self.degrees())
        np.add.at(A, (rows, self.indices), 1)
        return A

    @classmethod
    def from_dense(cls, A) -> "SparseGraph":
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise NonSquare(f"shape {A.shape}")
        rows, cols = np.nonzero(A)
        mult = A[rows, cols].astype(np.int64)
        rows, cols = np.repeat(rows, mult), np.repeat(cols, mult)
        indptr = np.concatenate([[0], np.cumsum(np.bincount(rows, minlength=len(A)))])
        deg = np.diff(indptr)
        return cls(indptr, cols.astype(np.int64), degree=int(deg[0]) if len(deg) and (deg == deg[0]).all() else None)

    @classmethod
    def from_table(cls, table: np.ndarray, payload=None) -> "SparseGraph":
        table = np.sort(table, axis=1)
        n, d = table.shape
        return cls(np.arange(n + 1, dtype=np.int64) * d, table.ravel(), payload, d)

    def _rows_of(self, frontier: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(source, neighbour) arrays for all edges leaving ``frontier``."""
        deg = self.degrees()[frontier]
        src = np.repeat(frontier, deg)
        starts = np.repeat(self.indptr[frontier] - np.cumsum(deg) + deg, deg)
        return src, self.indices[starts + np.arange(deg.sum())]

    def bipartition(self) -> np.ndarray | None:
        """+-1 colouring if the graph is bipartite, else None (level-synchronous BFS)."""
        colour = np.zeros(self.n, dtype=np.int8)
        for s in range(self.n):
            if colour[s]:
                continue
            colour[s] = 1
            frontier = np.array([s])
            while frontier.size:
                src, nb = self._rows_of(frontier)
                if np.any(colour[nb] == colour[src]):
                    return None
                fresh = colour[nb] == 0
                new, first = np.unique(nb[fresh], return_index=True)
                colour[new] = -colour[src[fresh][first]]
                frontier = new
        return colour.astype(np.float64)

    def components(self) -> int:
        seen = np.zeros(self.n, dtype=bool)
        count = 0
        for s in range(self.n):
            if seen[s]:
                continue
            count += 1
            seen[s] = True
            todo = [s]
            while todo:
                u = todo.pop()
                nb = self.neighbors(u)
                new = nb[~seen[nb]]
                seen[new] = True
                todo.extend(new.tolist())
        return count


# ---------------------------------------------------------------- bisector graph


def pair_vertices(plane: ZqPlane, d: int) -> np.ndarray:
    """Sorted keys x1*q^2 + x2 of the pairs with |x1 - x2| = d."""
    q = plane.q
    q2 = q * q
    D = np.flatnonzero(plane.norm_table() == d % q)
    X1 = np.repeat(np.arange(q2, dtype=np.int64), len(D))
    dv = np.tile(D, q2)
    X2 = ((X1 // q + dv // q) % q) * q + (X1 % q + dv % q) % q
    return np.sort(X1 * q2 + X2)


def build_bisector_graph(plane: ZqPlane, d: int, census: ReflectionCensus | None = None, max_vertices: int = 10**6) -> SparseGraph:
    """Pairs at distance d, joined when one is the mirror image of the other.

    x ~ y iff y = (S x1, S x2) for the reflection S fixing some non-isotropic
    line l; whenever B(x1, y1) is a line this is B(x1, y1) = B(x2, y2) = l.
    """
    if not plane.is_unit(d):
        raise PreconditionUnmet(f"distance {d} is not a unit")
    if plane.k == 3 and plane.distance_pair_count(d) > max_vertices:
        raise ResourceLimit(f"{plane.distance_pair_count(d)} vertices exceed {max_vertices}")
    census = census or plane.reflection_census()
    keys = pair_vertices(plane, d)
    q = plane.q
    q2 = q * q
    a, b, t1, t2 = (census.table[:, i] for i in range(4))

    def image(v):
        v1, v2 = v // q, v % q
        return ((a * v1[:, None] + b * v2[:, None] + t1) % q) * q + (b * v1[:, None] - a * v2[:, None] + t2) % q

    nbr = np.empty((len(keys), len(census)), dtype=np.int32)
    step = 4096
    for s in range(0, len(keys), step):
        k = keys[s : s + step]
        y = image(k // q2) * q2 + image(k % q2)
        idx = np.searchsorted(keys, y)
        if not np.array_equal(keys[np.minimum(idx, len(keys) - 1)], y):
            raise AssertionError("reflection image left the vertex set")
        nbr[s : s + step] = idx
    G = SparseGraph.from_table(nbr, payload=keys)
    if not G.is_symmetric():
        raise AssertionError("bisector adjacency failed the symmetry audit")
    return G


def literal_edge_check(plane: ZqPlane, G: SparseGraph, samples: int = 1000, seed: int = 0) -> tuple[int, int, int]:
    """Sample edges and test B(x1, y1) = B(x2, y2) non-isotropic via the bisector formula.

    Returns (sampled, literal matches, edges whose bisector is not a line).
    """
    rng = np.random.default_rng(seed)
    q = plane.q
    q2 = q * q
    rows = rng.integers(0, G.n, samples)
    cols = rng.integers(0, G.degree, samples)
    ok = degenerate = 0
    for r, c in zip(rows, cols):
        x, y = int(G.payload[r]), int(G.payload[G.table()[r, c]])
        x1, x2 = divmod(x, q2)
        y1, y2 = divmod(y, q2)
        pts = [divmod(v, q) for v in (x1, x2, y1, y2)]
        try:
            l1 = plane.bisector(pts[0], pts[2])
            l2 = plane.bisector(pts[1], pts[3])
        except Exception:
            degenerate += 1
            continue
        if l1 == l2 and plane.is_nonisotropic(l1):
            ok += 1
    return samples, ok, degenerate


# ---------------------------------------------------------------- A^2


def decomposition_constants(p: int) -> tuple[int, int]:
    """(c_J, c_I) with A^2 = c_J J + c_I I + E."""
    return p**3 - 3 * p**2, p**6 - p**5 - p**3 + 3 * p**2


def e_row_sum_closed_form(p: int) -> int:
    """The absolute E row sum implied by the conjectured N(x, y) table."""
    return (
        2 * p**2 * p**8
        + 3 * p**2 * (p**8 - 2 * p**7 + p**6)
        + (p**4 - 2 * p**3 + 3 * p**2) * (p**6 - p**5)
        + (p**4 - p**3 + 3 * p**2) * (p**5 - 2 * p**4 + p**3)
        + (p**5 - p**4 - p**3 + 3 * p**2) * (p**3 - p**2)
        + (p**5 - p**3 + 3 * p**2) * (p**2 - 2 * p + 1)
        + (p**3 - 3 * p**2) * (2 * p**7 - 2 * p**6 + 2 * p**4 - 2 * p**3 + 2 * p - 2)
    )


def a2_diagonal(G: SparseGraph) -> np.ndarray:
    """(A^2)_{xx} = sum over z in N(x) of the multiplicity of x in N(z)."""
    rows = np.repeat(np.arange(G.n, dtype=np.int64), G.degrees())
    flat = rows * G.n + G.indices  # sorted: rows ascending, neighbour lists sorted
    probe = G.indices.astype(np.int64) * G.n + rows
    order = np.argsort(probe, kind="stable")
    sp = probe[order]  # sorted probes keep the binary searches cache friendly
    hits = np.empty_like(sp)
    hits[order] = np.searchsorted(flat, sp, "right") - np.searchsorted(flat, sp, "left")
    return np.bincount(rows, weights=hits, minlength=G.n).astype(np.int64)


def a2_decomposition(G: SparseGraph, p: int, rows=None, c_j: int | None = None, c_i: int | None = None) -> ReportDocument:
    """Row statistics of E = A^2 - c_J J - c_I I, streamed one row at a time."""
    cj, ci = decomposition_constants(p)
    cj = cj if c_j is None else c_j
    ci = ci if c_i is None else c_i
    rows = np.arange(G.n) if rows is None else np.asarray(rows, dtype=np.int64)
    if G.degree is not None:
        stats = kernels.a2_row_stats(G.table(), rows, cj, ci)
    else:
        A = G.dense()
        A2 = A @ A
        E = A2 - cj - ci * np.eye(G.n, dtype=np.int64)
        off = A2.copy()
        np.fill_diagonal(off, 0)
        stats = np.stack([np.abs(E).sum(1), np.diag(A2), off.max(1), np.count_nonzero(A2, 1)], 1)[rows]
    diag_all = a2_diagonal(G)
    rep = ReportDocument("a2_decomposition", config={"p": p, "rows": int(len(rows)), "vertices": G.n})
    rep.add("c_J", cj)
    rep.add("c_I", ci)
    sums = stats[:, 0]
    rep.add("E row sum min", int(sums.min()))
    rep.add("E row sum max", int(sums.max()))
    rep.add("max off-diagonal (A^2)", int(stats[:, 2].max()))
    rep.add("row support min", int(stats[:, 3].min()))
    rep.add("row support max", int(stats[:, 3].max()))
    rep.add("E diagonal values", sorted(set((diag_all - cj - ci).tolist())))
    rep.check("streamed diagonal matches", bool(np.array_equal(stats[:, 1], diag_all[rows])), True, "==")
    rep.check("E diagonal all zero", int(np.count_nonzero(diag_all - cj - ci)), 0, "==")
    rep.check("E row sums all equal", int(sums.max() - sums.min()), 0, "==")
    closed = e_row_sum_closed_form(p)
    rep.add("closed-form E row sum", closed)
    rep.check("E row sum equals closed form", int(sums.max()), closed, "==", asserted=False)
    rep.ratio("E row sum / p^10", int(sums.max()) / p**10)
    return rep


# ---------------------------------------------------------------- eigenvalues


@dataclass
class Gershgorin:
    centers: np.ndarray
    radii: np.ndarray

    @property
    def bound(self):
        if not len(self.centers):
            return 0
        return (np.abs(self.centers) + self.radii).max()

    def contains(self, lam, atol: float = 1e-9) -> bool:
        return bool((np.abs(lam - self.centers) <= self.radii + atol).any())


def gershgorin_bound(M) -> Gershgorin:
    """Discs |lambda - m_ii| <= sum_{j != i} |m_ij|."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NonSquare(f"shape {M.shape}")
    c = np.diag(M).copy()
    r = np.abs(M).sum(1) - np.abs(c)
    return Gershgorin(c, r)


@dataclass
class EigenEstimate:
    value: float  # signed eigenvalue
    residual: float
    iterations: int

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def _power(matvec, n, project, tol, max_iter, seed):
    rng = np.random.default_rng(seed)
    v = project(rng.standard_normal(n))
    v /= np.linalg.norm(v)
    lam, res = 0.0, math.inf
    for it in range(1, max_iter + 1):
        w = project(matvec(v))
        lam = float(v @ w)
        res = float(np.linalg.norm(w - lam * v))
        if res < tol:
            return EigenEstimate(lam, res, it)
        nw = np.linalg.norm(w)
        if nw == 0:
            return EigenEstimate(0.0, 0.0, it)
        v = w / nw
    raise NonConvergence(f"residual {res:.3g} after {max_iter} iterations (lambda ~ {lam:.6g})")


def second_eigenvalue(
    G: SparseGraph, tol: float = 1e-6, max_iter: int = 5000, seed: int = 0, deflate=(), squared: bool = False
) -> EigenEstimate:
    """Dominant eigenvalue of A on the complement of the all-ones vector.

    Extra vectors in ``deflate`` are projected out as well. With ``squared``
    the iteration runs on A^2 and returns sqrt of its top eigenvalue, which
    converges even when +lambda and -lambda are both present.
    """
    n = G.n
    basis = [np.full(n, 1 / math.sqrt(n))]
    for u in deflate:
        u = np.asarray(u, dtype=np.float64)
        for b in basis:
            u = u - (u @ b) * b
        basis.append(u / np.linalg.norm(u))

    def project(v):
        for b in basis:
            v = v - (v @ b) * b
        return v

    if not squared:
        return _power(G.matvec, n, project, tol, max_iter, seed)
    est = _power(lambda v: G.matvec(G.matvec(v)), n, project, tol, max_iter, seed)
    return EigenEstimate(math.sqrt(max(est.value, 0.0)), est.residual, est.iterations)


def top_eigenvalue(G: SparseGraph, tol: float = 1e-6, max_iter: int = 5000, seed: int = 0) -> EigenEstimate:
    """Power iteration for lambda_1 on A + cI, c the maximum degree.

    The shift makes the spectrum non-negative, so a -lambda_1 eigenvalue
    (bipartite graphs) cannot stall the iteration.
    """
    c = float(G.degrees().max()) if G.n else 0.0
    est = _power(lambda v: G.matvec(v) + c * v, G.n, lambda v: v, tol, max_iter, seed)
    return EigenEstimate(est.value - c, est.residual, est.iterations)


# ---------------------------------------------------------------- Cayley graphs


def cayley_spectrum(S, q: int) -> np.ndarray:
    """Eigenvalues of Cay(Z_q^2, S): one character sum per k in Z_q^2, indexed k1*q + k2."""
    S = np.asarray(S, dtype=np.int64).reshape(-1, 2) % q
    keys = set(map(tuple, S.tolist()))
    if any(((-a) % q, (-b) % q) not in keys for a, b in keys):
        raise AsymmetricConnectionSet("connection set is not closed under negation")
    k = np.arange(q * q, dtype=np.int64)
    K = np.stack([k // q, k % q], 1)
    cos = np.cos(2 * np.pi * np.arange(q) / q)
    out = np.zeros(q * q)
    for s in range(0, len(S), 256):
        phase = (K @ S[s : s + 256].T) % q
        out += cos[phase].sum(1)
    return out


def cayley_adjacency(S, q: int) -> np.ndarray:
    """Dense adjacency of Cay(Z_q^2, S) (small q only)."""
    S = np.asarray(S, dtype=np.int64).reshape(-1, 2) % q
    n = q * q
    A = np.zeros((n, n), dtype=np.int64)
    v = np.arange(n)
    v1, v2 = v // q, v % q
    for s1, s2 in S:
        A[v, ((v1 + s1) % q) * q + (v2 + s2) % q] += 1
    return A


def tensor_spectrum(lam: np.ndarray) -> np.ndarray:
    """Spectrum of the tensor product of a graph with itself."""
    return np.multiply.outer(lam, lam).ravel()


def cayley_report(plane: ZqPlane, d: int = 1) -> ReportDocument:
    q = plane.q
    S = plane.circle((0, 0), d)
    lam = cayley_spectrum(S, q)
    rep = ReportDocument("cayley", config={"p": plane.p, "d": d})
    s = rep.add("|S|", len(S))
    rep.add("lambda_max", float(lam.max()))
    rep.check("lambda_max = |S|", int(round(lam.max())), s, "==")
    tr1 = rep.add("sum lambda", int(round(lam.sum())))
    tr2 = rep.add("sum lambda^2", int(round((lam * lam).sum())))
    rep.check("sum lambda = 0", tr1, 0, "==")
    rep.check("sum lambda^2 = q^2 |S|", tr2, q * q * s, "==")
    nontriv = np.delete(lam, 0)
    rep.add("max |lambda| nontrivial", float(np.abs(nontriv).max()))
    T = tensor_spectrum(lam)
    deg = rep.add("tensor degree", int(round(T.max())))
    rep.check("tensor degree = (p^3 + p^2)^2", deg, (plane.p**3 + plane.p**2) ** 2, "==")
    rep.check("tensor sum lambda = 0", int(round(T.sum())), 0, "==")
    rep.check("tensor sum lambda^2 = q^4 |S|^2", int(round((T * T).sum())), q**4 * s * s, "==")
    tn = np.abs(T)
    tn[0] = 0
    second = rep.add("tensor max |lambda| nontrivial", float(tn.max()))
    rep.check("tensor nontrivial <= trivial bound", second, deg + 1e-9)
    rep.ratio("tensor second / trivial", second / deg)
    return rep


# ---------------------------------------------------------------- full suite


@dataclass
class SpectralReport:
    degree: int
    n: int
    lambda_1: EigenEstimate
    lambda_2: EigenEstimate
    gershgorin_radius: int
    row_sum_min: int
    row_sum_max: int
    tolerance: float = 1e-6

    def invariants_hold(self) -> bool:
        l1, l2 = self.lambda_1.value, self.lambda_2.value
        slack = 10 * self.tolerance
        return (
            l1 + slack >= l2 >= -l1 - slack
            and self.lambda_1.residual < self.tolerance
            and self.lambda_2.residual < self.tolerance
        )


def spectral_suite(p: int = 3, d: int = 1, pairs: int = 1000, rows=None, seed: int = 0, tol: float = 1e-6,
                   mixing_trials: int = 5) -> tuple[ReportDocument, SpectralReport]:
    """Build the bisector graph and run every check on it."""
    plane = ZqPlane(p)
    census = plane.reflection_census()
    G = build_bisector_graph(plane, d, census)
    rng = np.random.default_rng(seed)
    rep = ReportDocument("spectral", config={"p": p, "d": d, "pairs": pairs, "seed": seed, "tolerance": tol})
    rep.check("|V| = p^9 + p^8", G.n, p**9 + p**8, "==")
    rep.check("degree = p^6 - p^5", int(G.degree), p**6 - p**5, "==")
    rep.check("self-loops", G.self_loops(), 0, "==")
    rep.check("multi-edges", G.multi_edges(), 0, "==")
    rep.add("components", G.components())
    sampled, literal, degenerate = literal_edge_check(plane, G, 500, seed)
    rep.add("sampled edges", sampled)
    rep.add("sampled edges with equal non-isotropic bisector lines", literal)
    rep.add("sampled edges with a coordinate bisector that is not a line", degenerate)

    # (A^2)_{xy} against the reflection-pair count, half the pairs at distance two
    table = G.table()
    xs = rng.integers(0, G.n, pairs)
    ys = rng.integers(0, G.n, pairs)
    near = np.arange(pairs) % 2 == 0
    ys[near] = table[table[xs[near], rng.integers(0, G.degree, near.sum())], rng.integers(0, G.degree, near.sum())]
    a2 = kernels.a2_entries(table, xs, ys)
    q2 = plane.q**2

    def pair(key):
        x1, x2 = divmod(int(key), q2)
        return (divmod(x1, plane.q), divmod(x2, plane.q))

    N = np.array([plane.N_count_solve(pair(G.payload[x]), pair(G.payload[y]), census) for x, y in zip(xs, ys)])
    rep.check("(A^2)_xy = N(x, y) on sampled pairs", int(np.count_nonzero(a2 != N)), 0, "==")
    rep.add("sampled (A^2)_xy values", sorted(set(a2.tolist())))

    dec = a2_decomposition(G, p, rows=rows)
    rep.section("a2", dec)
    l1 = top_eigenvalue(G, tol=tol, seed=seed)
    l2 = second_eigenvalue(G, tol=tol, seed=seed)
    rep.add("lambda_1", l1.value)
    rep.add("lambda_1 residual", l1.residual)
    rep.check("lambda_1 = degree", abs(l1.value - G.degree), 1e-6 * G.degree)
    rep.add("lambda_2", l2.value)
    rep.add("lambda_2 residual", l2.residual)
    rep.check("lambda_2 residual < tolerance", l2.residual, tol, "<")
    rep.ratio("|lambda_2| / p^5", l2.magnitude / p**5)
    rep.check("|lambda_2| <= 10 p^5", l2.magnitude, 10 * p**5)
    colour = G.bipartition()
    rep.add("bipartite", colour is not None)
    if colour is not None:
        l3 = second_eigenvalue(G, tol=tol, seed=seed, deflate=[colour], squared=True)
        rep.add("max |lambda| beyond +-degree", l3.value)
        rep.add("max |lambda| beyond +-degree residual (of A^2)", l3.residual)
        rep.ratio("max |lambda| beyond +-degree / p^5", l3.value / p**5)

    lam = l2.magnitude + 10 * tol
    for t in range(mixing_trials):
        size = int(rng.integers(1, G.n))
        S = rng.choice(G.n, size, replace=False)
        T = rng.choice(G.n, int(rng.integers(1, G.n)), replace=False)
        rep.section(f"mixing {t}", mixing_check(G, S, T, lam))

    srep = SpectralReport(
        int(G.degree), G.n, l1, l2, int(dec.quantities["E row sum max"]),
        dec.quantities["E row sum min"], dec.quantities["E row sum max"], tol,
    )
    rep.add("Gershgorin radius of E", srep.gershgorin_radius)
    rep.check("lambda_1 >= lambda_2 >= -lambda_1, residuals below tolerance", srep.invariants_hold(), True, "==")
    return rep, srep


# ---------------------------------------------------------------- expander mixing


def edge_count(G: SparseGraph, S, T) -> int:
    """Ordered count of (s, t) in S x T with t adjacent to s."""
    S = np.asarray(S, dtype=np.int64)
    inT = np.zeros(G.n, dtype=bool)
    inT[np.asarray(T, dtype=np.int64)] = True
    if not S.size:
        return 0
    if G.degree is not None:
        return int(inT[G.table()[S]].sum())
    return int(sum(inT[G.neighbors(s)].sum() for s in S))


def mixing_check(G: SparseGraph, S, T, lam: float) -> ReportDocument:
    """|E(S,T) - delta |S||T|/n| <= lambda sqrt(|S||T|)."""
    if G.degree is None:
        raise PreconditionUnmet("mixing lemma needs a regular graph")
    S = np.unique(np.asarray(S, dtype=np.int64))
    T = np.unique(np.asarray(T, dtype=np.int64))
    e = edge_count(G, S, T)
    expected = G.degree * len(S) * len(T) / G.n
    bound = lam * math.sqrt(len(S) * len(T))
    rep = ReportDocument("mixing", config={"|S|": int(len(S)), "|T|": int(len(T)), "lambda": lam})
    rep.add("E(S,T)", e)
    rep.add("delta |S||T|/n", expected)
    rep.add("bound", bound)
    dev = abs(e - expected)
    rep.check("|E(S,T) - delta|S||T|/n| <= lambda sqrt(|S||T|)", dev, bound + 1e-9 * max(1.0, bound))
    rep.ratio("slack", bound - dev)
    return rep
