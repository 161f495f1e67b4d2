"""Acceptance criteria 1-11, one test each (criterion 9 has two halves).

Every test records a PASS/FAIL line that is printed in the terminal summary.
"""

import itertools
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from sumprodlab import kernels, suites
from sumprodlab.incidence import collinear_T_oracle, elekes_config, solymosi_stats
from sumprodlab.setalg import INTEGERS, FiniteSet, Op, combine, energy, energy_oracle, generate_family, prime_field, sumset
from sumprodlab.spectral import cayley_report, spectral_suite
from sumprodlab.zqgeom import ZqPlane

pytestmark = pytest.mark.acceptance


def record(name, ok, detail=""):
    ACCEPTANCE.append((name, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, f"{name}: {detail}"


def failures_of(rep):
    return [f"{path}/{c.name}" for path, c in rep.failures()]


def test_criterion_01_square_roots():
    t0 = time.perf_counter()
    reps = [suites.sqrt_suite(p) for p in (3, 7, 11)]
    dt = time.perf_counter() - t0
    bad = sum((failures_of(r) for r in reps), [])
    record("criterion 1", not bad and dt < 10, f"sqrt_count = oracle on all d < p^3, p in 3,7,11; {dt:.2f}s; failures {bad}")


def test_criterion_02_circles():
    bad, times = [], {}
    for p in (3, 7):
        t0 = time.perf_counter()
        bad += failures_of(suites.circle_suite(p, centres=50, seed=p))
        times[p] = time.perf_counter() - t0
    record("criterion 2", not bad and times[7] < 60, f"50 centres at p=3,7; p=7 took {times[7]:.1f}s; failures {bad}")


def test_criterion_03_lines():
    bad = []
    for p in (3, 7):
        rep = suites.line_suite(p, centres=20, seed=p)
        bad += failures_of(rep)
    record("criterion 3", not bad, f"p^3 - p^2 non-isotropic lines through every tested point; failures {bad}")


def test_criterion_04_isometries():
    rep = suites.isometry_suite(3, samples=1000, seed=0, lemma_search=True)
    bad = failures_of(rep)
    record("criterion 4", not bad, f"{len(list(rep.all_checks()))} checks; failures {bad}")


def test_criterion_05_conjecture_census():
    t0 = time.perf_counter()
    rep, hist = suites.conjecture_report(3)
    dt = time.perf_counter() - t0
    bins = {int(k): v for k, v in hist["A"].items()}
    expected = {18: 6561, 27: 2916, 54: 486, 81: 108, 162: 18, 243: 4, 486: 1}
    ok = not failures_of(rep) and all(bins.get(n) == v for n, v in expected.items()) and dt < 1800
    record("criterion 5", ok, f"bins {dict(sorted(bins.items()))}; {dt:.1f}s; failures {failures_of(rep)}")


def test_criterion_06_bisector_graph():
    rep, srep = spectral_suite(3, 1, pairs=1000, rows=None, seed=0, tol=1e-6)
    bad = failures_of(rep)
    q = rep.quantities
    ok = (
        not bad
        and srep.n == 26244
        and srep.degree == 486
        and srep.lambda_2.residual < 1e-6
        and srep.lambda_2.magnitude <= 10 * 3**5
    )
    C = srep.lambda_2.magnitude / 3**5
    record(
        "criterion 6",
        ok,
        f"|V|={srep.n}, degree={srep.degree}, lambda_2={q['lambda_2']:.6f} (residual {srep.lambda_2.residual:.1e}), "
        f"C={C:.3f}; failures {bad}",
    )


def test_criterion_07_cayley():
    rep = cayley_report(ZqPlane(3), 1)
    q = rep.quantities
    ok = not failures_of(rep) and q["|S|"] == 36 and q["tensor degree"] == 1296
    record("criterion 7", ok, f"|S|={q['|S|']}, tensor degree {q['tensor degree']}; failures {failures_of(rep)}")


def test_criterion_08_set_algebra():
    rng = np.random.default_rng(8)
    mismatches = 0
    for i in range(200):
        if i % 2:
            u, lo, hi = prime_field(int(rng.choice([5, 7, 11, 13, 101]))), 1, None
            hi = u.modulus
        else:
            u, lo, hi = INTEGERS, -30, 31
        na, nb = rng.integers(1, 11, 2)
        pool = np.arange(lo, hi)
        A = FiniteSet(rng.choice(pool, min(na, len(pool)), replace=False).tolist(), u)
        B = FiniteSet(rng.choice(pool, min(nb, len(pool)), replace=False).tolist(), u)
        for op in (Op.SUM, Op.PRODUCT):
            if op is Op.PRODUCT and (0 in A or 0 in B):
                continue
            mismatches += energy(A, B, op, 2) != energy_oracle(A, B, op)
    eq2 = 0
    families = 0
    for fam in ("ap", "gp", "random"):
        for n in (2, 4, 8, 16, 32, 64):
            for u in (INTEGERS, prime_field(10007)):
                A = generate_family(fam, n, u, seed=n, **({"nonzero": True} if fam == "random" and u.modular else {}))
                families += 1
                eq2 += len(A) ** 4 > len(sumset(A)) * energy(A, A, Op.SUM)
    cd = 0
    for p in (5, 7, 11, 13, 101):
        F = prime_field(p)
        for _ in range(40):
            a = rng.choice(p, int(rng.integers(1, p + 1)), replace=False).tolist()
            b = rng.choice(p, int(rng.integers(1, p + 1)), replace=False).tolist()
            A, B = FiniteSet(a, F), FiniteSet(b, F)
            cd += len(sumset(A, B)) < min(p, len(A) + len(B) - 1)
    record(
        "criterion 8",
        mismatches == 0 and eq2 == 0 and cd == 0,
        f"energy/oracle mismatches {mismatches} over 200 pairs; |A|^4 <= |A+A|E+ failures {eq2}/{families}; "
        f"Cauchy-Davenport failures {cd}/200",
    )


def _random_sets(count, max_size, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(2, max_size + 1))
        yield FiniteSet(rng.choice(np.arange(1, 200), n, replace=False).tolist())


def test_criterion_09a_elekes():
    bad = 0
    for A in _random_sets(50, 30, 9):
        cfg = elekes_config(A)
        # points of (A+A) x (A.A) on y = a1 (x - a2), counted over the whole grid
        a = np.array(list(A), dtype=np.int64)
        S = np.array(list(sumset(A)), dtype=np.int64)
        Pr = np.array(list(combine(A, A, Op.PRODUCT)), dtype=np.int64)
        y = a[:, None, None] * (S[None, None, :] - a[None, :, None])
        rich = int(np.isin(y, Pr).sum(axis=2).min())
        bad += rich < len(A) or not cfg.report(A).passed
    record("criterion 9a", bad == 0, f"every Elekes line meets >= |A| points for 50 random A, |A| <= 30; failures {bad}")


def test_criterion_09b_solymosi_chain():
    first = second = 0
    for A in _random_sets(50, 30, 10):
        rep = solymosi_stats(A)
        first += not rep.get_check("Ex(A)/ceil(log2|A|) <= n 2^i0").verdict
        second += not rep.get_check("n 2^i0 <= |A+A|^2").verdict
    record(
        "criterion 9b",
        first == 0 and second == 0,
        f"Ex(A)/ceil(log2|A|) <= n 2^i0 fails for {first}/50 sets; n 2^i0 <= |A+A|^2 fails for {second}/50",
    )


def _masks(p, max_size):
    return [sum(1 << e for e in c) for k in range(1, max_size + 1) for c in itertools.combinations(range(p), k)]


def test_criterion_10_collinear_triples():
    details, ok = [], True
    for p in (5, 7):
        ms = np.array(_masks(p, 4), dtype=np.int64)
        m1, m2, m3 = (g.ravel() for g in np.meshgrid(ms, ms, ms, indexing="ij"))
        fast = kernels.t_counts_batch(m1, m2, m3, p)
        slow = kernels.t_counts_batch(m1, m2, m3, p, oracle=True)
        diff = int(np.count_nonzero((fast != slow).any(1)))
        # independent pure-python loop on a sample of triples
        rng = np.random.default_rng(p)
        F = prime_field(p)
        spot = 0
        for i in rng.choice(len(m1), 200, replace=False):
            A = [FiniteSet(kernels._bits(int(m[i]), p).tolist(), F) for m in (m1, m2, m3)]
            spot += (collinear_T_oracle(*A), collinear_T_oracle(*A, distinct_only=True)) != tuple(fast[i])
        ok &= diff == 0 and spot == 0
        details.append(f"F{p}: {len(m1)} triples, {diff} mismatches, {spot}/200 loop spot-check mismatches")
    record("criterion 10", ok, "; ".join(details))


def test_criterion_11_family_ratios():
    rep = suites.family_ratio_report(10007, (8, 16, 32, 64), seed=0)
    bad = failures_of(rep)
    record("criterion 11", not bad, f"{len(rep.sections)} families; asserted failures {bad}")
