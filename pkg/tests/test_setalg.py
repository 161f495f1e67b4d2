import itertools
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumprodlab.errors import ParamOutOfRange, UniverseMismatch, ZeroDenominator, ZeroElement
from sumprodlab.setalg import (
    INTEGERS,
    Dilate,
    FiniteSet,
    Op,
    RepCounts,
    combine,
    dyadic_popular,
    energy,
    energy_oracle,
    generate_family,
    multiplicative_energy,
    prime_field,
    rep_counts,
    residue_ring,
    restricted_energy,
    restricted_energy_full,
    restricted_energy_oracle,
    sum_product_report,
    sumset,
    variant_slope_counts,
    variant_slope_full,
)

F3, F5, F7 = prime_field(3), prime_field(5), prime_field(7)

small_ints = st.lists(st.integers(-20, 20), min_size=1, max_size=10, unique=True)
positive_ints = st.lists(st.integers(1, 60), min_size=2, max_size=10, unique=True)


def fp_sets(p, min_size=1, max_size=8, nonzero=False):
    lo = 1 if nonzero else 0
    return st.lists(st.integers(lo, p - 1), min_size=min_size, max_size=min(max_size, p - lo), unique=True)


# ---------------------------------------------------------------- examples


def test_combine_examples():
    assert list(combine(FiniteSet([1, 2, 3]), FiniteSet([1, 2, 3]), Op.SUM)) == [2, 3, 4, 5, 6]
    assert list(combine(FiniteSet([5]), FiniteSet([0]), Op.SUM)) == [5]
    assert list(combine(FiniteSet([1, 2], F3), FiniteSet([1, 2], F3), Op.SUM)) == [0, 1, 2]


def test_rep_counts_examples():
    A = FiniteSet([1, 2, 3])
    assert rep_counts(A, A, Op.SUM).counts == {2: 1, 3: 2, 4: 3, 5: 2, 6: 1}
    assert rep_counts(FiniteSet([7]), FiniteSet([7]), Op.PRODUCT).counts == {49: 1}
    B = FiniteSet([1, 2, 4])
    assert rep_counts(B, B, Op.PRODUCT).counts == {1: 1, 2: 2, 4: 3, 8: 2, 16: 1}


def test_energy_examples():
    A = FiniteSet([1, 2, 3])
    assert energy(A, A, Op.SUM, 2) == 19
    B = FiniteSet([1, 2, 4])
    assert energy(B, B, Op.PRODUCT, 2) == 19
    C = FiniteSet([0, 1])
    assert energy(C, C, Op.SUM, 3) == 10
    for n in (2, 3, 5):
        assert energy(FiniteSet([4]), FiniteSet([4]), Op.SUM, n) == 1


def test_energy_rejects_zero_for_products():
    with pytest.raises(ZeroElement):
        energy(FiniteSet([0, 1]), FiniteSet([1, 2]), Op.PRODUCT)


def _variant_slope_scan(Z, A1, A2, p):
    out = Counter()
    for a1, b1, a2, b2 in itertools.product(A1, A1, A2, A2):
        den = (b1 + b2) % p
        if den == 0:
            continue
        z = (a1 + a2) * pow(den, -1, p) % p
        if z in Z:
            out[z] += 1
    return dict(out)


def test_variant_slope_examples():
    one = FiniteSet([1], F5)
    assert variant_slope_counts(one, one, one).counts == {1: 1}
    assert variant_slope_counts(FiniteSet([2], F5), one, one).counts == {}
    Z = FiniteSet(range(1, 5), F5)
    A1, A2 = FiniteSet([1, 2], F5), FiniteSet([0], F5)
    assert variant_slope_counts(Z, A1, A2).counts == _variant_slope_scan(Z, A1, A2, 5)


def test_restricted_energy_examples():
    one = FiniteSet([1], F5)
    assert restricted_energy(one, one, one) == 1
    assert restricted_energy(FiniteSet([], F5), one, one) == 0
    Z = FiniteSet(range(1, 7), F7)
    A = FiniteSet([1, 2, 3], F7)
    assert restricted_energy(Z, A, A) == restricted_energy_oracle(Z, A, A)


def test_dyadic_examples():
    r = RepCounts({k: 1 for k in range(8)}, "sum", INTEGERS)
    c = dyadic_popular(r)
    assert (c.index, list(c.members), c.mass) == (1, list(range(8)), 8)
    c = dyadic_popular(RepCounts({10: 4, 20: 1}, "sum", INTEGERS))
    assert (c.index, list(c.members), c.mass) == (3, [10], 16)
    A = FiniteSet([1, 2, 3])
    c = dyadic_popular(rep_counts(A, A, Op.SUM))
    assert (c.index, list(c.members), c.mass) == (2, [3, 4, 5], 17)


def test_generate_family_examples():
    assert list(generate_family("ap", 5, start=1, step=1)) == [1, 2, 3, 4, 5]
    assert list(generate_family("gp", 4, base=2)) == [2, 4, 8, 16]
    a = generate_family("random", 3, F7, seed=11)
    assert len(a) == 3 and a == generate_family("random", 3, F7, seed=11)
    with pytest.raises(ParamOutOfRange):
        generate_family("random", 9, F7, seed=0)


def test_sum_product_report_examples():
    rep = sum_product_report(FiniteSet([1, 2, 3, 4]))
    assert rep.quantities["|A+A|"] == 7 and rep.quantities["|A.A|"] == 9
    with pytest.raises(ParamOutOfRange):
        sum_product_report(FiniteSet([5]))
    for n in (2, 5, 11):
        assert sum_product_report(generate_family("ap", n)).quantities["|A+A|"] == 2 * n - 1


def test_dilate_and_universes():
    assert list(combine(FiniteSet([1, 2]), None, Dilate(3))) == [3, 6]
    with pytest.raises(UniverseMismatch):
        sumset(FiniteSet([1], F5), FiniteSet([1], F7))
    with pytest.raises(ZeroDenominator):
        rep_counts(FiniteSet([1]), FiniteSet([0, 1]), Op.RATIO)


# ---------------------------------------------------------------- properties


@given(small_ints, small_ints)
def test_rep_counts_total(a, b):
    A, B = FiniteSet(a), FiniteSet(b)
    for op in (Op.SUM, Op.DIFFERENCE, Op.PRODUCT):
        assert rep_counts(A, B, op).total() == len(A) * len(B)


@given(fp_sets(7), fp_sets(7))
def test_rep_counts_total_mod_p(a, b):
    A, B = FiniteSet(a, F7), FiniteSet(b, F7)
    assert rep_counts(A, B, Op.SUM).total() == len(A) * len(B)


@given(st.lists(st.integers(-15, 15), min_size=1, max_size=12, unique=True), st.lists(st.integers(-15, 15), min_size=1, max_size=12, unique=True))
def test_additive_energy_matches_oracle(a, b):
    A, B = FiniteSet(a), FiniteSet(b)
    assert energy(A, B, Op.SUM) == energy_oracle(A, B, Op.SUM)


@given(st.sampled_from([5, 7, 11, 13]), st.data())
def test_energies_match_oracle_mod_p(p, data):
    F = prime_field(p)
    A = FiniteSet(data.draw(fp_sets(p, nonzero=True)), F)
    B = FiniteSet(data.draw(fp_sets(p, nonzero=True)), F)
    assert energy(A, B, Op.SUM) == energy_oracle(A, B, Op.SUM)
    assert energy(A, B, Op.PRODUCT) == energy_oracle(A, B, Op.PRODUCT)


@given(positive_ints)
def test_multiplicative_energy_matches_oracle(a):
    A = FiniteSet(a)
    assert energy(A, A, Op.PRODUCT) == energy_oracle(A, A, Op.PRODUCT)


@given(st.lists(st.integers(-8, 8), min_size=1, max_size=8, unique=True))
def test_multiplicative_energy_with_zero(a):
    A = FiniteSet(a)
    assert multiplicative_energy(A) == energy_oracle(A, A, Op.PRODUCT)


@given(small_ints)
def test_energy_inequality(a):
    A = FiniteSet(a)
    n = len(A)
    assert n**4 <= len(sumset(A)) * energy(A, A, Op.SUM)


@given(st.sampled_from([5, 7, 11, 13, 17]), st.data())
def test_cauchy_davenport(p, data):
    F = prime_field(p)
    A = FiniteSet(data.draw(fp_sets(p, max_size=p)), F)
    B = FiniteSet(data.draw(fp_sets(p, max_size=p)), F)
    assert len(sumset(A, B)) >= min(p, len(A) + len(B) - 1)


@given(st.sampled_from([5, 7, 11]), st.data())
def test_restricted_energy_routes(p, data):
    F = prime_field(p)
    A1 = FiniteSet(data.draw(fp_sets(p, max_size=3)), F)
    A2 = FiniteSet(data.draw(fp_sets(p, max_size=3)), F)
    Z = FiniteSet(data.draw(st.lists(st.integers(0, p - 1), max_size=p, unique=True)), F)
    assert restricted_energy(Z, A1, A2) == restricted_energy_oracle(Z, A1, A2)
    full = variant_slope_full(A1, A2)
    assert variant_slope_counts(FiniteSet(range(p), F), A1, A2).counts == {z: int(v) for z, v in enumerate(full) if v}
    if len(A1) <= len(A2):
        assert restricted_energy_full(A1, A2) <= len(A1) ** 4 * len(A2) ** 3


@given(st.dictionaries(st.integers(0, 50), st.integers(1, 300), min_size=1, max_size=30))
def test_dyadic_pigeonhole(counts):
    r = RepCounts(counts, "sum", INTEGERS)
    for weight in ("square", "linear"):
        c = dyadic_popular(r, weight)
        assert c.pigeonhole_holds()
        lo, hi = 2 ** (c.index - 1), 2**c.index
        assert all(lo <= counts[z] < hi for z in c.members)
        w = (lambda v: v * v) if weight == "square" else (lambda v: v)
        assert c.mass == sum(w(counts[z]) for z in c.members)


@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_random_family_is_deterministic(n, seed):
    assert generate_family("random", n, seed=seed) == generate_family("random", n, seed=seed)


@pytest.mark.parametrize("kind", ["ap", "gp", "random"])
@pytest.mark.parametrize("n", [2, 5, 9])
def test_families_satisfy_exact_inequalities(kind, n):
    for u in (INTEGERS, prime_field(101)):
        A = generate_family(kind, n, u, seed=n, **({"nonzero": True} if kind == "random" and u.modular else {}))
        rep = sum_product_report(A)
        assert rep.passed, rep.failures()


def test_gp_product_set():
    for n in (3, 8, 12):
        assert sum_product_report(generate_family("gp", n)).quantities["|A.A|"] == 2 * n - 1


def test_residue_ring_sets():
    Z27 = residue_ring(27)
    A = FiniteSet([1, 2, 4, 5], Z27)
    assert energy(A, A, Op.PRODUCT) == energy_oracle(A, A, Op.PRODUCT)
    assert rep_counts(A, FiniteSet([3, 2], Z27), Op.RATIO).dropped == 4
