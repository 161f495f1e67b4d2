import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumprodlab.errors import ParamOutOfRange, ResourceLimit
from sumprodlab.incidence import (
    Line,
    Plane,
    PointSet,
    collinear_T,
    collinear_T_oracle,
    collinear_report,
    degenerate_count,
    elekes_config,
    energy_plane_config,
    first_coordinate_cases,
    incidences,
    incidences_oracle,
    max_collinear_planes,
    point_plane_incidences,
    point_plane_oracle,
    rich_lines,
    solymosi_stats,
    st_experiment,
)
from sumprodlab.setalg import FiniteSet, Op, energy, prime_field

F3, F5, F7, F11 = (prime_field(p) for p in (3, 5, 7, 11))


def test_incidence_examples():
    assert incidences(PointSet([(0, 0)]), [Line.slope(0, 0)]) == 1
    assert incidences(PointSet([(0, 0), (1, 1)]), [Line.slope(1, 0), Line.slope(0, 0)]) == 3
    assert incidences(PointSet([]), [Line.slope(1, 0)]) == 0


def test_rich_line_examples():
    (line, count), = rich_lines(PointSet([(0, 0), (1, 1), (2, 2)]), 3)
    assert count == 3 and line == Line.slope(1, 0)
    grid = PointSet(itertools.product(range(3), range(3)))
    assert len(rich_lines(grid, 3)) == 8
    assert rich_lines(PointSet([(0, 0), (1, 0), (0, 1), (2, 3)]), 3) == []


def test_elekes_examples():
    cfg = elekes_config(FiniteSet([1, 2]))
    assert (len(cfg.points), len(cfg.lines)) == (9, 4)
    assert cfg.incidences >= 8
    with pytest.raises(ParamOutOfRange):
        elekes_config(FiniteSet([3]))
    cfg = elekes_config(FiniteSet([1, 2, 3]))
    assert all(sum(l.contains(pt) for pt in cfg.points) >= 3 for l in cfg.lines)


def test_solymosi_examples():
    rep = solymosi_stats(FiniteSet([1, 2, 4]))
    assert rep.quantities["Ex(A)"] == 19
    assert rep.passed
    with pytest.raises(ParamOutOfRange):
        solymosi_stats(FiniteSet([5]))


def test_solymosi_literal_chain_on_spec_set():
    # the literal first inequality does not hold here; see the decisions ledger
    A = FiniteSet([1, 2, 3, 4, 6, 8, 9, 12])
    rep = solymosi_stats(A)
    q = rep.quantities
    assert q["Ex(A)"] == energy(A, A, Op.PRODUCT)
    literal = rep.get_check("Ex(A)/ceil(log2|A|) <= n 2^i0")
    assert literal.lhs == Fraction(q["Ex(A)"], 3) and literal.rhs == q["n"] * 2 ** q["i0"]
    valid = [c for c in rep.checks if c.asserted and c is not literal]
    assert all(c.verdict for c in valid)


def test_collinear_examples():
    zero = FiniteSet([0])
    assert collinear_T(zero, zero, zero) == 1
    assert collinear_T(zero, zero, zero, distinct_only=True) == 0
    A = FiniteSet([0, 1], F5)
    for flag in (False, True):
        assert collinear_T(A, A, A, flag) == collinear_T_oracle(A, A, A, flag)
    assert collinear_T(A, A, A) - collinear_T(A, A, A, True) == degenerate_count(A, A, A)


def test_point_plane_examples():
    P = PointSet([(0, 0, 0)], F3)
    assert point_plane_incidences(P, [Plane.make(0, 0, 1, 0, 3)]) == 1
    assert point_plane_incidences(PointSet([], F3, dim=3), [Plane.make(0, 0, 1, 0, 3)]) == 0
    full = PointSet(itertools.product(range(3), repeat=3), F3)
    through0 = {Plane.make(a, b, c, 0, 3) for a, b, c in itertools.product(range(3), repeat=3) if (a, b, c) != (0, 0, 0)}
    for pl in through0:
        assert point_plane_incidences(full, [pl]) == 9
    assert point_plane_incidences(full, list(through0)) == point_plane_oracle(full, list(through0))


def _max_collinear_oracle(planes, p):
    # a line lies in a plane iff two of its points do: count planes through each point pair
    pts = np.array(list(itertools.product(range(p), repeat=3)))
    if not planes:
        return 0
    M = np.array([[pl.contains(x) for x in pts] for pl in planes], dtype=np.int64)
    both = M.T @ M
    np.fill_diagonal(both, 0)
    return max(1, int(both.max()))


def test_collinear_plane_examples():
    z = Plane.make(0, 0, 1, 0, 3)
    assert max_collinear_planes([z]) == 1
    assert max_collinear_planes([z, Plane.make(1, 0, 0, 0, 3)]) == 2
    pencil = [Plane.make(a, b, 0, 0, 3) for a, b in [(1, 0), (0, 1), (1, 1), (1, 2)]]
    assert max_collinear_planes(pencil) == 4
    # the pencil's common line (the z axis) meets every plane: k * m incidences
    axis = PointSet([(0, 0, t) for t in range(3)], F3)
    assert point_plane_incidences(axis, pencil) == 4 * 3


@given(st.lists(st.tuples(*[st.integers(0, 2)] * 4), min_size=1, max_size=8))
def test_max_collinear_planes_matches_line_scan(coefs):
    planes = [Plane.make(a, b, c, d, 3) for a, b, c, d in coefs if (a, b, c) != (0, 0, 0)]
    planes = list(set(planes))
    assert max_collinear_planes(planes) == _max_collinear_oracle(planes, 3)


def test_energy_plane_examples():
    _, _, rep = energy_plane_config(FiniteSet([1], F5))
    q = rep.quantities
    assert (q["|P|"], q["|Pi|"], q["N2"], q["E+(A)"]) == (1, 1, 1, 1)
    P3, planes, rep = energy_plane_config(FiniteSet([1, 2], F7))
    # |A.A| |A|^2 = 3 * 2 * 2 points and planes
    assert len(P3) == 12 and len(set(planes)) == 12
    assert rep.quantities["N2"] == point_plane_oracle(P3, planes)
    assert rep.quantities["E+(A)"] * 4 <= rep.quantities["N2"]
    assert rep.passed


def test_energy_plane_collinearity_bound():
    # k exceeds |A| here (the pencil b -> a x + y - b z = c contains z = 0 lines); the
    # asserted bound is max(|A|, |A.A|)
    A = FiniteSet([1, 2, 3], F11)
    _, planes, rep = energy_plane_config(A)
    k = rep.quantities["k"]
    assert k == _max_collinear_oracle(planes, 11)
    assert k <= max(3, rep.quantities["|A.A|"])
    assert rep.passed
    assert not rep.get_check("k <= |A|").verdict


def test_st_examples():
    rep = st_experiment(2)
    P = PointSet(((x, y) for x in (1, 2) for y in range(1, 9)))
    L = [Line.slope(m, b) for m in (1, 2) for b in range(1, 5)]
    assert rep.quantities["I(P,L)"] == incidences_oracle(P, L)
    with pytest.raises(ParamOutOfRange):
        st_experiment(1)
    with pytest.raises(ResourceLimit):
        st_experiment(50, budget_tuples=1000)
    r8 = st_experiment(8).ratios["I / (|P|^(2/3)|L|^(2/3) + |P| + |L|)"]
    r16 = st_experiment(16).ratios["I / (|P|^(2/3)|L|^(2/3) + |P| + |L|)"]
    assert 0.5 <= r16 / r8 <= 2


points = st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), max_size=25)
lines = st.lists(
    st.one_of(
        st.builds(Line.slope, st.integers(-3, 3), st.integers(-5, 5)),
        st.builds(Line.vertical, st.integers(-5, 5)),
    ),
    max_size=15,
)


@given(points, lines)
def test_incidences_match_oracle(pts, ls):
    P = PointSet(pts)
    assert incidences(P, ls) == incidences_oracle(P, ls)


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=3, max_size=14), st.integers(2, 4))
def test_rich_lines_counts_are_exact(pts, k):
    P = PointSet(pts, F7)
    for line, count in rich_lines(P, k):
        assert count == sum(line.contains(pt) for pt in P) >= k


@given(st.lists(st.integers(1, 40), min_size=2, max_size=30, unique=True))
def test_elekes_richness(a):
    A = FiniteSet(a)
    rep = elekes_config(A).report(A)
    assert rep.passed


@given(st.lists(st.integers(1, 40), min_size=2, max_size=12, unique=True))
def test_solymosi_valid_chain(a):
    rep = solymosi_stats(FiniteSet(a))
    literal = {"Ex(A)/ceil(log2|A|) <= n 2^i0", "n 2^i0 <= |A+A|^2"}
    assert all(c.verdict for c in rep.checks if c.asserted and c.name not in literal)
    assert rep.get_check("n 2^i0 <= |A+A|^2").verdict


sets5 = st.lists(st.integers(0, 4), min_size=1, max_size=3, unique=True)


@given(sets5, sets5, sets5)
def test_collinear_T_matches_oracle(a1, a2, a3):
    A1, A2, A3 = (FiniteSet(a, F5) for a in (a1, a2, a3))
    T = collinear_T(A1, A2, A3)
    To = collinear_T(A1, A2, A3, True)
    assert T == collinear_T_oracle(A1, A2, A3)
    assert To == collinear_T_oracle(A1, A2, A3, True)
    assert T - To == degenerate_count(A1, A2, A3) >= 0
    assert collinear_T(A1, A3, A2) == T
    assert collinear_report(A1, A2, A3).passed


@given(*[st.lists(st.integers(-3, 3), min_size=1, max_size=3, unique=True)] * 3)
def test_collinear_T_over_integers(a1, a2, a3):
    A1, A2, A3 = (FiniteSet(a) for a in (a1, a2, a3))
    assert collinear_T(A1, A2, A3) == collinear_T_oracle(A1, A2, A3)
    assert collinear_T(A1, A2, A3, True) == collinear_T_oracle(A1, A2, A3, True)


def _first_coordinate_scan(A1, A2, A3, i, j):
    count = 0
    for a, b, c in itertools.product(*(itertools.product(S, S) for S in (A1, A2, A3))):
        pts = (a, b, c)
        if pts[i][0] != pts[j][0]:
            continue
        det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if det == 0:
            count += 1
    return count


@given(*[st.lists(st.integers(0, 4), min_size=1, max_size=3, unique=True)] * 3)
def test_first_coordinate_cases(a1, a2, a3):
    A1, A2, A3 = (FiniteSet(a) for a in (a1, a2, a3))
    cases = first_coordinate_cases(A1, A2, A3)
    assert cases["a1=b1"] == _first_coordinate_scan(A1, A2, A3, 0, 1)
    assert cases["a1=c1"] == _first_coordinate_scan(A1, A2, A3, 0, 2)
    assert cases["b1=c1"] == _first_coordinate_scan(A1, A2, A3, 1, 2)


@given(st.lists(st.tuples(*[st.integers(0, 4)] * 3), max_size=20), st.lists(st.tuples(*[st.integers(0, 4)] * 4), max_size=10))
def test_point_plane_matches_oracle(pts, coefs):
    P = PointSet(pts, F5, dim=3)
    planes = [Plane.make(*c, 5) for c in coefs if c[:3] != (0, 0, 0)]
    assert point_plane_incidences(P, planes) == point_plane_oracle(P, planes)
