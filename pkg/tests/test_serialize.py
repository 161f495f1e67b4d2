import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumprodlab.incidence import Line, PointSet
from sumprodlab.serialize import (
    dump_lines,
    dump_points,
    dump_set,
    histogram_csv,
    load_graph,
    load_lines,
    load_points,
    load_set,
    save_graph,
)
from sumprodlab.setalg import INTEGERS, FiniteSet, prime_field
from sumprodlab.spectral import SparseGraph

F7 = prime_field(7)


@given(st.lists(st.integers(-1000, 1000), unique=True))
def test_set_roundtrip_integers(a):
    A = FiniteSet(a)
    assert load_set(dump_set(A)) == A


@given(st.lists(st.integers(0, 6), unique=True))
def test_set_roundtrip_mod_p(a):
    A = FiniteSet(a, F7)
    B = load_set(dump_set(A))
    assert B == A and B.universe == F7


def test_set_needs_header():
    with pytest.raises(ValueError):
        load_set("1\n2\n")


@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), max_size=20))
def test_points_roundtrip(pts):
    P = PointSet(pts)
    assert set(load_points(dump_points(P))) == set(P)


def test_points_3d_mod_p():
    P = PointSet([(1, 2, 3), (0, 6, 5)], F7, dim=3)
    Q = load_points(dump_points(P))
    assert Q.dim == 3 and Q.universe == F7 and set(Q) == set(P)


def test_lines_roundtrip():
    ls = [Line.slope(2, -3), Line.vertical(4), Line.slope(0, 0)]
    assert load_lines(dump_lines(ls), INTEGERS) == ls


def test_histogram_csv_sorted():
    assert histogram_csv({27: 2916, 18: 6561}) == "n,count\n18,6561\n27,2916\n"


def test_graph_roundtrip(tmp_path):
    A = np.zeros((6, 6), dtype=int)
    for i in range(6):
        A[i, (i + 1) % 6] = A[(i + 1) % 6, i] = 1
        A[i, (i + 3) % 6] = 1
    G = SparseGraph.from_dense(A)
    G.payload = np.arange(100, 106)
    path, side = save_graph(G, tmp_path / "g.bin")
    assert path.stat().st_size == 9 * 2 * 4
    H = load_graph(path)
    assert H.n == 6 and H.degree == 3
    assert np.array_equal(H.dense(), A)
    assert np.array_equal(H.payload, G.payload)
