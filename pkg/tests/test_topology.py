from collections import Counter

import pytest
from hypothesis import given, strategies as st

from souvlaki.errors import BudgetExceededError, CoordinateError
from souvlaki.topology import (FULL, LEFT, LEFT_ONLY, RIGHT, H3Vertex,
                               MeatballSpec, WVertex, boundary_bk,
                               format_coordinate, iter_meatball_vertices,
                               materialize_meatball, meatball_vertex_count,
                               neighbors_in_meatball, parse_coordinate, side_of)


def test_spec_validation():
    s = MeatballSpec(3)
    assert (s.len_left, s.len_middle, s.len_right) == (9, 81, 4)
    assert s.base_len == 94 and s.height_cap == 3
    with pytest.raises(ValueError):
        MeatballSpec(0)
    with pytest.raises(ValueError):
        MeatballSpec(2, d=6)


def test_wedge_parent_child():
    w = WVertex(3, 11)
    assert w.parent() == WVertex(2, 5)
    assert WVertex(2, 5).children() == (WVertex(3, 10), WVertex(3, 11))
    assert WVertex(3, 11).base_pos() == 1


def test_left_base_corner_degree():
    # one horizontal neighbor plus six children
    nb = neighbors_in_meatball(MeatballSpec(1), H3Vertex("", WVertex(0, 0)))
    assert len(nb) == 7
    assert H3Vertex("", WVertex(0, 1)) in nb
    assert sum(1 for u in nb if u.row == 1) == 6


def test_interior_row_degree_histogram(m3):
    hist = m3.degree_histogram()
    # interior row-1 and row-2 vertices: 2 horizontal + 1 parent + 6 children
    assert max(hist) == 9
    assert hist == {2: 54, 3: 20250, 7: 2, 8: 116, 9: 3924}


@pytest.mark.parametrize("k", [1, 2, 3])
def test_neighbor_symmetry_exhaustive(k):
    spec = MeatballSpec(k)
    neighbor_sets = {}
    for v in iter_meatball_vertices(spec, FULL):
        neighbor_sets[v] = set(neighbors_in_meatball(spec, v))
    for v, nbrs in neighbor_sets.items():
        assert all(v in neighbor_sets[u] for u in nbrs)
        assert len(nbrs) <= 9


def test_out_of_range_rejected():
    spec = MeatballSpec(2)
    with pytest.raises(CoordinateError):
        neighbors_in_meatball(spec, H3Vertex("0", WVertex(1, 42)))
    with pytest.raises(CoordinateError):
        neighbors_in_meatball(spec, H3Vertex("012", WVertex(3, 0)))
    with pytest.raises(CoordinateError):
        neighbors_in_meatball(spec, H3Vertex("3", WVertex(1, 0)))


def test_side_threshold_k2():
    spec = MeatballSpec(2)   # left base length 20
    assert side_of(spec, H3Vertex("", WVertex(0, 19))) == LEFT
    assert side_of(spec, H3Vertex("", WVertex(0, 20))) == RIGHT
    assert side_of(spec, H3Vertex("0", WVertex(1, 39))) == LEFT
    assert side_of(spec, H3Vertex("0", WVertex(1, 40))) == RIGHT


def test_boundary_rows_k1():
    b1 = boundary_bk(MeatballSpec(1))
    rows = Counter(v.row for v in b1)
    assert rows == {0: 1, 1: 3}
    assert {v.w.pos for v in b1 if v.row == 0} == {1}
    assert {v.w.pos for v in b1 if v.row == 1} == {3}


def test_boundary_count_k2():
    assert len(boundary_bk(MeatballSpec(2))) == 13  # 1 + 3 + 9


@pytest.mark.parametrize("k", [2, 3])
def test_boundary_has_right_neighbor(k):
    spec = MeatballSpec(k)
    for v in boundary_bk(spec):
        right = H3Vertex(v.t, WVertex(v.row, v.w.pos + 1))
        assert side_of(spec, v) == LEFT
        assert side_of(spec, right) == RIGHT
        assert right in neighbors_in_meatball(spec, v)


def test_materialize_counts(m2):
    assert materialize_meatball(MeatballSpec(1), LEFT_ONLY).n == 14
    assert m2.n == 903 == 21 * 43
    left2 = materialize_meatball(MeatballSpec(2), LEFT_ONLY)
    assert left2.n == 860
    by_row = Counter(v.w.row for v in left2.labels)
    assert by_row[1] == 3 * 2 * 20  # 120


@pytest.mark.parametrize("k", [1, 2, 3])
def test_level_counts(k):
    spec = MeatballSpec(k)
    by_row = Counter(v.w.row for v in iter_meatball_vertices(spec, LEFT_ONLY))
    for i in range(k + 1):
        assert by_row[i] == 3 ** i * 2 ** i * (k * k + k ** 4)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_side_partition_crossings(k):
    # only horizontal edges cross sides; their LEFT endpoints are the boundary
    spec = MeatballSpec(k)
    g = materialize_meatball(spec, FULL)
    boundary = set(boundary_bk(spec))
    seen_left = set()
    for a, b in g.edges():
        va, vb = g.labels[a], g.labels[b]
        if side_of(spec, va) != side_of(spec, vb):
            assert va.row == vb.row
            left = va if side_of(spec, va) == LEFT else vb
            assert left in boundary
            seen_left.add(left)
    if spec.len_right:
        assert seen_left == boundary


def test_budget_error():
    with pytest.raises(BudgetExceededError) as ei:
        materialize_meatball(MeatballSpec(6), FULL, budget=1000)
    assert ei.value.estimate == meatball_vertex_count(MeatballSpec(6), FULL)


def test_coordinate_grammar():
    assert format_coordinate(H3Vertex("", WVertex(0, 5))) == "t:-/w:0,5"
    assert parse_coordinate("t:012/w:3,11") == H3Vertex("012", WVertex(3, 11))
    with pytest.raises(CoordinateError):
        parse_coordinate("t:013/w:3,11")
    with pytest.raises(CoordinateError):
        parse_coordinate("t:01/w:3,11")


@given(st.integers(0, 6), st.integers(0, 10 ** 9))
def test_coordinate_roundtrip(row, pos):
    t = "".join("012"[(pos >> i) % 3] for i in range(row))
    v = H3Vertex(t, WVertex(row, pos))
    assert parse_coordinate(format_coordinate(v)) == v
