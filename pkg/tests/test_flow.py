from fractions import Fraction

import pytest

from souvlaki.assembly import CanonicalVertex
from souvlaki.flow import (build_unit_flow, concatenate_spine_flow,
                           energy_analytic, energy_exact, energy_tail_bound,
                           horizontal_runs, tree_flow_energy, validate_support)
from souvlaki.topology import H3Vertex, MeatballSpec, WVertex

F = Fraction


def test_tree_flow_energy_values():
    assert tree_flow_energy(1) == F(1, 3)
    assert tree_flow_energy(2) == F(4, 9)
    # brute partial sums: 3^i edges carrying 3^-i
    for depth in range(1, 12):
        brute = sum(F(3) ** i * (F(1, 3 ** i)) ** 2 for i in range(1, depth + 1))
        assert tree_flow_energy(depth) == brute
    assert tree_flow_energy(40) < F(1, 2) < tree_flow_energy(40) + F(1, 3 ** 39)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_flow_is_exactly_conserved(k):
    g = build_unit_flow(k)
    assert g.conservation_violations() == []
    assert g.total_source_strength() == 1
    assert all(s == F(1, k * k) for s in g.sources.values())
    assert all(s == F(1, (k + 1) ** 2) for s in g.sinks.values())
    assert len(g.sources) == k * k and len(g.sinks) == (k + 1) ** 2
    validate_support(k, g)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_height_k_load_and_horizontal_cap(k):
    g = build_unit_flow(k)
    spec = MeatballSpec(k + 1)
    per = F(1, 3 ** k)
    # load arriving at each lift-top vertex over every right-segment vertex
    for j in range(k * k):
        b = spec.left_base_len + j
        for t in ("0" * k, "2" * k, "01" * (k // 2) + "0" * (k % 2)):
            top = H3Vertex(t, WVertex(k, b << k))
            below = H3Vertex(t[:-1], WVertex(k - 1, b << (k - 1)))
            assert g.value(below, top) == per / (k * k)
    horiz = [abs(v) for (u, w), v in g.values.items() if u.w.row == w.w.row]
    assert max(horiz) == per
    assert all(h <= per for h in horiz)


def test_k1_redistribution_trace():
    # leftover per top vertex and the drop-and-advance amounts
    k = 1
    src, snk, per = F(1), F(1, 4), F(1, 3)
    assert per * (src - snk) == F(1, 4)                   # (1 - 1/4) / 3
    advances = [(2 * k + 1 - m) * per * snk for m in range(1, 2 * k + 1)]
    assert advances == [F(1, 6), F(1, 12)]
    runs = dict()
    for a, b, v in horizontal_runs(1):
        runs[(a, b)] = v
    # between the two redistribution columns the net is primaries plus advance
    drop1, drop2, drop3 = 3, 5, 7    # right-lift columns over l_2, l_3, l_4
    assert runs[(drop1, drop2)] == -per * src + F(1, 6)
    assert runs[(drop2, drop3)] == -per * src + F(1, 12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_energy_exact_equals_analytic(k):
    ee = energy_exact(build_unit_flow(k))
    ea = energy_analytic(k)
    assert (ee.ascent, ee.horizontal, ee.descent, ee.redistribute) == \
        (ea.ascent, ea.horizontal, ea.descent, ea.redistribute)


def test_ascent_energy_closed_form():
    for k in (1, 2, 3, 5, 9):
        want = (1 - F(1, 3 ** k)) / (2 * k * k)
        assert energy_analytic(k).ascent == want


def test_energy_regression_values():
    assert energy_analytic(1).total == 12
    assert energy_analytic(2).total == F(18361, 486)
    assert energy_analytic(3).total == F(911587, 11664)


def test_zero_flow_energy():
    from souvlaki.flow import FlowAssignment
    z = FlowAssignment(values={}, sources={}, sinks={}, k=1)
    assert z.energy() == 0


def test_k2_energy_bounded_to_30():
    vals = [energy_analytic(k).k2_total for k in range(1, 31)]
    peak = max(vals)
    assert vals.index(peak) + 1 == 14
    assert peak < F(34084)
    assert peak > F(34083)


def test_partial_sums_cauchy_with_tail_bound():
    totals = [energy_analytic(k).total for k in range(1, 31)]
    partial = []
    acc = F(0)
    for t in totals:
        acc += t
        partial.append(acc)
    for k1 in (4, 9, 14, 20):
        for k2 in range(k1 + 1, 31, 5):
            assert partial[k2 - 1] - partial[k1 - 1] <= energy_tail_bound(k1)
    assert energy_tail_bound(25) < energy_tail_bound(10) < energy_tail_bound(4)
    # every single term sits below the per-term bound used by the tail
    for k in range(1, 31):
        bound = F(1, 2 * k * k) + F(1, 2 * (k + 1) ** 2) \
            + 3 * F(2 ** k, 3 ** k) * (k + 1) ** 4
        assert totals[k - 1] <= bound


def test_concat_k2_equals_first_flow():
    cf = concatenate_spine_flow(2)
    g1 = build_unit_flow(1)
    assert cf.energy() == g1.energy()
    assert cf.total_source_strength() == 1
    assert len(cf.sinks) == 4


def test_concat_divergence_pattern():
    cf = concatenate_spine_flow(3)
    assert cf.conservation_violations() == []
    div = cf.divergence()
    source = CanonicalVertex("1", "", 0, 0, None)
    assert div[source] == 1
    for j in range(9):
        assert div[CanonicalVertex("3", "", 0, j, None)] == F(-1, 9)


@pytest.mark.parametrize("K", [3, 4])
def test_concat_energy_additive(K):
    cf = concatenate_spine_flow(K)
    assert cf.energy() == sum(energy_analytic(k).total for k in range(1, K))


def test_concat_supports_disjoint():
    # per-meatball supports stay edge-disjoint after the junction gluing
    from souvlaki.assembly import _SpineSkeleton, canonicalize
    skel = _SpineSkeleton(3)
    seen = {}
    for k in (1, 2):
        gk = build_unit_flow(k)
        for (u, v) in gk.values:
            cu = canonicalize(skel, str(k + 1), u.t, u.w.row, u.w.pos, copy=1)
            cv = canonicalize(skel, str(k + 1), v.t, v.w.row, v.w.pos, copy=1)
            key = (cu, cv) if cu < cv else (cv, cu)
            assert seen.setdefault(key, k) == k
