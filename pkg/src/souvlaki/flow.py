"""The explicit unit flow across a meatball and its spine concatenation.

Flow number k lives on meatball k+1 and carries one unit from the right
segment (k^2 base vertices, outflow 1/k^2 each) to the left segment
((k+1)^2 base vertices, inflow 1/(k+1)^2 each), in three stages:

* ascent: from each right-segment vertex, climb the always-left wedge lift
  splitting equally over the three ternary children per level, up to height
  k, leaving 3^-k/k^2 on each of the 3^k top vertices of that column;
* horizontal: at height k (independently in each ternary fiber) route the
  fraction k^2/(k+1)^2 to the column over the matching left-segment vertex
  and descend; the leftover (1/k^2 - 1/(k+1)^2) 3^-k per vertex travels to
  the column over left vertex k^2+1, where repeatedly 1/(k+1)^2 is dropped
  and the remainder advances one column, until exhausted;
* descent: merge down the always-right wedge lift column over each left
  vertex, reversing the equal ternary split.

Ascent uses left lifts and descent right lifts so that, after the junction
identification glues the left tower of meatball k+1 to the right tower of
meatball k+2, consecutive flows have edge-disjoint supports and the energy
of the concatenated spine flow is exactly additive.

All values are exact rationals.  Horizontal net values are piecewise
constant between lift columns; the run decomposition drives both the
materialized assignment and the closed-form energy.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .assembly import CanonicalVertex, _SpineSkeleton, canonicalize
from .errors import BudgetExceededError
from .graph import Graph
from .topology import TERNARY, H3Vertex, MeatballSpec, WVertex, ternary_addresses


def tree_flow_energy(depth: int) -> Fraction:
    """Energy of the unit equal-split flow on the ternary tree to ``depth``.

    Level i holds 3^i edges of value 3^-i, so the energy is
    sum_{i<=depth} 3^-i = (1 - 3^-depth)/2; it increases to 1/2.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return (1 - Fraction(1, 3 ** depth)) / 2


@dataclass
class FlowAssignment:
    """An antisymmetric edge flow with declared sources and sinks.

    ``values`` maps an ordered vertex pair (u, v) with u < v to the flow
    from u to v (negative = reverse).  Conservation: net outflow equals the
    declared strength at sources, minus the strength at sinks, zero
    elsewhere.
    """

    values: dict
    sources: dict
    sinks: dict
    domain: str = ""
    k: int | None = None
    meta: dict = field(default_factory=dict)

    def value(self, u, v) -> Fraction:
        if u < v:
            return self.values.get((u, v), Fraction(0))
        return -self.values.get((v, u), Fraction(0))

    def divergence(self) -> dict:
        div: dict = {}
        zero = Fraction(0)
        for (u, v), val in self.values.items():
            div[u] = div.get(u, zero) + val
            div[v] = div.get(v, zero) - val
        return div

    def conservation_violations(self) -> list:
        """Vertices whose net outflow differs from the declared pattern."""
        div = self.divergence()
        bad = []
        for vtx, d in div.items():
            want = self.sources.get(vtx, 0) - self.sinks.get(vtx, 0)
            if d != want:
                bad.append((vtx, d, want))
        for vtx, s in self.sources.items():
            if vtx not in div and s != 0:
                bad.append((vtx, Fraction(0), s))
        for vtx, s in self.sinks.items():
            if vtx not in div and s != 0:
                bad.append((vtx, Fraction(0), -s))
        return bad

    def energy(self) -> Fraction:
        return sum((v * v for v in self.values.values()), Fraction(0))

    def total_source_strength(self) -> Fraction:
        return sum(self.sources.values(), Fraction(0))


@dataclass
class EnergyReport:
    """Per-stage exact energies of one meatball flow."""

    k: int
    ascent: Fraction
    horizontal: Fraction
    descent: Fraction
    redistribute: Fraction

    @property
    def total(self) -> Fraction:
        return self.ascent + self.horizontal + self.descent + self.redistribute

    @property
    def k2_total(self) -> Fraction:
        return self.k * self.k * self.total

    def as_row(self) -> dict:
        return {
            "k": self.k,
            "E_ascent": self.ascent,
            "E_horiz": self.horizontal,
            "E_descent": self.descent,
            "E_redistribute": self.redistribute,
            "E_total": self.total,
            "k2E": self.k2_total,
        }


def _left_lift(base_pos: int, row: int) -> int:
    return base_pos << row


def _right_lift(base_pos: int, row: int) -> int:
    return ((base_pos + 1) << row) - 1


def horizontal_runs(k: int) -> list:
    """Net rightward flow on the height-k row, per ternary fiber.

    Returns maximal constant runs ``(a, b, value)`` over edge positions
    (edge p joins wedge positions p and p+1, a inclusive, b exclusive).
    Piecewise constancy holds because every route endpoint is a lift column.
    """
    spec = MeatballSpec(k + 1)
    off_r = spec.left_base_len
    per = Fraction(1, 3 ** k)
    src = Fraction(1, k * k)
    snk = Fraction(1, (k + 1) ** 2)
    eps = per * (src - snk)
    deltas: dict = {}

    def contribute(a, b, val):
        if a >= b or val == 0:
            return
        deltas[a] = deltas.get(a, Fraction(0)) + val
        deltas[b] = deltas.get(b, Fraction(0)) - val

    drop_col = lambda j: _right_lift(j - 1, k)          # column over left vertex j
    for j in range(1, k * k + 1):
        ascent_col = _left_lift(off_r + j - 1, k)
        # full load leftward from the ascent column to the primary drop column
        contribute(drop_col(j), ascent_col, -per * src)
        # leftover rightward to the first redistribution column
        contribute(drop_col(j), drop_col(k * k + 1), eps)
    for m in range(1, 2 * k + 1):
        # after m drops, (2k+1-m)/(k+1)^2 per fiber advances one column
        contribute(drop_col(k * k + m), drop_col(k * k + m + 1),
                   (2 * k + 1 - m) * per * snk)
    points = sorted(deltas)
    runs = []
    cur = Fraction(0)
    for i, p in enumerate(points[:-1]):
        cur += deltas[p]
        if cur != 0:
            runs.append((p, points[i + 1], cur))
    assert cur + deltas[points[-1]] == 0
    return runs


def build_unit_flow(k: int, budget: int = 4_000_000) -> FlowAssignment:
    """Materialize flow k on meatball k+1 (exact rationals on every edge)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    spec = MeatballSpec(k + 1)
    runs = horizontal_runs(k)
    support = (k * k + (k + 1) ** 2) * ((3 ** (k + 1) - 3) // 2) \
        + 3 ** k * sum(b - a for a, b, _ in runs)
    if support > budget:
        raise BudgetExceededError(support, budget)
    off_r = spec.left_base_len
    values: dict = {}

    def add(u, v, val):
        key, sgn = ((u, v), 1) if u < v else ((v, u), -1)
        values[key] = values.get(key, Fraction(0)) + sgn * val

    src = Fraction(1, k * k)
    snk = Fraction(1, (k + 1) ** 2)
    # ascent trees over the right segment
    for j in range(k * k):
        b = off_r + j
        for row in range(k):
            amt = src / 3 ** (row + 1)
            wl, wu = _left_lift(b, row), _left_lift(b, row + 1)
            for t in ternary_addresses(row):
                u = H3Vertex(t, WVertex(row, wl))
                for c in TERNARY:
                    add(u, H3Vertex(t + c, WVertex(row + 1, wu)), amt)
    # horizontal row on every ternary fiber
    for t in ternary_addresses(k):
        for a, b, val in runs:
            for p in range(a, b):
                add(H3Vertex(t, WVertex(k, p)), H3Vertex(t, WVertex(k, p + 1)), val)
    # descent trees over the left segment
    for j in range((k + 1) ** 2):
        for row in range(k, 0, -1):
            amt = snk / 3 ** row
            wu, wl = _right_lift(j, row), _right_lift(j, row - 1)
            for t in ternary_addresses(row):
                add(H3Vertex(t, WVertex(row, wu)),
                    H3Vertex(t[:-1], WVertex(row - 1, wl)), amt)
    values = {e: v for e, v in values.items() if v != 0}
    sources = {H3Vertex("", WVertex(0, off_r + j)): src for j in range(k * k)}
    sinks = {H3Vertex("", WVertex(0, j)): snk for j in range((k + 1) ** 2)}
    return FlowAssignment(values=values, sources=sources, sinks=sinks,
                          domain=f"meatball {k + 1}", k=k)


def classify_edge(k: int, u: H3Vertex, v: H3Vertex) -> str:
    """Stage of a support edge of flow k: by direction and base column."""
    if u.w.row == v.w.row:
        return "horizontal"
    col = u.w.base_pos()
    spec = MeatballSpec(k + 1)
    if col >= spec.left_base_len:
        return "ascent"
    if col < k * k:
        return "descent"
    return "redistribute"


def validate_support(k: int, flow: FlowAssignment) -> None:
    """Every support edge must be a meatball-(k+1) edge (oracle arithmetic)."""
    spec = MeatballSpec(k + 1)
    for u, v in flow.values:
        spec.validate(u)
        spec.validate(v)
        if u.w.row == v.w.row:
            ok = u.t == v.t and abs(u.w.pos - v.w.pos) == 1
        else:
            lo, hi = (u, v) if u.w.row < v.w.row else (v, u)
            ok = (hi.w.row == lo.w.row + 1 and hi.t[:-1] == lo.t
                  and hi.w.pos // 2 == lo.w.pos)
        if not ok:
            raise ValueError(f"not a meatball edge: {u} -- {v}")


def energy_exact(flow: FlowAssignment, graph: Graph | None = None) -> EnergyReport:
    """Stage energies by exact edge summation of a materialized flow.

    If ``graph`` is given, every support edge must exist in it; otherwise
    the coordinate oracle validates the support.
    """
    k = flow.k
    if graph is not None:
        for u, v in flow.values:
            if not graph.has_edge(u, v):
                raise ValueError(f"support edge missing from graph: {u} -- {v}")
    else:
        validate_support(k, flow)
    parts = {"ascent": Fraction(0), "horizontal": Fraction(0),
             "descent": Fraction(0), "redistribute": Fraction(0)}
    for (u, v), val in flow.values.items():
        parts[classify_edge(k, u, v)] += val * val
    return EnergyReport(k=k, ascent=parts["ascent"], horizontal=parts["horizontal"],
                        descent=parts["descent"], redistribute=parts["redistribute"])


def energy_analytic(k: int) -> EnergyReport:
    """Stage energies in closed form (no materialization; fine to k >= 30).

    Ascent: k^2 sources at (1/k^2)^2 tree energy; descent/redistribution:
    (k+1)^2 columns at (1/(k+1)^2)^2 tree energy; horizontal: 3^k identical
    fibers, summed over constant runs.
    """
    tree = tree_flow_energy(k)
    ascent = Fraction(1, k * k) * tree
    descent = Fraction(k * k, (k + 1) ** 4) * tree
    redistribute = Fraction(2 * k + 1, (k + 1) ** 4) * tree
    horizontal = 3 ** k * sum(((b - a) * v * v for a, b, v in horizontal_runs(k)),
                              Fraction(0))
    return EnergyReport(k=k, ascent=ascent, horizontal=horizontal,
                        descent=descent, redistribute=redistribute)


def energy_tail_bound(K: int) -> Fraction:
    """Exact upper bound for the full tail sum_{k>K} E_k.

    Uses E_k <= 1/(2k^2) + 1/(2(k+1)^2) + 3 (k+1)^4 (2/3)^k; the polynomial
    part is bounded by 1/K (telescoping), the geometric part by the first
    term over 1 - ratio once the ratio (1 + 1/(k+1))^4 (2/3) dips below 1
    (k >= 9), with earlier terms summed exactly.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    poly = Fraction(1, K)

    def geo_term(k):
        return 3 * Fraction(2 ** k, 3 ** k) * (k + 1) ** 4

    start = K + 1
    head = Fraction(0)
    while start < 10:
        head += geo_term(start)
        start += 1
    ratio = Fraction(2, 3) * Fraction((start + 1) ** 4, start ** 4)
    assert ratio < 1
    return poly + head + geo_term(start) / (1 - ratio)


def concatenate_spine_flow(K: int, budget: int = 4_000_000) -> FlowAssignment:
    """Sum of flows 1..K-1 on the spine truncation's canonical coordinates.

    Net divergence: +1 at the source junction, -1/K^2 at each of the K^2
    frontier vertices, 0 elsewhere; consecutive supports are edge-disjoint.
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    skel = _SpineSkeleton(K)
    values: dict = {}

    def to_spine(k, h: H3Vertex) -> CanonicalVertex:
        return canonicalize(skel, str(k + 1), h.t, h.w.row, h.w.pos, copy=1)

    for k in range(1, K):
        gk = build_unit_flow(k, budget=budget)
        for (u, v), val in gk.values.items():
            cu, cv = to_spine(k, u), to_spine(k, v)
            key, sgn = ((cu, cv), 1) if cu < cv else ((cv, cu), -1)
            values[key] = values.get(key, Fraction(0)) + sgn * val
        if len(values) > budget:
            raise BudgetExceededError(len(values), budget)
    values = {e: v for e, v in values.items() if v != 0}
    source = CanonicalVertex("1", "", 0, 0, None)
    sinks = {CanonicalVertex(str(K), "", 0, j, None): Fraction(1, K * K)
             for j in range(K * K)}
    return FlowAssignment(values=values, sources={source: Fraction(1)},
                          sinks=sinks, domain=f"spine {K}", k=None,
                          meta={"K": K})
