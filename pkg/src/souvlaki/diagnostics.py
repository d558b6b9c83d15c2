"""Mass-transport checks, ball-type statistics, and hyperbolicity constants.

Mass transport: for a finite graph with a uniformly random root, the
average over the root o of sum_x f(o, x) equals the average of
sum_x f(x, o) for every nonnegative f that depends only on the isomorphism
class of the doubly rooted ball - verified here in exact rational
arithmetic over seeded random transport functions, with a size-biased root
as the failing control.

Transport functions are nonnegative rational combinations of a fixed
basket of pair invariants (all determined by the doubly rooted radius-r
ball), so evaluation is linear over per-pair integer feature vectors.

Ball types use an exact canonical form (individualization-refinement) up
to a size limit and a refinement hash with a collision audit beyond it.
Hyperbolicity is the four-point condition: half the gap between the two
largest of the three pairwise distance sums, maximized over quadruples.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse.csgraph as csgraph

from .graph import Graph

EXACT_CANON_LIMIT = 60


# -- transport functions and the mass transport identity ---------------------

FEATURE_NAMES = (
    "one",            # 1 whenever the pair is within radius
    "dist",           # the pair distance
    "adjacent",       # 1 iff distance 1
    "deg_first",      # degree of the first root (needs r >= 1)
    "deg_second",     # degree of the second root
    "deg_gt",         # 1 iff the first degree strictly exceeds the second
    "common_nbrs",    # common neighbors of the two roots
    "hash_a",         # pseudo-random invariant of the pair's local profile
    "hash_b",
)


@dataclass(frozen=True)
class TransportFunction:
    """Nonnegative rational combination of pair invariants within radius r."""

    radius: int
    coefficients: tuple          # Fractions, aligned with FEATURE_NAMES
    seed: int = 0

    def value(self, ctx: "PairContext", o: int, x: int) -> Fraction:
        dist = ctx.distance(o, x)
        if dist is None or dist > self.radius:
            return Fraction(0)
        feats = ctx.features(o, x, dist)
        return sum((c * f for c, f in zip(self.coefficients, feats)), Fraction(0))


def random_transport_functions(count: int, radius: int, seed: int) -> list:
    """Seeded random transport functions over the shared feature basket."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        coeffs = []
        for name in FEATURE_NAMES:
            if radius < 1 and name not in ("one", "dist"):
                coeffs.append(Fraction(0))
            elif rng.random() < 0.5:
                coeffs.append(Fraction(0))
            else:
                coeffs.append(Fraction(rng.randrange(1, 7), rng.randrange(1, 5)))
        if all(c == 0 for c in coeffs):
            coeffs[0] = Fraction(1)
        out.append(TransportFunction(radius=radius, coefficients=tuple(coeffs),
                                     seed=seed * 1000003 + i))
    return out


class PairContext:
    """Per-graph caches for evaluating pair invariants."""

    def __init__(self, graph: Graph, radius: int):
        self.graph = graph
        self.radius = radius
        self.adj_sets = [set(a) for a in graph.adj]
        self.degrees = [len(a) for a in graph.adj]
        self._balls: dict = {}

    def ball(self, o: int) -> dict:
        b = self._balls.get(o)
        if b is None:
            b = self.graph.bfs_distances([o], limit=self.radius)
            self._balls[o] = b
        return b

    def distance(self, o: int, x: int):
        return self.ball(o).get(x)

    def features(self, o: int, x: int, dist: int) -> tuple:
        deg_o, deg_x = self.degrees[o], self.degrees[x]
        common = len(self.adj_sets[o] & self.adj_sets[x]) if dist <= 2 else 0
        profile = (dist, deg_o, deg_x, common)
        return (1, dist, 1 if dist == 1 else 0, deg_o, deg_x,
                1 if deg_o > deg_x else 0, common,
                _invariant_hash(profile, 1) % 11, _invariant_hash(profile, 2) % 11)


def _invariant_hash(profile: tuple, salt: int) -> int:
    data = repr((salt,) + profile).encode()
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "big")


def mtp_check(graph: Graph, fn: TransportFunction, root_weights=None):
    """Both sides of the mass-transport identity, as exact rationals.

    ``root_weights`` (vertex -> Fraction, need not be normalized) defaults
    to uniform; a non-uniform choice is the deliberate negative control.
    """
    return mtp_check_many(graph, [fn], root_weights)[0]


def mtp_check_many(graph: Graph, fns: list, root_weights=None) -> list:
    """Both identity sides for several transport functions in one sweep.

    Transport values are linear over the shared integer feature basket, so
    one pass accumulates, per pair distance, the feature totals weighted by
    the first-root and second-root weights; each function is then a small
    exact dot product.  Returns [(lhs, rhs)] aligned with ``fns``.
    """
    n = graph.n
    if root_weights is None:
        weights = [1] * n
        total = Fraction(n)
    else:
        weights = [Fraction(w) for w in root_weights]
        total = sum(weights, Fraction(0))
    radius = max(fn.radius for fn in fns)
    ctx = PairContext(graph, radius)
    nf = len(FEATURE_NAMES)
    acc_first = [[0] * nf for _ in range(radius + 1)]
    acc_second = [[0] * nf for _ in range(radius + 1)]
    for o in range(n):
        wo = weights[o]
        for x, dist in ctx.ball(o).items():
            feats = ctx.features(o, x, dist)
            wx = weights[x]
            af, asd = acc_first[dist], acc_second[dist]
            for j, f in enumerate(feats):
                if f:
                    af[j] += wo * f
                    asd[j] += wx * f
        ctx._balls.clear()
    out = []
    for fn in fns:
        lhs = rhs = Fraction(0)
        for dist in range(min(fn.radius, radius) + 1):
            for j, c in enumerate(fn.coefficients):
                if c:
                    lhs += c * acc_first[dist][j]
                    rhs += c * acc_second[dist][j]
        out.append((lhs / total, rhs / total))
    return out


def size_biased_weights(graph: Graph) -> list:
    return [Fraction(graph.degree(v)) for v in range(graph.n)]


# -- ball types ---------------------------------------------------------------

def ball_type_key(graph: Graph, root: int, radius: int,
                  exact_limit: int = EXACT_CANON_LIMIT):
    """Isomorphism key of the rooted radius-r ball.

    Exact canonical form below ``exact_limit`` vertices; otherwise a
    refinement-based hash together with audit invariants (two keys that
    collide while the audit tuples differ would expose a hash collision).
    """
    dist = graph.bfs_distances([root], limit=radius)
    verts = sorted(dist)
    local = {v: i for i, v in enumerate(verts)}
    adj = [[] for _ in verts]
    for v in verts:
        for u in graph.neighbors(v):
            if u in dist:
                adj[local[v]].append(local[u])
    colors = [dist[v] for v in verts]
    if len(verts) <= exact_limit:
        return ("exact", _canonical_code(adj, colors))
    audit = _refinement_profile(adj, colors)
    return ("hash", _invariant_hash(audit, 3), audit)


def _refine(adj: list, colors: list) -> list:
    """Stable coloring: iterate color += sorted multiset of neighbor colors."""
    n = len(adj)
    colors = list(colors)
    while True:
        sig = [(colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(n)]
        order = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [order[s] for s in sig]
        if new == colors:
            return colors
        colors = new


def _canonical_code(adj: list, colors: list) -> tuple:
    """Exact canonical form by individualization-refinement.

    Returns the lexicographically smallest (color sequence, adjacency bits)
    over all refinement-compatible orderings.
    """
    n = len(adj)
    colors = _refine(adj, colors)
    cells: dict = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    target = next((cell for _, cell in sorted(cells.items()) if len(cell) > 1), None)
    if target is None:
        order = sorted(range(n), key=lambda v: colors[v])
        rank = {v: i for i, v in enumerate(order)}
        bits = []
        for v in order:
            row = 0
            for u in adj[v]:
                row |= 1 << rank[u]
            bits.append(row)
        return (tuple(sorted(colors)), tuple(bits))
    best = None
    bump = max(colors) + 1
    for v in target:
        branched = list(colors)
        branched[v] = bump
        code = _canonical_code(adj, branched)
        if best is None or code < best:
            best = code
    return best


def _refinement_profile(adj: list, colors: list) -> tuple:
    colors = _refine(adj, colors)
    hist: dict = {}
    for c in colors:
        hist[c] = hist.get(c, 0) + 1
    degs = sorted(len(a) for a in adj)
    return (len(adj), sum(degs) // 2, tuple(sorted(hist.items())),
            tuple(degs[:: max(1, len(degs) // 16)]))


def ball_type_distribution(graph: Graph, radius: int, roots=None) -> dict:
    """Type frequencies over the given roots (all vertices by default)."""
    if roots is None:
        roots = range(graph.n)
    counts: dict = {}
    audits: dict = {}
    for root in roots:
        key = ball_type_key(graph, root, radius)
        if key[0] == "hash":
            short = key[:2]
            prior = audits.setdefault(short, key[2])
            if prior != key[2]:
                raise RuntimeError(f"ball-type hash collision at {short}")
            key = short
        counts[key] = counts.get(key, 0) + 1
    return counts


def tv_between_counts(a: dict, b: dict) -> float:
    na, nb = sum(a.values()), sum(b.values())
    keys = set(a) | set(b)
    tv = sum(abs(Fraction(a.get(k, 0), na) - Fraction(b.get(k, 0), nb)) for k in keys)
    return float(tv / 2)


@dataclass
class LwcReport:
    radius: int
    tv: float
    confidence_radius: float
    sizes: tuple
    details: dict = field(default_factory=dict)


def lwc_diagnostic(graph_a: Graph, graph_b: Graph, radius: int,
                   samples: int = 0, seed: int = 0) -> LwcReport:
    """TV distance between rooted ball-type distributions of two graphs.

    Exhaustive when ``samples`` is 0, else over seeded uniform roots.  The
    confidence radius is the binomial 3-sigma noise floor for the sampled
    side(s): 3 * sqrt(#types / (4 * min sample size)).
    """
    rng = random.Random(seed)

    def roots_for(g: Graph):
        if samples and g.n > samples:
            return [rng.randrange(g.n) for _ in range(samples)], samples
        return None, g.n

    ra, na = roots_for(graph_a)
    rb, nb = roots_for(graph_b)
    ca = ball_type_distribution(graph_a, radius, ra)
    cb = ball_type_distribution(graph_b, radius, rb)
    tv = tv_between_counts(ca, cb)
    ntypes = len(set(ca) | set(cb))
    conf = 3.0 * (ntypes / (4.0 * min(na, nb))) ** 0.5
    return LwcReport(radius=radius, tv=tv, confidence_radius=conf,
                     sizes=(na, nb), details={"types": ntypes})


# -- four-point hyperbolicity -------------------------------------------------

@dataclass
class DeltaStats:
    instance: str
    exact: bool
    delta: Fraction              # on the half-integer grid
    quadruples_scanned: int
    seed: int | None = None


def _distance_matrix(graph: Graph) -> np.ndarray:
    d = csgraph.dijkstra(graph.csr(), unweighted=True)
    return d.astype(np.int32)


def _far_apart_pairs(graph: Graph, d: np.ndarray):
    """Pairs (x, y) that no geodesic extension can improve: d(x, .) peaks
    locally at y and d(., y) peaks locally at x.  The four-point maximum is
    always attained with both pairs far apart (extend a geodesic past a
    non-peak endpoint without decreasing the gap)."""
    n = graph.n
    maxpool = np.empty_like(d)
    for y in range(n):
        maxpool[:, y] = d[:, graph.adj[y]].max(axis=1)
    far = (d >= maxpool) & (d >= maxpool.T)
    iu, ju = np.triu_indices(n, 1)
    mask = far[iu, ju]
    return iu[mask].astype(np.int32), ju[mask].astype(np.int32), d[iu[mask], ju[mask]]


def gromov_delta_exact(graph: Graph, instance: str = "", block: int = 128,
                       warm_start_quadruples: int = 50_000,
                       far_filter: bool = True) -> DeltaStats:
    """Exact four-point constant by a pruned blocked scan over pairs of pairs.

    For the pairing with the largest sum, the gap to the second largest is
    at most min of the two paired distances, so only pairs farther apart
    than the best gap found so far need scanning; pairs are processed by
    decreasing distance, the scan restricted to far-apart pairs, and a
    seeded sampled pass supplies the initial lower bound.
    """
    n = graph.n
    if n > 3_000:
        raise ValueError("exact mode is limited to ~3000 vertices")
    d = _distance_matrix(graph).astype(np.int16)
    if far_filter:
        iu, ju, dist = _far_apart_pairs(graph, d)
    else:
        iu, ju = (a.astype(np.int32) for a in np.triu_indices(n, 1))
        dist = d[iu, ju]
    order = np.argsort(-dist, kind="stable")
    iu, ju, dist = iu[order], ju[order], dist[order]
    npairs = len(dist)
    best = 0            # twice delta; sampled values are true lower bounds
    if warm_start_quadruples:
        warm = gromov_delta_sampled(graph, warm_start_quadruples, seed=0,
                                    pool=min(n, 512))
        best = int(warm.delta * 2)
    scanned = 0
    p = 0
    while p < npairs and dist[p] > best:
        q = min(npairs, p + block)
        hi = int(np.searchsorted(-dist, -best, side="left"))
        if hi <= p:
            break
        xs, ys, dxy = iu[p:q], ju[p:q], dist[p:q]
        us, vs, duv = iu[p:hi], ju[p:hi], dist[p:hi]
        s2 = d[xs][:, us] + d[ys][:, vs]
        s3 = d[xs][:, vs] + d[ys][:, us]
        np.maximum(s2, s3, out=s2)
        gap = (dxy[:, None] + duv[None, :]).astype(np.int16) - s2
        scanned += gap.size
        m = int(gap.max())
        if m > best:
            best = m
        p = q
    return DeltaStats(instance=instance, exact=True, delta=Fraction(best, 2),
                      quadruples_scanned=scanned)


def gromov_delta_sampled(graph: Graph, quadruples: int, seed: int = 0,
                         instance: str = "", pool: int = 256) -> DeltaStats:
    """Lower bound on delta from seeded random quadruples.

    Distances are computed on a seeded vertex pool and quadruples drawn
    inside it; the result never exceeds the exact constant of the graph.
    """
    rng = random.Random(seed)
    n = graph.n
    verts = list(range(n)) if n <= pool else rng.sample(range(n), pool)
    rows = csgraph.dijkstra(graph.csr(), unweighted=True, indices=verts)
    d = rows[:, verts].astype(np.int64)
    m = len(verts)
    best = 0
    count = 0
    for _ in range(quadruples):
        x, y, u, v = (rng.randrange(m) for _ in range(4))
        if len({x, y, u, v}) < 4:
            continue
        count += 1
        s1 = d[x, y] + d[u, v]
        s2 = d[x, u] + d[y, v]
        s3 = d[x, v] + d[y, u]
        a, b, _ = sorted((int(s1), int(s2), int(s3)), reverse=True)
        best = max(best, a - b)
    return DeltaStats(instance=instance, exact=False, delta=Fraction(best, 2),
                      quadruples_scanned=count, seed=seed)
