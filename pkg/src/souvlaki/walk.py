"""Random-walk simulation and exact absorption solves.

Simulation uses the simple random walk (uniform over neighbors, no
laziness).  Randomness is counter-based: the uniforms consumed at global
step t by all runs come from a Philox generator keyed by the master seed
with counter t, and run i always reads slot i; a run's trajectory therefore
depends only on (seed, i), so extending the horizon replays and then
extends the same trajectories.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError
from .graph import Graph
from .topology import FULL, MeatballSpec, materialize_meatball

DENSE_LIMIT = 4_000


@dataclass
class WalkStats:
    start: int
    horizon: int
    runs: int
    hits: int
    seed: int
    hit_time_quantiles: dict = field(default_factory=dict)
    trivial: bool = False

    @property
    def hit_frequency(self) -> float:
        return self.hits / self.runs


@dataclass
class HittingDistribution:
    start: int
    absorbing: list
    probabilities: np.ndarray
    residual: float

    def as_dict(self) -> dict:
        return {v: float(p) for v, p in zip(self.absorbing, self.probabilities)}


def _step_uniforms(seed: int, t: int, count: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=seed, counter=[t, 0, 0, 0]))
    return gen.random(count)


def simulate_spine_hitting(graph: Graph, start: int, runs: int = 10_000,
                           horizon: int = 100_000, seed: int = 0) -> WalkStats:
    """Count runs whose walk hits the marked spine within the horizon."""
    spine = graph.meta.get("spine")
    if spine is None:
        raise ValueError("graph has no marked spine")
    on_spine = np.zeros(graph.n, dtype=bool)
    on_spine[np.asarray(spine)] = True
    if on_spine[start]:
        return WalkStats(start=start, horizon=horizon, runs=runs, hits=runs,
                         seed=seed, hit_time_quantiles={0.5: 0, 0.9: 0, 0.99: 0},
                         trivial=True)
    a = graph.csr()
    indptr, indices = a.indptr, a.indices
    state = np.full(runs, start, dtype=np.int64)
    alive = np.arange(runs)
    hit_time = np.full(runs, -1, dtype=np.int64)
    for t in range(1, horizon + 1):
        u = _step_uniforms(seed, t, runs)[alive]
        lo = indptr[state[alive]]
        deg = indptr[state[alive] + 1] - lo
        nxt = indices[lo + np.minimum((u * deg).astype(np.int64), deg - 1)]
        state[alive] = nxt
        absorbed = on_spine[nxt]
        if absorbed.any():
            hit_time[alive[absorbed]] = t
            alive = alive[~absorbed]
            if alive.size == 0:
                break
    hits = int((hit_time >= 0).sum())
    qs = {}
    if hits:
        times = np.sort(hit_time[hit_time >= 0])
        for q in (0.5, 0.9, 0.99):
            qs[q] = int(times[min(hits - 1, int(q * hits))])
    return WalkStats(start=start, horizon=horizon, runs=runs, hits=hits,
                     seed=seed, hit_time_quantiles=qs)


def simulate_absorption(graph: Graph, start: int, absorbing, runs: int,
                        seed: int = 0, horizon: int = 1_000_000) -> dict:
    """Empirical absorption counts per absorbing vertex (same step protocol
    as the spine-hitting simulation)."""
    absorbing = list(absorbing)
    mark = np.zeros(graph.n, dtype=bool)
    mark[absorbing] = True
    if mark[start]:
        return {start: runs}
    a = graph.csr()
    indptr, indices = a.indptr, a.indices
    state = np.full(runs, start, dtype=np.int64)
    alive = np.arange(runs)
    landed = np.full(runs, -1, dtype=np.int64)
    for t in range(1, horizon + 1):
        u = _step_uniforms(seed, t, runs)[alive]
        lo = indptr[state[alive]]
        deg = indptr[state[alive] + 1] - lo
        nxt = indices[lo + np.minimum((u * deg).astype(np.int64), deg - 1)]
        state[alive] = nxt
        done = mark[nxt]
        if done.any():
            landed[alive[done]] = nxt[done]
            alive = alive[~done]
            if alive.size == 0:
                break
    counts: dict = {}
    for v in landed[landed >= 0]:
        counts[int(v)] = counts.get(int(v), 0) + 1
    return counts


def exact_hitting_distribution(graph: Graph, start: int, absorbing,
                               tol: float = 1e-9) -> HittingDistribution:
    """Absorption probabilities of the walk from ``start`` (dense solve)."""
    h = hitting_matrix(graph, absorbing, tol=tol)
    probs, interior_index, residual = h
    if start in interior_index:
        row = probs[interior_index[start]]
    else:
        row = np.zeros(probs.shape[1])
        row[list(absorbing).index(start)] = 1.0
    return HittingDistribution(start=start, absorbing=list(absorbing),
                               probabilities=row, residual=residual)


def hitting_matrix(graph: Graph, absorbing, tol: float = 1e-9):
    """All-starts absorption probabilities: rows = interior vertices.

    Solves (I - Q) H = R with Q the interior transition block and R the
    interior-to-absorbing block.  Returns (H, interior index map, residual).
    """
    absorbing = list(absorbing)
    ab = set(absorbing)
    interior = [v for v in range(graph.n) if v not in ab]
    if len(interior) > DENSE_LIMIT:
        raise SolverError(f"{len(interior)} interior vertices exceed the dense limit")
    idx = {v: i for i, v in enumerate(interior)}
    col = {v: j for j, v in enumerate(absorbing)}
    n_i, n_a = len(interior), len(absorbing)
    q = np.zeros((n_i, n_i))
    r = np.zeros((n_i, n_a))
    for v in interior:
        deg = graph.degree(v)
        for u in graph.neighbors(v):
            if u in ab:
                r[idx[v], col[u]] += 1.0 / deg
            else:
                q[idx[v], idx[u]] += 1.0 / deg
    h = np.linalg.solve(np.eye(n_i) - q, r)
    residual = float(np.abs(h.sum(axis=1) - 1.0).max()) if n_a else 0.0
    if residual > tol:
        raise SolverError(f"absorption rows sum to 1 within {residual:.2e} > tol",
                          residual=residual)
    return h, idx, residual


# -- radial symmetry over the ternary fibers ---------------------------------

def ternary_swap(t: str, prefix: str, a: str, b: str) -> str:
    """Swap digits a and b at the position right after ``prefix``."""
    i = len(prefix)
    if not t.startswith(prefix) or len(t) <= i:
        return t
    c = t[i]
    c = b if c == a else (a if c == b else c)
    return t[:i] + c + t[i + 1:]


def fiber_automorphism_generators(k: int):
    """Transpositions of ternary subtrees below every prefix: each fixes the
    wedge coordinate and every base vertex, and preserves adjacency."""
    from .topology import ternary_addresses
    out = []
    for height in range(k):
        for prefix in ternary_addresses(height):
            for a, b in (("0", "1"), ("0", "2"), ("1", "2")):
                out.append((prefix, a, b))
    return out


def radial_symmetry_check(k: int, tol: float = 1e-9,
                          drop_edge: tuple | None = None) -> float:
    """Max deviation of base-start absorption laws under fiber swaps.

    Absorbing set: the full top row of the parameter-k meatball.  Passing
    ``drop_edge`` (a pair of vertex labels) deletes one edge first, which
    serves as the broken-symmetry negative control.
    """
    g = materialize_meatball(MeatballSpec(k), FULL)
    if drop_edge is not None:
        ia, ib = g.index[drop_edge[0]], g.index[drop_edge[1]]
        g.adj[ia] = [x for x in g.adj[ia] if x != ib]
        g.adj[ib] = [x for x in g.adj[ib] if x != ia]
        g.meta.pop("_csr", None)
    top = [vid for vid, lab in enumerate(g.labels) if lab.w.row == k]
    base = [vid for vid, lab in enumerate(g.labels) if lab.w.row == 0]
    h, idx, _res = hitting_matrix(g, top, tol=tol * 10)
    col = {g.labels[v]: j for j, v in enumerate(top)}
    gens = fiber_automorphism_generators(k)
    worst = 0.0
    for s in base:
        row = h[idx[s]]
        for prefix, a, b in gens:
            for j, v in enumerate(top):
                lab = g.labels[v]
                tt = ternary_swap(lab.t, prefix, a, b)
                if tt != lab.t:
                    jj = col[lab._replace(t=tt)]
                    worst = max(worst, abs(row[j] - row[jj]))
    return worst


def escape_probability(spine_graph: Graph, tol: float = 1e-10) -> float:
    """P(walk from the source hits the wired frontier before returning).

    Computed from the Dirichlet potential (1 at the source, 0 on the
    frontier): the escaping current out of the source over its degree.
    """
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla

    source = spine_graph.meta["source"]
    frontier = set(spine_graph.meta["frontier"])
    lap = spine_graph.laplacian()
    n = spine_graph.n
    fixed = np.zeros(n, dtype=bool)
    fixed[source] = True
    fixed[list(frontier)] = True
    phi = np.zeros(n)
    phi[source] = 1.0
    free = ~fixed
    rhs = -lap[free][:, fixed] @ phi[fixed]
    sub = lap[free][:, free].tocsc()
    if free.sum() <= 200_000:
        x = spla.spsolve(sub, rhs)
    else:
        import pyamg
        ml = pyamg.smoothed_aggregation_solver(sub.tocsr(), max_coarse=500)
        x, info = spla.cg(sub, rhs, rtol=tol * 1e-2, atol=0.0,
                          M=ml.aspreconditioner(), maxiter=20_000)
        if info != 0:
            raise SolverError(f"potential solve stopped with info={info}")
    phi[free] = x
    residual = float(np.linalg.norm(lap[free] @ phi) /
                     max(1.0, float(np.linalg.norm(phi))))
    if residual > tol * 10:
        raise SolverError(f"potential residual {residual:.2e}", residual=residual)
    current = sum(1.0 - phi[u] for u in spine_graph.neighbors(source))
    return current / spine_graph.degree(source)
