"""Laplacian solves, effective resistance, junction contraction, subtrees.

Unit conductance per edge throughout.  Effective resistance between two
merged vertex sets is computed by injecting one unit of current, grounding
one set, and solving the reduced Laplacian; small systems go through a
sparse direct factorization, large ones through conjugate gradients with an
algebraic-multigrid preconditioner.  Both paths are deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import pyamg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import spine_truncation
from .errors import SolverError
from .graph import Graph, quotient

DIRECT_LIMIT = 60_000


@dataclass
class ResistanceResult:
    endpoints: tuple
    value: float
    residual: float
    iterations: int
    method: str


def _merged_laplacian(graph: Graph, groups: list):
    """Laplacian with each vertex set in ``groups`` merged to one node.

    Parallel edges created by merging keep their conductances (they add),
    which is what contracting ideal wires does.  Returns
    (laplacian, node index per group, merged size).
    """
    n = graph.n
    rep = np.arange(n, dtype=np.int64)
    for gi, grp in enumerate(groups):
        for v in grp:
            rep[v] = -(gi + 1)
    remap = {}
    ri = np.empty(n, dtype=np.int64)
    for v in range(n):
        key = rep[v]
        if key not in remap:
            remap[key] = len(remap)
        ri[v] = remap[key]
    m = len(remap)
    a = graph.csr().tocoo()
    rows, cols = ri[a.row], ri[a.col]
    keep = rows != cols
    adj = sp.coo_matrix((a.data[keep], (rows[keep], cols[keep])), shape=(m, m)).tocsr()
    adj.sum_duplicates()
    deg = np.asarray(adj.sum(axis=1)).ravel()
    lap = (sp.diags(deg) - adj).tocsr()
    nodes = [remap[-(gi + 1)] for gi in range(len(groups))]
    return lap, nodes, m


def effective_resistance(graph: Graph, a_set, b_set, tol: float = 1e-10,
                         max_iter: int = 20_000) -> ResistanceResult:
    """Effective resistance between the merged sets A and B."""
    a_set = [a_set] if isinstance(a_set, int) else list(a_set)
    b_set = [b_set] if isinstance(b_set, int) else list(b_set)
    if set(a_set) & set(b_set):
        raise ValueError("endpoint sets must be disjoint")
    lap, (na, nb), m = _merged_laplacian(graph, [a_set, b_set])
    rhs = np.zeros(m)
    rhs[na], rhs[nb] = 1.0, -1.0
    keep = np.ones(m, dtype=bool)
    keep[nb] = False
    reduced = lap[keep][:, keep].tocsc()
    b_red = rhs[keep]
    iters = 0
    if m <= DIRECT_LIMIT:
        x = spla.spsolve(reduced, b_red)
        method = "direct"
    else:
        ml = pyamg.smoothed_aggregation_solver(reduced.tocsr(), max_coarse=500)
        counter = {"n": 0}

        def cb(_):
            counter["n"] += 1

        x, info = spla.cg(reduced, b_red, rtol=tol * 1e-2, atol=0.0,
                          maxiter=max_iter, M=ml.aspreconditioner(), callback=cb)
        iters = counter["n"]
        method = "amg-cg"
        if info != 0:
            raise SolverError(f"conjugate gradients stopped with info={info}",
                              residual=float(np.linalg.norm(reduced @ x - b_red)),
                              iterations=iters)
    phi = np.zeros(m)
    phi[keep] = x
    residual = float(np.linalg.norm(lap @ phi - rhs) / np.linalg.norm(rhs))
    if residual > tol:
        raise SolverError(f"residual {residual:.3e} above tol {tol:.3e}",
                          residual=residual, iterations=iters)
    value = float(phi[na] - phi[nb])
    return ResistanceResult(endpoints=(tuple(a_set), tuple(b_set)), value=value,
                            residual=residual, iterations=iters, method=method)


# -- junction contraction ----------------------------------------------------

def contract_junctions(spine_graph: Graph, include_frontier: bool = True) -> Graph:
    """Contract every junction base segment to a single marked vertex.

    Junction k has k^2 base vertices; the truncation frontier (the would-be
    junction K) is contracted too when ``include_frontier``.  Parallel edges
    merge, self-loops drop.
    """
    junctions = spine_graph.meta["junctions"]
    ks = sorted(junctions)
    if not include_frontier:
        ks = ks[:-1]
    classes = [junctions[k] for k in ks]
    labels = [f"v{k}" for k in ks]
    out = quotient(spine_graph, classes, labels)
    out.meta.update(kind="contracted-spine", K=spine_graph.meta["K"],
                    junction_labels=labels)
    return out


def junction_resistance_profile(K: int, tol: float = 1e-10, d: int = 7,
                                budget: int = 4_000_000) -> list:
    """R(v_k, v_{k+1}) along the contracted chain, k = 1..K-1.

    The frontier stands in for junction K.  Returns a list of
    (k, ResistanceResult); the contracted degrees are in the graph meta.
    """
    spine = spine_truncation(K, d=d, budget=budget)
    contracted = contract_junctions(spine)
    out = []
    degs = {}
    for k in range(1, K + 1):
        vid = contracted.index[f"v{k}"]
        degs[k] = contracted.degree(vid)
    contracted.meta["junction_degrees"] = degs
    for k in range(1, K):
        a = contracted.index[f"v{k}"]
        b = contracted.index[f"v{k + 1}"]
        out.append((k, effective_resistance(contracted, a, b, tol=tol)))
    return out


# -- spanning subtrees -------------------------------------------------------

def spanning_tree(graph: Graph, strategy: str, seed: int = 0, root: int = 0) -> Graph:
    """A spanning tree as a Graph sharing the parent's vertex labels.

    Strategies: breadth-first and depth-first trees from ``root``, or the
    minimum spanning tree under seeded uniform random edge weights.
    """
    tree = Graph()
    for label in graph.labels:
        tree.add_vertex(label)
    if strategy in ("bfs", "dfs"):
        from collections import deque
        seen = [False] * graph.n
        seen[root] = True
        frontier = deque([root])
        while frontier:
            v = frontier.pop() if strategy == "dfs" else frontier.popleft()
            for u in graph.neighbors(v):
                if not seen[u]:
                    seen[u] = True
                    tree.add_edge(graph.labels[v], graph.labels[u])
                    frontier.append(u)
    elif strategy == "random":
        a = graph.csr().tocoo()
        mask = a.row < a.col
        rows, cols = a.row[mask], a.col[mask]
        rng = np.random.Generator(np.random.Philox(key=seed))
        weights = rng.random(len(rows)) + 1e-9
        w = sp.coo_matrix((weights, (rows, cols)), shape=(graph.n, graph.n))
        mst = sp.csgraph.minimum_spanning_tree(w.tocsr()).tocoo()
        for i, j in zip(mst.row, mst.col):
            tree.add_edge(graph.labels[i], graph.labels[j])
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    tree.freeze()
    tree.meta.update(kind="spanning-tree", strategy=strategy, seed=seed)
    if tree.m != graph.n - 1:
        raise SolverError(f"spanning tree has {tree.m} edges for {graph.n} vertices")
    return tree


def tree_resistance_to_set(tree: Graph, source: int, targets) -> Fraction:
    """Exact resistance from ``source`` to the wired target set inside a tree.

    Series/parallel reduction on the tree rooted at the source: a subtree
    with no target contributes nothing; a target vertex short-circuits its
    subtree.
    """
    targets = set(targets)
    parent = [-2] * tree.n
    order = []
    parent[source] = -1
    stack = [source]
    while stack:
        v = stack.pop()
        order.append(v)
        for u in tree.neighbors(v):
            if parent[u] == -2:
                parent[u] = v
                stack.append(u)
    conductance = [None] * tree.n   # of the subtree at v, from v, to targets
    for v in reversed(order):
        if v in targets:
            conductance[v] = None   # marker: zero resistance at v
            continue
        total = Fraction(0)
        found = False
        for u in tree.neighbors(v):
            if u == parent[v]:
                continue
            cu = conductance[u]
            if cu is False:
                continue
            found = True
            if cu is None:
                total += Fraction(1)            # edge alone: resistance 1
            else:
                total += 1 / (1 + 1 / cu)       # edge in series, branches parallel
        conductance[v] = total if found else False
    c = conductance[source]
    if c is None:
        return Fraction(0)
    if c is False or c == 0:
        raise SolverError("no target reachable inside the tree")
    return 1 / c


def subtree_resistance_contrast(K: int, strategy: str, tol: float = 1e-10,
                                seed: int = 0, d: int = 7,
                                budget: int = 4_000_000) -> dict:
    """Resistance from source to wired frontier inside a spanning subtree
    versus inside the full spine truncation."""
    spine = spine_truncation(K, d=d, budget=budget)
    source = spine.meta["source"]
    frontier = spine.meta["frontier"]
    tree = spanning_tree(spine, strategy, seed=seed, root=source)
    r_tree = tree_resistance_to_set(tree, source, frontier)
    r_graph = effective_resistance(spine, source, frontier, tol=tol)
    return {
        "K": K, "strategy": strategy, "seed": seed,
        "r_tree": r_tree, "r_graph": r_graph.value,
        "r_graph_result": r_graph,
    }
