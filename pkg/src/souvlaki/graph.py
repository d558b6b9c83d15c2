"""Simple undirected graph container used by every builder.

Vertices are integer ids 0..n-1 with an arbitrary hashable label each.
Construction goes through ``add_vertex``/``add_edge`` (duplicate edges are
merged, self-loops rejected); ``freeze`` sorts adjacency lists so iteration
order is deterministic everywhere downstream.
"""
from __future__ import annotations

from collections import deque

import numpy as np
import scipy.sparse as sp


class Graph:
    def __init__(self):
        self.labels: list = []
        self.index: dict = {}
        self._adj: list = []          # list[set[int]] until freeze
        self.adj: list = []           # list[list[int]] after freeze
        self.meta: dict = {}
        self._frozen = False

    # -- construction ------------------------------------------------------

    def add_vertex(self, label) -> int:
        vid = self.index.get(label)
        if vid is None:
            vid = len(self.labels)
            self.index[label] = vid
            self.labels.append(label)
            self._adj.append(set())
        return vid

    def add_edge(self, a, b) -> None:
        ia, ib = self.add_vertex(a), self.add_vertex(b)
        if ia == ib:
            raise ValueError(f"self-loop at {a!r}")
        self._adj[ia].add(ib)
        self._adj[ib].add(ia)

    def freeze(self) -> "Graph":
        if not self._frozen:
            self.adj = [sorted(s) for s in self._adj]
            self._adj = []
            self._frozen = True
        return self

    # -- queries -----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def degree(self, vid: int) -> int:
        return len(self.adj[vid])

    def neighbors(self, vid: int):
        return self.adj[vid]

    def has_edge(self, a, b) -> bool:
        ia, ib = self.index[a], self.index[b]
        return ib in self.adj[ia]

    def edges(self):
        """Yield edges as (id_a, id_b) with id_a < id_b."""
        for a, nbrs in enumerate(self.adj):
            for b in nbrs:
                if a < b:
                    yield a, b

    def degree_histogram(self) -> dict:
        hist: dict = {}
        for a in self.adj:
            hist[len(a)] = hist.get(len(a), 0) + 1
        return dict(sorted(hist.items()))

    # -- traversal ---------------------------------------------------------

    def bfs_distances(self, sources, limit=None) -> dict:
        """Hop distance from the nearest source; omit vertices beyond limit."""
        if isinstance(sources, int):
            sources = [sources]
        dist = {s: 0 for s in sources}
        q = deque(sources)
        while q:
            v = q.popleft()
            dv = dist[v]
            if limit is not None and dv >= limit:
                continue
            for u in self.adj[v]:
                if u not in dist:
                    dist[u] = dv + 1
                    q.append(u)
        return dist

    def connected_components(self) -> list:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp = [s]
            seen[s] = True
            q = deque([s])
            while q:
                v = q.popleft()
                for u in self.adj[v]:
                    if not seen[u]:
                        seen[u] = True
                        comp.append(u)
                        q.append(u)
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return self.n == 0 or len(self.bfs_distances(0)) == self.n

    # -- numeric views -----------------------------------------------------

    def csr(self) -> sp.csr_matrix:
        """Unweighted adjacency matrix (cached)."""
        mat = self.meta.get("_csr")
        if mat is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            for i, a in enumerate(self.adj):
                indptr[i + 1] = indptr[i] + len(a)
            indices = np.empty(indptr[-1], dtype=np.int32)
            for i, a in enumerate(self.adj):
                indices[indptr[i]:indptr[i + 1]] = a
            data = np.ones(indptr[-1], dtype=np.float64)
            mat = sp.csr_matrix((data, indices, indptr), shape=(self.n, self.n))
            self.meta["_csr"] = mat
        return mat

    def laplacian(self) -> sp.csr_matrix:
        a = self.csr()
        deg = np.asarray(a.sum(axis=1)).ravel()
        return (sp.diags(deg) - a).tocsr()


def quotient(graph: Graph, classes: list, class_labels: list) -> Graph:
    """Contract each vertex set in ``classes`` to a single vertex.

    Parallel edges are merged and self-loops dropped.  Vertices outside any
    class keep their labels; contracted vertices get ``class_labels[i]``.
    """
    rep = {}
    for i, cls in enumerate(classes):
        for vid in cls:
            rep[vid] = ("__class__", i)
    out = Graph()
    for vid, label in enumerate(graph.labels):
        key = rep.get(vid)
        out.add_vertex(class_labels[key[1]] if key else label)
    for a, b in graph.edges():
        la = rep.get(a)
        lb = rep.get(b)
        ka = class_labels[la[1]] if la else graph.labels[a]
        kb = class_labels[lb[1]] if lb else graph.labels[b]
        if ka != kb:
            out.add_edge(ka, kb)
    return out.freeze()
