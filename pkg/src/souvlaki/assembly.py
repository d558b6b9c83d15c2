"""Gluing meatballs into gadgets, finite assemblies, spines and limit balls.

Skeletons
---------
Three skeleton shapes drive the same gluing rules:

* the height-n d-ary assembly: skeleton edges are digit paths over 1..d,
  an edge at depth h carries the parameter k = n - h + 1 meatball gadget
  (one left piece, d right-piece copies); leaf edges carry the left piece
  of the parameter-1 meatball only;
* the spine truncation: a single chain, meatball k glued to meatball k-1;
* the infinite limit: a canopy skeleton in which every edge has a parent;
  edges are addressed relative to a sampled base edge ("u" per upward step,
  then child digits, with the ancestor ray itself using child index 1).

Identification (tower sharing): the copies of the right segment of a
parameter-k edge coincide with the child edges' structure above their left
segment, at every row below k; matching is by ternary address and by wedge
offset relative to the segment start.  Consequently a level-k edge owns its
left piece plus only the row-k layer over each right-piece copy.

Canonical addresses resolve every shared coordinate to the owner closest to
the leaves.  The printable grammar is
``e:<owner>/t:<digits>/w:<row>,<pos>[/c:<copy>]`` with empty t as ``t:-``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .census import LimitLevelSampler, ownership_count, volume_left
from .errors import BudgetExceededError, CoordinateError
from .graph import Graph
from .topology import (FULL, LEFT_ONLY, TERNARY, MeatballSpec,
                       meatball_vertex_count, ternary_addresses)

DEFAULT_BUDGET = 4_000_000


class CanonicalVertex(NamedTuple):
    owner: str
    t: str
    row: int
    pos: int
    copy: Optional[int] = None


@dataclass(frozen=True)
class SkeletonAddress:
    """A skeleton edge of the height-n assembly, as its digit path."""

    path: str
    n: int
    d: int = 7

    def __post_init__(self):
        if not 1 <= len(self.path) <= self.n:
            raise ValueError(f"path depth {len(self.path)} outside [1, {self.n}]")
        if any(not ("1" <= c <= str(self.d)) for c in self.path):
            raise ValueError(f"bad path digits {self.path!r} for d={self.d}")

    @property
    def height(self) -> int:
        return len(self.path)

    @property
    def k(self) -> int:
        """Meatball parameter carried by this edge; leaf edges have k = 1."""
        return self.n - self.height + 1


@dataclass
class RootedSample:
    """A finite rooted ball with generator metadata."""

    graph: Graph
    root: int
    meta: dict = field(default_factory=dict)


# -- skeleton shapes ---------------------------------------------------------

class _TnSkeleton:
    kind = "tn"

    def __init__(self, n: int, d: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        _check_branching(d)
        self.n, self.d = n, d

    def param(self, owner: str) -> int:
        return self.n - len(owner) + 1

    def parent(self, owner: str):
        if len(owner) == 1:
            return None
        return owner[:-1], int(owner[-1])

    def child(self, owner: str, c: int) -> str:
        return owner + str(c)

    def n_copies(self, owner: str) -> int:
        return self.d

    def owners(self):
        level = [""]
        for _ in range(self.n):
            level = [p + str(c) for p in level for c in range(1, self.d + 1)]
            yield from level


class _SpineSkeleton:
    kind = "spine"

    def __init__(self, K: int, d: int = 7):
        if K < 2:
            raise ValueError("K must be >= 2")
        _check_branching(d)
        self.K, self.d = K, d

    def param(self, owner: str) -> int:
        return int(owner)

    def parent(self, owner: str):
        k = int(owner)
        if k >= self.K:
            return None
        return str(k + 1), 1

    def child(self, owner: str, c: int) -> str:
        if c != 1:
            raise CoordinateError("spine meatballs have a single continuation")
        return str(int(owner) - 1)

    def n_copies(self, owner: str) -> int:
        return 1

    def owners(self):
        return (str(k) for k in range(1, self.K + 1))


class _LimitSkeleton:
    """Canopy skeleton around a sampled level-k0 edge; every edge has a
    parent, and the ancestor ray uses child index 1."""

    kind = "limit"

    def __init__(self, k0: int, d: int):
        if k0 < 1:
            raise ValueError("k0 must be >= 1")
        _check_branching(d)
        self.k0, self.d = k0, d

    @staticmethod
    def _split(owner: str):
        ups = 0
        while ups < len(owner) and owner[ups] == "u":
            ups += 1
        return ups, owner[ups:]

    def param(self, owner: str) -> int:
        ups, down = self._split(owner)
        k = self.k0 + ups - len(down)
        if k < 1:
            raise CoordinateError(f"address {owner!r} descends below the leaves")
        return k

    def parent(self, owner: str):
        ups, down = self._split(owner)
        if down:
            return owner[:-1], int(owner[-1])
        return "u" * (ups + 1), 1

    def child(self, owner: str, c: int) -> str:
        ups, down = self._split(owner)
        if down or ups == 0:
            return owner + str(c)
        if c == 1:
            return "u" * (ups - 1)
        return owner + str(c)

    def n_copies(self, owner: str) -> int:
        return self.d


def _check_branching(d: int) -> None:
    if d <= 6:
        raise ValueError(f"branching d must exceed 6, got {d}")
    if d > 9:
        raise ValueError("single-digit copy addressing requires d <= 9")


# -- canonicalization and the global oracle ----------------------------------

def canonicalize(skel, owner: str, t: str, row: int, pos: int,
                 copy: Optional[int] = None) -> CanonicalVertex:
    """Resolve a raw in-meatball coordinate to its canonical owner.

    Raw coordinates over the right segment must say which copy they sit in
    (ignored elsewhere).  Idempotent on canonical addresses.
    """
    k = skel.param(owner)
    spec = MeatballSpec(k, d=max(7, getattr(skel, "d", 7)))
    if not 0 <= row <= k or not 0 <= pos < spec.base_len << row:
        raise CoordinateError(f"({owner!r}, {t!r}, {row}, {pos}) out of range")
    if len(t) != row:
        raise CoordinateError("ternary height differs from row")
    lim = spec.left_base_len << row
    if pos < lim:
        return CanonicalVertex(owner, t, row, pos, None)
    if copy is None or not 1 <= copy <= skel.n_copies(owner):
        raise CoordinateError("coordinates over the right segment need a copy index")
    if row == k:
        return CanonicalVertex(owner, t, row, pos, copy)
    return CanonicalVertex(skel.child(owner, copy), t, row, pos - lim, None)


def neighbors_global(skel, v: CanonicalVertex) -> list:
    """Neighbors of a canonical vertex, as canonical addresses.

    Symmetric, and defined purely by coordinate arithmetic; materialized
    graphs must agree with it edge for edge.
    """
    owner, t, row, pos, copy = v
    k = skel.param(owner)
    spec = MeatballSpec(k, d=max(7, getattr(skel, "d", 7)))
    if canonicalize(skel, owner, t, row, pos, copy) != v:
        raise CoordinateError(f"{v} is not canonical")
    lim = spec.left_base_len << row
    out = []
    if copy is None:
        parent_edge = skel.parent(owner)
        # horizontal, leftward: pos 0 continues into the parent's boundary
        if pos > 0:
            out.append(CanonicalVertex(owner, t, row, pos - 1, None))
        elif parent_edge is not None:
            po, _pc = parent_edge
            plim = MeatballSpec(k + 1).left_base_len << row
            out.append(CanonicalVertex(po, t, row, plim - 1, None))
        # horizontal, rightward: the boundary vertex crosses into every copy
        if pos + 1 < lim:
            out.append(CanonicalVertex(owner, t, row, pos + 1, None))
        elif spec.len_right > 0:
            for c in range(1, skel.n_copies(owner) + 1):
                out.append(canonicalize(skel, owner, t, row, lim, c))
        # one parent row down
        if row > 0:
            out.append(CanonicalVertex(owner, t[:-1], row - 1, pos // 2, None))
        # six children per level
        if row < k:
            for c in TERNARY:
                out.append(CanonicalVertex(owner, t + c, row + 1, 2 * pos, None))
                out.append(CanonicalVertex(owner, t + c, row + 1, 2 * pos + 1, None))
        elif parent_edge is not None and (pos >> row) < spec.len_left:
            # top row over the left segment: the tower continues one row up
            # inside the parent's copy
            po, pc = parent_edge
            p1 = (MeatballSpec(k + 1).left_base_len << row) + pos
            for c in TERNARY:
                out.append(CanonicalVertex(po, t + c, row + 1, 2 * p1, pc))
                out.append(CanonicalVertex(po, t + c, row + 1, 2 * p1 + 1, pc))
    else:
        # the owned layer over a right-piece copy, at row == k
        base = spec.base_len << row
        if pos - 1 >= lim:
            out.append(CanonicalVertex(owner, t, row, pos - 1, copy))
        else:
            out.append(CanonicalVertex(owner, t, row, lim - 1, None))
        if pos + 1 < base:
            out.append(CanonicalVertex(owner, t, row, pos + 1, copy))
        child = skel.child(owner, copy)
        out.append(CanonicalVertex(
            child, t[:-1], row - 1, pos // 2 - (spec.left_base_len << (row - 1)), None))
    return out


# -- materializers (independent edge enumeration) ----------------------------

def _left_piece_edges(g: Graph, owner: str, k: int):
    """Interior of a left piece: horizontal rows plus vertical fans."""
    spec = MeatballSpec(k)
    for row in range(k + 1):
        width = spec.left_base_len << row
        for t in ternary_addresses(row):
            for pos in range(width):
                v = CanonicalVertex(owner, t, row, pos, None)
                g.add_vertex(v)
                if pos + 1 < width:
                    g.add_edge(v, CanonicalVertex(owner, t, row, pos + 1, None))
                if row < k:
                    for c in TERNARY:
                        g.add_edge(v, CanonicalVertex(owner, t + c, row + 1, 2 * pos, None))
                        g.add_edge(v, CanonicalVertex(owner, t + c, row + 1, 2 * pos + 1, None))


def _copy_edges(g: Graph, skel, owner: str, k: int, c: int, standalone: bool):
    """One right-piece copy: crossing edges, plus either the full tower
    (standalone gadget) or only the owned row-k layer stitched onto the
    child's structure (assembled graphs)."""
    spec = MeatballSpec(k)
    lim_base = spec.left_base_len

    def cv(t, row, pos):
        if standalone:
            return CanonicalVertex(owner, t, row, pos, c)
        return canonicalize(skel, owner, t, row, pos, c)

    # crossing edges at every row
    for row in range(k + 1):
        lim = lim_base << row
        for t in ternary_addresses(row):
            g.add_edge(CanonicalVertex(owner, t, row, lim - 1, None), cv(t, row, lim))
    if standalone:
        # full tower over the right segment
        for row in range(k + 1):
            lim, base = lim_base << row, spec.base_len << row
            for t in ternary_addresses(row):
                for pos in range(lim, base):
                    v = cv(t, row, pos)
                    g.add_vertex(v)
                    if pos + 1 < base:
                        g.add_edge(v, cv(t, row, pos + 1))
                    if row < k:
                        for cc in TERNARY:
                            g.add_edge(v, cv(t + cc, row + 1, 2 * pos))
                            g.add_edge(v, cv(t + cc, row + 1, 2 * pos + 1))
    else:
        # owned row-k layer only; rows below coincide with the child edge
        lim, base = lim_base << k, spec.base_len << k
        for t in ternary_addresses(k):
            for pos in range(lim, base):
                v = cv(t, k, pos)
                g.add_vertex(v)
                if pos + 1 < base:
                    g.add_edge(v, cv(t, k, pos + 1))
                g.add_edge(v, cv(t[:-1], k - 1, pos // 2))


def build_gadget(spec: MeatballSpec, budget: int = DEFAULT_BUDGET) -> Graph:
    """One left piece joined along its boundary to d full right-piece copies."""
    if spec.k < 2:
        raise ValueError("gadgets exist for k >= 2; leaf edges carry the left piece only")
    k, d = spec.k, spec.d
    estimate = (meatball_vertex_count(spec, LEFT_ONLY)
                + d * (meatball_vertex_count(spec, FULL)
                       - meatball_vertex_count(spec, LEFT_ONLY)))
    if estimate > budget:
        raise BudgetExceededError(estimate, budget)
    g = Graph()
    _left_piece_edges(g, "", k)
    for c in range(1, d + 1):
        _copy_edges(g, None, "", k, c, standalone=True)
    g.freeze()
    g.meta.update(kind="gadget", k=k, d=d)
    return g


def _materialize(skel, budget: int) -> Graph:
    g = Graph()
    for owner in skel.owners():
        k = skel.param(owner)
        _left_piece_edges(g, owner, k)
        if MeatballSpec(k).len_right > 0:
            for c in range(1, skel.n_copies(owner) + 1):
                _copy_edges(g, skel, owner, k, c, standalone=False)
        if g.n > budget:
            raise BudgetExceededError(g.n, budget)
    return g.freeze()


def assemble_tn(n: int, d: int = 7, budget: int = DEFAULT_BUDGET) -> Graph:
    """The full height-n assembly on the d-ary skeleton.

    Root edges have no parent edge, so the d root-edge structures share no
    vertices: the result has exactly d connected components (each connected).
    Metadata records the component count and the spine (leftmost-ray) ids.
    """
    skel = _TnSkeleton(n, d)
    estimate = sum(ownership_count(k, d) * d ** (n - k + 1) for k in range(1, n + 1))
    if estimate > budget:
        raise BudgetExceededError(estimate, budget)
    g = _materialize(skel, budget)
    ray = {"1" * h for h in range(1, n + 1)}
    spine_ids = [i for i, v in enumerate(g.labels)
                 if v.owner in ray and (v.copy is None or v.copy == 1)]
    g.meta.update(kind="tn", n=n, d=d, spine=spine_ids,
                  components=len(g.connected_components()))
    return g


def spine_truncation(K: int, d: int = 7, budget: int = DEFAULT_BUDGET) -> Graph:
    """The chain of meatballs 1..K glued junction to junction.

    Junction k is the base of the left segment of meatball k (k^2 vertices),
    identified with the right segment of meatball k+1.  Distinguished
    vertices: ``source`` (the single junction-1 vertex) and ``frontier``
    (the K^2 base vertices of the left segment of meatball K).
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    skel = _SpineSkeleton(K, d)
    estimate = 14 + sum(volume_left(k) + 6 ** k * (k - 1) ** 2
                        for k in range(2, K + 1))
    if estimate > budget:
        raise BudgetExceededError(estimate, budget)
    g = _materialize(skel, budget)
    junctions = {}
    for k in range(1, K + 1):
        junctions[k] = [g.index[CanonicalVertex(str(k), "", 0, j, None)]
                        for j in range(k * k)]
    g.meta.update(kind="spine", K=K, d=d,
                  source=junctions[1][0], frontier=junctions[K],
                  junctions=junctions, spine=list(range(g.n)))
    return g


# -- the limit object --------------------------------------------------------

def sample_limit_ball(r: int, d: int = 7, seed: int = 0,
                      budget: int = DEFAULT_BUDGET) -> RootedSample:
    """Sample the limit root and materialize its radius-r ball.

    The owner level is drawn from the exact ownership-weight law, the root
    uniformly among that edge's owned vertices, and the ball deterministically
    through the global oracle on the canopy skeleton.  Deterministic per seed.
    """
    if r < 0:
        raise ValueError("radius must be >= 0")
    rng = random.Random(seed)
    level_rng_seed = rng.getrandbits(64)
    k0 = LimitLevelSampler(d, seed=level_rng_seed).sample()
    skel = _LimitSkeleton(k0, d)
    root = _uniform_owned_vertex(skel, k0, d, rng)
    ball = {root: 0}
    frontier = [root]
    for depth in range(1, r + 1):
        nxt = []
        for v in frontier:
            for u in neighbors_global(skel, v):
                if u not in ball:
                    ball[u] = depth
                    nxt.append(u)
            if len(ball) > budget:
                raise BudgetExceededError(len(ball), budget)
        frontier = nxt
    g = Graph()
    for v in ball:
        g.add_vertex(v)
    for v in ball:
        for u in neighbors_global(skel, v):
            if u in ball:
                g.add_edge(v, u)
    g.freeze()
    sample = RootedSample(graph=g, root=g.index[root], meta={
        "k_level": k0, "radius": r, "d": d, "seed": seed,
        "root_address": format_address(root),
    })
    return sample


def _uniform_owned_vertex(skel, k: int, d: int, rng: random.Random) -> CanonicalVertex:
    spec = MeatballSpec(k, d=d)
    v_left = volume_left(k)
    total = ownership_count(k, d)
    pick = rng.randrange(total)
    if pick < v_left:
        # uniform vertex of the left piece: row by cumulative level counts
        row = 0
        while pick >= 6 ** row * spec.left_base_len:
            pick -= 6 ** row * spec.left_base_len
            row += 1
        width = spec.left_base_len << row
        t_idx, pos = divmod(pick, width)
        return CanonicalVertex("", _ternary_digits(t_idx, row), row, pos, None)
    pick -= v_left
    layer = (spec.len_right << k)
    copy, rest = divmod(pick, 3 ** k * layer)
    t_idx, off = divmod(rest, layer)
    return CanonicalVertex("", _ternary_digits(t_idx, k), k,
                           (spec.left_base_len << k) + off, copy + 1)


def _ternary_digits(idx: int, height: int) -> str:
    digits = []
    for _ in range(height):
        idx, rem = divmod(idx, 3)
        digits.append(TERNARY[rem])
    return "".join(reversed(digits))


# -- address grammar and export ----------------------------------------------

def format_address(v: CanonicalVertex) -> str:
    t = v.t if v.t else "-"
    s = f"e:{v.owner}/t:{t}/w:{v.row},{v.pos}"
    if v.copy is not None:
        s += f"/c:{v.copy}"
    return s


def parse_address(text: str) -> CanonicalVertex:
    try:
        parts = text.split("/")
        owner = parts[0].removeprefix("e:")
        t = parts[1].removeprefix("t:")
        t = "" if t == "-" else t
        row_s, pos_s = parts[2].removeprefix("w:").split(",")
        copy = None
        if len(parts) == 4:
            copy = int(parts[3].removeprefix("c:"))
        v = CanonicalVertex(owner, t, int(row_s), int(pos_s), copy)
    except (ValueError, IndexError) as exc:
        raise CoordinateError(f"cannot parse address {text!r}") from exc
    if len(v.t) != v.row or any(c not in TERNARY for c in v.t) or v.pos < 0:
        raise CoordinateError(f"inconsistent address {text!r}")
    return v


def export_edge_lines(g: Graph) -> list:
    """Sorted edge list: two canonical addresses per line plus the header."""
    meta = g.meta
    if meta.get("kind") == "spine":
        header = f"# souvlaki v1 K={meta['K']} d={meta['d']}"
    elif meta.get("kind") == "tn":
        header = f"# souvlaki v1 n={meta['n']} d={meta['d']}"
    else:
        header = f"# souvlaki v1 {meta.get('kind', 'graph')}"
    lines = []
    for a, b in g.edges():
        la, lb = format_address(g.labels[a]), format_address(g.labels[b])
        if lb < la:
            la, lb = lb, la
        lines.append(f"{la} {lb}")
    lines.sort()
    return [header] + lines
