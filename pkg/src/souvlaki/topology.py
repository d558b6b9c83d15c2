"""Coordinates and the neighbor oracle for a single meatball.

A meatball of parameter k is a finite window of the height-fibered product
of two ingredients:

* the binary wedge ``W`` over a base path: row 0 has ``base_len`` positions,
  each row doubles (vertex ``(i, b)`` has parent ``(i-1, b//2)`` and children
  ``(i+1, 2b)``, ``(i+1, 2b+1)``), consecutive positions in a row are joined
  by horizontal edges;
* the rooted ternary tree, addressed by digit strings over ``012``.

A product vertex pairs a ternary address ``t`` with a wedge vertex at
``row == len(t)``.  Vertical edges move both coordinates one level at once
(three ternary children times two wedge children = six children per vertex);
horizontal edges move only the wedge position.  The base path splits into
segments L (leftmost k^2 positions), A (middle k^4) and R (rightmost
(k-1)^2); rows are capped at k.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .errors import BudgetExceededError, CoordinateError
from .graph import Graph

LEFT = "LEFT"
RIGHT = "RIGHT"
FULL = "FULL"
LEFT_ONLY = "LEFT_ONLY"

TERNARY = "012"


class WVertex(NamedTuple):
    row: int
    pos: int

    def parent(self) -> "WVertex":
        return WVertex(self.row - 1, self.pos // 2)

    def children(self) -> tuple:
        return (WVertex(self.row + 1, 2 * self.pos),
                WVertex(self.row + 1, 2 * self.pos + 1))

    def base_pos(self) -> int:
        """Base-path position this vertex sits above."""
        return self.pos >> self.row


class H3Vertex(NamedTuple):
    t: str
    w: WVertex

    @property
    def row(self) -> int:
        return self.w.row


@dataclass(frozen=True)
class MeatballSpec:
    """Parameters of one meatball: segment lengths, height cap, branching."""

    k: int
    d: int = 7

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.d <= 6:
            raise ValueError(f"branching d must exceed 6, got {self.d}")

    @property
    def len_left(self) -> int:
        return self.k * self.k

    @property
    def len_middle(self) -> int:
        return self.k ** 4

    @property
    def len_right(self) -> int:
        return (self.k - 1) ** 2

    @property
    def base_len(self) -> int:
        return self.len_left + self.len_middle + self.len_right

    @property
    def left_base_len(self) -> int:
        """Number of base positions under the left piece (L and A segments)."""
        return self.len_left + self.len_middle

    @property
    def height_cap(self) -> int:
        return self.k

    def segment_of(self, base_pos: int) -> str:
        if base_pos < self.len_left:
            return "L"
        if base_pos < self.left_base_len:
            return "A"
        return "R"

    def row_width(self, row: int) -> int:
        return self.base_len << row

    def validate(self, v: H3Vertex) -> None:
        if len(v.t) != v.w.row:
            raise CoordinateError(f"ternary height {len(v.t)} != row {v.w.row}")
        if any(c not in TERNARY for c in v.t):
            raise CoordinateError(f"bad ternary digits {v.t!r}")
        if not 0 <= v.w.row <= self.height_cap:
            raise CoordinateError(f"row {v.w.row} outside [0, {self.height_cap}]")
        if not 0 <= v.w.pos < self.row_width(v.w.row):
            raise CoordinateError(
                f"pos {v.w.pos} outside [0, {self.row_width(v.w.row)}) at row {v.w.row}")


def neighbors_in_meatball(spec: MeatballSpec, v: H3Vertex) -> list:
    """All meatball neighbors of ``v``: horizontal, one parent, six children."""
    spec.validate(v)
    t, (row, pos) = v.t, v.w
    out = []
    if pos > 0:
        out.append(H3Vertex(t, WVertex(row, pos - 1)))
    if pos + 1 < spec.row_width(row):
        out.append(H3Vertex(t, WVertex(row, pos + 1)))
    if row > 0:
        out.append(H3Vertex(t[:-1], v.w.parent()))
    if row < spec.height_cap:
        for c in TERNARY:
            for wc in v.w.children():
                out.append(H3Vertex(t + c, wc))
    return out


def side_of(spec: MeatballSpec, v: H3Vertex) -> str:
    """LEFT if the vertex sits above the L or A segment, else RIGHT."""
    spec.validate(v)
    return LEFT if v.w.base_pos() < spec.left_base_len else RIGHT


def boundary_bk(spec: MeatballSpec) -> list:
    """Left endpoints of the left/right crossing edges, one per row per t.

    Per row i the single wedge position ``left_base_len * 2^i - 1``; for
    k >= 2 each returned vertex has a RIGHT horizontal neighbor.
    """
    out = []
    for row in range(spec.height_cap + 1):
        pos = spec.left_base_len * (1 << row) - 1
        for t in ternary_addresses(row):
            out.append(H3Vertex(t, WVertex(row, pos)))
    return out


def ternary_addresses(height: int) -> Iterator[str]:
    """All 3^height ternary digit strings, lexicographically."""
    if height == 0:
        yield ""
        return
    for prefix in ternary_addresses(height - 1):
        for c in TERNARY:
            yield prefix + c


def meatball_vertex_count(spec: MeatballSpec, part: str = FULL) -> int:
    base = spec.base_len if part == FULL else spec.left_base_len
    return base * (6 ** (spec.height_cap + 1) - 1) // 5


def iter_meatball_vertices(spec: MeatballSpec, part: str = FULL) -> Iterator[H3Vertex]:
    base = spec.base_len if part == FULL else spec.left_base_len
    for row in range(spec.height_cap + 1):
        width = base << row
        for t in ternary_addresses(row):
            for pos in range(width):
                yield H3Vertex(t, WVertex(row, pos))


def materialize_meatball(spec: MeatballSpec, part: str = FULL,
                         budget: int = 2_000_000) -> Graph:
    """Explicit vertex/edge lists for one meatball (or its left piece only).

    The LEFT_ONLY part is the induced subgraph above the L and A segments.
    """
    if part not in (FULL, LEFT_ONLY):
        raise ValueError(f"part must be FULL or LEFT_ONLY, got {part!r}")
    estimate = meatball_vertex_count(spec, part)
    if estimate > budget:
        raise BudgetExceededError(estimate, budget)
    base = spec.base_len if part == FULL else spec.left_base_len
    g = Graph()
    for v in iter_meatball_vertices(spec, part):
        g.add_vertex(v)
        t, (row, pos) = v.t, v.w
        if pos + 1 < (base << row):
            g.add_edge(v, H3Vertex(t, WVertex(row, pos + 1)))
        if row < spec.height_cap:
            for c in TERNARY:
                for wc in v.w.children():
                    g.add_edge(v, H3Vertex(t + c, wc))
    g.freeze()
    g.meta.update(kind="meatball", k=spec.k, part=part)
    return g


# -- coordinate text grammar -------------------------------------------------

def format_coordinate(v: H3Vertex) -> str:
    """Bit-exact text form ``t:<digits>/w:<row>,<pos>`` (empty t prints as -)."""
    t = v.t if v.t else "-"
    return f"t:{t}/w:{v.w.row},{v.w.pos}"


def parse_coordinate(text: str) -> H3Vertex:
    try:
        tpart, wpart = text.split("/")
        if not tpart.startswith("t:") or not wpart.startswith("w:"):
            raise ValueError(text)
        t = tpart[2:]
        t = "" if t == "-" else t
        row_s, pos_s = wpart[2:].split(",")
        v = H3Vertex(t, WVertex(int(row_s), int(pos_s)))
    except (ValueError, IndexError) as exc:
        raise CoordinateError(f"cannot parse coordinate {text!r}") from exc
    if any(c not in TERNARY for c in v.t) or len(v.t) != v.w.row or v.w.pos < 0:
        raise CoordinateError(f"inconsistent coordinate {text!r}")
    return v
