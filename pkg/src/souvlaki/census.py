"""Exact counting of meatball volumes and the root-level distribution.

Everything here is integer or rational arithmetic; floats appear only in
display helpers.  Level k of the assembled family means "the skeleton edge
owning the vertex carries the parameter-k meatball"; leaf edges have k = 1.

Two weight families matter:

* paper weights  v_k * d^-k   -- v_k counts the left piece only, giving the
  root law conditioned on landing in some left piece;
* ownership weights  u_k * d^-k  -- u_k additionally counts the top layers
  over the d right-piece copies, which no left piece contains, giving the
  unconditional law of the owner level under a uniform root.
"""
from __future__ import annotations

import bisect
import random
from dataclasses import dataclass, field
from fractions import Fraction


def volume_left(k: int) -> int:
    """Vertices of the left piece of the parameter-k meatball (exact)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return (6 ** (k + 1) - 1) // 5 * (k ** 4 + k * k)


def level_count(k: int, i: int) -> int:
    """Vertices of the left piece at height i: 3^i 2^i (k^2 + k^4)."""
    if not 0 <= i <= k:
        raise ValueError(f"height {i} outside [0, {k}]")
    return 6 ** i * (k * k + k ** 4)


def ownership_count(k: int, d: int = 7) -> int:
    """Vertices canonically owned by a level-k edge under tower sharing.

    The left piece, plus (for k >= 2) the d top layers over the right-piece
    copies: every lower tower row over a right piece coincides with the
    child edge's structure and is owned there.
    """
    if d <= 6:
        raise ValueError("d must exceed 6")
    v = volume_left(k)
    if k == 1:
        return v
    return v + d * 6 ** k * (k - 1) ** 2


def root_level_probability(k: int, n: int, d: int = 7) -> Fraction:
    """Probability that a uniform root of the height-n assembly lies in the
    left piece of a level-k edge, conditioned on landing in some left piece.

    Equals v_k d^(n-k+1) / sum_j v_j d^(n-j+1), exactly.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    num = volume_left(k) * d ** (n - k + 1)
    den = sum(volume_left(j) * d ** (n - j + 1) for j in range(1, n + 1))
    return Fraction(num, den)


# -- tail bounds and the limit distribution ----------------------------------

def _weight_ratio(j: int, d: int) -> Fraction:
    """v_{j+1} d^-(j+1) / (v_j d^-j), exact.  Strictly decreasing in j:
    both (6^{j+2}-1)/(6^{j+1}-1) = 6 + 5/(6^{j+1}-1) and the polynomial
    factor (1+1/j)^2 ((j+1)^2+1)/(j^2+1) decrease."""
    return Fraction(volume_left(j + 1), volume_left(j) * d)


def summability_certificate(d: int = 7, search_limit: int = 64) -> int:
    """Smallest k0 with v_{k+1} d^-(k+1) < v_k d^-k for every k >= k0.

    Certified by exact evaluation up to k0 and the monotone decrease of the
    ratio beyond it (see _weight_ratio).
    """
    if d <= 6:
        raise ValueError("d must exceed 6")
    for k0 in range(1, search_limit + 1):
        if _weight_ratio(k0, d) < 1:
            # decreasing => stays below 1 for all k >= k0
            return k0
    raise RuntimeError(f"no ratio below 1 for k <= {search_limit}; d={d} too small?")


def paper_weight_tail_bound(J: int, d: int = 7) -> Fraction:
    """Exact upper bound for sum_{j>J} v_j d^-j (geometric domination)."""
    q = _weight_ratio(J + 1, d)
    if q >= 1:
        raise ValueError(f"tail bound needs the ratio below 1 at J+1={J + 1}")
    a = Fraction(volume_left(J + 1), d ** (J + 1))
    return a / (1 - q)


def ownership_weight_tail_bound(J: int, d: int = 7) -> Fraction:
    """Exact upper bound for sum_{j>J} u_j d^-j.

    Splits u_j = v_j + d 6^j (j-1)^2 and dominates each part geometrically;
    the copy-layer part has ratio (6/d)((j+1)/j)^2, decreasing in j.
    """
    qc = Fraction(6, d) * Fraction((J + 2) ** 2, (J + 1) ** 2)
    if qc >= 1:
        raise ValueError(f"copy-layer ratio not below 1 at J+1={J + 1}")
    c = Fraction(6 ** (J + 1) * J ** 2, d ** (J + 1))
    return paper_weight_tail_bound(J, d) + d * c / (1 - qc)


def limit_level_probability(k: int, d: int = 7, tol: Fraction = Fraction(1, 10 ** 9)
                            ) -> tuple:
    """Enclosure (lo, hi) of the n -> infinity level probability p_k.

    p_k = v_k d^-k / S with S the full paper-weight sum; S is enclosed by a
    partial sum plus the geometric tail bound, and J grows until the
    enclosure is narrower than tol.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    a_k = Fraction(volume_left(k), d ** k)
    J = max(k, summability_certificate(d)) + 1
    partial = sum(Fraction(volume_left(j), d ** j) for j in range(1, J + 1))
    while True:
        tail = paper_weight_tail_bound(J, d)
        lo, hi = a_k / (partial + tail), a_k / partial
        if hi - lo < tol:
            return lo, hi
        for j in range(J + 1, 2 * J + 1):
            partial += Fraction(volume_left(j), d ** j)
        J *= 2


@dataclass
class CensusTable:
    """Per-level exact counts and weights up to k_max."""

    d: int
    k_max: int
    volumes: list = field(default_factory=list)          # v_k
    owned: list = field(default_factory=list)            # u_k
    paper_weights: list = field(default_factory=list)    # v_k d^-k
    ownership_weights: list = field(default_factory=list)  # u_k d^-k
    paper_cumulative: list = field(default_factory=list)
    ownership_cumulative: list = field(default_factory=list)

    @classmethod
    def build(cls, d: int = 7, k_max: int = 30) -> "CensusTable":
        t = cls(d=d, k_max=k_max)
        cp = cu = Fraction(0)
        for k in range(1, k_max + 1):
            v, u = volume_left(k), ownership_count(k, d)
            t.volumes.append(v)
            t.owned.append(u)
            wp, wu = Fraction(v, d ** k), Fraction(u, d ** k)
            t.paper_weights.append(wp)
            t.ownership_weights.append(wu)
            cp += wp
            cu += wu
            t.paper_cumulative.append(cp)
            t.ownership_cumulative.append(cu)
        return t


class LimitLevelSampler:
    """Exact sampler of the owner level of the limit root.

    Levels are drawn with probability u_k d^-k / sum_j u_j d^-j.  A draw is
    a lazily extended binary expansion of a uniform number compared against
    integer enclosures of the cumulative thresholds; on the (vanishingly
    rare) ambiguous comparison both the expansion and the enclosure are
    refined, so the law is exact and the stream deterministic per seed.
    """

    def __init__(self, d: int = 7, seed: int = 0, bits: int = 96):
        self.d = d
        self.bits = bits
        self._rng = random.Random(seed)
        self._J = summability_certificate(d) + 8
        self._build_thresholds()

    def _build_thresholds(self):
        d, J, bits = self.d, self._J, self.bits
        partial = [Fraction(0)]
        for j in range(1, J + 1):
            partial.append(partial[-1] + Fraction(ownership_count(j, d), d ** j))
        tail = ownership_weight_tail_bound(J, d)
        total_lo, total_hi = partial[-1], partial[-1] + tail
        scale = 1 << bits
        # C_k lies in [partial[k]/total_hi, (partial[k]+tail)/total_lo]
        self._lo = [partial[k] * scale // total_hi for k in range(J + 1)]
        self._hi = [-((partial[k] + tail) * -scale // total_lo) for k in range(J + 1)]

    def sample(self) -> int:
        u = self._rng.getrandbits(self.bits)
        while True:
            k = bisect.bisect_right(self._lo, u)
            if k <= self._J and u >= self._hi[k - 1]:
                return k
            # ambiguous: refine enclosure and append fresh bits to u
            self._J *= 2
            self.bits += 64
            u = (u << 64) | self._rng.getrandbits(64)
            self._build_thresholds()

    def sample_many(self, count: int) -> dict:
        counts: dict = {}
        for _ in range(count):
            k = self.sample()
            counts[k] = counts.get(k, 0) + 1
        return dict(sorted(counts.items()))


def ownership_level_distribution(d: int = 7, k_max: int = 64) -> list:
    """Enclosed probabilities [(lo, hi)] of owner levels 1..k_max."""
    partial = [Fraction(0)]
    for j in range(1, k_max + 1):
        partial.append(partial[-1] + Fraction(ownership_count(j, d), d ** j))
    tail = ownership_weight_tail_bound(k_max, d)
    lo_total, hi_total = partial[-1], partial[-1] + tail
    out = []
    for k in range(1, k_max + 1):
        w = partial[k] - partial[k - 1]
        out.append((w / hi_total, w / lo_total))
    return out


def tv_distance_from_counts(counts: dict, d: int = 7) -> float:
    """Total-variation distance between empirical level counts and the
    ownership-weight law (midpoints of enclosures; tail mass lumped)."""
    n = sum(counts.values())
    k_max = max(max(counts), 40)
    probs = ownership_level_distribution(d, k_max)
    tv = Fraction(0)
    for k in range(1, k_max + 1):
        lo, hi = probs[k - 1]
        p = (lo + hi) / 2
        emp = Fraction(counts.get(k, 0), n)
        tv += abs(emp - p)
    tv += 1 - sum((lo + hi) / 2 for lo, hi in probs)  # tail beyond k_max
    return float(tv / 2)
