"""Configuration counting N_G(lambda): exact completions of an anchored vertex.

The generic counter is a backtracking search over shell-intersection candidate
sets.  Structured graphs take exact fast paths built on the two-sided budget
DP (pair_dp): for a point z, t(z) = #{s in S_lam : |z-s|^2 = lam} depends only
on the multiset of |z_j|, so sums over Z^d collapse to sums over canonical
orbit representatives of the signed-permutation group weighted by orbit size.

Identities used (all verified against the generic counter in the tests):
  trees on k vertices:          N_G = N_lam^(k-1)
  triangle:                     N_G = sum_{z in S} t(z)      (= M, mutual pairs)
  triangle plus pendant edge:   N_G = M * N_lam
  4-cycle:                      N_G = sum_{all z} t(z)^2
  4-cycle with a chord:         N_G = sum_{z in S} t(z)^2
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import AdmissibilityError, CapacityError
from .graphs import components_of
from .lattice import (
    DEFAULT_BUDGET,
    ball_cardinality,
    encode_points,
    enumerate_sphere,
    sphere_cardinality,
)

# ---------------------------------------------------------------------------
# canonical orbits under coordinate permutations and sign flips
# ---------------------------------------------------------------------------


def orbit_size(zabs_desc, d):
    """Orbit size of a point whose coordinate magnitudes, sorted nonincreasing,
    are zabs_desc: 2^(#nonzero) * d! / prod over repeated values of mult!."""
    nz = sum(1 for c in zabs_desc if c != 0)
    size = (2 ** nz) * math.factorial(d)
    run = 1
    for i in range(1, d + 1):
        if i < d and zabs_desc[i] == zabs_desc[i - 1]:
            run += 1
        else:
            size //= math.factorial(run)
            run = 1
    return size


def _desc_reps(d, budget, exact):
    """Nonincreasing nonnegative integer d-tuples with squared norm == budget
    (exact) or <= budget."""
    out = []
    seq = [0] * d

    def rec(i, prev, rem):
        if i == d:
            if rem == 0 or not exact:
                out.append(tuple(seq))
            return
        top = min(prev, math.isqrt(rem))
        lo = 0
        for a in range(top, lo - 1, -1):
            seq[i] = a
            rec(i + 1, a, rem - a * a)
        seq[i] = 0

    rec(0, math.isqrt(budget), budget)
    return out


@lru_cache(maxsize=256)
def shell_orbit_reps(d, lam):
    """Canonical representatives of S_lam with orbit sizes; sum of sizes is
    sphere_cardinality(d, lam)."""
    reps = [z for z in _desc_reps(d, lam, exact=True)]
    return tuple((z, orbit_size(z, d)) for z in reps)


def pair_count(z, lam):
    """t(z): number of shell points s with |z - s|^2 = lam (exact)."""
    zabs = np.abs(np.asarray(z, dtype=np.int64))
    return int(_kernels.pair_dp(zabs, int(lam)))


@lru_cache(maxsize=64)
def mutual_pair_count(d, lam):
    """Number of ordered pairs (u, v) of shell points with |u-v|^2 = lam."""
    total = 0
    for z, w in shell_orbit_reps(d, lam):
        total += w * pair_count(z, lam)
    return total


@lru_cache(maxsize=64)
def _cycle4_count(d, lam):
    """sum over all z in Z^d of t(z)^2; support is |z|^2 <= 4 lam."""
    total = 0
    for z in _desc_reps(d, 4 * lam, exact=False):
        t = pair_count(z, lam)
        if t:
            total += orbit_size(z, d) * t * t
    return total


@lru_cache(maxsize=64)
def _cycle4_chord_count(d, lam):
    """sum over z in S_lam of t(z)^2."""
    total = 0
    for z, w in shell_orbit_reps(d, lam):
        t = pair_count(z, lam)
        total += w * t * t
    return total


# ---------------------------------------------------------------------------
# generic anchored backtracking counter
# ---------------------------------------------------------------------------


class _ShellIndex:
    def __init__(self, d, lam, budget):
        self.shell = enumerate_sphere(d, lam, budget)
        self.d = d
        self.lam = lam
        self.points = self.shell.points
        bound = math.isqrt(lam)
        # keys must stay unique for any point with coords within +-3*bound
        # (differences of up to three shell points appear in membership tests);
        # use a comfortably larger base
        self.offset = 8 * bound + 8
        self.base = 2 * self.offset + 1
        if self.base ** d >= 2 ** 62:
            raise CapacityError(self.base ** d, 2 ** 62, what="encoding range")
        self.keys = np.sort(encode_points(self.points, self.base, self.offset))

    def contains(self, pts):
        """Boolean mask: which rows are shell points."""
        if len(pts) == 0:
            return np.zeros(0, dtype=bool)
        if np.abs(pts).max(initial=0) > self.offset:
            # out-of-range points cannot be on the shell; clamp via mask
            ok = (np.abs(pts) <= math.isqrt(self.lam)).all(axis=1)
            res = np.zeros(len(pts), dtype=bool)
            if ok.any():
                res[ok] = self.contains(pts[ok])
            return res
        keys = encode_points(pts, self.base, self.offset)
        pos = np.searchsorted(self.keys, keys)
        pos[pos == len(self.keys)] = 0
        return self.keys[pos] == keys


def _count_backtracking(g, d, lam, budget):
    idx = _ShellIndex(d, lam, budget)
    if idx.points.shape[0] == 0:
        return 0 if g.edge_count else 1
    adj = g.adjacency()
    assigned = {1: np.zeros(d, dtype=np.int64)}

    def candidates(v):
        anchors = [assigned[u] for u in adj[v] if u in assigned]
        cand = anchors[0] + idx.points
        for x in anchors[1:]:
            cand = cand[idx.contains(cand - x)]
            if len(cand) == 0:
                break
        return cand

    def count_component(comp):
        # pick the vertex with the most assigned neighbours (ties: lowest index)
        best = max(comp, key=lambda v: (sum(1 for u in adj[v] if u in assigned), -v))
        cand = candidates(best)
        rest = [v for v in comp if v != best]
        if not rest:
            return len(cand)
        total = 0
        for row in cand:
            assigned[best] = row
            total += count_unassigned(rest)
        assigned.pop(best, None)  # cand may have been empty
        return total

    def count_unassigned(vertices):
        total = 1
        for comp in components_of(g, vertices):
            total *= count_component(comp)
            if total == 0:
                break
        return total

    return count_unassigned(list(range(2, g.vertex_count + 1)))


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConfigurationCount:
    """The exact number of completions of an anchored origin to a distance
    configuration, together with the parameters that produced it."""

    graph: object
    dimension: int
    radius: int
    count: int

    def __int__(self) -> int:
        return self.count

    def __bool__(self) -> bool:
        return self.count > 0


def completion_count(g, d, lam, budget=DEFAULT_BUDGET):
    """Exact number of tuples (x_2, ..., x_k) completing x_1 = origin to a
    distance configuration of g at squared radius lam, as a plain integer."""
    if d < 2:
        raise ValueError(f"configuration counting needs d >= 2, got {d}")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if not g.connected:
        raise ValueError(
            "completion count of a disconnected graph is unbounded "
            "(a whole component can be translated freely)"
        )
    k = g.vertex_count
    n = sphere_cardinality(d, lam)
    if g.is_tree():
        return n ** (k - 1)
    edges = set(g.edges)
    if k == 3 and len(edges) == 3:
        return mutual_pair_count(d, lam)
    if edges == {(1, 2), (1, 3), (2, 3), (3, 4)}:
        return mutual_pair_count(d, lam) * n
    if edges == {(1, 2), (2, 3), (3, 4), (1, 4)}:
        return _cycle4_count(d, lam)
    if edges == {(1, 2), (2, 3), (3, 4), (1, 4), (1, 3)}:
        return _cycle4_chord_count(d, lam)
    return _count_backtracking(g, d, lam, budget)


def count_configurations(g, d, lam, budget=DEFAULT_BUDGET):
    """As completion_count, wrapped in a ConfigurationCount record."""
    return ConfigurationCount(g, d, lam, completion_count(g, d, lam, budget))


def admissible_radii(g, d, lambda_range, budget=DEFAULT_BUDGET):
    """The set of lam in lambda_range with a positive configuration count."""
    out = set()
    for lam in lambda_range:
        if lam < 0:
            raise ValueError("lambda range must be non-negative")
        if completion_count(g, d, lam, budget) > 0:
            out.add(lam)
    return out


def cycle_walk_counts(d, lam, steps, budget=DEFAULT_BUDGET):
    """t(z) = number of ordered tuples (s_1,...,s_steps) of shell points with
    s_1 + ... + s_steps = z, as a dict LatticePoint -> count.
    sum of t over all z equals N_lam^steps."""
    if steps < 1:
        raise ValueError("steps must be positive")
    n = sphere_cardinality(d, lam)
    if n == 0:
        raise AdmissibilityError(f"empty shell: d={d}, lambda={lam}")
    shell = enumerate_sphere(d, lam, budget).points
    bound = steps * math.isqrt(lam) + 1
    offset = bound
    base = 2 * offset + 1
    if base ** d >= 2 ** 62:
        raise CapacityError(base ** d, 2 ** 62, what="encoding range")
    supp = shell.copy()
    counts = np.ones(len(supp), dtype=object)
    for _ in range(steps - 1):
        if len(supp) * n > budget:
            raise CapacityError(len(supp) * n, budget, what="walk expansion pairs")
        ext = (supp[:, None, :] + shell[None, :, :]).reshape(-1, d)
        w = np.repeat(counts, n)
        keys = encode_points(ext, base, offset)
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        ext = ext[order]
        w = w[order]
        cut = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
        supp = ext[cut]
        counts = np.add.reduceat(w, cut)
    return {tuple(int(c) for c in row): int(v) for row, v in zip(supp, counts)}
