"""Exact enumeration of integer points on spheres and in balls in Z^d.

A sphere shell is S_lam = {y in Z^d : |y|^2 = lam} (lam is the SQUARED radius
throughout the package).  Cardinalities r_d(lam) are computed by a counting
recursion (squares-polynomial self-convolution), which also serves as the
capacity predictor: enumeration refuses to materialize shells or balls whose
exact predicted size exceeds the memory budget.

Points are always int64 numpy arrays of shape (n, d) in lexicographic order
(standard signed integer order per coordinate), which keeps snapshots and
cross-strategy comparisons byte-stable.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import CapacityError

DEFAULT_BUDGET = 100_000_000  # maximum number of points to materialize

_RD_CACHE = {}  # d -> counts table [r_d(0), r_d(1), ...]


def _rd_table(d, lam_max):
    """Exact r_d(n) for n = 0..lam_max via d-fold convolution of the
    one-coordinate counts (1 at 0, 2 at each positive square).  Python ints,
    so no overflow at any supported size."""
    tbl = _RD_CACHE.get(d)
    if tbl is not None and len(tbl) > lam_max:
        return tbl
    cur = [0] * (lam_max + 1)
    cur[0] = 1
    for _ in range(d):
        nxt = [0] * (lam_max + 1)
        for n in range(lam_max + 1):
            c = cur[n]
            if c == 0:
                continue
            nxt[n] += c
            a = 1
            while n + a * a <= lam_max:
                nxt[n + a * a] += 2 * c
                a += 1
        cur = nxt
    _RD_CACHE[d] = cur
    return cur


def _check_dim(d):
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")


def _check_radius(lam):
    if not isinstance(lam, (int, np.integer)) or lam < 0:
        raise ValueError(f"squared radius must be a non-negative integer, got {lam!r}")


def sphere_cardinality(d, lam):
    """|S_lam| in Z^d, by counting recursion only (no point materialization)."""
    _check_dim(d)
    _check_radius(lam)
    return _rd_table(d, lam)[lam]


def ball_cardinality(d, r2):
    """Number of lattice points with squared norm <= r2."""
    _check_dim(d)
    _check_radius(r2)
    return sum(_rd_table(d, r2)[: r2 + 1])


@dataclass
class SphereShell:
    dimension: int
    radius: int  # squared
    points: np.ndarray  # (count, dimension) int64, lexicographic

    @property
    def count(self):
        return len(self.points)


@dataclass
class BallRegion:
    dimension: int
    radius_squared: int
    points: np.ndarray

    @property
    def count(self):
        return len(self.points)


def enumerate_sphere(d, lam, budget=DEFAULT_BUDGET):
    """All lattice points of squared norm lam, lexicographically sorted.

    Raises CapacityError when the exact predicted cardinality exceeds budget."""
    _check_dim(d)
    _check_radius(lam)
    n = sphere_cardinality(d, lam)
    if n > budget:
        raise CapacityError(n, budget, what="sphere points")
    out = np.empty((n, d), dtype=np.int64)
    filled = _kernels.fill_sphere(d, lam, out)
    if filled != n:
        raise RuntimeError(
            f"enumeration produced {filled} points but counting predicted {n}"
        )
    return SphereShell(d, lam, out)


def enumerate_ball(d, r2, budget=DEFAULT_BUDGET):
    """All lattice points of squared norm <= r2, lexicographically sorted."""
    _check_dim(d)
    _check_radius(r2)
    n = ball_cardinality(d, r2)
    if n > budget:
        raise CapacityError(n, budget, what="ball points")
    out = np.empty((n, d), dtype=np.int64)
    filled = _kernels.fill_ball(d, r2, out)
    if filled != n:
        raise RuntimeError(
            f"enumeration produced {filled} points but counting predicted {n}"
        )
    return BallRegion(d, r2, out)


def encode_points(pts, base, offset):
    """Pack small-integer rows into single int64 keys (Horner scheme).
    Monotone in lexicographic order as long as all |coord| <= offset."""
    keys = np.zeros(len(pts), dtype=np.int64)
    for j in range(pts.shape[1]):
        keys = keys * base + (pts[:, j] + offset)
    return keys


# ---------------------------------------------------------------------------
# serialization: header `d=<int> lambda=<int> count=<int>`, one point per line
# ---------------------------------------------------------------------------

def points_to_text(d, lam, points):
    lines = [f"d={d} lambda={lam} count={len(points)}"]
    for row in points:
        lines.append(" ".join(str(int(c)) for c in row))
    return "\n".join(lines) + "\n"


def points_from_text(text):
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    meta = dict(kv.split("=") for kv in head)
    d = int(meta["d"])
    lam = int(meta["lambda"])
    count = int(meta["count"])
    rows = [[int(c) for c in ln.split()] for ln in lines[1:]]
    if len(rows) != count:
        raise ValueError(f"header count {count} != {len(rows)} point lines")
    pts = np.array(rows, dtype=np.int64).reshape(count, d)
    return d, lam, pts


def shell_to_text(shell):
    return points_to_text(shell.dimension, shell.radius, shell.points)


def shell_from_text(text):
    d, lam, pts = points_from_text(text)
    norms = (pts * pts).sum(axis=1)
    if len(pts) and not (norms == lam).all():
        raise ValueError("shell file contains points of the wrong squared norm")
    return SphereShell(d, lam, pts)


def ball_to_text(ball):
    return points_to_text(ball.dimension, ball.radius_squared, ball.points)


def ball_from_text(text):
    d, r2, pts = points_from_text(text)
    norms = (pts * pts).sum(axis=1)
    if len(pts) and not (norms <= r2).all():
        raise ValueError("ball file contains points outside the squared radius")
    return BallRegion(d, r2, pts)
