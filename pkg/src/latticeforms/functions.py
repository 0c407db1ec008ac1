"""Finitely supported real functions on Z^d and their exact l^p norms.

This module provides the raw material for every form evaluation: a compact
array-backed representation of a finitely supported function, generators for
the standard test functions (ball and sphere indicators, the delta at the
origin, an all-ones box), l^p norms with exact rational exponents, and the
JSON file format used by the CLI.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .counting import orbit_size
from .errors import CapacityError, DimensionMismatch
from .lattice import (
    DEFAULT_BUDGET,
    encode_points,
    enumerate_ball,
    enumerate_sphere,
)

__all__ = [
    "FunctionOnLattice",
    "TestFunctionSpec",
    "materialize",
    "lp_norm",
    "conjugate",
    "floor_rational_power",
    "function_to_json",
    "function_from_json",
    "load_function",
    "save_function",
]

_KEY_LIMIT = 2**62


def _lex_order(points: np.ndarray) -> np.ndarray:
    """Indices that sort rows lexicographically (first coordinate primary)."""
    return np.lexsort(points.T[::-1])


@dataclass
class FunctionOnLattice:
    """A finitely supported function Z^d -> R, stored as sorted point rows.

    ``points`` holds the support as an (n, d) int64 array in lexicographic
    order; ``values`` holds the matching real values.  Zero values are pruned
    on construction, so the support is exactly the set of nonzero entries.

    Two optional hints speed up downstream evaluation and are set only by the
    generators that can guarantee them:

    - ``symmetric``: the function is invariant under all coordinate
      permutations and sign changes (true for balls, shells, the delta, and
      centered boxes).
    - ``norm_support``: the support is a norm-defined set — ``('ball', r2)``
      for {|x|^2 <= r2}, ``('shell', lam)`` for {|x|^2 = lam}, ``('delta',)``
      for {0}, ``('box', h)`` for [-h, h]^d — with all values equal to the
      first value (an indicator up to scale).
    """

    dimension: int
    points: np.ndarray
    values: np.ndarray
    symmetric: bool = False
    norm_support: tuple | None = None
    _keys: np.ndarray | None = field(default=None, repr=False, compare=False)
    _base: int = field(default=0, repr=False, compare=False)
    _offset: int = field(default=0, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.points = np.ascontiguousarray(self.points, dtype=np.int64)
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.points.ndim != 2 or self.points.shape[1] != self.dimension:
            raise DimensionMismatch(
                f"support rows have shape {self.points.shape}, "
                f"expected (*, {self.dimension})"
            )
        if len(self.values) != len(self.points):
            raise ValueError("points and values must have equal length")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_entries(
        cls,
        dimension: int,
        entries: Iterable[tuple[Sequence[int], float]] | Mapping,
        **hints,
    ) -> "FunctionOnLattice":
        """Build from (point, value) pairs; sorts, prunes zeros, rejects
        duplicate points."""
        if isinstance(entries, Mapping):
            entries = entries.items()
        pairs = [(tuple(int(c) for c in p), float(v)) for p, v in entries]
        pairs = [(p, v) for p, v in pairs if v != 0.0]
        if not pairs:
            return cls.empty(dimension, **hints)
        pts = np.array([p for p, _ in pairs], dtype=np.int64)
        vals = np.array([v for _, v in pairs], dtype=np.float64)
        if pts.shape[1] != dimension:
            raise DimensionMismatch(
                f"points have {pts.shape[1]} coordinates, expected {dimension}"
            )
        order = _lex_order(pts)
        pts, vals = pts[order], vals[order]
        if len(pts) > 1 and bool(np.any(np.all(pts[1:] == pts[:-1], axis=1))):
            raise ValueError("duplicate support points")
        return cls(dimension, pts, vals, **hints)

    @classmethod
    def from_sorted_arrays(
        cls, dimension: int, points: np.ndarray, values: np.ndarray, **hints
    ) -> "FunctionOnLattice":
        """Trusting constructor for internal callers that already hold a
        lexicographically sorted, duplicate-free support."""
        values = np.ascontiguousarray(values, dtype=np.float64)
        nz = values != 0.0
        if not nz.all():
            points, values = points[nz], values[nz]
        return cls(dimension, points, values, **hints)

    @classmethod
    def empty(cls, dimension: int, **hints) -> "FunctionOnLattice":
        return cls(
            dimension,
            np.zeros((0, dimension), dtype=np.int64),
            np.zeros(0, dtype=np.float64),
            **hints,
        )

    @classmethod
    def delta(cls, dimension: int, point: Sequence[int] | None = None) -> "FunctionOnLattice":
        """The indicator of a single point (the origin by default)."""
        if point is None:
            point = [0] * dimension
        at_origin = all(c == 0 for c in point)
        return cls(
            dimension,
            np.array([point], dtype=np.int64),
            np.ones(1),
            symmetric=at_origin,
            norm_support=("delta",) if at_origin else None,
        )

    @classmethod
    def indicator(cls, points: np.ndarray, dimension: int, **hints) -> "FunctionOnLattice":
        return cls(dimension, points, np.ones(len(points)), **hints)

    # -- basic queries ----------------------------------------------------

    @property
    def support_size(self) -> int:
        return len(self.points)

    def mass(self) -> float:
        return float(self.values.sum())

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {tuple(int(c) for c in p): float(v) for p, v in zip(self.points, self.values)}

    def is_indicator(self) -> bool:
        return self.support_size > 0 and bool(np.all(self.values == self.values[0]))

    # -- membership / lookup ----------------------------------------------

    def _ensure_index(self) -> None:
        if self._keys is not None:
            return
        if self.support_size == 0:
            self._offset, self._base = 1, 3
            self._keys = np.zeros(0, dtype=np.int64)
            return
        offset = int(np.abs(self.points).max()) + 1
        base = 2 * offset + 1
        if base**self.dimension >= _KEY_LIMIT:
            raise CapacityError(base**self.dimension, _KEY_LIMIT, what="encoding keys")
        self._offset, self._base = offset, base
        keys = encode_points(self.points, base, offset)
        # lexicographic row order makes the Horner keys strictly increasing
        self._keys = keys

    def values_at(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized lookup; points outside the support return 0."""
        self._ensure_index()
        pts = np.asarray(pts, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise DimensionMismatch(
                f"query rows have shape {pts.shape}, expected (*, {self.dimension})"
            )
        out = np.zeros(len(pts), dtype=np.float64)
        if self.support_size == 0 or len(pts) == 0:
            return out
        in_range = np.all(np.abs(pts) <= self._offset - 1, axis=1)
        if not in_range.any():
            return out
        sub = pts[in_range]
        keys = encode_points(sub, self._base, self._offset)
        pos = np.searchsorted(self._keys, keys)
        pos[pos >= len(self._keys)] = 0
        hit = self._keys[pos] == keys
        vals = np.zeros(len(sub), dtype=np.float64)
        vals[hit] = self.values[pos[hit]]
        out[in_range] = vals
        return out

    def value_at(self, point: Sequence[int]) -> float:
        return float(self.values_at(np.array([point], dtype=np.int64))[0])

    def contains(self, pts: np.ndarray) -> np.ndarray:
        """Boolean membership mask for query rows."""
        return self.values_at(pts) != 0.0

    # -- symmetry detection ------------------------------------------------

    def check_signed_permutation_invariance(self) -> bool:
        """True when the function is invariant under all coordinate
        permutations and sign flips.  Cheap for generator-built functions
        (the flag is trusted); otherwise verified by grouping the support
        into orbits of sorted absolute coordinates and checking that each
        orbit is complete and carries a constant value."""
        if self.symmetric:
            return True
        if self.support_size == 0:
            return True
        canon = -np.sort(-np.abs(self.points), axis=1)  # descending |coords|
        order = _lex_order(canon)
        canon, vals = canon[order], self.values[order]
        change = np.any(canon[1:] != canon[:-1], axis=1)
        starts = np.concatenate(([0], np.nonzero(change)[0] + 1, [len(canon)]))
        for a, b in zip(starts[:-1], starts[1:]):
            rep = tuple(int(c) for c in canon[a])
            if b - a != orbit_size(rep, self.dimension):
                return False
            if not np.all(vals[a:b] == vals[a]):
                return False
        return True


# ---------------------------------------------------------------------------
# test-function specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunctionSpec:
    """A recipe that materializes to a concrete function once a dimension and
    radius parameter are chosen.

    Kinds:
      - ``ball``: indicator of {|x|^2 <= floor(lambda^a)} for a rational
        scale exponent ``a`` (default 1, i.e. radius lambda^{1/2});
      - ``sphere``: indicator of the shell {|x|^2 = lambda};
      - ``delta``: indicator of the origin;
      - ``ones``: all-ones on the box [-half_width, half_width]^d;
      - ``file``: loaded from a function JSON file;
      - ``fixed``: wraps an already-materialized function (ignores d, lambda).
    """

    kind: str
    scale_exponent: Fraction | float = Fraction(1)
    half_width: int = 0
    path: str = ""
    fn: FunctionOnLattice | None = None

    @staticmethod
    def Ball(scale_exponent: Fraction | float | str = Fraction(1)) -> "TestFunctionSpec":
        if isinstance(scale_exponent, str):
            scale_exponent = Fraction(scale_exponent)
        if isinstance(scale_exponent, int):
            scale_exponent = Fraction(scale_exponent)
        return TestFunctionSpec("ball", scale_exponent=scale_exponent)

    @staticmethod
    def SphereIndicator() -> "TestFunctionSpec":
        return TestFunctionSpec("sphere")

    @staticmethod
    def DeltaAtOrigin() -> "TestFunctionSpec":
        return TestFunctionSpec("delta")

    @staticmethod
    def AllOnesBox(half_width: int) -> "TestFunctionSpec":
        if half_width < 0:
            raise ValueError("half_width must be non-negative")
        return TestFunctionSpec("ones", half_width=int(half_width))

    @staticmethod
    def Custom(path: str) -> "TestFunctionSpec":
        return TestFunctionSpec("file", path=str(path))

    @staticmethod
    def Fixed(fn: FunctionOnLattice) -> "TestFunctionSpec":
        return TestFunctionSpec("fixed", fn=fn)

    def describe(self) -> str:
        if self.kind == "ball":
            a = self.scale_exponent
            return "ball" if a == 1 else f"ball:a={a}"
        if self.kind == "ones":
            return f"ones:{self.half_width}"
        if self.kind == "file":
            return f"file:{self.path}"
        if self.kind == "fixed":
            return "fixed"
        return self.kind


def floor_rational_power(n: int, a: Fraction | float) -> int:
    """floor(n^a) for non-negative integer n.

    Rational exponents are evaluated exactly: with a = p/q in lowest terms,
    the result is the integer q-th root of n^p.  Float exponents fall back
    to floating point with downward rounding.
    """
    if n < 0:
        raise ValueError("base must be non-negative")
    if isinstance(a, float) and not a.is_integer():
        return math.floor(n**a)
    a = Fraction(a)
    if a < 0:
        raise ValueError("exponent must be non-negative")
    num, den = a.numerator, a.denominator
    power = n**num
    if den == 1:
        return power
    # integer den-th root of power via Newton iteration on exact ints
    if power == 0:
        return 0
    r = int(round(power ** (1.0 / den)))
    r = max(r, 1)
    while r**den > power:
        r -= 1
    while (r + 1) ** den <= power:
        r += 1
    return r


def materialize(
    spec: TestFunctionSpec, d: int, lam: int, budget: int = DEFAULT_BUDGET
) -> FunctionOnLattice:
    """Realize a test-function recipe at a concrete dimension and radius."""
    if spec.kind == "fixed":
        if spec.fn is None:
            raise ValueError("fixed spec carries no function")
        if spec.fn.dimension != d:
            raise DimensionMismatch(
                f"fixed function has dimension {spec.fn.dimension}, expected {d}"
            )
        return spec.fn
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if spec.kind == "ball":
        r2 = floor_rational_power(lam, spec.scale_exponent)
        region = enumerate_ball(d, r2, budget=budget)
        return FunctionOnLattice.indicator(
            region.points, d, symmetric=True, norm_support=("ball", r2)
        )
    if spec.kind == "sphere":
        shell = enumerate_sphere(d, lam, budget=budget)
        return FunctionOnLattice.indicator(
            shell.points, d, symmetric=True, norm_support=("shell", lam)
        )
    if spec.kind == "delta":
        return FunctionOnLattice.delta(d)
    if spec.kind == "ones":
        h = spec.half_width
        side = 2 * h + 1
        if side**d > budget:
            raise CapacityError(side**d, budget, what="box points")
        axes = [np.arange(-h, h + 1, dtype=np.int64)] * d
        grid = np.meshgrid(*axes, indexing="ij")
        pts = np.stack(grid, axis=-1).reshape(-1, d)
        return FunctionOnLattice.indicator(
            pts, d, symmetric=True, norm_support=("box", h)
        )
    if spec.kind == "file":
        fn = load_function(spec.path)
        if fn.dimension != d:
            raise DimensionMismatch(
                f"function file has dimension {fn.dimension}, expected {d}"
            )
        return fn
    raise ValueError(f"unknown test-function kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# norms and Holder exponents
# ---------------------------------------------------------------------------

INFINITY = math.inf


def _exponent_value(p) -> float:
    if p == INFINITY or (isinstance(p, str) and p.lower() in ("inf", "infinity")):
        return INFINITY
    if isinstance(p, str):
        p = Fraction(p)
    return float(p)


def lp_norm(f: FunctionOnLattice, p) -> float:
    """The l^p norm (sum |f|^p)^(1/p); max |f| when p is infinite.

    ``p`` may be a Fraction, int, float, the string "inf", or math.inf;
    finite exponents must exceed 1.
    """
    pv = _exponent_value(p)
    if pv != INFINITY and pv <= 1:
        raise ValueError(f"exponent must lie in (1, inf], got {p}")
    if f.support_size == 0:
        return 0.0
    absvals = np.abs(f.values)
    if pv == INFINITY:
        return float(absvals.max())
    if f.is_indicator() and f.values[0] == 1.0:
        return float(f.support_size) ** (1.0 / pv)
    return float(np.sum(absvals**pv)) ** (1.0 / pv)


def conjugate(p) -> Fraction | float:
    """The dual exponent p' with 1/p + 1/p' = 1, computed exactly.

    conjugate(inf) = 1, which sits on the boundary of the open range the
    finite-exponent results use.
    """
    pv = _exponent_value(p)
    if pv == INFINITY:
        return Fraction(1)
    frac = Fraction(p) if not isinstance(p, Fraction) else p
    if frac <= 1:
        raise ValueError(f"exponent must lie in (1, inf], got {p}")
    return frac / (frac - 1)


# ---------------------------------------------------------------------------
# JSON file format: {"dimension": d, "entries": [{"point": [...], "value": v}]}
# ---------------------------------------------------------------------------


def function_to_json(f: FunctionOnLattice) -> dict:
    return {
        "dimension": f.dimension,
        "entries": [
            {"point": [int(c) for c in p], "value": float(v)}
            for p, v in zip(f.points, f.values)
        ],
    }


def function_from_json(obj: dict) -> FunctionOnLattice:
    if not isinstance(obj, dict) or "dimension" not in obj or "entries" not in obj:
        raise ValueError("function JSON must have 'dimension' and 'entries'")
    d = int(obj["dimension"])
    if d < 1:
        raise ValueError("dimension must be positive")
    entries = []
    for e in obj["entries"]:
        point = e["point"]
        if len(point) != d:
            raise DimensionMismatch(
                f"entry point {point} has {len(point)} coordinates, expected {d}"
            )
        entries.append((point, e["value"]))
    return FunctionOnLattice.from_entries(d, entries)


def load_function(path: str) -> FunctionOnLattice:
    with open(path, "r", encoding="utf-8") as fh:
        return function_from_json(json.load(fh))


def save_function(f: FunctionOnLattice, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(function_to_json(f), fh, indent=1)
        fh.write("\n")
