"""Exponent regions of the distance-graph forms, with exact rational membership.

For each catalog graph the sharp-exponent results come with a convex region of
Hoelder reciprocal tuples (1/p_1, ..., 1/p_k).  This module carries both known
descriptions of those regions -- explicit vertex lists (:func:`builtin_region`)
and guarded strict-inequality systems (:func:`builtin_halfspaces`) -- together
with exact three-way membership classification, the exponent calculators, and
a seeded cross-validation harness that checks the two descriptions against
each other point by point.

All coordinates are ``fractions.Fraction``; floats are rejected so that points
lying exactly on a facet or a guard seam are classified correctly.
"""

from __future__ import annotations

import json
import random
import re
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .errors import DimensionFloor, DimensionMismatch
from .graphs import DistanceGraph, catalog_graph
from .halfspaces import (
    GuardedInequality,
    HalfSpaceSystem,
    MembershipVerdict,
    affine_rank,
    build_system,
    facet_verdict,
    hull_facets,
    min_weight_lp,
    region_parameters,
)

__all__ = [
    "HolderPoint",
    "RegionSpec",
    "ValidationReport",
    "MembershipVerdict",
    "builtin_region",
    "builtin_halfspaces",
    "hull_membership",
    "facet_system",
    "conjectured_exponent",
    "interpolated_exponent",
    "cross_validate",
    "dimension_floor",
    "parse_rational",
    "region_to_json",
    "region_from_json",
    "load_region",
    "save_region",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)

_RATIONAL_RE = re.compile(r"^[+-]?\d+(\s*/\s*\d+)?$")


def parse_rational(value) -> Fraction:
    """Exact rational from an int, Fraction, or 'num/den' string.

    Floats and decimal strings are rejected: membership decisions are exact,
    and a float like 2/3 would silently move a boundary point off the facet.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("expected a rational number, got a bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ValueError(
            f"exact rational required, got float {value!r}; pass a Fraction or 'num/den'"
        )
    text = str(value).strip()
    if not _RATIONAL_RE.match(text):
        raise ValueError(
            f"exact rational required, got {value!r}; use forms like '3' or '2/3'"
        )
    return Fraction(text.replace(" ", ""))


def _frac_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class HolderPoint:
    """A tuple of Hoelder reciprocals (1/p_1, ..., 1/p_k), each in [0, 1]."""

    reciprocals: tuple

    def __post_init__(self):
        vals = tuple(parse_rational(c) for c in self.reciprocals)
        for c in vals:
            if not (0 <= c <= 1):
                raise ValueError(f"reciprocal {c} lies outside [0, 1]")
        object.__setattr__(self, "reciprocals", vals)

    @property
    def arity(self) -> int:
        return len(self.reciprocals)

    def __iter__(self):
        return iter(self.reciprocals)

    def __len__(self) -> int:
        return len(self.reciprocals)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.reciprocals) + ")"


@dataclass(frozen=True)
class RegionSpec:
    """A region given by the exact rational vertices of its convex hull."""

    arity: int
    vertices: tuple
    provenance: str = ""

    def __post_init__(self):
        verts = tuple(
            v if isinstance(v, HolderPoint) else HolderPoint(tuple(v))
            for v in self.vertices
        )
        if not verts:
            raise ValueError("a region needs at least one vertex")
        for v in verts:
            if v.arity != self.arity:
                raise DimensionMismatch(
                    f"vertex {v} has arity {v.arity}, region declares {self.arity}"
                )
        seen = set()
        for v in verts:
            if v.reciprocals in seen:
                raise ValueError(f"duplicate vertex {v}")
            seen.add(v.reciprocals)
        object.__setattr__(self, "vertices", verts)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)


def _coords(point, arity: Optional[int], where: str):
    """Exact coordinates from a HolderPoint or any sequence of rationals."""
    if isinstance(point, HolderPoint):
        xs = point.reciprocals
    else:
        xs = tuple(parse_rational(c) for c in point)
    if arity is not None and len(xs) != arity:
        raise DimensionMismatch(
            f"{where}: expected {arity} coordinates, got {len(xs)}"
        )
    return xs


# ---------------------------------------------------------------------------
# Builtin vertex lists.
# ---------------------------------------------------------------------------

def dimension_floor(graph) -> int:
    """Smallest dimension in which the sharp-exponent results for this graph
    hold: 2*omega + 1 for clique number omega (5 for triangle-free shapes,
    7 once a triangle is present, 2k+1 for the complete graph on k vertices).
    """
    g = graph if isinstance(graph, DistanceGraph) else catalog_graph(graph)
    return 2 * g.clique_number() + 1


def _units(k: int):
    return [
        tuple(_ONE if j == i else _ZERO for j in range(k)) for i in range(k)
    ]


def _edge_corner(k: int, edge, q: Fraction):
    """The corner with reciprocal q on both endpoints of one edge."""
    i, j = edge
    return tuple(q if t in (i, j) else _ZERO for t in range(1, k + 1))


def _extra_vertices(name: str, d: int):
    """Vertices beyond the unit points and the per-edge corners."""
    p = region_parameters(d)
    q, Q, s, z = p.q, p.Q, p.s, _ZERO
    if name == "P2":
        return [(q, s, q), (q, z, Q), (Q, z, q)]
    if name == "K3t":
        # The leading corner (0, q, 0, q) is not extreme (it lies on a
        # two-dimensional face spanned by the unit points and the two
        # stretched corners on coordinates 2 and 4) but is retained in the
        # list; hulls are unchanged and it still classifies as Boundary.
        return [
            (z, q, z, q),
            (z, q, s, q), (q, z, s, q), (s, q, z, q), (q, s, z, q),
            (z, q, z, Q), (z, Q, z, q), (q, z, z, Q), (Q, z, z, q),
        ]
    if name == "Y":
        centre = Fraction(d - 5, d + 1)
        return [
            (q, q, centre, q),
            (q, Q, z, z), (Q, q, z, z), (z, q, z, Q), (z, Q, z, q),
            (q, z, z, Q), (Q, z, z, q),
            (q, q, s, z), (z, q, s, q), (q, z, s, q),
        ]
    return []


def builtin_region(graph_name, d: int) -> RegionSpec:
    """The proved vertex list for a catalog graph in dimension d.

    Supported: P1, P2, K<k> for k >= 2, C4, C4t, K3t, Y.  Chains with three
    or more edges have no vertex list (only the guarded system of
    :func:`builtin_halfspaces` covers them).  Raises the dimension-floor
    error below the graph's proved floor.
    """
    g = graph_name if isinstance(graph_name, DistanceGraph) else catalog_graph(graph_name)
    name = g.name
    if name.startswith("P") and name[1:].isdigit() and int(name[1:]) >= 3:
        raise ValueError(
            f"no vertex list exists for {name}: chains with k >= 3 edges are "
            "covered by the guarded system only (builtin_halfspaces)"
        )
    floor = dimension_floor(g)
    if d < floor:
        raise DimensionFloor(floor, d, name)
    q = region_parameters(d).q
    k = g.vertex_count
    verts = _units(k)
    verts += [_edge_corner(k, e, q) for e in g.edges]
    verts += [tuple(v) for v in _extra_vertices(name, d)]
    return RegionSpec(
        arity=k,
        vertices=tuple(HolderPoint(v) for v in verts),
        provenance=f"{name}:d={d}",
    )


def builtin_halfspaces(name, d: int) -> HalfSpaceSystem:
    """The proved guarded strict-inequality system for ``name`` at dimension d.

    Available systems: ``P<k>`` for any chain length k >= 1, ``K3``, ``K3t``,
    and ``sphavg`` (the single averaging operator, in (1/p, 1/q) coordinates).
    """
    low = str(name).replace("_", "").replace("+", "").strip().lower()
    if low == "sphavg":
        floor, canonical = 5, "sphavg"
    elif low == "k3":
        floor, canonical = 7, "K3"
    elif low == "k3t":
        floor, canonical = 7, "K3t"
    elif low.startswith("p") and low[1:].isdigit():
        floor, canonical = 5, f"P{int(low[1:])}"
    elif low == "pk":
        raise ValueError(
            "the chain family is parametric: name a specific member, e.g. 'P2' or 'P3'"
        )
    else:
        raise ValueError(
            f"no guarded system named {name!r}; available: P<k>, K3, K3t, sphavg"
        )
    if d < floor:
        raise DimensionFloor(floor, d, canonical)
    return build_system(canonical, d)


# ---------------------------------------------------------------------------
# Membership.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _region_facets(region: RegionSpec):
    """Cached facet list, or None when the hull is not full-dimensional."""
    verts = [v.reciprocals for v in region.vertices]
    if affine_rank(verts) != region.arity:
        return None
    return hull_facets(verts)


def _lp_verdict(vertices, coords) -> MembershipVerdict:
    t = min_weight_lp(vertices, coords)
    if t is None:
        return MembershipVerdict.OUTSIDE
    return MembershipVerdict.BOUNDARY if t == 0 else MembershipVerdict.INTERIOR


def hull_membership(point, region: RegionSpec, method: str = "auto") -> MembershipVerdict:
    """Exact three-way hull membership of ``point`` in ``region``.

    Interior means a convex representation exists with every vertex weight
    strictly positive (equivalently, for a full-dimensional hull: inside and
    off every facet); Boundary means representable but only on the relative
    frontier; Outside means no convex representation exists.

    ``method`` selects the route: ``"facets"`` (precomputed facet list,
    full-dimensional hulls only), ``"feasibility"`` (exact simplex, no
    assumptions), or ``"auto"`` (facets when available).  Both routes agree
    everywhere; the choice only affects speed.
    """
    coords = _coords(point, region.arity, "hull_membership")
    if method not in ("auto", "facets", "feasibility"):
        raise ValueError(f"unknown method {method!r}")
    facets = _region_facets(region) if method in ("auto", "facets") else None
    if facets is not None:
        return facet_verdict(coords, facets)
    if method == "facets":
        raise ValueError(
            "facet route requires a full-dimensional hull; use method='feasibility'"
        )
    return _lp_verdict([v.reciprocals for v in region.vertices], coords)


def facet_system(region: RegionSpec) -> HalfSpaceSystem:
    """The region's own facets packaged as an (unguarded) half-space system.

    Cross-validating a region against its facet system is the built-in sanity
    check: the verdicts agree by construction.
    """
    facets = _region_facets(region)
    if facets is None:
        raise ValueError("facet system requires a full-dimensional hull")
    rows = tuple(GuardedInequality(coeffs, rhs) for coeffs, rhs in facets)
    return HalfSpaceSystem(
        f"{region.provenance or 'region'}-facets", region.arity, None, rows
    )


# ---------------------------------------------------------------------------
# Exponent calculators.
# ---------------------------------------------------------------------------

def conjectured_exponent(d: int, point) -> Fraction:
    """The sharp scaling exponent (d/2) * (1 - sum of reciprocals), exactly."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    coords = _coords(point, None, "conjectured_exponent")
    if not coords:
        raise ValueError("point needs at least one coordinate")
    return Fraction(d, 2) * (1 - sum(coords))


def interpolated_exponent(d: int, theta, base) -> Fraction:
    """Exponent for the interpolation between an averaging-operator bound at
    ``base`` = (1/p, 1/q) and the normalized-counting endpoint.

    With 1/p_theta = 1 - theta + theta/p and 1/q_theta = theta/q the result is
    (d/2) * (1/q_theta - 1/p_theta) + (1 - theta).  For 0 < theta < 1 the base
    must not be outside the averaging region (boundary is allowed: the sharp
    corner itself is a legitimate base).  theta = 1 returns the pure operator
    exponent (d/2) * (1/q - 1/p); theta = 0 returns the mass-only endpoint
    -(d-2)/2 for any base.
    """
    th = parse_rational(theta)
    if not (0 <= th <= 1):
        raise ValueError(f"theta must lie in [0, 1], got {th}")
    u, w = _coords(base, 2, "interpolated_exponent")
    if 0 < th < 1:
        verdict = builtin_halfspaces("sphavg", d).verdict((u, w))
        if verdict is MembershipVerdict.OUTSIDE:
            raise ValueError(
                f"base point ({u}, {w}) is outside the averaging region at d={d}"
            )
    recip_p = 1 - th + th * u
    recip_q = th * w
    return Fraction(d, 2) * (recip_q - recip_p) + (1 - th)


# ---------------------------------------------------------------------------
# Cross-validation.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    """Outcome of comparing hull membership against a guarded system."""

    region_provenance: str
    system_name: Optional[str]
    arity: int
    samples: int
    seed: int
    interior_count: int
    boundary_count: int
    outside_count: int
    strict_disagreements: tuple
    three_way_disagreements: tuple
    elapsed_seconds: float

    @property
    def hull_only(self) -> bool:
        return self.system_name is None

    @property
    def strict_disagreement_count(self) -> int:
        return len(self.strict_disagreements)

    @property
    def three_way_disagreement_count(self) -> int:
        return len(self.three_way_disagreements)

    @property
    def agreed(self) -> bool:
        return self.strict_disagreement_count == 0

    def summary(self) -> str:
        head = (
            f"{self.region_provenance or 'region'}"
            + (f" vs {self.system_name}" if self.system_name else " (hull only)")
        )
        tail = (
            f"interior={self.interior_count} boundary={self.boundary_count} "
            f"outside={self.outside_count}"
        )
        if self.hull_only:
            return f"{head}: {self.samples} samples, {tail}"
        return (
            f"{head}: {self.samples} samples, {tail}, "
            f"strict disagreements={self.strict_disagreement_count}, "
            f"three-way disagreements={self.three_way_disagreement_count}"
        )

    def to_json(self) -> str:
        def points(pts):
            return [[_frac_str(c) for c in p] for p in pts]

        return json.dumps(
            {
                "region": self.region_provenance,
                "system": self.system_name,
                "arity": self.arity,
                "samples": self.samples,
                "seed": self.seed,
                "hull_verdicts": {
                    "interior": self.interior_count,
                    "boundary": self.boundary_count,
                    "outside": self.outside_count,
                },
                "strict_disagreement_count": self.strict_disagreement_count,
                "three_way_disagreement_count": self.three_way_disagreement_count,
                "strict_disagreements": points(self.strict_disagreements),
                "three_way_disagreements": points(self.three_way_disagreements),
                "elapsed_seconds": self.elapsed_seconds,
            },
            indent=2,
        )


def _sample_coordinates(rng: random.Random, arity: int):
    """One jittered rational sample: k/D with D <= 64, shifted by +-1/1024.

    The grid covers [0, 1] and the jitter pushes points slightly across
    facets and guard seams in both directions, so boundary handling is
    exercised without ever landing on a float round-off artifact.
    """
    out = []
    for _ in range(arity):
        den = rng.randint(1, 64)
        num = rng.randint(0, den)
        sign = rng.choice((-1, 1))
        out.append(Fraction(num, den) + Fraction(sign, 1024))
    return tuple(out)


def cross_validate(
    region: RegionSpec,
    system: Optional[HalfSpaceSystem] = None,
    samples: int = 1000,
    seed: int = 1,
) -> ValidationReport:
    """Classify seeded rational samples by hull and by system, and report
    every disagreement.

    The essential comparison is strict: hull-Interior must coincide with
    strict satisfaction of every active system inequality.  The full
    three-way verdicts are compared as well.  With ``system=None`` (the
    graphs that come with a vertex list but no proved system) only the hull
    verdict tallies are produced.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if system is not None and system.arity != region.arity:
        raise DimensionMismatch(
            f"region arity {region.arity} != system arity {system.arity}"
        )
    rng = random.Random(seed)
    facets = _region_facets(region)
    verts = [v.reciprocals for v in region.vertices]
    counts = {v: 0 for v in MembershipVerdict}
    strict = []
    threeway = []
    started = time.perf_counter()
    for _ in range(samples):
        x = _sample_coordinates(rng, region.arity)
        if facets is not None:
            hv = facet_verdict(x, facets)
        else:
            hv = _lp_verdict(verts, x)
        counts[hv] += 1
        if system is not None:
            sv = system.verdict(x)
            hull_strict = hv is MembershipVerdict.INTERIOR
            sys_strict = sv is MembershipVerdict.INTERIOR
            if hull_strict != sys_strict:
                strict.append(x)
            if hv is not sv:
                threeway.append(x)
    return ValidationReport(
        region_provenance=region.provenance,
        system_name=system.name if system is not None else None,
        arity=region.arity,
        samples=samples,
        seed=seed,
        interior_count=counts[MembershipVerdict.INTERIOR],
        boundary_count=counts[MembershipVerdict.BOUNDARY],
        outside_count=counts[MembershipVerdict.OUTSIDE],
        strict_disagreements=tuple(strict),
        three_way_disagreements=tuple(threeway),
        elapsed_seconds=time.perf_counter() - started,
    )


# ---------------------------------------------------------------------------
# Serialization.
# ---------------------------------------------------------------------------

def region_to_json(region: RegionSpec) -> str:
    """JSON form: {"arity": k, "vertices": [["num/den", ...], ...], "provenance": ...}."""
    obj = {
        "arity": region.arity,
        "vertices": [
            [_frac_str(c) for c in v.reciprocals] for v in region.vertices
        ],
        "provenance": region.provenance,
    }
    return json.dumps(obj, indent=2)


def region_from_json(text: str) -> RegionSpec:
    obj = json.loads(text)
    verts = tuple(
        HolderPoint(tuple(parse_rational(c) for c in row))
        for row in obj["vertices"]
    )
    return RegionSpec(
        arity=int(obj["arity"]),
        vertices=verts,
        provenance=str(obj.get("provenance", "")),
    )


def save_region(region: RegionSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(region_to_json(region) + "\n")


def load_region(path) -> RegionSpec:
    with open(path, "r", encoding="utf-8") as handle:
        return region_from_json(handle.read())
