"""Exact rational half-space machinery for the exponent regions.

Everything here works over ``fractions.Fraction`` end to end: the guarded
strict-inequality systems that describe the proved regions, facet enumeration
for full-dimensional hulls, and an exact two-phase simplex used to decide hull
membership.  No floats enter any decision, so points exactly on a facet or on
a guard seam are classified correctly.

Coordinates throughout are Hoelder reciprocals x_i = 1/p_i.  The recurring
constants of the d-dimensional systems are collected in
:func:`region_parameters`.
"""

from __future__ import annotations

import enum
import itertools
from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Optional, Sequence

__all__ = [
    "MembershipVerdict",
    "GuardedInequality",
    "HalfSpaceSystem",
    "RegionParameters",
    "region_parameters",
    "build_system",
    "SYSTEM_NAMES",
    "hull_facets",
    "facet_verdict",
    "affine_rank",
    "min_weight_lp",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class MembershipVerdict(enum.Enum):
    """Three-way classification of a point against a region.

    ``INTERIOR`` means every active strict inequality holds strictly (for a
    hull: inside and off every facet), ``BOUNDARY`` means nothing is violated
    but at least one active condition is tight, ``OUTSIDE`` means some active
    condition is strictly violated.  Only ``INTERIOR`` is guaranteed by the
    strict systems; the boundary verdict is reported separately so callers
    never over-claim.
    """

    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"

    def __str__(self) -> str:
        return self.value


def _classify(slacks) -> MembershipVerdict:
    """Verdict from the slacks of the active rows (requirement: slack < 0)."""
    tight = False
    for s in slacks:
        if s > 0:
            return MembershipVerdict.OUTSIDE
        if s == 0:
            tight = True
    return MembershipVerdict.BOUNDARY if tight else MembershipVerdict.INTERIOR


RegionParameters = namedtuple("RegionParameters", "q Q s c2 ch")
RegionParameters.__doc__ = """The rational constants recurring in every system.

q  = (d-1)/(d+1)   corner reciprocal (each pair-corner vertex sits at q),
Q  = (d^2-5)/(d^2-1)  the stretched corner appearing on tail coordinates,
s  = (d-3)/(d+1)   the slack coordinate of the off-corner vertices,
c2 = 2/(d-1)       small-coefficient weight of the flat conditions,
ch = (d-1)/2       steep-coefficient weight of the conditions past a corner.
"""


def region_parameters(d: int) -> RegionParameters:
    """Exact rational constants used by the d-dimensional systems."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return RegionParameters(
        q=Fraction(d - 1, d + 1),
        Q=Fraction(d * d - 5, (d - 1) * (d + 1)),
        s=Fraction(d - 3, d + 1),
        c2=Fraction(2, d - 1),
        ch=Fraction(d - 1, 2),
    )


def _term_text(coeff: Fraction, name: str) -> str:
    if coeff == 1:
        return name
    if coeff == -1:
        return f"-{name}"
    return f"({coeff})*{name}"


def _row_text(coeffs: Sequence[Fraction], rhs: Fraction) -> str:
    terms = [_term_text(c, f"x{i + 1}") for i, c in enumerate(coeffs) if c != 0]
    lhs = " + ".join(terms).replace("+ -", "- ") if terms else "0"
    return f"{lhs} < {rhs}"


@dataclass(frozen=True, eq=False)
class GuardedInequality:
    """One strict condition ``coeffs . x < rhs``, active only when the guard holds.

    ``guard`` is an exact predicate on the point (``None`` means always
    active); ``guard_text`` is its human-readable form.  ``slack`` returns
    ``coeffs . x - rhs`` as a Fraction, so the requirement is ``slack < 0``.
    """

    coeffs: tuple
    rhs: Fraction
    guard: Optional[Callable] = None
    guard_text: str = ""
    label: str = field(default="")

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))
        if not self.label:
            text = _row_text(self.coeffs, self.rhs)
            if self.guard_text:
                text += f"  when  {self.guard_text}"
            object.__setattr__(self, "label", text)

    def active(self, x) -> bool:
        return self.guard is None or bool(self.guard(x))

    def slack(self, x) -> Fraction:
        return sum((c * xi for c, xi in zip(self.coeffs, x)), -self.rhs)


def _box_rows(arity: int):
    """The open-box conditions 0 < x_i < 1."""
    rows = []
    for i in range(arity):
        low = tuple(-_ONE if j == i else _ZERO for j in range(arity))
        rows.append(GuardedInequality(low, _ZERO, label=f"0 < x{i + 1}"))
        high = tuple(_ONE if j == i else _ZERO for j in range(arity))
        rows.append(GuardedInequality(high, _ONE, label=f"x{i + 1} < 1"))
    return rows


def _sum_row(arity: int) -> GuardedInequality:
    """The scaling hypothesis sum(x_i) > 1, written as -sum(x) < -1."""
    coeffs = tuple(-_ONE for _ in range(arity))
    names = " + ".join(f"x{i + 1}" for i in range(arity))
    return GuardedInequality(coeffs, -_ONE, label=f"{names} > 1")


@dataclass(frozen=True, eq=False)
class HalfSpaceSystem:
    """A guarded strict-inequality description of one exponent region.

    ``rows`` are evaluated with exact rational arithmetic; inactive guards are
    skipped entirely.  ``verdict`` gives the three-way classification and
    ``strictly_satisfied`` the strict (theorem-guaranteed) membership test.
    """

    name: str
    arity: int
    dimension: Optional[int]  # None for systems not tied to a dimension (facet systems)
    rows: tuple

    def _coords(self, x):
        xs = tuple(Fraction(v) for v in x)
        if len(xs) != self.arity:
            raise ValueError(
                f"system {self.name} has arity {self.arity}, got point of length {len(xs)}"
            )
        return xs

    def active_slacks(self, x):
        """(row, slack) for every active row at x."""
        xs = self._coords(x)
        return [(row, row.slack(xs)) for row in self.rows if row.active(xs)]

    def verdict(self, x) -> MembershipVerdict:
        xs = self._coords(x)
        return _classify(row.slack(xs) for row in self.rows if row.active(xs))

    def strictly_satisfied(self, x) -> bool:
        return self.verdict(x) is MembershipVerdict.INTERIOR

    def perturbed(self, row_index: Optional[int] = None,
                  delta: Fraction = Fraction(1, 64)) -> "HalfSpaceSystem":
        """Copy of the system with one coefficient bumped by ``delta``.

        Used as a sanity probe: cross-validating a hull against a perturbed
        system must produce disagreements.  By default the first guarded row
        (the first substantive condition) has its first nonzero coefficient
        bumped.
        """
        rows = list(self.rows)
        if row_index is None:
            row_index = next(
                (i for i, r in enumerate(rows) if r.guard is not None), 0
            )
        row = rows[row_index]
        coeffs = list(row.coeffs)
        j = next((k for k, c in enumerate(coeffs) if c != 0), 0)
        coeffs[j] = coeffs[j] + Fraction(delta)
        rows[row_index] = GuardedInequality(
            tuple(coeffs), row.rhs, row.guard, row.guard_text,
            label=row.label + " [perturbed]",
        )
        return HalfSpaceSystem(self.name + "-perturbed", self.arity,
                               self.dimension, tuple(rows))


# ---------------------------------------------------------------------------
# The proved guarded systems.
# ---------------------------------------------------------------------------

def _chain_rows(k: int, d: int):
    """Path with k edges on k+1 vertices; conditions depend on u = x1,
    the middle mass x2, and the far mass v = x3 + ... + x_{k+1}."""
    p = region_parameters(d)
    arity = k + 1
    q, c2, ch = p.q, p.c2, p.ch

    def u_of(x):
        return x[0]

    def v_of(x):
        return sum(x[2:], _ZERO)

    def vec(cu, c_mid, cv):
        return (cu, c_mid) + tuple(cv for _ in range(arity - 2))

    rows = _box_rows(arity) + [_sum_row(arity)]
    u_txt, v_txt = "x1", "x3 + ... + x%d" % arity if arity > 3 else "x3"
    if arity == 2:
        # Single edge: the far mass is empty, so only the u-guards survive.
        rows.append(GuardedInequality(
            (c2, _ONE), _ONE,
            guard=lambda x: x[0] <= q, guard_text=f"{u_txt} <= {q}"))
        rows.append(GuardedInequality(
            (ch, _ONE), ch,
            guard=lambda x: x[0] > q, guard_text=f"{u_txt} > {q}"))
        return tuple(rows)
    rows.append(GuardedInequality(
        vec(c2, _ONE, c2), _ONE,
        guard=lambda x: u_of(x) <= q and v_of(x) <= q,
        guard_text=f"{u_txt} <= {q} and {v_txt} <= {q}"))
    rows.append(GuardedInequality(
        vec(ch, _ONE, c2), ch,
        guard=lambda x: u_of(x) > q >= v_of(x),
        guard_text=f"{u_txt} > {q} >= {v_txt}"))
    rows.append(GuardedInequality(
        vec(c2, _ONE, ch), ch,
        guard=lambda x: v_of(x) > q >= u_of(x),
        guard_text=f"{v_txt} > {q} >= {u_txt}"))
    rows.append(GuardedInequality(
        vec(_ONE, c2, _ONE), 2 - c2,
        guard=lambda x: u_of(x) > q and v_of(x) > q,
        guard_text=f"{u_txt} > {q} and {v_txt} > {q}"))
    return tuple(rows)


def _triangle_rows(d: int):
    """Triangle on three vertices; cases split on x1, x2 and x1 + x2."""
    p = region_parameters(d)
    q, c2 = p.q, p.c2
    rows = _box_rows(3) + [_sum_row(3)]
    rows.append(GuardedInequality(
        (c2, c2, _ONE), _ONE,
        guard=lambda x: x[0] + x[1] <= q, guard_text=f"x1 + x2 <= {q}"))
    rows.append(GuardedInequality(
        (c2, _ONE, c2), _ONE,
        guard=lambda x: x[1] >= q, guard_text=f"x2 >= {q}"))
    rows.append(GuardedInequality(
        (_ONE, c2, c2), _ONE,
        guard=lambda x: x[0] >= q, guard_text=f"x1 >= {q}"))
    rows.append(GuardedInequality(
        (_ONE, _ONE, _ONE), 2 * q,
        guard=lambda x: x[0] <= q and x[1] <= q and x[0] + x[1] >= q,
        guard_text=f"x1 <= {q}, x2 <= {q}, x1 + x2 >= {q}"))
    return tuple(rows)


def _triangle_tail_rows(d: int):
    """Triangle with a pendant vertex x4; the triangle cases of
    :func:`_triangle_rows` acquire an x4 term whose weight switches at x4 = q."""
    p = region_parameters(d)
    q, c2, ch = p.q, p.c2, p.ch
    rows = _box_rows(4) + [_sum_row(4)]
    low = f"x4 < {q}"
    high = f"x4 >= {q}"
    rows.append(GuardedInequality(
        (c2, c2, _ONE, c2), _ONE,
        guard=lambda x: x[3] < q and x[0] + x[1] <= q,
        guard_text=f"{low} and x1 + x2 <= {q}"))
    rows.append(GuardedInequality(
        (c2, _ONE, c2, c2 * c2), _ONE,
        guard=lambda x: x[3] < q and x[1] >= q,
        guard_text=f"{low} and x2 >= {q}"))
    rows.append(GuardedInequality(
        (_ONE, c2, c2, c2 * c2), _ONE,
        guard=lambda x: x[3] < q and x[0] >= q,
        guard_text=f"{low} and x1 >= {q}"))
    rows.append(GuardedInequality(
        (_ONE, _ONE, _ONE, c2), 2 * q,
        guard=lambda x: x[3] < q and x[0] <= q and x[1] <= q and x[0] + x[1] >= q,
        guard_text=f"{low} and x1 <= {q}, x2 <= {q}, x1 + x2 >= {q}"))
    rows.append(GuardedInequality(
        (c2, c2, _ONE, ch), ch,
        guard=lambda x: x[3] >= q and x[0] + x[1] <= q,
        guard_text=f"{high} and x1 + x2 <= {q}"))
    rows.append(GuardedInequality(
        (c2, _ONE, c2, _ONE), 2 - c2,
        guard=lambda x: x[3] >= q and x[1] >= q,
        guard_text=f"{high} and x2 >= {q}"))
    rows.append(GuardedInequality(
        (_ONE, c2, c2, _ONE), 2 - c2,
        guard=lambda x: x[3] >= q and x[0] >= q,
        guard_text=f"{high} and x1 >= {q}"))
    rows.append(GuardedInequality(
        (_ONE, _ONE, _ONE, ch), 2 * q + Fraction(d - 3, 2),
        guard=lambda x: x[3] >= q and x[0] <= q and x[1] <= q and x[0] + x[1] >= q,
        guard_text=f"{high} and x1 <= {q}, x2 <= {q}, x1 + x2 >= {q}"))
    return tuple(rows)


def _averaging_rows(d: int):
    """Improving region of the single spherical averaging operator, in the
    coordinates (1/p, 1/q) of the mapping l^p -> l^q."""
    p = region_parameters(d)
    q, c2, ch = p.q, p.c2, p.ch
    rows = list(_box_rows(2))
    rows.append(GuardedInequality((-_ONE, _ONE), _ZERO, label="x2 < x1"))
    rows.append(GuardedInequality(
        (c2, -_ONE), _ZERO,
        guard=lambda x: x[0] < q, guard_text=f"x1 < {q}"))
    rows.append(GuardedInequality(
        (ch, -_ONE), ch - _ONE,
        guard=lambda x: x[0] >= q, guard_text=f"x1 >= {q}"))
    return tuple(rows)


SYSTEM_NAMES = ("P1", "P2", "K3", "K3t", "sphavg")


def build_system(name: str, d: int) -> HalfSpaceSystem:
    """The guarded system for ``name`` in dimension d (no floor checking here).

    Recognized names: ``P<k>`` for any chain length k >= 1 (``P2`` is the
    two-edge chain), ``K3``, ``K3t``, and ``sphavg`` (the operator region in
    (1/p, 1/q) coordinates).
    """
    label = name.replace("_", "").replace("+", "").strip()
    low = label.lower()
    if low == "k3":
        return HalfSpaceSystem("K3", 3, d, _triangle_rows(d))
    if low == "k3t":
        return HalfSpaceSystem("K3t", 4, d, _triangle_tail_rows(d))
    if low == "sphavg":
        return HalfSpaceSystem("sphavg", 2, d, _averaging_rows(d))
    if low.startswith("p") and low[1:].isdigit():
        k = int(low[1:])
        if k < 1:
            raise ValueError("chain systems need k >= 1")
        return HalfSpaceSystem(f"P{k}", k + 1, d, _chain_rows(k, d))
    if low == "pk":
        raise ValueError(
            "the chain family is parametric: name a specific member, e.g. 'P2' or 'P3'"
        )
    raise ValueError(
        f"unknown system {name!r}; available: P<k>, K3, K3t, sphavg"
    )


# ---------------------------------------------------------------------------
# Exact facet enumeration for full-dimensional hulls.
# ---------------------------------------------------------------------------

def affine_rank(vertices) -> int:
    """Dimension of the affine span of the given rational points."""
    vs = [tuple(Fraction(c) for c in v) for v in vertices]
    if len(vs) <= 1:
        return 0
    base = vs[0]
    rows = [[c - b for c, b in zip(v, base)] for v in vs[1:]]
    n = len(base)
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        pivval = pr[col]
        rows[rank] = [x / pivval for x in pr]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def _null_vector(rows, n):
    """Spanning vector of the null space of an (n-1) x n rational matrix,
    or None when the rank is below n-1 (degenerate subset)."""
    mat = [list(r) for r in rows]
    m = len(mat)
    piv_cols = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(m):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    if r != n - 1:
        return None
    free = next(c for c in range(n) if c not in piv_cols)
    v = [_ZERO] * n
    v[free] = _ONE
    for i, c in enumerate(piv_cols):
        v[c] = -mat[i][free]
    return tuple(v)


def _canonical_halfspace(coeffs, rhs):
    """Scale (coeffs, rhs) to coprime integers, preserving orientation."""
    den = 1
    for x in list(coeffs) + [rhs]:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in coeffs]
    ir = int(rhs * den)
    g = 0
    for x in ints + [ir]:
        g = gcd(g, abs(x))
    if g:
        ints = [x // g for x in ints]
        ir //= g
    return tuple(ints), ir


def hull_facets(vertices):
    """Facets of the full-dimensional hull of rational ``vertices``.

    Returns a tuple of (coeffs, rhs) pairs of Fractions, oriented so that
    every hull point satisfies coeffs . x <= rhs.  Brute force over vertex
    subsets of size n (the instances here have at most ~20 vertices in
    dimension <= 6, so this is cheap and exact).
    """
    vs = [tuple(Fraction(c) for c in v) for v in vertices]
    n = len(vs[0])
    if affine_rank(vs) != n:
        raise ValueError(
            "facet enumeration requires a full-dimensional hull; "
            "use the exact feasibility route instead"
        )
    seen = {}
    for sub in itertools.combinations(range(len(vs)), n):
        pts = [vs[i] for i in sub]
        rows = [[pts[i][j] - pts[0][j] for j in range(n)] for i in range(1, n)]
        normal = _null_vector(rows, n)
        if normal is None:
            continue
        rhs = sum(normal[j] * pts[0][j] for j in range(n))
        sides = [sum(normal[j] * v[j] for j in range(n)) - rhs for v in vs]
        if all(sv <= 0 for sv in sides):
            pass
        elif all(sv >= 0 for sv in sides):
            normal = tuple(-x for x in normal)
            rhs = -rhs
        else:
            continue
        seen[_canonical_halfspace(normal, rhs)] = None
    return tuple(
        (tuple(Fraction(a) for a in coeffs), Fraction(rhs))
        for coeffs, rhs in seen
    )


def facet_verdict(point, facets) -> MembershipVerdict:
    """Three-way hull verdict of ``point`` against precomputed facets."""
    xs = tuple(Fraction(c) for c in point)
    on = False
    for coeffs, rhs in facets:
        s = sum(a * x for a, x in zip(coeffs, xs)) - rhs
        if s > 0:
            return MembershipVerdict.OUTSIDE
        if s == 0:
            on = True
    return MembershipVerdict.BOUNDARY if on else MembershipVerdict.INTERIOR


# ---------------------------------------------------------------------------
# Exact hull membership by linear programming.
# ---------------------------------------------------------------------------

def _pivot(tableau, basis, r, c):
    piv = tableau[r][c]
    tableau[r] = [a / piv for a in tableau[r]]
    row_r = tableau[r]
    for i in range(len(tableau)):
        if i != r:
            f = tableau[i][c]
            if f:
                tableau[i] = [a - f * b for a, b in zip(tableau[i], row_r)]
    basis[r] = c


def _run_simplex(tableau, basis, allow):
    """Drive the tableau (constraints + reduced objective row) to optimality.

    Maximizes; Bland's rule (smallest eligible index enters, ties on the
    leaving ratio broken by smallest basis index) guarantees termination.
    ``allow`` bounds the columns eligible to enter, which is how artificial
    variables are locked out in phase two.
    """
    m = len(tableau) - 1
    width = len(tableau[0])
    while True:
        obj = tableau[m]
        enter = next((j for j in range(allow) if obj[j] < 0), -1)
        if enter < 0:
            return
        leave = -1
        best = None
        for i in range(m):
            a = tableau[i][enter]
            if a > 0:
                ratio = tableau[i][width - 1] / a
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leave]
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            raise ArithmeticError("unbounded linear program")
        _pivot(tableau, basis, leave, enter)


def _solve_phase(rows, basis, cost, allow):
    """Append a reduced objective row for ``cost``, optimize, and return the
    objective value.  ``rows`` and ``basis`` are updated in place."""
    obj = [-c for c in cost] + [_ZERO]
    for i, row in enumerate(rows):
        cb = cost[basis[i]]
        if cb:
            obj = [a + cb * t for a, t in zip(obj, row)]
    tableau = rows + [obj]
    _run_simplex(tableau, basis, allow)
    del rows[:]
    rows.extend(tableau[:-1])
    return tableau[-1][-1]


def min_weight_lp(vertices, point):
    """Largest t such that ``point`` = sum w_i v_i with w_i >= t, sum w_i = 1.

    Returns None when no convex representation exists (point outside the
    hull), otherwise the exact optimum t* as a Fraction: t* > 0 iff the point
    is in the relative interior of the hull, t* = 0 iff it lies on the
    relative frontier.  This is the general membership route; it needs no
    full-dimensionality assumption.
    """
    vs = [tuple(Fraction(c) for c in v) for v in vertices]
    xs = tuple(Fraction(c) for c in point)
    n = len(vs)
    k = len(xs)
    if any(len(v) != k for v in vs):
        raise ValueError("vertex/point arity mismatch")
    # Substitute w_i = u_i + t with u_i >= 0, t >= 0: variables u_0..u_{n-1}, t.
    n_real = n + 1
    rows = [[_ONE] * n + [Fraction(n), _ONE]]
    for j in range(k):
        col_sum = sum((v[j] for v in vs), _ZERO)
        rows.append([v[j] for v in vs] + [col_sum, xs[j]])
    m = len(rows)
    for i in range(m):
        if rows[i][-1] < 0:
            rows[i] = [-a for a in rows[i]]
    # Phase one: artificial basis, maximize -(sum of artificials).
    tableau_rows = []
    for i in range(m):
        art = [_ONE if j == i else _ZERO for j in range(m)]
        tableau_rows.append(rows[i][:-1] + art + [rows[i][-1]])
    basis = list(range(n_real, n_real + m))
    cost1 = [_ZERO] * n_real + [-_ONE] * m
    value = _solve_phase(tableau_rows, basis, cost1, n_real + m)
    if value != 0:
        return None
    # Remove artificials from the basis (pivot out, or drop redundant rows).
    i = 0
    while i < len(basis):
        if basis[i] >= n_real:
            col = next((j for j in range(n_real) if tableau_rows[i][j] != 0), None)
            if col is None:
                del tableau_rows[i]
                del basis[i]
                continue
            tableau = tableau_rows + [[_ZERO] * (n_real + m) + [_ZERO]]
            _pivot(tableau, basis, i, col)
            tableau_rows[:] = tableau[:-1]
        i += 1
    # Phase two: maximize t (never unbounded: t <= 1/n from the weight row).
    cost2 = [_ZERO] * n + [_ONE] + [_ZERO] * m
    return _solve_phase(tableau_rows, basis, cost2, n_real)
