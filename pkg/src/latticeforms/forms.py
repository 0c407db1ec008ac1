"""Exact evaluation of distance-graph multilinear forms on Z^d.

The central object is the sum

    raw(G, lam, f_1..f_k) = sum over (x_1..x_k) in (Z^d)^k
                            with |x_i - x_j|^2 = lam for every edge (i,j)
                            of  f_1(x_1) * ... * f_k(x_k),

optionally divided by the exact configuration count N_G(lam) (the number of
completions of an anchored origin).  Three interchangeable strategies are
provided and must agree to 1e-12 relative:

- ``GenericBacktracking``: depth-first assignment with constraint-ordered
  vertex selection, dynamic splitting into independent components, memoized
  final-vertex sums, and an orbit reduction of early loops when every input
  is invariant under coordinate permutations and sign changes;
- ``TreeMessagePassing``: leaf-to-root accumulation for acyclic graphs,
  turning the k-fold sum into k-1 sparse shell convolutions;
- ``ChainConvolution``: the path-graph specialization, sweeping a running
  shell convolution from one end of the chain to the other.

Also here: the normalized spherical averaging operator, and the partial
application that pins one vertex and returns the resulting function.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .counting import count_configurations
from .errors import (
    AdmissibilityError,
    CapacityError,
    DimensionMismatch,
    StrategyUnsupported,
)
from .functions import FunctionOnLattice
from .graphs import DistanceGraph, components_of
from .lattice import DEFAULT_BUDGET, encode_points, enumerate_sphere

__all__ = [
    "NormalizationMode",
    "FormValue",
    "STRATEGIES",
    "evaluate_form",
    "spherical_average",
    "operator_apply",
]


class NormalizationMode(Enum):
    """Raw constrained sum, or the sum divided by the exact count N_G(lam)."""

    UNNORMALIZED = "Unnormalized"
    EXACT_COUNT = "ExactCount"


@dataclass(frozen=True)
class FormValue:
    value: float
    strategy_used: str
    normalization: NormalizationMode


STRATEGY_AUTO = "Auto"
STRATEGY_BACKTRACKING = "GenericBacktracking"
STRATEGY_TREE = "TreeMessagePassing"
STRATEGY_CHAIN = "ChainConvolution"
STRATEGIES = (STRATEGY_AUTO, STRATEGY_BACKTRACKING, STRATEGY_TREE, STRATEGY_CHAIN)

# candidate batches are expanded in chunks of at most this many rows
_CHUNK_ROWS = 1 << 21


# ---------------------------------------------------------------------------
# orbit helpers (coordinate permutations and sign changes)
# ---------------------------------------------------------------------------


def _canonical_rows(pts: np.ndarray) -> np.ndarray:
    """Orbit invariant per row: absolute coordinates sorted descending."""
    return -np.sort(-np.abs(pts), axis=1)


def _lex_order(pts: np.ndarray) -> np.ndarray:
    return np.lexsort(pts.T[::-1])


def _orbit_reduce(points: np.ndarray, weights: np.ndarray):
    """Collapse rows to one representative per orbit; returns
    (representatives, summed weights, orbit member counts)."""
    if len(points) <= 1:
        return points, np.asarray(weights, dtype=np.float64), np.ones(len(points), dtype=np.int64)
    canon = _canonical_rows(points)
    order = _lex_order(canon)
    canon, points, weights = canon[order], points[order], weights[order]
    change = np.any(canon[1:] != canon[:-1], axis=1)
    starts = np.concatenate(([0], np.nonzero(change)[0] + 1))
    ends = np.concatenate((starts[1:], [len(canon)]))
    reps = points[starts]
    wsum = np.add.reduceat(weights, starts)
    return reps, np.asarray(wsum, dtype=np.float64), ends - starts


class _SymmetricMap:
    """A sign-and-permutation invariant function stored on orbit
    representatives; lookups canonicalize the query points first."""

    def __init__(self, rep_points: np.ndarray, values: np.ndarray, dimension: int):
        self.dimension = dimension
        canon = _canonical_rows(rep_points)
        order = _lex_order(canon)
        canon, values = canon[order], np.asarray(values, dtype=np.float64)[order]
        self._offset = int(canon.max(initial=0)) + 1
        self._base = 2 * self._offset + 1
        if self._base**dimension >= 2**62:
            raise CapacityError(self._base**dimension, 2**62, what="encoding keys")
        self._keys = encode_points(canon, self._base, self._offset)
        self._values = values

    def values_at(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros(len(pts), dtype=np.float64)
        if len(self._keys) == 0 or len(pts) == 0:
            return out
        canon = _canonical_rows(pts)
        in_range = canon[:, 0] <= self._offset - 1
        if not in_range.any():
            return out
        sub = canon[in_range]
        keys = encode_points(sub, self._base, self._offset)
        pos = np.searchsorted(self._keys, keys)
        pos[pos >= len(self._keys)] = 0
        hit = self._keys[pos] == keys
        vals = np.zeros(len(sub), dtype=np.float64)
        vals[hit] = self._values[pos[hit]]
        out[in_range] = vals
        return out


def _shell_sums(lookup, X: np.ndarray, shell: np.ndarray) -> np.ndarray:
    """out[i] = sum over shell offsets s of lookup(X[i] + s), chunked."""
    n, d = X.shape
    m = len(shell)
    out = np.empty(n, dtype=np.float64)
    if m == 0:
        out.fill(0.0)
        return out
    step = max(1, _CHUNK_ROWS // m)
    for a in range(0, n, step):
        b = min(n, a + step)
        block = (X[a:b, None, :] + shell[None, :, :]).reshape(-1, d)
        out[a:b] = lookup.values_at(block).reshape(b - a, m).sum(axis=1)
    return out


# ---------------------------------------------------------------------------
# generic backtracking
# ---------------------------------------------------------------------------


def _sq_dist(points: np.ndarray, p: np.ndarray) -> np.ndarray:
    diff = points - p
    return np.einsum("ij,ij->i", diff, diff)


class _Backtracker:
    """Depth-first evaluation of the constrained sum for one graph.

    Vertex order: the first vertex picked is the one with the smallest
    support; afterwards always the vertex with the most already-assigned
    neighbors (ties: smaller support, then lower index).  After each
    assignment the remaining vertices are split into connected components of
    the residual graph and summed independently (the total factorizes).

    When every input function is invariant under coordinate permutations and
    sign changes, any loop run while all assigned points are still at the
    origin is reduced to orbit representatives with multiplicity weights.
    """

    def __init__(self, g: DistanceGraph, lam: int, fns: Sequence[FunctionOnLattice],
                 shell: np.ndarray):
        self.adj = g.adjacency()
        self.lam = lam
        self.fns = {v: fns[v - 1] for v in self.adj}
        self.shell = shell
        self.assigned: dict[int, np.ndarray] = {}
        self.all_zero = True  # every assigned point so far is the origin
        self.symmetric = all(f.check_signed_permutation_invariance() for f in fns)
        self._final_memo: dict = {}

    def run(self, vertices=None, preassigned: dict | None = None) -> float:
        if preassigned:
            self.assigned.update(preassigned)
            self.all_zero = all(not p.any() for p in self.assigned.values())
        todo = set(vertices if vertices is not None else self.adj)
        todo -= set(self.assigned)
        if not todo:
            return 1.0
        parts = [self._component(frozenset(c)) for c in components_of_sets(self.adj, todo)]
        return math.prod(parts)

    # -- internals --------------------------------------------------------

    def _pick(self, comp):
        best, best_key = None, None
        for v in comp:
            n_assigned = sum(1 for u in self.adj[v] if u in self.assigned)
            key = (n_assigned, -self.fns[v].support_size, -v)
            if best_key is None or key > best_key:
                best, best_key = v, key
        return best

    def _candidates(self, v):
        """Support points of f_v compatible with every assigned neighbor,
        with their values."""
        f = self.fns[v]
        anchors = [self.assigned[u] for u in self.adj[v] if u in self.assigned]
        if not anchors:
            return f.points, f.values
        if f.support_size <= len(self.shell):
            C, w = f.points, f.values
            for p in anchors:
                keep = _sq_dist(C, p) == self.lam
                C, w = C[keep], w[keep]
                if len(C) == 0:
                    break
        else:
            C = anchors[0] + self.shell
            for p in anchors[1:]:
                keep = _sq_dist(C, p) == self.lam
                C = C[keep]
                if len(C) == 0:
                    break
            w = f.values_at(C) if len(C) else np.zeros(0)
            nz = w != 0.0
            C, w = C[nz], w[nz]
        return C, w

    def _component(self, comp: frozenset) -> float:
        v = self._pick(comp)
        if len(comp) == 1:
            anchors = tuple(
                sorted(tuple(int(c) for c in self.assigned[u])
                       for u in self.adj[v] if u in self.assigned)
            )
            if anchors:
                hit = self._final_memo.get((v, anchors))
                if hit is not None:
                    return hit
            C, w = self._candidates(v)
            total = float(np.sum(w)) if len(w) else 0.0
            if anchors:
                self._final_memo[(v, anchors)] = total
            return total

        C, w = self._candidates(v)
        if len(C) == 0:
            return 0.0
        counts = None
        if self.symmetric and self.all_zero:
            C, w, counts = _orbit_reduce(C, w)
        rest = comp - {v}
        sub_comps = components_of_sets(self.adj, rest)
        parts = []
        was_all_zero = self.all_zero
        for i in range(len(C)):
            point = C[i]
            self.assigned[v] = point
            self.all_zero = was_all_zero and not point.any()
            inner = 1.0
            for sub in sub_comps:
                inner *= self._component(frozenset(sub))
                if inner == 0.0:
                    break
            parts.append(w[i] * inner)
            del self.assigned[v]
        self.all_zero = was_all_zero
        return math.fsum(parts)


def components_of_sets(adj: dict, vertices) -> list:
    """Connected components of the residual graph induced on `vertices`."""
    left = set(vertices)
    comps = []
    while left:
        start = min(left)
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for u in adj[x]:
                if u in left and u not in comp:
                    comp.add(u)
                    stack.append(u)
        comps.append(comp)
        left -= comp
    return comps


# ---------------------------------------------------------------------------
# triangle fast path: three sizable invariant indicators
# ---------------------------------------------------------------------------

_TRIANGLE_EDGES = ((1, 2), (1, 3), (2, 3))
_TRIANGLE_MIN_SUPPORT = 512


def _stabilizer_canonical(U: np.ndarray, s_rep: np.ndarray) -> np.ndarray:
    """Canonical form of rows of U under the signed permutations fixing
    s_rep (a nonincreasing non-negative vector): coordinates may be permuted
    within blocks of equal s_rep value, and signs flipped only where s_rep
    is zero, so each block sorts descending, by absolute value on the zero
    block."""
    out = np.empty_like(U)
    d = len(s_rep)
    j = 0
    while j < d:
        k = j
        while k < d and s_rep[k] == s_rep[j]:
            k += 1
        block = U[:, j:k]
        if s_rep[j] == 0:
            block = np.abs(block)
        out[:, j:k] = -np.sort(-block, axis=1)
        j = k
    return out


def _triangle_symmetric(fns, lam: int, shell: np.ndarray) -> float:
    """Raw triangle sum when all three inputs are invariant indicators.

    Writes the sum as sum over shell offsets (s, u) with |s - u|^2 = lam
    (equivalently 2 s.u = lam) of the translation-overlap count
    T(s, u) = #{x : x in supp f1, x+s in supp f2, x+u in supp f3}, then
    collapses the offset pairs to orbit representatives: s runs over shell
    orbit representatives, u over orbits of the stabilizer of s.  T is
    invariant under simultaneous signed permutations, so a few hundred
    overlap counts replace the full double sum over the shell."""
    from .counting import shell_orbit_reps

    order = sorted(range(3), key=lambda i: fns[i].support_size)
    f1, f2, f3 = (fns[i] for i in order)
    scale = float(f1.values[0] * f2.values[0] * f3.values[0])
    base = f1.points
    d = base.shape[1]
    parts = []
    for rep, w_s in shell_orbit_reps(d, lam):
        s = np.array(rep, dtype=np.int64)
        partners = shell[2 * (shell @ s) == lam]
        if len(partners) == 0:
            continue
        mask2 = f2.values_at(base + s) != 0.0
        if not mask2.any():
            continue
        canon = _stabilizer_canonical(partners, s)
        cord = _lex_order(canon)
        canon, partners = canon[cord], partners[cord]
        change = np.any(canon[1:] != canon[:-1], axis=1)
        starts = np.concatenate(([0], np.nonzero(change)[0] + 1))
        counts = np.diff(np.concatenate((starts, [len(canon)])))
        for start, cnt in zip(starts, counts):
            u = partners[start]
            mask3 = f3.values_at(base + u) != 0.0
            overlap = int(np.count_nonzero(mask2 & mask3))
            if overlap:
                parts.append(float(w_s) * float(cnt) * overlap)
    return scale * math.fsum(parts)


def _triangle_applicable(g: DistanceGraph, fns) -> bool:
    if g.vertex_count != 3 or g.edges != _TRIANGLE_EDGES:
        return False
    if min(f.support_size for f in fns) < _TRIANGLE_MIN_SUPPORT:
        return False
    return all(
        f.is_indicator() and f.check_signed_permutation_invariance() for f in fns
    )


# ---------------------------------------------------------------------------
# tree message passing and the chain sweep
# ---------------------------------------------------------------------------


def _message_lookup(f: FunctionOnLattice, values: np.ndarray, use_reps: bool,
                    rep_points: np.ndarray):
    if use_reps:
        return _SymmetricMap(rep_points, values, f.dimension)
    return FunctionOnLattice.from_sorted_arrays(f.dimension, f.points, values)


def _tree_raw(g: DistanceGraph, lam: int, fns, shell: np.ndarray,
              root: int | None = None) -> float:
    """Leaf-to-root sweep: each vertex's message is its function times the
    shell-sum of every child message; the root sums its message."""
    adj = g.adjacency()
    by_vertex = {v: fns[v - 1] for v in adj}
    if root is None:
        root = min(adj, key=lambda v: (by_vertex[v].support_size, v))
    symmetric = all(f.check_signed_permutation_invariance() for f in fns)

    # iterative post-order over the tree
    parent = {root: 0}
    order = [root]
    stack = [root]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in parent:
                parent[u] = v
                order.append(u)
                stack.append(u)

    messages = {}
    for v in reversed(order):
        f = by_vertex[v]
        if symmetric:
            X, _, cnts = _orbit_reduce(f.points, f.values)
            vals = f.values_at(X)
        else:
            X, cnts = f.points, None
            vals = f.values.copy()
        for u in adj[v]:
            if u != parent[v]:
                vals = vals * _shell_sums(messages.pop(u), X, shell)
        if v == root:
            if cnts is not None:
                vals = vals * cnts
            return float(math.fsum(vals.tolist()))
        messages[v] = _message_lookup(f, vals, symmetric, X)
    raise AssertionError("unreachable")


def _chain_raw(g: DistanceGraph, lam: int, fns, shell: np.ndarray) -> float:
    """Path-graph sweep; roots the recursion at the cheaper endpoint."""
    k = g.vertex_count
    root = 1 if fns[0].support_size <= fns[-1].support_size else k
    return _tree_raw(g, lam, fns, shell, root=root)


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------


def _validate_inputs(g: DistanceGraph, lam: int, fns) -> int:
    if len(fns) != g.vertex_count:
        raise DimensionMismatch(
            f"{g.vertex_count} vertices but {len(fns)} functions"
        )
    dims = {f.dimension for f in fns}
    if len(dims) != 1:
        raise DimensionMismatch(f"functions live in different dimensions {sorted(dims)}")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    return dims.pop()


def _is_acyclic(g: DistanceGraph) -> bool:
    n_comp = len(components_of(g, range(1, g.vertex_count + 1)))
    return g.edge_count == g.vertex_count - n_comp


def evaluate_form(
    g: DistanceGraph,
    lam: int,
    fns: Sequence[FunctionOnLattice],
    mode: NormalizationMode = NormalizationMode.EXACT_COUNT,
    strategy: str = STRATEGY_AUTO,
    budget: int = DEFAULT_BUDGET,
) -> FormValue:
    """Evaluate the distance-graph form of ``g`` at squared distance ``lam``.

    ``mode`` selects the raw constrained sum or division by the exact
    configuration count N_G(lam); the latter raises AdmissibilityError when
    the count is zero.  ``strategy`` forces an evaluation route or lets
    ``Auto`` pick the chain sweep for paths, message passing for trees, and
    backtracking otherwise.
    """
    d = _validate_inputs(g, lam, fns)
    if strategy not in STRATEGIES:
        raise StrategyUnsupported(
            f"unknown strategy {strategy!r}; expected one of {STRATEGIES}"
        )

    if not g.connected:
        return _evaluate_disconnected(g, lam, fns, mode, strategy, budget, d)

    norm = 1
    if mode == NormalizationMode.EXACT_COUNT:
        norm = count_configurations(g, d, lam, budget=budget).count
        if norm == 0:
            raise AdmissibilityError(
                f"{g.name or 'graph'} admits no configurations at lambda={lam} "
                f"in dimension {d}; the normalized form is undefined"
            )

    chosen = strategy
    if strategy == STRATEGY_AUTO:
        if g.is_canonical_path():
            chosen = STRATEGY_CHAIN
        elif g.is_tree():
            chosen = STRATEGY_TREE
        else:
            chosen = STRATEGY_BACKTRACKING
    elif strategy == STRATEGY_CHAIN and not g.is_canonical_path():
        raise StrategyUnsupported("ChainConvolution requires a canonical path graph")
    elif strategy == STRATEGY_TREE and not _is_acyclic(g):
        raise StrategyUnsupported("TreeMessagePassing requires an acyclic graph")

    if any(f.support_size == 0 for f in fns):
        raw = 0.0
    else:
        shell = enumerate_sphere(d, lam, budget=budget).points
        if chosen == STRATEGY_CHAIN:
            raw = _chain_raw(g, lam, fns, shell)
        elif chosen == STRATEGY_TREE:
            raw = _tree_raw(g, lam, fns, shell)
        elif _triangle_applicable(g, fns):
            raw = _triangle_symmetric(fns, lam, shell)
        else:
            raw = _Backtracker(g, lam, fns, shell).run()

    return FormValue(raw / norm if norm != 1 else raw, chosen, mode)


def _evaluate_disconnected(g, lam, fns, mode, strategy, budget, d):
    warnings.warn(
        f"graph {g.name or ''} is disconnected; the form factorizes over "
        "components",
        stacklevel=3,
    )
    if mode == NormalizationMode.EXACT_COUNT:
        raise AdmissibilityError(
            "the anchored configuration count does not normalize a "
            "disconnected graph; use the unnormalized mode"
        )
    value = 1.0
    chosen = None
    for comp in components_of(g, range(1, g.vertex_count + 1)):
        verts = sorted(comp)
        relabel = {v: i + 1 for i, v in enumerate(verts)}
        sub = DistanceGraph(
            name=f"{g.name}-component",
            vertex_count=len(verts),
            edges=tuple(
                (relabel[a], relabel[b])
                for a, b in g.edges
                if a in comp and b in comp
            ),
        )
        sub_fns = [fns[v - 1] for v in verts]
        fv = evaluate_form(sub, lam, sub_fns, NormalizationMode.UNNORMALIZED,
                           strategy, budget)
        value *= fv.value
        chosen = fv.strategy_used if chosen is None else chosen
    return FormValue(value, chosen or strategy, mode)


def spherical_average(f: FunctionOnLattice, lam: int,
                      budget: int = DEFAULT_BUDGET) -> FunctionOnLattice:
    """(A f)(x) = (1/N) sum over shell points y of f(x - y); exact sparse
    convolution against the normalized shell indicator."""
    shell = enumerate_sphere(f.dimension, lam, budget=budget)
    if shell.count == 0:
        raise AdmissibilityError(
            f"the shell |y|^2={lam} in dimension {f.dimension} is empty"
        )
    n = shell.count
    d = f.dimension
    if f.support_size == 0:
        return FunctionOnLattice.empty(d)
    if f.support_size * n > budget:
        raise CapacityError(f.support_size * n, budget, what="convolution pairs")
    offsets = shell.points
    step = max(1, _CHUNK_ROWS // n)
    reduced = []  # per-chunk (sorted points, summed values), merged at the end
    for a in range(0, f.support_size, step):
        b = min(f.support_size, a + step)
        block = (f.points[a:b, None, :] - offsets[None, :, :]).reshape(-1, d)
        vals = np.repeat(f.values[a:b], n)
        reduced.append(_accumulate_rows(block, vals))
    pts = np.concatenate([r[0] for r in reduced])
    vals = np.concatenate([r[1] for r in reduced])
    out_pts, out_vals = _accumulate_rows(pts, vals)
    return FunctionOnLattice.from_sorted_arrays(
        d, out_pts, out_vals / n, symmetric=f.symmetric
    )


def _accumulate_rows(pts: np.ndarray, vals: np.ndarray):
    """Sort rows lexicographically and sum values of duplicate rows."""
    order = _lex_order(pts)
    pts, vals = pts[order], vals[order]
    if len(pts) == 0:
        return pts, vals
    change = np.any(pts[1:] != pts[:-1], axis=1)
    starts = np.concatenate(([0], np.nonzero(change)[0] + 1))
    return pts[starts], np.add.reduceat(vals, starts)


def operator_apply(
    g: DistanceGraph,
    pinned_vertex: int,
    lam: int,
    fns: Sequence[FunctionOnLattice],
    mode: NormalizationMode = NormalizationMode.EXACT_COUNT,
    budget: int = DEFAULT_BUDGET,
) -> FunctionOnLattice:
    """Pin one vertex at a free point x and sum out the rest, returning the
    function x -> (normalized) partial sum.  Satisfies the duality
    <h, operator_apply(g, v, lam, fns)> = evaluate_form with h in slot v.
    """
    k = g.vertex_count
    if not 1 <= pinned_vertex <= k:
        raise ValueError(f"pinned vertex {pinned_vertex} outside 1..{k}")
    if len(fns) != k - 1:
        raise DimensionMismatch(f"expected {k - 1} functions, got {len(fns)}")
    adj = g.adjacency()
    if not adj[pinned_vertex]:
        raise ValueError("the pinned vertex must touch at least one edge")
    dims = {f.dimension for f in fns}
    if len(dims) != 1:
        raise DimensionMismatch(f"functions live in different dimensions {sorted(dims)}")
    d = dims.pop()

    slots = [v for v in range(1, k + 1) if v != pinned_vertex]
    by_vertex = dict(zip(slots, fns))

    norm = 1
    if mode == NormalizationMode.EXACT_COUNT:
        norm = count_configurations(g, d, lam, budget=budget).count
        if norm == 0:
            raise AdmissibilityError(
                f"{g.name or 'graph'} admits no configurations at lambda={lam} "
                f"in dimension {d}"
            )

    if any(f.support_size == 0 for f in fns):
        return FunctionOnLattice.empty(d)

    shell = enumerate_sphere(d, lam, budget=budget)
    if shell.count == 0:
        return FunctionOnLattice.empty(d)

    # candidate support: the smallest neighboring support dilated by the shell
    u = min(adj[pinned_vertex], key=lambda v: by_vertex[v].support_size)
    base = by_vertex[u]
    if base.support_size * shell.count > budget:
        raise CapacityError(base.support_size * shell.count, budget,
                            what="dilation pairs")
    dil = (base.points[:, None, :] + shell.points[None, :, :]).reshape(-1, d)
    dil = np.unique(dil, axis=0)

    bt_fns = [
        by_vertex[v] if v != pinned_vertex else None for v in range(1, k + 1)
    ]
    values = np.empty(len(dil), dtype=np.float64)
    for i, x in enumerate(dil):
        pin_fn = FunctionOnLattice.delta(d, [int(c) for c in x])
        full = [pin_fn if fn is None else fn for fn in bt_fns]
        tracker = _Backtracker(g, lam, full, shell.points)
        values[i] = tracker.run(
            preassigned={pinned_vertex: np.asarray(x, dtype=np.int64)}
        )
    if norm != 1:
        values = values / norm
    order = _lex_order(dil)
    return FunctionOnLattice.from_sorted_arrays(d, dil[order], values[order])
