"""Radius sweeps, power-law exponent fits, and the stock experiments.

A sweep evaluates one distance-graph form across an increasing list of
admissible squared radii with fixed test functions, tabulating the form value
against the product of the corresponding l^p norms.  Ordinary least squares on
the log-log pairs then estimates the scaling exponent, which the stock
experiments compare against the exact conjectured value d/2 (1 - sum 1/p_i):

* :func:`sharpness_check` runs the all-balls recipe and verifies the fitted
  slope lands within tolerance of the conjectured exponent;
* :func:`necessary_condition_probe` pins spheres and deltas on the vertices
  and fits the decay of the normalized constrained count;
* :func:`subgraph_counterexample` measures the four-cycle (with and without a
  chord) at the corner where the tetrahedron bound would apply, exhibiting a
  slope strictly above it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .counting import admissible_radii, completion_count, mutual_pair_count
from .errors import AdmissibilityError, DegenerateFit, DimensionFloor, ZeroForm
from .forms import NormalizationMode, evaluate_form
from .functions import TestFunctionSpec, lp_norm, materialize
from .graphs import DistanceGraph, catalog_graph
from .lattice import DEFAULT_BUDGET, sphere_cardinality
from .regions import (
    HolderPoint,
    MembershipVerdict,
    builtin_region,
    conjectured_exponent,
    dimension_floor,
    hull_membership,
    region_parameters,
)

__all__ = [
    "SweepPlan",
    "SweepRow",
    "SweepTable",
    "FitResult",
    "SharpnessResult",
    "CounterexampleReport",
    "CSV_HEADER",
    "run_sweep",
    "fit_exponent",
    "sharpness_check",
    "necessary_condition_probe",
    "probe_sweep",
    "subgraph_counterexample",
    "sweep_table_to_csv",
    "sweep_table_from_csv",
]

CSV_HEADER = "lambda,n_config,form_value,norm_product,ratio,log_lambda,log_ratio"

SHARPNESS_TOLERANCE = 0.35
PROBE_TOLERANCE = 0.25


def _as_graph(graph) -> DistanceGraph:
    return graph if isinstance(graph, DistanceGraph) else catalog_graph(graph)


def _as_holder(point, arity: int) -> HolderPoint:
    hp = point if isinstance(point, HolderPoint) else HolderPoint(tuple(point))
    if hp.arity != arity:
        raise ValueError(
            f"Hoelder point has arity {hp.arity}, graph has {arity} vertices"
        )
    return hp


def _exponent_from_reciprocal(r: Fraction):
    """The norm exponent p = 1/r; a zero reciprocal means the sup norm."""
    return "inf" if r == 0 else 1 / Fraction(r)


def _resolve_range(graph: DistanceGraph, d: int, lambda_range,
                   budget: int = DEFAULT_BUDGET):
    """Ascending admissible radii from an inclusive (lo, hi) pair."""
    try:
        lo, hi = lambda_range
    except (TypeError, ValueError):
        raise ValueError(
            f"lambda_range must be an inclusive (lo, hi) pair, got {lambda_range!r}"
        ) from None
    lo, hi = int(lo), int(hi)
    if lo < 0 or hi < lo:
        raise ValueError(f"need 0 <= lo <= hi, got ({lo}, {hi})")
    return tuple(sorted(admissible_radii(graph, d, range(lo, hi + 1), budget)))


@dataclass(frozen=True)
class SweepPlan:
    """Everything needed to reproduce one sweep."""

    graph: DistanceGraph
    dimension: int
    lambda_values: tuple
    functions: tuple
    holder: HolderPoint
    normalization: NormalizationMode = NormalizationMode.EXACT_COUNT

    def __post_init__(self):
        object.__setattr__(self, "graph", _as_graph(self.graph))
        lams = tuple(int(v) for v in self.lambda_values)
        if not lams:
            raise ValueError("a sweep needs at least one radius")
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ValueError(f"radii must be strictly increasing, got {lams}")
        object.__setattr__(self, "lambda_values", lams)
        fns = tuple(self.functions)
        if len(fns) != self.graph.vertex_count:
            raise ValueError(
                f"{self.graph.name} needs {self.graph.vertex_count} test functions, "
                f"got {len(fns)}"
            )
        for spec in fns:
            if not isinstance(spec, TestFunctionSpec):
                raise TypeError(f"expected TestFunctionSpec, got {type(spec).__name__}")
        object.__setattr__(self, "functions", fns)
        hp = _as_holder(self.holder, self.graph.vertex_count)
        if any(r == 1 for r in hp.reciprocals):
            raise ValueError(
                "sweeps need norm exponents in (1, inf]; a reciprocal of 1 "
                "asks for the unsupported p=1 norm"
            )
        object.__setattr__(self, "holder", hp)
        if not isinstance(self.normalization, NormalizationMode):
            object.__setattr__(
                self, "normalization", NormalizationMode(self.normalization)
            )


@dataclass(frozen=True)
class SweepRow:
    """One radius of a sweep; ``ratio`` is form_value / norm_product."""

    lam: int
    n_config: int
    form_value: float
    norm_product: float
    ratio: float

    def __post_init__(self):
        if self.n_config <= 0:
            raise ValueError(f"lambda={self.lam}: configuration count must be positive")
        if not self.norm_product > 0:
            raise ValueError(f"lambda={self.lam}: norm product must be positive")
        if not math.isfinite(self.ratio):
            raise ValueError(f"lambda={self.lam}: ratio is not finite")


@dataclass(frozen=True)
class SweepTable:
    """Rows of a completed sweep, in ascending radius order."""

    rows: tuple
    plan: Optional[SweepPlan] = None

    def __post_init__(self):
        rows = tuple(self.rows)
        if not rows:
            raise ValueError("a sweep table needs at least one row")
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def to_csv(self) -> str:
        return sweep_table_to_csv(self)


def sweep_table_to_csv(table: SweepTable) -> str:
    """Serialize with full float precision so re-runs compare byte-for-byte."""
    lines = [CSV_HEADER]
    for row in table.rows:
        log_lam = math.log(row.lam) if row.lam > 0 else float("nan")
        log_ratio = math.log(row.ratio) if row.ratio > 0 else float("nan")
        lines.append(
            f"{row.lam},{row.n_config},{row.form_value!r},{row.norm_product!r},"
            f"{row.ratio!r},{log_lam!r},{log_ratio!r}"
        )
    return "\n".join(lines) + "\n"


def sweep_table_from_csv(text: str) -> SweepTable:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError(f"expected header {CSV_HEADER!r}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 7:
            raise ValueError(f"malformed sweep row: {ln!r}")
        rows.append(
            SweepRow(
                lam=int(parts[0]),
                n_config=int(parts[1]),
                form_value=float(parts[2]),
                norm_product=float(parts[3]),
                ratio=float(parts[4]),
            )
        )
    return SweepTable(rows=tuple(rows))


def _sweep_row(plan: SweepPlan, lam: int, budget: int) -> SweepRow:
    g = plan.graph
    d = plan.dimension
    exponents = [_exponent_from_reciprocal(r) for r in plan.holder.reciprocals]
    try:
        n_config = completion_count(g, d, lam, budget)
        if n_config == 0:
            raise AdmissibilityError(
                f"{g.name} has no configurations at lambda={lam} in d={d}"
            )
        fns = [materialize(spec, d, lam, budget) for spec in plan.functions]
        value = evaluate_form(g, lam, fns, plan.normalization, budget=budget).value
        norms = [lp_norm(f, p) for f, p in zip(fns, exponents)]
        norm_product = math.prod(norms)
    except (AdmissibilityError, ZeroForm):
        raise
    except Exception as exc:
        if exc.args and "lambda=" not in str(exc):
            exc.args = (f"lambda={lam}: {exc.args[0]}",) + tuple(exc.args[1:])
        raise
    return SweepRow(
        lam=lam,
        n_config=n_config,
        form_value=value,
        norm_product=norm_product,
        ratio=value / norm_product,
    )


def run_sweep(plan: SweepPlan, budget: int = DEFAULT_BUDGET,
              threads: int = 1) -> SweepTable:
    """One row per radius: evaluate the form, take the norms, divide.

    Radii with no configurations raise the admissibility error immediately,
    naming the offending radius; capacity errors are annotated the same way.
    Rows are independent, so ``threads > 1`` computes them concurrently; the
    table is always assembled in radius order, so the output is identical.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if threads == 1 or len(plan.lambda_values) == 1:
        rows = [_sweep_row(plan, lam, budget) for lam in plan.lambda_values]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(
                pool.map(lambda lam: _sweep_row(plan, lam, budget),
                         plan.lambda_values)
            )
    return SweepTable(rows=tuple(rows), plan=plan)


# ---------------------------------------------------------------------------
# Exponent fitting.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    """Least-squares power-law fit of ratio against radius on log-log axes."""

    slope: float
    intercept: float
    max_residual: float
    lambda_count: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "slope": self.slope,
                "intercept": self.intercept,
                "max_residual": self.max_residual,
                "lambda_count": self.lambda_count,
            },
            indent=2,
        )


def fit_exponent(table: SweepTable) -> FitResult:
    """Ordinary least squares of ln(ratio) on ln(lambda).

    Needs at least four rows with distinct radii and strictly positive
    ratios; anything else is a degenerate fit.
    """
    rows = table.rows
    if len(rows) < 4:
        raise DegenerateFit(f"need at least 4 rows to fit, got {len(rows)}")
    if len({row.lam for row in rows}) < len(rows):
        raise DegenerateFit("duplicate radii in sweep table")
    if any(row.ratio <= 0 for row in rows):
        bad = [row.lam for row in rows if row.ratio <= 0]
        raise DegenerateFit(f"non-positive ratios at lambda={bad}")
    xs = [math.log(row.lam) for row in rows]
    ys = [math.log(row.ratio) for row in rows]
    n = len(rows)
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    var = math.fsum((x - mean_x) ** 2 for x in xs)
    if var == 0:
        raise DegenerateFit("all radii equal; slope undefined")
    cov = math.fsum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = cov / var
    intercept = mean_y - slope * mean_x
    max_residual = max(abs(y - (intercept + slope * x)) for x, y in zip(xs, ys))
    return FitResult(
        slope=slope,
        intercept=intercept,
        max_residual=max_residual,
        lambda_count=n,
    )


# ---------------------------------------------------------------------------
# Sharpness of the conjectured exponent.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SharpnessResult:
    """Fitted all-balls slope versus the exact conjectured exponent."""

    graph: str
    dimension: int
    holder: HolderPoint
    fit: FitResult
    conjectured_slope: Fraction
    difference: float
    tolerance: float
    passed: bool
    table: SweepTable

    def to_json(self) -> str:
        return json.dumps(
            {
                "graph": self.graph,
                "dimension": self.dimension,
                "holder": [str(c) for c in self.holder.reciprocals],
                "slope": self.fit.slope,
                "conjectured_slope": str(self.conjectured_slope),
                "difference": self.difference,
                "tolerance": self.tolerance,
                "passed": self.passed,
            },
            indent=2,
        )

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict} {self.graph} d={self.dimension} holder={self.holder}: "
            f"fitted {self.fit.slope:+.4f} vs conjectured "
            f"{float(self.conjectured_slope):+.4f} "
            f"(|diff| {self.difference:.4f} <= {self.tolerance})"
        )


def sharpness_check(
    graph,
    d: int,
    holder,
    lambda_range=None,
    tolerance: float = SHARPNESS_TOLERANCE,
    budget: int = DEFAULT_BUDGET,
    lambdas: Optional[Sequence[int]] = None,
    threads: int = 1,
) -> SharpnessResult:
    """All-balls sweep against the conjectured exponent at a Hoelder point.

    The fitted slope of the normalized form over the ball-norm product must
    land within ``tolerance`` of d/2 (1 - sum 1/p_i).  Radii come from an
    inclusive ``lambda_range`` pair or an explicit ``lambdas`` collection;
    either way only admissible radii are swept.  Enforces the graph's proved
    dimension floor, since the comparison realizes the theorem.
    """
    g = _as_graph(graph)
    floor = dimension_floor(g)
    if d < floor:
        raise DimensionFloor(floor, d, g.name)
    hp = _as_holder(holder, g.vertex_count)
    if lambdas is not None:
        lams = tuple(
            lam
            for lam in sorted(int(v) for v in set(lambdas))
            if completion_count(g, d, lam, budget) > 0
        )
        described = f"lambdas={sorted(set(int(v) for v in lambdas))}"
    else:
        if lambda_range is None:
            raise ValueError("pass lambda_range=(lo, hi) or explicit lambdas=[...]")
        lams = _resolve_range(g, d, lambda_range, budget)
        described = f"range {lambda_range}"
    if len(lams) < 4:
        raise DegenerateFit(
            f"only {len(lams)} admissible radii in {described}; need 4 to fit"
        )
    plan = SweepPlan(
        graph=g,
        dimension=d,
        lambda_values=lams,
        functions=tuple(TestFunctionSpec.Ball() for _ in range(g.vertex_count)),
        holder=hp,
        normalization=NormalizationMode.EXACT_COUNT,
    )
    table = run_sweep(plan, budget, threads=threads)
    fit = fit_exponent(table)
    target = conjectured_exponent(d, hp)
    difference = abs(fit.slope - float(target))
    return SharpnessResult(
        graph=g.name,
        dimension=d,
        holder=hp,
        fit=fit,
        conjectured_slope=target,
        difference=difference,
        tolerance=tolerance,
        passed=difference <= tolerance,
        table=table,
    )


# ---------------------------------------------------------------------------
# Necessary-condition probes.
# ---------------------------------------------------------------------------

_PROBE_SPECS = {
    "s": TestFunctionSpec.SphereIndicator,
    "sphere": TestFunctionSpec.SphereIndicator,
    "delta": TestFunctionSpec.DeltaAtOrigin,
    "d": TestFunctionSpec.DeltaAtOrigin,
}


def _parse_assignment(assignment, arity: int):
    """Per-vertex choices among sphere indicators and origin deltas."""
    parsed = []
    for token in assignment:
        if isinstance(token, TestFunctionSpec):
            if token.kind not in ("sphere", "delta"):
                raise ValueError(
                    f"probe assignments use spheres and deltas only, got {token.kind}"
                )
            parsed.append(token)
            continue
        key = str(token).strip().lower()
        if key not in _PROBE_SPECS:
            raise ValueError(
                f"unknown probe assignment {token!r}; use 'S' (sphere) or 'delta'"
            )
        parsed.append(_PROBE_SPECS[key]())
    if len(parsed) != arity:
        raise ValueError(f"assignment names {len(parsed)} vertices, graph has {arity}")
    return tuple(parsed)


def probe_sweep(
    graph,
    d: int,
    assignment,
    lambda_range=None,
    lambdas: Optional[Sequence[int]] = None,
    budget: int = DEFAULT_BUDGET,
) -> SweepTable:
    """Table behind :func:`necessary_condition_probe`.

    The tabulated form_value is the raw constrained sum divided by
    N_lambda^(k-1), the count of unconstrained completions of a k-vertex
    tree; this normalizer makes the stock probes land at the advertised
    decays (constant, -(d-2)/2, and -1) simultaneously.  The norm_product
    column is identically 1: the probe studies the form value alone.
    """
    g = _as_graph(graph)
    specs = _parse_assignment(assignment, g.vertex_count)
    if lambdas is not None:
        lams = tuple(sorted(int(v) for v in set(lambdas)))
        lams = tuple(
            lam for lam in lams if completion_count(g, d, lam, budget) > 0
        )
    else:
        if lambda_range is None:
            raise ValueError("pass lambda_range=(lo, hi) or explicit lambdas=[...]")
        lams = _resolve_range(g, d, lambda_range, budget)
    if not lams:
        raise ZeroForm(f"no admissible radii for {g.name} in the requested range")
    k = g.vertex_count
    rows = []
    all_zero = True
    for lam in lams:
        n_config = completion_count(g, d, lam, budget)
        fns = [materialize(spec, d, lam, budget) for spec in specs]
        raw = evaluate_form(
            g, lam, fns, NormalizationMode.UNNORMALIZED, budget=budget
        ).value
        normalizer = float(sphere_cardinality(d, lam)) ** (k - 1)
        value = raw / normalizer
        if value != 0.0:
            all_zero = False
        rows.append(
            SweepRow(
                lam=lam,
                n_config=n_config,
                form_value=value,
                norm_product=1.0,
                ratio=value,
            )
        )
    if all_zero:
        raise ZeroForm(
            f"{g.name} probe {tuple(s.kind for s in specs)} vanished at every radius"
        )
    return SweepTable(rows=tuple(rows))


def necessary_condition_probe(
    graph,
    d: int,
    assignment,
    lambda_range=None,
    lambdas: Optional[Sequence[int]] = None,
    budget: int = DEFAULT_BUDGET,
) -> FitResult:
    """Fitted decay of a sphere/delta probe (see :func:`probe_sweep`)."""
    table = probe_sweep(graph, d, assignment, lambda_range, lambdas, budget)
    return fit_exponent(table)


# ---------------------------------------------------------------------------
# The subgraph counterexample.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CounterexampleReport:
    """Measured decay of a subgraph probe against the bound its supergraph
    corner would impose; ``violation`` means the measured slope exceeds it."""

    graph: str
    corner: HolderPoint
    measured_slope: float
    conjectured_bound_slope: Fraction
    violation: bool
    margin: float

    def __post_init__(self):
        if self.violation != (self.margin > 0):
            raise ValueError(
                f"violation flag {self.violation} inconsistent with margin "
                f"{self.margin}; violation holds exactly when margin > 0"
            )

    def to_json(self) -> str:
        return json.dumps(
            {
                "graph": self.graph,
                "corner": [str(c) for c in self.corner.reciprocals],
                "measured_slope": self.measured_slope,
                "conjectured_bound_slope": str(self.conjectured_bound_slope),
                "violation": self.violation,
                "margin": self.margin,
            },
            indent=2,
        )

    def describe(self, dimension: Optional[int] = None) -> str:
        lines = [
            f"graph {self.graph}: probe (sphere, delta, sphere, delta) at corner "
            f"{self.corner}",
            f"  measured slope          {self.measured_slope:+.4f}",
            f"  conjectured bound slope {float(self.conjectured_bound_slope):+.4f} "
            f"(= {self.conjectured_bound_slope})",
            f"  margin                  {self.margin:+.4f}  -> "
            + ("VIOLATION: decay is slower than the bound allows"
               if self.violation else "no violation"),
            "  (slopes are taken at the limiting corner itself; any nearby "
            "strictly admissible exponent tuple weakens the bound and enlarges "
            "the margin)",
        ]
        if dimension is not None:
            floor = dimension_floor("K4")
            if dimension >= floor:
                region = builtin_region("K4", dimension)
                verdict = hull_membership(self.corner, region)
                lines.append(
                    f"  corner membership in the K4 region at d={dimension}: {verdict}"
                )
            else:
                lines.append(
                    f"  K4 region comparison needs d >= {floor}; at d={dimension} the "
                    "corner is the formal limit of the same bound"
                )
        return "\n".join(lines)


def _counterexample_table(g: DistanceGraph, d: int, lams, budget: int) -> SweepTable:
    """(S, delta, S, delta) sweep with exact-count normalization.

    The raw constrained sum collapses to a known integer at every radius --
    N^2 for the plain four-cycle (both free vertices range over the whole
    shell) and the mutual-pair count when the chord ties them together -- and
    that identity is asserted exactly before the row is emitted.
    """
    specs = (
        TestFunctionSpec.SphereIndicator(),
        TestFunctionSpec.DeltaAtOrigin(),
        TestFunctionSpec.SphereIndicator(),
        TestFunctionSpec.DeltaAtOrigin(),
    )
    chorded = len(g.edges) == 5
    rows = []
    for lam in lams:
        n_config = completion_count(g, d, lam, budget)
        fns = [materialize(spec, d, lam, budget) for spec in specs]
        raw = evaluate_form(
            g, lam, fns, NormalizationMode.UNNORMALIZED, budget=budget
        ).value
        n_shell = sphere_cardinality(d, lam)
        expected = mutual_pair_count(d, lam) if chorded else n_shell * n_shell
        if raw != float(expected):
            raise ArithmeticError(
                f"{g.name} probe at lambda={lam}: raw sum {raw} != exact count "
                f"{expected}"
            )
        value = raw / n_config
        rows.append(
            SweepRow(
                lam=lam,
                n_config=n_config,
                form_value=value,
                norm_product=1.0,
                ratio=value,
            )
        )
    return SweepTable(rows=tuple(rows))


def subgraph_counterexample(
    d: int,
    lambda_range,
    budget: int = DEFAULT_BUDGET,
):
    """Probe both four-vertex cycle graphs at the tetrahedron corner.

    At the corner (0, q, 0, q) with q = (d-1)/(d+1) the norm product of
    (sphere, delta, sphere, delta) is identically 1 (sup norms of indicators
    and any norm of a delta), so a bound with exponent d/2 (1 - 2q) would
    force the normalized form value to decay at least that fast.  Both cycles
    decay strictly slower, so no such bound extends to them.  Returns the
    pair of reports (plain cycle, chorded cycle).
    """
    floor = dimension_floor("C4t")
    if d < floor:
        raise DimensionFloor(floor, d, "C4/C4t counterexample")
    g_c4 = catalog_graph("C4")
    g_c4t = catalog_graph("C4t")
    lams_c4 = set(_resolve_range(g_c4, d, lambda_range, budget))
    lams_c4t = set(_resolve_range(g_c4t, d, lambda_range, budget))
    shared = tuple(sorted(lams_c4 & lams_c4t))
    if len(shared) < 4:
        raise DegenerateFit(
            f"only {len(shared)} radii admissible for both cycles in {lambda_range}"
        )
    q = region_parameters(d).q
    corner = HolderPoint((Fraction(0), q, Fraction(0), q))
    bound = conjectured_exponent(d, corner)
    reports = []
    for g in (g_c4, g_c4t):
        table = _counterexample_table(g, d, shared, budget)
        fit = fit_exponent(table)
        margin = fit.slope - float(bound)
        reports.append(
            CounterexampleReport(
                graph=g.name,
                corner=corner,
                measured_slope=fit.slope,
                conjectured_bound_slope=bound,
                violation=margin > 0,
                margin=margin,
            )
        )
    return tuple(reports)
