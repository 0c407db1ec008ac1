"""Command-line front end.

Every subcommand is a thin wrapper over one library call, with flags parsed
exactly once and echoed into a JSON manifest whenever an artifact is written,
so any run can be replayed byte-for-byte from its manifest.  Exit codes:

* 0 -- success (including counts of zero and failed-but-measured checks);
* 2 -- validation problems: bad flags, malformed files, dimension floors;
* 3 -- admissibility problems: empty configuration sets, identically zero forms;
* 4 -- capacity: the requested computation exceeds the enumeration budget.

Rational-valued flags are written ``num/den`` and parsed exactly; decimal
floats are accepted only where a tolerance is genuinely a float.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import shutil
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .counting import admissible_radii, completion_count
from .errors import AdmissibilityError, CapacityError, LatticeFormsError, ZeroForm
from .forms import STRATEGIES, STRATEGY_AUTO, NormalizationMode, evaluate_form
from .functions import TestFunctionSpec, materialize
from .graphs import CATALOG_NAMES, catalog_graph, graph_from_json
from .lattice import DEFAULT_BUDGET, enumerate_sphere, shell_to_text
from .regions import (
    HolderPoint,
    builtin_halfspaces,
    builtin_region,
    cross_validate,
    hull_membership,
    parse_rational,
    region_to_json,
)
from .sweeps import (
    SweepPlan,
    fit_exponent,
    probe_sweep,
    run_sweep,
    subgraph_counterexample,
    sweep_table_from_csv,
)

__all__ = ["build_parser", "main"]

_MODES = {"exact": NormalizationMode.EXACT_COUNT, "raw": NormalizationMode.UNNORMALIZED}


# ---------------------------------------------------------------------------
# Flag parsing helpers.
# ---------------------------------------------------------------------------

def _int_list(text: str):
    try:
        values = tuple(int(tok) for tok in str(text).split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"expected a comma-separated integer list, got {text!r}")
    if not values:
        raise ValueError(f"expected a nonempty integer list, got {text!r}")
    return values


def _rational_point(text: str) -> HolderPoint:
    tokens = [tok.strip() for tok in str(text).split(",") if tok.strip()]
    if not tokens:
        raise ValueError(f"expected comma-separated rationals, got {text!r}")
    return HolderPoint(tuple(parse_rational(tok) for tok in tokens))


def _reciprocal_of_exponent(token: str) -> Fraction:
    """A norm exponent written num/den or inf, returned as its reciprocal."""
    t = token.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return Fraction(0)
    p = parse_rational(token.strip())
    if p <= 1:
        raise ValueError(f"norm exponents must exceed 1 or be inf, got {token!r}")
    return 1 / p


def _exponent_list(text: str) -> HolderPoint:
    tokens = [tok for tok in str(text).split(",") if tok.strip()]
    if not tokens:
        raise ValueError(f"expected comma-separated exponents, got {text!r}")
    return HolderPoint(tuple(_reciprocal_of_exponent(tok) for tok in tokens))


def _fn_spec(text: str) -> TestFunctionSpec:
    t = str(text).strip()
    low = t.lower()
    if low == "ball":
        return TestFunctionSpec.Ball()
    if low == "sphere":
        return TestFunctionSpec.SphereIndicator()
    if low == "delta":
        return TestFunctionSpec.DeltaAtOrigin()
    if low.startswith("ball:"):
        rest = t[len("ball:"):]
        if not rest.startswith("a="):
            raise ValueError(f"ball options are written ball:a=<rational>, got {text!r}")
        return TestFunctionSpec.Ball(parse_rational(rest[len("a="):]))
    if low.startswith("ones:"):
        try:
            half_width = int(t[len("ones:"):])
        except ValueError:
            raise ValueError(f"ones takes an integer half-width, got {text!r}")
        return TestFunctionSpec.AllOnesBox(half_width)
    if low.startswith("file:"):
        return TestFunctionSpec.Custom(t[len("file:"):])
    raise ValueError(
        f"unknown test-function spec {text!r}; "
        "use ball[:a=<rational>], sphere, delta, ones:<half_width>, file:<path>"
    )


def _resolve_graph(args):
    graph_file = getattr(args, "graph_file", None)
    name = getattr(args, "graph", None)
    if graph_file and name:
        raise ValueError("pass --graph or --graph-file, not both")
    if graph_file:
        return graph_from_json(Path(graph_file).read_text(encoding="utf-8"))
    if not name:
        raise ValueError("a graph is required: --graph <name> or --graph-file <path>")
    return catalog_graph(name)


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, HolderPoint):
        return [str(c) for c in value.reciprocals]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


# ---------------------------------------------------------------------------
# Artifact emission.
# ---------------------------------------------------------------------------

def _write_manifest(out_path: Path, argv, subcommand: str, inputs: dict,
                    duration: float, outputs=None) -> Path:
    if outputs is None:
        outputs = [out_path]
    payload = {
        "argv": list(argv),
        "subcommand": subcommand,
        "inputs": {k: _jsonable(v) for k, v in inputs.items()},
        "version": __version__,
        "generated_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "duration_seconds": round(duration, 6),
        "outputs": [
            {
                "path": str(p),
                "bytes": p.stat().st_size,
                "sha256": hashlib.sha256(p.read_bytes()).hexdigest(),
            }
            for p in outputs
        ],
    }
    manifest_path = Path(str(out_path) + ".manifest.json")
    manifest_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return manifest_path


def _deliver(text: str, args, argv, inputs: dict, started: float) -> None:
    """Print to standard output, or write the file plus its manifest."""
    out = getattr(args, "out", None)
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text, encoding="utf-8")
    manifest = _write_manifest(
        path, argv, args.command, inputs, time.time() - started
    )
    print(f"wrote {path} and {manifest}", file=sys.stderr)


# ---------------------------------------------------------------------------
# Subcommand handlers.  Each returns the process exit status.
# ---------------------------------------------------------------------------

def _cmd_sphere(args, argv) -> int:
    started = time.time()
    shell = enumerate_sphere(args.d, args.lam, args.budget)
    text = f"{shell.count}\n" if args.count_only else shell_to_text(shell)
    _deliver(text, args, argv,
             {"d": args.d, "lambda": args.lam, "count_only": args.count_only},
             started)
    return 0


def _cmd_count(args, argv) -> int:
    started = time.time()
    g = _resolve_graph(args)
    n = completion_count(g, args.d, args.lam, args.budget)
    _deliver(f"{n}\n", args, argv,
             {"graph": g.name, "d": args.d, "lambda": args.lam}, started)
    return 0


def _cmd_admissible(args, argv) -> int:
    started = time.time()
    if args.min < 0 or args.max < args.min:
        raise ValueError(f"need 0 <= min <= max, got ({args.min}, {args.max})")
    g = _resolve_graph(args)
    values = sorted(
        admissible_radii(g, args.d, range(args.min, args.max + 1), args.budget)
    )
    _deliver(",".join(str(v) for v in values) + "\n", args, argv,
             {"graph": g.name, "d": args.d, "min": args.min, "max": args.max},
             started)
    return 0


def _cmd_eval(args, argv) -> int:
    started = time.time()
    g = _resolve_graph(args)
    specs = [_fn_spec(tok) for tok in args.fn]
    if len(specs) != g.vertex_count:
        raise ValueError(
            f"{g.name} needs {g.vertex_count} --fn entries, got {len(specs)}"
        )
    fns = [materialize(spec, args.d, args.lam, args.budget) for spec in specs]
    result = evaluate_form(
        g, args.lam, fns, _MODES[args.mode], strategy=args.strategy,
        budget=args.budget,
    )
    payload = {
        "graph": g.name,
        "d": args.d,
        "lambda": args.lam,
        "functions": list(args.fn),
        "mode": args.mode,
        "strategy": result.strategy_used,
        "value": result.value,
    }
    _deliver(json.dumps(payload, indent=2) + "\n", args, argv, payload, started)
    return 0


def _cmd_sweep(args, argv) -> int:
    started = time.time()
    g = _resolve_graph(args)
    specs = tuple(_fn_spec(tok) for tok in args.fn)
    holder = _exponent_list(args.p)
    plan = SweepPlan(
        graph=g,
        dimension=args.d,
        lambda_values=args.lambdas,
        functions=specs,
        holder=holder,
        normalization=_MODES[args.mode],
    )
    table = run_sweep(plan, args.budget, threads=args.threads)
    inputs = {
        "graph": g.name,
        "d": args.d,
        "lambdas": list(args.lambdas),
        "functions": list(args.fn),
        "p": args.p,
        "mode": args.mode,
        "threads": args.threads,
    }
    _deliver(table.to_csv(), args, argv, inputs, started)
    return 0


def _cmd_fit(args, argv) -> int:
    started = time.time()
    table = sweep_table_from_csv(Path(args.table).read_text(encoding="utf-8"))
    fit = fit_exponent(table)
    print(f"fit: table={args.table} rows={len(table)}", file=sys.stderr)
    _deliver(fit.to_json() + "\n", args, argv, {"table": args.table}, started)
    return 0


def _cmd_region(args, argv) -> int:
    started = time.time()
    if args.name and (args.graph or args.graph_file):
        raise ValueError("pass --graph for the vertex hull or --name for the "
                         "inequality system, not both")
    if args.name:
        if args.cross_validate is not None:
            region = builtin_region(args.name, args.d)
            system = builtin_halfspaces(args.name, args.d)
            report = cross_validate(region, system, args.cross_validate, args.seed)
            print(report.summary(), file=sys.stderr)
            _deliver(report.to_json() + "\n", args, argv,
                     {"name": args.name, "d": args.d,
                      "cross_validate": args.cross_validate, "seed": args.seed},
                     started)
            return 0
        system = builtin_halfspaces(args.name, args.d)
        if args.point is not None:
            verdict = system.verdict(args.point.reciprocals)
            _deliver(f"{verdict}\n", args, argv,
                     {"name": args.name, "d": args.d,
                      "point": args.point}, started)
            return 0
        lines = [f"{system.name}: {len(system.rows)} inequalities on "
                 f"{system.arity} coordinates"]
        lines.extend(f"  {row.label}" for row in system.rows)
        _deliver("\n".join(lines) + "\n", args, argv,
                 {"name": args.name, "d": args.d}, started)
        return 0
    g = _resolve_graph(args)
    region = builtin_region(g.name, args.d)
    if args.point is not None:
        verdict = hull_membership(args.point, region, method=args.method)
        _deliver(f"{verdict}\n", args, argv,
                 {"graph": g.name, "d": args.d, "point": args.point,
                  "method": args.method}, started)
        return 0
    if args.cross_validate is not None:
        system = builtin_halfspaces(g.name, args.d)
        report = cross_validate(region, system, args.cross_validate, args.seed)
        print(report.summary(), file=sys.stderr)
        _deliver(report.to_json() + "\n", args, argv,
                 {"graph": g.name, "d": args.d,
                  "cross_validate": args.cross_validate, "seed": args.seed},
                 started)
        return 0
    _deliver(region_to_json(region) + "\n", args, argv,
             {"graph": g.name, "d": args.d}, started)
    return 0


def _cmd_probe(args, argv) -> int:
    started = time.time()
    g = _resolve_graph(args)
    assignment = tuple(tok.strip() for tok in args.assign.split(",") if tok.strip())
    table = probe_sweep(g, args.d, assignment, lambdas=args.lambdas,
                        budget=args.budget)
    fit = fit_exponent(table)
    inputs = {
        "graph": g.name,
        "d": args.d,
        "assign": list(assignment),
        "lambdas": list(args.lambdas),
    }
    out = getattr(args, "out", None)
    if out is not None:
        # The artifact is the sweep table; the fitted slope goes to stdout.
        _deliver(table.to_csv(), args, argv, inputs, started)
    sys.stdout.write(fit.to_json() + "\n")
    return 0


def _cmd_counterexample(args, argv) -> int:
    started = time.time()
    if args.lmin > args.lmax:
        raise ValueError(f"need lmin <= lmax, got ({args.lmin}, {args.lmax})")
    reports = subgraph_counterexample(args.d, (args.lmin, args.lmax), args.budget)
    for report in reports:
        print(report.describe(dimension=args.d), file=sys.stderr)
    inputs = {"d": args.d, "lmin": args.lmin, "lmax": args.lmax}
    out = getattr(args, "out", None)
    if out is not None:
        prefix = Path(out)
        outputs = []
        for report in reports:
            path = Path(f"{prefix}_{report.graph}.json")
            path.write_text(report.to_json() + "\n", encoding="utf-8")
            outputs.append(path)
        manifest = _write_manifest(prefix, argv, args.command, inputs,
                                   time.time() - started, outputs)
        print(f"wrote {', '.join(str(p) for p in outputs)} and {manifest}",
              file=sys.stderr)
    body = "[\n" + ",\n".join(r.to_json() for r in reports) + "\n]"
    sys.stdout.write(body + "\n")
    return 0


def _cmd_report(args, argv) -> int:
    started = time.time()
    if not args.artifacts:
        raise ValueError("nothing to report: pass at least one artifact path")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for raw in args.artifacts:
        src = Path(raw)
        if not src.is_file():
            raise ValueError(f"artifact not found: {src}")
        dest = out_dir / src.name
        if src.resolve() != dest.resolve():
            shutil.copy2(src, dest)
        entry = {
            "path": dest.name,
            "bytes": dest.stat().st_size,
            "sha256": hashlib.sha256(dest.read_bytes()).hexdigest(),
        }
        sidecar = Path(str(src) + ".manifest.json")
        if sidecar.is_file():
            entry["invocation"] = json.loads(sidecar.read_text(encoding="utf-8"))
        entries.append(entry)
    manifest = {
        "artifacts": entries,
        "version": __version__,
        "generated_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "duration_seconds": round(time.time() - started, 6),
        "argv": list(argv),
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(entries)} artifact(s) and manifest.json to {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly.
# ---------------------------------------------------------------------------

def _add_graph_flags(p, required: bool = True) -> None:
    p.add_argument("--graph", help=f"catalog graph name ({', '.join(CATALOG_NAMES)}, "
                                   "Pk, Kk) ")
    p.add_argument("--graph-file", help="path to a JSON edge-list graph")
    if required:
        pass  # enforced in _resolve_graph so --graph-file can substitute


def _add_common(p, budget: bool = True, out: bool = True) -> None:
    if budget:
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="enumeration work budget (points x dimensions)")
    if out:
        p.add_argument("--out", help="write output here (plus a .manifest.json) "
                                     "instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticeforms",
        description="Exact distance-graph forms on integer lattices: spheres, "
                    "configuration counts, multilinear form values, scaling "
                    "sweeps, and rational membership tests.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sphere", help="enumerate a lattice sphere")
    p.add_argument("--d", type=int, required=True, help="ambient dimension")
    p.add_argument("--lambda", dest="lam", type=int, required=True,
                   help="squared radius")
    p.add_argument("--count-only", action="store_true",
                   help="print the cardinality instead of the points")
    _add_common(p)
    p.set_defaults(handler=_cmd_sphere)

    p = sub.add_parser("count", help="count graph configurations at one radius")
    _add_graph_flags(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_count)

    p = sub.add_parser("admissible",
                       help="list radii with at least one configuration")
    _add_graph_flags(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--min", type=int, required=True)
    p.add_argument("--max", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_admissible)

    p = sub.add_parser("eval", help="evaluate one form value")
    _add_graph_flags(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--fn", action="append", required=True,
                   help="test function, one per vertex: ball[:a=<rational>], "
                        "sphere, delta, ones:<half_width>, file:<path>")
    p.add_argument("--mode", choices=sorted(_MODES), default="exact",
                   help="exact = divide by the configuration count; raw = plain sum")
    p.add_argument("--strategy", choices=list(STRATEGIES), default=STRATEGY_AUTO)
    _add_common(p)
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("sweep", help="tabulate a form across radii")
    _add_graph_flags(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambdas", type=_int_list, required=True,
                   help="comma-separated squared radii, strictly increasing")
    p.add_argument("--fn", action="append", required=True,
                   help="test function per vertex (see eval)")
    p.add_argument("--p", required=True,
                   help="comma-separated norm exponents, each num/den > 1 or inf")
    p.add_argument("--mode", choices=sorted(_MODES), default="exact")
    p.add_argument("--threads", type=int, default=1,
                   help="compute radii concurrently; output is identical")
    _add_common(p)
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("fit", help="least-squares exponent from a sweep CSV")
    p.add_argument("--table", required=True, help="CSV written by sweep/probe")
    _add_common(p, budget=False)
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("region", help="membership tests and cross-validation")
    _add_graph_flags(p, required=False)
    p.add_argument("--name",
                   help="inequality-system name (P1, P2, P<k>, K3, K3t, sphavg)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--point", type=_rational_point,
                   help="comma-separated exact rationals (reciprocal exponents)")
    p.add_argument("--cross-validate", type=int, metavar="N",
                   help="sample N rational points and compare hull vs system")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--method", choices=("auto", "facets", "feasibility"),
                   default="auto", help="hull membership route")
    _add_common(p, budget=False)
    p.set_defaults(handler=_cmd_region)

    p = sub.add_parser("probe",
                       help="fit the decay of a sphere/delta vertex assignment")
    _add_graph_flags(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--assign", required=True,
                   help="comma-separated per-vertex choices among S and delta")
    p.add_argument("--lambdas", type=_int_list, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_probe)

    p = sub.add_parser("counterexample",
                       help="four-cycle decay versus the tetrahedron corner bound")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lmin", type=int, required=True)
    p.add_argument("--lmax", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_counterexample)

    p = sub.add_parser("report", help="bundle artifacts with a manifest")
    p.add_argument("artifacts", nargs="*",
                   help="CSV/JSON files produced by other subcommands")
    p.add_argument("--out", required=True, help="destination directory")
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv=None) -> int:
    argv_list = list(sys.argv[1:]) if argv is None else [str(a) for a in argv]
    parser = build_parser()
    try:
        args = parser.parse_args(argv_list)
    except SystemExit as exc:  # argparse already printed the diagnostic
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.handler(args, argv_list)
    except (AdmissibilityError, ZeroForm) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except BrokenPipeError:
        return 0
    except (LatticeFormsError, ValueError, TypeError, ArithmeticError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
