"""End-to-end tests of the command-line interface, run in process."""

import hashlib
import json

import pytest

from latticeforms import __version__
from latticeforms.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# Happy paths for the small subcommands.
# ---------------------------------------------------------------------------

def test_sphere_count_only(capsys):
    code, out, err = run_cli(capsys, "sphere", "--d", "5", "--lambda", "2",
                             "--count-only")
    assert code == 0
    assert out.strip() == "40"


def test_sphere_point_listing(capsys):
    code, out, _ = run_cli(capsys, "sphere", "--d", "2", "--lambda", "1")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "d=2 lambda=1 count=4"
    assert len(lines) == 5


def test_count_zero_is_success(capsys):
    # an inadmissible radius is an answer (zero), not an error
    code, out, _ = run_cli(capsys, "count", "--graph", "K3", "--d", "5",
                           "--lambda", "3")
    assert code == 0
    assert out.strip() == "0"


def test_count_from_graph_file(capsys, tmp_path):
    path = tmp_path / "edge.json"
    path.write_text(json.dumps(
        {"name": "edge", "vertex_count": 2, "edges": [[1, 2]]}
    ))
    code, out, _ = run_cli(capsys, "count", "--graph-file", str(path),
                           "--d", "5", "--lambda", "1")
    assert code == 0
    assert out.strip() == "10"


def test_admissible_listing(capsys):
    code, out, _ = run_cli(capsys, "admissible", "--graph", "K3", "--d", "5",
                           "--min", "1", "--max", "10")
    assert code == 0
    assert out.strip() == "2,4,6,8,10"


def test_version(capsys):
    code, out, _ = run_cli(capsys, "--version")
    assert code == 0
    assert out.strip() == __version__


# ---------------------------------------------------------------------------
# eval and region.
# ---------------------------------------------------------------------------

def test_eval_reports_value_and_echoes_inputs(capsys):
    code, out, _ = run_cli(capsys, "eval", "--graph", "K3", "--d", "5",
                           "--lambda", "2", "--fn", "ball", "--fn", "ball",
                           "--fn", "ball")
    assert code == 0
    payload = json.loads(out)
    assert payload["graph"] == "K3"
    assert payload["d"] == 5
    assert payload["lambda"] == 2
    assert payload["mode"] == "exact"
    assert len(payload["functions"]) == 3
    assert payload["value"] == 9.0


def test_eval_raw_sphere_pair(capsys):
    code, out, _ = run_cli(capsys, "eval", "--graph", "P1", "--d", "5",
                           "--lambda", "2", "--fn", "sphere", "--fn", "sphere",
                           "--mode", "raw")
    assert code == 0
    assert json.loads(out)["value"] == 480.0


def test_region_point_verdict(capsys):
    code, out, _ = run_cli(capsys, "region", "--name", "P1", "--d", "5",
                           "--point", "1/2,1/2")
    assert code == 0
    assert out.strip() == "boundary"


def test_region_cross_validate(capsys):
    code, out, err = run_cli(capsys, "region", "--name", "P2", "--d", "7",
                             "--cross-validate", "50", "--seed", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["strict_disagreement_count"] == 0
    assert payload["three_way_disagreement_count"] == 0
    assert payload["samples"] == 50
    assert "disagreements=0" in err


def test_region_hull_membership_by_graph(capsys):
    code, out, _ = run_cli(capsys, "region", "--graph", "K3", "--d", "7",
                           "--point", "5/12,5/12,5/12", "--method", "facets")
    assert code == 0
    assert out.strip() == "interior"


# ---------------------------------------------------------------------------
# sweep, fit, probe: file outputs and manifests.
# ---------------------------------------------------------------------------

def test_sweep_manifest_enables_exact_replay(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, out, err = run_cli(
        capsys, "sweep", "--graph", "P1", "--d", "5",
        "--lambdas", "1,2,3,4", "--fn", "ball", "--fn", "ball",
        "--p", "2,2", "--out", str(out_path),
    )
    assert code == 0
    assert out == ""  # the table went to the file, not stdout
    first_bytes = out_path.read_bytes()
    assert first_bytes.startswith(b"lambda,n_config,form_value,")

    manifest = json.loads((tmp_path / "sweep.csv.manifest.json").read_text())
    assert manifest["subcommand"] == "sweep"
    assert manifest["version"] == __version__
    assert manifest["duration_seconds"] >= 0
    (entry,) = [o for o in manifest["outputs"] if o["path"].endswith("sweep.csv")]
    assert entry["bytes"] == len(first_bytes)
    assert entry["sha256"] == hashlib.sha256(first_bytes).hexdigest()

    # replaying the recorded argv (to a fresh path) reproduces the bytes
    argv = list(manifest["argv"])
    replay_path = tmp_path / "replay.csv"
    argv[argv.index(str(out_path))] = str(replay_path)
    assert main(argv) == 0
    capsys.readouterr()
    assert replay_path.read_bytes() == first_bytes


def test_fit_from_csv_file(capsys, tmp_path):
    out_path = tmp_path / "table.csv"
    run_cli(capsys, "sweep", "--graph", "P1", "--d", "5",
            "--lambdas", "16,24,32,40", "--fn", "ball", "--fn", "ball",
            "--p", "2,2", "--out", str(out_path))
    code, out, err = run_cli(capsys, "fit", "--table", str(out_path))
    assert code == 0
    payload = json.loads(out)
    assert sorted(payload) == ["intercept", "lambda_count", "max_residual", "slope"]
    assert payload["lambda_count"] == 4
    assert "rows=4" in err


def test_probe_fit_and_table(capsys, tmp_path):
    out_path = tmp_path / "probe.csv"
    code, out, _ = run_cli(capsys, "probe", "--graph", "P2", "--d", "5",
                           "--assign", "S,delta,S", "--lambdas", "2,4,6,8",
                           "--out", str(out_path))
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["slope"]) < 1e-12  # the centered probe is constant
    lines = out_path.read_text().strip().split("\n")
    assert len(lines) == 5
    assert (tmp_path / "probe.csv.manifest.json").exists()


def test_counterexample_writes_both_reports(capsys, tmp_path):
    prefix = tmp_path / "cx"
    code, out, err = run_cli(capsys, "counterexample", "--d", "7",
                             "--lmin", "10", "--lmax", "24",
                             "--out", str(prefix))
    assert code == 0
    reports = json.loads(out)
    assert [r["graph"] for r in reports] == ["C4", "C4t"]
    assert all(r["violation"] for r in reports)
    assert "VIOLATION" in err
    for suffix in ("_C4.json", "_C4t.json"):
        saved = json.loads((tmp_path / ("cx" + suffix)).read_text())
        assert saved["conjectured_bound_slope"] == "-7/4"
    assert (tmp_path / "cx.manifest.json").exists()


def test_report_bundles_artifacts(capsys, tmp_path):
    csv_path = tmp_path / "probe.csv"
    run_cli(capsys, "probe", "--graph", "P2", "--d", "5",
            "--assign", "delta,S,delta", "--lambdas", "2,4,6,8",
            "--out", str(csv_path))
    bundle = tmp_path / "bundle"
    code, out, _ = run_cli(capsys, "report", str(csv_path),
                           "--out", str(bundle))
    assert code == 0
    assert (bundle / "probe.csv").read_bytes() == csv_path.read_bytes()
    manifest = json.loads((bundle / "manifest.json").read_text())
    assert manifest["argv"][0] == "report"
    (entry,) = [a for a in manifest["artifacts"] if a["path"] == "probe.csv"]
    assert entry["bytes"] == len(csv_path.read_bytes())
    # the sidecar manifest of the copied artifact rides along as provenance
    assert entry["invocation"]["subcommand"] == "probe"


def test_report_requires_artifacts(capsys, tmp_path):
    code, _, err = run_cli(capsys, "report", "--out", str(tmp_path / "b"))
    assert code == 2
    assert "error" in err.lower()


# ---------------------------------------------------------------------------
# Failure modes map to distinct exit codes.
# ---------------------------------------------------------------------------

def test_usage_errors_exit_2(capsys):
    assert run_cli(capsys, "sphere", "--d", "5")[0] == 2          # missing flag
    assert run_cli(capsys, "no-such-command")[0] == 2
    code, _, err = run_cli(capsys, "count", "--graph", "Q9", "--d", "5",
                           "--lambda", "2")
    assert code == 2 and "error" in err.lower()
    # both a catalog name and a file is ambiguous
    code, _, _ = run_cli(capsys, "count", "--graph", "K3", "--graph-file",
                         "x.json", "--d", "5", "--lambda", "2")
    assert code == 2


def test_decimal_exponents_are_rejected(capsys):
    code, _, err = run_cli(capsys, "region", "--name", "P1", "--d", "5",
                           "--point", "0.5,0.5")
    assert code == 2
    assert "error" in err.lower()


def test_inadmissible_exact_evaluation_exits_3(capsys):
    code, _, err = run_cli(capsys, "eval", "--graph", "K3", "--d", "5",
                           "--lambda", "3", "--fn", "ball", "--fn", "ball",
                           "--fn", "ball")
    assert code == 3
    assert "error" in err.lower()


def test_probe_with_no_admissible_radii_exits_3(capsys):
    code, _, _ = run_cli(capsys, "probe", "--graph", "K3", "--d", "5",
                         "--assign", "S,S,S", "--lambdas", "3,5,7,9")
    assert code == 3


def test_capacity_overflow_exits_4(capsys):
    code, _, err = run_cli(capsys, "sphere", "--d", "6", "--lambda", "30",
                           "--budget", "10")
    assert code == 4
    assert "error" in err.lower()
