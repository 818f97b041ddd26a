import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from polarize import Graph, metrics_from_internal, parse_edge_list, schemas, serialize_edge_list, write_opinions_csv
from polarize.cli import main
from polarize.errors import NoConvergenceError
from polarize.metrics import MetricReport, MetricRoute

_VALIDATORS = {name: jsonschema.Draft202012Validator(schemas.load(name)) for name in schemas.names()}

_BY_FILENAME = {
    "manifest.json": "manifest",
    "metrics.json": "metrics",
    "demo_echo.json": "demo_echo",
    "admin_summary.json": "admin_summary",
    "report.json": "optimize_report",
}


def validate_outputs(out: Path) -> int:
    """Validate every JSON document in a run directory; returns how many."""
    count = 0
    for p in sorted(out.iterdir()):
        if p.name == "admin_rounds.jsonl":
            for line in p.read_text().splitlines():
                _VALIDATORS["admin_round"].validate(json.loads(line))
                count += 1
        elif p.suffix == ".json":
            name = _BY_FILENAME.get(p.name, "attack" if p.name.startswith("attack_") else None)
            assert name is not None, f"no schema mapped for {p.name}"
            _VALIDATORS[name].validate(json.loads(p.read_text()))
            count += 1
    assert count > 0
    return count


def write_inputs(tmp_path: Path, g: Graph, s) -> tuple[str, str]:
    gp = tmp_path / "graph.txt"
    sp = tmp_path / "opinions.csv"
    gp.write_text(serialize_edge_list(g))
    sp.write_text(write_opinions_csv(np.asarray(s, dtype=float)))
    return str(gp), str(sp)


def read_csv_column(path: Path, column: int = 1) -> list[float]:
    lines = path.read_text().splitlines()
    return [float(line.split(",")[column]) for line in lines[1:]]


def test_simulate_k2(tmp_path, k2):
    gp, sp = write_inputs(tmp_path, k2, [0.0, 1.0])
    out = tmp_path / "run"
    assert main(["simulate", gp, sp, "--out", str(out)]) == 0
    z = read_csv_column(out / "equilibrium.csv")
    assert np.allclose(z, [1 / 3, 2 / 3], atol=1e-10)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert "equilibrium.csv" in manifest["outputs"]
    validate_outputs(out)


def test_simulate_trajectory(tmp_path, k2):
    gp, sp = write_inputs(tmp_path, k2, [0.0, 1.0])
    out = tmp_path / "run"
    assert main(["simulate", gp, sp, "--trajectory", "--out", str(out)]) == 0
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "step,z0,z1"
    last = [float(tok) for tok in lines[-1].split(",")[1:]]
    assert np.allclose(last, [1 / 3, 2 / 3], atol=1e-8)


def test_exit_codes_for_bad_inputs(tmp_path, k2):
    gp, sp = write_inputs(tmp_path, k2, [0.0, 1.0])
    out = str(tmp_path / "run")
    # missing file and malformed lines are parse failures
    assert main(["simulate", str(tmp_path / "nope.txt"), sp, "--out", out]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n0 zero 1.0\n")
    assert main(["simulate", str(bad), sp, "--out", out]) == 2
    # wrong length and out-of-range opinions are feasibility failures
    sp3 = tmp_path / "three.csv"
    sp3.write_text(write_opinions_csv(np.array([0.1, 0.2, 0.3])))
    assert main(["simulate", gp, str(sp3), "--out", out]) == 3
    sp_range = tmp_path / "range.csv"
    sp_range.write_text(write_opinions_csv(np.array([0.2, 1.5])))
    assert main(["attack", gp, str(sp_range), "--k", "1", "--out", out, "--no-figures"]) == 3


def test_exit_codes_for_solver_and_internal_failures(tmp_path, k2, monkeypatch):
    gp, sp = write_inputs(tmp_path, k2, [0.0, 1.0])

    def boom(*args, **kwargs):
        raise NoConvergenceError("forced")

    monkeypatch.setattr("polarize.cli.equilibrium", boom)
    assert main(["simulate", gp, sp, "--out", str(tmp_path / "a")]) == 4

    swapped = MetricReport(0.0, 1.0, 1.0, 1.0, MetricRoute.FROM_Z)
    monkeypatch.setattr("polarize.cli.metrics_from_internal", lambda *a, **k: swapped)
    assert main(["demo-echo", "--out", str(tmp_path / "b"), "--no-figures"]) == 5


def test_metrics_k2_values(tmp_path, k2, capsys):
    gp, sp = write_inputs(tmp_path, k2, [0.0, 1.0])
    out = tmp_path / "run"
    assert main(["metrics", gp, sp, "--out", str(out)]) == 0
    doc = json.loads((out / "metrics.json").read_text())
    assert doc["polarization"] == pytest.approx(1 / 18, rel=1e-12)
    assert doc["disagreement"] == pytest.approx(1 / 9, rel=1e-12)
    assert doc["pdi"] == pytest.approx(1 / 6, rel=1e-12)
    # the report is echoed to stdout byte for byte
    assert capsys.readouterr().out == (out / "metrics.json").read_text()
    validate_outputs(out)


def test_metrics_routes_agree(tmp_path):
    g = Graph(4, [(0, 1, 0.8), (1, 2, 0.5), (2, 3, 1.2), (0, 3, 0.3)])
    gp, sp = write_inputs(tmp_path, g, [0.1, 0.9, 0.4, 0.7])
    values = {}
    for route in ("from_z", "from_sbar", "from_s"):
        out = tmp_path / route
        assert main(["metrics", gp, sp, "--route", route, "--out", str(out)]) == 0
        values[route] = json.loads((out / "metrics.json").read_text())
    for key in ("polarization", "disagreement", "pdi"):
        got = [values[r][key] for r in values]
        assert max(got) - min(got) <= 1e-9 * max(1.0, max(map(abs, got)))


def test_metrics_mu_scales_disagreement(tmp_path, k2):
    gp, sp = write_inputs(tmp_path, k2, [0.0, 1.0])
    out = tmp_path / "run"
    assert main(["metrics", gp, sp, "--mu", "2.5", "--out", str(out)]) == 0
    doc = json.loads((out / "metrics.json").read_text())
    assert doc["pdi"] == pytest.approx(doc["polarization"] + 2.5 * doc["disagreement"], rel=1e-12)


def test_demo_echo_outputs(tmp_path):
    out = tmp_path / "run"
    assert main(["demo-echo", "--out", str(out), "--no-figures"]) == 0
    doc = json.loads((out / "demo_echo.json").read_text())
    assert doc["polarization_higher_in_scenario1"] is True
    assert doc["disagreement_lower_in_scenario1"] is True
    assert doc["scenario1"]["polarization"] > doc["scenario2"]["polarization"]
    assert doc["scenario1"]["disagreement"] < doc["scenario2"]["disagreement"]
    for name in ("scenario1_graph.txt", "scenario2_graph.txt", "opinions.csv"):
        assert (out / name).exists()
    validate_outputs(out)


def test_manifest_lists_every_output(tmp_path):
    out = tmp_path / "run"
    assert main(["demo-echo", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    on_disk = sorted(p.name for p in out.iterdir() if p.name != "manifest.json")
    assert manifest["outputs"] == on_disk
    assert "demo_metrics.png" in manifest["outputs"]


def test_admin_zero_budget_matches_metrics(tmp_path):
    g = Graph(4, [(0, 1, 1.0), (1, 2, 0.5), (2, 3, 1.0), (0, 3, 0.5)])
    s = [0.1, 0.8, 0.3, 0.9]
    gp, sp = write_inputs(tmp_path, g, s)
    out = tmp_path / "run"
    assert main(["admin", gp, sp, "--epsilon", "0", "--rounds", "1", "--out", str(out), "--no-figures"]) == 0
    summary = json.loads((out / "admin_summary.json").read_text())
    base = metrics_from_internal(g, np.array(s))
    assert summary["final_polarization"][0] == pytest.approx(base.polarization, rel=1e-10)
    assert summary["final_disagreement"][0] == pytest.approx(base.disagreement, rel=1e-10)
    validate_outputs(out)


def test_admin_sweep_files(tmp_path):
    g = Graph(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (0, 4, 1.0)])
    gp, sp = write_inputs(tmp_path, g, [0.0, 0.2, 0.5, 0.8, 1.0])
    out = tmp_path / "run"
    rc = main(["admin", gp, sp, "--epsilon", "0.1,0.3", "--rounds", "3", "--jobs", "2", "--out", str(out), "--no-figures"])
    assert rc == 0
    summary = json.loads((out / "admin_summary.json").read_text())
    assert summary["epsilons"] == [0.1, 0.3]
    assert (out / "admin_final_0.txt").exists() and (out / "admin_final_1.txt").exists()
    rows = (out / "admin_sweep.csv").read_text().splitlines()
    assert rows[0] == "round,epsilon,polarization,disagreement"
    assert len(rows) - 1 == sum(summary["rounds_used"])
    validate_outputs(out)


def test_attack_curve_shape_and_dominance(tmp_path):
    g = Graph(6, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0), (0, 5, 1.0), (1, 4, 0.5)])
    gp, sp = write_inputs(tmp_path, g, [0.3, 0.5, 0.4, 0.6, 0.5, 0.7])
    out = tmp_path / "run"
    assert main(["attack", gp, sp, "--k", "2", "--out", str(out), "--no-figures"]) == 0
    rows = (out / "attack_curve.csv").read_text().splitlines()
    assert rows[0] == "algorithm,k,objective"
    algorithms = ("greedy", "mean-opinion", "max-connection", "max-degree")
    assert len(rows) - 1 == len(algorithms) * 3  # k = 0, 1, 2 for each
    docs = {name: json.loads((out / f"attack_{name.replace('-', '_')}.json").read_text()) for name in algorithms}
    for name in algorithms[1:]:
        assert docs[name]["objective"] <= docs["greedy"]["objective"] + 1e-10
    validate_outputs(out)


def test_attack_brute_force_and_zero_budget(tmp_path, star4):
    gp, sp = write_inputs(tmp_path, star4, [0.2, 0.5, 0.5, 0.8])
    out1 = tmp_path / "bf"
    assert main(["attack", gp, sp, "--k", "2", "--algorithm", "brute-force", "--out", str(out1), "--no-figures"]) == 0
    rows = (out1 / "attack_curve.csv").read_text().splitlines()
    assert len(rows) == 3  # header plus k=0 and k=2
    validate_outputs(out1)
    out2 = tmp_path / "zero"
    assert main(["attack", gp, sp, "--k", "0", "--algorithm", "greedy", "--out", str(out2), "--no-figures"]) == 0
    doc = json.loads((out2 / "attack_greedy.json").read_text())
    assert doc["objective"] == doc["baseline"] and doc["omega"] == []


def test_optimize_zero_budgets_keep_inputs(tmp_path):
    g = Graph(4, [(0, 1, 0.8), (1, 2, 0.5), (2, 3, 0.9)])
    s = [0.2, 0.6, 0.4, 0.8]
    gp, sp = write_inputs(tmp_path, g, s)
    out1 = tmp_path / "acr"
    assert main(["optimize", "acr", gp, "--change-budget", "0", "--out", str(out1), "--no-figures"]) == 0
    assert parse_edge_list((out1 / "optimized_graph.txt").read_text()).edges == g.edges
    doc = json.loads((out1 / "report.json").read_text())
    assert doc["objective"] == pytest.approx(doc["baseline"], rel=1e-12)
    validate_outputs(out1)
    out2 = tmp_path / "shift"
    assert main(["optimize", "shift", gp, sp, "--alpha", "0", "--out", str(out2), "--no-figures"]) == 0
    doc = json.loads((out2 / "report.json").read_text())
    assert doc["budget_used"] == 0.0
    assert doc["objective"] == pytest.approx(doc["baseline"], rel=1e-12)
    assert all(v == 0.0 for v in read_csv_column(out2 / "shift_reduction.csv"))
    validate_outputs(out2)


def test_optimize_pdi_laplacian_respects_trace(tmp_path):
    sp = tmp_path / "opinions.csv"
    sp.write_text(write_opinions_csv(np.array([0.0, 0.4, 0.7, 1.0])))
    out = tmp_path / "run"
    assert main(["optimize", "pdi-laplacian", str(sp), "--trace-budget", "2.0", "--out", str(out), "--no-figures"]) == 0
    g = parse_edge_list((out / "optimized_graph.txt").read_text())
    assert float(np.sum(g.degrees())) == pytest.approx(2.0, abs=1e-6)
    validate_outputs(out)


def test_optimize_shift_full_budget_erases_pdi(tmp_path, triangle):
    s = [0.2, 0.5, 0.9]
    gp, sp = write_inputs(tmp_path, triangle, s)
    out = tmp_path / "run"
    assert main(["optimize", "shift", gp, sp, "--alpha", str(sum(s)), "--out", str(out), "--no-figures"]) == 0
    doc = json.loads((out / "report.json").read_text())
    assert doc["objective"] <= 1e-9
    validate_outputs(out)


def test_seed_resolution(tmp_path, k2, monkeypatch):
    gp, sp = write_inputs(tmp_path, k2, [0.0, 1.0])
    out1 = tmp_path / "a"
    assert main(["metrics", gp, sp, "--seed", "3", "--out", str(out1)]) == 0
    assert json.loads((out1 / "manifest.json").read_text())["seed"] == 3
    monkeypatch.setenv("POLARIZE_SEED", "7")
    out2 = tmp_path / "b"
    assert main(["metrics", gp, sp, "--out", str(out2)]) == 0
    assert json.loads((out2 / "manifest.json").read_text())["seed"] == 7
    monkeypatch.setenv("POLARIZE_SEED", "xyz")
    assert main(["metrics", gp, sp, "--out", str(tmp_path / "c")]) == 2


def test_version_flag_exits_zero():
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
