"""Config parsing, subcommand dispatch, and output reproducibility.

Frozen values used here:
  two-loop ladder subsystem dimension  0.5514630897455955
  golden pair {1/2, 1/4} dimension     0.6942419136306174
"""

import io
import json

import pytest

from gifsdim.cli import RunConfig, main, parse_config, run
from gifsdim.errors import SchemaViolation

TWO_LOOP = 0.5514630897455955
GOLDEN = 0.6942419136306174


def capture(command, config):
    stream = io.StringIO()
    code = run(command, config, stream=stream)
    lines = [json.loads(line) for line in stream.getvalue().splitlines()]
    return code, lines


def test_minimal_config_defaults():
    cfg = parse_config('{"scenario": "ladder_6_1"}')
    assert cfg.scenario == "ladder_6_1"
    assert cfg.scenario_options == {}
    assert cfg.s is None and cfg.output is None
    assert cfg.seed == 0 and cfg.threads == 1 and cfg.binary is False
    assert len(cfg.digest) == 64
    assert set(cfg.digest) <= set("0123456789abcdef")


def test_digest_ignores_key_order_but_not_values():
    a = parse_config('{"scenario": "cantor", "s_tol": 0.001}')
    b = parse_config('{"s_tol": 0.001, "scenario": "cantor"}')
    c = parse_config('{"scenario": "cantor", "s_tol": 0.002}')
    assert a.digest == b.digest
    assert a.digest != c.digest


def test_schema_violations_are_collected():
    bad = json.dumps(
        {
            "scenario": "cf_perturbed",
            "wat": 1,
            "epsilon": 1.5,
            "epsilons": [0.5, 2.0],
            "horizons": [10, 5],
            "s": -0.25,
        }
    )
    with pytest.raises(SchemaViolation) as exc:
        parse_config(bad)
    paths = [v.split(":")[0] for v in exc.value.violations]
    assert "wat" in paths
    assert "epsilon" in paths
    assert "epsilons[1]" in paths
    assert "horizons" in paths
    assert "s" in paths
    assert "scenario_options.sub_letters" in paths
    assert "epsilons[0]" not in paths


def test_inline_scenario_checked_fieldwise():
    with pytest.raises(SchemaViolation) as exc:
        parse_config('{"scenario": {"kind": "box", "ratios": [0.5, 1.2]}}')
    joined = " ".join(exc.value.violations)
    assert "scenario.kind" in joined
    assert "scenario.ratios[1]" in joined


def test_analyze_inline_similarity_passes():
    cfg = parse_config(
        '{"scenario": {"kind": "similarity", "ratios": [0.3, 0.3],'
        ' "offsets": [0.0, 0.7]}}'
    )
    code, lines = capture("analyze", cfg)
    assert code == 0
    rec = lines[0]
    assert rec["command"] == "analyze"
    assert rec["config_digest"] == cfg.digest
    assert rec["findings"] == []
    assert rec["separation"]["verdict"] == "certified-separated"
    assert rec["checks"]["uniform-contraction"]["status"] == "satisfied"
    assert rec["scc"]["nontrivial"] == 1


def test_analyze_reports_overlap_with_exit_2():
    cfg = parse_config(
        '{"scenario": {"kind": "similarity", "ratios": [0.6, 0.6],'
        ' "offsets": [0.0, 0.1]}}'
    )
    code, lines = capture("analyze", cfg)
    assert code == 2
    findings = lines[0]["findings"]
    assert any(f["status"] == "overlap-witness" for f in findings)


def test_dimension_two_loop_subsystem():
    cfg = parse_config(
        '{"scenario": "ladder_6_1",'
        ' "scenario_options": {"truncate_vertices": 2}, "s_tol": 1e-05}'
    )
    code, lines = capture("dimension", cfg)
    assert code == 0
    rec = lines[0]
    assert rec["command"] == "dimension"
    assert rec["s_tol"] == 1e-5
    res = rec["result"]
    assert res["s_lower"] <= TWO_LOOP <= res["s_upper"]
    assert res["s_upper"] - res["s_lower"] <= 1e-4


def test_pressure_vanishes_at_golden_dimension():
    cfg = parse_config(json.dumps({"scenario": "golden", "s": GOLDEN}))
    code, lines = capture("pressure", cfg)
    assert code == 0
    est = lines[0]["estimate"]
    assert est["scope"] == "full"
    assert abs(est["lower"]) <= 1e-9
    assert abs(est["upper"]) <= 1e-9


def test_pressure_without_s_faults():
    cfg = parse_config('{"scenario": "golden"}')
    code, lines = capture("pressure", cfg)
    assert code == 1
    assert lines[0]["error"] == "SchemaViolation"
    assert "s:" in lines[0]["message"]


def test_unknown_command_faults():
    cfg = parse_config('{"scenario": "golden"}')
    code, lines = capture("frobnicate", cfg)
    assert code == 1
    assert lines[0]["error"] == "SchemaViolation"


def test_components_splits_affine_demo():
    cfg = parse_config('{"scenario": "affine_demo", "s_tol": 0.001}')
    code, lines = capture("components", cfg)
    assert code == 0
    assert len(lines) == 1
    rec = lines[0]
    assert sorted(rec["component"]) == ["(1, 1)", "(1, 2)", "(2, 1)"]
    assert rec["result"]["s_lower"] <= rec["result"]["s_upper"]


def test_render_is_reproducible(tmp_path):
    out1 = tmp_path / "a.pgm"
    out2 = tmp_path / "b.pgm"
    base = {
        "scenario": "cf",
        "scenario_options": {"letters": [1, 2]},
        "render_depth": 5,
        "resolution": 64,
    }
    meta = None
    for out in (out1, out2):
        cfg = parse_config(json.dumps(dict(base, output=str(out))))
        stream = io.StringIO()
        assert run("render", cfg, stream=stream) == 0
        meta = json.loads(stream.getvalue())
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes().startswith(b"P2\n64 64\n")
    assert meta["width"] == 64 and meta["height"] == 64
    assert meta["occupied"] > 0
    assert meta["config_digest"] == cfg.digest


def test_sweep_writes_reproducible_csv(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    base = {
        "scenario": "affine_family",
        "epsilons": [0.25, 0.125],
        "s_tol": 0.001,
    }
    for out in (out1, out2):
        cfg = parse_config(json.dumps(dict(base, output=str(out))))
        stream = io.StringIO()
        assert run("sweep", cfg, stream=stream) == 0
        meta = json.loads(stream.getvalue())
        assert meta["rows"] == 3
        assert meta["statuses"] == ["ok", "ok", "ok"]
    data = out1.read_bytes()
    assert data == out2.read_bytes()
    assert data.startswith(b"epsilon,s_lower,s_upper,base_lower,base_upper,status\r\n")


def test_sweep_requires_output():
    cfg = parse_config('{"scenario": "affine_family"}')
    code, lines = capture("sweep", cfg)
    assert code == 1
    assert "output" in lines[0]["message"]


def test_probe_divergence_certifies_cf_degeneracy():
    cfg = parse_config(
        '{"scenario": "cf_family",'
        ' "scenario_options": {"sub_letters": [1, 2]},'
        ' "s": 0.99, "epsilons": [0.25, 0.0625]}'
    )
    code, lines = capture("probe-divergence", cfg)
    assert code == 0
    assert len(lines) == 2
    for rec, eps in zip(lines, (0.25, 0.0625)):
        assert rec["report"]["verdict"] == "diverges"
        assert rec["report"]["epsilon"] == eps
        assert rec["report"]["implied_lower_bound"] == 0.99
        assert rec["horizons"] == [5, 10, 20]


def test_reduce_golden_yields_simple_graph():
    cfg = parse_config('{"scenario": "golden"}')
    code, lines = capture("reduce", cfg)
    assert code == 0
    rec = lines[0]
    assert rec["reduced_from"] == "golden"
    assert len(rec["vertices"]) >= 2
    pairs = [(e["initial"], e["terminal"]) for e in rec["edges"]]
    assert len(pairs) == len(set(pairs))
    for e in rec["edges"]:
        assert "kind" in e["map"]


def test_main_reads_config_file_and_applies_overrides(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(
        json.dumps(
            {
                "scenario": "ladder_6_1",
                "scenario_options": {"truncate_vertices": 2},
                "s_tol": 0.01,
            }
        )
    )
    code = main(["dimension", "--config", str(path), "--set", "s_tol=0.001"])
    assert code == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["s_tol"] == 0.001
    res = rec["result"]
    assert res["s_lower"] <= TWO_LOOP <= res["s_upper"]


def test_main_rejects_bad_epsilon(capsys):
    code = main(["sweep", "--set", "scenario=affine_family", "--set", "epsilon=1.5"])
    assert code == 1
    rec = json.loads(capsys.readouterr().out)
    assert rec["error"] == "SchemaViolation"
    assert "epsilon" in rec["message"]


def test_main_missing_config_file(capsys):
    code = main(["analyze", "--config", "/nonexistent/nope.json"])
    assert code == 1
    rec = json.loads(capsys.readouterr().out)
    assert rec["error"] == "SchemaViolation"


def test_output_redirects_records(tmp_path):
    out = tmp_path / "dim.jsonl"
    cfg = parse_config(
        json.dumps(
            {
                "scenario": "cantor",
                "s_tol": 0.001,
                "output": str(out),
            }
        )
    )
    stream = io.StringIO()
    assert run("dimension", cfg, stream=stream) == 0
    assert stream.getvalue() == ""
    rec = json.loads(out.read_text())
    assert rec["result"]["s_lower"] <= 0.6309297535714574 <= rec["result"]["s_upper"]


def test_runconfig_is_frozen():
    cfg = parse_config('{"scenario": "cantor"}')
    with pytest.raises(Exception):
        cfg.digest = "nope"
    assert isinstance(cfg, RunConfig)
