#!/usr/bin/env python3
"""
End-to-end tests for the contextkit command line.
"""

import json

import pytest

from contextkit.cli import run
from contextkit.fixtures import compression_contextual, copy_box, marble_document


def invoke(capsys, *argv):
    code = run([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def report_of(capsys, *argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def fixture_dir(tmp_path, capsys):
    code, _, err = invoke(capsys, "fixtures", "extract", "all", "--dir", tmp_path)
    assert code == 0, err
    return tmp_path


def test_builtin_counterfactual_construction(capsys):
    doc = report_of(capsys, "counterfactual")
    assert doc["schema_version"] == "1.0"
    assert doc["command"] == "counterfactual"
    v = doc["verdicts"]
    assert v["verdict"] == "INFEASIBLE"
    assert set(v["leave_one_out"].values()) == {"INFEASIBLE"}
    assert len(v["leave_one_out"]) == 5
    assert v["p135_weight_111"] == [0, 0]
    assert v["p135_p12_bias_differs"] is True
    assert v["preparation_contextual"] is True
    assert v["factorisation"] == "fine-tuned"
    assert doc["certificates"]["farkas_verified"] is True
    assert "wall_time" not in doc


def test_counterfactual_instance_file(capsys, fixture_dir):
    doc = report_of(capsys, "counterfactual", fixture_dir / "six-state.json")
    assert doc["verdicts"]["verdict"] == "INFEASIBLE"
    assert doc["inputs_digest"].startswith("sha256:")


@pytest.mark.parametrize("name,level", [
    ("pr-box", "strong"),
    ("hardy", "possibilistic"),
    ("chsh-quantum", "probabilistic"),
    ("classical-product", "noncontextual"),
])
def test_classify_fixtures(capsys, fixture_dir, name, level):
    doc = report_of(capsys, "classify", fixture_dir / f"{name}.json")
    assert doc["verdicts"]["level"] == level
    assert doc["verdicts"]["no_disturbance"] is True


def test_graph_bounds_and_dot_output(capsys, fixture_dir, tmp_path):
    dot = tmp_path / "kcbs.dot"
    doc = report_of(capsys, "graph", fixture_dir / "kcbs-cycle.json", "--dot", dot)
    v = doc["verdicts"]
    assert v["alpha"] == 2
    assert v["fractional_packing"] == "5/2"
    assert v["theta"] == pytest.approx(2.2361, abs=1e-3)
    assert v["nchv_exists"] is True
    assert dot.read_text().startswith("graph exclusivity {")


def test_quantum_pentagon_exceeds_the_noncontextual_bound(capsys, fixture_dir):
    v = report_of(capsys, "graph", fixture_dir / "kcbs-quantum.json")["verdicts"]
    assert v["probabilistic_model"] is True
    assert v["exclusivity"] is True
    assert v["witness"] == pytest.approx(2.2361, abs=1e-3)


def test_graph_csv_table(capsys, fixture_dir):
    code, out, _ = invoke(capsys, "graph", fixture_dir / "kcbs-cycle.json", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "vertex,weight,in_independent_set,packing"
    assert len(lines) == 6
    assert lines[1].startswith("v0,1,True,")


def test_resource_cap_exit_code(capsys, fixture_dir):
    code, out, err = invoke(capsys, "graph", fixture_dir / "kcbs-cycle.json", "--cap", 2)
    assert code == 3
    assert out == ""
    assert err.startswith("contextkit: error:")


def test_compress_reports_negativity(capsys, fixture_dir):
    v = report_of(capsys, "compress", fixture_dir / "compress-contextual.json")["verdicts"]
    assert v["ontic_dimension"] == 4
    assert v["quasi_dimension"] == 3
    assert v["negative_entries"] >= 1
    assert v["prediction_error"] < 1e-10


def test_validate_exit_codes(capsys, write_json, tmp_path):
    bad_json = tmp_path / "broken.json"
    bad_json.write_text("{", encoding="utf-8")
    code, _, err = invoke(capsys, "validate", bad_json)
    assert code == 2
    assert "malformed JSON" in err

    doc = dict(compression_contextual().to_dict(), kind="model")
    doc["preparations"]["P1"] = [0.5, 0.5, 0.5, 0]
    code, out, _ = invoke(capsys, "validate", write_json("model.json", doc))
    assert code == 1
    report = json.loads(out)
    assert report["verdicts"]["valid"] is False
    assert report["certificates"]["violations"][0]["code"] == "condition-2"

    scenario = {"kind": "scenario", "measurements": ["A", "B", "C"],
                "contexts": [{"id": "c1", "members": ["A", "B"]}, {"id": "c2", "members": ["B", "C"]}]}
    dot = tmp_path / "scenario.dot"
    code, out, _ = invoke(capsys, "validate", write_json("scenario.json", scenario), "--dot", dot)
    assert code == 0
    assert json.loads(out)["verdicts"] == {"kind": "scenario", "valid": True}
    assert dot.exists()


def test_missing_file_is_an_input_error(capsys, tmp_path):
    code, _, err = invoke(capsys, "classify", tmp_path / "nope.json")
    assert code == 2
    assert "cannot read file" in err


def test_invalid_utf8_is_an_input_error(capsys, tmp_path):
    bad = tmp_path / "latin1.json"
    bad.write_bytes(b'{"kind": "\xff"}')
    code, out, err = invoke(capsys, "validate", bad)
    assert code == 2
    assert out == ""
    assert "not valid UTF-8" in err
    assert str(bad) in err


def test_non_integer_outcome_is_an_input_error(capsys, write_json):
    doc = dict(compression_contextual().to_dict(), kind="model")
    doc["responses"][0]["outcome"] = "x"
    code, out, err = invoke(capsys, "compress", write_json("model.json", doc))
    assert code == 2
    assert out == ""
    assert "responses[0].outcome" in err


def test_loop_audit_of_copy_box(capsys, write_json):
    doc = report_of(capsys, "loop", write_json("copy.json", copy_box().to_dict()))
    assert doc["verdicts"]["verdict"] == "determinism-failure"
    assert doc["verdicts"]["unique_everywhere"] is False
    assert doc["verdicts"]["identity_residual"] < 1e-10


def test_reports_are_byte_identical_across_runs(capsys, fixture_dir):
    _, first, _ = invoke(capsys, "classify", fixture_dir / "pr-box.json")
    _, second, _ = invoke(capsys, "classify", fixture_dir / "pr-box.json")
    assert first == second


def test_timing_is_opt_in(capsys, fixture_dir):
    doc = report_of(capsys, "classify", fixture_dir / "classical-product.json", "--timing")
    assert doc["wall_time"] >= 0


def test_report_written_to_file(capsys, fixture_dir, tmp_path):
    out = tmp_path / "report.json"
    code, stdout, _ = invoke(capsys, "classify", fixture_dir / "pr-box.json", "--out", out)
    assert code == 0
    assert stdout == ""
    assert json.loads(out.read_text())["verdicts"]["level"] == "strong"
    invoke(capsys, "classify", fixture_dir / "hardy.json", "--out", out)
    assert json.loads(out.read_text())["verdicts"]["level"] == "possibilistic"
    assert sorted(p.name for p in tmp_path.iterdir() if p.name.startswith("report")) == ["report.json"]


def test_marble_small_run(capsys, write_json):
    doc = dict(marble_document(), n=2000)
    report = report_of(capsys, "marble", write_json("marble.json", doc), "--cap", 100, "--jobs", 2)
    v = report["verdicts"]
    assert v["ks_witness_found"] is True
    assert v["box_audit"] in ("gleason-respecting", "determinism-failure")
    assert set(report["certificates"]["statistics"]) == {"K1", "K2"}
    assert report["certificates"]["statistics"]["K1"]["n"] == 2000


def test_fixtures_list_and_unknown_name(capsys, tmp_path):
    doc = report_of(capsys, "fixtures", "list")
    assert doc["verdicts"]["fixtures"]["pr-box"]["kind"] == "empirical"
    code, _, err = invoke(capsys, "fixtures", "extract", "no-such-fixture", "--dir", tmp_path)
    assert code == 2
    assert "unknown fixture" in err
