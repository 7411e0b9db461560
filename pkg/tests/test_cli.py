from __future__ import annotations

import json
import subprocess
import sys

import pytest

from tropical_period.cli import check_matrix, main, resolve_stages, run
from tropical_period.errors import InvalidInstance
from tropical_period.instances import GOLDEN, load_instance, parse_instance


def _write(tmp_path, doc, name="instance.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _quartic_doc():
    return {
        "name": "quartic",
        "rank": 3,
        "rays": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]],
        "max_cones": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]],
        "h": [1, 1, 1, 1],
    }


def _run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


# -- golden runs ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", GOLDEN)
def test_golden_instances_pass(capsys, name):
    code, report = _run_json(capsys, ["--input", name])
    assert code == 0 and report["status"] == "pass"
    assert set(report["check_matrix"].values()) == {"pass"}


def test_cubic_report_contents(capsys):
    code, report = _run_json(capsys, ["--input", "cubic"])
    assert code == 0
    assert report["radiance"]["top_power"] == 9
    assert report["intersection"]["amb_dims"] == [1, 1]
    assert report["sphere"]["face_counts"] == [3, 3]
    assert report["gamma"]["gram"] == [[0, 3], [-3, 0]]
    assert report["gamma"]["euler_number"] == 0


def test_every_check_appears_once():
    report, _ = run(load_instance("cube"))
    names = [(s, c["name"]) for s in ("validation", "sphere", "intersection", "radiance", "plh", "gamma")
             for c in report.get(s, {}).get("checks", [])]
    assert len(names) == len(set(names)) == len(report["check_matrix"])


def test_quartic_records_both_monodromies():
    report, code = run(load_instance("quartic"))
    assert code == 0
    assert report["plh"]["monodromy_gamma"] == [[15, 10, 6], [-24, -15, -8], [10, 6, 3]]
    assert report["gamma"]["pairing_of_structure_sheaf"] == 2


# -- exit codes --------------------------------------------------------------------------------

def test_non_unimodular_cone_is_invalid_input(tmp_path, capsys):
    doc = {"rank": 2, "rays": [[1, 0], [1, 2], [-1, -1]], "max_cones": [[0, 1], [1, 2], [0, 2]],
           "h": [1, 1, 1]}
    code, report = _run_json(capsys, ["--input", _write(tmp_path, doc)])
    assert code == 1 and report["status"] == "invalid_input"
    assert any("determinant 2" in d for d in report["validation"]["diagnostics"])


def test_corrupted_convexity_names_the_wall(tmp_path, capsys):
    doc = _quartic_doc()
    doc["h"] = [1, 1, 1, -5]
    code, report = _run_json(capsys, ["--input", _write(tmp_path, doc)])
    assert code == 1
    assert report["validation"]["convexity"]["h"] == "NotConvex"
    assert any("cone [0, 1, 2] gives" in d and "at ray 3" in d for d in report["validation"]["diagnostics"])


def test_failed_mathematical_check_exits_two(tmp_path, capsys):
    # the quintic's coarse 2-faces are not standard simplices without a refinement
    doc = {"rank": 4,
           "rays": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [-1, -1, -1, -1]],
           "max_cones": [[a for a in range(5) if a != k] for k in range(5)],
           "h": [1] * 5}
    code, report = _run_json(capsys, ["--input", _write(tmp_path, doc), "--stages", "sphere"])
    assert code == 2 and report["status"] == "fail"
    assert report["check_matrix"]["sphere.simplicity"] == "fail"


@pytest.mark.parametrize("doc", [
    {"rank": 2, "rays": [[1, 0]], "max_cones": [[0, 1]], "h": [1]},
    {"rank": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [0, 2]], "h": [1, 1]},
    {"rays": [[1, 0]]},
])
def test_malformed_documents(tmp_path, capsys, doc):
    assert main(["--input", _write(tmp_path, doc)]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_file_and_bad_flags(tmp_path, capsys):
    assert main(["--input", str(tmp_path / "nope.json")]) == 1
    assert main(["--input", "cubic", "--stages", "bogus"]) == 1
    assert main(["--input", "cubic", "--y-sweep", "-1"]) == 1


def test_parse_instance_rejects_bad_h():
    doc = _quartic_doc()
    doc["h"] = [1, 1, "x", 1]
    with pytest.raises(InvalidInstance):
        parse_instance(doc)


# -- stages and determinism ------------------------------------------------------------------------

def test_later_stage_forces_prerequisites():
    assert resolve_stages(["gamma"]) == ["validate", "sphere", "cohomology", "radiance", "plh", "gamma"]
    assert resolve_stages(["radiance"]) == ["validate", "sphere", "cohomology", "radiance"]
    assert resolve_stages(["period"]) == resolve_stages(["plh"])
    with pytest.raises(ValueError):
        resolve_stages(["nonsense"])


def test_partial_stage_run(capsys):
    code, report = _run_json(capsys, ["--input", "quartic", "--stages", "radiance"])
    assert code == 0
    assert report["stages"] == ["validate", "sphere", "cohomology", "radiance"]
    assert "plh" not in report and "gamma" not in report


def test_runs_are_deterministic(capsys):
    a = _run_json(capsys, ["--input", "cube"])[1]
    b = _run_json(capsys, ["--input", "cube"])[1]
    a.pop("timings"), b.pop("timings")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert check_matrix(a) == check_matrix(b)


def test_text_format_and_output_file(tmp_path, capsys):
    out = tmp_path / "report.txt"
    code = main(["--input", "cubic", "--format", "text", "--output", str(out), "--y-sweep", "5,10"])
    assert code == 0 and capsys.readouterr().out == ""
    text = out.read_text()
    assert "status: pass" in text
    assert "plh.positivity_y=5: PASS" in text and "plh.positivity_y=10: PASS" in text
    assert "positivity_y=20" not in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tropical_period", "--input", "cubic",
                           "--stages", "radiance", "--format", "text"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "radiance.top_power_positive: PASS  9" in proc.stdout
