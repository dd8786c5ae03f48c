import json

import numpy as np
import pytest

from toricgh.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_pass_and_fail(capsys):
    code, out, _ = call(capsys, "check", "--polytope", "catalog:square")
    assert code == 0 and out.startswith("delzant: pass")
    code, out, _ = call(capsys, "--json", "check", "--polytope", "catalog:triangle_bad")
    assert code == 1
    rep = json.loads(out)
    assert any(v["det"] in (2, -2) for v in rep["vertices"])


def test_distance_volume_exact(capsys):
    code, out, _ = call(capsys, "distance", "--kind", "volume", "--a", "catalog:rect", "--b", "catalog:pentagon_0.5")
    assert code == 0 and out.strip() == "1/8"


def test_distance_json_fields(capsys):
    code, out, _ = call(capsys, "--json", "distance", "--kind", "hausdorff", "--a", "catalog:square", "--b", "catalog:square")
    assert code == 0
    assert json.loads(out) == {"value": 0.0, "error_bound": 0.0, "details": {}}


def test_guillemin(capsys):
    code, out, _ = call(capsys, "guillemin", "--polytope", "catalog:square", "--at", "0.5,0.5")
    assert code == 0
    res = json.loads(out)
    np.testing.assert_allclose(res["G"], [[2.0, 0.0], [0.0, 2.0]], rtol=1e-14)


def test_bad_inputs(capsys):
    code, _, err = call(capsys, "guillemin", "--polytope", "catalog:square", "--at", "2,0.5")
    assert code == 2 and "error" in json.loads(err)
    code, _, err = call(capsys, "check", "--polytope", "/nonexistent.json")
    assert code == 2 and json.loads(err)["error"]
    code, _, err = call(capsys, "distance", "--kind", "nope", "--a", "x", "--b", "y")
    assert code == 2 and json.loads(err)["error"] == "bad_config"
    code, _, err = call(capsys, "reproduce", "--only", "99")
    assert code == 2


def test_sample_and_gh_deterministic(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"s{k}.bin"
        code, out, _ = call(capsys, "sample", "--polytope", "catalog:square", "--h", "1/5", "--delta", "1/5",
                            "--torus-res", "3", "--out", str(path))
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    runs = [call(capsys, "gh", "--a", str(tmp_path / "s0.bin"), "--b", "catalog:square", "--h", "1/5",
                 "--delta", "1/5", "--torus-res", "3") for _ in range(2)]
    assert runs[0] == runs[1] and runs[0][0] == 0
    res = json.loads(runs[0][1])
    assert res["lower"] == 0 and res["upper"] >= 0


def test_experiment_csv(capsys, tmp_path):
    path = tmp_path / "pent.csv"
    code, _, _ = call(capsys, "experiment", "--family", "pentagon", "--steps", "3", "--no-manifold", "--out", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    header = lines[1].split(",")
    assert header[0] and "fiber_gap_phi10" in header
    assert len(lines) == 2 + 3
    code, out, _ = call(capsys, "experiment", "--family", "pentagon", "--steps", "3", "--no-manifold")
    assert out == path.read_text()
