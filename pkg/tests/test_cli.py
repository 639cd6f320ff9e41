import json

import pytest

import decphs as d
from decphs.cli import main


@pytest.fixture()
def kite_file(tmp_path, kite):
    path = tmp_path / "kite.mesh"
    path.write_text(d.mesh_to_text(kite.complex))
    return path


@pytest.fixture()
def line_model(tmp_path):
    path = tmp_path / "line.model"
    path.write_text(
        "model telegraph\nn_segments 8\ninitial_charge cos(pi*x)\n"
        "input_left cos(pi*t)\ninput_right -cos(pi*t)\n"
    )
    return path


def test_check_pass(kite_file, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["check", "--mesh", str(kite_file), "--out", str(out)])
    assert code == 0
    report = json.loads((out / "check_report.json").read_text())
    assert report["passed"] is True
    assert "pass overall" in capsys.readouterr().out


def test_check_failure_exit_code(tmp_path):
    mesh = tmp_path / "obtuse.mesh"
    mesh.write_text("dimension 2\nvertices 3\n0.0 0.0\n4.0 0.0\n2.0 0.5\ncells 1\n0 1 2\n")
    code = main(["check", "--mesh", str(mesh), "--out", str(tmp_path / "r")])
    assert code == 1
    report = json.loads((tmp_path / "r" / "check_report.json").read_text())
    failing = [c for c in report["checks"] if not c["passed"]]
    assert failing and failing[0]["name"] == "well_centered"


def test_check_parse_error_exit_code(tmp_path, capsys):
    empty = tmp_path / "empty.mesh"
    empty.write_text("")
    assert main(["check", "--mesh", str(empty)]) == 2
    assert "error:" in capsys.readouterr().err


def test_check_missing_file(tmp_path):
    assert main(["check", "--mesh", str(tmp_path / "nope.mesh")]) == 2


def test_dump_operators(kite_file, tmp_path):
    out = tmp_path / "ops"
    assert main(["dump-operators", "--mesh", str(kite_file), "--out", str(out)]) == 0
    files = {p.name for p in out.iterdir()}
    assert {"d0.mtx", "tr0.mtx", "di1.mtx", "db1.mtx", "star0.mtx", "star1.mtx",
            "star2.mtx", "starb0.mtx", "manifest.json", "dual.txt"} <= files
    manifest = json.loads((out / "manifest.json").read_text())
    by_name = {m["name"]: m for m in manifest}
    assert by_name["d0"]["shape"] == [5, 4]
    # triplet rows are sorted and 0-based
    lines = (out / "d0.mtx").read_text().strip().splitlines()
    rows = [int(line.split()[0]) for line in lines]
    assert rows == sorted(rows)
    assert all(len(line.split()) == 3 for line in lines)


def test_certify_pass(kite_file, tmp_path):
    out = tmp_path / "cert"
    code = main(["certify", "--mesh", str(kite_file), "--flavor", "A",
                 "--p", "2", "--q", "1", "--trials", "100", "--seed", "0",
                 "--out", str(out)])
    assert code == 0
    report = json.loads((out / "certify_report.json").read_text())
    assert report["passed"] and report["isotropy_worst"] <= 1e-11


def test_certify_degree_mismatch_is_input_error(kite_file):
    code = main(["certify", "--mesh", str(kite_file), "--flavor", "A",
                 "--p", "2", "--q", "2"])
    assert code == 2


def test_simulate_and_determinism(line_model, tmp_path, capsys):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    args = ["simulate", "--model", str(line_model), "--dt", "0.01", "--T", "1.0",
            "--seed", "1"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert (out1 / "trajectory.txt").read_bytes() == (out2 / "trajectory.txt").read_bytes()
    assert (out1 / "manifest.json").read_bytes() == (out2 / "manifest.json").read_bytes()
    text = capsys.readouterr().out
    assert "H_final" in text and "max_abs_power" in text


def test_simulate_zero_horizon(line_model, tmp_path):
    out = tmp_path / "r0"
    assert main(["simulate", "--model", str(line_model), "--dt", "0.01",
                 "--T", "0.0", "--out", str(out)]) == 0
    lines = (out / "trajectory.txt").read_text().strip().splitlines()
    assert len(lines) == 2  # header plus the initial row


def test_simulate_wave_model(tmp_path, kite_file):
    model = tmp_path / "wave.model"
    model.write_text("model wave\nmesh external\ninitial_displacement cos(pi*x)\n"
                     "feedback passive\n")
    out = tmp_path / "wave_run"
    assert main(["simulate", "--model", str(model), "--mesh", str(kite_file),
                 "--dt", "0.02", "--T", "1.0", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["model"] == "wave"
    assert manifest["description"]["feedback"] == "passive"


def test_converge_command(tmp_path, capsys):
    out = tmp_path / "conv"
    code = main(["converge", "--ns", "4,8,16", "--dt0", "0.16", "--T", "0.25",
                 "--out", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "observed_order" in text
    data = json.loads((out / "convergence.json").read_text())
    assert len(data["entries"]) == 3
    table = (out / "convergence.txt").read_text()
    assert table.startswith("# n dt error")


def test_converge_single_n_rejected():
    assert main(["converge", "--ns", "8"]) == 2


def test_converge_bad_ns():
    assert main(["converge", "--ns", "8,sixteen"]) == 2


def test_remote_dispatch(monkeypatch, kite_file, tmp_path):
    # the --server path posts the same request models to a running service
    import httpx
    from fastapi.testclient import TestClient

    from decphs.service import app

    tc = TestClient(app)

    def fake_post(url, json=None, timeout=None):
        assert url.startswith("http://svc")
        return tc.post(url.removeprefix("http://svc"), json=json)

    monkeypatch.setattr(httpx, "post", fake_post)
    out = tmp_path / "remote"
    code = main(["--server", "http://svc", "check", "--mesh", str(kite_file),
                 "--out", str(out)])
    assert code == 0
    assert json.loads((out / "check_report.json").read_text())["passed"] is True


def test_remote_dispatch_input_error(monkeypatch, tmp_path):
    import httpx
    from fastapi.testclient import TestClient

    from decphs.service import app

    tc = TestClient(app)
    monkeypatch.setattr(
        httpx, "post",
        lambda url, json=None, timeout=None: tc.post(url.removeprefix("http://svc"), json=json),
    )
    bad = tmp_path / "bad.mesh"
    bad.write_text("dimension nope\n")
    assert main(["--server", "http://svc", "check", "--mesh", str(bad)]) == 2
