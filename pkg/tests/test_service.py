import numpy as np
import pytest
from fastapi.testclient import TestClient

import decphs as d
from decphs.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture(scope="module")
def kite_text(kite):
    return d.mesh_to_text(kite.complex)


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_check_endpoint(client, kite_text):
    r = client.post("/check", json={"mesh_text": kite_text, "trials": 20, "seed": 0})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] is True
    assert body["cells"] == [4, 5, 2]
    names = {c["name"] for c in body["checks"]}
    assert "evaluation_by_parts" in names and "well_centered" in names


def test_check_reports_violations(client):
    obtuse = (
        "dimension 2\nvertices 3\n0.0 0.0\n4.0 0.0\n2.0 0.5\ncells 1\n0 1 2\n"
    )
    r = client.post("/check", json={"mesh_text": obtuse})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] is False
    wc = [c for c in body["checks"] if c["name"] == "well_centered"][0]
    assert wc["passed"] is False


def test_check_malformed_mesh(client):
    r = client.post("/check", json={"mesh_text": "dimension two\n"})
    assert r.status_code == 400
    assert r.json()["kind"] == "MeshFormatError"


def test_operators_endpoint(client, kite_text):
    r = client.post("/operators", json={"mesh_text": kite_text})
    assert r.status_code == 200
    body = r.json()
    names = {m["name"] for m in body["manifest"]}
    assert {"d0", "d1", "tr0", "tr1", "di0", "di1", "db0", "db1",
            "star0", "star1", "star2", "starb0", "starb1"} <= names
    assert set(body["files"]) == {f"{n}.mtx" for n in names} | {"dual.txt"}
    d0 = [m for m in body["manifest"] if m["name"] == "d0"][0]
    assert d0["shape"] == [5, 4]
    assert d0["domain_carrier"] == "primal" and d0["codomain_degree"] == 1


def test_certify_endpoint(client, kite_text):
    req = {"mesh_text": kite_text, "flavor": "A", "p": 2, "q": 1,
           "trials": 50, "seed": 0}
    r = client.post("/certify", json=req)
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] and body["isotropy_pass"] and body["dimension_pass"]
    assert body["graph_dimension"] == body["flow_dimension"] == 13
    assert body["poisson_pass"] is True
    assert body["spaces"]["flow_p"] == ["dual_interior", 2, 4]


def test_certify_flavor_b_no_poisson(client, kite_text):
    r = client.post("/certify", json={"mesh_text": kite_text, "flavor": "B",
                                      "p": 2, "q": 1})
    assert r.status_code == 200
    assert r.json()["poisson_pass"] is None


def test_certify_bad_degrees(client, kite_text):
    r = client.post("/certify", json={"mesh_text": kite_text, "flavor": "A",
                                      "p": 2, "q": 2})
    assert r.status_code == 400
    assert r.json()["kind"] == "OperatorError"


def test_certify_validation_error(client, kite_text):
    r = client.post("/certify", json={"mesh_text": kite_text, "flavor": "C",
                                      "p": 2, "q": 1})
    assert r.status_code == 422


def test_simulate_endpoint(client):
    model_text = "model telegraph\nn_segments 8\ninitial_charge cos(pi*x)\n"
    req = {"model_text": model_text, "dt": 0.01, "t_final": 1.0}
    r = client.post("/simulate", json=req)
    assert r.status_code == 200
    body = r.json()
    assert body["steps"] == 100
    assert body["manifest"]["flavor"] == "B"
    assert abs(body["final_energy"] - body["initial_energy"]) <= 1e-10
    assert body["trajectory_text"].startswith("# time H P defect state...")


def test_simulate_deterministic(client):
    model_text = "model telegraph\nn_segments 6\ninitial_charge cos(pi*x)\n" \
                 "input_left cos(pi*t)\n"
    req = {"model_text": model_text, "dt": 0.02, "t_final": 0.5, "seed": 3}
    r1 = client.post("/simulate", json=req)
    r2 = client.post("/simulate", json=req)
    assert r1.content == r2.content


def test_simulate_wave_with_mesh(client, kite_text):
    model_text = "model wave\nmesh external\ninitial_displacement cos(pi*x)\n"
    r = client.post("/simulate", json={"model_text": model_text,
                                       "mesh_text": kite_text,
                                       "dt": 0.05, "t_final": 1.0})
    assert r.status_code == 200
    assert r.json()["manifest"]["model"] == "wave"


def test_converge_endpoint(client):
    r = client.post("/converge", json={"ns": [4, 8, 16], "dt0": 0.16,
                                       "t_final": 0.25})
    assert r.status_code == 200
    body = r.json()
    errors = [e["error"] for e in body["entries"]]
    assert errors[0] > errors[1] > errors[2]
    assert body["observed_order"] > 0.8


def test_converge_rejects_short_list(client):
    r = client.post("/converge", json={"ns": [8]})
    assert r.status_code == 400
