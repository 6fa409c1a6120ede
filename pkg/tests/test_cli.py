import json
import xml.dom.minidom

import pytest

from arrmorse.arrangement import serialize_arrangement
from arrmorse.cli import main

from catalog import braid, generic_lines, ones, points


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, arr in [("two", points([0, 1])), ("g3", generic_lines(3)), ("g4", generic_lines(4)),
                      ("braid", braid())]:
        p = tmp_path / f"{name}.json"
        p.write_text(serialize_arrangement(arr, ones(arr)))
        out[name] = str(p)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_analyze(files, capsys):
    code, out = run(capsys, "analyze", files["two"])
    data = json.loads(out.out)
    assert code == 0 and data["chi"] == -1 and data["rank"] == 1 and data["essential"]
    assert sorted(f["moebius"] for f in data["flats"]) == [-1, -1, 1]


def test_crit_and_verify(files, capsys):
    code, out = run(capsys, "crit", files["g4"], "--seed", "1")
    pts = json.loads(out.out)
    assert code == 0 and len(pts) == 3
    assert all(p["hessian_signature"] == [2, 2] for p in pts)
    code, out = run(capsys, "verify", files["g4"], "--budget", "5")
    assert code == 0 and json.loads(out.out)["agrees"]


def test_crit_lifts_points_of_non_essential_input(tmp_path, capsys):
    from catalog import braid_plus_affine

    arr = braid_plus_affine()
    p = tmp_path / "ba.json"
    p.write_text(serialize_arrangement(arr, ones(arr)))
    code, out = run(capsys, "crit", str(p))
    (pt,) = json.loads(out.out)
    assert len(pt["location"]) == 2 and len(pt["lifted_location"]) == 3


def test_flow(files, capsys):
    code, out = run(capsys, "flow", files["two"], "--field", "y", "--start", "0.5,0.3", "--tmax", "0.5")
    traj = json.loads(out.out)
    assert code == 0 and traj["field"] == "y_alpha"
    assert traj["samples"][-1]["t"] == pytest.approx(0.5)
    assert traj["samples"][-1]["arg"] == pytest.approx(0.5, abs=1e-8)


def test_flow_rejects_bad_start(files, capsys):
    code, out = run(capsys, "flow", files["g3"], "--start", "0.5,0.3", "--tmax", "1")
    assert code == 2 and "error" in out.err


def test_fibration(files, capsys):
    code, out = run(capsys, "fibration", files["two"], "--samples", "3")
    rep = json.loads(out.out)
    assert code == 0 and rep["passes"] and len(rep["records"]) == 3


def test_bounds(files, capsys):
    code, out = run(capsys, "bounds", files["two"], "--shells", "0.1,0.01,0.001", "--per-shell", "40")
    certs = json.loads(out.out)
    ids = {c["inequality_id"] for c in certs}
    assert code == 0 and ids == {"grad_lower_K", "neighborhood_A", "neighborhood_B", "pairing_D"}


def test_resonance(files, capsys):
    code, out = run(capsys, "resonance", files["g3"])
    data = json.loads(out.out)
    assert data["dims"] == [1, 3, 3] and data["cohomology_ranks"] == [0, 0, 1]
    assert data["verdict"] == "non-resonant"


def test_report_json_pretty_svg(files, capsys, tmp_path):
    code, out = run(capsys, "report", files["braid"], "--json")
    data = json.loads(out.out)
    assert code == 0 and data["novikov_ranks"] == [0, 0, 0, 0] and data["rank_l"] == 2
    code, out = run(capsys, "report", files["g4"], "--pretty", "--svg", str(tmp_path / "g4.svg"))
    assert "Novikov ranks     [0, 0, 3]" in out.out
    doc = xml.dom.minidom.parse(str(tmp_path / "g4.svg"))
    assert len(doc.getElementsByTagName("polygon")) == 3
    assert len(doc.getElementsByTagName("circle")) == 3


def test_malformed_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, out = run(capsys, "analyze", str(p))
    assert code == 2 and "malformed" in out.err
