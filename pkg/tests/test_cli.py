import dataclasses
import json
import math
import os

import pytest

from src import metric
from src.cli import main
from src.config import Config
from src.generators import atom_drift, persistent_far_atom


@pytest.fixture
def run(capsys):
    """Run the CLI and return (exit code, stdout)."""
    def invoke(*argv):
        code = main([str(a) for a in argv])
        return code, capsys.readouterr().out
    return invoke


@pytest.fixture
def worked(data_path):
    return [data_path("space_worked.json"), data_path("mu1_worked.json"), data_path("mu2_worked.json")]


def _write_json(path, data):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f)
    return str(path)


@pytest.fixture
def drift_files(tmp_path):
    def write(family):
        space, seq, limit = family(40)
        return [_write_json(tmp_path / "space.json", space.to_dict()),
                _write_json(tmp_path / "seq.json", {"measures": [m.to_dict() for m in seq]}),
                _write_json(tmp_path / "limit.json", limit.to_dict())]
    return write


def test_dist_worked_example_matches_golden(run, worked, data_path):
    code, out = run("dist", *worked)
    assert code == 0
    with open(data_path("dist_worked.json"), encoding="utf-8") as f:
        assert json.loads(out) == json.load(f)


def test_dist_with_oracle(run, worked):
    code, out = run("dist", *worked, "--oracle")
    assert code == 0
    data = json.loads(out)
    assert data["oracle"]["H"] == data["H"] == 3.0


def test_dist_between_diracs_and_identical_measures(run, data_path):
    plane = data_path("space_plane.json")
    code, out = run("dist", plane, data_path("dirac_x.json"), data_path("dirac_y.json"))
    assert code == 0
    assert json.loads(out)["rho_omega"] == 5.0

    _, out = run("dist", plane, data_path("dirac_x.json"), data_path("dirac_x.json"))
    assert json.loads(out)["H"] == 0.0


def test_dist_text_output(run, worked):
    code, out = run("dist", *worked, "--format", "text")
    assert code == 0
    assert "DISTANCE" in out
    assert "rho_omega: 1.0" in out


def test_couple_modes(run, worked):
    _, out = run("couple", *worked)
    data = json.loads(out)
    assert data["mode"] == "xi0"
    assert [(e["j"], e["k"], e["gamma"]) for e in data["entries"]] == [(0, 0, 0.0), (0, 1, -2.0)]

    _, out = run("couple", *worked, "--mode", "optimal")
    assert [(e["x"], e["y"]) for e in json.loads(out)["entries"]] == [("a", "a"), ("a", "b")]

    first = run("couple", *worked, "--mode", "random", "--seed", 5)
    assert first == run("couple", *worked, "--mode", "random", "--seed", 5)
    assert first[0] == 0


def test_couple_csv(run, worked):
    code, out = run("couple", *worked, "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["j,k,x,y,gamma", "0,0,a,a,0.0", "0,1,a,b,-2.0"]


def test_integrate_and_push(run, data_path):
    space, mu = data_path("space_worked.json"), data_path("mu2_worked.json")
    code, out = run("integrate", space, mu, data_path("phi.json"))
    assert code == 0
    assert json.loads(out) == {"value": 3.0}

    code, out = run("push", space, mu, data_path("map_collapse.json"))
    assert code == 0
    assert json.loads(out) == {"space": "space_worked", "atoms": [{"point": "a", "weight": 0.0}]}


def test_gram(run, data_path):
    args = ("gram", data_path("space_plane.json"), data_path("gram"))
    code, out = run(*args)
    assert code == 0
    assert json.loads(out) == {"labels": ["x", "y"], "matrix": [[0.0, 5.0], [5.0, 0.0]]}

    _, out = run(*args, "--format", "csv", "--workers", 2)
    assert out.splitlines()[0] == ",x,y"


def test_converge_on_drifting_atom(run, drift_files):
    code, out = run("converge", *drift_files(atom_drift), "--eps", 0.1, "--tail", 10)
    assert code == 0
    data = json.loads(out)
    assert data["metric"] and data["pointwise"] and data["star"]["satisfied"]
    assert data["agree"] and data["cauchy"]
    assert data["certificate"] is None
    assert len(data["rho_omega_trajectory"]) == 40


def test_converge_reports_certificate(run, drift_files):
    code, out = run("converge", *drift_files(persistent_far_atom), "--eps", 0.1, "--tail", 10)
    assert code == 0
    data = json.loads(out)
    assert not data["metric"] and not data["star"]["satisfied"]
    assert data["certificate"]["point"] == "f"


def test_converge_csv(run, drift_files):
    code, out = run("converge", *drift_files(atom_drift), "--eps", 0.1, "--tail", 10, "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("step,rho_omega,")
    assert len(lines) == 11
    assert lines[1].startswith("31,")


def test_dequantize(run):
    code, out = run("dequantize", 3, 5, "1,0.1,0.01")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["h"] for r in rows] == [1.0, 0.1, 0.01]
    assert rows[0]["oplus_h"] == pytest.approx(5 + math.log1p(math.exp(-2)))
    for r in rows:
        assert r["max"] == 5.0
        assert 0 <= r["gap"] <= r["bound"]
    assert rows[-1]["gap"] < 1e-12

    assert run("dequantize", 3, 5, "1,0")[0] == 2
    assert run("dequantize", 3, 5, "one")[0] == 2


def test_validate(run, data_path):
    code, out = run("validate", data_path("space_triangle.json"))
    assert code == 3
    assert not json.loads(out)["metric"]["ok"]

    space = data_path("space_worked.json")
    assert run("validate", space, data_path("mu1_worked.json"))[0] == 0
    code, out = run("validate", space, data_path("mu_unnormalized.json"))
    assert code == 4
    assert json.loads(out)["measures"][0]["ok"] is False
    assert run("validate", space, data_path("mu_unnormalized.json"), "--autonormalize")[0] == 0


@pytest.mark.parametrize("inputs, expected", [
    (("bad.json", "mu1_worked.json", "mu2_worked.json"), 2),
    (("space_worked.json", "mu_unknown_point.json", "mu1_worked.json"), 2),
    (("space_worked.json", "mu_unnormalized.json", "mu1_worked.json"), 4),
    (("space_worked.json", "mu_other_space.json", "mu1_worked.json"), 5),
    (("space_triangle.json", "mu1_worked.json", "mu1_worked.json"), 3),
])
def test_dist_exit_codes(run, data_path, inputs, expected):
    code, out = run("dist", *(data_path(name) for name in inputs))
    assert code == expected
    assert out == ""


def test_autonormalize_flag(run, data_path):
    code, out = run("dist", data_path("space_worked.json"), data_path("mu_unnormalized.json"),
                    data_path("mu2_worked.json"), "--autonormalize")
    assert code == 0
    assert json.loads(out)["H"] == 0.0


def test_oracle_disagreement_exit_code(run, worked, monkeypatch):
    honest = metric.h_bruteforce
    monkeypatch.setattr(metric, "h_bruteforce",
                        lambda a, b: dataclasses.replace(honest(a, b), H=honest(a, b).H + 1))
    assert run("dist", *worked, "--oracle")[0] == 6


def test_csv_not_available_for_integrate(run, data_path):
    code, _ = run("integrate", data_path("space_worked.json"), data_path("mu2_worked.json"),
                  data_path("phi.json"), "--format", "csv")
    assert code == 2


def test_save_writes_output(run, worked, tmp_path, monkeypatch):
    monkeypatch.setattr(Config, "OUTPUTS_DIR", str(tmp_path))
    code, out = run("dist", *worked, "--save", "worked.json", "-q")
    assert code == 0
    with open(os.path.join(str(tmp_path), "worked.json"), encoding="utf-8") as f:
        assert f.read() == out


def test_missing_subcommand_exits():
    with pytest.raises(SystemExit):
        main([])


def test_converge_rejects_zero_star_tolerance(run, drift_files):
    code, out = run("converge", *drift_files(atom_drift), "--eps", 0.1, "--eps-x", 0)
    assert code == 2
    assert out == ""
