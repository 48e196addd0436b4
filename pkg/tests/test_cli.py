import json

import pytest

from tpzmc import cli


def _run(args, tmp_path, name="r.json"):
    code = cli.main(args + ["--report", str(tmp_path / name)])
    return code, json.loads((tmp_path / name).read_text())


def test_generate_writes_meshes(tmp_path):
    out = f"{tmp_path / 'm.obj'},{tmp_path / 'm.ply'}"
    code, rep = _run(["generate", "--family", "rpd", "--a", "0.7071067811865476", "--out", out], tmp_path)
    assert code == 0 and rep["status"] == "pass"
    assert rep["schema"] == cli.SCHEMA and "timings" not in rep
    assert (tmp_path / "m.obj").exists() and (tmp_path / "m.ply").exists()
    assert rep["lattice"]["rank"] == 3


def test_generate_zmc_with_self_intersections(tmp_path):
    code, rep = _run(["generate", "--self-intersections", "--timings"], tmp_path)
    assert code == 0
    assert rep["self_intersections"]["count"] == 0
    assert rep["mesh"]["copies"] == 5 and rep["lattice"]["rank"] == 3
    assert "timings" in rep


def test_verify_reports_known_failures(tmp_path):
    code, rep = _run(["verify", "--suite", "extension,limits"], tmp_path)
    assert code == 1 and rep["status"] == "fail"
    assert set(rep["failed_checks"]) == {"extension:sigma=A-gamma+c-as-printed", "limits:helicoid-a=0.1"}


def test_verify_passing_suite(tmp_path):
    code, rep = _run(["verify", "--suite", "folds,symmetry"], tmp_path)
    assert code == 0 and rep["suites"]["folds"]["passed"]


def test_periods_and_limits(tmp_path):
    code, rep = _run(["periods", "--family", "karcher-tower", "--k", "2"], tmp_path)
    assert code == 0 and rep["lattice"]["rank"] == 1
    code, rep = _run(["limits"], tmp_path, "l.json")
    assert code == 0 and all(rep["checks"].values())


def test_usage_errors(tmp_path, capsys):
    code, rep = _run(["generate", "--a", "1.5"], tmp_path)
    assert code == 2 and rep["error"]["category"] == "parameter"
    code, rep = _run(["verify", "--suite", "bogus"], tmp_path)
    assert code == 2 and rep["error"]["category"] == "precondition"
    with pytest.raises(SystemExit):
        cli.main(["generate", "--family", "unknown"])


def test_config_file_and_override(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[run]\nfamily = schwarz-h-r3\na = 0.4\nn-radial = 10\nn_angular = 10\n")
    cfg = cli.load_config(str(ini), {"a": 0.6})
    assert cfg.family == "schwarz-h-r3" and cfg.a == 0.6 and cfg.n_radial == 10
    ini.write_text("[run]\nnot_a_key = 1\n")
    code, rep = _run(["periods", "--config", str(ini)], tmp_path)
    assert code == 2
    with pytest.raises(Exception):
        cli.load_config(str(tmp_path / "missing.ini"))


def test_report_is_deterministic():
    cfg = cli.load_config(None, {"family": "karcher-maxface", "k": 3})
    a = cli.dump_report(cli.cmd_periods(cfg)[0])
    b = cli.dump_report(cli.cmd_periods(cfg)[0])
    assert a == b
