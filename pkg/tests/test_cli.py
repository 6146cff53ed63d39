import json

import numpy as np
import pytest

from qdirac.cli import main
from qdirac.config import DEFAULTS, EXPERIMENTS, ExperimentConfig
from qdirac.errors import ConfigError, ParameterError


def run_cli(argv):
    try:
        return main(argv)
    except SystemExit as exc:  # argparse rejects unknown flags this way
        return exc.code


def read_csv(path):
    lines = path.read_text().splitlines()
    meta = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    return meta, body[0].split(","), np.array([[float(x) for x in l.split(",")] for l in body[1:]])


@pytest.mark.parametrize("experiment", EXPERIMENTS)
def test_config_round_trip(experiment):
    cfg = ExperimentConfig.from_dict({"experiment": experiment})
    again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg


def test_defaults_cover_every_experiment():
    assert set(DEFAULTS) == set(EXPERIMENTS)


@pytest.mark.parametrize(
    "data,error",
    [
        ({"experiment": "nope"}, ConfigError),
        ({"experiment": "spectrum", "colour": 1}, ConfigError),
        ({"experiment": "mandel", "n": 3}, ConfigError),
        ({"experiment": "spectrum", "n": 2.5}, ConfigError),
        ({"experiment": "spectrum", "q": [0.1, 0.2]}, ConfigError),
        ({"experiment": "spectrum", "n": 39, "trunc": 40}, ConfigError),
        ({"experiment": "fig2", "q": 1.5}, ParameterError),
        ({"experiment": "fig2", "alpha": 3.0}, ParameterError),
        ({"experiment": "grid-verify", "points": [256, 100]}, ConfigError),
        ({"experiment": "nr-limit", "c_up": 0.5}, ConfigError),
    ],
)
def test_config_validation(data, error):
    with pytest.raises(error):
        ExperimentConfig.from_dict(data)


@pytest.mark.parametrize(
    "argv,name,header",
    [
        (["spectrum"], "spectrum", ["n", "E_plus", "E_minus"]),
        (["mandel", "--q", "0.25"], "mandel_q0.25", ["alpha_sq", "Qq", "Q"]),
        (["zitter", "--n", "3"], "zitter-number", ["tau", "Lz", "Sz", "Jz"]),
        (["zitter", "--alpha", "0.8"], "zitter-coherent", ["tau", "Lz", "Sz", "Jz"]),
        (["fig2", "--tau-max", "40", "--tau-steps", "4001"], "fig2", ["tau", "Lz", "Sz", "Jz"]),
        (["nr"], "nr-limit", ["tau", "M_closed", "M_heff", "Jz_first_order"]),
        (["grid"], "grid-verify", ["M", "h", "commutator_residual", "eig_err_n1", "eig_err_n2", "eig_err_n3"]),
    ],
)
def test_subcommands_write_csv(tmp_path, argv, name, header):
    assert main(argv + ["--out", str(tmp_path)]) == 0
    meta, cols, rows = read_csv(tmp_path / f"{name}.csv")
    assert cols == header
    assert rows.shape[1] == len(header)
    assert all("=" in m for m in meta)
    report = json.loads(next(tmp_path.glob("*_report.json")).read_text())
    assert report["passed"]
    names = [c["name"] for c in report["checks"]]
    assert len(names) == len(set(names))


def test_report_config_reparses(tmp_path):
    assert main(["zitter", "--n", "2", "--q", "0.5", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "zitter-number_report.json").read_text())
    cfg = ExperimentConfig.from_dict(report["config"])
    assert cfg.to_dict() == report["config"]
    assert cfg.q == 0.5 and cfg.n == 2


def test_csv_bodies_deterministic(tmp_path):
    for run in ("a", "b"):
        assert main(["fig2", "--tau-max", "30", "--tau-steps", "3001", "--out", str(tmp_path / run)]) == 0
    assert (tmp_path / "a" / "fig2.csv").read_bytes() == (tmp_path / "b" / "fig2.csv").read_bytes()


def test_fifteen_significant_digits(tmp_path):
    main(["spectrum", "--xi", "0.3", "--q", "0.6", "--out", str(tmp_path)])
    line = (tmp_path / "spectrum.csv").read_text().splitlines()[-1]
    e = line.split(",")[1]
    assert len(e.replace(".", "").lstrip("0")) <= 15
    assert float(e) == pytest.approx(np.sqrt(1 + 4 * 0.3 * (1 - 0.6**35) / 0.4), rel=1e-14)


def test_flags_override_yaml(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: fig2\nxi: 0.3\ntau_max: 30\ntau_steps: 301\n")
    assert main(["fig2", "--config", str(cfg), "--xi", "0.25", "--out", str(tmp_path)]) == 0
    meta, _, rows = read_csv(tmp_path / "fig2.csv")
    assert "# xi=0.25" in meta and len(rows) == 301
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "r")]) == 0
    assert "# xi=0.3" in read_csv(tmp_path / "r" / "fig2.csv")[0]


@pytest.mark.parametrize(
    "argv",
    [
        ["fig2", "--q", "2"],
        ["zitter", "--n", "2", "--alpha", "1"],
        ["spectrum", "--unknown"],
        ["verify", "--tol", "NOPE=1"],
        ["mandel", "--q", "1"],
    ],
)
def test_config_errors_exit_2(tmp_path, argv):
    assert run_cli(argv + ["--out", str(tmp_path)]) == 2


def test_mismatched_config_exit_2(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: fig2\n")
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_verify_negative_control(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path), "--tol", "C2.equivalence_max_diff=0"]) == 1
    report = json.loads((tmp_path / "verify_report.json").read_text())
    failed = [c["name"] for c in report["checks"] if not c["passed"]]
    assert failed == ["C2.equivalence_max_diff"]
    assert "[FAIL] C2.equivalence_max_diff" in capsys.readouterr().out


def test_verify_seeded_reproducible(tmp_path):
    for run in ("a", "b"):
        assert main(["verify", "--seed", "7", "--out", str(tmp_path / run)]) == 0
    a = json.loads((tmp_path / "a" / "verify_report.json").read_text())
    b = json.loads((tmp_path / "b" / "verify_report.json").read_text())
    assert a == b
