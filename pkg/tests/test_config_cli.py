import csv
import json

import pytest
import yaml

from colwave import cli
from colwave.config import ESTIMATORS, SCENARIOS, ConfigError, defaults, estimator_params, load_config
from colwave.scenarios import ScenarioReport


def _write(tmp_path, obj, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(obj) if name.endswith(".yaml") else json.dumps(obj), encoding="utf-8")
    return p


# -- config -------------------------------------------------------------------------------------

@pytest.mark.parametrize("scenario", SCENARIOS)
def test_defaults_validate(scenario):
    cfg = load_config(None, scenario)
    assert cfg["scenario"] == scenario
    for name in ESTIMATORS[scenario]:
        P = estimator_params(cfg, name)
        assert len(P.eps) >= 3 and len(P.radii) >= 2


def test_merge_over_defaults(tmp_path):
    p = _write(tmp_path, {"scenario": "smoke", "estimators": {"delta": {"eps": {"kmax": 10}}}})
    cfg = load_config(p)
    assert cfg["estimators"]["delta"]["eps"] == {"kmin": 4, "kmax": 10}
    # untouched blocks keep their defaults
    assert cfg["estimators"]["bump"] == defaults("smoke")["estimators"]["bump"]


def test_json_is_accepted(tmp_path):
    p = _write(tmp_path, {"scenario": "ex4_2", "bins": 36}, "cfg.json")
    assert load_config(p)["bins"] == 36


@pytest.mark.parametrize("over,msg", [
    ({"bogus": 1}, "unknown key"),
    ({"estimators": {"delta": {"radii": [0.25, 0.5]}}}, "decreasing"),
    ({"estimators": {"delta": {"eps": {"kmin": 4, "kmax": 5}}}}, "3 levels"),
    ({"estimators": {"delta": {"lambda": {"min": 100, "max": 120}}}}, "fewer than 4"),
    ({"estimators": {"delta": {"oversample": 2}}}, "oversample"),
    ({"thresholds": {"p_irregular": 6.0}}, "p_irregular"),
    ({"bins": 30}, "multiple of 4"),
    ({"mollifier": {"q": 1.5}}, "integer"),
    ({"mollifier": {"d": "wide"}}, "number"),
    ({"thresholds": 3}, "mapping"),
    ({"estimators": {"nope": {}}}, "unknown key"),
])
def test_invalid_configs(tmp_path, over, msg):
    p = _write(tmp_path, {"scenario": "smoke", **over})
    with pytest.raises(ConfigError, match=msg):
        load_config(p)


def test_scenario_mismatch_and_missing(tmp_path):
    with pytest.raises(ConfigError, match="not 'ex4_1'"):
        load_config(_write(tmp_path, {"scenario": "smoke"}), "ex4_1")
    with pytest.raises(ConfigError, match="no scenario"):
        load_config(_write(tmp_path, {"bins": 72}))
    with pytest.raises(ConfigError, match="unknown scenario"):
        load_config(None, "ex9_9")


def test_unreadable_and_malformed(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("scenario: [smoke\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="not valid"):
        load_config(bad)
    lst = tmp_path / "list.yaml"
    lst.write_text("- smoke\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(lst)


def test_missing_estimator_block():
    with pytest.raises(ConfigError, match="no estimator block"):
        estimator_params(load_config(None, "smoke"), "U")


# -- CLI ----------------------------------------------------------------------------------------

def test_list(capsys):
    assert cli.main(["list"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    for s in SCENARIOS:
        assert s in out


def test_validate_config(tmp_path, capsys):
    good = _write(tmp_path, {"scenario": "ex2_2"})
    assert cli.main(["validate-config", str(good)]) == cli.EXIT_OK
    assert "ex2_2" in capsys.readouterr().out
    bad = _write(tmp_path, {"scenario": "ex2_2", "seed": -1}, "bad.yaml")
    assert cli.main(["validate-config", str(bad)]) == cli.EXIT_CONFIG
    assert "seed" in capsys.readouterr().err


def test_usage_errors_are_config_errors(capsys):
    assert cli.main(["run", "no_such_scenario"]) == cli.EXIT_CONFIG
    assert cli.main([]) == cli.EXIT_CONFIG


@pytest.fixture(scope="module")
def smoke_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("smoke")
    code = cli.main(["run", "smoke", "--out", str(out)])
    return code, out


def test_smoke_exit_and_outputs(smoke_run):
    code, out = smoke_run
    assert code == cli.EXIT_OK
    for f in ("report.json", "timings.json", "fits.csv", "cones.json"):
        assert (out / f).is_file()
    rep = json.loads((out / "report.json").read_text())
    assert rep["passed"] is True and rep["scenario"] == "smoke"
    assert "timings" not in rep
    assert "total" in json.loads((out / "timings.json").read_text())


def test_smoke_fits_csv(smoke_run):
    _, out = smoke_run
    with open(out / "fits.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0]) == {"estimate", "base_point", "direction", "angle_deg", "p_hat", "N_hat", "residual",
                            "verdict"}
    # 3 + 3 one-dimensional points with 2 bins each, one 2-D point with 72 bins
    assert len(rows) == 6 * 2 + 72
    assert {r["verdict"] for r in rows} <= {"regular", "irregular", "inconclusive"}


def test_smoke_cone_plot_data_has_72_rows(smoke_run):
    _, out = smoke_run
    with open(out / "plotdata" / "delta_x_one_cone.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 + 72


def test_out_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("COLWAVE_OUT", str(tmp_path / "env_out"))
    assert cli.main(["run", "smoke"]) == cli.EXIT_OK
    assert (tmp_path / "env_out" / "report.json").is_file()
    # --out wins over the environment
    assert cli.main(["run", "smoke", "--out", str(tmp_path / "flag_out")]) == cli.EXIT_OK
    assert (tmp_path / "flag_out" / "report.json").is_file()


def test_exit_code_assertion_failure(tmp_path):
    cfg = _write(tmp_path, {"scenario": "smoke", "thresholds": {"p_threshold": 500.0}})
    out = tmp_path / "o"
    assert cli.main(["run", "smoke", "--config", str(cfg), "--out", str(out)]) == cli.EXIT_ASSERT
    rep = json.loads((out / "report.json").read_text())
    assert rep["passed"] is False


def test_exit_code_config_error(tmp_path, capsys):
    cfg = _write(tmp_path, {"scenario": "smoke", "bins": 7})
    assert cli.main(["run", "smoke", "--config", str(cfg), "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    assert "bins" in capsys.readouterr().err


def test_exit_code_resolution_guard(tmp_path, capsys):
    # delta (x) 1 is not compact, so its full grid is checked against max_points
    cfg = _write(tmp_path, {"scenario": "smoke", "estimators": {"delta_x_one": {"max_points": 1024}}})
    assert cli.main(["run", "smoke", "--config", str(cfg), "--out", str(tmp_path)]) == cli.EXIT_RESOLUTION
    assert "max_points" in capsys.readouterr().err


def test_empty_report_writes_no_plot_data(tmp_path):
    rep = ScenarioReport("cones_remark", {})
    assert cli.emit_plot_data(rep, tmp_path) == []
    assert not (tmp_path / "plotdata").exists()
    cli.write_report(rep, tmp_path)
    assert json.loads((tmp_path / "report.json").read_text())["passed"] is True


def test_clean_is_stable():
    import numpy as np
    v = cli._clean({"a": np.float64(1 / 3), "b": [np.int64(2), np.bool_(True)], "c": float("inf")})
    assert v == {"a": 0.333333333, "b": [2, True], "c": "inf"}
