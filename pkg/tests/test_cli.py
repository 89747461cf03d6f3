import csv
import io
import json
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from procrustean.cli import main
from procrustean.pipeline import ProtocolParams, run_protocol
from procrustean.sweep import ConfigError, SweepConfig, run_sweep


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_single_point_csv():
    code, out, _ = invoke("run", "--lambda", "0.5", "--alpha", "1e4", "--phi", "1e-10", "--x", "1.0")
    assert code == 0
    (row,) = rows_of(out)
    assert row["success"] == "true"
    assert float(row["v_out_exact"]) < float(row["v_in"])
    assert 0.49 < float(row["ps"]) < 0.51


def test_run_failure_branch_and_json_object():
    code, out, _ = invoke("run", "--lambda", "0.5", "--alpha", "1e4", "--phi", "1e-10", "--x", "-1", "--format", "json")
    assert code == 0
    row = json.loads(out)
    assert row["success"] is False and row["v_out_exact"] > row["v_in"]


def test_squeezing_db_input():
    code, out, _ = invoke("run", "--squeezing-db", "4.5", "--alpha", "2", "--phi", "0.01", "--x", "0.2")
    assert code == 0
    assert float(rows_of(out)[0]["lambda"]) == pytest.approx(math.tanh(4.5 * math.log(10) / 20))


def test_theta_degrees():
    _, a, _ = invoke("run", "--lambda", "0.5", "--alpha", "2", "--phi", "0.01", "--x", "0.2", "--theta-deg", "60")
    _, b, _ = invoke("run", "--lambda", "0.5", "--alpha", "2", "--phi", "0.01", "--x", "0.2",
                     "--theta", repr(math.radians(60)))
    assert a == b


def test_usage_errors_exit_2():
    assert invoke("run", "--lambda", "0.5", "--squeezing-db", "3")[0] == 2
    assert invoke("frobnicate")[0] == 2
    assert invoke("sweep")[0] == 2
    assert invoke("run", "--lambda", "0.5", "--alpha", "1", "--phi", "abc")[0] == 2


def test_domain_errors_exit_3():
    code, _, err = invoke("run", "--lambda", "1.2", "--alpha", "1", "--phi", "0.1", "--x", "0")
    assert code == 3 and err
    assert invoke("feasibility", "--lambda", "0.5", "--nu", "1.1", "--alpha", "1", "--phi", "0.1")[0] == 3


def test_validate_exits_zero():
    code, out, _ = invoke("validate")
    assert code == 0
    assert "[FAIL]" not in out


def test_density_table():
    code, out, _ = invoke("density", "--lambda", "0.5", "--alpha", "1e4", "--phi", "1e-10", "--points", "801")
    assert code == 0
    rows = rows_of(out)
    x = np.array([float(r["x"]) for r in rows])
    for col in ("density_exact", "density_exp_beta", "density_linear_beta"):
        y = np.array([float(r[col]) for r in rows])
        assert abs(trapezoid(y, x) - 1.0) < 1e-6
        assert abs(x[np.argmax(y)]) < 0.02
        assert y.max() == pytest.approx(1 / math.sqrt(math.pi), abs=1e-3)


def test_density_column_toggles():
    _, out, _ = invoke("density", "--lambda", "0.5", "--alpha", "2", "--phi", "0.01", "--points", "11",
                       "--no-linear-beta", "--no-exp-beta")
    assert out.splitlines()[0] == "lambda,alpha,phi,theta,x,density_exact"


def test_density_divergence_written_as_nan():
    _, out, _ = invoke("density", "--lambda", "0.5", "--alpha", "2", "--phi", "0.5", "--points", "41", "--halfwidth", "6")
    values = [r["density_linear_beta"] for r in rows_of(out)]
    assert "nan" in values


def test_feasibility_rows():
    code, out, _ = invoke("feasibility", "--lambda", "0.5", "--nu", "0.9", "--phi", "1e-9", "1e-5", "1e-2")
    assert code == 0
    rows = rows_of(out)
    assert [float(r["alpha_for_unit_margin"]) for r in rows] == pytest.approx([2.52538e7, 2.52538e3, 2.52538], rel=1e-5)
    for r in rows:
        assert float(r["beta_exact"]) == pytest.approx(0.0769231, abs=1e-6)
        assert float(r["margin"]) == pytest.approx(1.0)
    assert "paper_quoted_x" not in rows[0]


def test_feasibility_needs_alpha_when_nu_is_one():
    assert invoke("feasibility", "--lambda", "0.5", "--nu", "1.0", "--phi", "1e-3")[0] == 2


def test_sample_rows_recomputable_via_run():
    code, out, _ = invoke("sample", "--lambda", "0.5", "--alpha", "1.5", "--phi", "0.01", "--seed", "4", "--count", "5")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 5 and len({r["seed"] for r in rows}) == 5
    for r in rows[:2]:
        rec = run_protocol(ProtocolParams(0.5, 1.5, 0.01), x=float(r["x"]), with_ps=False)
        assert float(r["v_out_exact"]) == rec.v_out_exact
        _, again, _ = invoke("run", "--lambda", "0.5", "--alpha", "1.5", "--phi", "0.01", "--seed", r["seed"])
        assert rows_of(again)[0]["x"] == r["x"]


def test_json_keys_match_csv_header():
    base = ["run", "--lambda", "0.3", "0.5", "--alpha", "2", "--phi", "0.01", "--x", "0.1"]
    _, csv_out, _ = invoke(*base)
    _, json_out, _ = invoke(*base, "--format", "json")
    data = json.loads(json_out)
    assert isinstance(data, list) and len(data) == 2
    assert list(data[0]) == csv_out.splitlines()[0].split(",")


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mode": "run", "axes": {"lambda": [0.5], "alpha": [2.0], "phi": [0.01], "x": [0.1, 0.2]}}))
    _, out, _ = invoke("sweep", "--config", str(cfg))
    assert len(rows_of(out)) == 2
    _, out, _ = invoke("sweep", "--config", str(cfg), "--x", "0.3")
    assert [r["x"] for r in rows_of(out)] == ["0.29999999999999999"]


def test_bad_config_exit_2(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mode": "run", "bogus": 1}))
    assert invoke("sweep", "--config", str(cfg))[0] == 2
    cfg.write_text("[1, 2")
    assert invoke("sweep", "--config", str(cfg))[0] == 2
    with pytest.raises(ConfigError):
        SweepConfig.from_dict({"mode": "nope", "axes": {}})


def test_output_file_byte_identical(tmp_path):
    args = ["sample", "--lambda", "0.5", "--alpha", "1.5", "--phi", "0.01", "--seed", "1", "--count", "8"]
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert invoke(*args, "--out", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert b"\r\n" not in paths[0].read_bytes()


def test_parallel_order_matches_serial():
    axes = {"lambda": [0.3, 0.5, 0.7], "alpha": [1.5, 2.0], "phi": [0.01], "x": [0.2, -0.2]}
    serial = run_sweep(SweepConfig.from_dict({"mode": "run", "axes": axes, "jobs": 1}))
    parallel = run_sweep(SweepConfig.from_dict({"mode": "run", "axes": axes, "jobs": 2}))
    assert serial == parallel
