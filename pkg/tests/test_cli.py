import csv
import io
import json
import math

import numpy as np
import pytest

from snwit.cli import dual_verdict, main
from snwit.states import isotropic_state
from snwit.symmetric_measurement import SymmetricPovm, matrix_to_json

WORKED_FLAGS = ["--d", "3", "--N", "8", "--M", "2", "--k", "2", "--x", "1.5"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_povm_build_writes_json(tmp_path, capsys):
    out = tmp_path / "povm.json"
    code, text, _ = run(capsys, "povm", "build", "--d", "3", "--N", "8", "--M", "2", "--x", "1.1", "--out", str(out))
    assert code == 0
    assert "validation: pass" in text
    povm = SymmetricPovm.from_json(out.read_text())
    assert povm.x == 1.1 and povm.N == 8
    code, text, _ = run(capsys, "povm", "validate", "--in", str(out))
    assert code == 0


def test_povm_build_unrealizable_upper_endpoint(capsys):
    # x = d/M = 1.5 would need projectors of trace 3/2
    code, text, _ = run(capsys, "povm", "build", "--d", "3", "--N", "8", "--M", "2", "--x", "1.5")
    assert code == 1
    assert "min eigenvalue" in text and "FAIL" in text


@pytest.mark.parametrize("x", ["0.75", "2.0"])
def test_povm_build_range_errors(x, capsys):
    code, _, err = run(capsys, "povm", "build", "--d", "3", "--N", "8", "--M", "2", "--x", x)
    assert code == 2
    assert "outside" in err


def test_config_errors_are_aggregated(capsys):
    code, _, err = run(capsys, "kpos-check", "--d", "3", "--N", "7", "--M", "2", "--k", "4", "--x", "1.5", "--trials", "0")
    assert code == 2
    assert "N(M-1)" in err and "--k" in err and "--trials" in err and "--seed" in err


def test_povm_build_mub_basis(capsys):
    code, text, _ = run(capsys, "povm", "build", "--d", "3", "--N", "4", "--M", "3", "--x", "1", "--basis", "mub")
    assert code == 0


@pytest.mark.parametrize("v,sign,verdict", [("0.7", -1, "yes"), ("0.6", 1, "no")])
def test_witness_eval_isotropic(v, sign, verdict, capsys):
    code, text, _ = run(capsys, "witness", "eval", *WORKED_FLAGS, "--v", v)
    assert code == 0
    value = float(text.split("Tr(W_k rho) = ")[1].split()[0])
    assert math.copysign(1, value) == sign
    assert f"SN >= 3: {verdict}" in text


def test_witness_eval_boundary(capsys):
    code, text, _ = run(capsys, "witness", "eval", *WORKED_FLAGS, "--v", "0.625", "--format", "json")
    res = json.loads(text)
    assert abs(res["value"]) < 1e-9 and res["detected"] is False


def test_witness_eval_state_file(tmp_path, capsys):
    path = tmp_path / "rho.json"
    path.write_text(json.dumps({"matrix": matrix_to_json(isotropic_state(3, 0.9).matrix)}))
    code, text, _ = run(capsys, "witness", "eval", *WORKED_FLAGS, "--state", f"file:{path}")
    assert code == 0 and "SN >= 3: yes" in text


def test_witness_eval_malformed_state(tmp_path, capsys):
    path = tmp_path / "rho.json"
    path.write_text("[[1, 2], [3]]")
    code, _, err = run(capsys, "witness", "eval", *WORKED_FLAGS, "--state", f"file:{path}")
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(matrix_to_json(2 * np.eye(9))))
    code, _, err = run(capsys, "witness", "eval", *WORKED_FLAGS, "--state", f"file:{bad}")
    assert code == 2 and "trace" in err


def _sweep(capsys, *extra):
    code, text, _ = run(capsys, "sweep", "--d", "3", "--N", "8", "--M", "2", "--k", "2", *extra)
    assert code == 0
    return text


def test_sweep_csv(capsys):
    text = _sweep(capsys, "--x-min", "0.76", "--x-max", "1.5", "--steps", "100")
    assert "\r" not in text
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == ["x", "v_threshold", "v_baseline"]
    assert len(rows) == 100
    assert abs(float(rows[-1]["v_threshold"]) - 0.625) < 1e-9
    for r in rows:
        assert float(r["v_baseline"]) == 0.685
        if float(r["x"]) > 1.286:
            assert float(r["v_threshold"]) < 0.685


def test_sweep_single_step(capsys):
    rows = list(csv.DictReader(io.StringIO(_sweep(capsys, "--x-min", "1.2", "--x-max", "1.5", "--steps", "1"))))
    assert len(rows) == 1 and float(rows[0]["x"]) == 1.2


def test_sweep_json_and_out(tmp_path, capsys):
    out = tmp_path / "sweep.json"
    _sweep(capsys, "--x-min", "1.0", "--x-max", "1.5", "--steps", "3", "--format", "json", "--out", str(out))
    rows = json.loads(out.read_text())
    assert [r["x"] for r in rows] == [1.0, 1.25, 1.5]


def test_sweep_rejects_invalid_range(capsys):
    code, _, _ = run(capsys, "sweep", "--d", "3", "--N", "8", "--M", "2", "--k", "2", "--x-min", "0.7", "--x-max", "1.5", "--steps", "3")
    assert code == 2


def test_sweep_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        _sweep(capsys, "--x-min", "0.8", "--x-max", "1.5", "--steps", "17", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()


def test_kpos_check_worked_example(capsys):
    code, text, _ = run(capsys, "kpos-check", *WORKED_FLAGS, "--seed", "1", "--trials", "100", "--format", "json")
    res = json.loads(text)
    assert code == 0 and res["pass"]
    assert res["max_dev_from_bound"] < 1e-10


def test_kpos_check_off_saturation_passes(capsys):
    code, text, _ = run(capsys, "kpos-check", "--d", "3", "--N", "8", "--M", "2", "--k", "2", "--x", "1.1", "--seed", "1", "--trials", "20", "--format", "json")
    res = json.loads(text)
    assert code == 0
    assert res["max_dev_from_bound"] > 1e-3 and res["max_dev_from_predicted"] < 1e-10


@pytest.mark.parametrize("extra", [["--k", "4", "--trials", "10"], ["--k", "2", "--trials", "0"]])
def test_kpos_check_usage_errors(extra, capsys):
    flags = ["--d", "3", "--N", "8", "--M", "2", "--x", "1.5", "--seed", "1"]
    code, _, _ = run(capsys, "kpos-check", *flags, *extra)
    assert code == 2


def test_kpos_random_rotation_needs_seed(capsys):
    code, _, err = run(capsys, "witness", "eval", *WORKED_FLAGS, "--v", "0.5", "--rotation", "random")
    assert code == 2 and "--seed" in err


def test_kpos_deterministic(capsys):
    args = ["kpos-check", *WORKED_FLAGS, "--seed", "4", "--trials", "10", "--rotation", "random", "--format", "json"]
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_fedorov_command(capsys):
    code, text, _ = run(capsys, "fedorov", "--sigma-plus", "2", "--sigma-minus", "1", "--format", "json")
    res = json.loads(text)
    assert res["schmidt_number"] == pytest.approx(1.25)
    assert res["participation_ratio_svd"] == pytest.approx(1.25, rel=0.01)


def _dual(capsys, v, sigma_plus):
    return run(capsys, "dual-validate", *WORKED_FLAGS, "--v", v, "--sigma-plus", sigma_plus, "--sigma-minus", "1", "--format", "json")


def test_dual_validate_verdicts(capsys):
    r3 = repr(3 + math.sqrt(8))
    code, text, _ = _dual(capsys, "0.9", r3)
    assert json.loads(text)["verdict"] == "consistent" and code == 0
    code, text, _ = _dual(capsys, "0.3", r3)
    assert json.loads(text)["verdict"] == "witness inconclusive" and code == 0
    code, text, _ = _dual(capsys, "0.9", "1")
    assert json.loads(text)["verdict"].startswith("inconsistent") and code == 1


def test_dual_verdict_rule():
    assert dual_verdict(-0.1, 3.0, 2, 1e-10) == "consistent"
    assert dual_verdict(0.0, 3.0, 2, 1e-10) == "witness inconclusive"
    assert dual_verdict(-0.1, 1.0, 2, 1e-10).startswith("inconsistent")


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"d": 3, "N": 8, "M": 2, "k": 2, "x": 1.5, "v": 0.6}))
    code, text, _ = run(capsys, "witness", "eval", "--config", str(cfg))
    assert "SN >= 3: no" in text
    code, text, _ = run(capsys, "witness", "eval", "--config", str(cfg), "--v", "0.7")
    assert "SN >= 3: yes" in text


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"dimension": 3}))
    code, _, err = run(capsys, "sweep", "--config", str(cfg))
    assert code == 2 and "dimension" in err


def test_env_tolerance(monkeypatch, capsys):
    # loosening the tolerance past the worst eigenvalue makes x=1.5 pass
    monkeypatch.setenv("SNWIT_TOL", "0.5")
    code, text, _ = run(capsys, "povm", "build", "--d", "3", "--N", "8", "--M", "2", "--x", "1.5")
    assert code == 0


def test_argparse_usage_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2
