import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from jacobi_szego.cli import main
from jacobi_szego.experiments import CSV_COLUMNS, REPORT_HEADER, ExperimentConfig, _thread_count, run_equivalence


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


def test_forward_zero_and_empty(tmp_path, capsys):
    for alpha in ([0.0, 0.0], [], {"alpha": []}):
        code, out, _ = run(capsys, "forward", write(tmp_path, "a.json", alpha))
        doc = json.loads(out)
        assert code == 0
        assert doc["a"][0] == pytest.approx(np.sqrt(2), abs=1e-15)
        assert set(doc["norms"]) == {"l11", "l21", "intersection"}
        assert set(doc) >= {"a", "b", "lambda", "kappa", "norms"}


def test_forward_is_deterministic(tmp_path, capsys):
    f = write(tmp_path, "a.json", [0.3, -0.1, 0.2])
    _, first, _ = run(capsys, "forward", f)
    _, second, _ = run(capsys, "forward", f)
    assert first == second


def test_forward_input_errors(tmp_path, capsys):
    assert run(capsys, "forward", write(tmp_path, "bad.json", "{not json"))[0] == 2
    assert run(capsys, "forward", tmp_path / "missing.json")[0] == 2
    assert run(capsys, "forward", write(tmp_path, "s.json", {"alpha": ["x"]}))[0] == 2
    assert run(capsys, "forward", write(tmp_path, "d.json", [1.5]))[0] == 3


def test_solve_zero_file(tmp_path, capsys):
    zero = {"lambda": {"offset": 0, "values": [0.0, 0.0]}, "kappa": {"offset": 0, "values": [0.0]}}
    code, out, _ = run(capsys, "solve", write(tmp_path, "z.json", zero))
    doc = json.loads(out)
    assert code == 0 and doc["residual"] == 0.0 and not any(doc["alpha"]) and doc["N_stripped"] == 0


def test_forward_solve_roundtrip(tmp_path, capsys):
    alpha = [0.02, -0.01, 0.005]
    run(capsys, "forward", write(tmp_path, "a.json", alpha), "--out", tmp_path / "f.json")
    code, out, _ = run(capsys, "solve", tmp_path / "f.json", "--tol", "1e-13")
    doc = json.loads(out)
    assert code == 0 and doc["residual"] < 1e-13
    got = np.pad(doc["alpha"], (0, 8))[:3]
    assert np.allclose(got, alpha, atol=1e-10)


def test_solve_exit_codes(tmp_path, capsys):
    big = write(tmp_path, "big.json", {"lambda": [0.0, 1.0], "kappa": [0.0, 1.0]})
    assert run(capsys, "solve", big, "--no-strip")[0] == 4
    small = write(tmp_path, "s.json", {"lambda": [0.0, 0.3, 0.2], "kappa": [0.0, -0.3, 0.1]})
    assert run(capsys, "solve", small, "--max-iter", 2)[0] == 5
    assert run(capsys, "solve", write(tmp_path, "x.json", {"foo": 1}))[0] == 2
    assert run(capsys, "solve", small, "--space", "l7")[0] == 2


def test_solve_accepts_operator_file(tmp_path, capsys):
    op = {"a": [1.0, 1.0], "b": [0.0, 10.0]}
    code, out, _ = run(capsys, "solve", write(tmp_path, "op.json", op))
    assert code == 0 and json.loads(out)["N_stripped"] >= 1


def test_equivalence_bad_grid(tmp_path, capsys):
    assert run(capsys, "equivalence", "--grid-size", 128, "--out", tmp_path)[0] == 2
    assert run(capsys, "equivalence", "--grid-size", 1000, "--out", tmp_path)[0] == 2
    assert run(capsys, "equivalence", "--mass", "1.0:0.1", "--out", tmp_path)[0] == 2


def test_equivalence_reports_are_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(capsys, "equivalence", "--samples", 4, "--out", tmp_path / d)[0] == 0
    for name in ("equivalence_forward.csv", "equivalence_forward.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    rows = list(csv.reader(open(tmp_path / "a" / "equivalence_forward.csv")))
    assert rows[0] == CSV_COLUMNS
    assert {r[-1] for r in rows[1:]} == {"consistent"}
    doc = json.loads((tmp_path / "a" / "equivalence_forward.json").read_text())
    assert doc["header"] == REPORT_HEADER and doc["summary"] == {"consistent": 4}


def test_reverse_with_off_band_mass(tmp_path, capsys):
    code, _, _ = run(capsys, "equivalence", "--direction", "reverse", "--samples", 3, "--mass", "2.5:0.1", "--out", tmp_path)
    assert code == 0
    doc = json.loads((tmp_path / "equivalence_reverse.json").read_text())
    assert doc["summary"] == {"consistent": 3}
    for s in doc["samples"]:
        assert s["details"]["n_stripped"] >= 1 and s["details"]["eigenvalues"] == [pytest.approx(2.5, abs=1e-8)]


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("SZJ_THREADS", "3")
    assert _thread_count(ExperimentConfig()) == 3
    monkeypatch.setenv("SZJ_THREADS", "zero")
    assert _thread_count(ExperimentConfig()) >= 1
    assert _thread_count(ExperimentConfig(threads=1)) == 1


def test_threading_does_not_change_results():
    one = run_equivalence(ExperimentConfig(samples=4, threads=1))
    many = run_equivalence(ExperimentConfig(samples=4, threads=4))
    assert [r.to_json() for r in one] == [r.to_json() for r in many]


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(grid_size=128)
    with pytest.raises(ValueError):
        ExperimentConfig(tol=0)
    with pytest.raises(ValueError):
        ExperimentConfig(direction="sideways")
    assert ExperimentConfig(grid_size=1024).window == 128


def test_module_entry_point(tmp_path):
    f = write(tmp_path, "a.json", [0.1])
    res = subprocess.run([sys.executable, "-m", "jacobi_szego", "forward", str(f)], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["b"][0] == pytest.approx(0.2)
