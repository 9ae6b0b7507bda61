import json
import subprocess
import sys

import pytest

from expvol.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bessel_json(capsys):
    code, out, _ = run(capsys, "bessel", "--s", "0", "--z", "4")
    assert code == 0
    rec = json.loads(out)
    assert rec["value"] == pytest.approx(0.0223193522, rel=1e-8)
    assert set(rec) >= {"surface", "K", "lengths", "s", "value", "error_estimate", "method"}


def test_bessel_csv_sweep(capsys):
    code, out, _ = run(capsys, "bessel", "--s", "0,0.5,1", "--z", "1", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "x,value" and len(lines) == 4
    assert lines[1].startswith("0.0,")


def test_output_is_byte_stable(capsys):
    a = run(capsys, "crown", "--n", "3", "--K", "1,2,3", "--l", "0.5")[1]
    b = run(capsys, "crown", "--n", "3", "--K", "1,2,3", "--l", "0.5")[1]
    assert a == b


def test_out_file_round_trip(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert main(["crown", "--n", "2", "--K", "1,1", "--Lambda", "1", "--out", str(path)]) == 0
    rec = json.loads(path.read_text())
    assert rec["value"] == pytest.approx(0.0223193522, rel=1e-8)
    assert capsys.readouterr().out == ""


def test_bfunction_paths_and_vector_s(capsys):
    code, out, _ = run(capsys, "bfunction", "--g", "0", "--boundaries", "1,1,1",
                       "--K", "1;1;1", "--s", "0.5:1:2")
    assert code == 0
    rec = json.loads(out)
    assert rec["s"] == [0.5, 1.0, 2.0] and rec["method"] == "operator"
    assert rec["other_value"] == pytest.approx(rec["value"], rel=1e-6)


def test_lfunction_and_expvol(capsys):
    code, out, _ = run(capsys, "lfunction", "--g", "1", "--boundaries", "1", "--K", "1", "--s", "0.5,1")
    assert code == 0 and len(json.loads(out)) == 2
    code, out, _ = run(capsys, "expvol", "--g", "0", "--boundaries", "1,0,0", "--K", "1", "--l", "1,2")
    assert code == 0 and json.loads(out)["value"] > 0


def test_mcshane(capsys):
    code, out, _ = run(capsys, "mcshane", "--K", "1,1", "--Lambda", "4", "--N", "40")
    rec = json.loads(out)
    assert code == 0 and rec["value"] == pytest.approx(rec["target"], rel=1e-12)


def test_tropical(capsys):
    code, out, _ = run(capsys, "tropical", "--K=-1,-1", "--d", "1")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(2 / 3)
    code, out, _ = run(capsys, "tropical", "--K=-1;-1;-1", "--boundaries", "1,1,1")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(1 / 64)


@pytest.mark.parametrize("argv", [
    [], ["nope"], ["bessel", "--s", "x", "--z", "1"], ["crown", "--n", "2", "--K", "1,1"],
    ["crown", "--n", "2", "--K", "1", "--l", "0"], ["mcshane", "--K", "1", "--Lambda", "2"],
])
def test_argument_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_divergence_exits_1(capsys):
    code, _, err = run(capsys, "lfunction", "--g", "0", "--boundaries", "1,0,0", "--K", "1", "--s", "0")
    assert code == 1 and "DivergenceError" in err


def test_missing_table_exits_1(capsys):
    code, _, err = run(capsys, "expvol", "--g", "2", "--boundaries", "1", "--K", "1")
    assert code == 1 and "DataError" in err


def test_verify_subset(tmp_path, capsys):
    path = tmp_path / "v.json"
    code = main(["verify", "--only", "3,9", "--out", str(path)])
    assert code == 0
    data = json.loads(path.read_text())
    assert [d["criterion"] for d in data] == [3, 9] and all(d["passed"] for d in data)


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "expvol", "bessel", "--s", "0", "--z", "1"],
                       capture_output=True, text=True, check=True)
    assert json.loads(p.stdout)["value"] > 0
