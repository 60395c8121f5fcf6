import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from cedrf import cli

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.mark.parametrize("name,argv", [
    ("binary_rd.csv", ["binary-rd", "--pi", "0.25", "--alpha", "0.05", "--sweep", "R", "0", "0.8", "8"]),
    ("binary_rd.svg", ["binary-rd", "--pi", "0.25", "--alpha", "0.05", "--sweep", "R", "0", "0.8", "8",
                       "--format", "svg"]),
    ("gauss_region.csv", ["gauss-region", "--gammas", "20,20", "--target", "0.25", "--points", "11"]),
    ("gauss_centralized.csv", ["gauss-centralized", "--gammas", "1,1,1", "--sweep", "R", "0", "4", "8"]),
])
def test_golden(name, argv):
    code, out, _ = run(*argv)
    assert code == 0
    assert out == (GOLDEN / name).read_text(encoding="utf-8")


def test_csv_shape_and_roundtrip():
    code, out, _ = run("gauss-centralized", "--gammas", "1,1,1", "--sweep", "R", "0", "4", "200")
    assert code == 0
    assert "\r" not in out and out.endswith("\n")
    table = rows(out)
    assert table[0] == ["R", "D_ce", "D_idrf", "mmse"]
    assert len(table) == 202
    for r in table[1:]:
        for cell in r:
            assert format(float(cell), ".12g") == cell


def test_binary_rd_default_sweep_endpoints():
    code, out, _ = run("binary-rd", "--pi", "0.25", "--alpha", "0.05")
    assert code == 0
    table = rows(out)
    assert table[0] == ["R", "D_ce", "D_idrf", "D_drf"]
    first, last = table[1], table[-1]
    assert float(first[0]) == 0.0 and float(first[1]) == pytest.approx(0.25, abs=1e-12)
    assert float(last[0]) == pytest.approx(0.848548178295, abs=1e-11)
    assert float(last[1]) == pytest.approx(0.05, abs=1e-12)


def test_region_first_row():
    code, out, _ = run("gauss-region", "--gammas", "20,20", "--target", "0.25", "--points", "101")
    table = rows(out)
    assert code == 0 and table[0] == ["R1", "R2"]
    assert float(table[1][0]) == pytest.approx(1.1173, abs=1e-4)
    assert float(table[1][1]) == 0.0


def test_svg_polylines():
    _, out, _ = run("binary-rd", "--pi", "0.25", "--alpha", "0.05", "--format", "svg")
    # one polyline per non-abscissa column: D_ce, D_idrf, D_drf
    assert out.count("<polyline") == 3
    assert 'viewBox="0 0 800 600"' in out


def test_svg_identity_and_empty():
    from cedrf.errors import DomainError
    from cedrf.svg import emit_svg
    doc = emit_svg(["x", "y"], [(0, 0), (1, 1)])
    assert doc.count("<polyline") == 1
    assert doc == emit_svg(["x", "y"], [(0, 0), (1, 1)])
    with pytest.raises(DomainError):
        emit_svg(["x", "y"], [])


def test_json_document():
    code, out, _ = run("binary-cedrf", "--pi", "0.5", "--alphas", "0.1,0.1", "--rates", "1,1",
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == ["command", "parameters", "results"]
    assert doc["results"][0]["D_ce"] == pytest.approx(0.1, abs=1e-15)


def test_simulate_json_and_chunks_identical():
    argv = ["simulate", "--family", "binary", "--pi", "0.5", "--alphas", "0.1,0.1",
            "--rates", "1,1", "--n", "100000", "--seed", "7"]
    code, a, _ = run(*argv)
    _, b, _ = run(*argv, "--chunks", "3")
    _, c, _ = run(*argv)
    assert code == 0 and a == b == c
    doc = json.loads(a)
    assert list(doc) == ["command", "parameters", "results", "seed", "stderr"]
    assert doc["seed"] == 7


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"gammas": [1, 1, 1], "sweep": ["R", 0, 2, 4]}))
    code, out, _ = run("gauss-centralized", "--config", str(cfg))
    assert code == 0 and len(rows(out)) == 6
    code, out, _ = run("gauss-centralized", "--config", str(cfg), "--sweep", "R", "0", "1", "2")
    assert code == 0 and len(rows(out)) == 4


def test_output_file(tmp_path):
    dest = tmp_path / "x.csv"
    code, out, _ = run("gauss-centralized", "--gammas", "1", "--sweep", "R", "0", "1", "2",
                       "--output", str(dest))
    assert code == 0 and out == ""
    assert dest.read_text().startswith("R,D_ce")


@pytest.mark.parametrize("argv,fragment", [
    (["gauss-centralized", "--gammas", "1,-1"], "SNR"),
    (["gauss-centralized"], "--gammas is required"),
    (["gauss-centralized", "--gammas", "1", "--sweep", "R", "0", "1", "0"], "steps"),
    (["gauss-region", "--gammas", "20,20", "--target", "0.01"], "target"),
    (["binary-rd", "--pi", "0.7", "--alpha", "0.05"], "source bias"),
    (["simulate", "--family", "binary", "--pi", "0.5", "--alphas", "0.1", "--rates", "1"], "--seed"),
    (["codebook", "--alpha", "0.1", "--rate", "1", "--n", "40", "--seed", "1"], "26"),
    (["nonsense"], "invalid choice"),
    ([], "command"),
])
def test_validation_exit_code(argv, fragment):
    code, out, err = run(*argv)
    assert code == 2 and out == ""
    assert err.count("\n") == 1
    assert fragment in err


def test_io_error_exit_code(tmp_path):
    code, _, err = run("gauss-centralized", "--gammas", "1", "--output",
                       str(tmp_path / "missing" / "x.csv"))
    assert code == 3 and "I/O" in err
    code, _, _ = run("gauss-centralized", "--config", str(tmp_path / "nope.json"))
    assert code == 3


def test_internal_error_exit_code(monkeypatch):
    def boom(args):
        raise AssertionError("broken invariant")
    monkeypatch.setitem(cli.COMMANDS, "gauss-centralized", boom)
    code, _, err = run("gauss-centralized", "--gammas", "1")
    assert code == 4 and "internal" in err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cedrf", "binary-asymptotic", "--alpha", "0.3",
                           "--sum-rate", "4", "--sweep", "L", "1", "4", "3"],
                          capture_output=True, text=True, check=True)
    table = rows(proc.stdout)
    assert table[0] == ["L", "D_ce", "D_limit", "D_bound"]
    assert float(table[4][1]) == pytest.approx(0.216, abs=1e-12)
