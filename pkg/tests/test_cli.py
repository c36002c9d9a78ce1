import json
import re
import subprocess
import sys

import jsonschema
import pytest

from binmds.cli import main
from binmds.repair import REPORT_SCHEMA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def c1_file(tmp_path, capsys):
    path = tmp_path / "c1.json"
    code, out, _ = run(capsys, "build", "--construction", "c1", "--k", 3, "--r", 2,
                       "--s", 2, "--m", 4, "--out", path)
    assert code == 0 and "l=32" in out
    return path


@pytest.fixture
def c2_file(tmp_path, capsys):
    path = tmp_path / "c2.json"
    code, out, _ = run(capsys, "build", "--construction", "c2", "--k", 5, "--r", 4,
                       "--m", 4, "--out", path)
    assert code == 0 and "n=9" in out
    return path


@pytest.fixture
def payload(tmp_path):
    path = tmp_path / "data.bin"
    path.write_bytes(bytes(range(256)) * 3 + b"tail")
    return path


def digests(text):
    return dict(re.findall(r"column (\d+) sha256 ([0-9a-f]{64}) ok", text))


def test_encode_decode_repair(tmp_path, capsys, c2_file, payload):
    cw, back = tmp_path / "cw.bin", tmp_path / "back.bin"
    assert run(capsys, "verify-mds", "--code", c2_file)[0] == 0
    assert run(capsys, "encode", "--code", c2_file, "--data", payload, "--out", cw)[0] == 0
    code, out, _ = run(capsys, "decode", "--code", c2_file, "--codeword", cw,
                       "--erase", "0,2,5,8", "--out", back)
    assert code == 0 and back.read_bytes() == payload.read_bytes()
    decoded = digests(out)
    for j in ("2", "5"):
        code, out, _ = run(capsys, "repair", "--code", c2_file, "--codeword", cw,
                           "--fail", j)
        assert code == 0 and digests(out)[j] == decoded[j]
    assert "accessed 192" in out


def test_repair_with_chosen_helpers(tmp_path, capsys, c1_file, payload):
    cw = tmp_path / "cw.bin"
    run(capsys, "encode", "--code", c1_file, "--data", payload, "--out", cw)
    code, out, _ = run(capsys, "repair", "--code", c1_file, "--codeword", cw,
                       "--fail", 2, "--helpers", "0,1,4")
    assert code == 0 and "helpers [0, 1, 3, 4] designated [3]" in out
    assert "downloaded 64 accessed 64" in out


def test_validation_errors_exit_2(tmp_path, capsys, c1_file, payload):
    cw = tmp_path / "cw.bin"
    run(capsys, "encode", "--code", c1_file, "--data", payload, "--out", cw)
    code, _, err = run(capsys, "repair", "--code", c1_file, "--codeword", cw,
                       "--fail", 2, "--helpers", "0,1")
    assert code == 2 and json.loads(err)["error"] == "validation"
    code, _, err = run(capsys, "build", "--construction", "c1", "--k", 2, "--r", 2,
                       "--s", 2, "--m", 4, "--out", tmp_path / "x.json")
    assert code == 2
    code, _, _ = run(capsys, "decode", "--code", c1_file, "--codeword", cw,
                     "--erase", "0,1,2")
    assert code == 2
    assert run(capsys, "verify-mds", "--code", tmp_path / "missing.json")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["build"])
    assert exc.value.code == 2


def test_failed_verification_exit_3(tmp_path, capsys, c1_file, payload):
    cw = tmp_path / "cw.bin"
    run(capsys, "encode", "--code", c1_file, "--data", payload, "--out", cw)
    raw = bytearray(cw.read_bytes())
    header = raw.index(b"\n") + 1
    raw[header + 4] ^= 0xFF          # first stripe, column 1
    cw.write_bytes(bytes(raw))
    code, out, err = run(capsys, "repair", "--code", c1_file, "--codeword", cw,
                         "--fail", 0)
    assert code == 3 and "MISMATCH" in out
    assert json.loads(err)["error"] == "verification"


def test_report_table_and_plot(tmp_path, capsys, c2_file):
    fig = tmp_path / "fig.png"
    code, out, _ = run(capsys, "report", "--code", c2_file, "--plot", fig)
    assert code == 0
    assert "average accessed = 128 (expected 128)" in out
    assert "lower bound dl/(d-k+1) = 96" in out
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_report_json_deterministic(capsys, c1_file):
    first = run(capsys, "report", "--code", c1_file, "--format", "json", "--seed", 5)[1]
    second = run(capsys, "report", "--code", c1_file, "--format", "json", "--seed", 5)[1]
    assert first == second
    doc = json.loads(first)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert all(doc["verdicts"].values())


def test_schema_command(capsys):
    code, out, _ = run(capsys, "schema")
    assert code == 0 and json.loads(out) == json.loads(json.dumps(REPORT_SCHEMA))


def test_evenodd_base_from_cli(tmp_path, capsys):
    code, out, _ = run(capsys, "build", "--construction", "c1", "--k", 3, "--r", 2,
                       "--s", 2, "--m", 4, "--base", "evenodd", "--out",
                       tmp_path / "e.json")
    assert code == 0
    assert run(capsys, "verify-mds", "--code", tmp_path / "e.json")[0] == 0


def test_module_entry_point(c1_file):
    proc = subprocess.run([sys.executable, "-m", "binmds", "verify-mds", "--code",
                           str(c1_file)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("pass: 10 submatrices")
