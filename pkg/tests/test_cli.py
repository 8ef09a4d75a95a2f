import json
from pathlib import Path

import numpy as np
import pytest

from condgate.cli import main

ROOT = Path(__file__).resolve().parent.parent
CIRCUITS = ROOT / "circuits"
GOLDEN = Path(__file__).resolve().parent / "golden"
FIFTY = str(CIRCUITS / "fifty_fifty.json")
STATE_11 = str(CIRCUITS / "state_11.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def dense(doc):
    n = len(doc["basis"])
    m = np.zeros((n, n), dtype=complex)
    for e in doc["entries"]:
        m[e["row"], e["col"]] = complex(e["re"], e["im"])
    return m


def test_apply_headline(capsys):
    code, out, _ = run(capsys, "apply", FIFTY, "--state", STATE_11,
                       "--prepare", "1", "--count", "1", "--nmax", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["probability"] == pytest.approx(0.3125, abs=1e-12)
    amps = {tuple(a["occ"]): a["re"] for a in doc["unnormalized_state"]["amplitudes"]}
    assert amps[(2, 0)] == pytest.approx(-3 / 8, abs=1e-12)
    assert amps[(1, 1)] == pytest.approx(-1 / (4 * np.sqrt(2)), abs=1e-12)


@pytest.mark.parametrize("method", ["qsymbol", "oracle"])
def test_gate_on_identity(capsys, method):
    code, out, _ = run(capsys, "gate", str(CIRCUITS / "identity.json"), "--nmax", "3",
                       "--method", method)
    assert code == 0
    doc = json.loads(out)
    assert doc["basis"] == [[0], [1], [2], [3]]
    assert doc["sector_shift"] == 0
    assert np.array_equal(dense(doc), np.eye(4))


def test_gate_output_is_byte_stable(capsys):
    args = ("gate", str(CIRCUITS / "mesh.json"), "--prepare", "1,0", "--count", "0,1")
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first
    assert ": -0.0," not in first and ": -0.0\n" not in first


def test_compile_round_trip(capsys, tmp_path):
    mesh = str(CIRCUITS / "mesh.json")
    code, out, _ = run(capsys, "compile", mesh)
    assert code == 0
    compiled = tmp_path / "compiled.json"
    compiled.write_text(out)
    again = json.loads(run(capsys, "compile", str(compiled))[1])
    first = json.loads(out)
    a = np.array([[complex(v["re"], v["im"]) for v in r] for r in first["elements"][0]["matrix"]])
    b = np.array([[complex(v["re"], v["im"]) for v in r] for r in again["elements"][0]["matrix"]])
    assert np.abs(a - b).max() <= 1e-12
    assert np.abs(a.conj().T @ a - np.eye(4)).max() <= 1e-12
    g1 = dense(json.loads(run(capsys, "gate", mesh, "--prepare", "1,0", "--count", "1,0")[1]))
    g2 = dense(json.loads(run(capsys, "gate", str(compiled), "--prepare", "1,0", "--count", "1,0")[1]))
    assert np.abs(g1 - g2).max() <= 1e-12


def test_inline_json_circuit(capsys):
    inline = '{"modes": 2, "signal_modes": 1, "elements": [{"type": "bs", "theta": 0.3, "modes": [0, 1]}]}'
    code, out, _ = run(capsys, "check", inline)
    doc = json.loads(out)
    assert code == 0
    assert doc["unitarity_residual"] <= 1e-12 and doc["completeness_residual"] <= 1e-9


def test_apply_with_operator_file(capsys, tmp_path):
    op = tmp_path / "op.json"
    assert main(["gate", FIFTY, "--prepare", "1", "--count", "1", "--nmax", "2",
                 "--out", str(op)]) == 0
    assert capsys.readouterr().out == ""
    code, out, _ = run(capsys, "apply", "--operator", str(op), "--state", STATE_11)
    assert code == 0
    assert json.loads(out)["probability"] == pytest.approx(5 / 16, abs=1e-12)


def test_distribution(capsys):
    code, out, _ = run(capsys, "distribution", FIFTY, "--state", STATE_11, "--prepare", "1")
    doc = json.loads(out)
    assert code == 0
    probs = {tuple(o["count"]): o["probability"] for o in doc["outcomes"]}
    assert probs[(1,)] == pytest.approx(5 / 16, abs=1e-12)
    assert doc["total"] == pytest.approx(1, abs=1e-12)


def test_diagram_matches_golden(capsys):
    code, out, _ = run(capsys, "diagram", FIFTY)
    assert code == 0
    assert out == (GOLDEN / "fifty_fifty.dot").read_text()


def test_diagram_rejects_multi_ancilla(capsys):
    code, _, err = run(capsys, "diagram", str(CIRCUITS / "mesh.json"))
    assert code == 1 and "history decomposition" in err


@pytest.mark.parametrize("argv", [
    ["gate", "{not json"],
    ["gate", "/nonexistent/circuit.json"],
    ["gate", FIFTY, "--prepare", "1,1"],
    ["gate", FIFTY, "--prepare", "x"],
    ["gate", FIFTY, "--prepare", "-1"],
    ["gate", FIFTY, "--method", "fast"],
    ["apply", "--state", STATE_11],
    ["compile", '{"modes": 2, "elements": [{"type": "warp"}]}'],
    ["bogus"],
])
def test_validation_errors_exit_one(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1


def test_cost_guard_exits_two(capsys, monkeypatch):
    monkeypatch.setenv("CONDGATE_MAX_BASIS", "10")
    code, out, err = run(capsys, "gate", FIFTY, "--nmax", "4", "--json-errors")
    assert code == 2
    doc = json.loads(out)
    assert doc["error"]["kind"] == "CostGuardError" and doc["error"]["exit_code"] == 2
    assert "error" in err


def test_json_errors_for_syntax(capsys):
    code, out, _ = run(capsys, "compile", '{"modes": 2,\n "elements": [}', "--json-errors")
    assert code == 1
    err = json.loads(out)["error"]
    assert err["kind"] == "CircuitSyntaxError" and "line 2" in err["message"]


def test_unwritable_out(capsys, tmp_path):
    code, _, err = run(capsys, "compile", FIFTY, "--out", str(tmp_path / "no" / "x.json"))
    assert code == 1 and "cannot write" in err
