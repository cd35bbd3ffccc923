import json
import math
import os
import subprocess
from pathlib import Path

import jsonschema
import numpy as np
import pytest

import nisqkit

DATA = Path(os.environ.get("NISQ_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))
SCHEMA = Path(os.environ.get("NISQ_SCHEMA_DIR", Path(__file__).resolve().parents[2] / "schema"))
BIN = os.environ.get("NISQKIT_BIN")

BELL = "qreg q[2];\nh q[0];\ncx q[0],q[1];\n"


def test_bell_state_matches_numpy():
    c = nisqkit.parse_circuit(BELL)
    psi = nisqkit.statevector(c)
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    cx = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    ref = cx @ np.kron(h, np.eye(2)) @ np.array([1, 0, 0, 0])
    np.testing.assert_allclose(psi, ref, atol=1e-14)
    assert abs(nisqkit.amplitude(c, "00", backend="mps") - psi[0]) < 1e-10


def test_render_round_trip_and_errors():
    c = nisqkit.load_circuit(str(DATA / "bell.qasm"))
    assert nisqkit.parse_circuit(c.render()) == c
    with pytest.raises(nisqkit.InputError):
        nisqkit.parse_circuit("qreg q[1];\ncx q[0],q[1];\n")
    with pytest.raises(ValueError):
        nisqkit.load_circuit(str(DATA / "missing.qasm"))


def test_gradients_agree():
    c = nisqkit.parse_circuit("qreg q[2];\nry(a) q[0];\nrx(b) q[1];\ncx q[0],q[1];\nrz(c) q[1];\n")
    theta = [0.3, -1.1, 0.7]
    adj = nisqkit.gradient(c, "1 ZZ\n0.5 XI", theta, method="adjoint")
    ps = nisqkit.gradient(c, "1 ZZ\n0.5 XI", theta, method="pshift")
    fd = nisqkit.gradient(c, "1 ZZ\n0.5 XI", theta, method="fd2")
    np.testing.assert_allclose(adj, ps, atol=1e-10)
    np.testing.assert_allclose(adj, fd, atol=1e-6)


def test_noise_and_mitigation():
    noise = nisqkit.NoiseModel.load(str(DATA / "depol.json"))
    c = nisqkit.parse_circuit(BELL)
    probs = nisqkit.density_probabilities(c, noise)
    assert abs(sum(probs) - 1) < 1e-12
    r = nisqkit.zne_richardson([1, 2, 3], [0.8, 0.64, 0.512])
    assert r["gamma"] == pytest.approx([3, -3, 1], abs=1e-12)
    m = nisqkit.mem_invert(np.array([[0.9, 0.2], [0.1, 0.8]]), [1.0, 0.0])
    assert m["clipped"] and m["probabilities"] == pytest.approx([1.0, 0.0])


def test_route_and_fuse():
    c = nisqkit.load_circuit(str(DATA / "cx02.qasm"))
    routed, swaps, final = nisqkit.route(c, [(0, 1), (1, 2)], 3)
    assert swaps == 1 and sorted(final) == [0, 1, 2]
    assert len(nisqkit.fuse(nisqkit.load_circuit(str(DATA / "hh.qasm")))) == 0


def test_benchmarks():
    rb = nisqkit.rb(lengths=[1, 2, 4, 8], sequences=3, shots=0)
    assert abs(rb["error_rate"]) < 1e-3
    qv = nisqkit.quantum_volume(max_width=3, circuits=10)
    assert qv["log2_volume"] == 3


def _cli(*args):
    out = subprocess.run([BIN, *map(str, args)], check=True, capture_output=True, text=True).stdout
    return json.loads(out)


CLI_COMMANDS = [
    ["simulate", DATA / "bell.qasm", "--task", "sample", "--shots", 300],
    ["simulate", DATA / "bell.qasm", "--backend", "density", "--task", "probabilities", "--noise", DATA / "depol.json"],
    ["benchmark", "--protocol", "rb", "--lengths", "1,4,16", "--sequences", 4, "--shots", 200, "--noise", DATA / "depol.json"],
    ["benchmark", "--protocol", "qv", "--max-width", 3, "--circuits", 8, "--shots", 100],
    ["benchmark", "--protocol", "mirror", "--qubits", 3, "--repetitions", 4],
    ["benchmark", "--protocol", "rqc-xeb", "--grid", "2x2", "--cycles", 4, "--shots", 200],
    ["mitigate", "--method", "zne-richardson", "--data", DATA / "zne3.txt"],
    ["mitigate", "--method", "mem-invert", "--response", DATA / "mem_response.txt", "--probs", "1,0"],
    ["compile", DATA / "cx02.qasm", "--graph", DATA / "line3.txt", "--passes", "route,fuse"],
    ["gradcheck", "--circuits", 2, "--max-qubits", 3],
]


@pytest.mark.skipif(BIN is None, reason="NISQKIT_BIN not set")
@pytest.mark.parametrize("args", CLI_COMMANDS, ids=lambda a: "-".join(str(x) for x in a[:3]))
def test_cli_report_schema_and_determinism(args):
    schema = json.loads((SCHEMA / "run_report.schema.json").read_text())
    a = _cli("--seed", 11, "--threads", 1, *args)
    b = _cli("--seed", 11, "--threads", 2, *args)
    jsonschema.validate(a, schema)
    jsonschema.validate(b, schema)
    assert a["results"] == b["results"]
    assert a["seed"] == 11
