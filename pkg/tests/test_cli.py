import json
import os
import subprocess
import sys

import numpy as np
import pytest

from gowers.cli import main
from gowers.dynamics import FiberGroup, FiniteSystem, coboundary_of, translation_system
from gowers.functions import ExponentFunction, GroupFunction, random_unit_function
from gowers.group import Character, get_space


@pytest.fixture
def character_file(tmp_path):
    s = get_space(3, 2)
    chi = Character(s, 5).exponent_table()
    f = GroupFunction(s, np.exp(2j * np.pi * chi / 3))
    path = tmp_path / "f.json"
    path.write_text(f.to_json())
    return str(path)


def test_norm_command(character_file, tmp_path, capsys):
    out = tmp_path / "norm.json"
    assert main(["norm", "--function", character_file, "-k", "2",
                 "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert set(payload) == {"direct", "fast"}
    assert abs(payload["direct"]["value"] - 1.0) < 1e-9
    assert abs(payload["fast"]["value"] - 1.0) < 1e-9
    assert payload["direct"]["method"] == "direct"


def test_norm_stdout_and_determinism(character_file, capsys):
    assert main(["norm", "--function", character_file, "-k", "2"]) == 0
    a = capsys.readouterr().out
    assert main(["norm", "--function", character_file, "-k", "2"]) == 0
    b = capsys.readouterr().out
    assert a == b
    json.loads(a)  # valid JSON


def test_cube_command(tmp_path):
    out = tmp_path / "cube.json"
    assert main(["cube", "--translation", "2,2", "-k", "2", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["support_size"] == 4 ** 3
    assert abs(payload["weight_sum"] - 1.0) < 1e-12
    assert len(payload["support"]) == payload["support_size"]


def test_phase_check_exact_and_complex(tmp_path, character_file):
    s = get_space(2, 2)
    phi = ExponentFunction(s, 1, [0, 0, 0, 1])
    path = tmp_path / "phi.json"
    path.write_text(phi.to_json())
    out = tmp_path / "cert.json"
    assert main(["phase-check", "--function", str(path), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["degree"] == 2 and payload["exact"] and payload["is_phase_polynomial"]
    assert main(["phase-check", "--function", character_file, "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["degree"] == 1 and not payload["exact"]


def test_inverse_search_command(character_file, tmp_path):
    out = tmp_path / "inv.json"
    assert main(["inverse-search", "--function", character_file, "-k", "2",
                 "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert abs(payload["correlation"] - 1.0) < 1e-9
    assert payload["searched"] > 0


def test_inverse_search_low_char_exit_code(tmp_path):
    s = get_space(2, 2)
    f = random_unit_function(s, np.random.default_rng(0))
    path = tmp_path / "f.json"
    path.write_text(f.to_json())
    assert main(["inverse-search", "--function", str(path), "-k", "3"]) == 2
    assert main(["inverse-search", "--function", str(path), "-k", "3",
                 "--unsafe-low-char"]) == 0


def test_cocycle_command(tmp_path):
    system = translation_system(2, 2)
    fiber = FiberGroup(2, 2)
    F = np.arange(4).reshape(-1, 1)
    rho = coboundary_of(system, fiber, F)
    table = {
        "system": json.loads(system.to_json()),
        "fiber": {"p": 2, "m": 2, "L": 1},
        "exponents": rho.exponents.tolist(),
    }
    path = tmp_path / "rho.json"
    path.write_text(json.dumps(table))
    out = tmp_path / "res.json"
    assert main(["cocycle", "--table", str(path), "--solve", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["is_cocycle"] and payload["coboundary"]
    assert "antiderivative" in payload
    # perturbed table: flagged with a violation witness
    table["exponents"][3][1][0] = (table["exponents"][3][1][0] + 1) % 4
    path.write_text(json.dumps(table))
    assert main(["cocycle", "--table", str(path), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert not payload["is_cocycle"] and "violation" in payload


def test_cocycle_malformed_json_is_contract_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{\"nope\": 1}")
    assert main(["cocycle", "--table", str(path)]) == 2


def test_heisenberg_command(tmp_path):
    out = tmp_path / "heis.json"
    assert main(["heisenberg", "--p", "3", "--m", "2", "--dg", "2",
                 "--alpha", "1,1", "--beta", "2,0", "--gamma", "0,1",
                 "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["third_differences_vanish"]
    assert not payload["truncation_seen"]
    assert abs(payload["u3_norm"] - 1.0) < 1e-9
    assert payload["u2_norm"] < 1 - 1e-6


def test_heisenberg_rejects_p2():
    assert main(["heisenberg", "--p", "2"]) == 2


def test_budget_exit_code(character_file):
    assert main(["norm", "--function", character_file, "-k", "3",
                 "--method", "direct", "--budget", "10"]) == 3


def test_usage_exit_code():
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "gowers.cli", "definitely-not-a-command"],
                          capture_output=True, env=env)
    assert proc.returncode == 64
    proc = subprocess.run([sys.executable, "-m", "gowers.cli"], capture_output=True, env=env)
    assert proc.returncode == 64


def test_missing_file_is_io_error(tmp_path):
    assert main(["norm", "--function", str(tmp_path / "missing.json"), "-k", "2"]) == 2


def test_selftest_is_deterministic_across_threads(tmp_path):
    env = dict(os.environ)
    outs = {}
    for threads in (1, 8):
        out_dir = tmp_path / ("t%d" % threads)
        proc = subprocess.run(
            [sys.executable, "-m", "gowers.cli", "selftest", "--seed", "7",
             "--threads", str(threads), "--out", str(out_dir)],
            capture_output=True, env=env)
        assert proc.returncode == 0
        outs[threads] = {
            name: (out_dir / name).read_bytes()
            for name in ("norms.json", "inverse.json", "empirical_c.csv",
                         "cube.json", "heisenberg.json")
        }
    assert outs[1] == outs[8]
    header = outs[1]["empirical_c.csv"].decode().splitlines()[0]
    assert header == "p,n,k,delta,min_correlation,trials"


def test_version_flag():
    proc = subprocess.run([sys.executable, "-m", "gowers.cli", "--version"],
                          capture_output=True)
    assert proc.returncode == 0
