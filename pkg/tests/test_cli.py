import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qdiv import channels as ch
from qdiv.cli import main
from qdiv.io import channel_to_json, matrix_to_json
from oracles import geometric

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def test_state_qubit_example(capsys):
    code, out, _ = run(capsys, "state", DATA / "qubit_phi.json", DATA / "qubit_psi.json")
    assert code == 0
    assert out["value"] == pytest.approx(0.143841, abs=1e-6)


def test_state_all_methods_agree_on_equal_states(capsys):
    code, out, _ = run(capsys, "state", DATA / "qubit_phi.json", DATA / "qubit_phi.json", "--method", "all")
    assert code == 0
    assert out["value"] == 0.0
    assert set(out["methods"]) == {"closed", "variational", "regularized"}
    assert abs(out["methods"]["variational"]["value"]) <= 1e-6


def test_state_support_violation(capsys):
    code, out, _ = run(capsys, "state", DATA / "maximally_mixed.json", DATA / "pure_zero.json")
    assert code == 0
    assert out["value"] == "inf" and out["status"] == "infinite"
    assert len(out["epsilon_trace"]) == 9


def test_state_other_functions(capsys):
    code, out, _ = run(capsys, "state", DATA / "pure_zero.json", DATA / "maximally_mixed.json",
                       "--f", "alpha:0.5", "--method", "all")
    assert code == 0 and out["value"] == pytest.approx(0.5 * math.log(2), abs=1e-10)
    for f in ("left", "right", "logn:10"):
        assert run(capsys, "state", DATA / "qubit_phi.json", DATA / "qubit_psi.json", "--f", f)[0] == 0


def test_state_flag_overrides(capsys):
    code, out, _ = run(capsys, "state", DATA / "qubit_phi.json", DATA / "qubit_psi.json",
                       "--method", "regularized", "--eps-ladder", "1e-2,1e-3,1e-4,1e-5,1e-6,1e-7")
    assert code == 0 and len(out["epsilon_trace"]) == 6
    code, out, _ = run(capsys, "state", DATA / "qubit_phi.json", DATA / "qubit_psi.json",
                       "--method", "variational", "--ngrid", "10,1000", "--quad-nodes", "200")
    assert code == 0 and [n for n, _ in out["sequence"]] == [10, 1000]


def test_unnormalised_input_needs_flag(capsys, tmp_path):
    p = write(tmp_path, "w.json", matrix_to_json(np.eye(2)))
    code, _, err = run(capsys, "state", p, p)
    assert code == 3 and err.startswith("error code=3")
    assert run(capsys, "state", p, p, "--allow-weights")[0] == 0


def test_parse_and_precondition_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = run(capsys, "state", bad, DATA / "qubit_psi.json")
    assert code == 2 and err.count("\n") == 1 and "kind=parse" in err
    q3 = write(tmp_path, "q3.json", matrix_to_json(np.eye(3) / 3))
    code, _, err = run(capsys, "state", q3, DATA / "qubit_psi.json")
    assert code == 3 and "kind=precondition" in err
    code, _, err = run(capsys, "state", DATA / "qubit_phi.json", DATA / "qubit_psi.json", "--bogus")
    assert code == 2
    code, _, _ = run(capsys, "state", DATA / "qubit_phi.json", DATA / "qubit_psi.json", "--f", "nope")
    assert code == 2


def test_path_disagreement_exit_code(capsys, monkeypatch):
    from qdiv import states

    real = states.d_bs

    def skewed(phi, psi, **kw):
        res = real(phi, psi, **kw)
        if kw.get("force_ladder"):
            res.value += 1e-3
        return res

    monkeypatch.setattr(states, "d_bs", skewed)
    code, _, err = run(capsys, "state", DATA / "qubit_phi.json", DATA / "qubit_psi.json", "--method", "all")
    assert code == 4 and "kind=inconsistent" in err


def test_channel_pinching(capsys):
    code, out, _ = run(capsys, "channel", DATA / "identity_2.json", DATA / "pinching_2.json", "--restarts", "0")
    assert code == 0
    assert out["value"] == pytest.approx(math.log(2), abs=1e-10)
    assert out["agreement"] <= 1e-3


def test_unitary_complexity_is_infinite(capsys):
    code, out, _ = run(capsys, "complexity", DATA / "unitary_flip.json", "--method", "choi")
    assert code == 0 and out["value"] == "inf"
    assert out["choi"]["slope"] >= 0.9


def test_equal_random_channels(capsys, tmp_path):
    p = write(tmp_path, "s.json", channel_to_json(ch.random_channel(5, 2, 2)))
    code, out, _ = run(capsys, "channel", p, p, "--method", "optimize", "--restarts", "0")
    assert code == 0 and abs(out["value"]) <= 1e-8


def test_channel_output_is_byte_stable(capsys):
    argv = ["complexity", DATA / "pinching_2.json", "--restarts", "1", "--seed", "3"]
    main([str(a) for a in argv])
    first = capsys.readouterr().out
    main([str(a) for a in argv])
    assert capsys.readouterr().out == first


def test_threads_env_var(capsys, monkeypatch):
    monkeypatch.setenv("QDIV_THREADS", "2")
    assert run(capsys, "complexity", DATA / "pinching_2.json", "--restarts", "1")[0] == 0
    monkeypatch.setenv("QDIV_THREADS", "x")
    assert run(capsys, "complexity", DATA / "pinching_2.json", "--restarts", "1")[0] == 2


def test_mean(capsys):
    code, out, _ = run(capsys, "mean", DATA / "matrix_a.json", DATA / "matrix_b.json", "--f", "alpha:0.5",
                       "--path", "auto")
    assert code == 0 and out["path"] == "auto"
    got = np.array([complex(re, im) for re, im in out["value"]["data"]]).reshape(2, 2)
    a, b = np.array([[2.0, 1.0], [1.0, 2.0]]), np.diag([1.0, 3.0])
    assert np.allclose(got, geometric(a, b, 0.5), atol=1e-10)


def test_verify(capsys):
    code, out, err = run(capsys, "verify", "golden_values", "--summary")
    assert code == 0 and out["ok"]
    assert "golden_values" in err
    assert run(capsys, "verify", "unknown_suite")[0] == 3


def test_qft(capsys):
    assert run(capsys, "qft", "lattice", "--cells", "25")[1]["complexity"] == pytest.approx(25 * math.log(2))
    code, out, _ = run(capsys, "qft", "tableau", "2,1,1", "--n", "4")
    assert out["d"] == 15 and out["complexity"] == pytest.approx(2 * math.log(15))
    assert run(capsys, "qft", "jones", "2")[1]["class"] == "admissible_discrete"
    assert run(capsys, "qft", "tableau", "1,2", "--n", "4")[0] == 3


def test_help_mentions_kraus_convention():
    out = subprocess.run([sys.executable, "-m", "qdiv.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "a_i^dagger m a_i" in " ".join(out.stdout.split())
