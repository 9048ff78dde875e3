import csv
import io
import json
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from revlab import cli

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
STEP = {"step": {"breaks": [0.0, 0.5, 1.0], "values": [1.0, 0.0]}}


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def _run(tmp_path, sub, cfg, *extra):
    out = tmp_path / f"{sub}.out"
    rc = cli.main([sub, "--config", _write(tmp_path, cfg), "--out", str(out), *extra])
    return rc, (out.read_text() if out.exists() else "")


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_eigs_airy(tmp_path):
    rc, text = _run(tmp_path, "eigs", {"problem": "airy", "u0": STEP, "n_max": 10})
    rows = _rows(text)
    assert rc == 0 and len(rows) == 11
    assert rows[0] == ["n", "k_n", "kappa_or_nu", "lambda_n", "norm_sq", "residual"]
    assert all(float(r[5]) < 1e-11 for r in rows[1:])


def test_eigs_disloc_half(tmp_path):
    cfg = {"problem": "dislocation", "b": 0.5, "u0": STEP, "n_range": [-5, 5]}
    rc, text = _run(tmp_path, "eigs", cfg)
    ns = [int(r[0]) for r in _rows(text)[1:]]
    assert rc == 0 and ns == list(range(-5, 6))


def test_eigs_disloc_ground_mode(tmp_path):
    # for b != 1/2 the index 0 labels the root below pi/(4c) on the short side
    cfg = {"problem": "dislocation", "b": 0.3, "u0": STEP, "n_range": [-2, 2]}
    rc, text = _run(tmp_path, "eigs", cfg)
    rows = _rows(text)[1:]
    assert rc == 0 and [int(r[0]) for r in rows] == [-2, -1, 0, 1, 2]
    k0 = float(rows[2][1])
    assert 0 < k0 < np.pi / (4 * 0.3)


def test_solve_zero_data(tmp_path):
    cfg = {"problem": "airy", "u0": {"breaks": [0, 1], "pieces": [[0.0]]},
           "time": {"real": 0.01}, "modes": 20, "grid": 32}
    rc, text = _run(tmp_path, "solve", cfg)
    rows = _rows(text)
    assert rc == 0 and rows[0] == ["x", "u", "UR_series", "UC"]
    assert all(float(v) == 0 for r in rows[1:] for v in r[1:])


def test_solve_dislocation_columns(tmp_path):
    cfg = {"problem": "dislocation", "b": 0.35, "u0": {"indicator": [0.15, 0.65]},
           "time": {"rational": {"p": 1, "q": 2}}, "modes": 40, "grid": 32}
    rc, text = _run(tmp_path, "solve", cfg)
    rows = _rows(text)
    assert rc == 0 and rows[0][-1] == "side"
    assert {r[-1] for r in rows[1:]} == {"L", "R"}


def test_revive_and_hilbert(tmp_path):
    cfg = {"problem": "airy", "u0": STEP, "time": {"rational": {"p": 1, "q": 2}},
           "hilbert_modes": 1024, "grid": 64}
    rc, text = _run(tmp_path, "revive", cfg)
    rows = _rows(text)
    assert rc == 0 and rows[0][0] == "x" and len(rows) == 65
    assert any(r[1] == "nan" for r in rows[1:])
    rc, text = _run(tmp_path, "hilbert", {"problem": "airy", "u0": {"indicator": [0.25, 0.75]},
                                          "hilbert_modes": 4096, "grid": 16})
    rows = _rows(text)
    assert rc == 0 and rows[0] == ["x", "re_Hu", "im_Hu"]
    x, h = float(rows[2][0]), float(rows[2][1])
    ref = np.log(abs(np.sin(np.pi * (x - 0.25)) / np.sin(np.pi * (x - 0.75)))) / np.pi
    assert abs(h - ref) < 1e-2


def test_exit_codes(tmp_path):
    assert _run(tmp_path, "eigs", {"problem": "heat", "u0": STEP})[0] == 2
    assert _run(tmp_path, "eigs", {"problem": "dislocation", "b": 0.99, "u0": STEP})[0] == 2
    assert _run(tmp_path, "solve", {"problem": "airy", "u0": STEP, "time": {"real": 0.1},
                                    "grid": 8})[0] == 2
    assert cli.main(["eigs", "--config", str(tmp_path / "missing.json")]) == 2
    irr = {"problem": "airy", "u0": STEP, "time": {"real": 0.0318309886183791}}
    assert _run(tmp_path, "compare", irr)[0] == 3
    loose = {"problem": "airy", "u0": STEP, "time": {"rational": {"p": 1, "q": 3}},
             "modes": 50, "hilbert_modes": 512, "grid": 128, "threshold": 1e-6}
    rc, text = _run(tmp_path, "compare", loose)
    assert rc == 4 and json.loads(text)["pass"] is False


def test_compare_reduces_fraction(tmp_path):
    cfg = {"problem": "airy", "u0": STEP, "time": {"rational": {"p": 2, "q": 6}},
           "modes": 100, "hilbert_modes": 2048, "grid": 128, "threshold": 1.0}
    rc, text = _run(tmp_path, "compare", cfg)
    s = json.loads(text)
    assert rc == 0 and (s["p"], s["q"], s["reduced"]) == (1, 3, True)
    assert {"sup_err", "l2_err", "excluded_points", "jump_table", "cusp_growth_rates"} <= set(s)


def test_compare_airy_acceptance(tmp_path):
    cfg = json.load(open(CONFIGS / "airy_oracle.json"))
    rc, text = _run(tmp_path, "compare", cfg)
    s = json.loads(text)
    assert rc == 0 and s["sup_err"] < 5e-3
    assert len(s["jump_table"]) == 6


def test_compare_disloc_acceptance(tmp_path):
    cfg = json.load(open(CONFIGS / "disloc_oracle.json"))
    rc, text = _run(tmp_path, "compare", cfg, "--grid", "512")
    s = json.loads(text)
    assert rc == 0 and s["sup_err"] < 5e-3


def test_byte_identical_across_threads(tmp_path):
    cfg = json.load(open(CONFIGS / "fig3_right.json"))
    outs = []
    for th in ("1", "4", "1"):
        out = tmp_path / f"o{th}{len(outs)}.csv"
        js = tmp_path / f"o{th}{len(outs)}.json"
        rc = cli.main(["compare", "--config", _write(tmp_path, cfg), "--out", str(js),
                       "--csv", str(out), "--threads", th, "--grid", "256"])
        assert rc == 0
        outs.append((out.read_bytes(), js.read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_console_script(tmp_path):
    exe = shutil.which("revlab")
    if exe is None:
        pytest.skip("console script not installed")
    p = _write(tmp_path, {"problem": "airy", "u0": STEP, "n_max": 3})
    res = subprocess.run([exe, "eigs", "--config", p], capture_output=True, text=True)
    assert res.returncode == 0 and len(res.stdout.splitlines()) == 4
