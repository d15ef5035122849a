import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from dfie.cli import main
from dfie.sweep import (ConfigError, ResonanceMapSpec, SweepSpec, fmt, read_config, read_points, run_resonance_map,
                        run_sweep, spec_from_mapping)


def _table(text):
    body = "".join(l for l in text.splitlines(True) if not l.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(3) == "3" and fmt(True) == "true" and fmt(float("inf")) == "inf" and fmt(float("nan")) == "nan"


def test_sweep_deterministic_and_unsupported_at_zero(tmp_path):
    spec = SweepSpec(formulation=("dfie", "muller", "cc"), omega_min=0.0, omega_max=2.0, omega_count=3,
                     eta_im=1.0, nmax=6, out=str(tmp_path / "a.csv"))
    rows, text = run_sweep(spec)
    _, text2 = run_sweep(SweepSpec(**{**spec.__dict__, "jobs": 2}))
    assert text == text2 == (tmp_path / "a.csv").read_text()
    tab = _table(text)
    assert len(tab) == 9
    at0 = {r["formulation"]: r["status"] for r in tab if float(r["omega"]) == 0}
    assert at0 == {"dfie": "ok", "muller": "unsupported", "cc": "unsupported"}
    assert {r["eta_im"] for r in tab if r["formulation"] == "cc"} == {"1"}
    assert {r["eta_im"] for r in tab if r["formulation"] == "muller"} == {"0"}
    assert "# omega_count = 3" in text


def test_spec_validation():
    with pytest.raises(ConfigError):
        SweepSpec(formulation="pmchwt")
    with pytest.raises(ConfigError):
        SweepSpec(omega_min=2.0, omega_max=1.0)
    with pytest.raises(ConfigError):
        SweepSpec(formulation="dfie", eta_im=1.0)
    with pytest.raises(ConfigError):
        ResonanceMapSpec(formulation="cc", omega_min=0.0)
    with pytest.raises(ConfigError):
        spec_from_mapping(SweepSpec, {"colour": "red"})


def test_config_parsing(tmp_path):
    p = tmp_path / "s.cfg"
    p.write_text("# a sweep\nformulation = dfie, dfie-scaled\nomega_max = 3  # inline\n\nnmax=5\n")
    spec = spec_from_mapping(SweepSpec, read_config(p))
    assert spec.formulation == ("dfie", "dfie-scaled") and spec.omega_max == 3.0 and spec.nmax == 5
    p.write_text("omega_max 3\n")
    with pytest.raises(ConfigError, match=":1:"):
        read_config(p)


def test_point_file_errors(tmp_path):
    p = tmp_path / "pts.txt"
    p.write_text("# header\n0 0 2\n\n1 2\n")
    with pytest.raises(ConfigError, match=":4:"):
        read_points(p)
    p.write_text("0 0 2\n0 x 1\n")
    with pytest.raises(ConfigError, match=":2:"):
        read_points(p)
    p.write_text("# nothing\n")
    with pytest.raises(ConfigError):
        read_points(p)


def test_cli_sweep_stdout_and_errors(capsys, tmp_path):
    assert main(["sweep", "--formulation", "dfie", "--omega-min", "1", "--omega-max", "2", "--omega-count", "2",
                 "--nmax", "4"]) == 0
    tab = _table(capsys.readouterr().out)
    assert [r["status"] for r in tab] == ["ok", "ok"]
    assert main(["sweep", "--formulation", "dfie", "--eps-re", "-1"]) == 2
    assert "passivity" in capsys.readouterr().err
    assert main(["solve", "--points", str(tmp_path / "missing.txt")]) == 2


def test_cli_solve(tmp_path, capsys):
    pts = tmp_path / "pts.txt"
    pts.write_text("0 0 2\n0.3 0 0.2\n1.5 1.5 0\n")
    out = tmp_path / "solve.csv"
    assert main(["solve", "--formulation", "dfie", "--omega", "1", "--points", str(pts), "--out", str(out)]) == 0
    tab = _table(out.read_text())
    assert [r["region"] for r in tab] == ["ext", "int", "ext"]
    assert max(float(r["rel_error"]) for r in tab) < 1e-10
    pts.write_text("0 0 1.0001\n")
    assert main(["solve", "--points", str(pts)]) == 2
    assert "exclusion band" in capsys.readouterr().err


def test_cli_block_dump(capsys):
    assert main(["block-dump", "--formulation", "dfie", "--eps-re", "1", "--n", "2"]) == 0
    tab = _table(capsys.readouterr().out)
    assert len(tab) == 36
    A = np.zeros((6, 6), dtype=complex)
    for r in tab:
        A[int(r["row"]), int(r["col"])] = float(r["re"]) + 1j * float(r["im"])
    np.testing.assert_allclose(A, np.diag([1, 1, 1, 1, 1, -1]), atol=1e-15)
    assert main(["block-dump", "--formulation", "decoupled-cc", "--n", "1"]) == 0
    assert len(_table(capsys.readouterr().out)) == 16 + 4 + 4


def test_cli_oracle(capsys):
    assert main(["oracle", "--op", "M", "--n", "1", "--k-re", "1.5"]) == 0
    tab = _table(capsys.readouterr().out)
    assert len(tab) == 8
    assert max(float(r["abs_diff"]) for r in tab) < 1e-7


def test_small_resmap(tmp_path):
    spec = ResonanceMapSpec(eps_re_min=-0.3249, eps_re_max=1.3, eps_re_count=2, mu_re_min=1.589, mu_re_max=1.589,
                            mu_re_count=1, im_count=2, omega_min=8.5, omega_max=9.5, omega_count=5,
                            refine_rounds=1, polish=1, threshold=1e5, nmax=6, out=str(tmp_path / "m.csv"))
    rows, text = run_resonance_map(spec)
    assert len(rows) == 2
    assert "# search = " in text
    by_eps = {r[0]: r for r in rows}
    assert by_eps[-0.3249][2] > by_eps[1.3][2]
    for r in rows:
        assert 0 < r[3] <= 1 and 0 < r[4] <= 1 and 8.5 <= r[5] <= 9.5


def test_decoupled_cc_blow_up_dfie_flat():
    # a lossy material where the decoupled charge-current pipeline is nearly singular near omega = 8.992
    common = dict(eps_re=-0.3249, eps_im=0.6898, mu_re=1.589, mu_im=0.842, omega_min=8.99205 - 1,
                  omega_max=8.99205 + 1, omega_count=101)
    rows, _ = run_sweep(SweepSpec(formulation=("decoupled-cc", "dfie"), **common))
    peak = {}
    for f in ("decoupled-cc", "dfie"):
        c = np.array([r[5] for r in rows if r[0] == f])
        peak[f] = c.max() / np.median(c)
    assert peak["decoupled-cc"] >= 100
    assert peak["dfie"] <= 10


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "dfie.cli", "--help"], capture_output=True, text=True, check=True)
    for cmd in ("sweep", "resmap", "solve", "oracle", "block-dump"):
        assert cmd in out.stdout
