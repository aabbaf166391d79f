import json
import math
import subprocess
import sys

import numpy as np
import pytest

from dkradial.cli import main


def run_cli(args, tmp_path=None):
    proc = subprocess.run(
        [sys.executable, "-m", "dkradial.cli", *args],
        capture_output=True, text=True,
    )
    return proc


def run_main(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


class TestSpectrumCommand:
    def test_f1_table(self, capsys):
        code, out = run_main(["spectrum", "--family", "f1", "--j", "1", "--n-max", "2", "--mass", "0"], capsys)
        assert code == 0
        rows = [l for l in out.splitlines() if l and not l.startswith("#")][1:]
        p_sqs = [r.split(",")[3] for r in rows]
        assert p_sqs == ["8", "24", "48"]

    def test_dirac_fractions(self, capsys):
        code, out = run_main(["spectrum", "--family", "dirac", "--J", "1/2", "--n-max", "1", "--mass", "0"], capsys)
        assert code == 0
        rows = [l for l in out.splitlines() if l and not l.startswith("#")][1:]
        assert [r.split(",")[3] for r in rows] == ["9/4", "25/4"]

    def test_j0_massive(self, capsys):
        code, out = run_main(["spectrum", "--family", "j0", "--n-max", "0", "--mass", "1"], capsys)
        rows = [l for l in out.splitlines() if l and not l.startswith("#")][1:]
        eps = float(rows[0].split(",")[5])
        assert eps == pytest.approx(2.0)

    def test_json_format(self, capsys):
        code, out = run_main(
            ["spectrum", "--family", "f3", "--j", "2", "--n-max", "1", "--mass", "0", "--format", "json"],
            capsys,
        )
        data = json.loads(out)
        assert data[0]["bound"] == "no" and data[1]["bound"] == "yes"
        assert data[1]["p_sq_exact"] == "16"


class TestWavefunctionCommand:
    def test_f1_equator_row(self, capsys):
        code, out = run_main(
            ["wavefunction", "--family", "f1", "--j", "1", "--n", "0", "--mass", "0", "--grid", "5"],
            capsys,
        )
        assert code == 0
        rows = [l.split(",") for l in out.splitlines() if l and not l.startswith("#")][1:]
        assert len(rows) == 5
        mid = rows[2]
        assert float(mid[0]) == pytest.approx(math.pi / 2)
        assert abs(float(mid[1])) < 1e-30  # x = cos^2 r
        assert abs(float(mid[2])) < 1e-15  # K carries the sqrt(x) factor
        assert float(mid[4]) == pytest.approx(1 / math.sqrt(2), rel=1e-12)  # M per companion formula

    def test_j0_amplitudes(self, capsys):
        code, out = run_main(
            ["wavefunction", "--family", "j0", "--n", "0", "--mass", "1", "--grid", "5"], capsys
        )
        rows = [l.split(",") for l in out.splitlines() if l and not l.startswith("#")][1:]
        assert abs(float(rows[2][3])) < 1e-14  # N vanishes at the equator

    def test_endpoints_excluded(self, capsys):
        _, out = run_main(
            ["wavefunction", "--family", "f2", "--j", "1", "--n", "0", "--mass", "0", "--grid", "11"],
            capsys,
        )
        rows = [l.split(",") for l in out.splitlines() if l and not l.startswith("#")][1:]
        rs = [float(r[0]) for r in rows]
        assert rs[0] > 0 and rs[-1] < math.pi

    def test_off_spectrum_family3_n0(self, capsys):
        code, _ = run_main(
            ["wavefunction", "--family", "f3", "--j", "1", "--n", "0", "--mass", "0"], capsys
        )
        assert code == 2


class TestExitCodes:
    def test_usage_error(self):
        proc = run_cli(["spectrum", "--family", "nope"])
        assert proc.returncode == 2

    def test_missing_j_for_dirac(self):
        proc = run_cli(["spectrum", "--family", "dirac", "--n-max", "1"])
        assert proc.returncode == 2

    def test_verify_passes(self):
        proc = run_cli(["verify", "--suite", "factorization", "--j", "1", "--n", "0"])
        assert proc.returncode == 0
        reports = json.loads(proc.stdout)
        assert all(r["pass"] for r in reports)

    def test_oracle_mismatch_is_exit_one(self):
        # Closed-form list truncated below what the scan finds -> the extra
        # oracle eigenvalue has no partner.
        proc = run_cli(
            ["oracle", "--j", "0", "--mass", "0", "--eps-min", "0.2", "--eps-max", "3.0",
             "--eps-step", "0.05", "--n-max", "0", "--compare"]
        )
        assert proc.returncode == 1
        payload = json.loads(proc.stdout)
        assert payload["comparison"]["unmatched_oracle"]


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["wavefunction", "--family", "f4", "--j", "2", "--n", "1",
                "--mass", "1", "--grid", "101"]
        assert main([*args, "--out", str(a)]) == 0
        assert main([*args, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_lf_line_endings(self, tmp_path):
        out = tmp_path / "t.csv"
        main(["spectrum", "--family", "f1", "--j", "1", "--n-max", "1", "--mass", "0",
              "--out", str(out)])
        raw = out.read_bytes()
        assert b"\r" not in raw


class TestConfigFile:
    def test_config_defaults_and_flag_precedence(self, tmp_path, capsys):
        cfg = tmp_path / "run.conf"
        cfg.write_text("family=f1\nj=1\nn-max=2\nmass=0\n")
        code, out = run_main(["spectrum", "--family", "f1", "--config", str(cfg)], capsys)
        assert code == 0
        rows = [l for l in out.splitlines() if l and not l.startswith("#")][1:]
        assert len(rows) == 3  # n-max from config
        # explicit flag wins over config
        code, out = run_main(
            ["spectrum", "--family", "f1", "--config", str(cfg), "--n-max", "0"], capsys
        )
        rows = [l for l in out.splitlines() if l and not l.startswith("#")][1:]
        assert len(rows) == 1


class TestRoundTrip:
    def test_csv_reverified_through_operator(self, tmp_path):
        """Serialization keeps enough digits for the finite-difference
        re-verification of the fourth-order operator at 1e-5."""
        from dkradial.model import operator_K4
        from dkradial.verify import fd_derivatives

        out = tmp_path / "wf.csv"
        assert main(["wavefunction", "--family", "f1", "--j", "1", "--n", "1",
                     "--mass", "0", "--grid", "2001", "--out", str(out)]) == 0
        rows = [l.split(",") for l in out.read_text().splitlines()
                if l and not l.startswith("#")][1:]
        r = np.array([float(c[0]) for c in rows])
        x = np.array([float(c[1]) for c in rows])
        K = np.array([float(c[2]) for c in rows])
        # left half keeps x monotone; stay away from x ~ 0 and x ~ 1
        sel = (r < math.pi / 2 - 0.35) & (x > 0.1) & (x < 0.9)
        xs, Ks = x[sel][::3], K[sel][::3]
        derivs = [Ks] + [fd_derivatives(xs, Ks, k, stencil=11) for k in range(1, 5)]
        op = operator_K4(24.0, 2.0)
        inner = slice(11, len(xs) - 11)
        resid = op.apply(xs[inner], [d[inner] for d in derivs])
        scale = op.term_magnitudes(xs[inner], [d[inner] for d in derivs]).max(axis=0)
        assert np.max(np.abs(resid) / scale) < 1e-5
