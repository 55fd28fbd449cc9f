"""Command-line driver: exit-code contract, CSV determinism, error paths."""

import contextlib
import io
import math
import subprocess
import sys

import pytest

from eflab.cli import main
from eflab.zeta import write_zero_table


def run_cli(argv):
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def zeros100_file(tmp_path_factory, zeros100):
    path = tmp_path_factory.mktemp("tables") / "z100.txt"
    write_zero_table(zeros100, str(path))
    return str(path)


class TestZerosCommand:
    def test_find_writes_table(self, tmp_path):
        out = tmp_path / "z.txt"
        code, _, err = run_cli(["zeros", "find", "--t-max", "30", "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0].startswith("# zeta-zeros v1 t_max=30")
        assert len(lines) == 4
        assert "count=3" in err

    def test_import_bad_table(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("# zeta-zeros v1 t_max=30 accuracy=1e-09 count=2\n21.0\n14.1\n")
        code, _, err = run_cli(["zeros", "import", "--in", str(bad)])
        assert code == 1
        assert "ascending" in err

    def test_export_round_trip_bytes(self, tmp_path, zeros100_file):
        out = tmp_path / "copy.txt"
        code, _, _ = run_cli(["zeros", "export", "--in", zeros100_file,
                              "--out", str(out)])
        assert code == 0
        assert out.read_text() == open(zeros100_file).read()


class TestEfCommand:
    def test_check_within_tolerance(self, zeros100_file):
        code, out, _ = run_cli(["ef", "check", "--testfn", "bump:mu=0.7,sigma=0.6",
                                "--zeros", zeros100_file, "--tol", "1e-4"])
        assert code == 0
        assert out.startswith("quantity,method,")
        assert ",ok" in out

    def test_check_tolerance_breach_exits_two(self, zeros100_file):
        code, out, _ = run_cli(["ef", "check", "--testfn", "bump:mu=0.7,sigma=0.6",
                                "--zeros", zeros100_file, "--tol", "1e-9"])
        assert code == 2
        assert ",fail" in out

    def test_check_bad_literal_exits_one(self, zeros100_file):
        code, _, err = run_cli(["ef", "check", "--testfn", "bump:mu=0.7",
                                "--zeros", zeros100_file])
        assert code == 1 and "error" in err

    def test_vonmangoldt(self, zeros100_file):
        # plumbing check at modest height; the 0.1-at-t_max-500 run lives in
        # the acceptance suite
        code, out, _ = run_cli(["ef", "vonmangoldt", "--X", "10.5",
                                "--zeros", zeros100_file, "--tol", "0.5"])
        assert code == 0
        assert "residual," in out

    def test_positivity(self, zeros100_file):
        code, out, _ = run_cli(["ef", "positivity", "--testfn",
                                "bump:mu=0.7,sigma=0.6", "--zeros", zeros100_file])
        assert code == 0
        assert "prime_side_q" in out and "zero_side_q" in out


class TestWeilCommand:
    def test_step_real_place_all_forms(self):
        code, out, _ = run_cli(["weil", "--place", "r", "--form", "all",
                                "--testfn", "step:X=4"])
        assert code == 0
        lines = out.strip().split("\n")
        finite = [ln for ln in lines if ln.startswith("w_r,finite,")][0]
        assert finite.split(",")[2].startswith("2.21499787592657")
        assert sum(1 for ln in lines if ln.endswith(",inadmissible")) == 4

    def test_step_prime_place(self):
        code, out, _ = run_cli(["weil", "--place", "2", "--form", "all",
                                "--testfn", "step:X=10"])
        assert code == 0
        direct = [ln for ln in out.split("\n") if ln.startswith("w_2,direct,")][0]
        assert abs(float(direct.split(",")[2]) - 3 * math.log(2)) < 1e-12
        assert any(ln.startswith("w_2,contour,") and ln.endswith(",inadmissible")
                   for ln in out.split("\n"))

    def test_bump_real_place_spread(self):
        code, out, _ = run_cli(["weil", "--place", "r", "--form", "all",
                                "--testfn", "bump:mu=0.7,sigma=0.6",
                                "--tol", "1e-7"])
        assert code == 0
        spread = [ln for ln in out.split("\n") if ",spread," in ln][0]
        assert float(spread.split(",")[2]) <= 1e-7

    def test_inadmissible_specific_form_exits_one(self):
        code, _, err = run_cli(["weil", "--place", "r", "--form", "contour",
                                "--testfn", "step:X=4"])
        assert code == 1 and "error" in err

    def test_determinism(self):
        argv = ["weil", "--place", "r", "--form", "all",
                "--testfn", "bump:mu=0.2,sigma=0.4"]
        _, out1, _ = run_cli(argv)
        _, out2, _ = run_cli(argv)
        assert out1 == out2


class TestConductorCommand:
    def test_small_spectrum(self):
        code, out, _ = run_cli(["conductor", "--p", "3", "--n", "2"])
        assert code == 0
        ratios = [float(ln.split(",")[2]) for ln in out.split("\n")
                  if ln.startswith("ratio_")]
        assert len(ratios) == 3 ** 2 - 1 - 2
        assert all(abs(r - round(r)) <= 1e-8 for r in ratios)

    def test_p2_minimum_ratio(self):
        code, out, _ = run_cli(["conductor", "--p", "2", "--n", "3"])
        assert code == 0
        ratios = [float(ln.split(",")[2]) for ln in out.split("\n")
                  if ln.startswith("ratio_")]
        assert min(ratios) >= 2.0 - 1e-8

    def test_check_inversion(self):
        code, out, _ = run_cli(["conductor", "--p", "3", "--n", "2",
                                "--check-inversion"])
        assert code == 0
        row = [ln for ln in out.split("\n") if ln.startswith("commutation_defect")][0]
        assert float(row.split(",")[2]) <= 1e-9

    def test_size_cap(self):
        code, _, err = run_cli(["conductor", "--p", "3", "--n", "8"])
        assert code == 1 and "error" in err


class TestParsing:
    def test_unknown_flag_exits_one(self):
        code, _, err = run_cli(["zeros", "find", "--t-max", "30", "--frobnicate"])
        assert code == 1 and "error" in err

    def test_console_script_runs(self):
        proc = subprocess.run([sys.executable, "-m", "eflab.cli", "conductor",
                               "--p", "2", "--n", "2"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.startswith("quantity,method,")
