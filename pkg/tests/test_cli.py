import json

from mpmath import mp, mpf

from newton_boson.cli import run_subcommand
from newton_boson.coherent import ThermalParams, husimi


def run(capsys, *argv):
    code = run_subcommand(list(argv))
    output = capsys.readouterr().out
    return code, output


def load_json(text):
    with mp.workprec(256):
        return json.loads(text, parse_float=mp.mpf, parse_int=int)


class TestExpand:
    def test_sqrt_coefficients(self, capsys):
        code, out = run(capsys, "expand", "--f", "sqrt(x)", "--order", "3")
        assert code == 0
        payload = load_json(out)
        with mp.workprec(256):
            want = [mpf(0), mpf(1), -(2 - mp.sqrt(2)),
                    3 - 3 * mp.sqrt(2) + mp.sqrt(3)]
            got = payload["coefficients"]
            for g, w in zip(got, want):
                assert abs(mp.mpf(g) - w) < mpf("1e-70")
        assert payload["k_min"] == 0
        assert len(payload["cancellation_loss_bits"]) == 4

    def test_with_parameters(self, capsys):
        code, out = run(capsys, "expand", "--f", "sqrt(1 - x/(2*S))",
                        "--order", "2", "--params", "S=1")
        assert code == 0
        payload = load_json(out)
        with mp.workprec(256):
            h1 = mp.sqrt(mpf("0.5"))
            assert abs(mp.mpf(payload["coefficients"][1]) - (h1 - 1)) \
                < mpf("1e-70")

    def test_csv_format(self, capsys):
        code, out = run(capsys, "expand", "--f", "x^2", "--order", "2",
                        "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "k,coefficient,cancellation_loss_bits"
        assert len(lines) == 4
        assert lines[2].startswith("1,1.0,")

    def test_domain_error_payload(self, capsys):
        code, out = run(capsys, "expand", "--f", "sqrt(x - 5)", "--order", "3")
        assert code == 1
        payload = json.loads(out)
        assert payload["error"]["code"] == "domain"

    def test_parse_error_payload(self, capsys):
        code, out = run(capsys, "expand", "--f", "x +", "--order", "3")
        assert code == 1
        payload = json.loads(out)
        assert payload["error"]["code"] == "parse"
        assert "offset" in payload["error"]["message"]


class TestHp:
    def test_spin_half_newton_table(self, capsys):
        code, out = run(capsys, "hp", "--two-s", "1", "--r", "1",
                        "--scheme", "newton")
        assert code == 0
        payload = load_json(out)
        assert [int(c) for c in payload["coefficients"]] == [1, -1]
        assert payload["cutoff"] == 3

    def test_taylor_coefficients(self, capsys):
        code, out = run(capsys, "hp", "--two-s", "2", "--r", "2",
                        "--scheme", "taylor")
        assert code == 0
        payload = load_json(out)
        got = [mp.mpf(c) for c in payload["coefficients"]]
        assert got == [1, mpf("-0.25"), mpf("-0.03125")]

    def test_exact_scheme_forces_order(self, capsys):
        code, out = run(capsys, "hp", "--two-s", "3", "--r", "0",
                        "--scheme", "exact")
        assert code == 0
        payload = load_json(out)
        assert payload["r"] == 3
        assert len(payload["coefficients"]) == 4

    def test_csv_rows_keyed_by_parameters(self, capsys):
        code, out = run(capsys, "hp", "--two-s", "1", "--r", "1",
                        "--scheme", "newton", "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "two_s,r,scheme,kind,index,value"
        assert lines[1].startswith("1,1,newton,coefficient,0,")
        assert any(line.startswith("1,1,newton,residual,") for line in lines)

    def test_invalid_order_is_computation_error(self, capsys):
        code, out = run(capsys, "hp", "--two-s", "2", "--r", "5",
                        "--scheme", "newton")
        assert code == 1
        assert json.loads(out)["error"]["code"] == "invalid_argument"


class TestMoments:
    def test_binomial_factorial_moments(self, capsys):
        code, out = run(capsys, "moments", "--binomial", "3", "0.5",
                        "--max-k", "5")
        assert code == 0
        payload = load_json(out)
        got = [mp.mpf(v) for v in payload["factorial_moments"]]
        assert got == [1, mpf("1.5"), mpf("1.5"), mpf("0.75"), 0, 0]

    def test_poisson(self, capsys):
        code, out = run(capsys, "moments", "--poisson", "2", "--max-k", "3")
        assert code == 0
        payload = load_json(out)
        got = [mp.mpf(v) for v in payload["factorial_moments"]]
        with mp.workprec(256):
            for k, v in enumerate(got):
                assert abs(v - mpf(2) ** k) < mpf("1e-10")

    def test_inline_pmf(self, capsys):
        code, out = run(capsys, "moments", "--pmf", "0.25,0.5,0.25",
                        "--max-k", "2")
        assert code == 0
        payload = load_json(out)
        assert mp.mpf(payload["raw_moments"][1]) == 1

    def test_unnormalized_pmf_rejected(self, capsys):
        code, out = run(capsys, "moments", "--pmf", "0.5,0.4", "--max-k", "2")
        assert code == 1
        assert json.loads(out)["error"]["code"] == "invalid_argument"


class TestHusimi:
    def test_grid_csv(self, capsys):
        code, out = run(capsys, "husimi", "--beta", "1", "--omega", "1",
                        "--grid=-1:1:1", "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "re_alpha,im_alpha,q_value"
        assert len(lines) == 1 + 9  # 3x3 grid
        t = ThermalParams(1.0, 1.0)
        with mp.workprec(256):
            cells = lines[1].split(",")
            assert mp.mpf(cells[0]) == -1 and mp.mpf(cells[1]) == -1
            want = husimi(mp.mpc(-1, -1), t)
            assert abs(mp.mpf(cells[2]) - want) < mpf("1e-70")

    def test_asymmetric_grid_json(self, capsys):
        code, out = run(capsys, "husimi", "--beta", "0.5", "--omega", "2",
                        "--grid", "0:1:0.5,0:0.5:0.5")
        assert code == 0
        payload = load_json(out)
        assert len(payload["rows"]) == 3 * 2


class TestTransform:
    def test_pair_with_closed_form(self, capsys):
        code, out = run(capsys, "transform", "--pair", "exponential",
                        "--params", "z=0.5", "--points=-0.5,-1.5")
        assert code == 0
        payload = load_json(out)
        assert payload["pair"] == "exponential"
        for row in payload["rows"]:
            assert mp.mpf(row["deviation"]) < mpf("1e-10")
        with mp.workprec(256):
            want = mpf("1.5") ** mpf("-0.5")
            assert abs(mp.mpf(payload["rows"][0]["quadrature"]) - want) \
                < mpf("1e-10")

    def test_expression_without_closed_form(self, capsys):
        code, out = run(capsys, "transform", "--f", "x", "--points=-1.5")
        assert code == 0
        payload = load_json(out)
        row = payload["rows"][0]
        assert row["closed_form"] is None and row["deviation"] is None
        assert abs(mp.mpf(row["quadrature"]) + mpf("1.5")) < mpf("1e-10")

    def test_csv_columns(self, capsys):
        code, out = run(capsys, "transform", "--pair", "power",
                        "--params", "r=2", "--points=-0.5",
                        "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "n_re,n_im,quadrature,closed_form,deviation"

    def test_requires_f_or_pair(self, capsys):
        code, out = run(capsys, "transform", "--points=-0.5")
        assert code == 1
        assert json.loads(out)["error"]["code"] == "invalid_argument"

    def test_divergent_function(self, capsys):
        code, out = run(capsys, "transform", "--f", "exp(0 - 2*x)",
                        "--points=-0.5")
        assert code == 1
        assert json.loads(out)["error"]["code"] == "divergence"

    def test_nonnegative_point_rejected(self, capsys):
        code, out = run(capsys, "transform", "--f", "x", "--points", "0.5")
        assert code == 1
        assert json.loads(out)["error"]["code"] == "invalid_argument"


class TestFock:
    def test_matrix_export_json(self, capsys):
        code, out = run(capsys, "fock", "--f", "x", "--cutoff", "3",
                        "--order", "1")
        assert code == 0
        payload = load_json(out)
        assert payload["diagonal"] == [0, 1, 2, 3]
        matrix = payload["matrix"]
        assert len(matrix) == 4 and len(matrix[0]) == 4
        assert matrix[2][2] == [2, 0]  # [re, im] pairs
        assert matrix[0][1] == [0, 0]

    def test_matrix_export_csv(self, capsys):
        code, out = run(capsys, "fock", "--f", "x^2", "--cutoff", "2",
                        "--order", "2", "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "col0,col1,col2"
        assert [mp.mpf(v) for v in lines[3].split(",")] == [0, 0, 4]


class TestHarness:
    def test_usage_error_exit_code(self, capsys):
        assert run(capsys, "expand", "--order", "3")[0] == 2
        assert run(capsys, "unknown-command")[0] == 2
        assert run(capsys)[0] == 2

    def test_precision_must_be_at_least_53(self, capsys):
        code, _ = run(capsys, "expand", "--f", "x", "--order", "1",
                      "--precision-bits", "10")
        assert code == 2

    def test_byte_identical_output(self, capsys):
        args = ("expand", "--f", "sqrt(x)", "--order", "6")
        first = run(capsys, *args)
        second = run(capsys, *args)
        assert first == second
        args = ("husimi", "--beta", "1", "--omega", "1", "--grid", "0:2:0.5")
        assert run(capsys, *args) == run(capsys, *args)

    def test_byte_identical_across_processes(self, tmp_path):
        import subprocess
        import sys

        args = [sys.executable, "-m", "newton_boson.cli", "expand",
                "--f", "sqrt(x)", "--order", "5"]
        first = subprocess.run(args, capture_output=True, check=True)
        second = subprocess.run(args, capture_output=True, check=True)
        assert first.stdout == second.stdout
        assert first.stdout.startswith(b"{")

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "series.json"
        code, out = run(capsys, "expand", "--f", "x", "--order", "1",
                        "--out", str(target))
        assert code == 0
        assert out == ""
        payload = load_json(target.read_text())
        assert payload["coefficients"] == [0, 1]

    def test_env_precision_override(self, capsys, monkeypatch):
        monkeypatch.setenv("NEWTON_BOSON_PRECISION", "128")
        code, out = run(capsys, "expand", "--f", "x", "--order", "1")
        assert code == 0
        assert load_json(out)["precision_bits"] == 128

    def test_sorted_keys(self, capsys):
        _, out = run(capsys, "expand", "--f", "x", "--order", "1")
        keys = [line.split(":")[0].strip().strip('"') for line in
                out.splitlines() if ":" in line]
        assert keys == sorted(keys)
