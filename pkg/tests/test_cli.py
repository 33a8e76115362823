import json
import math

import pytest

from lpsections import cli
from lpsections.schemas import SCHEMAS, validate_output

EXPECTED_HEADERS = {
    "volume": "engine,p,n,a_spec,value,err_bound,samples,seed",
    "kernel": "p,s,value,err_bound",
    "crossing": "p,n,a_diag,a_diag_err,a2,holds,indeterminate,first_n_holds,holds_for_all_tail",
    "verify": "suite,name,p,n,lhs,rhs,satisfied,margin",
    "clt": "p,n,estimate,std_err,c_p",
    "optimize": "p,n,engine,record,iteration,value,err_bound,converged,coords",
}


def run_cli(argv, capsys) -> tuple[int, str]:
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


class TestSchemas:
    def test_headers_are_frozen(self):
        for cmd, header in EXPECTED_HEADERS.items():
            assert ",".join(SCHEMAS[cmd]) == header

    def test_validator_rejects_bad_rows(self):
        with pytest.raises(ValueError):
            validate_output("kernel", {"subcommand": "kernel", "rows": [{"p": "4.0"}]})
        with pytest.raises(ValueError):
            validate_output("kernel", {"subcommand": "volume", "rows": []})


class TestVolume:
    def test_closed_two_equal_exact_row(self, capsys):
        code, out = run_cli(["volume", "--p", "4", "--a2", "3", "--engine", "closed"], capsys)
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == EXPECTED_HEADERS["volume"]
        assert lines[1] == "closed_form,4.0,3,a2:3,1.4142135623730951,0.0,,"

    def test_quad_routes_small_to_closed(self, capsys):
        code, out = run_cli(["volume", "--p", "inf", "--diag", "2", "--engine", "quad"], capsys)
        assert code == 0
        assert out.strip().split("\n")[1].split(",")[4] == "2.0"

    def test_mc_row_has_samples_and_seed(self, capsys):
        code, out = run_cli(["volume", "--p", "4", "--a2", "2", "--engine", "mc",
                             "--samples", "20000", "--seed", "7"], capsys)
        assert code == 0
        cells = out.strip().split("\n")[1].split(",")
        assert cells[0] == "montecarlo" and cells[6] == "20000" and cells[7] == "7"

    def test_float_cells_round_trip(self, capsys):
        code, out = run_cli(["volume", "--p", "3", "--a", "0.8,0.6", "--engine", "closed"], capsys)
        cells = out.strip().split("\n")[1].split(",")
        v = float(cells[4])
        assert repr(v) == cells[4]

    def test_usage_errors(self, capsys):
        assert run_cli(["volume", "--p", "0.5", "--a2", "2", "--engine", "closed"], capsys)[0] == 2
        assert run_cli(["volume", "--p", "4", "--engine", "closed"], capsys)[0] == 2
        assert run_cli(["volume", "--p", "4", "--a2", "2", "--diag", "3",
                        "--engine", "closed"], capsys)[0] == 2
        assert run_cli(["volume", "--p", "4", "--diag", "3", "--engine", "closed"], capsys)[0] == 2
        assert run_cli(["volume", "--p", "4", "--a2", "2", "--engine", "warp"], capsys)[0] == 2

    def test_nonconvergence_exit_code(self, capsys, monkeypatch):
        from lpsections.hankel import NonConvergenceError

        def boom(*a, **k):
            raise NonConvergenceError("synthetic")

        monkeypatch.setattr(cli, "section_volume_quadrature", boom)
        code, _ = run_cli(["volume", "--p", "4", "--diag", "3", "--engine", "quad"], capsys)
        assert code == 3


class TestKernelTable:
    def test_rows_and_header(self, capsys):
        code, out = run_cli(["kernel", "--p", "inf", "--s-max", "2", "--step", "0.5"], capsys)
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == EXPECTED_HEADERS["kernel"]
        assert len(lines) == 1 + 5  # s = 0, 0.5, 1.0, 1.5, 2.0
        assert lines[1].split(",")[1:3] == ["0.0", "1.0"]


class TestCrossing:
    def test_small_scan(self, capsys):
        code, out = run_cli(["crossing", "--p", "4", "--n-max", "4", "--tol", "1e-3"], capsys)
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == EXPECTED_HEADERS["crossing"]
        assert len(lines) == 3  # n = 3, 4


class TestVerify:
    def test_lemma1_suite_passes(self, capsys):
        code, out = run_cli(["verify", "--suite", "lemma1"], capsys)
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == EXPECTED_HEADERS["verify"]
        assert all(line.split(",")[6] == "true" for line in lines[1:])

    def test_sufficient_suite_passes(self, capsys):
        code, out = run_cli(["verify", "--suite", "sufficient"], capsys)
        assert code == 0


class TestClt:
    def test_table(self, capsys):
        code, out = run_cli(["clt", "--p", "4", "--n-list", "2,4",
                             "--samples", "4000", "--seed", "1"], capsys)
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == EXPECTED_HEADERS["clt"]
        assert len(lines) == 3
        c_p = float(lines[1].split(",")[4])
        assert c_p == pytest.approx(math.sqrt(math.pi), rel=1e-12)

    def test_bad_n_list(self, capsys):
        assert run_cli(["clt", "--p", "4", "--n-list", "2,x"], capsys)[0] == 2


class TestOptimize:
    def test_report_rows(self, capsys):
        code, out = run_cli(["optimize", "--p", "4", "--n", "2", "--engine", "quad",
                             "--budget", "60", "--tol", "1e-3", "--seed", "1"], capsys)
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == EXPECTED_HEADERS["optimize"]
        best = lines[-1].split(",")
        assert best[3] == "best"
        assert float(best[5]) == pytest.approx(2.0 ** 0.5, rel=1e-6)
        assert ";" in best[8]


class TestJsonOutput:
    def test_round_trips_schema(self, capsys):
        code, out = run_cli(["kernel", "--p", "4", "--s-max", "1", "--step", "0.5",
                             "--format", "json"], capsys)
        assert code == 0
        payload = json.loads(out)
        validate_output("kernel", payload)

    def test_volume_json(self, capsys):
        code, out = run_cli(["volume", "--p", "9", "--a2", "4", "--engine", "closed",
                             "--format", "json"], capsys)
        payload = json.loads(out)
        validate_output("volume", payload)
        assert payload["rows"][0]["value"] == 2.0 ** (1.0 - 2.0 / 9.0)


class TestDeterminism:
    CASES = [
        ["volume", "--p", "4", "--a2", "3", "--engine", "closed"],
        ["volume", "--p", "4", "--diag", "3", "--engine", "quad", "--tol", "1e-4"],
        ["volume", "--p", "4", "--diag", "3", "--engine", "mc", "--samples", "20000",
         "--seed", "5"],
        ["kernel", "--p", "9", "--s-max", "3", "--step", "1"],
        ["crossing", "--p", "4", "--n-max", "4", "--tol", "1e-3"],
        ["verify", "--suite", "lemma1"],
        ["clt", "--p", "4", "--n-list", "2,4", "--samples", "4000", "--seed", "3"],
        ["optimize", "--p", "3", "--n", "2", "--engine", "quad", "--budget", "40",
         "--tol", "1e-2", "--seed", "2"],
        ["clt", "--p", "inf", "--n-list", "2,3", "--samples", "2000", "--format", "json"],
    ]

    @pytest.mark.parametrize("argv", CASES, ids=[" ".join(c[:2]) + f"#{i}" for i, c in enumerate(CASES)])
    def test_rerun_byte_identical(self, argv, capsys, tmp_path):
        f1 = tmp_path / "run1.out"
        f2 = tmp_path / "run2.out"
        assert cli.main(argv + ["--output-path", str(f1)]) == cli.main(argv + ["--output-path", str(f2)])
        assert f1.read_bytes() == f2.read_bytes()
        capsys.readouterr()
