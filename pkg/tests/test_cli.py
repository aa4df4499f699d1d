"""Command-line contract: exit codes, config parsing, output formats."""

import json

import pytest

from pctkit import cli
from pctkit.errors import ConvergenceError

QUICK_HALFLINE = """
# quartic-denominator family on the half line, small verification grid
mass.kind = II
mass.alpha = 4
mass.beta = 1
mass.gamma = 1
reference.kind = SCP
reference.mu = 2
levels = 2
grid.N = 499
"""


def run_cli(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestConfigParsing:
    def test_defaults_round_trip(self):
        cfg = cli.parse_config("")
        assert cfg.mass_kind == "I"
        assert cfg.reference_kind == "STP"
        assert cfg.levels == 4
        assert cfg.out_format == "csv"

    def test_comments_and_blanks_skipped(self):
        cfg = cli.parse_config("# heading\n\nlevels = 6\n")
        assert cfg.levels == 6

    def test_unknown_key_rejected_with_line_number(self):
        with pytest.raises(cli.ConfigError) as err:
            cli.parse_config("levels = 3\nmass.zeta = 1\n")
        assert "line 2" in str(err.value)
        assert "mass.zeta" in str(err.value)

    def test_duplicate_key_rejected(self):
        with pytest.raises(cli.ConfigError) as err:
            cli.parse_config("levels = 3\nlevels = 4\n")
        assert "duplicate" in str(err.value)

    def test_uncoercible_value_rejected(self):
        with pytest.raises(cli.ConfigError) as err:
            cli.parse_config("mass.alpha = many\n")
        assert "many" in str(err.value)

    def test_missing_equals_rejected(self):
        with pytest.raises(cli.ConfigError):
            cli.parse_config("levels 3\n")

    def test_invalid_enum_value_rejected(self):
        with pytest.raises(cli.ConfigError):
            cli.parse_config("mass.kind = IV\n")
        with pytest.raises(cli.ConfigError):
            cli.parse_config("output.format = xml\n")


class TestUsageErrors:
    def test_missing_command(self, capsys):
        code, _, err = run_cli([], capsys)
        assert code == 1
        assert "error:" in err

    def test_unknown_command(self, capsys):
        code, _, err = run_cli(["tabulate"], capsys)
        assert code == 1

    def test_unreadable_config(self, capsys):
        code, _, err = run_cli(["spectrum", "--config", "/no/such/file.cfg"], capsys)
        assert code == 1
        assert "cannot read config" in err

    def test_nonpositive_levels_flag(self, capsys):
        code, _, err = run_cli(["spectrum", "--levels", "0"], capsys)
        assert code == 1


class TestSpectrum:
    def test_default_table(self, capsys):
        code, out, _ = run_cli(["spectrum"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "k,energy,parity"
        assert lines[1] == "0,2,even"
        assert lines[2] == "1,7,odd"
        assert len(lines) == 5

    def test_levels_flag_overrides(self, capsys):
        code, out, _ = run_cli(["spectrum", "--levels", "2"], capsys)
        assert code == 0
        assert len(out.splitlines()) == 3

    def test_json_format(self, capsys):
        code, out, _ = run_cli(["spectrum", "--format", "json"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert [row["energy"] for row in payload["levels"]] == [2, 7, 14, 23]

    def test_double_singular_reference(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "mass.kind = I\nmass.delta = 0.5\nreference.kind = PTP\n"
            "reference.chi = 2\nreference.lambda = 2\nlevels = 3\n",
        )
        code, out, _ = run_cli(["spectrum", "--config", cfg], capsys)
        assert code == 0
        energies = [float(line.split(",")[1]) for line in out.splitlines()[1:]]
        assert energies == [16.0, 36.0, 64.0]


class TestValidate:
    def test_defaults_pass(self, capsys):
        code, out, _ = run_cli(["validate"], capsys)
        assert code == 0
        assert "result: ok" in out
        assert "[satisfied]" in out

    def test_strict_relation_violation(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "mass.delta = 1.2\n")
        code, out, _ = run_cli(["validate", "--config", cfg], capsys)
        assert code == 1
        assert "[not satisfied]" in out
        assert "result: invalid" in out

    def test_scaled_mode_accepts_off_relation_parameters(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "mass.delta = 1.2\nmode = scaled\n")
        code, out, _ = run_cli(["validate", "--config", cfg], capsys)
        assert code == 0

    def test_inadmissible_parameters(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "mass.gamma = -1\n")
        code, out, _ = run_cli(["validate", "--config", cfg], capsys)
        assert code == 1
        assert "gamma" in out

    def test_json_payload(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "mass.delta = 1.2\n")
        code, out, _ = run_cli(["validate", "--config", cfg, "--format", "json"], capsys)
        assert code == 1
        payload = json.loads(out)
        assert payload["ok"] is False
        assert payload["strict_satisfied"] is False
        assert "delta" in payload["strict_relation"]


class TestBuildTarget:
    def test_csv_shape_and_float_format(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "grid.N = 15\n")
        code, out, _ = run_cli(["build-target", "--config", cfg], capsys)
        assert code == 0
        assert "\r" not in out
        assert out.endswith("\n")
        lines = out.splitlines()
        assert lines[0] == "z,m,f,U_target,psi_0,psi_1,psi_2,psi_3"
        assert len(lines) == 16
        for line in lines[1:]:
            for cell in line.split(","):
                # 17 significant digits survive a parse/format round trip
                assert f"{float(cell):.17g}" == cell

    def test_flat_bottom_column_values(self, tmp_path, capsys):
        # eps_map 0.2 keeps the window inside |z| < 5, where the composed
        # tangent is well conditioned and the flat bottom holds to 1e-12
        cfg = write_config(tmp_path, "grid.N = 15\ngrid.eps_map = 0.2\n")
        _, out, _ = run_cli(["build-target", "--config", cfg], capsys)
        for line in out.splitlines()[1:]:
            cells = [float(c) for c in line.split(",")]
            z, m, f, u = cells[:4]
            assert abs(z) < 5.0
            assert abs(m - (1.0 + z * z) ** -2) <= 1e-15
            assert abs(u + 1.0) <= 1e-12

    def test_byte_identical_reruns(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "grid.N = 31\n")
        _, first, _ = run_cli(["build-target", "--config", cfg], capsys)
        _, second, _ = run_cli(["build-target", "--config", cfg], capsys)
        assert first == second

    def test_output_file_matches_stdout(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "grid.N = 31\n")
        _, stdout_text, _ = run_cli(["build-target", "--config", cfg], capsys)
        dest = tmp_path / "table.csv"
        code, out, _ = run_cli(
            ["build-target", "--config", cfg, "--output", str(dest)], capsys
        )
        assert code == 0
        assert out == ""
        assert dest.read_bytes().decode("utf-8") == stdout_text

    def test_json_columns(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "grid.N = 15\nlevels = 1\n")
        code, out, _ = run_cli(["build-target", "--config", cfg, "--format", "json"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["columns"] == ["z", "m", "f", "U_target", "psi_0"]
        assert len(payload["z"]) == 15

    def test_constraint_violation_exits_one(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "mass.delta = 1.2\n")
        code, _, err = run_cli(["build-target", "--config", cfg], capsys)
        assert code == 1
        assert "delta = sqrt(Delta) / 2" in err


class TestVerify:
    def test_passing_run(self, tmp_path, capsys):
        cfg = write_config(tmp_path, QUICK_HALFLINE)
        code, out, _ = run_cli(["verify", "--config", cfg], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "k,E_analytic,E_numeric,abs_err,rel_err"
        assert len(lines) == 3

    def test_tolerance_failure_exits_two(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path, QUICK_HALFLINE + "tolerances.isospectral_rel = 1e-12\n"
        )
        code, out, _ = run_cli(["verify", "--config", cfg, "--format", "json"], capsys)
        assert code == 2
        payload = json.loads(out)
        assert payload["passed"] is False
        assert any("isospectrality" in f for f in payload["tolerance_failures"])

    def test_probe_coefficient_breaks_isospectrality(self, tmp_path, capsys):
        cfg = write_config(tmp_path, QUICK_HALFLINE)
        code, out, _ = run_cli(
            ["verify", "--config", cfg, "--debug-correction-eighth", "--format", "json"],
            capsys,
        )
        assert code == 2
        payload = json.loads(out)
        assert any("isospectrality" in f for f in payload["tolerance_failures"])

    def test_convergence_breakdown_exits_three(self, tmp_path, capsys, monkeypatch):
        def explode(*args, **kwargs):
            raise ConvergenceError("bisection sweep budget exhausted")

        monkeypatch.setattr(cli.pct, "verify_target", explode)
        cfg = write_config(tmp_path, QUICK_HALFLINE)
        code, _, err = run_cli(["verify", "--config", cfg], capsys)
        assert code == 3
        assert "numerical failure" in err


class TestComparePaper:
    def test_csv_run(self, capsys):
        code, out, _ = run_cli(["compare-paper", "Eq14"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "z,engine,printed,abs_dev"
        assert len(lines) == 102

    def test_json_coefficients(self, capsys):
        code, out, _ = run_cli(["compare-paper", "Eq14", "--format", "json"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["coefficients"]["kappa"] == 1.0
        assert payload["coefficients"]["Ubar0"] == 2.0
        assert payload["max_abs_deviation"] > 0.1

    def test_unknown_tag(self, capsys):
        code, _, err = run_cli(["compare-paper", "Eq99"], capsys)
        assert code == 1

    def test_incompatible_tag(self, capsys):
        # default system is the quadratic-denominator family; Eq27 is not its
        code, _, err = run_cli(["compare-paper", "Eq27"], capsys)
        assert code == 1
