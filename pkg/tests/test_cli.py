"""End-to-end tests of the conewalk commands.

Uses Click's CliRunner with small half-line configs so that every command runs
its real engines in well under a second.
"""

import json

import pytest

from conewalk.cli.main import cli
from conewalk.cli.runner import exit_code_for
from conewalk.exceptions import (
    CurveFileError,
    ErrorCollector,
    DPInfeasibleError,
    OutsideConeError,
    VerificationFailedError,
    ZeroSurvivalMassError,
)
from conewalk.io.tables import read_jsonl, read_survival_csv


@pytest.fixture
def invoke(runner, temp_dir):
    """Run the CLI with logging sent to a file in the temp dir."""

    def _invoke(*args: str):
        return runner.invoke(cli, ["--log-file", str(temp_dir / "conewalk.log"), *args])

    return _invoke


@pytest.mark.integration
class TestCLIHelp:
    """Help, version and the config listing."""

    def test_main_help(self, runner):
        result = runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        assert "random walks killed at the boundary of a cone" in result.output
        for command in ("survival", "harmonic", "verify", "sample", "configs"):
            assert command in result.output

    def test_version_flag(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert "0.1.0" in result.output

    @pytest.mark.parametrize("command", ["survival", "harmonic", "verify", "sample"])
    def test_command_help(self, invoke, command):
        result = invoke(command, "--help")
        assert result.exit_code == 0
        assert "--config" in result.output
        assert "--seed" in result.output

    def test_configs_listing(self, invoke):
        result = invoke("configs")
        assert result.exit_code == 0
        assert "halfline_rademacher" in result.output
        assert "weylC2_asymmetric" in result.output
        assert "INVALID" not in result.output


@pytest.mark.integration
class TestExitCodes:
    """0 success, 1 usage, 2 config or infeasible DP, 3 verification failed."""

    def test_unknown_option(self, invoke):
        result = invoke("survival", "--config", "halfline_rademacher", "--frobnicate")
        assert result.exit_code == 1

    def test_unknown_command(self, invoke):
        assert invoke("simulate").exit_code == 1

    def test_missing_config_option(self, invoke):
        assert invoke("survival").exit_code == 1

    def test_missing_config_file(self, invoke, temp_dir):
        result = invoke("survival", "--config", str(temp_dir / "nowhere.json"))
        assert result.exit_code == 2

    def test_missing_seed(self, invoke, write_config, halfline_config):
        del halfline_config["seed"]
        path = write_config(halfline_config)
        result = invoke("survival", "--config", str(path))
        assert result.exit_code == 2
        assert "seed" in result.output

    def test_seed_on_command_line(self, invoke, write_config, halfline_config):
        del halfline_config["seed"]
        path = write_config(halfline_config)
        assert invoke("survival", "--config", str(path), "--seed", "5").exit_code == 0

    def test_invalid_json(self, invoke, temp_dir):
        path = temp_dir / "broken.json"
        path.write_text('{"seed": 1,}', encoding="utf-8")
        assert invoke("survival", "--config", str(path)).exit_code == 2

    def test_dp_infeasible(self, invoke, write_config, halfline_config):
        halfline_config["max_dp_bytes"] = 16
        path = write_config(halfline_config)
        assert invoke("survival", "--config", str(path)).exit_code == 2

    def test_corrupted_curve_file(self, invoke, write_config, halfline_config, temp_dir):
        path = write_config(halfline_config)
        curve = temp_dir / "bad.csv"
        curve.write_text(
            "# conewalk 0.1.0\ncone_label,x,n,estimate,std_error,method,trials,seed\n"
            "halfline,1.0,16\n",
            encoding="utf-8",
        )
        result = invoke("verify", "--config", str(path), "--curve", str(curve))
        assert result.exit_code == 2
        assert "line 3" in result.output

    def test_verification_failure(self, invoke, write_config, halfline_config, temp_dir):
        halfline_config["verify"]["criteria"] = ["exponent_loglog"]
        halfline_config["verify"]["slope_tolerance"] = 1e-9
        path = write_config(halfline_config)
        result = invoke("verify", "--config", str(path))
        assert result.exit_code == 3
        assert "FAILED: exponent_loglog" in result.output
        report = json.loads((temp_dir / "out" / "report.json").read_text())
        assert report["passed"] is False


@pytest.mark.integration
class TestRunCommands:
    """Files written by each run command."""

    def test_survival_writes_tables(self, invoke, write_config, halfline_config, temp_dir):
        result = invoke("survival", "--config", str(write_config(halfline_config)))
        assert result.exit_code == 0, result.output
        assert "P(tau > 256)" in result.output

        out = temp_dir / "out"
        curves = read_survival_csv(out / "survival.csv")
        assert len(curves) == 3
        header, records = read_jsonl(out / "summary.jsonl")
        assert header["version"] == "0.1.0"
        assert [r["n_max"] for r in records] == [256, 256, 256]

    def test_reruns_are_byte_identical(self, invoke, write_config, halfline_config, temp_dir):
        halfline_config["method"] = "mc"
        halfline_config["trials"] = 500
        path = str(write_config(halfline_config))
        assert invoke("survival", "--config", path, "--out", str(temp_dir / "a")).exit_code == 0
        assert invoke("survival", "--config", path, "--out", str(temp_dir / "b")).exit_code == 0
        for name in ("survival.csv", "summary.jsonl"):
            assert (temp_dir / "a" / name).read_bytes() == (temp_dir / "b" / name).read_bytes()

    def test_seed_changes_monte_carlo_output(
        self, invoke, write_config, halfline_config, temp_dir
    ):
        halfline_config["method"] = "mc"
        halfline_config["trials"] = 500
        path = str(write_config(halfline_config))
        invoke("survival", "--config", path, "--out", str(temp_dir / "a"))
        invoke("survival", "--config", path, "--out", str(temp_dir / "b"), "--seed", "12")
        first = (temp_dir / "a" / "survival.csv").read_text()
        second = (temp_dir / "b" / "survival.csv").read_text()
        assert first != second

    def test_harmonic(self, invoke, write_config, halfline_config, temp_dir):
        halfline_config["harmonic"]["R_values"] = [2.0]
        result = invoke("harmonic", "--config", str(write_config(halfline_config)))
        assert result.exit_code == 0, result.output
        assert "V(2) = " in result.output
        assert (temp_dir / "out" / "harmonic.csv").exists()
        assert (temp_dir / "out" / "harmonic_R2.csv").exists()

    def test_sample(self, invoke, write_config, halfline_config, temp_dir):
        result = invoke("sample", "--config", str(write_config(halfline_config)))
        assert result.exit_code == 0, result.output
        _, records = read_jsonl(temp_dir / "out" / "paths.jsonl")
        assert len(records) == 9
        assert all(r["sampler"] == "conditioned" for r in records)

    def test_verify_existing_curves(self, invoke, write_config, halfline_config, temp_dir):
        halfline_config["verify"]["criteria"] = ["exponent_loglog", "exponent_ratio"]
        path = str(write_config(halfline_config))
        assert invoke("survival", "--config", path).exit_code == 0

        curve = temp_dir / "out" / "survival.csv"
        result = invoke("verify", "--config", path, "--curve", str(curve))
        assert result.exit_code == 0, result.output
        assert "PASSED" in result.output
        out = temp_dir / "out"
        assert (out / "fits.csv").exists()
        assert (out / "curves.csv").read_text().splitlines()[2:] == curve.read_text().splitlines()[
            2:
        ]


@pytest.mark.unit
class TestErrorMapping:
    """Exit codes and log messages carried by the exceptions themselves."""

    @pytest.mark.parametrize(
        ("error", "code"),
        [
            (OutsideConeError((0.0,), "halfline"), 1),
            (CurveFileError("curve.csv", "too few fields", line=3), 2),
            (DPInfeasibleError(2**40, 2**30, "halfline"), 2),
            (VerificationFailedError(["exponent_loglog"]), 3),
            (FileNotFoundError("nowhere.json"), 2),
            (RuntimeError("boom"), 1),
        ],
    )
    def test_exit_code_for(self, error, code):
        assert exit_code_for(error) == code

    def test_context_goes_to_the_log_message(self):
        error = ZeroSurvivalMassError(12)
        assert str(error) == error.user_message
        assert error.technical_message.endswith("[n=12]")

    def test_full_message_has_the_hint(self):
        error = DPInfeasibleError(2**40, 2**30, "halfline")
        assert "Suggestion: Lower the horizons" in error.get_full_message()

    def test_collector_keeps_going(self):
        collector = ErrorCollector("verify")
        with collector.try_operation("exponent_loglog"):
            raise ZeroSurvivalMassError(4)
        with collector.try_operation("proportionality"):
            pass
        assert isinstance(collector.failed("exponent_loglog"), ZeroSurvivalMassError)
        assert collector.failed("proportionality") is None
        assert collector.success_count == 1
        assert "1 of 2 operations failed" in collector.get_summary()
