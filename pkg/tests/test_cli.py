import json
import logging
import os
from unittest.mock import patch

import pytest
from click.testing import CliRunner

from src.interfaces.cli import cli
from src.interfaces.json_output import validate_document

EXAMPLE_OPERATOR = "(n+1)*E - 2*(2*n+1)"


class TestReduceCommand:

    def setup_method(self):
        self.runner = CliRunner()

    def test_text_output(self):
        result = self.runner.invoke(cli, ["reduce", "--operator", EXAMPLE_OPERATOR,
                                          "--a", "1,1", "--b", "0,0"])
        assert result.exit_code == 0
        assert "L' = E - 1" in result.output
        assert "Basis ((1,1),(0,0))" in result.output

    def test_json_output(self):
        result = self.runner.invoke(cli, ["reduce", "--operator", EXAMPLE_OPERATOR,
                                          "--a", "1,1", "--b", "0,0", "--format", "json",
                                          "--column", "--matrix"])
        assert result.exit_code == 0
        document = json.loads(result.output)
        validate_document(document)
        assert document["kind"] == "reduction"
        assert document["lprime"]["text"] == "E - 1"
        assert document["lprime_primitive"] == "E - 1"
        assert [entry["text"] for entry in document["column"]] == [
            "(k+1)*E - (k+1)", "3*(k+1)*E - 3*(k+1)"]
        assert len(document["matrix"]) == 2
        assert document["basis"] == {"m": 2, "a": [1, 1], "b": ["0/1", "0/1"]}

    def test_output_variable(self):
        result = self.runner.invoke(cli, ["reduce", "--operator", "E - (n+1)", "--a", "1",
                                          "--b", "0", "--variable", "n"])
        assert result.exit_code == 0
        assert "L' = E - n - n*E^(-1)" in result.output

    def test_parse_error_is_usage_error(self):
        result = self.runner.invoke(cli, ["reduce", "--operator", "y*E", "--a", "1", "--b", "0"])
        assert result.exit_code == 2
        assert "Unknown symbol" in result.output

    def test_invalid_basis_is_usage_error(self):
        result = self.runner.invoke(cli, ["reduce", "--operator", "E", "--a", "0", "--b", "0"])
        assert result.exit_code == 2

    def test_zero_denominator_is_usage_error(self):
        result = self.runner.invoke(cli, ["reduce", "--operator", "E - 3", "--a", "1", "--b", "1/0"])
        assert result.exit_code == 2
        assert "Zero denominator" in result.output

    def test_usage_error_is_not_logged_to_console(self, caplog):
        with caplog.at_level(logging.INFO, logger="definite_sums"):
            result = self.runner.invoke(cli, ["reduce", "--operator", "y*E", "--a", "1", "--b", "0"])
        assert result.exit_code == 2
        assert result.output.count("Unknown symbol") == 1
        assert not [r for r in caplog.records if r.levelno >= logging.WARNING]
        assert any("Unknown symbol" in r.getMessage() for r in caplog.records)


class TestExpandCommand:

    def setup_method(self):
        self.runner = CliRunner()

    def test_json_tables(self):
        result = self.runner.invoke(cli, ["expand", "--a", "1,1", "--b", "0,0",
                                          "--format", "json", "--check", "10"])
        assert result.exit_code == 0
        document = json.loads(result.output)
        validate_document(document)
        assert {"schema", "kind", "m", "a", "b", "E", "X"} <= set(document)
        assert "basis" not in document
        assert (document["m"], document["a"], document["b"]) == (2, [1, 1], ["0/1", "0/1"])
        assert document["E"][0] == ["1", "2", "1"]
        assert document["E"][1] == ["1", "(2*k+1)/(k+1)", "k/(k+1)"]
        assert document["X"][0] == ["k", "k+1"]
        assert document["compatibility"] == {"kmax": 10, "passed": True, "failures": []}

    def test_text_tables(self):
        result = self.runner.invoke(cli, ["expand", "--a", "2,3", "--b", "-1,4"])
        assert result.exit_code == 0
        assert "Basis ((2,3),(-1,4))" in result.output
        assert "Compatibility" not in result.output

    def test_kmax_below_band(self):
        result = self.runner.invoke(cli, ["expand", "--a", "2,3", "--b", "0,0", "--check", "3"])
        assert result.exit_code == 2


class TestVerifyCommand:

    def setup_method(self):
        self.runner = CliRunner()

    def test_fibonacci(self):
        result = self.runner.invoke(cli, ["verify", "--operator", "E^2 - E - 1", "--a", "1",
                                          "--b", "0", "--initial", "0,1", "--nmax", "20"])
        assert result.exit_code == 0
        assert "L' = E^2 + E - 1" in result.output
        assert "h  = 0, 1, -1, 2, -3" in result.output
        assert "Verified for n = 0..20" in result.output

    def test_factorial_json(self):
        result = self.runner.invoke(cli, ["verify", "--operator", "E - (n+1)", "--a", "1",
                                          "--b", "0", "--initial", "1", "--nmax", "12",
                                          "--format", "json"])
        assert result.exit_code == 0
        document = json.loads(result.output)
        assert document["passed"] is True
        assert document["checked"] == 13
        assert document["lprime"]["text"] == "E - k - k*E^(-1)"
        assert document["h"][:5] == ["1/1", "0/1", "1/1", "2/1", "9/1"]
        assert document["y"][:5] == ["1/1", "1/1", "2/1", "6/1", "24/1"]

    def test_supplied_lprime(self):
        result = self.runner.invoke(cli, ["verify", "--operator", "E - 2", "--a", "1", "--b", "0",
                                          "--lprime", "E - 1", "--initial", "1"])
        assert result.exit_code == 0

    def test_failure_exit_code(self):
        result = self.runner.invoke(cli, ["verify", "--operator", "E - 2", "--a", "1", "--b", "0",
                                          "--lprime", "E - 2", "--initial", "1", "--format", "json"])
        assert result.exit_code == 1
        document = json.loads(result.output)
        assert document["passed"] is False
        assert document["first_failure"] == 0
        assert document["residual"] == "1/1"

    def test_inconsistent_initial_data(self):
        result = self.runner.invoke(cli, ["verify", "--operator", "E - 3", "--a", "1", "--b", "0",
                                          "--initial", "1,5"])
        assert result.exit_code == 2

    def test_zero_denominator_in_initial_values(self):
        result = self.runner.invoke(cli, ["verify", "--operator", "E - 3", "--a", "1", "--b", "0",
                                          "--initial", "1/0"])
        assert result.exit_code == 2

    def test_truncation(self):
        args = ["verify", "--operator", "E - 1", "--a", "1", "--b", "1/2", "--initial", "1",
                "--nmax", "4"]
        assert self.runner.invoke(cli, args).exit_code == 2
        result = self.runner.invoke(cli, args + ["--truncate", "6", "--format", "json"])
        assert result.exit_code == 0
        document = json.loads(result.output)
        assert document["truncated"] is True
        assert document["passed"] is True

    def test_nmax_from_environment(self):
        with patch.dict(os.environ, {"DEFINITE_SUMS_NMAX": "4"}):
            result = self.runner.invoke(cli, ["verify", "--operator", "E - 3", "--a", "1",
                                              "--b", "0", "--initial", "1", "--format", "json"])
        assert result.exit_code == 0
        assert json.loads(result.output)["nmax"] == 4


class TestGcrdCommand:

    def setup_method(self):
        self.runner = CliRunner()

    def test_common_factor(self):
        result = self.runner.invoke(cli, ["gcrd", "(k+1)*E - (k+1)", "3*(k+1)*E - 3*(k+1)"])
        assert result.exit_code == 0
        assert result.output.strip() == "E - 1"

    def test_json_with_primitive_form(self):
        result = self.runner.invoke(cli, ["--log-level", "DEBUG", "gcrd", "2*(2*k+1)*E - (k+1)",
                                          "--format", "json"])
        assert result.exit_code == 0
        document = json.loads(result.output)
        assert document["gcrd"]["text"] == "E - (k+1)/(2*(2*k+1))"
        assert document["primitive"] == "2*(2*k+1)*E - (k+1)"

    def test_parse_error(self):
        result = self.runner.invoke(cli, ["gcrd", "E +"])
        assert result.exit_code == 2


if __name__ == "__main__":
    pytest.main([__file__])
