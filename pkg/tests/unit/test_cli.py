"""
Unit tests for the ttcalc command line
"""
import json

import pytest
from typer.testing import CliRunner

from src.cli.main import app
from src.cli.render import to_json

runner = CliRunner()


def invoke(*args: str):
    return runner.invoke(app, list(args))


class TestHomologyCommands:
    """Test hh and hc"""

    def test_hh_json(self):
        """Test HH of the dual numbers through degree 4"""
        result = invoke("hh", "dual_numbers", "-D", "4", "--format", "json")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["data"]["hh_dims"] == [2, 1, 1, 1, 1]
        assert all(c["status"] == "pass" for c in payload["checks"])

    def test_hh_table(self):
        """Test the table output lists every degree"""
        result = invoke("hh", "kxk", "-D", "2")
        assert result.exit_code == 0, result.output
        assert "HH" in result.stdout
        assert "hh.hh0_center" in result.stdout

    def test_hh_representatives(self):
        """Test class representatives are printed as tensors"""
        result = invoke("hh", "ground_field", "-D", "1", "--representatives", "--format", "json")
        assert result.exit_code == 0, result.output
        reps = json.loads(result.stdout)["data"]["representatives"]
        assert reps["0"] == ["1*(1)"]
        assert reps["1"] == []

    def test_hc_cone(self):
        """Test HC of the ground field alternates 1, 0"""
        result = invoke("hc", "ground_field", "-D", "4", "--format", "json")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["model"] == "cone"
        assert payload["hc_dims"] == [1, 0, 1, 0, 1]

    def test_hc_normalized_csv(self):
        """Test CSV output of the normalized model"""
        result = invoke("hc", "kxk", "-D", "3", "--normalized", "--format", "csv")
        assert result.exit_code == 0, result.output
        lines = result.stdout.strip().splitlines()
        assert lines[0] == "degree,HC"
        assert lines[1:] == ["0,2", "1,0", "2,2", "3,0"]

    def test_output_file(self, tmp_path):
        """Test --output writes the JSON report next to the rendered output"""
        target = tmp_path / "hh.json"
        result = invoke("hh", "ground_field", "-D", "2", "--format", "csv", "--output", str(target))
        assert result.exit_code == 0, result.output
        assert json.loads(target.read_text())["data"]["hh_dims"] == [1, 0, 0]

    def test_json_round_trip(self):
        """Test emitted JSON re-renders byte for byte"""
        result = invoke("verify", "kxk", "-D", "2", "--format", "json")
        assert result.exit_code == 0, result.output
        text = result.stdout.rstrip("\n")
        assert to_json(json.loads(text)) == text


class TestVerdicts:
    """Test exit codes of validate, verify and transport"""

    def test_validate_ok(self):
        result = invoke("validate", "dual_numbers", "--format", "json")
        assert result.exit_code == 0, result.output

    def test_validate_bimodule(self):
        """Test bimodule documents are recognized"""
        result = invoke("validate", "a3_tilting", "--format", "json")
        assert result.exit_code == 0, result.output
        assert json.loads(result.stdout)["checks"]

    def test_validate_nonassociative(self):
        """Test an axiom failure exits 1 with a witness"""
        result = invoke("validate", "nonassociative", "--format", "json")
        assert result.exit_code == 1
        failed = [c for c in json.loads(result.stdout)["checks"] if c["status"] == "fail"]
        assert failed and failed[0]["witness"]

    def test_validate_malformed(self):
        """Test a malformed document exits 2"""
        result = invoke("validate", "malformed")
        assert result.exit_code == 2
        assert "Error:" in result.output

    def test_unknown_document(self):
        result = invoke("hh", "no_such_algebra")
        assert result.exit_code == 2

    def test_bad_field(self):
        """Test an unparseable field override exits 2"""
        result = invoke("hh", "ground_field", "--field", "R")
        assert result.exit_code == 2

    def test_verify_ground_field(self):
        result = invoke("verify", "ground_field", "-D", "2", "--format", "json")
        assert result.exit_code == 0, result.output
        ids = {c["id"] for c in json.loads(result.stdout)["checks"]}
        assert "tt.eq1" in ids

    def test_verify_nonassociative(self):
        """Test verify stops at validation for a broken algebra"""
        result = invoke("verify", "nonassociative", "-D", "1", "--format", "json")
        assert result.exit_code == 1
        ids = {c["id"] for c in json.loads(result.stdout)["checks"]}
        assert "tt.eq1" not in ids

    def test_transport_regular(self):
        """Test transport along the regular bimodule succeeds"""
        result = invoke("transport", "dual_numbers", "dual_numbers", "regular_dual_numbers",
                        "-D", "0", "--format", "json")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["data"]["inconclusive"] is False
        assert payload["data"]["hh_dims_source"] == [2]

    def test_transport_not_an_equivalence(self):
        """Test a corner embedding is rejected"""
        result = invoke("transport", "ground_field", "kxk", "morphism_k_kxk", "-D", "0", "--format", "json")
        assert result.exit_code == 1

    @pytest.mark.parametrize("command", ["hh", "hc", "calculus"])
    def test_resource_cap(self, command):
        """Test exceeding the chain-space cap exits 3"""
        result = invoke(command, "dual_numbers", "-D", "4", "--max-chain-dim", "10")
        assert result.exit_code == 3
        assert "limit" in result.output


class TestListing:
    """Test fixtures and calculus output"""

    def test_fixtures_csv(self):
        result = invoke("fixtures", "--format", "csv")
        assert result.exit_code == 0
        assert "algebras,dual_numbers" in result.stdout
        assert "bimodules,a3_tilting" in result.stdout

    def test_fixtures_json(self):
        result = invoke("fixtures", "--format", "json")
        assert "m2" in json.loads(result.stdout)["algebras"]

    def test_calculus_json(self):
        """Test the calculus tables of the ground field"""
        result = invoke("calculus", "ground_field", "-D", "1", "--format", "json")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["hh_dims"] == [1, 0]
        assert payload["hh_cohomology_dims"] == [1, 0]
