"""
Unit tests for document, report and run configuration schemas
"""
import pytest
from pydantic import ValidationError

from src.models.enums import CheckStatus, FieldType, OutputFormat
from src.models.schemas import AlgebraDocument, BimoduleDocument, FieldDescriptor, Report, RunConfig


class TestDocumentSchemas:
    """Test input document validation"""

    def test_field_descriptor(self):
        """Test Q and Fp descriptors"""
        assert FieldDescriptor(type="Q").type == FieldType.RATIONAL
        assert FieldDescriptor(type="Fp", p=5).p == 5
        with pytest.raises(ValidationError):
            FieldDescriptor(type="Fp")
        with pytest.raises(ValidationError):
            FieldDescriptor(type="Q", p=3)

    def test_algebra_document(self):
        """Test a minimal algebra document"""
        doc = AlgebraDocument(name="k", field={"type": "Q"}, dim=1, basis=["1"], unit=["1"],
                              mult=[[0, 0, 0, "1"]])
        assert doc.idempotents is None
        assert doc.field.type == FieldType.RATIONAL

    def test_mult_index_out_of_range(self):
        """Test structure constants must index the basis"""
        with pytest.raises(ValidationError, match="outside"):
            AlgebraDocument(name="k", field={"type": "Q"}, dim=1, basis=["1"], unit=["1"],
                            mult=[[0, 1, 0, "1"]])

    def test_mult_entry_shape(self):
        with pytest.raises(ValidationError, match="must be"):
            AlgebraDocument(name="k", field={"type": "Q"}, dim=1, basis=["1"], unit=["1"], mult=[[0, 0, 0]])

    def test_bimodule_degree_count(self):
        """Test one module entry is required per degree"""
        module = {"rank": 1, "idempotent": [[["1"]]], "left_action": [[[["1"]]]]}
        doc = BimoduleDocument(source="ground_field", target="ground_field", degrees=[0, 0], modules=[module])
        assert doc.name == "bimodule"
        with pytest.raises(ValidationError, match="expected 2"):
            BimoduleDocument(source="ground_field", target="ground_field", degrees=[0, 1], modules=[module])
        with pytest.raises(ValidationError, match="min <= max"):
            BimoduleDocument(source="ground_field", target="ground_field", degrees=[1, 0], modules=[])


class TestReport:
    """Test the check report"""

    def test_verdict(self):
        """Test only failures spoil the verdict"""
        report = Report(title="r")
        report.add("a", True, "fine", witness="ignored")
        report.note("b", CheckStatus.INFO, "measured")
        report.note("c", CheckStatus.INCONCLUSIVE, "underdetermined")
        assert report.ok
        assert report.inconclusive
        assert report.get("a").witness is None
        report.add("d", False, "broken", witness="(0,0)")
        assert not report.ok
        assert [c.id for c in report.failures()] == ["d"]
        assert report.get("missing") is None

    def test_extend_skips_duplicates(self):
        """Test merged reports keep the first result for a repeated id"""
        first, second = Report(title="one"), Report(title="two")
        first.add("x", True)
        second.add("x", False)
        second.add("y", True)
        second.data["k"] = 1
        first.extend(second)
        assert [c.id for c in first.checks] == ["x", "y"]
        assert first.ok
        assert first.data == {"k": 1}

    def test_dump(self):
        """Test statuses serialize as their string values"""
        report = Report(title="r")
        report.add("a", False, "bad", "w")
        dumped = report.model_dump(mode="json")
        assert dumped["checks"][0] == {"id": "a", "status": "fail", "detail": "bad", "witness": "w"}


class TestRunConfig:
    """Test CLI option validation"""

    def test_defaults(self):
        config = RunConfig(command="hh")
        assert config.max_degree == 4
        assert config.output_format == OutputFormat.TABLE
        assert not config.normalized

    def test_rejects_bad_values(self):
        """Test negative degrees, zero caps and unknown options are refused"""
        with pytest.raises(ValidationError):
            RunConfig(command="hh", max_degree=-1)
        with pytest.raises(ValidationError):
            RunConfig(command="hh", max_chain_dim=0)
        with pytest.raises(ValidationError):
            RunConfig(command="hh", threads=2)
