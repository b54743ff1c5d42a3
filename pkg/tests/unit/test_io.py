"""
Unit tests for document loading, fixture lookup and configuration
"""
import json

import pytest

from src.config import get_fixtures_dir, get_max_chain_dim, get_max_degree, get_threads
from src.models.exceptions import DocumentParseError
from src.models.schemas import AlgebraDocument
from src.utils.io import (
    ALGEBRAS, BIMODULES, detect_kind, list_fixtures, load_algebra, parse_document, read_json, resolve,
    write_json_atomic,
)


class TestResolve:
    """Test path and fixture-name resolution"""

    def test_fixture_name(self):
        """Test a bare name resolves to the bundled document"""
        path = resolve("dual_numbers", ALGEBRAS)
        assert path.name == "dual_numbers.json"
        assert resolve("dual_numbers.json", ALGEBRAS) == path

    def test_file_path(self, tmp_path, fixtures_dir):
        """Test an existing path wins over fixture lookup"""
        target = tmp_path / "mine.json"
        target.write_text((fixtures_dir / "algebras" / "kxk.json").read_text())
        assert resolve(str(target), ALGEBRAS) == target

    def test_unknown(self):
        """Test an unknown reference is a document error"""
        with pytest.raises(DocumentParseError):
            resolve("no_such_algebra", ALGEBRAS)

    def test_detect_kind(self, tmp_path, fixtures_dir):
        """Test algebra and bimodule documents are told apart"""
        assert detect_kind("m2") == ALGEBRAS
        assert detect_kind("a3_tilting") == BIMODULES
        target = tmp_path / "x.json"
        target.write_text((fixtures_dir / "bimodules" / "morita_k_m2.json").read_text())
        assert detect_kind(str(target)) == BIMODULES
        with pytest.raises(DocumentParseError):
            detect_kind("nothing_here")

    def test_list_fixtures(self):
        """Test the bundled documents are listed by kind"""
        listing = list_fixtures()
        assert "dual_numbers" in listing[ALGEBRAS]
        assert "a3_tilting" in listing[BIMODULES]
        assert listing[ALGEBRAS] == sorted(listing[ALGEBRAS])


class TestParsing:
    """Test JSON and schema errors"""

    def test_invalid_json(self, tmp_path):
        """Test broken JSON reports its position"""
        target = tmp_path / "broken.json"
        target.write_text('{"name": "x",')
        with pytest.raises(DocumentParseError, match="invalid JSON"):
            read_json(target)

    def test_schema_error_names_field(self):
        """Test a schema violation names the offending field"""
        with pytest.raises(DocumentParseError, match="field 'dim'"):
            parse_document({"name": "x", "field": {"type": "Q"}, "dim": 0, "basis": [], "unit": [], "mult": []},
                           AlgebraDocument, "inline")

    def test_malformed_fixture(self):
        """Test the malformed fixture fails at load time"""
        with pytest.raises(DocumentParseError, match="basis has 1 labels"):
            load_algebra("malformed")

    def test_extra_keys_rejected(self):
        """Test unknown keys are refused"""
        data = {"name": "x", "field": {"type": "Q"}, "dim": 1, "basis": ["1"], "unit": ["1"],
                "mult": [[0, 0, 0, "1"]], "comment": "no"}
        with pytest.raises(DocumentParseError, match="comment"):
            parse_document(data, AlgebraDocument, "inline")


class TestAtomicWrite:
    """Test report writing"""

    def test_write_and_read_back(self, tmp_path):
        """Test the file holds sorted JSON and no temporary files remain"""
        target = tmp_path / "out" / "report.json"
        write_json_atomic(target, {"b": 1, "a": [1, 2]})
        assert json.loads(target.read_text()) == {"a": [1, 2], "b": 1}
        assert target.read_text().index('"a"') < target.read_text().index('"b"')
        assert [p.name for p in target.parent.iterdir()] == ["report.json"]

    def test_overwrite(self, tmp_path):
        """Test an existing file is replaced"""
        target = tmp_path / "report.json"
        write_json_atomic(target, {"v": 1})
        write_json_atomic(target, {"v": 2})
        assert json.loads(target.read_text()) == {"v": 2}


class TestConfig:
    """Test environment getters"""

    def test_defaults(self, monkeypatch):
        """Test unset variables fall back to defaults"""
        for name in ("TTCALC_MAX_CHAIN_DIM", "TTCALC_MAX_DEGREE", "TTCALC_THREADS", "TTCALC_FIXTURES_DIR"):
            monkeypatch.delenv(name, raising=False)
        assert get_max_chain_dim() == 1_000_000
        assert get_max_degree() == 4
        assert get_threads() == 1
        assert get_fixtures_dir().name == "fixtures"

    def test_overrides(self, monkeypatch, tmp_path):
        """Test overrides and garbage values"""
        monkeypatch.setenv("TTCALC_MAX_CHAIN_DIM", "500")
        monkeypatch.setenv("TTCALC_MAX_DEGREE", "not-a-number")
        monkeypatch.setenv("TTCALC_FIXTURES_DIR", str(tmp_path))
        assert get_max_chain_dim() == 500
        assert get_max_degree() == 4
        assert get_fixtures_dir() == tmp_path
        assert list_fixtures() == {ALGEBRAS: [], BIMODULES: []}
